//! Sparse multivariate polynomials over a [`FieldDescriptor`].
//!
//! A polynomial carries its own variable registry; monomials store
//! `(registry index, exponent)` pairs. Arithmetic between polynomials with
//! different registries merges them by name, left operand first.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{FieldDescriptor, FieldElement, FieldError};

/// Prefix of generated variable names. The parser never accepts it.
pub const FRESH_PREFIX: &str = "__w";

/// A variable assignment, keyed by name.
pub type Point = BTreeMap<String, FieldElement>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("coefficient error at position {position}: {message}")]
    Coefficient { position: usize, message: String },
    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("cannot substitute `{0}` by a product containing itself")]
    SelfSubstitution(String),
    #[error("invalid polynomial encoding: {0}")]
    Encoding(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Exponent vector as sorted `(variable index, exponent)` pairs, no zeros.
///
/// Ordered graded-lexicographically with respect to registry order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(index: usize) -> Self {
        Monomial(vec![(index, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(usize, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_unstable();
        let mut out: Vec<(usize, u32)> = Vec::with_capacity(pairs.len());
        for (i, e) in pairs {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += e,
                _ => out.push((i, e)),
            }
        }
        Monomial(out)
    }

    pub fn from_dense(exps: &[u32]) -> Self {
        Monomial(
            exps.iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (i, e))
                .collect(),
        )
    }

    pub fn to_dense(&self, nvars: usize) -> Vec<u32> {
        let mut out = vec![0; nvars];
        for &(i, e) in &self.0 {
            out[i] = e;
        }
        out
    }

    pub fn pairs(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0
            .iter()
            .find(|&&(i, _)| i == index)
            .map_or(0, |&(_, e)| e)
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut pairs = self.0.clone();
        pairs.extend_from_slice(&other.0);
        Monomial::from_pairs(pairs)
    }

    fn remap(&self, map: &[usize]) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|&(i, e)| (map[i], e)).collect())
    }

    /// Variable indices with multiplicity, in registry order.
    pub fn factors(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .flat_map(|&(i, e)| std::iter::repeat_n(i, e as usize))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            // lex on dense exponent vectors: an earlier variable with a
            // larger exponent wins
            for (a, b) in self.0.iter().zip(other.0.iter()) {
                if a.0 != b.0 {
                    return if a.0 < b.0 {
                        Ordering::Greater
                    } else {
                        Ordering::Less
                    };
                }
                if a.1 != b.1 {
                    return a.1.cmp(&b.1);
                }
            }
            self.0.len().cmp(&other.0.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial with nonzero coefficients only.
#[derive(Debug, Clone)]
pub struct Polynomial {
    field: FieldDescriptor,
    vars: Vec<String>,
    terms: BTreeMap<Monomial, FieldElement>,
}

/// Formal equality, keyed by variable name. Registries may differ in
/// variables that do not occur in any term.
impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.named_terms() == other.named_terms()
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(field: FieldDescriptor, vars: Vec<String>) -> Self {
        Polynomial {
            field,
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: FieldDescriptor, vars: Vec<String>, c: FieldElement) -> Self {
        let mut p = Self::zero(field, vars);
        p.add_term(Monomial::one(), c);
        p
    }

    /// The single variable `name`, added to `vars` if missing.
    pub fn variable(field: FieldDescriptor, mut vars: Vec<String>, name: &str) -> Self {
        let idx = match vars.iter().position(|v| v == name) {
            Some(i) => i,
            None => {
                vars.push(name.to_string());
                vars.len() - 1
            }
        };
        let mut p = Self::zero(field, vars);
        p.add_term(Monomial::var(idx), field.one());
        p
    }

    pub fn from_terms(
        field: FieldDescriptor,
        vars: Vec<String>,
        terms: impl IntoIterator<Item = (Monomial, FieldElement)>,
    ) -> Self {
        let mut p = Self::zero(field, vars);
        for (m, c) in terms {
            assert!(
                m.0.iter().all(|&(i, _)| i < p.vars.len()),
                "monomial index out of registry range"
            );
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: FieldElement) {
        assert_eq!(c.field(), self.field, "coefficient from a different field");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(acc) => {
                *acc = &*acc + &c;
                if acc.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> FieldElement {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn named_terms(&self) -> BTreeMap<Vec<(String, u32)>, FieldElement> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut key: Vec<(String, u32)> =
                    m.0.iter()
                        .map(|&(i, e)| (self.vars[i].clone(), e))
                        .collect();
                key.sort();
                (key, c.clone())
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for constants and for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        match self.var_index(name) {
            Some(i) => self.terms.keys().map(|m| m.exponent(i)).max().unwrap_or(0),
            None => 0,
        }
    }

    pub fn is_affine_linear(&self) -> bool {
        self.terms.keys().all(|m| m.degree() <= 1)
    }

    pub fn constant_term(&self) -> FieldElement {
        self.coefficient(&Monomial::one())
    }

    /// Coefficient of the degree-one monomial `name`.
    pub fn linear_coefficient(&self, name: &str) -> FieldElement {
        match self.var_index(name) {
            Some(i) => self.coefficient(&Monomial::var(i)),
            None => self.field.zero(),
        }
    }

    /// Re-express over a registry that contains every current variable.
    pub fn with_vars(&self, vars: Vec<String>) -> Result<Self, PolyError> {
        let map = self
            .vars
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|w| w == v)
                    .ok_or_else(|| PolyError::UnknownVariable(v.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Polynomial {
            field: self.field,
            vars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.remap(&map), c.clone()))
                .collect(),
        })
    }

    /// Append variables that are not yet in the registry.
    pub fn extend_vars<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Self {
        let mut vars = self.vars.clone();
        for n in names {
            if !vars.iter().any(|v| v == n) {
                vars.push(n.to_string());
            }
        }
        self.with_vars(vars).expect("superset registry")
    }

    /// Bring two polynomials onto the merged registry.
    fn unify(&self, other: &Self) -> Result<(Self, Self), PolyError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch(self.field, other.field).into());
        }
        if self.vars == other.vars {
            return Ok((self.clone(), other.clone()));
        }
        let merged = self.extend_vars(other.vars.iter().map(String::as_str));
        let other = other.with_vars(merged.vars.clone())?;
        Ok((merged, other))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        let (mut a, b) = self.unify(other)?;
        for (m, c) in b.terms {
            a.add_term(m, c);
        }
        Ok(a)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        let (a, b) = self.unify(other)?;
        let mut out = Polynomial::zero(a.field, a.vars.clone());
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            field: self.field,
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        let mut out = Polynomial::zero(self.field, self.vars.clone());
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Polynomial::constant(self.field, self.vars.clone(), self.field.one());
        for _ in 0..exp {
            acc = acc.try_mul(self).expect("same registry");
        }
        acc
    }

    pub fn evaluate(&self, point: &Point) -> Result<FieldElement, PolyError> {
        let values = self
            .vars
            .iter()
            .map(|v| {
                let x = point
                    .get(v)
                    .ok_or_else(|| PolyError::MissingAssignment(v.clone()))?;
                if x.field() != self.field {
                    return Err(FieldError::FieldMismatch(self.field, x.field()).into());
                }
                Ok(x)
            })
            .collect::<Result<Vec<_>, PolyError>>()?;
        let mut acc = self.field.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(i, e) in m.pairs() {
                t = &t * &values[i].pow(e as u64);
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Replace every occurrence of `w` by the product `u*v` and drop `w`
    /// from the registry.
    pub fn substitute_product(&self, w: &str, u: &str, v: &str) -> Result<Self, PolyError> {
        let wi = self
            .var_index(w)
            .ok_or_else(|| PolyError::UnknownVariable(w.to_string()))?;
        if w == u || w == v {
            return Err(PolyError::SelfSubstitution(w.to_string()));
        }
        let ui = self
            .var_index(u)
            .ok_or_else(|| PolyError::UnknownVariable(u.to_string()))?;
        let vi = self
            .var_index(v)
            .ok_or_else(|| PolyError::UnknownVariable(v.to_string()))?;
        // indices after removing w
        let shift = |i: usize| if i > wi { i - 1 } else { i };
        let mut vars = self.vars.clone();
        vars.remove(wi);
        let mut out = Polynomial::zero(self.field, vars);
        for (m, c) in &self.terms {
            let e = m.exponent(wi);
            let mut pairs: Vec<(usize, u32)> = m
                .pairs()
                .iter()
                .filter(|&&(i, _)| i != wi)
                .map(|&(i, k)| (shift(i), k))
                .collect();
            if e > 0 {
                pairs.push((shift(ui), e));
                pairs.push((shift(vi), e));
            }
            out.add_term(Monomial::from_pairs(pairs), c.clone());
        }
        Ok(out)
    }

    /// Parse the textual grammar. See [`parse`].
    pub fn parse(text: &str, field: FieldDescriptor) -> Result<Self, PolyError> {
        parse(text, field)
    }

    pub fn render_monomial(&self, m: &Monomial) -> String {
        m.pairs()
            .iter()
            .map(|&(i, e)| {
                if e == 1 {
                    self.vars[i].clone()
                } else {
                    format!("{}^{}", self.vars[i], e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| json!({"coeff": c.to_json(), "exponents": m.to_dense(self.vars.len())}))
            .collect();
        json!({
            "field": self.field.to_json(),
            "vars": self.vars,
            "terms": terms,
            "text": self.to_string(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, PolyError> {
        let bad = |what: &str| PolyError::Encoding(what.to_string());
        let field =
            FieldDescriptor::from_json(v.get("field").ok_or_else(|| bad("missing field"))?)?;
        let vars: Vec<String> = v
            .get("vars")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing vars"))?
            .iter()
            .map(|x| {
                x.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| bad("variable name"))
            })
            .collect::<Result<_, _>>()?;
        let mut p = Polynomial::zero(field, vars);
        for t in v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing terms"))?
        {
            let c = field.scalar_from_json(t.get("coeff").ok_or_else(|| bad("coeff"))?)?;
            let exps: Vec<u32> = t
                .get("exponents")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("exponents"))?
                .iter()
                .map(|e| e.as_u64().map(|e| e as u32).ok_or_else(|| bad("exponent")))
                .collect::<Result<_, _>>()?;
            if exps.len() != p.vars.len() {
                return Err(bad("exponent vector length"));
            }
            p.add_term(Monomial::from_dense(&exps), c);
        }
        Ok(p)
    }
}

/// Descending graded-lex rendering, parseable by [`parse`] for user
/// variable names.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = if negative { -c } else { c.clone() };
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            if m.is_constant() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", self.render_monomial(m))?;
            } else {
                write!(f, "{}*{}", abs, self.render_monomial(m))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(text[start..i].parse().expect("digits"))));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            b'_' => {
                return Err(PolyError::Syntax {
                    position: start,
                    message: format!(
                        "identifiers must start with a letter (the `{FRESH_PREFIX}` prefix is reserved)"
                    ),
                })
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(PolyError::Syntax {
                    position: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    field: FieldDescriptor,
    vars: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.try_add(&self.term()?)?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.try_sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = acc.try_mul(&self.unary()?)?;
                }
                Tok::Slash => {
                    self.bump();
                    let at = self.offset();
                    let d = self.unary()?;
                    if !d.is_affine_linear() || d.terms.keys().any(|m| !m.is_constant()) {
                        return Err(PolyError::Coefficient {
                            position: at,
                            message: "divisor must be a constant".into(),
                        });
                    }
                    let inv = d
                        .constant_term()
                        .inv()
                        .map_err(|_| PolyError::Coefficient {
                            position: at,
                            message: "division by zero".into(),
                        })?;
                    acc = acc.scale(&inv);
                }
                Tok::Ident(_) | Tok::Int(_) | Tok::LParen => {
                    return self.syntax("implicit multiplication is not allowed; use `*`")
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        match self.bump() {
            Tok::Int(n) => match u32::try_from(&n) {
                Ok(e) if e <= 1 << 16 => Ok(base.pow(e)),
                _ => self.syntax("exponent too large"),
            },
            _ => {
                self.pos -= 1;
                self.syntax("expected a non-negative integer exponent")
            }
        }
    }

    fn base(&mut self) -> Result<Polynomial, PolyError> {
        match self.bump() {
            Tok::Int(n) => Ok(Polynomial::constant(
                self.field,
                self.vars.clone(),
                self.field.from_bigint(&n),
            )),
            Tok::Ident(name) => Ok(Polynomial::variable(self.field, self.vars.clone(), &name)),
            Tok::LParen => {
                let inner = self.expr()?;
                match self.bump() {
                    Tok::RParen => Ok(inner),
                    _ => {
                        self.pos -= 1;
                        self.syntax("expected `)`")
                    }
                }
            }
            Tok::End => self.syntax("unexpected end of input"),
            _ => {
                self.pos -= 1;
                self.syntax("expected a number, a variable or `(`")
            }
        }
    }
}

/// Parse a polynomial.
///
/// Grammar: `expr := term (('+'|'-') term)*`, `term := unary (('*'|'/') unary)*`,
/// `unary := ('-'|'+')* factor`, `factor := base ('^' uint)?`,
/// `base := int | ident | '(' expr ')'`. Division is only by nonzero
/// constants. The registry lists variables in order of first appearance.
pub fn parse(text: &str, field: FieldDescriptor) -> Result<Polynomial, PolyError> {
    let toks = tokenize(text)?;
    let mut vars: Vec<String> = Vec::new();
    for (_, t) in &toks {
        if let Tok::Ident(name) = t {
            if !vars.contains(name) {
                vars.push(name.clone());
            }
        }
    }
    let mut parser = Parser {
        toks,
        pos: 0,
        field,
        vars,
    };
    let p = parser.expr()?;
    if *parser.peek() != Tok::End {
        return parser.syntax("unexpected trailing input");
    }
    Ok(p)
}

/// Total number of degree-two-or-more factor slots, `sum (deg - 1)` over
/// nonlinear monomials.
pub fn nonlinear_slots(p: &Polynomial) -> u32 {
    p.terms().map(|(m, _)| m.degree().saturating_sub(1)).sum()
}
