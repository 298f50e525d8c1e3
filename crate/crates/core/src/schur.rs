//! Symmetric affine pencils and Schur-complement realizations.
//!
//! A [`RealizationBlock`] is a symmetric pencil `A(z)` with a designated
//! leading block size `split` such that the trailing block is constant and
//! invertible. It represents the matrix polynomial `A(z) / A22`. The
//! constructions here combine realizations while keeping every coefficient
//! matrix symmetric; all of them act linearly on the pencil's matrices.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::field::{FieldDescriptor, FieldElement, FieldError};
use crate::linalg::{determinant, inverse, rank_factorize, schur_complement, LinalgError, Matrix};
use crate::poly::Point;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchurError {
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("matrix for `{0}` is not symmetric")]
    NotSymmetric(String),
    #[error("duplicate pencil variable `{0}`")]
    DuplicateVariable(String),
    #[error("unknown pencil variable `{0}`")]
    UnknownVariable(String),
    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),
    #[error("trailing block depends on `{0}`")]
    TrailingBlockNotConstant(String),
    #[error("trailing block is singular")]
    SingularTrailingBlock,
    #[error("no shift among the first {trials} nonzero scalars makes the matrix invertible")]
    ShiftExhausted { trials: u64 },
    #[error("invalid pencil encoding: {0}")]
    Encoding(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `A0 + sum_v v * A_v` with every matrix symmetric and `m x m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricPencil {
    field: FieldDescriptor,
    vars: Vec<String>,
    constant: Matrix,
    coeffs: Vec<Matrix>,
}

impl SymmetricPencil {
    pub fn new(
        field: FieldDescriptor,
        vars: Vec<String>,
        constant: Matrix,
        coeffs: Vec<Matrix>,
    ) -> Result<Self, SchurError> {
        if vars.len() != coeffs.len() {
            return Err(SchurError::SizeMismatch(format!(
                "{} variables but {} coefficient matrices",
                vars.len(),
                coeffs.len()
            )));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(SchurError::DuplicateVariable(v.clone()));
            }
        }
        let m = constant.rows();
        let named =
            std::iter::once(("A0", &constant)).chain(vars.iter().map(String::as_str).zip(&coeffs));
        for (name, a) in named {
            if a.field() != field {
                return Err(FieldError::FieldMismatch(field, a.field()).into());
            }
            if a.rows() != m || a.cols() != m {
                return Err(SchurError::SizeMismatch(format!(
                    "matrix for `{name}` is {}x{}, expected {m}x{m}",
                    a.rows(),
                    a.cols()
                )));
            }
            if !a.is_symmetric() {
                return Err(SchurError::NotSymmetric(name.to_string()));
            }
        }
        Ok(SymmetricPencil {
            field,
            vars,
            constant,
            coeffs,
        })
    }

    /// A pencil with no variables.
    pub fn constant(constant: Matrix) -> Result<Self, SchurError> {
        Self::new(constant.field(), Vec::new(), constant, Vec::new())
    }

    pub fn empty(field: FieldDescriptor) -> Self {
        SymmetricPencil {
            field,
            vars: Vec::new(),
            constant: Matrix::zeros(field, 0, 0),
            coeffs: Vec::new(),
        }
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn size(&self) -> usize {
        self.constant.rows()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn constant_matrix(&self) -> &Matrix {
        &self.constant
    }

    pub fn coeff(&self, name: &str) -> Option<&Matrix> {
        self.vars
            .iter()
            .position(|v| v == name)
            .map(|i| &self.coeffs[i])
    }

    /// `(name, A_name)` pairs in registry order.
    pub fn coeffs(&self) -> impl Iterator<Item = (&str, &Matrix)> {
        self.vars.iter().map(String::as_str).zip(&self.coeffs)
    }

    /// `A0 + sum point[v] * A_v`.
    pub fn evaluate(&self, point: &Point) -> Result<Matrix, SchurError> {
        let mut acc = self.constant.clone();
        for (v, a) in self.coeffs() {
            let x = point
                .get(v)
                .ok_or_else(|| SchurError::MissingAssignment(v.to_string()))?;
            if x.field() != self.field {
                return Err(FieldError::FieldMismatch(self.field, x.field()).into());
            }
            if !x.is_zero() && !a.is_zero() {
                acc = acc.try_add(&a.scale(x))?;
            }
        }
        Ok(acc)
    }

    /// Apply a linear map to every matrix of the pencil.
    pub fn map(&self, f: impl Fn(&Matrix) -> Matrix) -> Self {
        let constant = f(&self.constant);
        let coeffs = self.coeffs.iter().map(&f).collect();
        SymmetricPencil {
            field: self.field,
            vars: self.vars.clone(),
            constant,
            coeffs,
        }
    }

    /// Combine two pencils matrix by matrix over the union of their
    /// variables (left registry first). A variable missing on one side
    /// contributes a zero matrix of that side's size.
    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&Matrix, &Matrix) -> Matrix,
    ) -> Result<Self, SchurError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch(self.field, other.field).into());
        }
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        let zero_l = Matrix::zeros(self.field, self.size(), self.size());
        let zero_r = Matrix::zeros(self.field, other.size(), other.size());
        let coeffs = vars
            .iter()
            .map(|v| {
                f(
                    self.coeff(v).unwrap_or(&zero_l),
                    other.coeff(v).unwrap_or(&zero_r),
                )
            })
            .collect();
        Ok(SymmetricPencil {
            field: self.field,
            vars,
            constant: f(&self.constant, &other.constant),
            coeffs,
        })
    }

    /// Re-express over `vars`. New variables get zero matrices; dropped
    /// variables must have zero coefficient matrices.
    pub fn with_vars(&self, vars: Vec<String>) -> Result<Self, SchurError> {
        for (v, a) in self.coeffs() {
            if !vars.iter().any(|w| w == v) && !a.is_zero() {
                return Err(SchurError::UnknownVariable(v.to_string()));
            }
        }
        let zero = Matrix::zeros(self.field, self.size(), self.size());
        let coeffs = vars
            .iter()
            .map(|v| self.coeff(v).cloned().unwrap_or_else(|| zero.clone()))
            .collect();
        Self::new(self.field, vars, self.constant.clone(), coeffs)
    }

    /// Split off the coefficient of `name`, returning it and the rest.
    pub fn take_var(&self, name: &str) -> Result<(Matrix, Self), SchurError> {
        let i = self
            .vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| SchurError::UnknownVariable(name.to_string()))?;
        let mut rest = self.clone();
        rest.vars.remove(i);
        let a = rest.coeffs.remove(i);
        Ok((a, rest))
    }

    /// Checks the symmetry and shape invariants.
    pub fn validate(&self) -> Result<(), SchurError> {
        Self::new(
            self.field,
            self.vars.clone(),
            self.constant.clone(),
            self.coeffs.clone(),
        )
        .map(|_| ())
    }

    pub fn to_json(&self) -> Value {
        let mut coeff = Map::new();
        for (v, a) in self.coeffs() {
            coeff.insert(v.to_string(), a.to_json());
        }
        json!({
            "field": self.field.to_json(),
            "vars": self.vars,
            "size": self.size(),
            "A0": self.constant.to_json(),
            "coeff": coeff,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, SchurError> {
        let bad = |what: &str| SchurError::Encoding(what.to_string());
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
        let constant = Matrix::from_json(field, v.get("A0").ok_or_else(|| bad("missing A0"))?)?;
        let coeff = v
            .get("coeff")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("missing coeff"))?;
        let coeffs = vars
            .iter()
            .map(|name| {
                let m = coeff
                    .get(name)
                    .ok_or_else(|| bad(&format!("no matrix for `{name}`")))?;
                Ok(Matrix::from_json(field, m)?)
            })
            .collect::<Result<Vec<_>, SchurError>>()?;
        if let Some(size) = v.get("size").and_then(Value::as_u64) {
            if size as usize != constant.rows() {
                return Err(bad("size does not match A0"));
            }
        }
        Self::new(field, vars, constant, coeffs)
    }
}

/// Human-readable view: `A0` followed by each coefficient matrix.
impl fmt::Display for SymmetricPencil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "size {} over {}", self.size(), self.field)?;
        writeln!(f, "A0 =")?;
        write!(f, "{}", self.constant)?;
        for (v, a) in self.coeffs() {
            writeln!(f, "A[{v}] =")?;
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Block-diagonal pencil `P ⊕ Q`; determinants multiply pointwise.
pub fn direct_sum(p: &SymmetricPencil, q: &SymmetricPencil) -> Result<SymmetricPencil, SchurError> {
    p.zip_with(q, |a, b| a.direct_sum(b))
}

/// A symmetric pencil whose trailing `(size - split)` block is constant and
/// invertible, standing for the Schur complement onto the leading block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationBlock {
    pencil: SymmetricPencil,
    split: usize,
}

impl RealizationBlock {
    pub fn new(pencil: SymmetricPencil, split: usize) -> Result<Self, SchurError> {
        let n = pencil.size();
        if split > n {
            return Err(SchurError::SizeMismatch(format!(
                "split {split} exceeds size {n}"
            )));
        }
        let k = n - split;
        for (v, a) in pencil.coeffs() {
            if !a.block(split, split, k, k).is_zero() {
                return Err(SchurError::TrailingBlockNotConstant(v.to_string()));
            }
        }
        if determinant(&pencil.constant.block(split, split, k, k))?.is_zero() {
            return Err(SchurError::SingularTrailingBlock);
        }
        pencil.validate()?;
        Ok(RealizationBlock { pencil, split })
    }

    pub fn pencil(&self) -> &SymmetricPencil {
        &self.pencil
    }

    pub fn into_pencil(self) -> SymmetricPencil {
        self.pencil
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn size(&self) -> usize {
        self.pencil.size()
    }

    pub fn field(&self) -> FieldDescriptor {
        self.pencil.field
    }

    pub fn trailing_block(&self) -> Matrix {
        let k = self.size() - self.split;
        self.pencil.constant.block(self.split, self.split, k, k)
    }

    pub fn trailing_det(&self) -> FieldElement {
        determinant(&self.trailing_block()).expect("square block")
    }

    /// The represented matrix at `point`.
    pub fn schur_at(&self, point: &Point) -> Result<Matrix, SchurError> {
        Ok(schur_complement(&self.pencil.evaluate(point)?, self.split)?)
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.pencil.to_json();
        v["split"] = Value::from(self.split);
        v
    }

    pub fn from_json(v: &Value) -> Result<Self, SchurError> {
        let split = v
            .get("split")
            .and_then(Value::as_u64)
            .ok_or_else(|| SchurError::Encoding("missing split".into()))?;
        Self::new(SymmetricPencil::from_json(v)?, split as usize)
    }
}

/// How `uvB` is realized when `B` is singular.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Invertible construction when possible, otherwise rank factorization.
    #[default]
    Auto,
    /// Split `B = (B - λI) + λI` with both parts invertible.
    Shift,
    /// Factor `B = Y^T diag(B1, 0) Y`, pad, then apply the congruence.
    RankFactor,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Strategy::Auto),
            "shift" => Ok(Strategy::Shift),
            "rankfactor" | "rank-factor" => Ok(Strategy::RankFactor),
            _ => Err(format!(
                "unknown strategy `{s}` (expected auto, shift or rankfactor)"
            )),
        }
    }
}

/// Which construction produced a product realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Realization {
    /// `B = 0`: the pencil `0_m ⊕ [1]`.
    Trivial,
    Invertible,
    Shift,
    RankFactor,
}

impl Realization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Realization::Trivial => "Trivial",
            Realization::Invertible => "Invertible",
            Realization::Shift => "Shift",
            Realization::RankFactor => "RankFactor",
        }
    }
}

impl fmt::Display for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn var_list(u: &str, v: &str) -> Vec<String> {
    if u == v {
        vec![u.to_string()]
    } else {
        vec![u.to_string(), v.to_string()]
    }
}

/// `3m x 3m` realization of `uvB` for invertible `B`:
///
/// ```text
/// [ 0         (u+v)/2 I   (u-v)/2 I ]
/// [ (u+v)/2 I  -B^{-1}     0        ]
/// [ (u-v)/2 I   0          B^{-1}   ]
/// ```
fn realize_invertible(b: &Matrix, u: &str, v: &str) -> Result<RealizationBlock, SchurError> {
    let field = b.field();
    let m = b.rows();
    let b_inv = inverse(b)?;
    let mut a0 = Matrix::zeros(field, 3 * m, 3 * m);
    a0.set_block(m, m, &b_inv.neg());
    a0.set_block(2 * m, 2 * m, &b_inv);

    let half = field.half();
    // coefficient of one variable with signs (s1, s2) on the two half-blocks
    let coupling = |s1: &FieldElement, s2: &FieldElement| {
        let mut a = Matrix::zeros(field, 3 * m, 3 * m);
        for i in 0..m {
            for (blk, s) in [(1, s1), (2, s2)] {
                let x = s * &half;
                a.set(i, blk * m + i, x.clone());
                a.set(blk * m + i, i, x);
            }
        }
        a
    };
    let one = field.one();
    let a_u = coupling(&one, &one);
    let a_v = coupling(&one, &-&one);
    let coeffs = if u == v {
        vec![a_u.try_add(&a_v)?]
    } else {
        vec![a_u, a_v]
    };
    let pencil = SymmetricPencil::new(field, var_list(u, v), a0, coeffs)?;
    RealizationBlock::new(pencil, m)
}

/// `0_m ⊕ [1]`, whose Schur complement is the zero matrix.
fn realize_zero(
    field: FieldDescriptor,
    m: usize,
    u: &str,
    v: &str,
) -> Result<RealizationBlock, SchurError> {
    let mut a0 = Matrix::zeros(field, m + 1, m + 1);
    a0.set(m, m, field.one());
    let zero = Matrix::zeros(field, m + 1, m + 1);
    let vars = var_list(u, v);
    let coeffs = vec![zero; vars.len()];
    RealizationBlock::new(SymmetricPencil::new(field, vars, a0, coeffs)?, m)
}

fn shift_trials(field: FieldDescriptor, m: usize) -> u64 {
    let bound = 2 * m as u64 + 1;
    match field.order() {
        Some(q) => bound.min(q - 1),
        None => bound,
    }
}

/// Realize `uvB` as a Schur complement.
///
/// Sizes: `3m` for invertible `B`, `5m` via [`Strategy::Shift`], `m + 2r`
/// via [`Strategy::RankFactor`] and `m + 1` for `B = 0`.
pub fn realize_product(
    b: &Matrix,
    u: &str,
    v: &str,
    strategy: Strategy,
) -> Result<(RealizationBlock, Realization), SchurError> {
    if !b.is_square() {
        return Err(LinalgError::NotSquare(b.rows(), b.cols()).into());
    }
    if !b.is_symmetric() {
        return Err(SchurError::NotSymmetric("B".into()));
    }
    let field = b.field();
    let m = b.rows();
    if b.is_zero() {
        return Ok((realize_zero(field, m, u, v)?, Realization::Trivial));
    }
    if !determinant(b)?.is_zero() {
        return Ok((realize_invertible(b, u, v)?, Realization::Invertible));
    }
    match strategy {
        Strategy::Shift => realize_shift(b, u, v).map(|r| (r, Realization::Shift)),
        Strategy::Auto | Strategy::RankFactor => {
            realize_rank_factor(b, u, v).map(|r| (r, Realization::RankFactor))
        }
    }
}

fn realize_shift(b: &Matrix, u: &str, v: &str) -> Result<RealizationBlock, SchurError> {
    let field = b.field();
    let m = b.rows();
    let trials = shift_trials(field, m);
    for t in 1..=trials {
        let lambda = field.from_i64(t as i64);
        let shift = Matrix::identity(field, m).scale(&lambda);
        let shifted = b.try_sub(&shift)?;
        if determinant(&shifted)?.is_zero() {
            continue;
        }
        let r1 = realize_invertible(&shifted, u, v)?;
        let r2 = realize_invertible(&shift, u, v)?;
        return sum_two(&r1, &r2);
    }
    Err(SchurError::ShiftExhausted { trials })
}

fn realize_rank_factor(b: &Matrix, u: &str, v: &str) -> Result<RealizationBlock, SchurError> {
    let m = b.rows();
    let fact = rank_factorize(b)?;
    let inner = realize_invertible(&fact.b, u, v)?;
    let padded = shorted_embed(&inner, m - fact.rank)?;
    congruence_mult(&padded, &fact.y.transpose())
}

/// Add the pencil `B` to the represented matrix: `C11 = A11 + B`, all other
/// blocks unchanged.
pub fn sum_with_matrix(
    r: &RealizationBlock,
    b: &SymmetricPencil,
) -> Result<RealizationBlock, SchurError> {
    if b.size() != r.split {
        return Err(SchurError::SizeMismatch(format!(
            "pencil of size {} added to realization with split {}",
            b.size(),
            r.split
        )));
    }
    let k = r.split;
    let pencil = r.pencil.zip_with(b, |a, bm| {
        let mut c = a.clone();
        c.set_block(0, 0, &a.block(0, 0, k, k).try_add(bm).expect("same size"));
        c
    })?;
    RealizationBlock::new(pencil, k)
}

/// Realization of the sum of two represented matrices:
///
/// ```text
/// [ A11 + B11  A12  B12 ]
/// [ A21        A22  0   ]
/// [ B21        0    B22 ]
/// ```
pub fn sum_two(
    r1: &RealizationBlock,
    r2: &RealizationBlock,
) -> Result<RealizationBlock, SchurError> {
    if r1.split != r2.split {
        return Err(SchurError::SizeMismatch(format!(
            "splits {} and {} differ",
            r1.split, r2.split
        )));
    }
    let k = r1.split;
    let p = r1.size() - k;
    let q = r2.size() - k;
    let field = r1.field();
    let pencil = r1.pencil.zip_with(&r2.pencil, |a, b| {
        let mut c = Matrix::zeros(field, k + p + q, k + p + q);
        c.set_block(
            0,
            0,
            &a.block(0, 0, k, k)
                .try_add(&b.block(0, 0, k, k))
                .expect("same size"),
        );
        c.set_block(0, k, &a.block(0, k, k, p));
        c.set_block(k, 0, &a.block(k, 0, p, k));
        c.set_block(0, k + p, &b.block(0, k, k, q));
        c.set_block(k + p, 0, &b.block(k, 0, q, k));
        c.set_block(k, k, &a.block(k, k, p, p));
        c.set_block(k + p, k + p, &b.block(k, k, q, q));
        c
    })?;
    RealizationBlock::new(pencil, k)
}

/// Pad the represented matrix with a zero block: `S ⊕ 0_l`.
///
/// ```text
/// [ B11  0    B12 ]
/// [ 0    0_l  0   ]
/// [ B21  0    B22 ]
/// ```
pub fn shorted_embed(r: &RealizationBlock, l: usize) -> Result<RealizationBlock, SchurError> {
    if l == 0 {
        return Ok(r.clone());
    }
    let s = r.split;
    let k = r.size() - s;
    let field = r.field();
    let pencil = r.pencil.map(|b| {
        let mut c = Matrix::zeros(field, s + l + k, s + l + k);
        c.set_block(0, 0, &b.block(0, 0, s, s));
        c.set_block(0, s + l, &b.block(0, s, s, k));
        c.set_block(s + l, 0, &b.block(s, 0, k, s));
        c.set_block(s + l, s + l, &b.block(s, s, k, k));
        c
    });
    RealizationBlock::new(pencil, s + l)
}

/// Congruence `X S X^T` of the represented matrix `S`:
/// `D = [[X C11 X^T, X C12], [C21 X^T, C22]]`.
pub fn congruence_mult(r: &RealizationBlock, x: &Matrix) -> Result<RealizationBlock, SchurError> {
    let s = r.split;
    if !x.is_square() || x.rows() != s {
        return Err(SchurError::SizeMismatch(format!(
            "multiplier is {}x{}, expected {s}x{s}",
            x.rows(),
            x.cols()
        )));
    }
    if x.field() != r.field() {
        return Err(FieldError::FieldMismatch(r.field(), x.field()).into());
    }
    let k = r.size() - s;
    let xt = x.transpose();
    let pencil = r.pencil.map(|c| {
        let mul = |a: &Matrix, b: &Matrix| a.try_mul(b).expect("conformable");
        let mut d = c.clone();
        d.set_block(0, 0, &mul(&mul(x, &c.block(0, 0, s, s)), &xt));
        d.set_block(0, s, &mul(x, &c.block(0, s, s, k)));
        d.set_block(s, 0, &mul(&c.block(s, 0, k, s), &xt));
        d
    });
    RealizationBlock::new(pencil, s)
}
