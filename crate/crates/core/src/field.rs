//! Exact scalars over the rationals and over prime fields of odd characteristic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;
use thiserror::Error;

/// Message attached to every refusal of a characteristic-2 field.
pub const CHAR_TWO_MESSAGE: &str = "characteristic 2 is not supported: symmetric determinantal \
representations can fail to exist in characteristic 2 (the polynomial xy + z over F_2 is not the \
determinant of any symmetric matrix with entries in F_2 and the variables), and the construction \
needs the scalar 1/2";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("{CHAR_TWO_MESSAGE}")]
    CharacteristicTwo,
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldDescriptor, FieldDescriptor),
    #[error("invalid field spec `{0}` (expected `q` or `fp:<prime>`)")]
    InvalidSpec(String),
    #[error("invalid scalar encoding: {0}")]
    InvalidScalar(String),
}

/// Which field a scalar lives in.
///
/// Only `Rationals` and prime fields with modulus at least 3 can be built;
/// [`make_field`] refuses everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldDescriptor {
    Rationals,
    Prime(u64),
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rationals => write!(f, "Q"),
            FieldDescriptor::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Rationals,
    PrimeField,
}

/// Validate and build a field descriptor.
pub fn make_field(kind: FieldKind, modulus: Option<u64>) -> Result<FieldDescriptor, FieldError> {
    match kind {
        FieldKind::Rationals => Ok(FieldDescriptor::Rationals),
        FieldKind::PrimeField => {
            let p = modulus.ok_or_else(|| FieldError::InvalidSpec("missing modulus".into()))?;
            if p == 2 {
                return Err(FieldError::CharacteristicTwo);
            }
            if !is_prime(p) {
                return Err(FieldError::NotPrime(p));
            }
            Ok(FieldDescriptor::Prime(p))
        }
    }
}

impl FieldDescriptor {
    pub fn rationals() -> Self {
        FieldDescriptor::Rationals
    }

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        make_field(FieldKind::PrimeField, Some(p))
    }

    /// Parse the command-line form: `q` or `fp:<prime>`.
    pub fn parse_spec(spec: &str) -> Result<Self, FieldError> {
        let s = spec.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(FieldDescriptor::Rationals);
        }
        let Some(rest) = s.strip_prefix("fp:").or_else(|| s.strip_prefix("Fp:")) else {
            return Err(FieldError::InvalidSpec(spec.to_string()));
        };
        let p: u64 = rest
            .trim()
            .parse()
            .map_err(|_| FieldError::InvalidSpec(spec.to_string()))?;
        Self::prime(p)
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldDescriptor::Rationals => 0,
            FieldDescriptor::Prime(p) => *p,
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(&self) -> Option<u64> {
        match self {
            FieldDescriptor::Rationals => None,
            FieldDescriptor::Prime(p) => Some(*p),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, FieldDescriptor::Prime(_))
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn half(&self) -> FieldElement {
        self.from_i64(2)
            .inv()
            .expect("2 is invertible in every admissible field")
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        match *self {
            FieldDescriptor::Rationals => FieldElement {
                field: *self,
                repr: Repr::Rational(BigRational::from_integer(BigInt::from(n))),
            },
            FieldDescriptor::Prime(p) => FieldElement {
                field: *self,
                repr: Repr::Residue((n as i128).rem_euclid(p as i128) as u64),
            },
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        match *self {
            FieldDescriptor::Rationals => FieldElement {
                field: *self,
                repr: Repr::Rational(BigRational::from_integer(n.clone())),
            },
            FieldDescriptor::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                FieldElement {
                    field: *self,
                    repr: Repr::Residue(r.to_u64().expect("residue fits in u64")),
                }
            }
        }
    }

    /// `num / den` in this field. Over F_p the denominator is inverted mod p.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<FieldElement, FieldError> {
        let d = self.from_bigint(den);
        if d.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(&self.from_bigint(num) * &d.inv()?)
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<FieldElement, FieldError> {
        self.from_ratio(q.numer(), q.denom())
    }

    pub fn to_json(&self) -> Value {
        match self {
            FieldDescriptor::Rationals => serde_json::json!({"kind": "Q"}),
            FieldDescriptor::Prime(p) => serde_json::json!({"kind": "Fp", "p": p}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, FieldError> {
        let bad = || FieldError::InvalidSpec(v.to_string());
        match v.get("kind").and_then(Value::as_str) {
            Some("Q") => Ok(FieldDescriptor::Rationals),
            Some("Fp") => {
                let p = v.get("p").and_then(Value::as_u64).ok_or_else(bad)?;
                Self::prime(p)
            }
            _ => Err(bad()),
        }
    }

    /// Decode a scalar: `"num/den"` strings over Q, integer residues over F_p.
    pub fn scalar_from_json(&self, v: &Value) -> Result<FieldElement, FieldError> {
        let bad = || FieldError::InvalidScalar(v.to_string());
        match self {
            FieldDescriptor::Rationals => {
                let s = v.as_str().ok_or_else(bad)?;
                let (num, den) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s, "1"),
                };
                let num: BigInt = num.trim().parse().map_err(|_| bad())?;
                let den: BigInt = den.trim().parse().map_err(|_| bad())?;
                self.from_ratio(&num, &den)
            }
            FieldDescriptor::Prime(p) => {
                let r = v.as_u64().ok_or_else(bad)?;
                if r >= *p {
                    return Err(bad());
                }
                Ok(self.from_i64(0).with_residue(r))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    Rational(BigRational),
    Residue(u64),
}

/// An exact scalar tagged with its field.
///
/// The arithmetic operators panic when the two operands belong to different
/// fields; the `try_*` methods report [`FieldError::FieldMismatch`] instead.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: FieldDescriptor,
    repr: Repr,
}

impl FieldElement {
    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Rational(q) => q.is_zero(),
            Repr::Residue(r) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Rational(q) => q.is_one(),
            Repr::Residue(r) => *r == 1,
        }
    }

    /// The rational value, if this element lives in Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.repr {
            Repr::Rational(q) => Some(q),
            Repr::Residue(_) => None,
        }
    }

    /// The canonical residue in `[0, p)`, if this element lives in F_p.
    pub fn residue(&self) -> Option<u64> {
        match &self.repr {
            Repr::Residue(r) => Some(*r),
            Repr::Rational(_) => None,
        }
    }

    fn with_residue(mut self, r: u64) -> Self {
        self.repr = Repr::Residue(r);
        self
    }

    fn check(&self, other: &Self) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch(self.field, other.field))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(self.add_unchecked(&other.neg_value()))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(self.mul_unchecked(&other.inv()?))
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        let repr = match (&self.repr, &other.repr) {
            (Repr::Rational(a), Repr::Rational(b)) => Repr::Rational(a + b),
            (Repr::Residue(a), Repr::Residue(b)) => {
                let p = self.field.characteristic() as u128;
                Repr::Residue(((*a as u128 + *b as u128) % p) as u64)
            }
            _ => unreachable!("representation does not match field"),
        };
        FieldElement {
            field: self.field,
            repr,
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let repr = match (&self.repr, &other.repr) {
            (Repr::Rational(a), Repr::Rational(b)) => Repr::Rational(a * b),
            (Repr::Residue(a), Repr::Residue(b)) => {
                Repr::Residue(mul_mod(*a, *b, self.field.characteristic()))
            }
            _ => unreachable!("representation does not match field"),
        };
        FieldElement {
            field: self.field,
            repr,
        }
    }

    fn neg_value(&self) -> Self {
        let repr = match &self.repr {
            Repr::Rational(a) => Repr::Rational(-a),
            Repr::Residue(0) => Repr::Residue(0),
            Repr::Residue(a) => Repr::Residue(self.field.characteristic() - a),
        };
        FieldElement {
            field: self.field,
            repr,
        }
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let repr = match &self.repr {
            Repr::Rational(a) => Repr::Rational(a.recip()),
            Repr::Residue(a) => Repr::Residue(inv_mod(*a, self.field.characteristic())),
        };
        Ok(FieldElement {
            field: self.field,
            repr,
        })
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            exp >>= 1;
        }
        acc
    }

    /// Numerator and denominator over Q, or the residue over `1` for F_p.
    pub fn to_ratio(&self) -> (BigInt, BigInt) {
        match &self.repr {
            Repr::Rational(q) => (q.numer().clone(), q.denom().clone()),
            Repr::Residue(r) => (BigInt::from(*r), BigInt::one()),
        }
    }

    /// True if the printed form would start with a minus sign.
    pub fn is_negative(&self) -> bool {
        match &self.repr {
            Repr::Rational(q) => q.is_negative(),
            Repr::Residue(_) => false,
        }
    }

    pub fn to_json(&self) -> Value {
        match &self.repr {
            Repr::Rational(_) => Value::String(self.to_string()),
            Repr::Residue(r) => Value::from(*r),
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Rational(q) if q.denom().is_one() => write!(f, "{}", q.numer()),
            Repr::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Repr::Residue(r) => write!(f, "{r}"),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$try(rhs).expect("field mismatch in scalar arithmetic")
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_value()
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_value()
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // extended Euclid on i128 to stay clear of overflow for 64-bit moduli
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(p as i128) as u64
}

/// Deterministic Miller-Rabin, exact for every `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f5() -> FieldDescriptor {
        FieldDescriptor::prime(5).unwrap()
    }

    #[test]
    fn make_field_examples() {
        assert_eq!(
            make_field(FieldKind::Rationals, None).unwrap(),
            FieldDescriptor::Rationals
        );
        assert_eq!(
            make_field(FieldKind::PrimeField, Some(2)),
            Err(FieldError::CharacteristicTwo)
        );
        assert_eq!(
            make_field(FieldKind::PrimeField, Some(5)).unwrap(),
            FieldDescriptor::Prime(5)
        );
        assert_eq!(
            make_field(FieldKind::PrimeField, Some(9)),
            Err(FieldError::NotPrime(9))
        );
        assert!(make_field(FieldKind::PrimeField, None).is_err());
    }

    #[test]
    fn char_two_message_names_counterexample() {
        let msg = FieldError::CharacteristicTwo.to_string();
        assert!(msg.contains("characteristic 2"));
        assert!(msg.contains("xy + z"));
    }

    #[test]
    fn parse_spec() {
        assert_eq!(
            FieldDescriptor::parse_spec("q").unwrap(),
            FieldDescriptor::Rationals
        );
        assert_eq!(
            FieldDescriptor::parse_spec("fp:101").unwrap(),
            FieldDescriptor::Prime(101)
        );
        assert_eq!(
            FieldDescriptor::parse_spec("fp:2"),
            Err(FieldError::CharacteristicTwo)
        );
        assert!(FieldDescriptor::parse_spec("fp:x").is_err());
        assert!(FieldDescriptor::parse_spec("r").is_err());
    }

    #[test]
    fn scalar_examples() {
        let f = f5();
        assert_eq!(f.from_i64(2).inv().unwrap(), f.from_i64(3));
        let q = FieldDescriptor::Rationals;
        assert_eq!(&q.half() + &q.half(), q.one());
        assert_eq!(f.zero().inv(), Err(FieldError::DivisionByZero));
        assert_eq!(f.from_i64(-1).residue(), Some(4));
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = FieldDescriptor::Rationals.one();
        let b = f5().one();
        assert!(matches!(a.try_add(&b), Err(FieldError::FieldMismatch(..))));
        assert!(matches!(a.try_mul(&b), Err(FieldError::FieldMismatch(..))));
    }

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(is_prime(1_000_000_007));
    }

    #[test]
    fn inverse_large_modulus() {
        let p = 18446744073709551557u64;
        let f = FieldDescriptor::prime(p).unwrap();
        let x = f.from_i64(123456789);
        assert!((&x * &x.inv().unwrap()).is_one());
    }

    #[test]
    fn json_scalars() {
        let q = FieldDescriptor::Rationals;
        let x = q.from_ratio(&BigInt::from(-3), &BigInt::from(6)).unwrap();
        assert_eq!(x.to_json(), Value::String("-1/2".into()));
        assert_eq!(q.scalar_from_json(&x.to_json()).unwrap(), x);
        assert_eq!(q.from_i64(4).to_json(), Value::String("4".into()));
        let f = f5();
        assert_eq!(f.from_i64(7).to_json(), Value::from(2));
        assert!(f.scalar_from_json(&Value::from(5)).is_err());
        assert_eq!(FieldDescriptor::from_json(&f.to_json()).unwrap(), f);
    }

    fn arb_field() -> impl Strategy<Value = FieldDescriptor> {
        prop_oneof![
            Just(FieldDescriptor::Rationals),
            Just(FieldDescriptor::Prime(3)),
            Just(FieldDescriptor::Prime(5)),
            Just(FieldDescriptor::Prime(101)),
            Just(FieldDescriptor::Prime(1_000_000_007)),
        ]
    }

    fn elem(f: FieldDescriptor, n: i64, d: i64) -> FieldElement {
        match f.from_ratio(&BigInt::from(n), &BigInt::from(d)) {
            Ok(x) => x,
            Err(_) => f.from_i64(n),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn ring_axioms(f in arb_field(), a in -50i64..50, b in -50i64..50, c in -50i64..50, d in 1i64..9) {
            let (a, b, c) = (elem(f, a, d), elem(f, b, 1), elem(f, c, d + 1));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
        }

        #[test]
        fn inverse_is_involution(f in arb_field(), a in -1000i64..1000) {
            let x = f.from_i64(a);
            prop_assume!(!x.is_zero());
            prop_assert!((&x * &x.inv().unwrap()).is_one());
            prop_assert_eq!(x.inv().unwrap().inv().unwrap(), x);
        }

        #[test]
        fn fermat(p in prop::sample::select(vec![3u64, 5, 7, 101, 65537]), a in any::<i64>()) {
            let f = FieldDescriptor::prime(p).unwrap();
            let x = f.from_i64(a);
            prop_assert_eq!(x.pow(p), x);
        }
    }
}
