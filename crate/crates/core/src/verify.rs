//! Checking `det(pencil) == p`.
//!
//! Three modes: exact symbolic expansion of the pencil determinant, random
//! evaluation with a Schwartz-Zippel bound, and exhaustive evaluation over
//! a small prime field.
//!
//! Sampling uses `ChaCha8Rng::seed_from_u64(seed)`; values are drawn one
//! variable at a time in registry order (pencil variables first, then any
//! polynomial-only variables), so a seed fixes the sample sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::field::{FieldDescriptor, FieldElement};
use crate::linalg::{determinant, rank};
use crate::poly::{Monomial, Point, Polynomial};
use crate::schur::{SchurError, SymmetricPencil};

pub const DEFAULT_SYMBOLIC_LIMIT: usize = 10;
pub const DEFAULT_EXHAUSTIVE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("pencil size {size} exceeds the symbolic limit {limit}")]
    SizeLimitExceeded { size: usize, limit: usize },
    #[error("exhaustive check needs {needed} points, budget is {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("exhaustive check requires a finite field")]
    NotFinite,
    #[error("pencil is over {0} but the polynomial is over {1}")]
    FieldMismatch(FieldDescriptor, FieldDescriptor),
    #[error(transparent)]
    Schur(#[from] SchurError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Symbolic,
    Sampled,
    Exhaustive,
}

impl VerifyMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerifyMode::Symbolic => "symbolic",
            VerifyMode::Sampled => "sampled",
            VerifyMode::Exhaustive => "exhaustive",
        }
    }
}

/// What a passing report establishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// Equal as formal polynomials.
    Formal,
    /// Equal as functions on `F_p^n`; formal equality not implied.
    Function,
    /// Formal equality up to the stated failure probability.
    Probabilistic,
}

impl Certificate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Certificate::Formal => "formal",
            Certificate::Function => "function",
            Certificate::Probabilistic => "probabilistic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A point where the two sides differ.
    Point {
        point: Point,
        det: FieldElement,
        poly: FieldElement,
    },
    /// A monomial whose coefficients differ; used when the difference
    /// vanishes at every point of a finite field.
    Monomial {
        monomial: String,
        det_coeff: FieldElement,
        poly_coeff: FieldElement,
    },
}

impl Witness {
    /// Re-evaluate a point witness. Monomial witnesses are re-checked by
    /// symbolic expansion and are only accepted for pencils within the limit.
    pub fn recheck(&self, pencil: &SymmetricPencil, p: &Polynomial) -> bool {
        match self {
            Witness::Point { point, .. } => match (pencil.evaluate(point), p.evaluate(point)) {
                (Ok(m), Ok(v)) => determinant(&m).map(|d| d != v).unwrap_or(false),
                _ => false,
            },
            Witness::Monomial { .. } => match symbolic_determinant(pencil) {
                Ok(det) => det != *p,
                Err(_) => false,
            },
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Witness::Point { point, det, poly } => json!({
                "point": point_json(point),
                "det": det.to_json(),
                "poly": poly.to_json(),
            }),
            Witness::Monomial {
                monomial,
                det_coeff,
                poly_coeff,
            } => json!({
                "monomial": monomial,
                "det_coeff": det_coeff.to_json(),
                "poly_coeff": poly_coeff.to_json(),
            }),
        }
    }
}

fn point_json(point: &Point) -> Value {
    let mut m = Map::new();
    for (k, v) in point {
        m.insert(k.clone(), v.to_json());
    }
    Value::Object(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub mode: VerifyMode,
    pub passed: bool,
    pub samples: u64,
    pub seed: Option<u64>,
    pub certificate: Certificate,
    pub witness: Option<Witness>,
    /// Upper bound on the probability that a wrong pencil passes.
    pub error_bound: Option<f64>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn to_json(&self) -> Value {
        json!({
            "mode": self.mode.as_str(),
            "pass": self.passed,
            "samples": self.samples,
            "seed": self.seed,
            "certificate": self.certificate.as_str(),
            "witness": self.witness.as_ref().map(Witness::to_json),
            "error_bound": self.error_bound,
            "notes": self.notes,
        })
    }
}

fn check_fields(pencil: &SymmetricPencil, p: &Polynomial) -> Result<(), VerifyError> {
    if pencil.field() != p.field() {
        return Err(VerifyError::FieldMismatch(pencil.field(), p.field()));
    }
    Ok(())
}

/// Pencil variables followed by polynomial-only variables.
fn all_vars(pencil: &SymmetricPencil, p: &Polynomial) -> Vec<String> {
    let mut vars = pencil.vars().to_vec();
    for v in p.vars() {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    vars
}

/// `Some(det, poly)` if the two sides differ at `point`.
fn mismatch_at(
    pencil: &SymmetricPencil,
    p: &Polynomial,
    point: &Point,
) -> Result<Option<(FieldElement, FieldElement)>, VerifyError> {
    let det = determinant(&pencil.evaluate(point)?).map_err(SchurError::from)?;
    let value = p
        .evaluate(point)
        .expect("point covers every polynomial variable");
    Ok((det != value).then_some((det, value)))
}

/// Exact determinant of the pencil as a polynomial over its registry.
///
/// Laplace expansion along successive rows, memoized on the set of columns
/// already used: `dp[S]` is the minor on the first `|S|` rows and columns `S`.
pub fn symbolic_determinant(pencil: &SymmetricPencil) -> Result<Polynomial, VerifyError> {
    symbolic_determinant_with_limit(pencil, DEFAULT_SYMBOLIC_LIMIT)
}

pub fn symbolic_determinant_with_limit(
    pencil: &SymmetricPencil,
    limit: usize,
) -> Result<Polynomial, VerifyError> {
    let m = pencil.size();
    if m > limit {
        return Err(VerifyError::SizeLimitExceeded { size: m, limit });
    }
    let field = pencil.field();
    let vars = pencil.vars().to_vec();
    let entry = |i: usize, j: usize| {
        let mut terms = vec![(Monomial::one(), pencil.constant_matrix().get(i, j).clone())];
        for (k, (_, a)) in pencil.coeffs().enumerate() {
            terms.push((Monomial::var(k), a.get(i, j).clone()));
        }
        Polynomial::from_terms(field, vars.clone(), terms)
    };
    let entries: Vec<Vec<Polynomial>> = (0..m)
        .map(|i| (0..m).map(|j| entry(i, j)).collect())
        .collect();

    let mut dp: Vec<Option<Polynomial>> = vec![None; 1 << m];
    dp[0] = Some(Polynomial::constant(field, vars.clone(), field.one()));
    for mask in 1usize..(1 << m) {
        let row = mask.count_ones() as usize - 1;
        let mut acc = Polynomial::zero(field, vars.clone());
        for j in 0..m {
            if mask & (1 << j) == 0 || entries[row][j].is_zero() {
                continue;
            }
            let minor = dp[mask ^ (1 << j)].as_ref().expect("submask computed");
            if minor.is_zero() {
                continue;
            }
            let term = entries[row][j].try_mul(minor).expect("same registry");
            let above = (mask >> (j + 1)).count_ones();
            acc = if above % 2 == 0 {
                acc.try_add(&term)
            } else {
                acc.try_sub(&term)
            }
            .expect("same registry");
        }
        dp[mask] = Some(acc);
    }
    Ok(dp.pop().flatten().expect("full mask"))
}

/// Symbolic comparison with the default size limit.
pub fn verify_symbolic(
    pencil: &SymmetricPencil,
    p: &Polynomial,
) -> Result<VerifyReport, VerifyError> {
    verify_symbolic_with_limit(pencil, p, DEFAULT_SYMBOLIC_LIMIT)
}

pub fn verify_symbolic_with_limit(
    pencil: &SymmetricPencil,
    p: &Polynomial,
    limit: usize,
) -> Result<VerifyReport, VerifyError> {
    check_fields(pencil, p)?;
    let det = symbolic_determinant_with_limit(pencil, limit)?;
    let passed = det == *p;
    let mut notes = Vec::new();
    let witness = if passed {
        None
    } else {
        let diff = det.try_sub(p).expect("same field");
        Some(match find_nonzero_point(&diff, pencil, p)? {
            Some((point, d, v)) => Witness::Point {
                point,
                det: d,
                poly: v,
            },
            None => {
                notes.push(
                    "the difference vanishes at every point of the field; witness is a differing monomial"
                        .into(),
                );
                let (m, _) = diff.terms().next_back().expect("nonzero difference");
                let monomial = diff.render_monomial(m);
                let name_key = |q: &Polynomial| {
                    let key: Vec<(String, u32)> = {
                        let mut k: Vec<(String, u32)> = m
                            .pairs()
                            .iter()
                            .map(|&(i, e)| (diff.vars()[i].clone(), e))
                            .collect();
                        k.sort();
                        k
                    };
                    q.named_terms()
                        .get(&key)
                        .cloned()
                        .unwrap_or_else(|| q.field().zero())
                };
                Witness::Monomial {
                    monomial,
                    det_coeff: name_key(&det),
                    poly_coeff: name_key(p),
                }
            }
        })
    };
    Ok(VerifyReport {
        mode: VerifyMode::Symbolic,
        passed,
        samples: 0,
        seed: None,
        certificate: Certificate::Formal,
        witness,
        error_bound: None,
        notes,
    })
}

/// Find a point where `diff` is nonzero, returning the pencil and
/// polynomial values there.
fn find_nonzero_point(
    diff: &Polynomial,
    pencil: &SymmetricPencil,
    p: &Polynomial,
) -> Result<Option<(Point, FieldElement, FieldElement)>, VerifyError> {
    let field = diff.field();
    let vars = all_vars(pencil, p);
    let degree = diff.total_degree().max(1) as u64;
    // a nonzero polynomial of individual degree < |S| is nonzero somewhere
    // on the grid S^n
    let grid: Vec<FieldElement> = match field.order() {
        Some(q) => (0..q.min(degree + 1))
            .map(|i| field.from_i64(i as i64))
            .collect(),
        None => (0..=degree).map(|i| field.from_i64(i as i64)).collect(),
    };
    let total = (grid.len() as u128).checked_pow(vars.len() as u32);
    if let Some(total) = total.filter(|&t| t <= DEFAULT_EXHAUSTIVE_BUDGET as u128) {
        for idx in 0..total as u64 {
            let point = index_point(&vars, &grid, idx);
            if !diff.evaluate(&point).expect("full point").is_zero() {
                let (d, v) = mismatch_at(pencil, p, &point)?.expect("difference is nonzero here");
                return Ok(Some((point, d, v)));
            }
        }
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..4096 {
        let point = random_point(&vars, field, &mut rng, 1_000_000);
        if !diff.evaluate(&point).expect("full point").is_zero() {
            let (d, v) = mismatch_at(pencil, p, &point)?.expect("difference is nonzero here");
            return Ok(Some((point, d, v)));
        }
    }
    Ok(None)
}

fn index_point(vars: &[String], values: &[FieldElement], mut idx: u64) -> Point {
    let base = values.len() as u64;
    vars.iter()
        .map(|v| {
            let x = values[(idx % base) as usize].clone();
            idx /= base;
            (v.clone(), x)
        })
        .collect()
}

fn random_point(
    vars: &[String],
    field: FieldDescriptor,
    rng: &mut ChaCha8Rng,
    range: i64,
) -> Point {
    vars.iter()
        .map(|v| {
            let x = match field {
                FieldDescriptor::Rationals => field.from_i64(rng.gen_range(-range..=range)),
                FieldDescriptor::Prime(q) => field.from_i64(rng.gen_range(0..q) as i64),
            };
            (v.clone(), x)
        })
        .collect()
}

/// Randomized identity test on `count` points.
///
/// Over Q the coordinates are integers in `[-N, N]` with
/// `N = 2 * D * count`, where `D = max(pencil size, deg p, 1)` bounds the
/// total degree of `det - p`. Each trial misses a nonzero difference with
/// probability at most `D / (2N + 1)`; over F_p the bound is `D / p` and
/// is reported as vacuous when `p <= D`.
pub fn verify_sampled(
    pencil: &SymmetricPencil,
    p: &Polynomial,
    count: u64,
    seed: u64,
) -> Result<VerifyReport, VerifyError> {
    check_fields(pencil, p)?;
    let field = p.field();
    let vars = all_vars(pencil, p);
    let degree = (pencil.size() as u64).max(p.total_degree() as u64).max(1);
    let range = (2 * degree * count.max(1)) as i64;
    let space = match field.order() {
        Some(q) => q as f64,
        None => (2 * range + 1) as f64,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Point> = (0..count)
        .map(|_| random_point(&vars, field, &mut rng, range))
        .collect();
    let results: Vec<Option<(FieldElement, FieldElement)>> = points
        .par_iter()
        .map(|pt| mismatch_at(pencil, p, pt))
        .collect::<Result<_, _>>()?;
    let failure = results
        .into_iter()
        .enumerate()
        .find_map(|(i, r)| r.map(|(d, v)| (i, d, v)));

    let per_trial = (degree as f64 / space).min(1.0);
    let mut notes = vec![format!(
        "Schwartz-Zippel: a nonzero det - p of total degree <= {degree} survives one trial with \
         probability <= {degree}/{space}; {count} independent trials"
    )];
    if let Some(q) = field.order() {
        if q <= degree {
            notes.push(format!(
                "bound is vacuous: field size {q} does not exceed the degree bound {degree}; \
                 use exhaustive mode"
            ));
        }
    }
    let (passed, witness, samples) = match failure {
        None => (true, None, count),
        Some((i, det, poly)) => (
            false,
            Some(Witness::Point {
                point: points[i].clone(),
                det,
                poly,
            }),
            i as u64 + 1,
        ),
    };
    Ok(VerifyReport {
        mode: VerifyMode::Sampled,
        passed,
        samples,
        seed: Some(seed),
        certificate: Certificate::Probabilistic,
        witness,
        error_bound: Some(per_trial.powf(count as f64)),
        notes,
    })
}

/// Check every point of `F_p^n`.
///
/// Agreement everywhere proves equality as functions. It proves formal
/// equality when every variable's degree in both sides is below `p`; the
/// degree of `det` in `x` is at most `rank(A_x)`.
pub fn verify_exhaustive(
    pencil: &SymmetricPencil,
    p: &Polynomial,
) -> Result<VerifyReport, VerifyError> {
    verify_exhaustive_with_budget(pencil, p, DEFAULT_EXHAUSTIVE_BUDGET)
}

pub fn verify_exhaustive_with_budget(
    pencil: &SymmetricPencil,
    p: &Polynomial,
    budget: u64,
) -> Result<VerifyReport, VerifyError> {
    check_fields(pencil, p)?;
    let field = p.field();
    let q = field.order().ok_or(VerifyError::NotFinite)?;
    let vars = all_vars(pencil, p);
    let needed = (q as u128).checked_pow(vars.len() as u32);
    let total = match needed {
        Some(t) if t <= budget as u128 => t as u64,
        _ => {
            return Err(VerifyError::BudgetExceeded {
                needed: needed.map_or_else(|| format!("{q}^{}", vars.len()), |t| t.to_string()),
                budget,
            })
        }
    };
    let values: Vec<FieldElement> = (0..q).map(|i| field.from_i64(i as i64)).collect();
    let failure = (0..total)
        .into_par_iter()
        .map(|idx| {
            let point = index_point(&vars, &values, idx);
            mismatch_at(pencil, p, &point).map(|r| r.map(|(d, v)| (point, d, v)))
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    let witness = match failure {
        None => None,
        Some(Err(e)) => return Err(e),
        Some(Ok(Some((point, det, poly)))) => Some(Witness::Point { point, det, poly }),
        Some(Ok(None)) => unreachable!(),
    };
    let passed = witness.is_none();

    let formal = vars.iter().all(|v| {
        let det_deg = pencil.coeff(v).map_or(0, rank) as u64;
        det_deg.max(p.degree_in(v) as u64) < q
    });
    let (certificate, note) = if formal {
        (
            Certificate::Formal,
            format!("every variable has degree < {q} on both sides, so agreement on F_{q}^n is formal equality"),
        )
    } else {
        (
            Certificate::Function,
            format!(
                "agreement certified as functions on F_{q}^n only; some variable may reach degree >= {q}, \
                 so formal polynomial equality is not implied"
            ),
        )
    };
    Ok(VerifyReport {
        mode: VerifyMode::Exhaustive,
        passed,
        samples: total,
        seed: None,
        certificate,
        witness,
        error_bound: None,
        notes: vec![note],
    })
}
