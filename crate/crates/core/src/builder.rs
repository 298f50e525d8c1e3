//! Polynomial to symmetric pencil.
//!
//! The affine seed `q` is the `1 x 1` pencil `[q]`. Each substitution
//! `w := uv` then rewrites the pencil `P = rest + w A_w` as the Schur
//! complement of `R(uv A_w) + rest`, and the constant trailing block is
//! absorbed by appending `[1/det(trailing)]`.

use serde_json::{json, Value};
use thiserror::Error;

use crate::decompose::{decompose, SubstitutionScript};
use crate::field::FieldElement;
use crate::linalg::Matrix;
use crate::poly::{PolyError, Polynomial};
use crate::schur::{
    direct_sum, realize_product, sum_with_matrix, Realization, SchurError, Strategy,
    SymmetricPencil,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("seed polynomial is not affine linear")]
    NotAffine,
    #[error(transparent)]
    Schur(#[from] SchurError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone)]
pub struct BuildReport {
    pub pencil: SymmetricPencil,
    pub script: SubstitutionScript,
    /// Pencil size before the first step and after each step.
    pub size_trace: Vec<usize>,
    pub strategy_trace: Vec<Realization>,
}

impl BuildReport {
    pub fn to_json(&self) -> Value {
        json!({
            "pencil": self.pencil.to_json(),
            "script": self.script.to_json(),
            "size_trace": self.size_trace,
            "strategy_trace": self.strategy_trace.iter().map(Realization::as_str).collect::<Vec<_>>(),
        })
    }
}

/// `[q]` for an affine `q`, over `q`'s registry.
pub fn affine_pencil(q: &Polynomial) -> Result<SymmetricPencil, BuildError> {
    if !q.is_affine_linear() {
        return Err(BuildError::NotAffine);
    }
    let field = q.field();
    let scalar = |c: FieldElement| Matrix::from_rows(field, vec![vec![c]]).expect("1x1");
    let coeffs = q
        .vars()
        .iter()
        .map(|v| scalar(q.linear_coefficient(v)))
        .collect();
    Ok(SymmetricPencil::new(
        field,
        q.vars().to_vec(),
        scalar(q.constant_term()),
        coeffs,
    )?)
}

/// `P ⊕ [c]`: the determinant scales by `c`.
pub fn scalar_extend(p: &SymmetricPencil, c: &FieldElement) -> Result<SymmetricPencil, BuildError> {
    let block = Matrix::from_rows(p.field(), vec![vec![c.clone()]]).map_err(SchurError::from)?;
    Ok(direct_sum(p, &SymmetricPencil::constant(block)?)?)
}

/// Apply `w := u*v` to a pencil, returning the new pencil and the
/// construction used for `uv A_w`.
///
/// The result's registry is `P`'s without `w`, with `u` and `v` appended
/// if they were missing.
pub fn substitute_step(
    p: &SymmetricPencil,
    w: &str,
    u: &str,
    v: &str,
    strategy: Strategy,
) -> Result<(SymmetricPencil, Realization), BuildError> {
    if w == u || w == v {
        return Err(PolyError::SelfSubstitution(w.to_string()).into());
    }
    let (a_w, rest) = p.take_var(w)?;
    let (r, kind) = match realize_product(&a_w, u, v, strategy) {
        Err(SchurError::ShiftExhausted { .. }) => {
            realize_product(&a_w, u, v, Strategy::RankFactor)?
        }
        other => other?,
    };
    let d_inv = r.trailing_det().inv().map_err(SchurError::from)?;
    let combined = sum_with_matrix(&r, &rest)?;
    let extended = scalar_extend(combined.pencil(), &d_inv)?;

    let mut vars = rest.vars().to_vec();
    for name in [u, v] {
        if !vars.iter().any(|x| x == name) {
            vars.push(name.to_string());
        }
    }
    Ok((extended.with_vars(vars)?, kind))
}

/// Build a symmetric pencil whose determinant is `p`.
pub fn build(p: &Polynomial, strategy: Strategy) -> Result<BuildReport, BuildError> {
    let script = decompose(p);
    if p.is_zero() {
        let pencil = affine_pencil(p)?;
        return Ok(BuildReport {
            pencil,
            script,
            size_trace: vec![1],
            strategy_trace: Vec::new(),
        });
    }
    let mut pencil = affine_pencil(&script.seed)?;
    let mut size_trace = vec![pencil.size()];
    let mut strategy_trace = Vec::with_capacity(script.steps.len());
    for step in &script.steps {
        let (next, kind) = substitute_step(&pencil, &step.w, &step.u, &step.v, strategy)?;
        pencil = next;
        size_trace.push(pencil.size());
        strategy_trace.push(kind);
    }
    let pencil = pencil.with_vars(p.vars().to_vec())?;
    Ok(BuildReport {
        pencil,
        script,
        size_trace,
        strategy_trace,
    })
}
