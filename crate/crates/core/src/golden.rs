//! Reference bundles with hand-entered expected matrices.

use serde_json::{json, Value};
use thiserror::Error;

use crate::decompose::decompose;
use crate::field::FieldDescriptor;
use crate::linalg::Matrix;
use crate::poly::parse;
use crate::schur::SymmetricPencil;

pub const EXAMPLE_NAMES: &[&str] = &["hmv-sec4"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown example `{0}`; available: hmv-sec4")]
pub struct UnknownExample(pub String);

pub const WORKED_INPUT: &str = "z1 + z2*z3";

/// The expected pencil for `z1 + z2*z3` over Q, entered by hand:
/// `A0 = diag(0, -1, 1, -1)`, `A1 = e11`, and `A2`, `A3` with `1/2` and
/// `+-1/2` couplings between the first index and the next two.
pub fn worked_pencil() -> SymmetricPencil {
    let q = FieldDescriptor::Rationals;
    let h = q.half();
    let mh = -&h;
    let z = q.zero();
    let a0 = Matrix::from_i64(
        q,
        &[&[0, 0, 0, 0], &[0, -1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, -1]],
    );
    let a1 = Matrix::from_i64(
        q,
        &[&[1, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]],
    );
    let row = |a: &crate::field::FieldElement, b: &crate::field::FieldElement| {
        vec![
            vec![z.clone(), a.clone(), b.clone(), z.clone()],
            vec![a.clone(), z.clone(), z.clone(), z.clone()],
            vec![b.clone(), z.clone(), z.clone(), z.clone()],
            vec![z.clone(); 4],
        ]
    };
    let a2 = Matrix::from_rows(q, row(&h, &h)).expect("4x4");
    let a3 = Matrix::from_rows(q, row(&h, &mh)).expect("4x4");
    SymmetricPencil::new(
        q,
        vec!["z1".into(), "z2".into(), "z3".into()],
        a0,
        vec![a1, a2, a3],
    )
    .expect("symmetric")
}

pub fn example(name: &str) -> Result<Value, UnknownExample> {
    match name {
        "hmv-sec4" => {
            let q = FieldDescriptor::Rationals;
            let p = parse(WORKED_INPUT, q).expect("valid input");
            Ok(json!({
                "name": name,
                "input": WORKED_INPUT,
                "field": q.to_json(),
                "script": decompose(&p).to_json(),
                "size_trace": [1, 4],
                "pencil": worked_pencil().to_json(),
            }))
        }
        other => Err(UnknownExample(other.to_string())),
    }
}
