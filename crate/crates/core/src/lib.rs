//! Symmetric determinantal representations of polynomials over Q and F_p.
//!
//! `build` turns a polynomial `p` into a symmetric affine pencil
//! `A0 + sum z_i A_i` with `det = p`, using only exact arithmetic.
//! Characteristic 2 is refused: the construction divides by 2.

pub mod builder;
pub mod decompose;
pub mod field;
pub mod golden;
pub mod linalg;
pub mod poly;
pub mod schur;
pub mod verify;

pub use builder::{build, substitute_step, BuildError, BuildReport};
pub use decompose::{decompose, replay, Step, SubstitutionScript};
pub use field::{FieldDescriptor, FieldElement, FieldError};
pub use linalg::{
    determinant, inverse, rank_factorize, schur_complement, Matrix, RankFactorization,
};
pub use poly::{parse, Polynomial};
pub use schur::{realize_product, RealizationBlock, Strategy, SymmetricPencil};
pub use verify::{verify_exhaustive, verify_sampled, verify_symbolic, VerifyReport};
