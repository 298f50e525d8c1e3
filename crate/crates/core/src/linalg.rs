//! Dense exact matrices: determinant, inverse, Schur complement and the
//! symmetric congruence rank factorization `A = Y^T diag(B, 0) Y`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{FieldDescriptor, FieldElement, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("trailing block is singular")]
    SingularTrailingBlock,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid matrix encoding: {0}")]
    Encoding(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Row-major dense matrix. Zero-sized matrices are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FieldDescriptor,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(field: FieldDescriptor, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldDescriptor, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn diagonal(field: FieldDescriptor, diag: &[FieldElement]) -> Self {
        let mut m = Self::zeros(field, diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn from_rows(
        field: FieldDescriptor,
        rows: Vec<Vec<FieldElement>>,
    ) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        let data: Vec<FieldElement> = rows.into_iter().flatten().collect();
        if let Some(x) = data.iter().find(|x| x.field() != field) {
            return Err(FieldError::FieldMismatch(field, x.field()).into());
        }
        Ok(Matrix {
            field,
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_i64(field: FieldDescriptor, rows: &[&[i64]]) -> Self {
        Self::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    pub fn field(&self) -> FieldDescriptor {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: FieldElement) {
        assert_eq!(x.field(), self.field, "entry from a different field");
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(FieldElement::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    fn check_field(&self, other: &Self) -> Result<(), LinalgError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch(self.field, other.field).into());
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    /// Copy of the `nr x nc` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(
            r0 + nr <= self.rows && c0 + nc <= self.cols,
            "block out of range"
        );
        let mut out = Self::zeros(self.field, nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                out.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        assert!(
            r0 + b.rows <= self.rows && c0 + b.cols <= self.cols,
            "block out of range"
        );
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    pub fn direct_sum(&self, other: &Matrix) -> Self {
        assert_eq!(self.field, other.field, "direct sum across fields");
        let mut out = Self::zeros(self.field, self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = (0..self.rows)
            .map(|i| Value::Array(self.row(i).iter().map(FieldElement::to_json).collect()))
            .collect();
        json!({"rows": self.rows, "cols": self.cols, "entries": entries})
    }

    pub fn from_json(field: FieldDescriptor, v: &Value) -> Result<Self, LinalgError> {
        let bad = |what: &str| LinalgError::Encoding(what.to_string());
        let rows = v
            .get("rows")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("rows"))? as usize;
        let cols = v
            .get("cols")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("cols"))? as usize;
        let entries = v
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("entries"))?;
        if entries.len() != rows {
            return Err(bad("row count"));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for row in entries {
            let row = row.as_array().ok_or_else(|| bad("row"))?;
            if row.len() != cols {
                return Err(bad("column count"));
            }
            for x in row {
                data.push(field.scalar_from_json(x)?);
            }
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(ToString::to_string).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>width$}", cells[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Exact determinant.
///
/// Over Q each row is scaled to integers and the Bareiss fraction-free
/// elimination runs on big integers; over F_p plain Gaussian elimination.
pub fn determinant(a: &Matrix) -> Result<FieldElement, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.rows, a.cols));
    }
    match a.field {
        FieldDescriptor::Rationals => Ok(determinant_bareiss(a)),
        FieldDescriptor::Prime(_) => Ok(determinant_gauss(a)),
    }
}

fn determinant_bareiss(a: &Matrix) -> FieldElement {
    let n = a.rows;
    let field = a.field;
    let mut scale = BigInt::one();
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let ratios: Vec<(BigInt, BigInt)> = a.row(i).iter().map(FieldElement::to_ratio).collect();
        let l = ratios.iter().fold(BigInt::one(), |acc, (_, d)| acc.lcm(d));
        m.push(ratios.iter().map(|(num, den)| num * (&l / den)).collect());
        scale *= l;
    }
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return field.zero();
        };
        if p != k {
            m.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = if n == 0 {
        BigInt::one()
    } else {
        m[n - 1][n - 1].clone()
    };
    let det = if sign { -det } else { det };
    field.from_ratio(&det, &scale).expect("nonzero row scale")
}

fn determinant_gauss(a: &Matrix) -> FieldElement {
    let n = a.rows;
    let mut m = a.clone();
    let mut det = a.field.one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m.get(r, k).is_zero()) else {
            return a.field.zero();
        };
        if p != k {
            swap_rows(&mut m, p, k);
            det = -det;
        }
        let pivot = m.get(k, k).clone();
        det = &det * &pivot;
        let inv = pivot.inv().expect("nonzero pivot");
        for i in k + 1..n {
            let f = m.get(i, k) * &inv;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = m.get(i, j) - &(&f * m.get(k, j));
                m.set(i, j, v);
            }
        }
    }
    det
}

fn swap_rows(m: &mut Matrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols {
        m.data.swap(a * m.cols + j, b * m.cols + j);
    }
}

fn swap_cols(m: &mut Matrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows {
        m.data.swap(i * m.cols + a, i * m.cols + b);
    }
}

/// Gauss-Jordan inverse.
pub fn inverse(a: &Matrix) -> Result<Matrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.rows, a.cols));
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut inv = Matrix::identity(a.field, n);
    for k in 0..n {
        let p = (k..n)
            .find(|&r| !m.get(r, k).is_zero())
            .ok_or(LinalgError::Singular)?;
        swap_rows(&mut m, p, k);
        swap_rows(&mut inv, p, k);
        let pinv = m.get(k, k).inv()?;
        for j in 0..n {
            m.set(k, j, m.get(k, j) * &pinv);
            inv.set(k, j, inv.get(k, j) * &pinv);
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = m.get(i, k).clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..n {
                m.set(i, j, m.get(i, j) - &(&f * m.get(k, j)));
                inv.set(i, j, inv.get(i, j) - &(&f * inv.get(k, j)));
            }
        }
    }
    Ok(inv)
}

/// `A11 - A12 A22^{-1} A21` where `A11` is the leading `split x split` block.
pub fn schur_complement(a: &Matrix, split: usize) -> Result<Matrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.rows, a.cols));
    }
    if split > a.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "split {split} exceeds size {}",
            a.rows
        )));
    }
    let k = a.rows - split;
    let a11 = a.block(0, 0, split, split);
    let a12 = a.block(0, split, split, k);
    let a21 = a.block(split, 0, k, split);
    let a22 = a.block(split, split, k, k);
    let a22_inv = inverse(&a22).map_err(|e| match e {
        LinalgError::Singular => LinalgError::SingularTrailingBlock,
        e => e,
    })?;
    a11.try_sub(&a12.try_mul(&a22_inv)?.try_mul(&a21)?)
}

/// `A = Y^T diag(B, 0) Y` with `Y` invertible and `B` diagonal invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankFactorization {
    pub y: Matrix,
    pub b: Matrix,
    pub rank: usize,
}

impl RankFactorization {
    pub fn reconstruct(&self) -> Matrix {
        let m = self.y.rows;
        let mut d = Matrix::zeros(self.y.field, m, m);
        d.set_block(0, 0, &self.b);
        self.y
            .transpose()
            .try_mul(&d)
            .and_then(|t| t.try_mul(&self.y))
            .expect("conformable factors")
    }
}

/// Symmetric congruence elimination.
///
/// At each step a nonzero diagonal entry (lowest index) is moved to the
/// pivot position. If the remaining diagonal is all zero but some `a_jk`
/// is not, adding row/column `k` to row/column `j` creates the diagonal
/// entry `2 a_jk`, which is nonzero because the characteristic is odd.
pub fn rank_factorize(a: &Matrix) -> Result<RankFactorization, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare(a.rows, a.cols));
    }
    if !a.is_symmetric() {
        return Err(LinalgError::NotSymmetric);
    }
    let field = a.field;
    let n = a.rows;
    let mut m = a.clone();
    // accumulated row operations: m = e * a * e^T
    let mut e = Matrix::identity(field, n);
    let mut rank = 0;
    for i in 0..n {
        let pivot = match (i..n).find(|&j| !m.get(j, j).is_zero()) {
            Some(j) => j,
            None => {
                let pair = (i..n)
                    .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
                    .find(|&(j, k)| !m.get(j, k).is_zero());
                let Some((j, k)) = pair else { break };
                add_row_col(&mut m, &mut e, j, k, &field.one());
                debug_assert!(!m.get(j, j).is_zero());
                j
            }
        };
        swap_rows(&mut m, pivot, i);
        swap_cols(&mut m, pivot, i);
        swap_rows(&mut e, pivot, i);
        let pinv = m.get(i, i).inv()?;
        for l in i + 1..n {
            let f = m.get(l, i) * &pinv;
            if !f.is_zero() {
                add_row_col(&mut m, &mut e, l, i, &-f);
            }
        }
        rank += 1;
    }
    let b = Matrix::diagonal(
        field,
        &(0..rank).map(|i| m.get(i, i).clone()).collect::<Vec<_>>(),
    );
    // a = e^{-1} d e^{-T}, so y = e^{-T}
    let y = inverse(&e)?.transpose();
    Ok(RankFactorization { y, b, rank })
}

/// Congruence `row j += f * row k; col j += f * col k` on `m`, recorded in `e`.
fn add_row_col(m: &mut Matrix, e: &mut Matrix, j: usize, k: usize, f: &FieldElement) {
    let n = m.rows;
    for c in 0..n {
        m.set(j, c, m.get(j, c) + &(f * m.get(k, c)));
    }
    for r in 0..n {
        m.set(r, j, m.get(r, j) + &(f * m.get(r, k)));
    }
    for c in 0..e.cols {
        e.set(j, c, e.get(j, c) + &(f * e.get(k, c)));
    }
}

pub fn rank(a: &Matrix) -> usize {
    let mut m = a.clone();
    let mut r = 0;
    for c in 0..m.cols {
        let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
            continue;
        };
        swap_rows(&mut m, p, r);
        let inv = m.get(r, c).inv().expect("nonzero pivot");
        for i in r + 1..m.rows {
            let f = m.get(i, c) * &inv;
            if f.is_zero() {
                continue;
            }
            for j in c..m.cols {
                let v = m.get(i, j) - &(&f * m.get(r, j));
                m.set(i, j, v);
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> FieldDescriptor {
        FieldDescriptor::Rationals
    }

    /// Leibniz expansion, used as an independent oracle.
    fn leibniz(a: &Matrix) -> FieldElement {
        fn go(a: &Matrix, row: usize, used: &mut Vec<bool>, sign: bool) -> FieldElement {
            let n = a.rows();
            if row == n {
                return if sign {
                    -a.field().one()
                } else {
                    a.field().one()
                };
            }
            let mut acc = a.field().zero();
            for c in 0..n {
                if used[c] {
                    continue;
                }
                // inversions contributed by placing c at this row
                let inv = (c + 1..n).filter(|&k| used[k]).count() % 2 == 1;
                used[c] = true;
                let sub = go(a, row + 1, used, sign ^ inv);
                used[c] = false;
                acc = &acc + &(a.get(row, c) * &sub);
            }
            acc
        }
        go(a, 0, &mut vec![false; a.rows()], false)
    }

    #[test]
    fn determinant_examples() {
        let d = Matrix::from_i64(q(), &[&[-1, 0], &[0, 1]]);
        assert_eq!(determinant(&d).unwrap(), q().from_i64(-1));
        for n in 0..5 {
            assert!(determinant(&Matrix::identity(q(), n)).unwrap().is_one());
        }
        let m = Matrix::from_i64(q(), &[&[1, 2], &[3, 4]]);
        assert_eq!(determinant(&m).unwrap(), q().from_i64(-2));
        assert_eq!(
            determinant(&Matrix::zeros(q(), 2, 3)),
            Err(LinalgError::NotSquare(2, 3))
        );
        let h = q().half();
        let m =
            Matrix::from_rows(q(), vec![vec![h.clone(), q().one()], vec![q().one(), h]]).unwrap();
        assert_eq!(
            determinant(&m).unwrap(),
            q().from_ratio(&(-3).into(), &4.into()).unwrap()
        );
    }

    #[test]
    fn inverse_examples() {
        let d = Matrix::from_i64(q(), &[&[-1, 0], &[0, 1]]);
        assert_eq!(inverse(&d).unwrap(), d);
        let f5 = FieldDescriptor::prime(5).unwrap();
        assert_eq!(
            inverse(&Matrix::from_i64(f5, &[&[2]])).unwrap(),
            Matrix::from_i64(f5, &[&[3]])
        );
        assert_eq!(
            inverse(&Matrix::zeros(q(), 1, 1)),
            Err(LinalgError::Singular)
        );
    }

    #[test]
    fn schur_examples() {
        let a = Matrix::from_i64(q(), &[&[0, 2], &[2, -1]]);
        assert_eq!(
            schur_complement(&a, 1).unwrap(),
            Matrix::from_i64(q(), &[&[4]])
        );

        let m = Matrix::from_i64(q(), &[&[1, 2], &[2, 5]]);
        let n = Matrix::from_i64(q(), &[&[3]]);
        assert_eq!(schur_complement(&m.direct_sum(&n), 2).unwrap(), m);

        // worked 3x3 example at z = (1, 1, 1): entries z1, (z2+z3)/2, (z2-z3)/2
        let a = Matrix::from_i64(q(), &[&[1, 1, 0], &[1, -1, 0], &[0, 0, 1]]);
        assert_eq!(
            schur_complement(&a, 1).unwrap(),
            Matrix::from_i64(q(), &[&[2]])
        );

        let s = Matrix::from_i64(q(), &[&[1, 1], &[1, 0]]);
        assert_eq!(
            schur_complement(&s, 1),
            Err(LinalgError::SingularTrailingBlock)
        );
    }

    #[test]
    fn rank_factor_examples() {
        let z = Matrix::zeros(q(), 3, 3);
        let f = rank_factorize(&z).unwrap();
        assert_eq!(f.rank, 0);
        assert_eq!(f.y, Matrix::identity(q(), 3));
        assert_eq!(f.reconstruct(), z);

        let f5 = FieldDescriptor::prime(5).unwrap();
        let a = Matrix::from_i64(f5, &[&[0, 0], &[0, 3]]);
        let f = rank_factorize(&a).unwrap();
        assert_eq!(f.rank, 1);
        assert_eq!(f.b, Matrix::from_i64(f5, &[&[3]]));
        assert_eq!(f.y, Matrix::from_i64(f5, &[&[0, 1], &[1, 0]]));
        assert_eq!(f.reconstruct(), a);

        let f3 = FieldDescriptor::prime(3).unwrap();
        let a = Matrix::from_i64(f3, &[&[0, 1], &[1, 0]]);
        let f = rank_factorize(&a).unwrap();
        assert_eq!(f.rank, 2);
        assert_eq!(*f.b.get(0, 0), f3.from_i64(2));
        assert_eq!(f.reconstruct(), a);

        let ns = Matrix::from_i64(q(), &[&[0, 1], &[2, 0]]);
        assert_eq!(rank_factorize(&ns), Err(LinalgError::NotSymmetric));
    }

    #[test]
    fn json_round_trip() {
        let a = Matrix::from_rows(
            q(),
            vec![
                vec![q().half(), q().from_i64(-3)],
                vec![q().zero(), q().one()],
            ],
        )
        .unwrap();
        let v = a.to_json();
        assert_eq!(v["entries"][0][0], Value::String("1/2".into()));
        assert_eq!(Matrix::from_json(q(), &v).unwrap(), a);
    }

    fn arb_field() -> impl Strategy<Value = FieldDescriptor> {
        prop_oneof![
            Just(FieldDescriptor::Rationals),
            Just(FieldDescriptor::Prime(3)),
            Just(FieldDescriptor::Prime(5)),
            Just(FieldDescriptor::Prime(101)),
        ]
    }

    fn arb_matrix(f: FieldDescriptor, n: usize) -> impl Strategy<Value = Matrix> {
        prop::collection::vec((-4i64..=4, 1i64..=3), n * n).prop_map(move |v| {
            let rows = v
                .chunks(n.max(1))
                .take(n)
                .map(|r| {
                    r.iter()
                        .map(|&(a, b)| {
                            f.from_ratio(&a.into(), &b.into())
                                .unwrap_or_else(|_| f.from_i64(a))
                        })
                        .collect()
                })
                .collect();
            Matrix::from_rows(f, rows).unwrap()
        })
    }

    fn arb_symmetric(f: FieldDescriptor, n: usize) -> impl Strategy<Value = Matrix> {
        // sparse-ish entries to hit zero diagonals often
        prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -3i64..=3], n * n).prop_map(
            move |v| {
                let mut m = Matrix::zeros(f, n, n);
                for i in 0..n {
                    for j in i..n {
                        let x = f.from_i64(v[i * n + j]);
                        m.set(i, j, x.clone());
                        m.set(j, i, x);
                    }
                }
                m
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn determinant_is_multiplicative(
            (a, b) in (arb_field(), 1usize..=6).prop_flat_map(|(f, n)| (arb_matrix(f, n), arb_matrix(f, n)))
        ) {
            let ab = a.try_mul(&b).unwrap();
            prop_assert_eq!(determinant(&ab).unwrap(), &determinant(&a).unwrap() * &determinant(&b).unwrap());
        }

        #[test]
        fn determinant_matches_leibniz(a in (arb_field(), 0usize..=5).prop_flat_map(|(f, n)| arb_matrix(f, n))) {
            prop_assert_eq!(determinant(&a).unwrap(), leibniz(&a));
        }

        #[test]
        fn schur_determinant_formula(
            (a, split) in (arb_field(), 1usize..=6).prop_flat_map(|(f, n)| (arb_matrix(f, n), 0..=n))
        ) {
            let n = a.rows();
            let a22 = a.block(split, split, n - split, n - split);
            let d22 = determinant(&a22).unwrap();
            prop_assume!(!d22.is_zero());
            let s = schur_complement(&a, split).unwrap();
            prop_assert_eq!(determinant(&a).unwrap(), &d22 * &determinant(&s).unwrap());
        }

        #[test]
        fn inverse_is_two_sided(a in (arb_field(), 1usize..=5).prop_flat_map(|(f, n)| arb_matrix(f, n))) {
            match inverse(&a) {
                Ok(inv) => {
                    let id = Matrix::identity(a.field(), a.rows());
                    prop_assert_eq!(a.try_mul(&inv).unwrap(), id.clone());
                    prop_assert_eq!(inv.try_mul(&a).unwrap(), id);
                }
                Err(e) => {
                    prop_assert_eq!(e, LinalgError::Singular);
                    prop_assert!(determinant(&a).unwrap().is_zero());
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn rank_factorization_reconstructs(a in (arb_field(), 1usize..=6).prop_flat_map(|(f, n)| arb_symmetric(f, n))) {
            let f = rank_factorize(&a).unwrap();
            prop_assert_eq!(f.reconstruct(), a.clone());
            prop_assert!(!determinant(&f.y).unwrap().is_zero());
            prop_assert_eq!(f.rank, rank(&a));
            for i in 0..f.rank {
                prop_assert!(!f.b.get(i, i).is_zero());
                for j in 0..f.rank {
                    if i != j {
                        prop_assert!(f.b.get(i, j).is_zero());
                    }
                }
            }
        }
    }
}
