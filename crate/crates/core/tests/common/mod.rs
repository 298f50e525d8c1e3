//! Seeded random generators and independent oracles shared by the
//! integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use symdet::field::{FieldDescriptor, FieldElement};
use symdet::linalg::{determinant, Matrix};
use symdet::poly::{Monomial, Point, Polynomial};
use symdet::schur::{RealizationBlock, SymmetricPencil};

pub fn rand_scalar(rng: &mut ChaCha8Rng, field: FieldDescriptor, range: i64) -> FieldElement {
    match field.order() {
        Some(q) => field.from_i64(rng.gen_range(0..q) as i64),
        None => field.from_i64(rng.gen_range(-range..=range)),
    }
}

/// Q entries are small fractions `a/b` so denominators get exercised.
pub fn rand_entry(rng: &mut ChaCha8Rng, field: FieldDescriptor) -> FieldElement {
    let a = rand_scalar(rng, field, 5);
    if field.is_finite() || rng.gen_bool(0.7) {
        a
    } else {
        a.try_div(&field.from_i64(rng.gen_range(1..=4))).unwrap()
    }
}

pub fn rand_matrix(
    rng: &mut ChaCha8Rng,
    field: FieldDescriptor,
    rows: usize,
    cols: usize,
) -> Matrix {
    let entries = (0..rows)
        .map(|_| (0..cols).map(|_| rand_entry(rng, field)).collect())
        .collect();
    Matrix::from_rows(field, entries).unwrap()
}

/// Random symmetric matrix; sparse with probability 1/3 so singular and
/// zero-diagonal cases show up.
pub fn rand_symmetric(rng: &mut ChaCha8Rng, field: FieldDescriptor, n: usize) -> Matrix {
    let sparse = rng.gen_bool(1.0 / 3.0);
    let mut m = Matrix::zeros(field, n, n);
    for i in 0..n {
        for j in i..n {
            if sparse && rng.gen_bool(0.6) {
                continue;
            }
            let x = rand_entry(rng, field);
            m.set(i, j, x.clone());
            m.set(j, i, x);
        }
    }
    m
}

/// Symmetric with rank at most `r`: `G^T D G` for random `G` (`r x n`).
pub fn rand_low_rank(rng: &mut ChaCha8Rng, field: FieldDescriptor, n: usize, r: usize) -> Matrix {
    let g = rand_matrix(rng, field, r, n);
    let d = Matrix::diagonal(
        field,
        &(0..r).map(|_| rand_entry(rng, field)).collect::<Vec<_>>(),
    );
    g.transpose().try_mul(&d).unwrap().try_mul(&g).unwrap()
}

pub fn rand_invertible_symmetric(rng: &mut ChaCha8Rng, field: FieldDescriptor, n: usize) -> Matrix {
    loop {
        let m = rand_symmetric(rng, field, n);
        if !determinant(&m).unwrap().is_zero() {
            return m;
        }
    }
}

pub fn rand_invertible(rng: &mut ChaCha8Rng, field: FieldDescriptor, n: usize) -> Matrix {
    loop {
        let m = rand_matrix(rng, field, n, n);
        if !determinant(&m).unwrap().is_zero() {
            return m;
        }
    }
}

pub fn rand_pencil(
    rng: &mut ChaCha8Rng,
    field: FieldDescriptor,
    vars: &[&str],
    n: usize,
) -> SymmetricPencil {
    let a0 = rand_symmetric(rng, field, n);
    let coeffs = vars.iter().map(|_| rand_symmetric(rng, field, n)).collect();
    SymmetricPencil::new(
        field,
        vars.iter().map(|v| v.to_string()).collect(),
        a0,
        coeffs,
    )
    .unwrap()
}

/// Random realization block: symmetric pencil whose trailing block is
/// constant and invertible.
pub fn rand_block(
    rng: &mut ChaCha8Rng,
    field: FieldDescriptor,
    vars: &[&str],
    split: usize,
    trailing: usize,
) -> RealizationBlock {
    let n = split + trailing;
    let mut a0 = rand_symmetric(rng, field, n);
    a0.set_block(
        split,
        split,
        &rand_invertible_symmetric(rng, field, trailing),
    );
    let coeffs = vars
        .iter()
        .map(|_| {
            let mut a = rand_symmetric(rng, field, n);
            a.set_block(split, split, &Matrix::zeros(field, trailing, trailing));
            a
        })
        .collect();
    let pencil = SymmetricPencil::new(
        field,
        vars.iter().map(|v| v.to_string()).collect(),
        a0,
        coeffs,
    )
    .unwrap();
    RealizationBlock::new(pencil, split).unwrap()
}

pub fn rand_point(rng: &mut ChaCha8Rng, field: FieldDescriptor, vars: &[&str]) -> Point {
    vars.iter()
        .map(|v| (v.to_string(), rand_scalar(rng, field, 20)))
        .collect()
}

/// Random polynomial over `vars` with total degree `<= max_deg`, at most
/// `max_terms` terms and coefficients drawn by `coeff`.
pub fn rand_poly(
    rng: &mut ChaCha8Rng,
    field: FieldDescriptor,
    vars: &[&str],
    max_deg: u32,
    max_terms: usize,
    mut coeff: impl FnMut(&mut ChaCha8Rng) -> FieldElement,
) -> Polynomial {
    let nterms = rng.gen_range(1..=max_terms);
    let terms: Vec<(Monomial, FieldElement)> = (0..nterms)
        .map(|_| {
            let deg = rng.gen_range(0..=max_deg);
            let mut exps = vec![0u32; vars.len()];
            for _ in 0..deg {
                exps[rng.gen_range(0..vars.len())] += 1;
            }
            (Monomial::from_dense(&exps), coeff(rng))
        })
        .collect();
    Polynomial::from_terms(field, vars.iter().map(|v| v.to_string()).collect(), terms)
}

/// Leibniz formula: sum over permutations, independent of any elimination.
pub fn leibniz(a: &Matrix) -> FieldElement {
    let n = a.rows();
    let field = a.field();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = field.zero();
    permute(&mut perm, 0, &mut |p| {
        let mut prod = field.one();
        for (i, &j) in p.iter().enumerate() {
            prod = &prod * a.get(i, j);
        }
        let inversions = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| p[i] > p[j])
            .count();
        total = if inversions % 2 == 0 {
            &total + &prod
        } else {
            &total - &prod
        };
    });
    total
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Laplace expansion along the first row.
pub fn cofactor(a: &Matrix) -> FieldElement {
    let n = a.rows();
    let field = a.field();
    if n == 0 {
        return field.one();
    }
    let mut total = field.zero();
    for j in 0..n {
        if a.get(0, j).is_zero() {
            continue;
        }
        let rows: Vec<Vec<FieldElement>> = (1..n)
            .map(|i| {
                (0..n)
                    .filter(|&c| c != j)
                    .map(|c| a.get(i, c).clone())
                    .collect()
            })
            .collect();
        let minor = if n == 1 {
            field.one()
        } else {
            cofactor(&Matrix::from_rows(field, rows).unwrap())
        };
        let term = a.get(0, j) * &minor;
        total = if j % 2 == 0 {
            &total + &term
        } else {
            &total - &term
        };
    }
    total
}
