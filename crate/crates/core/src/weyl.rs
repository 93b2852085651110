//! Weyl-Heisenberg operator basis on C^d.
//!
//! `U_{nm} = sum_k w^{nk} |k + m mod d><k|` with `w = exp(2 pi i / d)`. The d^2
//! operators are trace-orthogonal with `Tr(U_{nm}^dagger U_{n'm'}) = d
//! delta_{nn'} delta_{mm'}`, so any operator expands uniquely in them.

use crate::error::{Error, Result};
use crate::linalg::{c, hs_inner, ComplexScalar, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeylIndex {
    n: usize,
    m: usize,
    d: usize,
}

impl WeylIndex {
    pub fn new(n: usize, m: usize, d: usize) -> Result<Self> {
        if d == 0 || n >= d || m >= d {
            return Err(Error::InvalidWeylIndex { n, m, d });
        }
        Ok(Self { n, m, d })
    }

    /// Phase index.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Shift index.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

/// Powers `w^0, ..., w^{d-1}` of the primitive d-th root of unity.
///
/// `w` is formed once from `(cos, sin)` and then powered by repeated
/// multiplication, renormalising the modulus each step so no drift builds up.
pub fn root_of_unity_powers(d: usize) -> Vec<ComplexScalar> {
    let theta = 2.0 * std::f64::consts::PI / d as f64;
    let omega = c(theta.cos(), theta.sin());
    let mut powers = Vec::with_capacity(d);
    let mut z = c(1.0, 0.0);
    for _ in 0..d {
        powers.push(z);
        z *= omega;
        z /= z.norm();
    }
    powers
}

pub fn weyl_operator(idx: WeylIndex) -> Matrix {
    let powers = root_of_unity_powers(idx.d);
    weyl_operator_with(&powers, idx.n, idx.m)
}

fn weyl_operator_with(powers: &[ComplexScalar], n: usize, m: usize) -> Matrix {
    let d = powers.len();
    let mut u = Matrix::zeros(d, d);
    for k in 0..d {
        u[((k + m) % d, k)] = powers[(n * k) % d];
    }
    u
}

/// All d^2 operators, indexed `[n][m]`.
pub fn weyl_basis(d: usize) -> Vec<Vec<Matrix>> {
    let powers = root_of_unity_powers(d);
    (0..d)
        .map(|n| (0..d).map(|m| weyl_operator_with(&powers, n, m)).collect())
        .collect()
}

/// Expansion coefficients `f_{pq}` of an operator in the Weyl basis.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylCoefficients {
    d: usize,
    f: Vec<ComplexScalar>,
}

impl WeylCoefficients {
    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            f: vec![ComplexScalar::default(); d * d],
        }
    }

    /// Builds from a `d x d` table indexed `[p][q]`.
    pub fn from_table(table: Vec<Vec<ComplexScalar>>) -> Result<Self> {
        let d = table.len();
        if d == 0 || table.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidShape(
                "coefficient table must be d x d".into(),
            ));
        }
        Ok(Self {
            d,
            f: table.into_iter().flatten().collect(),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, p: usize, q: usize) -> ComplexScalar {
        self.f[p * self.d + q]
    }

    pub fn set(&mut self, p: usize, q: usize, value: ComplexScalar) {
        self.f[p * self.d + q] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), ComplexScalar)> + '_ {
        self.f
            .iter()
            .enumerate()
            .map(move |(i, &z)| ((i / self.d, i % self.d), z))
    }
}

/// `f_{pq} = Tr(U_{pq}^dagger v) / d`.
pub fn weyl_expand(v: &Matrix) -> Result<WeylCoefficients> {
    if !v.is_square() {
        return Err(Error::NotSquare {
            rows: v.rows(),
            cols: v.cols(),
        });
    }
    let d = v.rows();
    let basis = weyl_basis(d);
    let mut out = WeylCoefficients::zeros(d);
    for (p, row) in basis.iter().enumerate() {
        for (q, u) in row.iter().enumerate() {
            out.set(p, q, hs_inner(u, v)? / d as f64);
        }
    }
    Ok(out)
}

/// `sum_{pq} f_{pq} U_{pq}`.
pub fn weyl_reconstruct(coeffs: &WeylCoefficients) -> Matrix {
    let d = coeffs.d;
    let powers = root_of_unity_powers(d);
    let mut out = Matrix::zeros(d, d);
    for ((p, q), f) in coeffs.iter() {
        if f == ComplexScalar::default() {
            continue;
        }
        // U_{pq} has a single nonzero per column k, at row k + q.
        for k in 0..d {
            out[((k + q) % d, k)] += f * powers[(p * k) % d];
        }
    }
    out
}
