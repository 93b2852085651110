//! Small dense complex linear algebra.
//!
//! Everything here works on [`Matrix`], a row-major `rows x cols` array of
//! [`ComplexScalar`]. Sizes are tiny (d <= 32), so the routines favour accuracy
//! and determinism over blocking or vectorisation.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

/// Largest dimension accepted by [`svd`].
pub const MAX_SVD_DIM: usize = 32;

/// Sweep cap for the one-sided Jacobi SVD.
pub const SVD_MAX_SWEEPS: usize = 100;

/// Off-diagonal mass (relative to `||A||_F^2`) below which Jacobi stops.
const SVD_OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Constraint vectors whose residual norm falls below this are dropped by the
/// pivoted Gram-Schmidt in [`ConstraintSpan`].
pub const SPAN_DROP_TOL: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> ComplexScalar {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub verify_tol: f64,
    pub search_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            verify_tol: 1e-10,
            search_tol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(verify_tol: f64, search_tol: f64) -> Result<Self> {
        if !(search_tol.is_finite() && search_tol > 0.0) {
            return Err(Error::InvalidTolerance(format!(
                "search_tol must be positive, got {search_tol}"
            )));
        }
        if !(verify_tol.is_finite() && verify_tol > 0.0 && verify_tol <= search_tol) {
            return Err(Error::InvalidTolerance(format!(
                "verify_tol must satisfy 0 < verify_tol <= search_tol, got {verify_tol}"
            )));
        }
        Ok(Self {
            verify_tol,
            search_tol,
        })
    }
}

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<ComplexScalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for col in 0..self.cols {
                let z = self[(r, col)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = ComplexScalar;

    #[inline]
    fn index(&self, (r, col): (usize, usize)) -> &ComplexScalar {
        &self.data[r * self.cols + col]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut ComplexScalar {
        &mut self.data[r * self.cols + col]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ComplexScalar::default(); rows * cols],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for k in 0..d {
            m[(k, k)] = c(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, checking shape and finiteness.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<ComplexScalar>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!("{rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<ComplexScalar>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidShape("ragged rows".into()));
        }
        Self::from_row_major(n, m, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> ComplexScalar,
    ) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for col in 0..cols {
                m[(r, col)] = f(r, col);
            }
        }
        m
    }

    pub fn from_diagonal(diag: &[ComplexScalar]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, &z) in diag.iter().enumerate() {
            m[(k, k)] = z;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let entries: Vec<_> = diag.iter().map(|&x| c(x, 0.0)).collect();
        Self::from_diagonal(&entries)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[ComplexScalar] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<ComplexScalar>> {
        self.data.chunks(self.cols).map(<[_]>::to_vec).collect()
    }

    pub fn column(&self, col: usize) -> Vec<ComplexScalar> {
        (0..self.rows).map(|r| self[(r, col)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub fn scale(&self, s: ComplexScalar) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    /// `self + s * other`
    pub fn axpy(&self, s: ComplexScalar, other: &Matrix) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + s * b))
    }

    fn zip_with(
        &self,
        other: &Matrix,
        f: impl Fn(ComplexScalar, ComplexScalar) -> ComplexScalar,
    ) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                actual: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(())
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn trace(&self) -> Result<ComplexScalar> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|k| self[(k, k)]).sum())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Self> {
        mat_mul(self, other)
    }

    pub fn adjoint(&self) -> Self {
        adjoint(self)
    }

    /// `||Q^dagger Q - I||_F`, or an error for non-square input.
    pub fn unitarity_deviation(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let g = mat_mul(&self.adjoint(), self)?;
        Ok(g.sub(&Matrix::identity(self.rows))?.frobenius_norm())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation().is_ok_and(|dev| dev < tol)
    }
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            expected: format!("{} rows", a.cols),
            actual: format!("{} rows", b.rows),
        });
    }
    let mut out = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik == ComplexScalar::default() {
                continue;
            }
            for j in 0..b.cols {
                out[(i, j)] += aik * b[(k, j)];
            }
        }
    }
    Ok(out)
}

pub fn adjoint(a: &Matrix) -> Matrix {
    Matrix::from_fn(a.cols, a.rows, |r, col| a[(col, r)].conj())
}

/// Hilbert-Schmidt inner product `Tr(a^dagger b)`, conjugate-linear in `a`.
pub fn hs_inner(a: &Matrix, b: &Matrix) -> Result<ComplexScalar> {
    a.check_same_shape(b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// Singular value decomposition `a = u * diag(s) * w^dagger`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub w: Matrix,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        let d = self.s.len();
        let us = Matrix::from_fn(self.u.rows(), d, |r, col| self.u[(r, col)] * self.s[col]);
        mat_mul(&us, &self.w.adjoint()).expect("SVD factors have consistent shapes")
    }
}

/// One-sided (Hestenes) Jacobi SVD of a square complex matrix.
///
/// Columns of a working copy are rotated pairwise until mutually orthogonal;
/// the accumulated rotations give `w`, the column norms give `s` and the
/// normalised columns give `u`. Columns belonging to zero singular values are
/// completed to an orthonormal basis against the standard basis.
pub fn svd(a: &Matrix) -> Result<Svd> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let n = a.rows;
    if n > MAX_SVD_DIM {
        return Err(Error::InvalidShape(format!(
            "SVD supports d <= {MAX_SVD_DIM}, got {n}"
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }

    let mut g: Vec<Vec<ComplexScalar>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<ComplexScalar>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| c(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();

    let norm_sqr = a.frobenius_norm_sqr();
    let mut converged = norm_sqr == 0.0 || n == 1;
    let mut sweeps = 0;
    while !converged {
        if sweeps == SVD_MAX_SWEEPS {
            return Err(Error::SvdNoConvergence { sweeps });
        }
        sweeps += 1;
        let mut off_mass = 0.0;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha: f64 = g[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = g[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: ComplexScalar = g[p].iter().zip(&g[q]).map(|(x, y)| x.conj() * y).sum();
                let gabs = gamma.norm();
                off_mass += gabs * gabs;
                if gabs == 0.0 || gabs <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotate column q by the phase of gamma so the 2x2 Gram block is real.
                let phase = gamma / gabs;
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate_pair(&mut g, p, q, phase, cs, sn);
                rotate_pair(&mut v, p, q, phase, cs, sn);
            }
        }
        converged = !rotated || off_mass.sqrt() < SVD_OFF_DIAGONAL_TOL * norm_sqr;
    }

    let mut order: Vec<(usize, f64)> = g
        .iter()
        .enumerate()
        .map(|(j, col)| (j, col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()))
        .collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));

    let s: Vec<f64> = order.iter().map(|&(_, sv)| sv).collect();
    let smax = s.first().copied().unwrap_or(0.0);
    let rank_cut = smax * (n as f64) * f64::EPSILON;

    let mut u_cols: Vec<Vec<ComplexScalar>> = Vec::with_capacity(n);
    for &(j, sv) in &order {
        if sv > rank_cut && sv > 0.0 {
            u_cols.push(g[j].iter().map(|z| z / sv).collect());
        }
    }
    complete_orthonormal(&mut u_cols, n);

    let u = Matrix::from_fn(n, n, |r, col| u_cols[col][r]);
    let w = Matrix::from_fn(n, n, |r, col| v[order[col].0][r]);
    Ok(Svd { u, s, w })
}

fn rotate_pair(
    cols: &mut [Vec<ComplexScalar>],
    p: usize,
    q: usize,
    phase: ComplexScalar,
    cs: f64,
    sn: f64,
) {
    let phase_conj = phase.conj();
    for i in 0..cols[p].len() {
        let xp = cols[p][i];
        let xq = cols[q][i] * phase_conj;
        cols[p][i] = xp * cs - xq * sn;
        cols[q][i] = xp * sn + xq * cs;
    }
}

/// Extends an orthonormal list of vectors in C^n to a full basis using the
/// standard basis vectors as candidates, in index order.
fn complete_orthonormal(cols: &mut Vec<Vec<ComplexScalar>>, n: usize) {
    let mut k = 0;
    while cols.len() < n && k < n {
        let mut e = vec![ComplexScalar::default(); n];
        e[k] = c(1.0, 0.0);
        for _ in 0..2 {
            for q in cols.iter() {
                let proj: ComplexScalar = q.iter().zip(&e).map(|(x, y)| x.conj() * y).sum();
                for (ei, qi) in e.iter_mut().zip(q) {
                    *ei -= proj * qi;
                }
            }
        }
        let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.5 / (n as f64).sqrt() {
            cols.push(e.into_iter().map(|z| z / norm).collect());
        }
        k += 1;
    }
}

/// Unitary polar factor `Q = U W^dagger` of `a = U diag(s) W^dagger`, the
/// unitary nearest to `a` in Frobenius norm.
///
/// Fails with [`Error::Singular`] when the smallest singular value is at or
/// below `min_singular`.
pub fn polar_unitary_factor_with(a: &Matrix, min_singular: f64) -> Result<Matrix> {
    let dec = svd(a)?;
    let smallest = dec.s.last().copied().unwrap_or(0.0);
    if smallest <= min_singular {
        return Err(Error::Singular { smallest });
    }
    mat_mul(&dec.u, &dec.w.adjoint())
}

/// [`polar_unitary_factor_with`] using the default verification tolerance.
pub fn polar_unitary_factor(a: &Matrix) -> Result<Matrix> {
    polar_unitary_factor_with(a, Tolerance::default().verify_tol)
}

/// Haar-distributed unitary: Gram-Schmidt on a complex Gaussian matrix.
///
/// Gram-Schmidt yields an R factor with positive real diagonal, which is the
/// phase fixing that makes the Q factor exactly Haar.
pub fn haar_random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix {
    assert!(d >= 1, "dimension must be positive");
    loop {
        let gauss: Vec<Vec<ComplexScalar>> = (0..d)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
                    })
                    .collect()
            })
            .collect();
        if let Some(q) = gram_schmidt_columns(&gauss) {
            return Matrix::from_fn(d, d, |r, col| q[col][r]);
        }
    }
}

/// Orthonormalises the given columns in order; `None` if any is (numerically)
/// dependent on its predecessors.
fn gram_schmidt_columns(cols: &[Vec<ComplexScalar>]) -> Option<Vec<Vec<ComplexScalar>>> {
    let mut out: Vec<Vec<ComplexScalar>> = Vec::with_capacity(cols.len());
    for col in cols {
        let orig = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut x = col.clone();
        for _ in 0..2 {
            for q in &out {
                let proj: ComplexScalar = q.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
                for (xi, qi) in x.iter_mut().zip(q) {
                    *xi -= proj * qi;
                }
            }
        }
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 1e-8 * orig {
            return None;
        }
        out.push(x.into_iter().map(|z| z / norm).collect());
    }
    Some(out)
}

/// Orthonormal basis (under [`hs_inner`]) of the span of a list of matrices.
///
/// Built by pivoted Gram-Schmidt: at each step the remaining constraint with
/// the largest residual norm is taken next, and constraints whose residual
/// drops below [`SPAN_DROP_TOL`] (relative to the largest input norm) are
/// discarded. Linearly dependent lists are therefore fine.
#[derive(Debug, Clone)]
pub struct ConstraintSpan {
    rows: usize,
    cols: usize,
    basis: Vec<Matrix>,
}

impl ConstraintSpan {
    pub fn new(rows: usize, cols: usize, constraints: &[Matrix]) -> Result<Self> {
        for m in constraints {
            if m.rows != rows || m.cols != cols {
                return Err(Error::DimensionMismatch {
                    expected: format!("{rows}x{cols}"),
                    actual: format!("{}x{}", m.rows, m.cols),
                });
            }
        }
        let scale = constraints
            .iter()
            .map(Matrix::frobenius_norm)
            .fold(0.0, f64::max);
        let mut pending: Vec<Matrix> = constraints.to_vec();
        let mut basis: Vec<Matrix> = Vec::new();
        while !pending.is_empty() {
            let (idx, norm) = pending
                .iter()
                .enumerate()
                .map(|(i, m)| (i, m.frobenius_norm()))
                .fold(
                    (0, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if norm <= SPAN_DROP_TOL * scale || norm == 0.0 {
                break;
            }
            let mut q = pending.swap_remove(idx).scale(c(1.0 / norm, 0.0));
            // One re-orthogonalisation pass against the accepted basis.
            for b in &basis {
                let proj = hs_inner(b, &q)?;
                q = q.axpy(-proj, b)?;
            }
            let renorm = q.frobenius_norm();
            q = q.scale(c(1.0 / renorm, 0.0));
            for m in pending.iter_mut() {
                let proj = hs_inner(&q, m)?;
                *m = m.axpy(-proj, &q)?;
            }
            basis.push(q);
        }
        Ok(Self { rows, cols, basis })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    /// `v` minus its orthogonal projection onto the span.
    pub fn project_complement(&self, v: &Matrix) -> Result<Matrix> {
        if v.rows != self.rows || v.cols != self.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                actual: format!("{}x{}", v.rows, v.cols),
            });
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let proj = hs_inner(b, &r)?;
                r = r.axpy(-proj, b)?;
            }
        }
        Ok(r)
    }
}

/// Removes from `v` its component in `span(constraints)`.
pub fn project_span_complement(v: &Matrix, constraints: &[Matrix]) -> Result<Matrix> {
    ConstraintSpan::new(v.rows, v.cols, constraints)?.project_complement(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_matrix(d: usize, rng: &mut ChaCha8Rng) -> Matrix {
        Matrix::from_fn(d, d, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn paper_v() -> Matrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let r = |x: f64| c(x, 0.0);
        Matrix::from_rows(vec![
            vec![r(h), r(-h), r(0.0), r(0.0)],
            vec![r(h), r(h), r(0.0), r(0.0)],
            vec![r(0.0), r(0.0), r(-h), r(h)],
            vec![r(0.0), r(0.0), r(-h), r(-h)],
        ])
        .unwrap()
    }

    #[test]
    fn mat_mul_examples() {
        let i2 = Matrix::identity(2);
        assert_eq!(mat_mul(&i2, &i2).unwrap(), i2);

        let di = Matrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let sq = mat_mul(&di, &di).unwrap();
        assert_eq!(sq, Matrix::from_real_diagonal(&[1.0, -1.0]));

        let v = paper_v();
        let g = mat_mul(&v, &v.adjoint()).unwrap();
        assert!(g.max_abs_diff(&Matrix::identity(4)).unwrap() < 1e-14);
    }

    #[test]
    fn mat_mul_rejects_mismatch() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(2, 3);
        assert!(matches!(
            mat_mul(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(adjoint(&Matrix::identity(3)), Matrix::identity(3));
        let a = Matrix::from_diagonal(&[c(0.0, 1.0), c(0.0, -1.0)]);
        assert_eq!(
            adjoint(&a),
            Matrix::from_diagonal(&[c(0.0, -1.0), c(0.0, 1.0)])
        );
        let r = random_matrix(4, &mut rng(1));
        assert_eq!(adjoint(&adjoint(&r)), r);
    }

    #[test]
    fn hs_inner_examples() {
        for d in 1..6 {
            let z = hs_inner(&Matrix::identity(d), &Matrix::identity(d)).unwrap();
            assert_eq!(z, c(d as f64, 0.0));
        }
        let a = random_matrix(3, &mut rng(2));
        let z = hs_inner(&a, &a).unwrap();
        assert!(z.im.abs() < 1e-15 && z.re > 0.0);
        assert!((z.re - a.frobenius_norm_sqr()).abs() < 1e-14);
        assert!(hs_inner(&Matrix::zeros(2, 2), &Matrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn svd_examples() {
        let dec = svd(&Matrix::from_real_diagonal(&[3.0, 1.0])).unwrap();
        assert_eq!(dec.s, vec![3.0, 1.0]);

        let dec = svd(&Matrix::from_real_diagonal(&[1.0, 3.0])).unwrap();
        assert_eq!(dec.s, vec![3.0, 1.0]);
        assert!(
            dec.reconstruct()
                .max_abs_diff(&Matrix::from_real_diagonal(&[1.0, 3.0]))
                .unwrap()
                < 1e-15
        );

        for d in 1..6 {
            let dec = svd(&Matrix::identity(d)).unwrap();
            assert!(dec.s.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        }

        let cs = [
            1.0 / 3f64.sqrt(),
            1.0 / 6f64.sqrt(),
            1.0 / 3f64.sqrt(),
            1.0 / 6f64.sqrt(),
        ];
        let m = mat_mul(&paper_v(), &Matrix::from_real_diagonal(&cs)).unwrap();
        let dec = svd(&m).unwrap();
        let expected = [
            1.0 / 3f64.sqrt(),
            1.0 / 3f64.sqrt(),
            1.0 / 6f64.sqrt(),
            1.0 / 6f64.sqrt(),
        ];
        for (s, e) in dec.s.iter().zip(expected) {
            assert!((s - e).abs() < 1e-14, "{s} vs {e}");
        }
    }

    #[test]
    fn svd_rank_deficient_completes_unitary_factors() {
        let a = Matrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 2.0), c(0.0, 0.0)],
            vec![c(2.0, 0.0), c(0.0, 4.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let dec = svd(&a).unwrap();
        assert!(dec.s[1] < 1e-14 && dec.s[2] < 1e-14);
        assert!(dec.u.is_unitary(1e-12));
        assert!(dec.w.is_unitary(1e-12));
        assert!(dec.reconstruct().max_abs_diff(&a).unwrap() < 1e-14);

        let dec = svd(&Matrix::zeros(3, 3)).unwrap();
        assert_eq!(dec.s, vec![0.0; 3]);
        assert!(dec.u.is_unitary(1e-12));
    }

    #[test]
    fn svd_rejects_bad_input() {
        assert!(matches!(
            svd(&Matrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        assert!(svd(&Matrix::zeros(33, 33)).is_err());
    }

    #[test]
    fn svd_random_reconstruction() {
        let mut g = rng(3);
        for d in [2, 3, 5, 8, 16, 32] {
            let a = random_matrix(d, &mut g);
            let dec = svd(&a).unwrap();
            let err = dec.reconstruct().sub(&a).unwrap().frobenius_norm();
            assert!(err < 1e-9 * a.frobenius_norm(), "d={d} err={err}");
            assert!(dec.u.is_unitary(1e-10) && dec.w.is_unitary(1e-10));
            assert!(dec.s.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn polar_examples() {
        let q = polar_unitary_factor(&Matrix::identity(3).scale(c(2.0, 0.0))).unwrap();
        assert!(q.max_abs_diff(&Matrix::identity(3)).unwrap() < 1e-15);

        let anti = |x: f64| {
            Matrix::from_rows(vec![
                vec![c(0.0, 0.0), c(x, 0.0)],
                vec![c(x, 0.0), c(0.0, 0.0)],
            ])
            .unwrap()
        };
        let q = polar_unitary_factor(&anti(3.0)).unwrap();
        assert!(q.max_abs_diff(&anti(1.0)).unwrap() < 1e-15);

        let mut g = rng(4);
        for d in 1..7 {
            let u = haar_random_unitary(d, &mut g);
            let q = polar_unitary_factor(&u).unwrap();
            assert!(q.max_abs_diff(&u).unwrap() < 1e-13);
        }
    }

    #[test]
    fn polar_rejects_singular() {
        let a = Matrix::from_real_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            polar_unitary_factor(&a),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn haar_examples() {
        let mut g = rng(5);
        for d in 1..9 {
            let q = haar_random_unitary(d, &mut g);
            assert!(q.unitarity_deviation().unwrap() < 1e-10);
        }
        let a = haar_random_unitary(4, &mut rng(77));
        let b = haar_random_unitary(4, &mut rng(77));
        assert_eq!(a, b);
        let one = haar_random_unitary(1, &mut g);
        assert!((one[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn haar_first_entry_mean() {
        let mut g = rng(6);
        let n = 1000;
        let mean = (0..n)
            .map(|_| haar_random_unitary(2, &mut g)[(0, 0)].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((0.45..=0.55).contains(&mean), "mean {mean}");
    }

    #[test]
    fn projection_examples() {
        let mut g = rng(7);
        let v = random_matrix(3, &mut g);
        assert_eq!(project_span_complement(&v, &[]).unwrap(), v);

        let a = random_matrix(3, &mut g);
        let b = random_matrix(3, &mut g);
        let in_span = a.scale(c(0.3, -1.0)).axpy(c(2.0, 0.5), &b).unwrap();
        let r = project_span_complement(&in_span, &[a.clone(), b.clone()]).unwrap();
        assert!(r.frobenius_norm() < 1e-13);

        let p1 = project_span_complement(&v, &[a.clone(), b.clone()]).unwrap();
        let p2 = project_span_complement(&p1, &[a.clone(), b.clone()]).unwrap();
        assert!(p1.max_abs_diff(&p2).unwrap() < 1e-14);
        for cst in [&a, &b] {
            assert!(hs_inner(cst, &p1).unwrap().norm() < 1e-13);
        }
    }

    #[test]
    fn projection_handles_dependent_constraints() {
        let mut g = rng(8);
        let a = random_matrix(2, &mut g);
        let span =
            ConstraintSpan::new(2, 2, &[a.clone(), a.scale(c(0.0, 2.0)), a.clone()]).unwrap();
        assert_eq!(span.rank(), 1);
        let span = ConstraintSpan::new(2, 2, &[Matrix::zeros(2, 2)]).unwrap();
        assert_eq!(span.rank(), 0);
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(1e-10, 1e-8).is_ok());
        assert!(Tolerance::new(1e-6, 1e-8).is_err());
        assert!(Tolerance::new(0.0, 1e-8).is_err());
        assert!(Tolerance::new(1e-10, f64::NAN).is_err());
    }

    #[test]
    fn from_row_major_rejects_non_finite() {
        let r = Matrix::from_row_major(1, 2, vec![c(1.0, 0.0), c(f64::NAN, 0.0)]);
        assert_eq!(r, Err(Error::NonFinite));
        assert!(Matrix::from_row_major(2, 2, vec![c(1.0, 0.0)]).is_err());
    }
}
