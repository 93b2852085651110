//! Pure bipartite states on C^d (x) C^d, stored as coefficient matrices.
//!
//! A state `sum_{jk} m_{jk} |j>|k>` is held as the `d x d` matrix `m`. Under
//! this identification `(U (x) I)` acts as `m -> U m`, inner products are
//! `Tr(m_a^dagger m_b)` and the Schmidt coefficients are the singular values
//! of `m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, hs_inner, mat_mul, svd, ComplexScalar, Matrix, Tolerance};

/// Schmidt coefficients `C_k >= 0` with `sum C_k^2 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SchmidtVector {
    c: Vec<f64>,
}

impl SchmidtVector {
    /// Accepts coefficients that are already normalised within the default
    /// verification tolerance.
    pub fn new(c: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(c, Tolerance::default().verify_tol)
    }

    pub fn with_tolerance(c: Vec<f64>, verify_tol: f64) -> Result<Self> {
        validate_raw(&c)?;
        let sum: f64 = c.iter().map(|x| x * x).sum();
        if (sum - 1.0).abs() > verify_tol {
            return Err(Error::InvalidSchmidt(format!(
                "squares sum to {sum}, expected 1"
            )));
        }
        Ok(Self { c })
    }

    /// Scales arbitrary nonnegative coefficients to unit sum of squares.
    pub fn normalized(raw: &[f64]) -> Result<Self> {
        validate_raw(raw)?;
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidSchmidt("all coefficients are zero".into()));
        }
        Ok(Self {
            c: raw.iter().map(|x| x / norm).collect(),
        })
    }

    pub fn d(&self) -> usize {
        self.c.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    /// `C_k^2`, the diagonal of the reduced density matrix.
    pub fn squares(&self) -> Vec<f64> {
        self.c.iter().map(|x| x * x).collect()
    }
}

fn validate_raw(c: &[f64]) -> Result<()> {
    if c.is_empty() {
        return Err(Error::InvalidSchmidt("no coefficients".into()));
    }
    if let Some(x) = c.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidSchmidt(format!("non-finite coefficient {x}")));
    }
    if let Some(x) = c.iter().find(|&&x| x < 0.0) {
        return Err(Error::InvalidSchmidt(format!("negative coefficient {x}")));
    }
    Ok(())
}

impl TryFrom<Vec<f64>> for SchmidtVector {
    type Error = Error;

    fn try_from(c: Vec<f64>) -> Result<Self> {
        Self::new(c)
    }
}

impl From<SchmidtVector> for Vec<f64> {
    fn from(s: SchmidtVector) -> Self {
        s.c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    m: Matrix,
}

impl BipartiteState {
    pub fn from_matrix(m: Matrix) -> Result<Self> {
        Self::from_matrix_with(m, Tolerance::default().verify_tol)
    }

    pub fn from_matrix_with(m: Matrix, verify_tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm = m.frobenius_norm();
        if (norm - 1.0).abs() > verify_tol {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { m })
    }

    pub fn d(&self) -> usize {
        self.m.rows()
    }

    pub fn coefficients(&self) -> &Matrix {
        &self.m
    }

    /// Amplitude of `|j>|k>`.
    pub fn amplitude(&self, j: usize, k: usize) -> ComplexScalar {
        self.m[(j, k)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntanglementClass {
    Product,
    NonMaximallyEntangled,
    MaximallyEntangled,
}

pub fn schmidt_state(sv: &SchmidtVector) -> BipartiteState {
    // SchmidtVector already guarantees unit norm.
    BipartiteState {
        m: Matrix::from_real_diagonal(sv.coefficients()),
    }
}

/// `(u (x) I)|s>`; `u` must be unitary within the verification tolerance.
pub fn apply_local(u: &Matrix, s: &BipartiteState) -> Result<BipartiteState> {
    apply_local_with(u, s, Tolerance::default().verify_tol)
}

pub fn apply_local_with(u: &Matrix, s: &BipartiteState, verify_tol: f64) -> Result<BipartiteState> {
    if u.rows() != s.d() || u.cols() != s.d() {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", s.d()),
            actual: format!("{}x{}", u.rows(), u.cols()),
        });
    }
    let deviation = u.unitarity_deviation()?;
    if deviation >= verify_tol {
        return Err(Error::NonUnitary { deviation });
    }
    Ok(BipartiteState {
        m: mat_mul(u, &s.m)?,
    })
}

pub fn inner_product(a: &BipartiteState, b: &BipartiteState) -> Result<ComplexScalar> {
    if a.d() != b.d() {
        return Err(Error::DimensionMismatch {
            expected: format!("d = {}", a.d()),
            actual: format!("d = {}", b.d()),
        });
    }
    hs_inner(&a.m, &b.m)
}

/// Singular values of the coefficient matrix, descending.
pub fn schmidt_coefficients(s: &BipartiteState) -> Result<Vec<f64>> {
    Ok(svd(&s.m)?.s)
}

pub fn entanglement_class(s: &BipartiteState, tol: &Tolerance) -> Result<EntanglementClass> {
    Ok(classify_spectrum(&schmidt_coefficients(s)?, tol.verify_tol))
}

/// Classifies a descending Schmidt spectrum.
pub fn classify_spectrum(spectrum: &[f64], verify_tol: f64) -> EntanglementClass {
    let d = spectrum.len();
    if spectrum.get(1).is_none_or(|&s1| s1 < verify_tol) {
        return EntanglementClass::Product;
    }
    let uniform = 1.0 / (d as f64).sqrt();
    if spectrum.iter().all(|s| (s - uniform).abs() < verify_tol) {
        EntanglementClass::MaximallyEntangled
    } else {
        EntanglementClass::NonMaximallyEntangled
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Connection {
    Connected(Matrix),
    NotConnected,
}

impl Connection {
    pub fn unitary(&self) -> Option<&Matrix> {
        match self {
            Connection::Connected(u) => Some(u),
            Connection::NotConnected => None,
        }
    }
}

/// Finds a unitary `U` with `(U (x) I)|b> = |a>` if one exists.
///
/// The reduced Gram matrices `m^dagger m` of the two states must agree. `U`
/// maps the range of `m_b` onto the range of `m_a` via the polar factor of
/// `m_a m_b^dagger`; on the complement it is the identity wherever the two
/// complements coincide.
pub fn lu_connector(a: &BipartiteState, b: &BipartiteState, tol: &Tolerance) -> Result<Connection> {
    if a.d() != b.d() {
        return Err(Error::DimensionMismatch {
            expected: format!("d = {}", a.d()),
            actual: format!("d = {}", b.d()),
        });
    }
    let d = a.d();
    let gram_a = mat_mul(&a.m.adjoint(), &a.m)?;
    let gram_b = mat_mul(&b.m.adjoint(), &b.m)?;
    if gram_a.sub(&gram_b)?.frobenius_norm() > tol.verify_tol {
        return Ok(Connection::NotConnected);
    }

    let cross = mat_mul(&a.m, &b.m.adjoint())?;
    let dec = svd(&cross)?;
    let rank = dec.s.iter().filter(|&&s| s > tol.verify_tol).count();

    let x_range: Vec<Vec<ComplexScalar>> = (0..rank).map(|j| dec.u.column(j)).collect();
    let y_range: Vec<Vec<ComplexScalar>> = (0..rank).map(|j| dec.w.column(j)).collect();
    let y_kernel = complement_basis(&y_range, d, tol.verify_tol);
    let candidates: Vec<Vec<ComplexScalar>> = y_kernel.clone();
    let x_kernel = complement_from(&x_range, &candidates, d, tol.verify_tol);

    let mut u = Matrix::zeros(d, d);
    for (x, y) in x_range
        .iter()
        .chain(&x_kernel)
        .zip(y_range.iter().chain(&y_kernel))
    {
        for r in 0..d {
            for col in 0..d {
                u[(r, col)] += x[r] * y[col].conj();
            }
        }
    }

    let err = mat_mul(&u, &b.m)?.sub(&a.m)?.frobenius_norm();
    if err >= tol.search_tol || !u.is_unitary(tol.verify_tol) {
        return Ok(Connection::NotConnected);
    }
    Ok(Connection::Connected(u))
}

fn standard_basis(d: usize) -> Vec<Vec<ComplexScalar>> {
    (0..d)
        .map(|k| {
            (0..d)
                .map(|i| c(if i == k { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

/// Orthonormal basis of the orthogonal complement of `span`, built from the
/// standard basis in order.
fn complement_basis(span: &[Vec<ComplexScalar>], d: usize, tol: f64) -> Vec<Vec<ComplexScalar>> {
    complement_from(span, &standard_basis(d), d, tol)
}

/// Orthonormalises `candidates` against `span` (and each other), keeping at
/// most `d - span.len()` vectors. Falls back to the standard basis if the
/// candidates run out.
fn complement_from(
    span: &[Vec<ComplexScalar>],
    candidates: &[Vec<ComplexScalar>],
    d: usize,
    tol: f64,
) -> Vec<Vec<ComplexScalar>> {
    let need = d - span.len();
    let mut accepted: Vec<Vec<ComplexScalar>> = Vec::with_capacity(need);
    let fallback = standard_basis(d);
    for cand in candidates.iter().chain(&fallback) {
        if accepted.len() == need {
            break;
        }
        let mut x = cand.clone();
        for _ in 0..2 {
            for q in span.iter().chain(&accepted) {
                let proj: ComplexScalar = q.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
                for (xi, qi) in x.iter_mut().zip(q) {
                    *xi -= proj * qi;
                }
            }
        }
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > tol.max(1e-6) {
            accepted.push(x.into_iter().map(|z| z / norm).collect());
        }
    }
    accepted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_random_unitary;
    use crate::weyl::{weyl_operator, WeylIndex};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn seed_d4() -> SchmidtVector {
        let a = 1.0 / 3f64.sqrt();
        let b = 1.0 / 6f64.sqrt();
        SchmidtVector::new(vec![a, b, a, b]).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn schmidt_vector_validation() {
        assert!(SchmidtVector::new(vec![0.6, 0.8]).is_ok());
        assert!(SchmidtVector::new(vec![0.6, 0.7]).is_err());
        assert!(SchmidtVector::new(vec![-0.6, 0.8]).is_err());
        assert!(SchmidtVector::new(vec![]).is_err());
        assert!(SchmidtVector::normalized(&[0.0, 0.0]).is_err());
        let s = SchmidtVector::normalized(&[1.0, 1.0]).unwrap();
        assert!((s.coefficients()[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(SchmidtVector::normalized(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn schmidt_state_examples() {
        let product = schmidt_state(&SchmidtVector::new(vec![1.0, 0.0]).unwrap());
        assert_eq!(
            product.coefficients(),
            &Matrix::from_real_diagonal(&[1.0, 0.0])
        );
        assert_eq!(
            entanglement_class(&product, &tol()).unwrap(),
            EntanglementClass::Product
        );

        let seed = schmidt_state(&seed_d4());
        assert!((seed.coefficients().frobenius_norm() - 1.0).abs() < 1e-15);
        assert_eq!(
            entanglement_class(&seed, &tol()).unwrap(),
            EntanglementClass::NonMaximallyEntangled
        );

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = schmidt_state(&SchmidtVector::new(vec![h, h]).unwrap());
        assert_eq!(
            entanglement_class(&bell, &tol()).unwrap(),
            EntanglementClass::MaximallyEntangled
        );
    }

    #[test]
    fn apply_shift_matches_cyclic_state() {
        let seed = schmidt_state(&seed_d4());
        let u01 = weyl_operator(WeylIndex::new(0, 1, 4).unwrap());
        let s = apply_local(&u01, &seed).unwrap();
        let a = 1.0 / 3f64.sqrt();
        let b = 1.0 / 6f64.sqrt();
        // (1/sqrt3)|1>|0> + (1/sqrt6)|2>|1> + (1/sqrt3)|3>|2> + (1/sqrt6)|0>|3>
        let expected = [((1, 0), a), ((2, 1), b), ((3, 2), a), ((0, 3), b)];
        for j in 0..4 {
            for k in 0..4 {
                let want = expected
                    .iter()
                    .find(|(jk, _)| *jk == (j, k))
                    .map_or(0.0, |(_, v)| *v);
                assert!((s.amplitude(j, k) - c(want, 0.0)).norm() < 1e-15);
            }
        }
        assert_eq!(apply_local(&Matrix::identity(4), &seed).unwrap(), seed);
    }

    #[test]
    fn apply_local_rejects_non_unitary() {
        let seed = schmidt_state(&seed_d4());
        let bad = Matrix::identity(4).scale(c(1.1, 0.0));
        assert!(matches!(
            apply_local(&bad, &seed),
            Err(Error::NonUnitary { .. })
        ));
        assert!(apply_local(&Matrix::identity(3), &seed).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let seed = schmidt_state(&seed_d4());
        assert!((inner_product(&seed, &seed).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let s1 = apply_local(&weyl_operator(WeylIndex::new(0, 1, 4).unwrap()), &seed).unwrap();
        assert!(inner_product(&seed, &s1).unwrap().norm() < 1e-15);
        let other = schmidt_state(&SchmidtVector::new(vec![1.0, 0.0]).unwrap());
        assert!(inner_product(&seed, &other).is_err());
    }

    #[test]
    fn schmidt_coefficients_sorted() {
        let sv = SchmidtVector::new(vec![0.6, 0.0, 0.8]).unwrap();
        let s = schmidt_coefficients(&schmidt_state(&sv)).unwrap();
        assert_eq!(s, vec![0.8, 0.6, 0.0]);
        let product = schmidt_state(&SchmidtVector::new(vec![1.0, 0.0, 0.0]).unwrap());
        assert_eq!(schmidt_coefficients(&product).unwrap(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn lu_connector_examples() {
        let t = tol();
        let seed = schmidt_state(&seed_d4());
        match lu_connector(&seed, &seed, &t).unwrap() {
            Connection::Connected(u) => {
                assert!(u.max_abs_diff(&Matrix::identity(4)).unwrap() < 1e-12)
            }
            Connection::NotConnected => panic!("self connection failed"),
        }

        let u01 = weyl_operator(WeylIndex::new(0, 1, 4).unwrap());
        let s1 = apply_local(&u01, &seed).unwrap();
        let u = lu_connector(&s1, &seed, &t).unwrap();
        let u = u.unitary().expect("connected");
        assert!(u.max_abs_diff(&u01).unwrap() < 1e-12);

        let product = schmidt_state(&SchmidtVector::new(vec![1.0, 0.0]).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = schmidt_state(&SchmidtVector::new(vec![h, h]).unwrap());
        assert_eq!(
            lu_connector(&product, &bell, &t).unwrap(),
            Connection::NotConnected
        );
    }

    #[test]
    fn lu_connector_rank_deficient() {
        let t = tol();
        let sv = SchmidtVector::normalized(&[2.0, 1.0, 0.0]).unwrap();
        let base = schmidt_state(&sv);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = haar_random_unitary(3, &mut rng);
        let moved = apply_local(&q, &base).unwrap();
        let u = lu_connector(&moved, &base, &t).unwrap();
        let u = u.unitary().expect("connected");
        assert!(u.is_unitary(1e-10));
        let back = apply_local(u, &base).unwrap();
        assert!(
            back.coefficients()
                .max_abs_diff(moved.coefficients())
                .unwrap()
                < 1e-10
        );

        // Product states: identity on the common kernel.
        let p = schmidt_state(&SchmidtVector::new(vec![1.0, 0.0, 0.0]).unwrap());
        let u = lu_connector(&p, &p, &t).unwrap();
        assert!(
            u.unitary()
                .unwrap()
                .max_abs_diff(&Matrix::identity(3))
                .unwrap()
                < 1e-12
        );
    }

    #[test]
    fn schmidt_vector_serde() {
        let sv = seed_d4();
        let json = serde_json::to_string(&sv).unwrap();
        let back: SchmidtVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sv);
        assert!(serde_json::from_str::<SchmidtVector>("[0.5, 0.5]").is_err());
    }
}
