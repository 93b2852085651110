//! The two worked results for this construction.
//!
//! - d = 4: the seed `(1/sqrt3, 1/sqrt6, 1/sqrt3, 1/sqrt6)` admits a fifth
//!   state orthogonal to its four cyclic images, so the cyclic basis is not
//!   unextendible. The witness unitary is a fixed block matrix of +-1/sqrt2
//!   entries, cross-checked against its Weyl expansion.
//! - d = 2: for `C_0 != C_1`, any unitary sending the seed to an orthogonal
//!   state is antidiagonal, and no third member exists. The best a third
//!   unitary can do is a residual of `(C_0^2 - C_1^2)^2`.

use serde::Serialize;

use crate::bipartite::{
    apply_local, schmidt_coefficients, schmidt_state, BipartiteState, SchmidtVector,
};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexScalar, Matrix, Tolerance};
use crate::lunmeb::{
    build_cyclic_basis, extend, make_extension_problem, verify_candidate, BasisCandidate,
    ExtensionOutcome, SearchParams, VerificationReport,
};
use crate::weyl::{root_of_unity_powers, weyl_expand, WeylCoefficients};

/// Agreement required between the numerical d = 2 search and the closed-form
/// residual bound.
pub const D2_RESIDUAL_AGREEMENT: f64 = 1e-6;

pub fn counterexample_seed() -> SchmidtVector {
    let a = 1.0 / 3f64.sqrt();
    let b = 1.0 / 6f64.sqrt();
    SchmidtVector::new(vec![a, b, a, b]).expect("normalised by construction")
}

/// The d = 4 witness unitary in the computational basis.
pub fn counterexample_unitary() -> Matrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = 0.0;
    let rows = [[h, -h, z, z], [h, h, z, z], [z, z, -h, h], [z, z, -h, -h]];
    Matrix::from_fn(4, 4, |r, col| c(rows[r][col], 0.0))
}

/// Weyl coefficients of [`counterexample_unitary`], written out independently
/// of it: six nonzero entries of magnitude 1/2 or 1/sqrt2 over 2 sqrt2.
pub fn counterexample_coefficients() -> WeylCoefficients {
    let k = 1.0 / (2.0 * 2f64.sqrt());
    let mut f = WeylCoefficients::zeros(4);
    f.set(1, 0, c(k, -k));
    f.set(3, 0, c(k, k));
    f.set(1, 1, c(k, 0.0));
    f.set(3, 1, c(k, 0.0));
    f.set(1, 3, c(0.0, k));
    f.set(3, 3, c(0.0, -k));
    f
}

#[derive(Debug, Clone)]
pub struct Counterexample {
    pub candidate: BasisCandidate,
    pub v: Matrix,
    pub fifth: BipartiteState,
    /// `max |G - I|` over the 5 x 5 Gram matrix of the four cyclic states and
    /// the fifth state.
    pub gram_deviation: f64,
    /// `max |V^dagger V - I|`.
    pub unitarity_deviation: f64,
    pub fifth_spectrum: Vec<f64>,
    /// Largest componentwise gap between `weyl_expand(v)` and the written-out
    /// coefficient table.
    pub coefficient_deviation: f64,
}

pub fn counterexample_d4(tol: &Tolerance) -> Result<Counterexample> {
    let seed = counterexample_seed();
    let candidate = build_cyclic_basis(&seed, tol)?;
    let v = counterexample_unitary();
    let fifth = apply_local(&v, &schmidt_state(&seed))?;

    let mut extended = candidate.clone();
    extended.push_generator(v.clone(), tol)?;
    let gram = extended.gram()?;
    let gram_deviation = gram.max_abs_diff(&Matrix::identity(5))?;
    let unitarity_deviation = v.adjoint().mul(&v)?.max_abs_diff(&Matrix::identity(4))?;

    let expanded = weyl_expand(&v)?;
    let reference = counterexample_coefficients();
    let coefficient_deviation = expanded
        .iter()
        .map(|((p, q), z)| (z - reference.get(p, q)).norm())
        .fold(0.0, f64::max);

    Ok(Counterexample {
        fifth_spectrum: schmidt_coefficients(&fifth)?,
        candidate,
        v,
        fifth,
        gram_deviation,
        unitarity_deviation,
        coefficient_deviation,
    })
}

/// Quantities showing that vanishing overlaps do not force every
/// per-phase sum to vanish.
#[derive(Debug, Clone, Serialize)]
pub struct FlawReport {
    /// `<phi_{0m}|(V (x) I)|phi> = sum_p f_{pm} sum_k C_k^2 w^{kp}`, indexed by m.
    pub eq5_sums: Vec<ComplexScalar>,
    /// `s_k(m) = sum_p f_{pm} w^{kp}`, indexed `[k][m]`.
    pub eq6_sums: Vec<Vec<ComplexScalar>>,
    pub max_eq5: f64,
    pub max_eq6: f64,
    /// True iff every overlap vanishes while some per-phase sum does not.
    pub conclusion: bool,
}

/// Overlap sums for arbitrary coefficients and seed.
pub fn overlap_sums(
    f: &WeylCoefficients,
    seed: &SchmidtVector,
    tol: &Tolerance,
) -> Result<FlawReport> {
    let d = f.d();
    if seed.d() != d {
        return Err(Error::DimensionMismatch {
            expected: format!("d = {d}"),
            actual: format!("d = {}", seed.d()),
        });
    }
    let powers = root_of_unity_powers(d);
    let weights = seed.squares();

    let eq6_sums: Vec<Vec<ComplexScalar>> = (0..d)
        .map(|k| {
            (0..d)
                .map(|m| (0..d).map(|p| f.get(p, m) * powers[(k * p) % d]).sum())
                .collect()
        })
        .collect();
    let eq5_sums: Vec<ComplexScalar> = (0..d)
        .map(|m| {
            (0..d)
                .map(|p| {
                    let phase_sum: ComplexScalar =
                        (0..d).map(|k| powers[(k * p) % d] * weights[k]).sum();
                    f.get(p, m) * phase_sum
                })
                .sum()
        })
        .collect();

    let max_eq5 = eq5_sums.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let max_eq6 = eq6_sums
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok(FlawReport {
        conclusion: max_eq5 < tol.verify_tol && max_eq6 > tol.search_tol,
        eq5_sums,
        eq6_sums,
        max_eq5,
        max_eq6,
    })
}

pub fn flaw_demo(tol: &Tolerance) -> Result<FlawReport> {
    overlap_sums(&counterexample_coefficients(), &counterexample_seed(), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum D2Form {
    /// `V|0> = e^{i alpha}|1>`, `V|1> = e^{i beta}|0>`.
    Antidiagonal {
        alpha: f64,
        beta: f64,
    },
    NotOrthogonal,
}

fn validate_d2_seed(seed: &SchmidtVector, tol: &Tolerance) -> Result<()> {
    if seed.d() != 2 {
        return Err(Error::InvalidSchmidt(format!(
            "expected d = 2, got d = {}",
            seed.d()
        )));
    }
    let [c0, c1] = [seed.coefficients()[0], seed.coefficients()[1]];
    if c0 <= tol.verify_tol || c1 <= tol.verify_tol {
        return Err(Error::ProductState);
    }
    if (c0 - c1).abs() <= 10.0 * tol.verify_tol {
        return Err(Error::MaximallyEntangled);
    }
    Ok(())
}

/// Decides whether `(v (x) I)|seed>` is orthogonal to `|seed>` and, if so,
/// reads off the antidiagonal phases.
///
/// An orthogonal `v` with a nonvanishing diagonal cannot exist for a
/// non-maximal seed; meeting one is reported as an invariant violation.
pub fn d2_orthogonal_form(v: &Matrix, seed: &SchmidtVector, tol: &Tolerance) -> Result<D2Form> {
    validate_d2_seed(seed, tol)?;
    if v.rows() != 2 || v.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: "2x2".into(),
            actual: format!("{}x{}", v.rows(), v.cols()),
        });
    }
    let deviation = v.unitarity_deviation()?;
    if deviation >= tol.verify_tol {
        return Err(Error::NonUnitary { deviation });
    }
    let w = seed.squares();
    let overlap = v[(0, 0)] * w[0] + v[(1, 1)] * w[1];
    if overlap.norm() >= tol.verify_tol {
        return Ok(D2Form::NotOrthogonal);
    }
    if v[(0, 0)].norm() >= tol.verify_tol || v[(1, 1)].norm() >= tol.verify_tol {
        return Err(Error::InvariantViolation(format!(
            "orthogonal unitary with nonzero diagonal ({}, {})",
            v[(0, 0)],
            v[(1, 1)]
        )));
    }
    Ok(D2Form::Antidiagonal {
        alpha: v[(1, 0)].arg(),
        beta: v[(0, 1)].arg(),
    })
}

/// Bit flip, the canonical second generator at d = 2.
pub fn bit_flip() -> Matrix {
    Matrix::from_fn(2, 2, |r, col| c(if r != col { 1.0 } else { 0.0 }, 0.0))
}

#[derive(Debug, Clone)]
pub struct D2Analysis {
    pub seed: SchmidtVector,
    pub basis: BasisCandidate,
    pub verification: VerificationReport,
    pub second_generator: Matrix,
    pub antidiagonal_phases: (f64, f64),
    pub max_size: usize,
    /// `(C_0^2 - C_1^2)^2`, the smallest residual any third unitary attains.
    pub min_third_residual: f64,
    /// Numerical search for a third member.
    pub search: ExtensionOutcome,
    /// The search failed and its best residual matches `min_third_residual`
    /// within [`D2_RESIDUAL_AGREEMENT`].
    pub search_agrees: bool,
}

pub fn d2_analysis(seed: &SchmidtVector, params: &SearchParams) -> Result<D2Analysis> {
    let tol = params.tol;
    validate_d2_seed(seed, &tol)?;
    let second_generator = bit_flip();
    let antidiagonal_phases = match d2_orthogonal_form(&second_generator, seed, &tol)? {
        D2Form::Antidiagonal { alpha, beta } => (alpha, beta),
        D2Form::NotOrthogonal => {
            return Err(Error::InvariantViolation(
                "bit flip not orthogonal to the seed".into(),
            ))
        }
    };
    let basis = BasisCandidate::from_generators(
        seed.clone(),
        vec![Matrix::identity(2), second_generator.clone()],
        &tol,
    )?;
    let verification = verify_candidate(&basis, &tol)?;

    let w = seed.squares();
    let min_third_residual = (w[0] - w[1]).powi(2);
    let search = extend(&make_extension_problem(&basis)?, params)?;
    let search_agrees = !search.is_found()
        && (search.best_residual - min_third_residual).abs() < D2_RESIDUAL_AGREEMENT;

    Ok(D2Analysis {
        seed: seed.clone(),
        basis,
        verification,
        second_generator,
        antidiagonal_phases,
        max_size: 2,
        min_third_residual,
        search,
        search_agrees,
    })
}
