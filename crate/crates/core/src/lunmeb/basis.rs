use serde::Serialize;

use crate::bipartite::{
    apply_local_with, classify_spectrum, inner_product, lu_connector, schmidt_coefficients,
    schmidt_state, BipartiteState, Connection, EntanglementClass, SchmidtVector,
};
use crate::error::{Error, Result};
use crate::linalg::{mat_mul, Matrix, Tolerance};
use crate::weyl::{weyl_operator, WeylIndex};

/// Seeds whose spectrum lies within this many multiples of `verify_tol` of the
/// uniform spectrum are treated as maximally entangled at build time.
const NEAR_MAXIMAL_FACTOR: f64 = 10.0;

/// An ordered family `states[a] = (generators[a] (x) I)|seed>`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisCandidate {
    seed: SchmidtVector,
    generators: Vec<Matrix>,
    states: Vec<BipartiteState>,
}

impl BasisCandidate {
    /// Builds a candidate from explicit generators. Only unitarity and shape
    /// are checked; orthogonality and entanglement are left to
    /// [`verify_candidate`].
    pub fn from_generators(
        seed: SchmidtVector,
        generators: Vec<Matrix>,
        tol: &Tolerance,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidCandidate(
                "at least one generator is required".into(),
            ));
        }
        let base = schmidt_state(&seed);
        let states = generators
            .iter()
            .map(|u| apply_local_with(u, &base, tol.verify_tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            seed,
            generators,
            states,
        })
    }

    pub fn d(&self) -> usize {
        self.seed.d()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn seed(&self) -> &SchmidtVector {
        &self.seed
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn states(&self) -> &[BipartiteState] {
        &self.states
    }

    /// Appends `(u (x) I)|seed>` as a new member.
    pub fn push_generator(&mut self, u: Matrix, tol: &Tolerance) -> Result<()> {
        let state = apply_local_with(&u, &schmidt_state(&self.seed), tol.verify_tol)?;
        self.generators.push(u);
        self.states.push(state);
        Ok(())
    }

    /// Gram matrix of the member states.
    pub fn gram(&self) -> Result<Matrix> {
        let n = self.states.len();
        let mut g = Matrix::zeros(n, n);
        for (i, a) in self.states.iter().enumerate() {
            for (j, b) in self.states.iter().enumerate() {
                g[(i, j)] = inner_product(a, b)?;
            }
        }
        Ok(g)
    }
}

/// Checks that a seed may start a candidate: not a product state and not
/// (numerically) maximally entangled.
pub(crate) fn validate_seed(seed: &SchmidtVector, tol: &Tolerance) -> Result<()> {
    let mut spectrum = seed.coefficients().to_vec();
    spectrum.sort_by(|a, b| b.total_cmp(a));
    match classify_spectrum(&spectrum, tol.verify_tol) {
        EntanglementClass::Product => return Err(Error::ProductState),
        EntanglementClass::MaximallyEntangled => return Err(Error::MaximallyEntangled),
        EntanglementClass::NonMaximallyEntangled => {}
    }
    let uniform = 1.0 / (spectrum.len() as f64).sqrt();
    if spectrum
        .iter()
        .all(|s| (s - uniform).abs() < NEAR_MAXIMAL_FACTOR * tol.verify_tol)
    {
        return Err(Error::MaximallyEntangled);
    }
    Ok(())
}

/// The d states `(U_{0m} (x) I)|seed>`, `m = 0..d`, generated by the pure
/// shifts.
pub fn build_cyclic_basis(seed: &SchmidtVector, tol: &Tolerance) -> Result<BasisCandidate> {
    validate_seed(seed, tol)?;
    let d = seed.d();
    let generators = (0..d)
        .map(|m| WeylIndex::new(0, m, d).map(weyl_operator))
        .collect::<Result<Vec<_>>>()?;
    BasisCandidate::from_generators(seed.clone(), generators, tol)
}

/// Per-condition outcome of [`verify_candidate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub size: usize,
    /// Every member is non-maximally entangled.
    pub all_non_maximal: bool,
    pub classes: Vec<EntanglementClass>,
    /// Orthonormality.
    pub orthonormal: bool,
    pub max_offdiagonal: f64,
    pub max_diagonal_deviation: f64,
    /// Every ordered pair is connected by a one-sided local unitary.
    pub locally_connected: bool,
    pub disconnected_pairs: usize,
    pub max_connector_error: f64,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.all_non_maximal && self.orthonormal && self.locally_connected
    }
}

pub fn verify_candidate(candidate: &BasisCandidate, tol: &Tolerance) -> Result<VerificationReport> {
    let states = candidate.states();

    let classes = states
        .iter()
        .map(|s| Ok(classify_spectrum(&schmidt_coefficients(s)?, tol.verify_tol)))
        .collect::<Result<Vec<_>>>()?;
    let all_non_maximal = classes
        .iter()
        .all(|&c| c == EntanglementClass::NonMaximallyEntangled);

    let gram = candidate.gram()?;
    let n = states.len();
    let mut max_offdiagonal: f64 = 0.0;
    let mut max_diagonal_deviation: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                max_diagonal_deviation =
                    max_diagonal_deviation.max((gram[(i, j)].re - 1.0).hypot(gram[(i, j)].im));
            } else {
                max_offdiagonal = max_offdiagonal.max(gram[(i, j)].norm());
            }
        }
    }
    let orthonormal = max_offdiagonal < tol.verify_tol && max_diagonal_deviation < tol.verify_tol;

    let mut disconnected_pairs = 0;
    let mut max_connector_error: f64 = 0.0;
    for a in states {
        for b in states {
            match lu_connector(a, b, tol)? {
                Connection::Connected(u) => {
                    let err = mat_mul(&u, b.coefficients())?
                        .sub(a.coefficients())?
                        .frobenius_norm();
                    max_connector_error = max_connector_error.max(err);
                }
                Connection::NotConnected => disconnected_pairs += 1,
            }
        }
    }
    let locally_connected = disconnected_pairs == 0 && max_connector_error < tol.search_tol;

    Ok(VerificationReport {
        size: n,
        all_non_maximal,
        classes,
        orthonormal,
        max_offdiagonal,
        max_diagonal_deviation,
        locally_connected,
        disconnected_pairs,
        max_connector_error,
    })
}
