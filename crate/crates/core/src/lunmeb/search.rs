//! Numerical search for a unitary `V` such that `(V (x) I)|seed>` is
//! orthogonal to every member of a candidate.
//!
//! With `D = diag(C_k^2)` and `A_a = U_a D`, the overlap with member `a` is
//! `<phi_a|(V (x) I)|phi> = Tr(A_a^dagger V)`, so extensions are exactly the
//! unitaries in the linear subspace orthogonal to every `A_a`. Both search
//! methods move between that subspace and the unitary group, retracting onto
//! the group with the polar factor.
//!
//! Failure to find `V` is evidence, not proof, of unextendibility.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::basis::{validate_seed, verify_candidate, BasisCandidate};
use crate::bipartite::SchmidtVector;
use crate::error::{Error, Result};
use crate::linalg::{
    c, haar_random_unitary, hs_inner, mat_mul, polar_unitary_factor_with, ComplexScalar,
    ConstraintSpan, Matrix, Tolerance,
};

pub const HEURISTIC_CAVEAT: &str =
    "no extension found (heuristic): evidence only, not a proof of unextendibility";

/// Residual below which a Found iterate stops being polished.
const POLISH_TARGET: f64 = 1e-28;

/// Cap on Gauss-Newton refinement steps once an iterate is feasible.
const NEWTON_MAX_STEPS: usize = 50;

/// Relative decrease of the monitored objective below which a restart is
/// considered stalled.
const STALL_RELATIVE: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct ExtensionProblem {
    d: usize,
    seed: SchmidtVector,
    constraints: Vec<Matrix>,
}

impl ExtensionProblem {
    pub fn new(seed: SchmidtVector, constraints: Vec<Matrix>) -> Result<Self> {
        let d = seed.d();
        if let Some(m) = constraints.iter().find(|m| m.rows() != d || m.cols() != d) {
            return Err(Error::DimensionMismatch {
                expected: format!("{d}x{d}"),
                actual: format!("{}x{}", m.rows(), m.cols()),
            });
        }
        Ok(Self {
            d,
            seed,
            constraints,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn seed(&self) -> &SchmidtVector {
        &self.seed
    }

    pub fn constraints(&self) -> &[Matrix] {
        &self.constraints
    }

    /// `Tr(A_a^dagger v)` for every constraint.
    pub fn overlaps(&self, v: &Matrix) -> Result<Vec<ComplexScalar>> {
        self.constraints.iter().map(|a| hs_inner(a, v)).collect()
    }
}

/// `A_a = U_a diag(C_k^2)` for every generator of the candidate.
pub fn make_extension_problem(candidate: &BasisCandidate) -> Result<ExtensionProblem> {
    let weights = Matrix::from_real_diagonal(&candidate.seed().squares());
    let constraints = candidate
        .generators()
        .iter()
        .map(|u| mat_mul(u, &weights))
        .collect::<Result<Vec<_>>>()?;
    ExtensionProblem::new(candidate.seed().clone(), constraints)
}

/// `sum_a |Tr(A_a^dagger v)|^2`.
pub fn orthogonality_residual(problem: &ExtensionProblem, v: &Matrix) -> Result<f64> {
    Ok(problem.overlaps(v)?.iter().map(|z| z.norm_sqr()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SearchMethod {
    /// Project onto the constraint null space, then back onto the unitary
    /// group; repeat.
    #[default]
    AlternatingProjection,
    /// Gradient descent on the residual with polar retraction.
    ResidualDescent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchParams {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: Tolerance,
    pub seed_value: u64,
    pub method: SearchMethod,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iters: 2000,
            tol: Tolerance::default(),
            seed_value: 0,
            method: SearchMethod::AlternatingProjection,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParams("restarts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParams("max_iters must be at least 1".into()));
        }
        Tolerance::new(self.tol.verify_tol, self.tol.search_tol)?;
        Ok(())
    }

    /// Independent random stream for one restart.
    fn restart_rng(&self, restart: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed_value);
        rng.set_stream(restart as u64);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtensionStatus {
    Found,
    NotFound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionOutcome {
    pub status: ExtensionStatus,
    /// The extending unitary, present iff `status == Found`.
    pub v: Option<Matrix>,
    /// Residual of the returned unitary (Found) or of the last iterate of the
    /// last restart (NotFound).
    pub residual: f64,
    pub best_residual: f64,
    pub restarts_used: usize,
    pub iterations_total: usize,
}

impl ExtensionOutcome {
    pub fn is_found(&self) -> bool {
        self.status == ExtensionStatus::Found
    }
}

struct RestartResult {
    found: Option<Matrix>,
    last_residual: f64,
    best_residual: f64,
    iterations: usize,
}

/// Search state for one restart: the current unitary and its residual.
struct Iterate {
    v: Matrix,
    residual: f64,
}

struct Searcher<'a> {
    problem: &'a ExtensionProblem,
    span: ConstraintSpan,
    params: &'a SearchParams,
    /// Initial descent step, `1 / (2 sum_a ||A_a||^2)`.
    base_step: f64,
}

impl<'a> Searcher<'a> {
    fn new(problem: &'a ExtensionProblem, params: &'a SearchParams) -> Result<Self> {
        let span = ConstraintSpan::new(problem.d, problem.d, &problem.constraints)?;
        let weight: f64 = problem
            .constraints
            .iter()
            .map(Matrix::frobenius_norm_sqr)
            .sum();
        Ok(Self {
            problem,
            span,
            params,
            base_step: if weight > 0.0 { 0.5 / weight } else { 1.0 },
        })
    }

    fn residual(&self, v: &Matrix) -> f64 {
        orthogonality_residual(self.problem, v).expect("iterate has the problem's shape")
    }

    fn retract(&self, m: &Matrix) -> Option<Matrix> {
        polar_unitary_factor_with(m, self.params.tol.verify_tol).ok()
    }

    /// Squared distance to the constraint null space, the quantity alternating
    /// projection decreases monotonically.
    fn distance_sqr(&self, v: &Matrix) -> f64 {
        self.span
            .basis()
            .iter()
            .map(|q| hs_inner(q, v).expect("shape checked").norm_sqr())
            .sum()
    }

    fn projection_step(&self, it: &Iterate) -> Option<Iterate> {
        let p = self.span.project_complement(&it.v).expect("shape checked");
        let v = self.retract(&p)?;
        let residual = self.residual(&v);
        Some(Iterate { v, residual })
    }

    /// One accepted descent step, shrinking `step` until the residual does not
    /// increase. `None` when no decrease is possible at machine precision.
    fn descent_step(&self, it: &Iterate, step: &mut f64) -> Option<Iterate> {
        let overlaps = self.problem.overlaps(&it.v).expect("shape checked");
        let mut grad = Matrix::zeros(self.problem.d, self.problem.d);
        for (a, z) in self.problem.constraints.iter().zip(overlaps) {
            grad = grad.axpy(z * 2.0, a).expect("shape checked");
        }
        for _ in 0..60 {
            let trial = it.v.axpy(c(-*step, 0.0), &grad).expect("shape checked");
            if let Some(v) = self.retract(&trial) {
                let residual = self.residual(&v);
                if residual <= it.residual {
                    *step = (*step * 1.5).min(self.base_step * 64.0);
                    return Some(Iterate { v, residual });
                }
            }
            *step *= 0.5;
        }
        None
    }

    fn monitored(&self, it: &Iterate) -> f64 {
        match self.params.method {
            SearchMethod::AlternatingProjection => self.distance_sqr(&it.v),
            SearchMethod::ResidualDescent => it.residual,
        }
    }

    fn step(&self, it: &Iterate, step: &mut f64) -> Option<Iterate> {
        match self.params.method {
            SearchMethod::AlternatingProjection => self.projection_step(it),
            SearchMethod::ResidualDescent => self.descent_step(it, step),
        }
    }

    fn is_found(&self, it: &Iterate) -> bool {
        it.residual < self.params.tol.search_tol && it.v.is_unitary(self.params.tol.verify_tol)
    }

    /// One Gauss-Newton step on `V(t) = polar(V (I + i H(t)))`, `H` Hermitian
    /// with real coordinates `t`, taking the minimum-norm `t` that zeroes the
    /// linearised overlaps.
    fn newton_step(&self, it: &Iterate) -> Option<Iterate> {
        let d = self.problem.d;
        let v_adj = it.v.adjoint();
        let overlaps = self.problem.overlaps(&it.v).ok()?;
        // d<A_a, V(I + iH)> = i <V^dagger A_a, H>, linear in H.
        let pulled: Vec<Matrix> = self
            .problem
            .constraints
            .iter()
            .map(|a| mat_mul(&v_adj, a))
            .collect::<Result<_>>()
            .ok()?;
        let hermitian = hermitian_basis(d);
        let rows = 2 * pulled.len();
        let mut jac = vec![0.0; rows * hermitian.len()];
        for (a, b) in pulled.iter().enumerate() {
            for (j, e) in hermitian.iter().enumerate() {
                let dz = c(0.0, 1.0) * e.inner_with(b);
                jac[(2 * a) * hermitian.len() + j] = dz.re;
                jac[(2 * a + 1) * hermitian.len() + j] = dz.im;
            }
        }
        let rhs: Vec<f64> = overlaps.iter().flat_map(|z| [-z.re, -z.im]).collect();
        let t = min_norm_solution(&jac, rows, hermitian.len(), &rhs)?;

        let mut h = Matrix::zeros(d, d);
        for (e, tj) in hermitian.iter().zip(&t) {
            e.accumulate(&mut h, *tj);
        }
        let trial =
            it.v.add(&mat_mul(&it.v, &h.scale(c(0.0, 1.0))).ok()?)
                .ok()?;
        let v = self.retract(&trial)?;
        let residual = self.residual(&v);
        Some(Iterate { v, residual })
    }

    /// Drives a feasible iterate further down so the new member is orthogonal
    /// to working precision, not merely to `search_tol`: Gauss-Newton steps
    /// first, then the search method's own steps if those stall early.
    fn polish(&self, mut it: Iterate, step: &mut f64, iterations: &mut usize) -> Iterate {
        let accept = |next: &Iterate, cur: &Iterate| {
            next.residual < cur.residual && next.v.is_unitary(self.params.tol.verify_tol)
        };
        for _ in 0..NEWTON_MAX_STEPS {
            if it.residual < POLISH_TARGET {
                return it;
            }
            match self.newton_step(&it) {
                Some(next) if accept(&next, &it) => {
                    *iterations += 1;
                    it = next;
                }
                _ => break,
            }
        }
        for _ in 0..self.params.max_iters {
            if it.residual < POLISH_TARGET {
                break;
            }
            match self.step(&it, step) {
                Some(next) if accept(&next, &it) => {
                    *iterations += 1;
                    let slow = next.residual > 0.5 * it.residual;
                    it = next;
                    if slow && it.residual < 1e-24 {
                        break;
                    }
                }
                _ => break,
            }
        }
        it
    }

    fn run_restart(&self, restart: usize) -> RestartResult {
        let mut rng = self.params.restart_rng(restart);
        let v = haar_random_unitary(self.problem.d, &mut rng);
        let residual = self.residual(&v);
        let mut it = Iterate { v, residual };
        let mut best = residual;
        let mut iterations = 0;
        let mut step = self.base_step;
        let mut monitored = self.monitored(&it);

        loop {
            if self.is_found(&it) {
                let polished = self.polish(it, &mut step, &mut iterations);
                return RestartResult {
                    last_residual: polished.residual,
                    best_residual: polished.residual,
                    found: Some(polished.v),
                    iterations,
                };
            }
            if iterations == self.params.max_iters {
                break;
            }
            let Some(next) = self.step(&it, &mut step) else {
                break;
            };
            iterations += 1;
            it = next;
            best = best.min(it.residual);
            let now = self.monitored(&it);
            let stalled = monitored - now <= STALL_RELATIVE * now;
            monitored = now;
            if stalled && !self.is_found(&it) {
                break;
            }
        }
        RestartResult {
            found: None,
            last_residual: it.residual,
            best_residual: best,
            iterations,
        }
    }
}

/// Searches for a unitary extending the candidate behind `problem`.
///
/// Restarts run in index order from independent streams derived from
/// `params.seed_value`; the first restart that reaches `search_tol` wins, so
/// the outcome depends only on the inputs.
pub fn extend(problem: &ExtensionProblem, params: &SearchParams) -> Result<ExtensionOutcome> {
    params.validate()?;
    if problem.constraints.is_empty() {
        let v = haar_random_unitary(problem.d, &mut params.restart_rng(0));
        return Ok(ExtensionOutcome {
            status: ExtensionStatus::Found,
            v: Some(v),
            residual: 0.0,
            best_residual: 0.0,
            restarts_used: 1,
            iterations_total: 0,
        });
    }

    let searcher = Searcher::new(problem, params)?;
    let mut best_residual = f64::INFINITY;
    let mut last_residual = f64::INFINITY;
    let mut iterations_total = 0;
    for restart in 0..params.restarts {
        let result = searcher.run_restart(restart);
        iterations_total += result.iterations;
        best_residual = best_residual.min(result.best_residual);
        last_residual = result.last_residual;
        if let Some(v) = result.found {
            return Ok(ExtensionOutcome {
                status: ExtensionStatus::Found,
                v: Some(v),
                residual: result.last_residual,
                best_residual: result.last_residual,
                restarts_used: restart + 1,
                iterations_total,
            });
        }
    }
    Ok(ExtensionOutcome {
        status: ExtensionStatus::NotFound,
        v: None,
        residual: last_residual,
        best_residual,
        restarts_used: params.restarts,
        iterations_total,
    })
}

#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub candidate: BasisCandidate,
    /// One entry per extension attempt, in order; the last is NotFound unless
    /// `max_size` was reached.
    pub outcomes: Vec<ExtensionOutcome>,
}

/// Starts from the cyclic basis and appends found unitaries until the search
/// fails or the candidate has `max_size` members.
pub fn greedy_grow(
    seed: &SchmidtVector,
    params: &SearchParams,
    max_size: usize,
) -> Result<GrowthReport> {
    params.validate()?;
    validate_seed(seed, &params.tol)?;
    let mut candidate = super::build_cyclic_basis(seed, &params.tol)?;
    let mut outcomes = Vec::new();
    let mut step: u64 = 0;
    while candidate.len() < max_size {
        let problem = make_extension_problem(&candidate)?;
        let step_params = SearchParams {
            seed_value: params.seed_value ^ step.wrapping_mul(0x9E37_79B9_7F4A_7C15),
            ..params.clone()
        };
        let outcome = extend(&problem, &step_params)?;
        let found = outcome.v.clone();
        outcomes.push(outcome);
        match found {
            Some(v) => candidate.push_generator(v, &params.tol)?,
            None => break,
        }
        step += 1;
    }
    let report = verify_candidate(&candidate, &params.tol)?;
    if !report.all_pass() {
        return Err(Error::InvariantViolation(format!(
            "grown candidate failed verification: {report:?}"
        )));
    }
    Ok(GrowthReport {
        candidate,
        outcomes,
    })
}

/// Real basis element of the Hermitian matrices: `E_kk`, `E_kl + E_lk` or
/// `i (E_kl - E_lk)`.
enum HermitianUnit {
    Diagonal(usize),
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
}

impl HermitianUnit {
    /// `<b, E> = Tr(b^dagger E)`.
    fn inner_with(&self, b: &Matrix) -> ComplexScalar {
        match *self {
            HermitianUnit::Diagonal(k) => b[(k, k)].conj(),
            HermitianUnit::Symmetric(k, l) => b[(k, l)].conj() + b[(l, k)].conj(),
            HermitianUnit::Antisymmetric(k, l) => {
                c(0.0, 1.0) * (b[(k, l)].conj() - b[(l, k)].conj())
            }
        }
    }

    fn accumulate(&self, h: &mut Matrix, t: f64) {
        match *self {
            HermitianUnit::Diagonal(k) => h[(k, k)] += t,
            HermitianUnit::Symmetric(k, l) => {
                h[(k, l)] += t;
                h[(l, k)] += t;
            }
            HermitianUnit::Antisymmetric(k, l) => {
                h[(k, l)] += c(0.0, t);
                h[(l, k)] -= c(0.0, t);
            }
        }
    }
}

fn hermitian_basis(d: usize) -> Vec<HermitianUnit> {
    let mut out: Vec<HermitianUnit> = (0..d).map(HermitianUnit::Diagonal).collect();
    for k in 0..d {
        for l in k + 1..d {
            out.push(HermitianUnit::Symmetric(k, l));
            out.push(HermitianUnit::Antisymmetric(k, l));
        }
    }
    out
}

/// Minimum-norm solution of the underdetermined system `J t = rhs` (`J` is
/// `rows x cols`, row-major) via `t = J^T (J J^T + mu I)^{-1} rhs` with a tiny
/// ridge `mu` for rank-deficient `J`.
fn min_norm_solution(jac: &[f64], rows: usize, cols: usize, rhs: &[f64]) -> Option<Vec<f64>> {
    let mut gram = vec![0.0; rows * rows];
    for i in 0..rows {
        for j in 0..=i {
            let dot: f64 = (0..cols)
                .map(|k| jac[i * cols + k] * jac[j * cols + k])
                .sum();
            gram[i * rows + j] = dot;
            gram[j * rows + i] = dot;
        }
    }
    let trace: f64 = (0..rows).map(|i| gram[i * rows + i]).sum();
    let mu = 1e-14 * trace.max(f64::MIN_POSITIVE);
    for i in 0..rows {
        gram[i * rows + i] += mu;
    }
    let y = cholesky_solve(&mut gram, rows, rhs)?;
    Some(
        (0..cols)
            .map(|k| (0..rows).map(|i| jac[i * cols + k] * y[i]).sum())
            .collect(),
    )
}

/// Solves `a x = b` for symmetric positive definite `a`, overwriting `a` with
/// its Cholesky factor.
fn cholesky_solve(a: &mut [f64], n: usize, b: &[f64]) -> Option<Vec<f64>> {
    for j in 0..n {
        let mut diag = a[j * n + j];
        for k in 0..j {
            diag -= a[j * n + k] * a[j * n + k];
        }
        if diag.is_nan() || diag <= 0.0 {
            return None;
        }
        let diag = diag.sqrt();
        a[j * n + j] = diag;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / diag;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= a[i * n + k] * y[k];
        }
        y[i] /= a[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= a[k * n + i] * y[k];
        }
        y[i] /= a[i * n + i];
    }
    Some(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::{apply_local, inner_product, schmidt_state};
    use crate::lunmeb::build_cyclic_basis;

    fn seed_d4() -> SchmidtVector {
        let a = 1.0 / 3f64.sqrt();
        let b = 1.0 / 6f64.sqrt();
        SchmidtVector::new(vec![a, b, a, b]).unwrap()
    }

    fn seed_d2() -> SchmidtVector {
        SchmidtVector::new(vec![0.8f64.sqrt(), 0.2f64.sqrt()]).unwrap()
    }

    #[test]
    fn self_overlap_is_one() {
        let tol = Tolerance::default();
        let cand = build_cyclic_basis(&seed_d4(), &tol).unwrap();
        let p = make_extension_problem(&cand).unwrap();
        let z = hs_inner(&p.constraints()[0], &cand.generators()[0]).unwrap();
        assert!((z - c(1.0, 0.0)).norm() < 1e-15);
        for u in cand.generators() {
            assert!(orthogonality_residual(&p, u).unwrap() >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn linear_form_matches_state_overlap() {
        let tol = Tolerance::default();
        let cand = build_cyclic_basis(&seed_d4(), &tol).unwrap();
        let p = make_extension_problem(&cand).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = haar_random_unitary(4, &mut rng);
        let moved = apply_local(&v, &schmidt_state(&seed_d4())).unwrap();
        for (a, state) in p.constraints().iter().zip(cand.states()) {
            let lhs = hs_inner(a, &v).unwrap();
            let rhs = inner_product(state, &moved).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn hermitian_units_match_finite_differences() {
        // d/dt <b, V (I + i t E)> at t = 0 equals i <V^dagger b, E>.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let d = 3;
        let v = haar_random_unitary(d, &mut rng);
        let b = haar_random_unitary(d, &mut rng).scale(c(0.7, -0.2));
        let pulled = mat_mul(&v.adjoint(), &b).unwrap();
        let h = 1e-6;
        for e in hermitian_basis(d) {
            let mut gen = Matrix::zeros(d, d);
            e.accumulate(&mut gen, 1.0);
            assert!(gen.sub(&gen.adjoint()).unwrap().frobenius_norm() < 1e-15);
            let step = |t: f64| {
                let moved = v.add(&mat_mul(&v, &gen.scale(c(0.0, t))).unwrap()).unwrap();
                hs_inner(&b, &moved).unwrap()
            };
            let numeric = (step(h) - step(-h)) / (2.0 * h);
            let analytic = c(0.0, 1.0) * e.inner_with(&pulled);
            assert!(
                (numeric - analytic).norm() < 1e-8,
                "{numeric} vs {analytic}"
            );
        }
        assert_eq!(hermitian_basis(d).len(), d * d);
    }

    #[test]
    fn min_norm_solution_solves_underdetermined_system() {
        // x + y + z = 3, x - y = 0  ->  minimum-norm solution (1, 1, 1).
        let jac = [1.0, 1.0, 1.0, 1.0, -1.0, 0.0];
        let t = min_norm_solution(&jac, 2, 3, &[3.0, 0.0]).unwrap();
        for x in t {
            assert!((x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_constraints_found_immediately() {
        let p = ExtensionProblem::new(seed_d2(), vec![]).unwrap();
        let out = extend(&p, &SearchParams::default()).unwrap();
        assert!(out.is_found());
        assert_eq!(out.residual, 0.0);
        assert_eq!(out.iterations_total, 0);
        assert!(out.v.unwrap().is_unitary(1e-10));
    }

    #[test]
    fn params_validation() {
        let p = ExtensionProblem::new(seed_d2(), vec![]).unwrap();
        let bad = SearchParams {
            restarts: 0,
            ..Default::default()
        };
        assert!(extend(&p, &bad).is_err());
        let bad = SearchParams {
            max_iters: 0,
            ..Default::default()
        };
        assert!(extend(&p, &bad).is_err());
    }

    #[test]
    fn d4_cyclic_basis_is_extendable() {
        let tol = Tolerance::default();
        let cand = build_cyclic_basis(&seed_d4(), &tol).unwrap();
        let p = make_extension_problem(&cand).unwrap();
        for method in [
            SearchMethod::AlternatingProjection,
            SearchMethod::ResidualDescent,
        ] {
            let params = SearchParams {
                method,
                ..Default::default()
            };
            let out = extend(&p, &params).unwrap();
            assert!(out.is_found(), "{method:?}: {out:?}");
            assert!(out.residual < 1e-8);
            let v = out.v.unwrap();
            assert!(v.is_unitary(1e-10));
            let mut grown = cand.clone();
            grown.push_generator(v, &tol).unwrap();
            assert!(verify_candidate(&grown, &tol).unwrap().all_pass());
        }
    }

    #[test]
    fn d2_pair_is_not_extendable() {
        let tol = Tolerance::default();
        let cand = build_cyclic_basis(&seed_d2(), &tol).unwrap();
        let p = make_extension_problem(&cand).unwrap();
        for method in [
            SearchMethod::AlternatingProjection,
            SearchMethod::ResidualDescent,
        ] {
            let params = SearchParams {
                method,
                ..Default::default()
            };
            let out = extend(&p, &params).unwrap();
            assert_eq!(out.status, ExtensionStatus::NotFound, "{method:?}");
            assert!(out.v.is_none());
            assert!(
                (out.best_residual - 0.36).abs() < 1e-6,
                "{method:?}: {}",
                out.best_residual
            );
        }
    }

    #[test]
    fn extend_is_deterministic() {
        let tol = Tolerance::default();
        let cand = build_cyclic_basis(&seed_d4(), &tol).unwrap();
        let p = make_extension_problem(&cand).unwrap();
        let params = SearchParams {
            seed_value: 7,
            ..Default::default()
        };
        assert_eq!(extend(&p, &params).unwrap(), extend(&p, &params).unwrap());
    }

    #[test]
    fn residual_is_phase_invariant() {
        let tol = Tolerance::default();
        let cand = build_cyclic_basis(&seed_d4(), &tol).unwrap();
        let p = make_extension_problem(&cand).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = haar_random_unitary(4, &mut rng);
        let phase = c(0.3f64.cos(), 0.3f64.sin());
        let r1 = orthogonality_residual(&p, &v).unwrap();
        let r2 = orthogonality_residual(&p, &v.scale(phase)).unwrap();
        assert!((r1 - r2).abs() < 1e-14);
    }

    #[test]
    fn grow_d2_stops_at_two() {
        let report = greedy_grow(&seed_d2(), &SearchParams::default(), 8).unwrap();
        assert_eq!(report.candidate.len(), 2);
        assert_eq!(report.outcomes.len(), 1);
        assert!(!report.outcomes[0].is_found());
    }

    #[test]
    fn grow_with_small_max_size_returns_cyclic_basis() {
        let report = greedy_grow(&seed_d4(), &SearchParams::default(), 1).unwrap();
        assert_eq!(report.candidate.len(), 4);
        assert!(report.outcomes.is_empty());
    }
}
