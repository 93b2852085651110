//! Command-line surface.
//!
//! Exit codes: 0 success, 1 malformed input or file, 2 validation failure,
//! 3 no extension found.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bipartite::SchmidtVector;
use crate::error::Error;
use crate::io::{matrix_to_repr, BasisFile};
use crate::linalg::{ComplexScalar, Matrix, Tolerance};
use crate::lunmeb::{
    build_cyclic_basis, extend, greedy_grow, make_extension_problem, verify_candidate,
    ExtensionOutcome, SearchMethod, SearchParams, VerificationReport, HEURISTIC_CAVEAT,
};
use crate::repro::{counterexample_d4, d2_analysis, flaw_demo, D2_RESIDUAL_AGREEMENT};
use crate::weyl::{weyl_operator, WeylIndex};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NOT_FOUND: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "lunmeb",
    version,
    about = "Locally unextendible non-maximally entangled bases"
)]
struct Cli {
    /// Tolerance for algebraic identities.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_verify: f64,

    /// Residual threshold for declaring a search successful.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_search: f64,

    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the Weyl operator U_{nm}.
    Weyl {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Build, verify, extend and grow bases
    #[command(subcommand)]
    Basis(BasisCommand),
    /// Reproduce the d = 4 witness and the d = 2 analysis
    #[command(subcommand)]
    Repro(ReproCommand),
}

#[derive(Debug, Subcommand)]
enum BasisCommand {
    /// Build the cyclic basis of a seed state.
    Build {
        #[command(flatten)]
        schmidt: SchmidtArg,
        /// Write the resulting basis file here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check orthonormality, entanglement and local connectivity.
    Verify {
        /// Basis file to read
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Search for one more member.
    Extend {
        /// Basis file to read
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the resulting basis file here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the cyclic basis and extend it greedily.
    Grow {
        #[command(flatten)]
        schmidt: SchmidtArg,
        /// Stop once the basis has this many members
        #[arg(long, default_value_t = 16)]
        max_size: usize,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the resulting basis file here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum ReproCommand {
    /// The d = 4 five-state counterexample and the overlap-sum analysis.
    D4,
    /// The d = 2 analysis for a seed (C0, C1).
    D2 {
        #[command(flatten)]
        schmidt: SchmidtArg,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the resulting basis file here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SchmidtArg {
    /// Comma-separated Schmidt coefficients; normalised before use.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    schmidt: Vec<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Alternating projection
    Ap,
    /// Residual gradient descent
    Descent,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Random starting points to try
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    /// Iteration cap per restart
    #[arg(long, default_value_t = 2000)]
    iters: usize,
    /// RNG seed; equal seeds give identical output
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Ap)]
    method: MethodArg,
}

impl SearchArgs {
    fn params(&self, tol: Tolerance) -> SearchParams {
        SearchParams {
            restarts: self.restarts,
            max_iters: self.iters,
            tol,
            seed_value: self.seed,
            method: match self.method {
                MethodArg::Ap => SearchMethod::AlternatingProjection,
                MethodArg::Descent => SearchMethod::ResidualDescent,
            },
        }
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn ok(stdout: String) -> Self {
        Self::with_code(EXIT_OK, stdout)
    }

    fn with_code(code: i32, stdout: String) -> Self {
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(err: &Error) -> Self {
        Self {
            code: exit_code_for(err),
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        }
    }
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::MaximallyEntangled
        | Error::ProductState
        | Error::NonUnitary { .. }
        | Error::NotNormalized { .. }
        | Error::Singular { .. }
        | Error::InvalidCandidate(_)
        | Error::InvariantViolation(_)
        | Error::SvdNoConvergence { .. } => EXIT_VALIDATION,
        _ => EXIT_MALFORMED,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    CliOutput::ok(rendered)
                }
                _ => CliOutput {
                    code: EXIT_MALFORMED,
                    stdout: String::new(),
                    stderr: rendered,
                },
            };
        }
    };
    execute(&cli).unwrap_or_else(|e| CliOutput::error(&e))
}

fn execute(cli: &Cli) -> Result<CliOutput, Error> {
    let tol = Tolerance::new(cli.tol_verify, cli.tol_search)?;
    match &cli.command {
        Command::Weyl { d, n, m } => cmd_weyl(cli, *d, *n, *m),
        Command::Basis(BasisCommand::Build { schmidt, out }) => {
            cmd_build(cli, tol, schmidt, out.as_ref())
        }
        Command::Basis(BasisCommand::Verify { input }) => cmd_verify(cli, tol, input),
        Command::Basis(BasisCommand::Extend { input, search, out }) => {
            cmd_extend(cli, tol, input, search, out.as_ref())
        }
        Command::Basis(BasisCommand::Grow {
            schmidt,
            max_size,
            search,
            out,
        }) => cmd_grow(cli, tol, schmidt, *max_size, search, out.as_ref()),
        Command::Repro(ReproCommand::D4) => cmd_repro_d4(cli, tol),
        Command::Repro(ReproCommand::D2 {
            schmidt,
            search,
            out,
        }) => cmd_repro_d2(cli, tol, schmidt, search, out.as_ref()),
    }
}

fn parse_seed(arg: &SchmidtArg) -> Result<SchmidtVector, Error> {
    SchmidtVector::normalized(&arg.schmidt)
}

fn fmt_complex(z: ComplexScalar) -> String {
    format!("{:+.6}{:+.6}i", z.re, z.im)
}

fn fmt_matrix(m: &Matrix) -> String {
    let mut s = String::new();
    for row in m.to_rows() {
        let cells: Vec<String> = row.into_iter().map(fmt_complex).collect();
        let _ = writeln!(s, "  [{}]", cells.join("  "));
    }
    s
}

fn to_json_line(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serialises");
    s.push('\n');
    s
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_weyl(cli: &Cli, d: usize, n: usize, m: usize) -> Result<CliOutput, Error> {
    let u = weyl_operator(WeylIndex::new(n, m, d)?);
    if cli.json {
        return Ok(CliOutput::ok(to_json_line(&json!({
            "d": d, "n": n, "m": m, "matrix": matrix_to_repr(&u),
        }))));
    }
    Ok(CliOutput::ok(format!(
        "U_{{{n}{m}}} (d = {d}):\n{}",
        fmt_matrix(&u)
    )))
}

fn cmd_build(
    cli: &Cli,
    tol: Tolerance,
    schmidt: &SchmidtArg,
    out: Option<&PathBuf>,
) -> Result<CliOutput, Error> {
    let seed = parse_seed(schmidt)?;
    let candidate = build_cyclic_basis(&seed, &tol)?;
    let file = BasisFile::from_candidate(&candidate);
    if let Some(path) = out {
        file.save(path)?;
    }
    if cli.json {
        let mut text = file.to_json();
        text.push('\n');
        return Ok(CliOutput::ok(text));
    }
    let mut s = format!(
        "cyclic basis: d = {}, {} states, Schmidt coefficients {:?}\n",
        candidate.d(),
        candidate.len(),
        seed.coefficients()
    );
    if let Some(path) = out {
        let _ = writeln!(s, "written to {}", path.display());
    }
    Ok(CliOutput::ok(s))
}

fn report_text(r: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "states: {}", r.size);
    let _ = writeln!(
        s,
        "(i)   all non-maximally entangled: {}",
        pass(r.all_non_maximal)
    );
    let _ = writeln!(
        s,
        "(ii)  orthonormal: {} (max |off-diagonal| {:.3e}, max |diagonal - 1| {:.3e})",
        pass(r.orthonormal),
        r.max_offdiagonal,
        r.max_diagonal_deviation
    );
    let _ = writeln!(
        s,
        "(iii) locally connected: {} ({} disconnected pairs, max connector error {:.3e})",
        pass(r.locally_connected),
        r.disconnected_pairs,
        r.max_connector_error
    );
    s
}

fn cmd_verify(cli: &Cli, tol: Tolerance, input: &Path) -> Result<CliOutput, Error> {
    let candidate = BasisFile::load(input)?.to_candidate(&tol)?;
    let report = verify_candidate(&candidate, &tol)?;
    let code = if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    };
    let stdout = if cli.json {
        to_json_line(&json!({ "all_pass": report.all_pass(), "report": report }))
    } else {
        let mut s = report_text(&report);
        let _ = writeln!(s, "overall: {}", pass(report.all_pass()));
        s
    };
    Ok(CliOutput::with_code(code, stdout))
}

fn outcome_json(outcome: &ExtensionOutcome) -> Value {
    let mut v = json!({
        "status": outcome.status,
        "residual": outcome.residual,
        "best_residual": outcome.best_residual,
        "restarts_used": outcome.restarts_used,
        "iterations_total": outcome.iterations_total,
        "v": outcome.v.as_ref().map(matrix_to_repr),
    });
    if !outcome.is_found() {
        v["note"] = json!(HEURISTIC_CAVEAT);
    }
    v
}

fn outcome_text(outcome: &ExtensionOutcome) -> String {
    let mut s = String::new();
    if let Some(v) = &outcome.v {
        let _ = writeln!(s, "extension FOUND: residual {:.3e}", outcome.residual);
        let _ = write!(s, "V =\n{}", fmt_matrix(v));
    } else {
        let _ = writeln!(
            s,
            "{HEURISTIC_CAVEAT}\nbest residual {:.9e}, last residual {:.9e}",
            outcome.best_residual, outcome.residual
        );
    }
    let _ = writeln!(
        s,
        "restarts used: {}, iterations: {}",
        outcome.restarts_used, outcome.iterations_total
    );
    s
}

fn cmd_extend(
    cli: &Cli,
    tol: Tolerance,
    input: &Path,
    search: &SearchArgs,
    out: Option<&PathBuf>,
) -> Result<CliOutput, Error> {
    let mut candidate = BasisFile::load(input)?.to_candidate(&tol)?;
    let outcome = extend(&make_extension_problem(&candidate)?, &search.params(tol))?;
    if let (Some(v), Some(path)) = (&outcome.v, out) {
        candidate.push_generator(v.clone(), &tol)?;
        BasisFile::from_candidate(&candidate).save(path)?;
    }
    let code = if outcome.is_found() {
        EXIT_OK
    } else {
        EXIT_NOT_FOUND
    };
    let stdout = if cli.json {
        to_json_line(&outcome_json(&outcome))
    } else {
        outcome_text(&outcome)
    };
    Ok(CliOutput::with_code(code, stdout))
}

fn cmd_grow(
    cli: &Cli,
    tol: Tolerance,
    schmidt: &SchmidtArg,
    max_size: usize,
    search: &SearchArgs,
    out: Option<&PathBuf>,
) -> Result<CliOutput, Error> {
    let seed = parse_seed(schmidt)?;
    let report = greedy_grow(&seed, &search.params(tol), max_size)?;
    let file = BasisFile::from_candidate(&report.candidate);
    if let Some(path) = out {
        file.save(path)?;
    }
    let last = report.outcomes.last();
    if cli.json {
        return Ok(CliOutput::ok(to_json_line(&json!({
            "size": report.candidate.len(),
            "basis": serde_json::to_value(&file).expect("basis file serialises"),
            "attempts": report.outcomes.iter().map(outcome_json).collect::<Vec<_>>(),
        }))));
    }
    let mut s = format!(
        "grown basis: d = {}, {} states (cyclic start {})\n",
        report.candidate.d(),
        report.candidate.len(),
        report.candidate.d()
    );
    match last {
        Some(o) if !o.is_found() => {
            let _ = writeln!(
                s,
                "stopped: {HEURISTIC_CAVEAT} (best residual {:.3e})",
                o.best_residual
            );
        }
        _ => {
            let _ = writeln!(
                s,
                "stopped: reached max size {max_size}; no maximality claim"
            );
        }
    }
    Ok(CliOutput::ok(s))
}

fn cmd_repro_d4(cli: &Cli, tol: Tolerance) -> Result<CliOutput, Error> {
    let ce = counterexample_d4(&tol)?;
    let flaw = flaw_demo(&tol)?;
    let rebuilt = crate::weyl::weyl_reconstruct(&crate::repro::counterexample_coefficients());
    let reconstruct_dev = rebuilt.max_abs_diff(&ce.v)?;

    let orthogonal_ok = ce.gram_deviation < 1e-12;
    let unitary_ok = ce.unitarity_deviation < 1e-12;
    let coeff_ok = ce.coefficient_deviation < 1e-14 && reconstruct_dev < 1e-14;
    let flaw_ok = flaw.conclusion && flaw.max_eq5 < 1e-12 && flaw.max_eq6 >= 0.70;
    let all_ok = orthogonal_ok && unitary_ok && coeff_ok && flaw_ok;
    let code = if all_ok { EXIT_OK } else { EXIT_VALIDATION };

    if cli.json {
        let pairs = |zs: &[ComplexScalar]| zs.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
        return Ok(CliOutput::with_code(
            code,
            to_json_line(&json!({
                "all_pass": all_ok,
                "gram_deviation": ce.gram_deviation,
                "unitarity_deviation": ce.unitarity_deviation,
                "coefficient_deviation": ce.coefficient_deviation,
                "reconstruction_deviation": reconstruct_dev,
                "fifth_schmidt_coefficients": ce.fifth_spectrum,
                "v": matrix_to_repr(&ce.v),
                "eq5_sums": pairs(&flaw.eq5_sums),
                "eq6_sums": flaw.eq6_sums.iter().map(|row| pairs(row)).collect::<Vec<_>>(),
                "flaw_conclusion": flaw.conclusion,
            })),
        ));
    }

    let mut s = String::new();
    let _ = writeln!(
        s,
        "d = 4 counterexample, seed (1/sqrt3, 1/sqrt6, 1/sqrt3, 1/sqrt6)"
    );
    let _ = write!(s, "V =\n{}", fmt_matrix(&ce.v));
    let _ = writeln!(
        s,
        "5 mutually orthogonal states: {} (max |G - I| = {:.3e})",
        pass(orthogonal_ok),
        ce.gram_deviation
    );
    let _ = writeln!(
        s,
        "V unitary: {} (max |V^dagger V - I| = {:.3e})",
        pass(unitary_ok),
        ce.unitarity_deviation
    );
    let _ = writeln!(
        s,
        "Weyl coefficients of V: {} (expansion {:.3e}, reconstruction {:.3e})",
        pass(coeff_ok),
        ce.coefficient_deviation,
        reconstruct_dev
    );
    let _ = writeln!(
        s,
        "fifth state Schmidt coefficients: {:?}",
        ce.fifth_spectrum
    );
    let _ = writeln!(s, "overlap sums per shift m:");
    for (m, z) in flaw.eq5_sums.iter().enumerate() {
        let _ = writeln!(s, "  m = {m}: {}", fmt_complex(*z));
    }
    let _ = writeln!(s, "largest per-phase sum |s_k(m)|: {:.6}", flaw.max_eq6);
    let _ = writeln!(
        s,
        "vanishing overlaps without vanishing per-phase sums: {}",
        pass(flaw_ok)
    );
    let _ = writeln!(s, "overall: {}", pass(all_ok));
    Ok(CliOutput::with_code(code, s))
}

fn cmd_repro_d2(
    cli: &Cli,
    tol: Tolerance,
    schmidt: &SchmidtArg,
    search: &SearchArgs,
    out: Option<&PathBuf>,
) -> Result<CliOutput, Error> {
    let seed = parse_seed(schmidt)?;
    let analysis = d2_analysis(&seed, &search.params(tol))?;
    if let Some(path) = out {
        BasisFile::from_candidate(&analysis.basis).save(path)?;
    }
    let all_ok = analysis.verification.all_pass() && analysis.search_agrees;
    let code = if all_ok { EXIT_OK } else { EXIT_VALIDATION };
    if cli.json {
        return Ok(CliOutput::with_code(
            code,
            to_json_line(&json!({
                "all_pass": all_ok,
                "schmidt": seed.coefficients(),
                "max_size": analysis.max_size,
                "second_generator": matrix_to_repr(&analysis.second_generator),
                "antidiagonal_phases": [analysis.antidiagonal_phases.0, analysis.antidiagonal_phases.1],
                "min_third_residual": analysis.min_third_residual,
                "verification": analysis.verification,
                "search": outcome_json(&analysis.search),
            })),
        ));
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        "d = 2 analysis, Schmidt coefficients {:?}",
        seed.coefficients()
    );
    let _ = writeln!(
        s,
        "second member: (X (x) I)|phi>, phases (alpha, beta) = ({}, {})",
        analysis.antidiagonal_phases.0, analysis.antidiagonal_phases.1
    );
    let _ = writeln!(
        s,
        "pair verification: {}",
        pass(analysis.verification.all_pass())
    );
    let _ = writeln!(s, "maximum basis size: {}", analysis.max_size);
    let _ = writeln!(
        s,
        "smallest residual for a third member, (C0^2 - C1^2)^2 = {:.9e}",
        analysis.min_third_residual
    );
    let _ = writeln!(
        s,
        "numerical search: {} (best residual {:.9e}); agreement within {:.0e}: {}",
        if analysis.search.is_found() {
            "FOUND"
        } else {
            "not found"
        },
        analysis.search.best_residual,
        D2_RESIDUAL_AGREEMENT,
        pass(analysis.search_agrees)
    );
    if let Some(path) = out {
        let _ = writeln!(s, "pair written to {}", path.display());
    }
    let _ = writeln!(s, "overall: {}", pass(all_ok));
    Ok(CliOutput::with_code(code, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> CliOutput {
        run(std::iter::once("lunmeb").chain(args.iter().copied()))
    }

    #[test]
    fn weyl_prints_matrix() {
        let out = run_args(&["weyl", "--d", "4", "--n", "1", "--m", "0"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("U_{10} (d = 4)"));
        let out = run_args(&["weyl", "--d", "4", "--n", "4", "--m", "0"]);
        assert_eq!(out.code, EXIT_MALFORMED);
    }

    #[test]
    fn maximal_seed_is_validation_failure() {
        let out = run_args(&[
            "basis",
            "build",
            "--schmidt",
            "0.7071067811865476,0.7071067811865476",
        ]);
        assert_eq!(out.code, EXIT_VALIDATION);
        assert!(
            out.stderr.contains("seed is maximally entangled"),
            "{}",
            out.stderr
        );
    }

    #[test]
    fn negative_coefficient_rejected() {
        let out = run_args(&["basis", "build", "--schmidt", "-0.5,0.5"]);
        assert_eq!(out.code, EXIT_MALFORMED);
        assert!(out.stderr.contains("negative"));
    }

    #[test]
    fn bad_arguments_exit_one() {
        assert_eq!(run_args(&["basis"]).code, EXIT_MALFORMED);
        assert_eq!(run_args(&["frobnicate"]).code, EXIT_MALFORMED);
        assert_eq!(
            run_args(&["--tol-verify", "1e-6", "repro", "d4"]).code,
            EXIT_MALFORMED
        );
        assert_eq!(run_args(&["--help"]).code, EXIT_OK);
    }

    #[test]
    fn repro_d4_passes() {
        let out = run_args(&["repro", "d4"]);
        assert_eq!(out.code, 0, "{}", out.stdout);
        assert!(out.stdout.contains("5 mutually orthogonal states: PASS"));
    }
}
