//! `minkprop` command-line interface: pairings, verification suites,
//! plot-ready propagator tables and Fock-space demonstrations.
//!
//! Exit codes: 0 success, 1 a check failed, 2 invalid arguments, 3 numerical
//! non-convergence.

// `!(t >= 0.0)`-style guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use minkprop::dirac::{pair_dirac_propagator, Mat4};
use minkprop::fock::{self, LatticeSpec, Statistics};
use minkprop::mass_shell::{self, MomShellDist};
use minkprop::propagators::{self, PropKind, PropTag};
use minkprop::report::{CheckLine, Envelope, Suite};
use minkprop::{densities_1d, dirac, fourier, Error, FourVector, Mass, PairingResult, QuadConfig, TestFn};

#[derive(Parser)]
#[command(name = "minkprop", version, about = "Generalized densities and propagators on Minkowski space")]
struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Pair a distribution with a test function read from JSON.
    Pair {
        /// Distribution: omega±, eps±, epv±, e, opp±±, leray± (suffix @pos
        /// for massless position-space twins), a propagator kind (Dplus,
        /// Dminus, D, Dcirc, Dbullet, Dret, Dadv, DF; suffix @pos for the
        /// massless light-cone closed form) or slash:<kind>.
        #[arg(long)]
        dist: String,
        /// Mass.
        #[arg(long, default_value_t = 0.0)]
        mass: f64,
        /// Test-function JSON file.
        #[arg(long)]
        testfn: PathBuf,
    },
    /// Run verification suites and emit a JSON report.
    Verify {
        /// Which suite.
        #[arg(long, value_enum, default_value_t = SuiteName::All)]
        suite: SuiteName,
        /// Comma-separated masses (suite default when omitted).
        #[arg(long, value_delimiter = ',')]
        masses: Option<Vec<f64>>,
        /// Override the residual tolerance of every check line.
        #[arg(long)]
        tol: Option<f64>,
        /// PRNG seed for the random test functions.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Number of random test functions (suite default when omitted).
        #[arg(long)]
        count: Option<usize>,
    },
    /// Tabulate a Gaussian-smeared propagator on a (t, r) grid as CSV.
    Table {
        /// Propagator kind.
        #[arg(long)]
        dist: String,
        /// Mass.
        #[arg(long, default_value_t = 0.0)]
        mass: f64,
        /// Grid `t=a:b:n,r=a:b:n`.
        #[arg(long, default_value = "t=-3:3:25,r=0:3:13", allow_hyphen_values = true)]
        grid: String,
        /// Smearing width.
        #[arg(long, default_value_t = 0.15)]
        sigma: f64,
    },
    /// Fock-space demonstrations.
    Fock {
        #[command(subcommand)]
        cmd: FockCmd,
    },
}

#[derive(Subcommand)]
enum FockCmd {
    /// Canonical (anti)commutation suite on a momentum lattice.
    Ccr {
        /// Lattice spacing.
        #[arg(long, default_value_t = 0.5)]
        dp: f64,
        /// Modes per axis span -nhalf..nhalf.
        #[arg(long, default_value_t = 2)]
        nhalf: usize,
        /// Mass.
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        /// boson or fermion.
        #[arg(long, default_value = "boson")]
        stats: String,
        /// PRNG seed.
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Smeared lattice commutator versus the quadrature propagator over a
    /// lattice-refinement ladder.
    Bridge {
        /// Field smearing centre.
        #[arg(long, default_value = "1,0,0,0", allow_hyphen_values = true)]
        x: String,
        /// Antifield point.
        #[arg(long, default_value = "0,0,0,0", allow_hyphen_values = true)]
        y: String,
        /// Comma-separated lattice spacings.
        #[arg(long, default_value = "0.8,0.4,0.2")]
        ladder: String,
        /// Mass.
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        /// boson or fermion.
        #[arg(long, default_value = "boson")]
        stats: String,
        /// Smearing width.
        #[arg(long, default_value_t = fock::BRIDGE_SIGMA)]
        sigma: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteName {
    Fourier,
    #[value(name = "ft_table")]
    FtTable,
    Massshell,
    Propagators,
    Dirac,
    Fock,
    All,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence(_) | Error::Extrapolation(_) => 3,
            Error::Algebra(_) => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type CliResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = QuadConfig::default();
    let result = match cli.cmd {
        Cmd::Pair { dist, mass, testfn } => cmd_pair(&dist, mass, &testfn, &cfg, cli.out.as_deref()),
        Cmd::Verify { suite, masses, tol, seed, count } => cmd_verify(suite, masses, tol, seed, count, &cfg, cli.out.as_deref()),
        Cmd::Table { dist, mass, grid, sigma } => cmd_table(&dist, mass, &grid, sigma, &cfg, cli.out.as_deref()),
        Cmd::Fock { cmd } => cmd_fock(cmd, &cfg, cli.out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    let res = match out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    res.map_err(|e| invalid(format!("cannot write output: {e}")))
}

fn emit_json<T: Serialize>(body: T, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = Envelope::new(body).to_json()?;
    text.push('\n');
    emit(&text, out)
}

fn mass(m: f64) -> Result<Mass, Failure> {
    Ok(Mass::new(m)?)
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, Failure> {
    s.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| invalid(format!("invalid {what} entry {v:?}")))).collect()
}

fn parse_vector(s: &str, what: &str) -> Result<FourVector, Failure> {
    let v = parse_list(s, what)?;
    let arr: [f64; 4] = v.try_into().map_err(|_| invalid(format!("{what} needs exactly 4 components")))?;
    Ok(FourVector(arr))
}

#[derive(Serialize)]
struct ScalarPair<'a> {
    dist: &'a str,
    mass: f64,
    re: f64,
    im: f64,
    abs_err: f64,
    evaluations: u64,
    converged: bool,
}

#[derive(Serialize)]
struct MatrixPair<'a> {
    dist: &'a str,
    mass: f64,
    matrix: Mat4,
    abs_err: f64,
}

fn cmd_pair(dist: &str, m: f64, testfn: &Path, cfg: &QuadConfig, out: Option<&Path>) -> CliResult {
    let text = std::fs::read_to_string(testfn).map_err(|e| invalid(format!("cannot read {}: {e}", testfn.display())))?;
    let u = TestFn::from_json(&text)?;
    let mass = mass(m)?;
    if let Some(kind) = dist.strip_prefix("slash:") {
        let tag: PropTag = kind.parse()?;
        let r = pair_dirac_propagator(tag, mass, &u, cfg)?;
        emit_json(MatrixPair { dist, mass: m, matrix: r.value, abs_err: r.abs_err }, out)?;
        return Ok(0);
    }
    let prop = dist.strip_suffix("@pos").unwrap_or(dist).parse::<PropTag>();
    let r: PairingResult = match prop {
        Ok(tag) if dist.ends_with("@pos") => {
            if m != 0.0 {
                return Err(invalid("light-cone closed forms exist only for mass 0"));
            }
            propagators::pair_massless_closed(&PropKind { tag, mass }, &u, cfg)?
        }
        Ok(tag) => propagators::pair_propagator(&PropKind { tag, mass }, &u, cfg)?,
        Err(_) => mass_shell::pair(&MomShellDist::parse(dist, mass)?, &u, cfg)?,
    };
    let converged = r.converged;
    emit_json(ScalarPair { dist, mass: m, re: r.value.re, im: r.value.im, abs_err: r.abs_err, evaluations: r.evaluations, converged }, out)?;
    Ok(if converged { 0 } else { 3 })
}

#[derive(Serialize)]
struct VerifyReport {
    seed: u64,
    pass: bool,
    suites: Vec<serde_json::Value>,
}

fn masses_or(given: &Option<Vec<f64>>, default: &[f64]) -> Result<Vec<Mass>, Failure> {
    given.as_deref().unwrap_or(default).iter().map(|&m| mass(m)).collect()
}

fn check_suite(name: &str, lines: Vec<CheckLine>, tol: Option<f64>) -> Result<(bool, serde_json::Value), Failure> {
    let lines: Vec<CheckLine> = match tol {
        Some(t) => lines.into_iter().map(|l| l.with_tol(t)).collect(),
        None => lines,
    };
    let s = Suite::new(name, lines);
    Ok((s.pass, serde_json::to_value(&s).map_err(Error::from)?))
}

fn cmd_verify(
    suite: SuiteName,
    masses: Option<Vec<f64>>,
    tol: Option<f64>,
    seed: u64,
    count: Option<usize>,
    cfg: &QuadConfig,
    out: Option<&Path>,
) -> CliResult {
    if let Some(t) = tol {
        if !(t >= 0.0) {
            return Err(invalid("tolerance must be nonnegative"));
        }
    }
    if count == Some(0) {
        return Err(invalid("count must be positive"));
    }
    let wants = |s: SuiteName| suite == s || suite == SuiteName::All;
    let mut suites = Vec::new();
    let mut pass = true;
    let mut push = |r: (bool, serde_json::Value)| {
        pass &= r.0;
        suites.push(r.1);
    };
    if wants(SuiteName::FtTable) {
        let rows = densities_1d::verify_ft_table(seed, count.unwrap_or(10), cfg)?;
        let rows = match tol {
            Some(t) => rows
                .into_iter()
                .map(|mut r| {
                    r.pass = r.max_abs_err <= t;
                    r
                })
                .collect(),
            None => rows,
        };
        let s = Suite::new("ft_table", rows);
        push((s.pass, serde_json::to_value(&s).map_err(Error::from)?));
    }
    if wants(SuiteName::Fourier) {
        let ms = masses_or(&masses, &[0.0, 0.5, 1.0])?;
        push(check_suite("fourier", fourier::verify_fourier(&ms, seed, count.unwrap_or(20), cfg)?, tol)?);
    }
    if wants(SuiteName::Massshell) {
        let mut lines = Vec::new();
        for m in masses_or(&masses, &[0.0, 1.0])? {
            lines.extend(mass_shell::check_opp_decomposition(m, seed, count.unwrap_or(10), cfg)?);
        }
        push(check_suite("massshell", lines, tol)?);
    }
    if wants(SuiteName::Propagators) {
        let ms = masses_or(&masses, &[0.0, 0.5, 1.0])?;
        push(check_suite("propagators", propagators::verify_propagators(&ms, seed, count.unwrap_or(10), cfg)?, tol)?);
    }
    if wants(SuiteName::Dirac) {
        let ms = masses_or(&masses, &[0.0, 1.0])?;
        push(check_suite("dirac", dirac::verify_dirac(&ms, seed, count.unwrap_or(10), cfg)?, tol)?);
    }
    if wants(SuiteName::Fock) {
        let mut lines = Vec::new();
        for m in masses_or(&masses, &[1.0])? {
            lines.extend(fock::verify_fock(m, seed, cfg)?);
        }
        push(check_suite("fock", lines, tol)?);
    }
    emit_json(VerifyReport { seed, pass, suites }, out)?;
    Ok(if pass { 0 } else { 1 })
}

fn parse_axis(spec: &str, name: &str) -> Result<Vec<f64>, Failure> {
    let body = spec.strip_prefix(&format!("{name}=")).ok_or_else(|| invalid(format!("grid axis must start with {name}=")))?;
    let parts: Vec<&str> = body.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(invalid(format!("grid axis {spec:?} must be {name}=start:end:count")));
    };
    let a: f64 = a.parse().map_err(|_| invalid(format!("invalid grid start {a:?}")))?;
    let b: f64 = b.parse().map_err(|_| invalid(format!("invalid grid end {b:?}")))?;
    let n: usize = n.parse().map_err(|_| invalid(format!("invalid grid count {n:?}")))?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(invalid(format!("invalid grid axis {spec:?}")));
    }
    Ok(if n == 1 { vec![a] } else { (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect() })
}

fn cmd_table(dist: &str, m: f64, grid: &str, sigma: f64, cfg: &QuadConfig, out: Option<&Path>) -> CliResult {
    let tag: PropTag = dist.parse()?;
    let axes: Vec<&str> = grid.split(',').collect();
    let [t, r] = axes.as_slice() else {
        return Err(invalid("grid must be t=a:b:n,r=a:b:n"));
    };
    let (ts, rs) = (parse_axis(t, "t")?, parse_axis(r, "r")?);
    let pts = propagators::smeared_table(&PropKind { tag, mass: mass(m)? }, &ts, &rs, sigma, cfg)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| invalid(format!("csv: {e}"));
    w.write_record(["t", "r", "re", "im", "abs_err"]).map_err(csv_err)?;
    for p in &pts {
        w.write_record([p.t, p.r, p.value.re, p.value.im, p.abs_err].map(|v| v.to_string())).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| invalid(format!("csv: {e}")))?;
    emit(&String::from_utf8_lossy(&bytes), out)?;
    Ok(0)
}

#[derive(Serialize)]
struct CcrReport {
    lattice: LatticeSpec,
    #[serde(flatten)]
    suite: Suite<CheckLine>,
}

fn cmd_fock(cmd: FockCmd, cfg: &QuadConfig, out: Option<&Path>) -> CliResult {
    match cmd {
        FockCmd::Ccr { dp, nhalf, mass: m, stats, seed } => {
            let spec = LatticeSpec::new(dp, nhalf, mass(m)?, stats.parse::<Statistics>()?)?;
            let suite = Suite::new("fock-ccr", fock::ccr_suite(&spec, seed)?);
            let pass = suite.pass;
            emit_json(CcrReport { lattice: spec, suite }, out)?;
            Ok(if pass { 0 } else { 1 })
        }
        FockCmd::Bridge { x, y, ladder, mass: m, stats, sigma } => {
            let r = fock::commutator_vs_propagator(
                &parse_vector(&x, "--x")?,
                &parse_vector(&y, "--y")?,
                mass(m)?,
                stats.parse::<Statistics>()?,
                &parse_list(&ladder, "--ladder")?,
                sigma,
                cfg,
            )?;
            let pass = r.pass;
            emit_json(r, out)?;
            Ok(if pass { 0 } else { 1 })
        }
    }
}
