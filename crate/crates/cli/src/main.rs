//! `sovchain`: batch front end for the SOV chain library.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use sov_chain::correlators::{formfactor_csv, formfactor_table, mpoint, LocalOp};
use sov_chain::json::F17;
use sov_chain::model::RawSpec;
use sov_chain::operators::{SpinGenerators, TransferFamily};
use sov_chain::reconstruction::{
    check_sigma_string, reconstruct_with, relative_operator_error, verify_reconstruction_identity, Generator,
    OperatorTag, Ordering,
};
use sov_chain::spectrum::SolvedSpectrum;
use sov_chain::verify::{run_all, Tolerances};
use sov_chain::{ChainSpec, Error, Spin};

const FORMFACTOR_TOL: f64 = 1e-8;
const MPOINT_TOL: f64 = 1e-7;
const RECONSTRUCTION_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(
    name = "sovchain",
    version,
    about = "Separation of variables for the antiperiodic higher-spin XXX chain",
    long_about = "Separation of variables for the antiperiodic higher-spin XXX chain.\n\n\
        Without --config the chain is the N=2 spin-1/2 benchmark (eta = i, eta_n = n).\n\
        The config is either a bare chain spec {\"N\", \"spins\", \"eta\", \"inhom\", \"regime\"?}\n\
        or a run config {\"chain\"?, \"benchmark\"?, \"command\"?, \"tolerances\"?, \"out\"?, \"seed\"?, \"correlate\"?}.\n\
        Unknown fields are rejected.\n\n\
        Exit codes: 0 pass, 1 numerical failure, 2 configuration error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON config (chain spec or run config)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for reports [default: . or the config's "out"]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override every pass/fail threshold
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for random test points [default: 0 or the config's "seed"]
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Run every invariant suite; writes verify.json
    Verify,
    /// Full spectrum with residuals and parity diagnostics; writes spectrum.json
    Spectrum,
    /// Determinant form factors against dense matrix elements; writes formfactors.csv
    Formfactors,
    /// Spectral expansion of an m-point function; writes correlate.json
    Correlate,
    /// Local operators rebuilt from transfer matrices; writes reconstruct.json
    Reconstruct,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Spectrum => "spectrum",
            Command::Formfactors => "formfactors",
            Command::Correlate => "correlate",
            Command::Reconstruct => "reconstruct",
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    chain: Option<RawSpec>,
    /// Benchmark chain (`eta = i`, `eta_n = n`) with the given spins.
    benchmark: Option<Benchmark>,
    command: Option<String>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    correlate: Option<CorrelateConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Benchmark {
    spins: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorrelateConfig {
    /// Eigenstate index in ascending order of the Hermitian eigenvalue;
    /// default the lowest.
    state: Option<usize>,
    operators: Vec<OperatorConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorConfig {
    /// `S+`, `S-` or `Sz`.
    op: String,
    /// 1-based site.
    site: usize,
}

struct Run {
    spec: ChainSpec,
    config: RunConfig,
    out: PathBuf,
    seed: u64,
    tol: Option<f64>,
}

enum Failure {
    Config(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_configuration() {
            Failure::Config(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn load(common: &Common, command: Command) -> Result<Run, Failure> {
    let config = match &common.config {
        None => RunConfig::default(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
    };
    if let Some(c) = &config.command {
        if c != command.name() {
            return Err(Failure::Config(format!(
                "config is for command {c:?} but {:?} was requested",
                command.name()
            )));
        }
    }
    let spec = match (&config.chain, &config.benchmark) {
        (Some(_), Some(_)) => return Err(Failure::Config("give either \"chain\" or \"benchmark\", not both".into())),
        (Some(raw), None) => raw.validate()?,
        (None, Some(b)) => {
            let spins = b
                .spins
                .iter()
                .map(|s| s.parse::<Spin>().map_err(|_| Failure::Config(format!("invalid spin {s:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            if spins.is_empty() {
                return Err(Failure::Config("benchmark needs at least one site".into()));
            }
            ChainSpec::benchmark(&spins)
        }
        (None, None) => ChainSpec::benchmark(&[Spin::HALF, Spin::HALF]),
    };
    if let Some(t) = common.tol {
        if !(t >= 0.0) {
            return Err(Failure::Config(format!("--tol must be a nonnegative number, got {t}")));
        }
    }
    let out = common.out.clone().or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    let seed = common.seed.or(config.seed).unwrap_or(0);
    Ok(Run { spec, out, seed, tol: common.tol, config })
}

/// A bare chain spec (has `"N"`) or a run config.
fn parse_config(text: &str) -> Result<RunConfig, Failure> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Failure::Config(format!("config is not valid JSON: {e}")))?;
    if value.get("N").is_some() {
        let raw: RawSpec = serde_json::from_value(value).map_err(|e| Failure::Config(format!("chain spec: {e}")))?;
        Ok(RunConfig { chain: Some(raw), ..Default::default() })
    } else {
        serde_json::from_value(value).map_err(|e| Failure::Config(format!("run config: {e}")))
    }
}

fn write(out: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(out).map_err(|e| Failure::Config(format!("cannot create {}: {e}", out.display())))?;
    let path = out.join(name);
    fs::write(&path, contents).map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization is infallible");
    s.push('\n');
    s
}

fn cmd_verify(run: &Run) -> Result<bool, Failure> {
    let tol = Tolerances { global: run.tol, by_name: run.config.tolerances.clone() };
    let report = run_all(&run.spec, run.seed, &tol);
    let path = write(&run.out, "verify.json", &(report.to_json() + "\n"))?;
    for c in &report.checks {
        println!(
            "{} {} residual={:.3e} threshold={:.3e}{}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.residual.0,
            c.threshold.0,
            c.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default()
        );
    }
    let failed = report.failures().count();
    println!("{} checks, {} failed; report {}", report.checks.len(), failed, path.display());
    Ok(report.passed)
}

fn cmd_spectrum(run: &Run) -> Result<bool, Failure> {
    let sol = SolvedSpectrum::solve(&run.spec)?;
    let report = sol.report();
    let path = write(&run.out, "spectrum.json", &(report.to_json() + "\n"))?;
    let worst = sol.eigen.iter().map(|e| e.sov_residual).fold(0.0, f64::max);
    println!("{} eigenvalues, max sov_residual {:.3e}", sol.len(), worst);
    println!("parity: {}", report.parity.statement);
    println!("report {}", path.display());
    Ok(true)
}

fn cmd_formfactors(run: &Run) -> Result<bool, Failure> {
    let sol = SolvedSpectrum::solve(&run.spec)?;
    let rows = formfactor_table(&sol)?;
    let path = write(&run.out, "formfactors.csv", &formfactor_csv(&rows))?;
    let poles = rows.iter().filter(|r| r.error.is_some()).count();
    let worst = rows.iter().filter(|r| r.error.is_none()).map(|r| r.rel_err).fold(0.0, f64::max);
    let tol = run.tol.unwrap_or(FORMFACTOR_TOL);
    println!("{} rows ({} at poles), max rel_err {:.3e}", rows.len(), poles, worst);
    println!("table {}", path.display());
    Ok(worst <= tol)
}

#[derive(Serialize)]
struct CorrelateReport {
    state: usize,
    operators: Vec<String>,
    expansion: [F17; 2],
    direct: [F17; 2],
    rel_err: F17,
}

fn parse_op(spec: &ChainSpec, o: &OperatorConfig) -> Result<LocalOp, Failure> {
    if o.site == 0 || o.site > spec.n() {
        return Err(Failure::Config(format!("operator site {} out of range 1..={}", o.site, spec.n())));
    }
    let n = o.site - 1;
    match o.op.as_str() {
        "S+" => Ok(LocalOp::SPlus(n)),
        "S-" => Ok(LocalOp::SMinus(n)),
        "Sz" => Ok(LocalOp::SZ(n)),
        other => Err(Failure::Config(format!("unknown operator {other:?} (expected S+, S- or Sz)"))),
    }
}

fn cmd_correlate(run: &Run) -> Result<bool, Failure> {
    let spec = &run.spec;
    let (state, ops) = match &run.config.correlate {
        Some(c) => (c.state, c.operators.iter().map(|o| parse_op(spec, o)).collect::<Result<Vec<_>, _>>()?),
        None => (None, vec![LocalOp::SZ(0), LocalOp::SZ(spec.n() - 1)]),
    };
    let sol = SolvedSpectrum::solve(spec)?;
    let state = state.unwrap_or(sol.ground_state());
    if state >= sol.len() {
        return Err(Failure::Config(format!("state {state} out of range 0..{}", sol.len())));
    }
    let outcome = mpoint(&sol, state, &ops)?;
    let labels = ops
        .iter()
        .map(|op| {
            let name = match op {
                LocalOp::SPlus(_) => "S+",
                LocalOp::SMinus(_) => "S-",
                LocalOp::SZ(_) => "Sz",
                LocalOp::Other(..) => "X",
            };
            format!("{name}_{}", op.site() + 1)
        })
        .collect();
    let report = CorrelateReport {
        state,
        operators: labels,
        expansion: [F17(outcome.expansion.re), F17(outcome.expansion.im)],
        direct: [F17(outcome.direct.re), F17(outcome.direct.im)],
        rel_err: F17(outcome.rel_err()),
    };
    let path = write(&run.out, "correlate.json", &to_json(&report))?;
    println!(
        "state {state}: expansion {:.12e}{:+.12e}i, direct {:.12e}{:+.12e}i, rel_err {:.3e}",
        outcome.expansion.re,
        outcome.expansion.im,
        outcome.direct.re,
        outcome.direct.im,
        outcome.rel_err()
    );
    println!("report {}", path.display());
    Ok(outcome.rel_err() <= run.tol.unwrap_or(MPOINT_TOL))
}

#[derive(Serialize)]
struct ReconstructRecord {
    site: usize,
    operator: &'static str,
    r1_residual: F17,
    r2_residual: F17,
}

#[derive(Serialize)]
struct SigmaRecord {
    sites: usize,
    twisted_first: F17,
    periodic_first: F17,
    involution: F17,
}

#[derive(Serialize)]
struct ReconstructReport {
    generators: Vec<ReconstructRecord>,
    sigma_strings: Vec<SigmaRecord>,
    sigma_x_identity: Vec<F17>,
    max_residual: F17,
}

fn cmd_reconstruct(run: &Run) -> Result<bool, Failure> {
    let spec = &run.spec;
    let family = TransferFamily::new(spec.clone());
    let mut worst: f64 = 0.0;
    let mut generators = Vec::new();
    for n in 0..spec.n() {
        let g = SpinGenerators::new(spec.spin(n));
        for gen in Generator::ALL {
            let oracle = sov_chain::operators::embed(spec, gen.local(&g), n)?;
            let mut res = [0.0; 2];
            for (slot, ordering) in [Ordering::R1, Ordering::R2].into_iter().enumerate() {
                let r = reconstruct_with(&family, OperatorTag::Generator(gen), n, ordering)?;
                res[slot] = relative_operator_error(&r, &oracle);
            }
            worst = worst.max(res[0]).max(res[1]);
            generators.push(ReconstructRecord {
                site: n + 1,
                operator: gen.label(),
                r1_residual: F17(res[0]),
                r2_residual: F17(res[1]),
            });
        }
    }
    let mut sigma_strings = Vec::new();
    for c in 0..=spec.n() {
        let s = check_sigma_string(&family, c)?;
        worst = worst.max(s.twisted_first).max(s.periodic_first).max(s.involution);
        sigma_strings.push(SigmaRecord {
            sites: c,
            twisted_first: F17(s.twisted_first),
            periodic_first: F17(s.periodic_first),
            involution: F17(s.involution),
        });
    }
    let mut identity = Vec::new();
    for n in 0..spec.n() {
        let r = verify_reconstruction_identity(&family, n)?;
        worst = worst.max(r);
        identity.push(F17(r));
    }
    let report = ReconstructReport { generators, sigma_strings, sigma_x_identity: identity, max_residual: F17(worst) };
    let path = write(&run.out, "reconstruct.json", &to_json(&report))?;
    println!("max reconstruction residual {worst:.3e}");
    println!("report {}", path.display());
    Ok(worst <= run.tol.unwrap_or(RECONSTRUCTION_TOL))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli.common, cli.command).and_then(|run| match cli.command {
        Command::Verify => cmd_verify(&run),
        Command::Spectrum => cmd_spectrum(&run),
        Command::Formfactors => cmd_formfactors(&run),
        Command::Correlate => cmd_correlate(&run),
        Command::Reconstruct => cmd_reconstruct(&run),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("sovchain {}: numerical checks failed", cli.command.name());
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("sovchain {}: {msg}", cli.command.name());
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("sovchain {}: configuration error: {msg}", cli.command.name());
            ExitCode::from(2)
        }
    }
}
