//! `xxz` — run the verification suite, export operators and inspect spectra of
//! the open XXZ chain.
//!
//! Exit status: 0 when everything requested passed, 1 when a check failed or
//! an object could not be built, 2 on a usage error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;

use xxz_core::algebra::{ChargeIndex, Gradation, ModelParams};
use xxz_core::charges::{charge_tower, ChargeRoute};
use xxz_core::eigen::{cluster_degeneracies, eig_general};
use xxz_core::exec::Execution;
use xxz_core::export::{laurent_to_string, matrix_to_string, Metadata};
use xxz_core::lattice::{
    hamiltonian, k_left, k_right, r_matrix, transfer_at, transfer_matrix, HamiltonianRoute, KForm, LeftCase,
};
use xxz_core::verify::{run_suite, SuiteConfig, VerificationReport};

#[derive(Parser)]
#[command(
    name = "xxz",
    version,
    about = "Open XXZ chain: verification suite, operator export and spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite and print a report.
    Verify(VerifyArgs),
    /// Build one object and write it as a matrix file.
    Build(BuildArgs),
    /// Eigenvalues of the Hamiltonian and of the first boundary charge, as CSV.
    Spectrum(SpectrumArgs),
    /// Re-run selected checks over a grid of model parameters.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Md,
}

/// Usage errors are reported with exit status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Chain lengths: `3`, `1-4` or `1,2,5`.
#[derive(Clone, Debug, PartialEq)]
struct Sites(Vec<usize>);

/// Values along one grid axis.
#[derive(Clone, Debug, PartialEq)]
struct Grid(Vec<f64>);

fn sites_arg(s: &str) -> Result<Sites, String> {
    parse_sites(s).map(Sites)
}

fn grid_arg(s: &str) -> Result<Grid, String> {
    parse_grid(s).map(Grid)
}

fn parse_sites(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid chain length `{t}`"))
        };
        match part.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi) = (parse(lo)?, parse(hi)?);
                if lo > hi {
                    return Err(format!("empty range `{part}`"));
                }
                out.extend(lo..=hi);
            }
            None => out.push(parse(part)?),
        }
    }
    if out.contains(&0) {
        return Err("chain lengths must be at least 1".into());
    }
    Ok(out)
}

fn parse_gradation(s: &str) -> Result<Gradation, String> {
    s.parse().map_err(|e: xxz_core::Error| e.to_string())
}

fn parse_case(s: &str) -> Result<LeftCase, String> {
    s.parse().map_err(|e: xxz_core::Error| e.to_string())
}

/// A grid axis: `0.2,0.5,0.9` or `start:stop:count`.
fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("invalid number `{t}`"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let (a, b) = (num(start)?, num(stop)?);
            let n: usize = count
                .trim()
                .parse()
                .map_err(|_| format!("invalid point count `{count}`"))?;
            match n {
                0 => Err("a grid needs at least one point".into()),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()),
            }
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(format!("expected a list or start:stop:count, got `{s}`")),
    }
}

/// Spectral parameter: `symbolic`, `re` or `re,im`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Spectral(Option<Complex64>);

fn lambda_arg(s: &str) -> Result<Spectral, String> {
    parse_lambda(s).map(Spectral)
}

fn parse_lambda(s: &str) -> Result<Option<Complex64>, String> {
    if s.eq_ignore_ascii_case("symbolic") {
        return Ok(None);
    }
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("invalid spectral parameter `{s}`"))
    };
    match s.split_once(',') {
        Some((re, im)) => Ok(Some(Complex64::new(num(re)?, num(im)?))),
        None => Ok(Some(Complex64::new(num(s)?, 0.0))),
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<f64>,
    /// Chain lengths, e.g. `3`, `1-4` or `2,5`.
    #[arg(long, value_parser = sites_arg)]
    n: Option<Sites>,
    /// Left boundary cases (I, II, III); repeat or separate by commas.
    #[arg(long, value_delimiter = ',', value_parser = parse_case)]
    case: Vec<LeftCase>,
    #[arg(long, value_delimiter = ',', value_parser = parse_gradation)]
    gradation: Vec<Gradation>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    lambda_samples: Option<usize>,
    /// Check names or name prefixes, separated by commas.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run on a single thread.
    #[arg(long)]
    sequential: bool,
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    mu: Option<f64>,
    m: Option<f64>,
    zeta: Option<f64>,
    n: Option<SitesSpec>,
    case: Option<Vec<String>>,
    gradation: Option<Vec<String>>,
    tol: Option<f64>,
    seed: Option<u64>,
    draws: Option<usize>,
    lambda_samples: Option<usize>,
    checks: Option<Vec<String>>,
    format: Option<Format>,
    sequential: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SitesSpec {
    List(Vec<usize>),
    One(usize),
    Text(String),
}

impl SitesSpec {
    fn resolve(&self) -> Result<Vec<usize>, String> {
        match self {
            SitesSpec::List(v) if v.is_empty() || v.contains(&0) => Err("chain lengths must be at least 1".into()),
            SitesSpec::List(v) => Ok(v.clone()),
            SitesSpec::One(n) => parse_sites(&n.to_string()),
            SitesSpec::Text(s) => parse_sites(s),
        }
    }
}

fn load_config(path: &Path) -> anyhow::Result<ConfigFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn suite_config(args: &VerifyArgs) -> anyhow::Result<(SuiteConfig, Format)> {
    let file = match &args.config {
        Some(path) => load_config(path)?,
        None => ConfigFile::default(),
    };
    let mut cfg = SuiteConfig {
        mu: args.mu.or(file.mu),
        m: args.m.or(file.m),
        zeta: args.zeta.or(file.zeta),
        ..Default::default()
    };
    if let Some(Sites(n)) = &args.n {
        cfg.sites = n.clone();
    } else if let Some(spec) = &file.n {
        cfg.sites = spec.resolve().map_err(usage)?;
    }
    if !args.case.is_empty() {
        cfg.cases = args.case.clone();
    } else if let Some(cases) = &file.case {
        cfg.cases = cases
            .iter()
            .map(|s| parse_case(s))
            .collect::<Result<_, _>>()
            .map_err(usage)?;
    }
    if !args.gradation.is_empty() {
        cfg.gradations = args.gradation.clone();
    } else if let Some(gradations) = &file.gradation {
        cfg.gradations = gradations
            .iter()
            .map(|s| parse_gradation(s))
            .collect::<Result<_, _>>()
            .map_err(usage)?;
    }
    if let Some(tol) = args.tol.or(file.tol) {
        cfg.tolerance = tol;
    }
    if let Some(seed) = args.seed.or(file.seed) {
        cfg.seed = seed;
    }
    if let Some(draws) = args.draws.or(file.draws) {
        cfg.draws = draws;
    }
    if let Some(samples) = args.lambda_samples.or(file.lambda_samples) {
        cfg.lambda_samples = samples;
    }
    if !args.checks.is_empty() {
        cfg.checks = args.checks.clone();
    } else if let Some(checks) = file.checks {
        cfg.checks = checks;
    }
    if args.sequential || file.sequential.unwrap_or(false) {
        cfg.execution = Execution::Sequential;
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let format = args.format.or(file.format).unwrap_or(Format::Json);
    Ok((cfg, format))
}

fn render(report: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json() + "\n",
        Format::Md => report.to_markdown(),
    }
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify(args: &VerifyArgs) -> anyhow::Result<bool> {
    let (cfg, format) = suite_config(args)?;
    let report = run_suite(&cfg)?;
    emit(&render(&report, format), args.out.as_deref())?;
    for e in report.failures() {
        eprintln!(
            "FAIL {} (N={:?}, case={:?}): {}",
            e.check_name,
            e.params.n,
            e.params.case,
            e.message.as_deref().unwrap_or("residual above tolerance")
        );
    }
    Ok(report.pass)
}

/// Model parameters shared by the single-point commands.
#[derive(Args)]
struct PointArgs {
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long, default_value_t = 0.7, allow_hyphen_values = true)]
    m: f64,
    #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
    zeta: f64,
    /// Chain length.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value = "homogeneous", value_parser = parse_gradation)]
    gradation: Gradation,
}

impl PointArgs {
    fn params(&self) -> anyhow::Result<ModelParams> {
        ModelParams::new(self.mu, self.m, self.zeta, self.n, self.gradation).map_err(|e| usage(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Object {
    R,
    Kright,
    Kleft,
    Transfer,
    Hamiltonian,
    Q1,
    Q2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Route {
    Derivative,
    Blob,
    Pauli,
}

impl From<Route> for HamiltonianRoute {
    fn from(r: Route) -> Self {
        match r {
            Route::Derivative => HamiltonianRoute::Derivative,
            Route::Blob => HamiltonianRoute::Blob,
            Route::Pauli => HamiltonianRoute::Pauli,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, value_enum)]
    object: Object,
    #[command(flatten)]
    point: PointArgs,
    /// `symbolic` for all Laurent coefficients, or a value `re` / `re,im`.
    #[arg(long, default_value = "symbolic", value_parser = lambda_arg, allow_hyphen_values = true)]
    lambda: Spectral,
    /// Left boundary case for `kleft` and `transfer`.
    #[arg(long, default_value = "I", value_parser = parse_case)]
    case: LeftCase,
    /// Construction route for `hamiltonian`.
    #[arg(long, value_enum, default_value = "blob")]
    route: Route,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build(args: &BuildArgs) -> anyhow::Result<bool> {
    let p = args.point.params()?;
    let g = p.gradation;
    let name = args
        .object
        .to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_owned();
    let mut meta = Metadata::new(name, &p);
    meta.lambda = args.lambda.0.map(|z| [z.re, z.im]);
    let laurent = |op: &xxz_core::operator::LaurentOp, meta: &Metadata| match args.lambda.0 {
        Some(z) => matrix_to_string(&op.eval(z), meta),
        None => laurent_to_string(op, meta),
    };
    let text = match args.object {
        Object::R => laurent(r_matrix(&p, g).op(), &meta),
        Object::Kright => laurent(&k_right(&p, KForm::Blob, g).op, &meta),
        Object::Kleft => {
            meta.case = Some(args.case);
            laurent(&k_left(args.case, g, &p).op, &meta)
        }
        Object::Transfer => {
            meta.case = Some(args.case);
            match args.lambda.0 {
                Some(z) => matrix_to_string(&transfer_at(&p, args.case, z)?, &meta),
                None => laurent_to_string(&transfer_matrix(&p, args.case)?.op, &meta),
            }
        }
        Object::Hamiltonian | Object::Q1 | Object::Q2 => {
            // spectral-parameter independent
            meta.lambda = None;
            let m = match args.object {
                Object::Hamiltonian => {
                    meta.route = Some(format!("{:?}", args.route).to_lowercase());
                    hamiltonian(&p, args.route.into())?
                }
                Object::Q1 => charge_tower(ChargeIndex::One, &p, ChargeRoute::ClosedForm)?,
                _ => charge_tower(ChargeIndex::Two, &p, ChargeRoute::ClosedForm)?,
            };
            matrix_to_string(&m, &meta)
        }
    };
    emit(&text, args.out.as_deref())?;
    Ok(true)
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Absolute gap below which neighbouring eigenvalues are grouped.
    #[arg(long, default_value_t = 1e-8)]
    cluster_tol: f64,
    #[arg(long, value_enum, default_value = "blob")]
    route: Route,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn spectrum(args: &SpectrumArgs) -> anyhow::Result<bool> {
    if !(args.cluster_tol >= 0.0) {
        return Err(usage("--cluster-tol must be non-negative"));
    }
    let p = args.point.params()?;
    let operators = [
        ("hamiltonian", hamiltonian(&p, args.route.into())?),
        ("q1", charge_tower(ChargeIndex::One, &p, ChargeRoute::ClosedForm)?),
    ];
    let mut csv = String::from("operator,cluster,multiplicity,re,im\n");
    for (name, op) in &operators {
        let values = eig_general(op, false)?.values;
        for (k, cluster) in cluster_degeneracies(&values, args.cluster_tol).iter().enumerate() {
            for z in cluster {
                let _ = writeln!(csv, "{name},{k},{},{:.16e},{:.16e}", cluster.len(), z.re, z.im);
            }
        }
    }
    emit(&csv, args.out.as_deref())?;
    Ok(true)
}

#[derive(Args)]
struct SweepArgs {
    /// Anisotropy grid: `a,b,c` or `start:stop:count`.
    #[arg(long, value_parser = grid_arg, default_value = "0.3", allow_hyphen_values = true)]
    mu: Grid,
    #[arg(long, value_parser = grid_arg, default_value = "0.7", allow_hyphen_values = true)]
    m: Grid,
    #[arg(long, value_parser = grid_arg, default_value = "0.2", allow_hyphen_values = true)]
    zeta: Grid,
    #[arg(long, value_parser = sites_arg, default_value = "1-3")]
    n: Sites,
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 5)]
    lambda_samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn sweep(args: &SweepArgs) -> anyhow::Result<bool> {
    let (mus, ms, zetas) = (&args.mu.0, &args.m.0, &args.zeta.0);
    let base = SuiteConfig {
        sites: args.n.0.clone(),
        checks: args.checks.clone(),
        tolerance: args.tol,
        lambda_samples: args.lambda_samples,
        seed: args.seed.unwrap_or(SuiteConfig::default().seed),
        ..Default::default()
    };
    let mut csv = String::from("mu,m,zeta,entries,failures,worst_check,worst_residual,pass\n");
    let mut all_pass = true;
    for &mu in mus {
        for &m in ms {
            for &zeta in zetas {
                let cfg = SuiteConfig {
                    mu: Some(mu),
                    m: Some(m),
                    zeta: Some(zeta),
                    ..base.clone()
                };
                cfg.validate().map_err(|e| usage(e.to_string()))?;
                let report = run_suite(&cfg)?;
                let worst = report
                    .entries
                    .iter()
                    .filter(|e| e.role == xxz_core::verify::Role::Mandatory)
                    .map(|e| (e.check_name.as_str(), e.residual.unwrap_or(f64::INFINITY)))
                    .max_by(|a, b| a.1.total_cmp(&b.1));
                let (worst_name, worst_res) = worst.unwrap_or(("", 0.0));
                let _ = writeln!(
                    csv,
                    "{mu},{m},{zeta},{},{},{worst_name},{worst_res:e},{}",
                    report.entries.len(),
                    report.failures().count(),
                    report.pass
                );
                all_pass &= report.pass;
            }
        }
    }
    emit(&csv, args.out.as_deref())?;
    Ok(all_pass)
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Build(a) => build(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sites_accept_single_range_and_list() {
        assert_eq!(parse_sites("3").unwrap(), [3]);
        assert_eq!(parse_sites("1-4").unwrap(), [1, 2, 3, 4]);
        assert_eq!(parse_sites("2,5").unwrap(), [2, 5]);
        assert!(parse_sites("0").is_err());
        assert!(parse_sites("4-2").is_err());
        assert!(parse_sites("x").is_err());
    }

    #[test]
    fn grids_accept_lists_and_linspace() {
        assert_eq!(parse_grid("0.1,0.2").unwrap(), [0.1, 0.2]);
        assert_eq!(parse_grid("0:1:3").unwrap(), [0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("-0.2:-0.2:1").unwrap(), [-0.2]);
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn lambda_values() {
        assert_eq!(parse_lambda("symbolic").unwrap(), None);
        assert_eq!(parse_lambda("0.5").unwrap(), Some(Complex64::new(0.5, 0.0)));
        assert_eq!(parse_lambda("-0.5,0.25").unwrap(), Some(Complex64::new(-0.5, 0.25)));
        assert!(parse_lambda("abc").is_err());
    }

    #[test]
    fn config_file_keys_match_flags() {
        let file: ConfigFile =
            toml::from_str("mu = 0.3\nn = \"1-2\"\ncase = [\"I\"]\ntol = 1e-9\nformat = \"md\"").unwrap();
        assert_eq!(file.n.unwrap().resolve().unwrap(), [1, 2]);
        assert!(toml::from_str::<ConfigFile>("sites = [1]").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
