//! Command-line front end.
//!
//! Every report is a JSON envelope holding the tool version, the parsed run
//! configuration, an optional timestamp and the result. Exit codes: 0 on
//! success, 2 when a certificate is inconclusive, 1 on any error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};

use crate::coarse_grain::{classify_2d, effective_1d, effective_2d, inflate_range, BlockSpectrum, TermClass};
use crate::coefficients::{round_up_4, threshold_1d, threshold_2d, ThresholdMode};
use crate::criteria::suite::SuiteKind;
use crate::criteria::{
    certify_2d, certify_periodic, certify_quasi1d, certify_thm1, certify_thm2, quasi1d_gaps, two_d_gaps, verify_inequality_suite,
    Certificate, Provenance, SuiteConfig,
};
use crate::error::{Error, Result};
use crate::lattice::box_region;
use crate::models::{self, ModelKind, ModelSpec};
use crate::operators::{chain_hamiltonian, region_hamiltonian, segment_hamiltonian};
use crate::spectra::{gap_profile, spectral_gap, GapReport, DEFAULT_ZERO_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

/// Inclusive size range, written `a..b`, `a..=b` or `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeRange {
    pub lo: usize,
    pub hi: usize,
}

impl SizeRange {
    pub fn iter(self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl FromStr for SizeRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad size {t:?}: {e}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(SizeRange { lo, hi })
    }
}

impl Serialize for SizeRange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.lo, self.hi].serialize(s)
    }
}

#[derive(Parser, Debug, Serialize)]
#[command(name = "ffgap", version, about = "Finite-size spectral gap certificates for frustration-free Hamiltonians")]
pub struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print errors as JSON on stderr.
    #[arg(long, global = true)]
    pub json_errors: bool,
    /// Leave the timestamp out of the report.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Relative cut between zero and positive eigenvalues.
    #[arg(long, global = true, default_value_t = DEFAULT_ZERO_TOL)]
    pub zero_tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Spectral gaps over a range of system sizes.
    Gap(GapArgs),
    /// Bulk and edge gaps of a chain up to size n.
    Profile(ProfileArgs),
    /// Evaluate one criterion and emit a certificate.
    Certify {
        #[command(subcommand)]
        criterion: CertifyCommand,
    },
    /// Table of thresholds.
    Thresholds(ThresholdArgs),
    /// Randomized check of the operator inequalities.
    Verify(VerifyArgs),
    /// Effective strip or plaquette model of a 2D cell.
    CoarseGrain(CoarseGrainArgs),
}

/// `aklt`, `singlet`, a model JSON file, or a generator such as
/// `planted_chain:d=2,rank=2,edge=1,seed=3`.
#[derive(Args, Debug, Serialize)]
pub struct ModelArg {
    #[arg(long)]
    pub model: String,
}

#[derive(Args, Debug, Serialize)]
pub struct GapArgs {
    #[command(flatten)]
    pub model: ModelArg,
    /// Chain lengths, or box widths for a 2D cell.
    #[arg(long, default_value = "2..8")]
    pub sizes: SizeRange,
    /// Box height for a 2D cell.
    #[arg(long, default_value_t = 1)]
    pub m2: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub model: ModelArg,
    #[arg(long)]
    pub n: usize,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertifyCommand {
    /// Open chain, local gap min{bulk, edge}.
    Thm1(ChainCertArgs),
    /// Open chain with weighted edge averages.
    Thm2(ChainCertArgs),
    /// Periodic chain.
    Gm(GmArgs),
    /// Quasi-1D boxes of height m2.
    Quasi1d(Quasi1dArgs),
    /// 2D rhomboids.
    #[command(name = "2d")]
    #[serde(rename = "2d")]
    TwoD(TwoDArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ChainCertArgs {
    #[command(flatten)]
    pub model: ModelArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "exact")]
    pub mode: ThresholdMode,
}

#[derive(Args, Debug, Serialize)]
pub struct GmArgs {
    #[command(flatten)]
    pub model: ModelArg,
    #[arg(long)]
    pub n: usize,
    /// Ring length; defaults to 2n + 2.
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct Quasi1dArgs {
    #[command(flatten)]
    pub model: ModelArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub m2: usize,
    /// Strip width; defaults to the cell's range.
    #[arg(long)]
    pub r: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct TwoDArgs {
    #[command(flatten)]
    pub model: ModelArg,
    #[arg(long)]
    pub n: usize,
    /// Box side; defaults to the cell's range.
    #[arg(long)]
    pub r: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
pub struct ThresholdArgs {
    #[arg(long, default_value = "4..9")]
    pub n: SizeRange,
    #[arg(long, default_value = "exact")]
    pub mode: ThresholdMode,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteArg {
    #[value(name = "1d")]
    #[serde(rename = "1d")]
    OneD,
    #[value(name = "2d")]
    #[serde(rename = "2d")]
    TwoD,
    Cg,
    All,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::OneD)]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Local dimensions of the random chains, cycled over trials.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub dims: Vec<usize>,
    /// Chain lengths, cycled over trials.
    #[arg(long, default_value = "8")]
    pub sizes: SizeRange,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Strip,
    Plaquette,
}

#[derive(Args, Debug, Serialize)]
pub struct CoarseGrainArgs {
    #[command(flatten)]
    pub model: ModelArg,
    #[arg(long, value_enum, default_value_t = Geometry::Strip)]
    pub geometry: Geometry,
    /// Box side; defaults to the cell's range.
    #[arg(long)]
    pub r: Option<usize>,
    /// Strip height.
    #[arg(long, default_value_t = 1)]
    pub m2: usize,
    /// Chain length in boxes; the box side is inflated to a divisor of it.
    #[arg(long)]
    pub m1: Option<usize>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool_version: &'static str,
    config: &'a Cli,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
    result: T,
}

#[derive(Serialize)]
struct ErrorReport {
    error: ErrorBody,
}

#[derive(Serialize)]
struct ErrorBody {
    kind: String,
    message: String,
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

fn kv(spec: &str) -> Result<BTreeMap<&str, &str>> {
    spec.split(',')
        .filter(|s| !s.is_empty())
        .map(|p| p.split_once('=').ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got {p:?}"))))
        .collect()
}

fn get<T: FromStr>(args: &BTreeMap<&str, &str>, key: &str, default: Option<T>) -> Result<T> {
    match args.get(key) {
        Some(v) => v.parse().map_err(|_| Error::InvalidArgument(format!("bad value {v:?} for {key}"))),
        None => default.ok_or_else(|| Error::InvalidArgument(format!("missing {key}"))),
    }
}

/// Resolves a model argument: a path to a model file, a built-in name, or a
/// generator `random_ff:…`, `planted_chain:…`, `onsite:…`.
pub fn resolve_model(arg: &str) -> Result<ModelSpec> {
    if Path::new(arg).is_file() {
        return models::load(Path::new(arg));
    }
    let Some((kind, rest)) = arg.split_once(':') else {
        return models::builtin(arg);
    };
    let a = kv(rest)?;
    match kind {
        "random_ff" => models::random_ff(
            get(&a, "d", Some(2))?,
            get(&a, "rank", Some(1))?,
            get(&a, "edge", Some(0))?,
            get(&a, "seed", Some(0))?,
            get(&a, "depth", Some(models::DEFAULT_FF_DEPTH))?,
        ),
        "planted_chain" => models::random_planted_chain(
            get(&a, "d", Some(2))?,
            get(&a, "rank", Some(2))?,
            get(&a, "edge", Some(1))?,
            get(&a, "seed", Some(0))?,
        ),
        "onsite" => {
            use rand::SeedableRng;
            let d = get(&a, "d", Some(2))?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(get(&a, "seed", Some(0))?);
            let p = models::haar_projector(1, d, get(&a, "rank", Some(1))?, &mut rng)?;
            models::onsite_cell(p, get(&a, "r", Some(1))?)
        }
        _ => Err(Error::InvalidArgument(format!("unknown model generator {kind:?}"))),
    }
}

#[derive(Serialize)]
struct SizedGap {
    size: String,
    report: GapReport,
}

#[derive(Serialize)]
struct ThresholdRow {
    n: usize,
    threshold: f64,
    threshold_rounded: f64,
    g_exact: f64,
    asymptotic: f64,
    inv_n_minus_1: f64,
    g_2d: Option<f64>,
    g_2d_scaled: Option<f64>,
}

#[derive(Serialize)]
struct CoarseGrainSummary {
    geometry: Geometry,
    r: usize,
    m2: Option<usize>,
    metaspin_dim: usize,
    lambda_min: f64,
    lambda_max: f64,
    kernel_dim: usize,
    c1: f64,
    c2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge_blocks: Option<BTreeMap<&'static str, BlockSpectrum>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge_bounds_hold: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    term_classes: Option<BTreeMap<TermClass, usize>>,
}

/// Rounds to 12 significant digits and prints the shortest decimal form.
fn sig12(v: f64) -> String {
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    format!("{rounded}")
}

fn threshold_rows(args: &ThresholdArgs) -> Result<Vec<ThresholdRow>> {
    args.n
        .iter()
        .map(|n| {
            if n < 4 {
                return Err(Error::InvalidArgument(format!("threshold table starts at n = 4, got {n}")));
            }
            let threshold = threshold_1d(n, args.mode)?;
            let nf = n as f64;
            let g_2d = if n % 2 == 0 { Some(threshold_2d(n)?) } else { None };
            Ok(ThresholdRow {
                n,
                threshold,
                threshold_rounded: round_up_4(threshold),
                g_exact: threshold_1d(n, ThresholdMode::Exact)?,
                asymptotic: threshold_1d(n, ThresholdMode::Asymptotic)?,
                inv_n_minus_1: 1.0 / (nf - 1.0),
                g_2d,
                g_2d_scaled: g_2d.map(|g| g * nf.powf(1.5)),
            })
        })
        .collect()
}

fn threshold_csv(rows: &[ThresholdRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["n", "threshold", "threshold_rounded", "g_exact", "asymptotic", "inv_n_minus_1", "g_2d", "g_2d_scaled"])
        .map_err(io)?;
    let opt = |v: Option<f64>| v.map(sig12).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.n.to_string(),
            sig12(r.threshold),
            format!("{:.4}", r.threshold_rounded),
            sig12(r.g_exact),
            sig12(r.asymptotic),
            sig12(r.inv_n_minus_1),
            opt(r.g_2d),
            opt(r.g_2d_scaled),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
}

enum Output {
    Json(serde_json::Value, i32),
    Text(String),
}

fn json<T: Serialize>(v: &T, code: i32) -> Result<Output> {
    Ok(Output::Json(serde_json::to_value(v)?, code))
}

fn certificate(c: Certificate) -> Result<Output> {
    let code = if c.is_certified() { EXIT_OK } else { EXIT_INCONCLUSIVE };
    json(&c, code)
}

fn cell_range(spec: &ModelSpec, r: Option<usize>) -> Result<usize> {
    Ok(r.unwrap_or(spec.cell()?.r))
}

fn plain_gaps<K: Ord + Copy>(m: &BTreeMap<K, Provenance>) -> BTreeMap<K, f64> {
    m.iter().map(|(k, p)| (*k, p.value)).collect()
}

fn execute(cli: &Cli) -> Result<Output> {
    let tol = cli.zero_tol;
    match &cli.command {
        Command::Gap(a) => {
            let spec = resolve_model(&a.model.model)?;
            let mut out = Vec::new();
            for m in a.sizes.iter() {
                let (size, h) = match &spec.kind {
                    ModelKind::Chain(c) => (format!("{m}"), chain_hamiltonian(c, m)?),
                    ModelKind::Cell2d(c) => (format!("{m}x{}", a.m2), region_hamiltonian(c, &box_region(m, a.m2)?)?),
                };
                out.push(SizedGap { size, report: spectral_gap(&h, tol)? });
            }
            json(&out, EXIT_OK)
        }
        Command::Profile(a) => {
            let spec = resolve_model(&a.model.model)?;
            json(&gap_profile(spec.chain()?, a.n, tol)?, EXIT_OK)
        }
        Command::Certify { criterion } => match criterion {
            CertifyCommand::Thm1(a) | CertifyCommand::Thm2(a) => {
                let spec = resolve_model(&a.model.model)?;
                let profile = gap_profile(spec.chain()?, a.n, tol)?;
                let c = if matches!(criterion, CertifyCommand::Thm1(_)) {
                    certify_thm1(&profile, a.n, a.mode)?
                } else {
                    certify_thm2(&profile, a.n, a.mode)?
                };
                certificate(c.with_model(spec.name))
            }
            CertifyCommand::Gm(a) => {
                let spec = resolve_model(&a.model.model)?;
                let rep = spectral_gap(&segment_hamiltonian(spec.chain()?, a.n, false, false)?, tol)?;
                let mut c = certify_periodic(rep.positive_gap()?, a.n, a.m.unwrap_or(2 * a.n + 2))?;
                c.provenance[0].report = Some(rep);
                certificate(c.with_model(spec.name))
            }
            CertifyCommand::Quasi1d(a) => {
                let spec = resolve_model(&a.model.model)?;
                let r = cell_range(&spec, a.r)?;
                let gaps = quasi1d_gaps(spec.cell()?, a.m2, r, a.n, tol)?;
                let mut c = certify_quasi1d(spec.cell()?, a.m2, r, a.n, &plain_gaps(&gaps))?;
                c.provenance = gaps.into_values().collect();
                certificate(c.with_model(spec.name))
            }
            CertifyCommand::TwoD(a) => {
                let spec = resolve_model(&a.model.model)?;
                let r = cell_range(&spec, a.r)?;
                let gaps = two_d_gaps(spec.cell()?, r, a.n, tol)?;
                let mut c = certify_2d(spec.cell()?, r, a.n, &plain_gaps(&gaps))?;
                c.provenance = gaps.into_values().collect();
                certificate(c.with_model(spec.name))
            }
        },
        Command::Thresholds(a) => {
            let rows = threshold_rows(a)?;
            match a.format {
                TableFormat::Csv => Ok(Output::Text(threshold_csv(&rows)?)),
                TableFormat::Json => json(&rows, EXIT_OK),
            }
        }
        Command::Verify(a) => {
            let suites = match a.suite {
                SuiteArg::OneD => vec![SuiteKind::Chain],
                SuiteArg::TwoD => vec![SuiteKind::TwoD],
                SuiteArg::Cg => vec![SuiteKind::CoarseGrain],
                SuiteArg::All => vec![SuiteKind::Chain, SuiteKind::TwoD, SuiteKind::CoarseGrain],
            };
            let cfg = SuiteConfig {
                seed: a.seed,
                trials: a.trials,
                dims: a.dims.clone(),
                sizes: a.sizes.iter().collect(),
                n: a.n,
                suites,
                zero_tol: tol,
            };
            let report = verify_inequality_suite(&cfg)?;
            let code = if report.ok() { EXIT_OK } else { EXIT_ERROR };
            json(&report, code)
        }
        Command::CoarseGrain(a) => {
            let spec = resolve_model(&a.model.model)?;
            let cell = spec.cell()?;
            let mut r = cell_range(&spec, a.r)?;
            if let Some(m1) = a.m1 {
                r = inflate_range(r, m1)?;
            }
            let summary = match a.geometry {
                Geometry::Strip => {
                    let e = effective_1d(cell, a.m2, r)?;
                    CoarseGrainSummary {
                        geometry: a.geometry,
                        r: e.r,
                        m2: Some(e.m2),
                        metaspin_dim: e.metaspin_dim,
                        lambda_min: e.lambda_min,
                        lambda_max: e.lambda_max,
                        kernel_dim: e.kernel_dim,
                        c1: e.c1(),
                        c2: e.c2(),
                        edge_blocks: Some(BTreeMap::from([("left", e.left), ("right", e.right), ("both", e.both)])),
                        edge_bounds_hold: Some(e.edge_bounds_hold()),
                        term_classes: None,
                    }
                }
                Geometry::Plaquette => {
                    let e = effective_2d(cell, r)?;
                    let cls = classify_2d(cell, r)?;
                    CoarseGrainSummary {
                        geometry: a.geometry,
                        r: e.r,
                        m2: None,
                        metaspin_dim: e.metaspin_dim,
                        lambda_min: e.lambda_min,
                        lambda_max: e.lambda_max,
                        kernel_dim: e.kernel_dim,
                        c1: e.c1(),
                        c2: e.c2(),
                        edge_blocks: None,
                        edge_bounds_hold: None,
                        term_classes: Some(
                            [TermClass::WithinBox, TermClass::SidePair, TermClass::CornerQuad]
                                .into_iter()
                                .map(|k| (k, cls.count(k)))
                                .collect(),
                        ),
                    }
                }
            };
            json(&summary, EXIT_OK)
        }
    }
}

fn report_error(e: &Error, json_errors: bool, err: &mut dyn Write) {
    if json_errors {
        let body = ErrorReport { error: ErrorBody { kind: error_kind(e), message: e.to_string() } };
        let _ = writeln!(err, "{}", serde_json::to_string(&body).unwrap_or_default());
    } else {
        let _ = writeln!(err, "error: {e}");
    }
}

fn emit(cli: &Cli, text: &str, out: &mut dyn Write) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs one parsed command, writing the report to `out` (or the output
/// file) and diagnostics to `err`; returns the exit code.
pub fn run_cli(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Some(t) = cli.threads {
        // a global pool can be built once per process; later calls keep it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = execute(cli).and_then(|o| match o {
        Output::Text(t) => emit(cli, &t, out).map(|_| EXIT_OK),
        Output::Json(v, code) => {
            let timestamp = (!cli.no_timestamp)
                .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
            let env = Envelope { tool_version: crate::VERSION, config: cli, timestamp, result: v };
            let mut text = serde_json::to_string_pretty(&env)?;
            text.push('\n');
            emit(cli, &text, out).map(|_| code)
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            report_error(&e, cli.json_errors, err);
            EXIT_ERROR
        }
    }
}

/// Parses `argv` (including the program name) and runs it.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    match Cli::try_parse_from(&argv) {
        Ok(cli) => run_cli(&cli, out, err),
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            if argv.iter().any(|a| a == "--json-errors") {
                let body = ErrorReport { error: ErrorBody { kind: "Usage".into(), message: e.to_string() } };
                let _ = writeln!(err, "{}", serde_json::to_string(&body).unwrap_or_default());
            } else {
                let _ = write!(err, "{e}");
            }
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("ffgap").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn size_ranges() {
        assert_eq!("4..9".parse::<SizeRange>().unwrap(), SizeRange { lo: 4, hi: 9 });
        assert_eq!("4..=9".parse::<SizeRange>().unwrap(), SizeRange { lo: 4, hi: 9 });
        assert_eq!("7".parse::<SizeRange>().unwrap(), SizeRange { lo: 7, hi: 7 });
        assert!("9..4".parse::<SizeRange>().is_err());
        assert!("x".parse::<SizeRange>().is_err());
    }

    #[test]
    fn sig12_rounds() {
        assert_eq!(sig12(0.1234567890123456), "0.123456789012");
        assert_eq!(sig12(2.0), "2");
    }

    #[test]
    fn thresholds_csv_matches_table() {
        let (code, out, _) = call(&["thresholds", "--n", "4..9", "--mode", "exact"]);
        assert_eq!(code, 0);
        let rounded: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
        assert_eq!(rounded, ["0.3246", "0.2361", "0.1833", "0.1484", "0.1238", "0.1056"]);
        let header = out.lines().next().unwrap();
        assert!(header.starts_with("n,threshold,threshold_rounded"));
    }

    #[test]
    fn unknown_flag_is_an_error() {
        let (code, _, err) = call(&["--json-errors", "thresholds", "--bogus"]);
        assert_eq!(code, EXIT_ERROR);
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"]["kind"], "Usage");
    }

    #[test]
    fn model_errors_are_machine_readable() {
        let (code, _, err) = call(&["--json-errors", "profile", "--model", "nope", "--n", "4"]);
        assert_eq!(code, EXIT_ERROR);
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"]["kind"], "InvalidArgument");
    }

    #[test]
    fn certify_exit_codes() {
        let (code, out, _) = call(&["--no-timestamp", "certify", "thm1", "--model", "aklt", "--n", "6"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["verdict"], "certified_gapped");
        assert!(v.get("timestamp").is_none());
        assert_eq!(v["config"]["command"]["certify"]["criterion"]["thm1"]["n"], 6);
        let (code, _, _) = call(&["--no-timestamp", "certify", "thm1", "--model", "singlet", "--n", "6"]);
        assert_eq!(code, EXIT_INCONCLUSIVE);
    }

    #[test]
    fn reports_are_reproducible() {
        let args = ["--no-timestamp", "certify", "thm2", "--model", "planted_chain:d=2,rank=2,edge=1,seed=4", "--n", "5"];
        let (_, a, _) = call(&args);
        let (_, b, _) = call(&args);
        assert!(!a.is_empty());
        assert_eq!(a, b);
    }

    #[test]
    fn model_generators() {
        assert!(resolve_model("onsite:d=3,seed=2").unwrap().cell().is_ok());
        assert!(resolve_model("planted_chain:d=3,rank=3,edge=1,seed=1").unwrap().chain().is_ok());
        assert!(resolve_model("planted_chain:d=x").is_err());
        assert!(resolve_model("mystery:d=2").is_err());
    }
}
