//! `numshadow` command-line interface.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::analytic::restricted_moments;
use crate::catalog;
use crate::dynamics::{separability_transitions, trajectory, DynamicsConfig};
use crate::io::{points_csv, read_matrix_json, trajectory_csv, write_bytes, RunManifest};
use crate::linalg::ComplexMatrix;
use crate::range::{numerical_range_boundary, restricted_support, DEFAULT_ANGLES};
use crate::sampler::{Field, Restriction};
use crate::shadow::{estimate_moments, estimate_shadow, GridSpec, DEFAULT_BINS, DEFAULT_SAMPLES};
use crate::stats::z_score;
use crate::validate::run_suite;
use crate::{Error, Result};

/// `println!` that stops quietly when stdout is closed (e.g. piped into `head`).
macro_rules! emit {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "numshadow", version, about = "Restricted numerical shadows, numerical ranges and entanglement dynamics")]
pub struct Cli {
    /// Master seed for all random draws.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo histogram of a (restricted) numerical shadow.
    Shadow(ShadowArgs),
    /// Boundary polygon of the numerical range.
    Range(RangeArgs),
    /// Analytic moments next to their Monte Carlo estimates.
    Moments(MomentsArgs),
    /// Two-qubit trajectory under unitary + depolarizing steps.
    Dynamics(DynamicsArgs),
    /// Run an analytic-vs-Monte-Carlo validation suite.
    Validate(ValidateArgs),
    /// List or print fixture matrices.
    Catalog(CatalogArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct MatrixArgs {
    /// Catalog key, `I<n>`, `diag:<v1>,<v2>,...` or a JSON file `{dim, entries}`.
    #[arg(long)]
    pub matrix: String,
    /// Replace A by A - (tr A / D) 1.
    #[arg(long)]
    pub trace_zero: bool,
    /// Multiply A by this factor (after any trace-zero shift).
    #[arg(long)]
    pub scale: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct ShadowArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// e.g. `complex:4`, `real:3`, `product:2x2:complex`, `maxent:2:real`, `ghz`, `w`, `schmidt:0.75,0.25`.
    #[arg(long)]
    pub restriction: String,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Cells per axis.
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Explicit window `re_min,re_max,im_min,im_max` (default: padded bounding box of W(A)).
    #[arg(long)]
    pub window: Option<String>,
    /// Also write an 8-bit PGM of the histogram.
    #[arg(long)]
    pub pgm: bool,
    /// Also write the occupied-cell mask as PGM.
    #[arg(long)]
    pub mask: bool,
    /// Output file stem.
    #[arg(long, default_value = "shadow")]
    pub name: String,
}

#[derive(Debug, Args, Serialize)]
pub struct RangeArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    #[arg(long, default_value_t = DEFAULT_ANGLES)]
    pub angles: usize,
    #[arg(long, default_value = "range")]
    pub name: String,
}

#[derive(Debug, Args, Serialize)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    #[arg(long)]
    pub restriction: String,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value = "moments")]
    pub name: String,
}

#[derive(Debug, Args, Serialize)]
pub struct DynamicsArgs {
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.03)]
    pub beta: f64,
    #[arg(long, default_value_t = 300)]
    pub steps: usize,
    /// Catalog key, `diag:` list or JSON file of a 4x4 matrix.
    #[arg(long, default_value = "X1")]
    pub observable: String,
    /// Samples for the separable-shadow background histogram (0 to skip).
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub background_samples: usize,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    #[arg(long, default_value = "dynamics")]
    pub name: String,
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CatalogArgs {
    /// Print one matrix as JSON instead of listing keys.
    #[arg(long)]
    pub show: Option<String>,
}

/// Resolves a matrix reference: catalog key, then `I<n>` / `diag:...`, then a JSON path.
pub fn resolve_matrix(reference: &str) -> Result<ComplexMatrix> {
    if let Some(entry) = catalog::lookup(reference) {
        if Path::new(reference).is_file() {
            log::warn!("'{reference}' is both a catalog key and a file; using the catalog entry");
        }
        return Ok(entry.matrix);
    }
    if let Some(n) = reference.strip_prefix('I').and_then(|s| s.parse::<usize>().ok()) {
        if n == 0 {
            return Err(Error::parse("matrix", reference, "identity dimension must be positive"));
        }
        return Ok(ComplexMatrix::identity(n));
    }
    if let Some(list) = reference.strip_prefix("diag:") {
        let d = list
            .split(',')
            .map(parse_complex)
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::parse("matrix", reference, "diag entries must be numbers like 1, -0.5, 2+1i"))?;
        return Ok(ComplexMatrix::from_diagonal(&d));
    }
    let path = Path::new(reference);
    if path.is_file() {
        return read_matrix_json(path);
    }
    Err(Error::UnknownMatrix(reference.to_owned()))
}

/// `a`, `bi`, `a+bi` or `a-bi`.
fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let bad = || Error::parse("complex number", s, "expected a, bi or a+bi");
    if let Some(body) = s.strip_suffix(['i', 'j']) {
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(k, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[k - 1], b'e' | b'E'))
            .map(|(k, _)| k)
            .last();
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            x => x,
        };
        return Ok(Complex64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?));
    }
    Ok(Complex64::new(s.parse().map_err(|_| bad())?, 0.0))
}

fn load_matrix(args: &MatrixArgs) -> Result<ComplexMatrix> {
    let mut a = resolve_matrix(&args.matrix)?;
    if args.trace_zero {
        a = a.traceless();
    }
    if let Some(s) = args.scale {
        a = a.scale(Complex64::new(s, 0.0));
    }
    Ok(a)
}

fn parse_window(s: &str, bins: usize) -> Result<GridSpec> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse("window", s, "expected four numbers"))?;
    match v[..] {
        [a, b, c, d] => GridSpec::new(a, b, c, d, bins, bins),
        _ => Err(Error::parse("window", s, "expected re_min,re_max,im_min,im_max")),
    }
}

struct Outputs<'a> {
    dir: &'a Path,
    manifest: RunManifest,
    started: Instant,
}

impl<'a> Outputs<'a> {
    fn new(dir: &'a Path, command: &str, params: serde_json::Value, seed: u64) -> Self {
        Outputs {
            dir,
            manifest: RunManifest::new(command, params, seed),
            started: Instant::now(),
        }
    }

    fn write(&mut self, file: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(file);
        write_bytes(&path, bytes)?;
        self.manifest.outputs.push(path.clone());
        Ok(path)
    }

    fn finish(mut self, stem: &str) -> Result<()> {
        self.manifest.duration_secs = self.started.elapsed().as_secs_f64();
        let path = self.dir.join(format!("{stem}.manifest.json"));
        self.manifest.outputs.push(path.clone());
        self.manifest.write(&path)?;
        for p in &self.manifest.outputs {
            emit!("{}", p.display());
        }
        Ok(())
    }
}

fn cmd_shadow(cli: &Cli, args: &ShadowArgs) -> Result<()> {
    let a = load_matrix(&args.matrix)?;
    let restriction: Restriction = args.restriction.parse()?;
    let grid = match &args.window {
        Some(w) => parse_window(w, args.bins)?,
        None => GridSpec::auto(&a, args.bins, args.bins)?,
    };
    let mut out = Outputs::new(&cli.out_dir, "shadow", json!({ "args": args, "grid": grid }), cli.seed);
    let hist = estimate_shadow(&a, &restriction, args.samples, Some(grid), cli.seed)?;
    out.write(&format!("{}.csv", args.name), hist.to_csv().as_bytes())?;
    if args.pgm {
        out.write(&format!("{}.pgm", args.name), &hist.to_pgm())?;
    }
    if args.mask {
        let mask = restricted_support(&hist, 0.0);
        log::info!(
            "support: {} occupied cells, {} enclosed holes",
            mask.occupied_count(),
            mask.enclosed_holes()
        );
        out.write(&format!("{}.mask.pgm", args.name), &mask.to_pgm())?;
    }
    out.finish(&args.name)
}

fn cmd_range(cli: &Cli, args: &RangeArgs) -> Result<()> {
    let a = load_matrix(&args.matrix)?;
    let poly = numerical_range_boundary(&a, args.angles)?;
    let mut out = Outputs::new(&cli.out_dir, "range", json!({ "args": args }), cli.seed);
    out.write(&format!("{}.csv", args.name), points_csv(poly.vertices()).as_bytes())?;
    out.finish(&args.name)
}

#[derive(Serialize)]
struct MomentSummary {
    mean: [f64; 2],
    second_abs: f64,
    variance: f64,
}

fn cmd_moments(cli: &Cli, args: &MomentsArgs) -> Result<()> {
    let a = load_matrix(&args.matrix)?;
    let r: Restriction = args.restriction.parse()?;
    let analytic = restricted_moments(&a, &r)?;
    let est = estimate_moments(&a, &r, args.samples, cli.seed)?;
    let z = analytic.as_ref().map(|m| {
        json!({
            "mean": z_score(0.0, (est.mean - m.mean).norm(), est.std_error_mean).abs(),
            "second_abs": z_score(est.second_abs, m.second_abs, est.std_error_second_abs),
            "variance": z_score(est.variance, m.variance, est.std_error_var),
        })
    });
    let report = json!({
        "formula_id": analytic.as_ref().map_or("monte-carlo-only", |m| m.formula_id.as_str()),
        "inputs": { "matrix": args.matrix.matrix, "restriction": r.to_string(), "samples": args.samples, "seed": cli.seed },
        "analytic": analytic.as_ref().map(|m| MomentSummary { mean: [m.mean.re, m.mean.im], second_abs: m.second_abs, variance: m.variance }),
        "mc_estimate": MomentSummary { mean: [est.mean.re, est.mean.im], second_abs: est.second_abs, variance: est.variance },
        "mc_stderr": { "mean": est.std_error_mean, "second_abs": est.std_error_second_abs, "variance": est.std_error_var },
        "z_score": z,
    });
    let text = serde_json::to_string_pretty(&report)?;
    emit!("{text}");
    let mut out = Outputs::new(&cli.out_dir, "moments", json!({ "args": args }), cli.seed);
    out.write(&format!("{}.json", args.name), text.as_bytes())?;
    out.finish(&args.name)
}

fn cmd_dynamics(cli: &Cli, args: &DynamicsArgs) -> Result<()> {
    let observable = resolve_matrix(&args.observable)?;
    let cfg = DynamicsConfig {
        alpha: args.alpha,
        beta: args.beta,
        steps: args.steps,
        observable: observable.clone(),
    };
    let points = trajectory(&cfg)?;
    log::info!("{} separability transitions", separability_transitions(&points));
    let mut out = Outputs::new(&cli.out_dir, "dynamics", json!({ "args": args }), cli.seed);
    out.write(&format!("{}.csv", args.name), trajectory_csv(&points).as_bytes())?;
    if args.background_samples > 0 {
        let product = Restriction::Product { dims: vec![2, 2], field: Field::Complex };
        let grid = GridSpec::auto(&observable, args.bins, args.bins)?;
        let hist = estimate_shadow(&observable, &product, args.background_samples, Some(grid), cli.seed)?;
        out.write(&format!("{}.background.csv", args.name), hist.to_csv().as_bytes())?;
    }
    out.finish(&args.name)
}

fn cmd_validate(cli: &Cli, args: &ValidateArgs) -> Result<bool> {
    let report = run_suite(&args.suite, cli.seed, args.samples)?;
    let text = serde_json::to_string_pretty(&report)?;
    emit!("{text}");
    if let Some(path) = &args.report {
        write_bytes(path, text.as_bytes())?;
    }
    for c in report.failures() {
        eprintln!("FAILED: {}", c.name);
    }
    Ok(report.passed)
}

fn cmd_catalog(args: &CatalogArgs) -> Result<()> {
    match &args.show {
        Some(key) => {
            let entry = catalog::lookup(key).ok_or_else(|| Error::UnknownMatrix(key.clone()))?;
            emit!("{}", serde_json::to_string_pretty(&entry.matrix)?);
        }
        None => {
            for e in catalog::entries() {
                let parts = e.bipartition.map_or(String::new(), |(a, b)| format!(" ({a}x{b})"));
                emit!("{}\tdim {}{}", e.name, e.matrix.dim(), parts);
            }
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

/// Runs an already parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not configure the thread pool: {e}");
        }
    }
    let result = match &cli.command {
        Command::Shadow(a) => cmd_shadow(cli, a).map(|_| true),
        Command::Range(a) => cmd_range(cli, a).map(|_| true),
        Command::Moments(a) => cmd_moments(cli, a).map(|_| true),
        Command::Dynamics(a) => cmd_dynamics(cli, a).map(|_| true),
        Command::Validate(a) => cmd_validate(cli, a),
        Command::Catalog(a) => cmd_catalog(a).map(|_| true),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VALIDATION,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point of the `numshadow` binary.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::try_parse() {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
