use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ehvi_core::ehvi::{ehvi_exact_2d, ehvi_gh_with, ehvi_mc, ehvi_reference};
use ehvi_core::experiment::{
    records_csv, run_compare, run_grid_dump, run_sweep, summaries_csv, sweep_csv, DistributionKind,
    ExperimentConfig, ExperimentOutput, OutputFormat,
};
use ehvi_core::fronts::load_front;
use ehvi_core::{
    Error, FrontShape, GaussianDensity, GhOptions, ReferencePolicy, RngStream, SymMatrix,
};

const CSV_LAYOUT: &str = "\
CSV layout (compare, correlated):
  trial, mean_1..mean_m, cov_11..cov_mm (row-major), then for every method
  <label>, <label>_evals, plus <label>_se for Monte Carlo and <label>_ns when
  --timing is set. Method order: mc, gh<n> in the order given, then the
  baseline (exact, reference, diag_exact or diag_reference).
  Tau summaries go to <out>.summary.csv (or stderr without --out).
CSV layout (sweep): n, parity, nodes, tau, p_value.
CSV layout (gh-grid): x1..xm, weight.

Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.
EHVI_QUAD_THREADS caps the number of worker threads.";

#[derive(Parser)]
#[command(name = "ehvi-quad", version, about = "Compare EHVI estimators on random Gaussian densities", after_help = CSV_LAYOUT)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank every estimator against the baseline over random densities.
    Compare(ExperimentArgs),
    /// Tau of GH_n against the baseline for each node count.
    Sweep(ExperimentArgs),
    /// `compare` with correlated (Wishart) densities.
    Correlated(ExperimentArgs),
    /// Dump the pruned Gauss-Hermite grid of one density.
    GhGrid(GridArgs),
    /// Evaluate the EHVI of one density against one front.
    Ehvi(EhviArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Independent,
    Correlated,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML file with any of the settings below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV file with front points (replaces --shape/--m).
    #[arg(long)]
    front: Option<PathBuf>,
    /// linear, concave-sphere, concave-ellipsoid, convex or disconnected.
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    /// Surface samples drawn for a generated front.
    #[arg(long)]
    front_size: Option<usize>,
    /// box-upper or nadir+<margin>.
    #[arg(long)]
    ref_policy: Option<String>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    mc_samples: Option<usize>,
    /// Node counts per dimension, e.g. `15` or `3,5,7` or `3-15`.
    #[arg(long)]
    gh_nodes: Option<String>,
    #[arg(long)]
    prune: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reference_cells: Option<usize>,
    #[arg(long)]
    wishart_dof: Option<usize>,
    /// Record wall-clock nanoseconds per method (outputs stop being reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct DensityArgs {
    /// JSON density file ({"mean": [...], "covariance": [...], ...}).
    #[arg(long, conflicts_with_all = ["mean", "cov"])]
    density: Option<PathBuf>,
    /// Mean vector, e.g. `0,0`.
    #[arg(long, allow_hyphen_values = true)]
    mean: Option<String>,
    /// Covariance rows separated by `;`, e.g. `1,0.5;0.5,1` (default identity).
    #[arg(long, allow_hyphen_values = true)]
    cov: Option<String>,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    density: DensityArgs,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 0.2)]
    prune: f64,
    /// Output CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Mc,
    Gh,
    Exact,
    Reference,
}

#[derive(Args)]
struct EhviArgs {
    #[command(flatten)]
    density: DensityArgs,
    /// CSV file with front points.
    #[arg(long)]
    front: PathBuf,
    #[arg(long, default_value = "box-upper")]
    ref_policy: String,
    #[arg(long, value_enum, default_value = "gh")]
    method: MethodArg,
    #[arg(long, default_value_t = 15)]
    n: usize,
    #[arg(long, default_value_t = 0.2)]
    prune: f64,
    #[arg(long, default_value_t = 10_000)]
    mc_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    cells: usize,
}

fn parse_list(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number '{s}'"))
        })
        .collect()
}

fn parse_nodes(text: &str) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once('-') {
            let a: usize = a
                .trim()
                .parse()
                .with_context(|| format!("bad range '{part}'"))?;
            let b: usize = b
                .trim()
                .parse()
                .with_context(|| format!("bad range '{part}'"))?;
            if a > b {
                bail!("empty node range '{part}'");
            }
            out.extend(a..=b);
        } else {
            out.push(
                part.parse()
                    .with_context(|| format!("bad node count '{part}'"))?,
            );
        }
    }
    Ok(out)
}

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidConfig(msg.into()).into()
}

impl ExperimentArgs {
    fn into_config(self, preset: Option<DistributionKind>) -> anyhow::Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                toml::from_str::<ExperimentConfig>(&text)
                    .map_err(|e| config_error(format!("{}: {e}", path.display())))?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(kind) = preset {
            c.kind = kind;
        }
        if self.front.is_some() {
            c.front = self.front;
        }
        if let Some(s) = self.shape {
            c.shape = s.parse::<FrontShape>()?;
        }
        if let Some(v) = self.m {
            c.m = v;
        }
        if let Some(v) = self.front_size {
            c.front_size = v;
        }
        if let Some(s) = self.ref_policy {
            c.ref_policy = s.parse::<ReferencePolicy>()?;
        }
        if let Some(k) = self.kind {
            c.kind = match k {
                KindArg::Independent => DistributionKind::Independent,
                KindArg::Correlated => DistributionKind::Correlated,
            };
        }
        if let Some(v) = self.trials {
            c.trials = v;
        }
        if let Some(v) = self.mc_samples {
            c.mc_samples = v;
        }
        if let Some(s) = self.gh_nodes {
            c.gh_nodes = parse_nodes(&s).map_err(|e| config_error(e.to_string()))?;
        }
        if let Some(v) = self.prune {
            c.prune = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if self.reference_cells.is_some() {
            c.reference_cells = self.reference_cells;
        }
        if self.wishart_dof.is_some() {
            c.wishart_dof = self.wishart_dof;
        }
        c.timing |= self.timing;
        if self.out.is_some() {
            c.out = self.out;
        }
        if let Some(f) = self.format {
            c.format = match f {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            };
        }
        c.validate()?;
        Ok(c)
    }
}

impl DensityArgs {
    fn load(&self) -> anyhow::Result<GaussianDensity> {
        if let Some(path) = &self.density {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            return serde_json::from_str(&text)
                .map_err(|e| config_error(format!("{}: {e}", path.display())));
        }
        let mean = parse_list(
            self.mean
                .as_deref()
                .ok_or_else(|| config_error("a density needs --density or --mean"))?,
        )
        .map_err(|e| config_error(e.to_string()))?;
        let cov = match &self.cov {
            Some(text) => {
                let rows = text
                    .split(';')
                    .map(parse_list)
                    .collect::<anyhow::Result<Vec<_>>>()
                    .map_err(|e| config_error(e.to_string()))?;
                SymMatrix::from_rows(&rows)?
            }
            None => SymMatrix::identity(mean.len()),
        };
        Ok(GaussianDensity::new(mean, cov)?)
    }
}

/// Writes `text` to `path`, or to stdout without a path.
fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| {
            anyhow::Error::from(Error::Io(e)).context(format!("writing {}", p.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".summary.csv");
    PathBuf::from(name)
}

fn report(output: &ExperimentOutput) {
    for s in &output.summaries {
        log::info!(
            "{} vs {}: tau = {:.4}, p = {:.3e} (n = {})",
            s.method,
            s.baseline,
            s.tau,
            s.p_value,
            s.n
        );
    }
}

fn compare(args: ExperimentArgs, preset: Option<DistributionKind>) -> anyhow::Result<()> {
    let config = args.into_config(preset)?;
    let output = run_compare(&config)?;
    report(&output);
    let out = config.out.as_deref();
    match config.format {
        OutputFormat::Json => emit(out, &(serde_json::to_string_pretty(&output)? + "\n")),
        OutputFormat::Csv => {
            let summaries = summaries_csv(&output.summaries);
            emit(out, &records_csv(&output))?;
            match out {
                Some(p) => emit(Some(&summary_path(p)), &summaries),
                None => {
                    eprint!("{summaries}");
                    Ok(())
                }
            }
        }
    }
}

fn sweep(args: ExperimentArgs) -> anyhow::Result<()> {
    let config = args.into_config(None)?;
    let output = run_sweep(&config)?;
    if !output.monotone_odd || !output.monotone_even {
        log::warn!(
            "tau is not monotone in n (odd: {}, even: {})",
            output.monotone_odd,
            output.monotone_even
        );
    }
    let out = config.out.as_deref();
    match config.format {
        OutputFormat::Json => emit(out, &(serde_json::to_string_pretty(&output)? + "\n")),
        OutputFormat::Csv => emit(out, &sweep_csv(&output.rows)),
    }
}

fn gh_grid(args: GridArgs) -> anyhow::Result<()> {
    let density = args.density.load()?;
    match &args.out {
        Some(path) => {
            let rows = run_grid_dump(&density, args.n, args.prune, path)
                .with_context(|| format!("writing {}", path.display()))?;
            log::info!("{rows} nodes written to {}", path.display());
            Ok(())
        }
        None => emit(
            None,
            &ehvi_core::experiment::grid_csv(&density, args.n, args.prune)?,
        ),
    }
}

fn ehvi(args: EhviArgs) -> anyhow::Result<()> {
    let density = args.density.load()?;
    let policy: ReferencePolicy = args.ref_policy.parse()?;
    let front = load_front(&args.front, policy)?;
    let est = match args.method {
        MethodArg::Mc => ehvi_mc(
            &density,
            &front,
            args.mc_samples,
            &mut RngStream::new(args.seed),
        )?,
        MethodArg::Gh => ehvi_gh_with(&density, &front, args.n, args.prune, &GhOptions::default())?,
        MethodArg::Exact => ehvi_exact_2d(&density, &front)?,
        MethodArg::Reference => ehvi_reference(&density, &front, args.cells)?,
    };
    println!("{}", serde_json::to_string(&est)?);
    Ok(())
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(text) = std::env::var("EHVI_QUAD_THREADS") {
        let n: usize = text.trim().parse().map_err(|_| {
            config_error(format!(
                "EHVI_QUAD_THREADS must be a positive integer, got '{text}'"
            ))
        })?;
        if n == 0 {
            return Err(config_error("EHVI_QUAD_THREADS must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| anyhow!(e))?;
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .filter_map(|e| e.downcast_ref::<Error>())
        .any(Error::is_numerical);
    if numerical {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Compare(a) => compare(a, None),
        Command::Correlated(a) => compare(a, Some(DistributionKind::Correlated)),
        Command::Sweep(a) => sweep(a),
        Command::GhGrid(a) => gh_grid(a),
        Command::Ehvi(a) => ehvi(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
