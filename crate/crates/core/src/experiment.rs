//! Comparison studies: random predictive densities against a fixed front,
//! EHVI per method, and Kendall rank correlations against a baseline.
//!
//! Trial `i` draws its density (and then its Monte Carlo samples) from the
//! stream seeded with `seed ^ i`, so trials can run in any order or in
//! parallel and still produce identical records. The front itself is drawn
//! from `seed ^ u64::MAX`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ehvi::{ehvi_exact_2d, ehvi_mc, ehvi_on_grid, ehvi_reference, EhviEstimate, Method};
use crate::error::{Error, Result};
use crate::fronts::{
    generate_front, load_front, FrontShape, FrontSpec, ReferencePolicy, DEFAULT_FRONT_SIZE,
};
use crate::gaussians::{
    default_wishart_dof, random_correlated_with_dof, random_independent, GaussianDensity,
    BOX_MARGIN, VARIANCE_FLOOR,
};
use crate::hypervolume::ParetoFront;
use crate::numerics::RngStream;
use crate::quadrature::{gh_grid_with, GhOptions};
use crate::stats::kendall_tau;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DistributionKind {
    Independent,
    Correlated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// CSV front file; overrides `shape`, `m` and `front_size` when set.
    pub front: Option<PathBuf>,
    pub shape: FrontShape,
    pub m: usize,
    pub front_size: usize,
    pub ref_policy: ReferencePolicy,
    pub kind: DistributionKind,
    pub trials: usize,
    pub mc_samples: usize,
    pub gh_nodes: Vec<usize>,
    pub prune: f64,
    pub seed: u64,
    /// Cells per dimension for the reference quadrature; by default 200 for
    /// two objectives and 50 for three.
    pub reference_cells: Option<usize>,
    /// Wishart degrees of freedom for correlated densities (default `m + 2`).
    pub wishart_dof: Option<usize>,
    /// Record wall-clock time per method. Timings make outputs differ
    /// between runs.
    pub timing: bool,
    /// Output destination. Not serialized, so the same run written to two
    /// places produces identical bytes.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            front: None,
            shape: FrontShape::ConcaveSphere,
            m: 2,
            front_size: DEFAULT_FRONT_SIZE,
            ref_policy: ReferencePolicy::BoxUpper,
            kind: DistributionKind::Independent,
            trials: 100,
            mc_samples: 10_000,
            gh_nodes: (3..=15).collect(),
            prune: 0.2,
            seed: 0,
            reference_cells: None,
            wishart_dof: None,
            timing: false,
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.trials < 2 {
            return bad(format!("trials must be at least 2, got {}", self.trials));
        }
        if !(0.0..1.0).contains(&self.prune) {
            return bad(format!("prune rate must lie in [0, 1), got {}", self.prune));
        }
        if self.gh_nodes.contains(&0) {
            return bad("node counts must be at least 1".into());
        }
        if self.mc_samples == 0 {
            return bad("mc samples must be positive".into());
        }
        if self.front.is_none() {
            if self.m < 2 {
                return bad(format!("generated fronts need m >= 2, got {}", self.m));
            }
            if self.front_size == 0 {
                return bad("front size must be positive".into());
            }
        }
        if let Some(cells) = self.reference_cells {
            if cells < crate::ehvi::MIN_REFERENCE_CELLS {
                return bad(format!("reference cells must be at least 50, got {cells}"));
            }
        }
        if let Some(dof) = self.wishart_dof {
            if self.front.is_none() && dof < self.m {
                return bad(format!("wishart dof {dof} is below m = {}", self.m));
            }
        }
        Ok(())
    }

    pub fn build_front(&self) -> Result<ParetoFront> {
        match &self.front {
            Some(path) => load_front(path, self.ref_policy),
            None => {
                let spec = FrontSpec::new(self.shape, self.m, self.front_size);
                let mut rng = RngStream::for_task(self.seed, u64::MAX);
                generate_front(&spec, self.ref_policy, &mut rng)
            }
        }
    }
}

fn reference_cells_for(m: usize, configured: Option<usize>) -> usize {
    configured.unwrap_or(if m <= 2 { 200 } else { 50 })
}

/// Label of the method every other method is ranked against.
pub fn baseline_label(kind: DistributionKind, m: usize) -> &'static str {
    match (kind, m) {
        (DistributionKind::Independent, 2) => "exact",
        (DistributionKind::Independent, 1 | 3) => "reference",
        _ => "mc",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodValue {
    pub label: String,
    pub method: Method,
    pub value: f64,
    pub evaluations: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ns: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub trial: usize,
    pub density: GaussianDensity,
    pub values: Vec<MethodValue>,
}

impl ExperimentRecord {
    pub fn value(&self, label: &str) -> Option<f64> {
        self.values
            .iter()
            .find(|v| v.label == label)
            .map(|v| v.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauSummary {
    pub method: String,
    pub baseline: String,
    pub tau: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Settings the results depend on that are not part of the user config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub baseline: String,
    pub front_points: usize,
    pub reference_point: Vec<f64>,
    pub box_margin: f64,
    pub variance_floor: f64,
    pub wishart_dof: Option<usize>,
    pub wishart_scaling: Option<String>,
    pub reference_cells: Option<usize>,
    pub gh_weights_renormalized: bool,
    pub rng: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub metadata: RunMetadata,
    pub records: Vec<ExperimentRecord>,
    pub summaries: Vec<TauSummary>,
}

impl ExperimentOutput {
    pub fn summary(&self, method: &str) -> Option<&TauSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    /// Values of one method across trials, in trial order.
    pub fn column(&self, label: &str) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.value(label)).collect()
    }
}

struct Plan {
    front: ParetoFront,
    kind: DistributionKind,
    dof: usize,
    mc_samples: usize,
    gh_nodes: Vec<usize>,
    prune: f64,
    reference_cells: usize,
    timing: bool,
    seed: u64,
}

fn timed<T>(enabled: bool, f: impl FnOnce() -> Result<T>) -> Result<(T, Option<u64>)> {
    let start = Instant::now();
    let out = f()?;
    let ns = enabled.then(|| start.elapsed().as_nanos() as u64);
    Ok((out, ns))
}

fn push(values: &mut Vec<MethodValue>, label: String, (est, ns): (EhviEstimate, Option<u64>)) {
    values.push(MethodValue {
        label,
        method: est.method,
        value: est.value,
        evaluations: est.evaluations,
        mc_std_error: est.mc_std_error,
        wall_ns: ns,
    });
}

/// Reference quadrature, doubling the resolution (at most twice) until the
/// refinement check passes.
pub fn reference_with_escalation(
    g: &GaussianDensity,
    front: &ParetoFront,
    cells: usize,
) -> Result<EhviEstimate> {
    let mut cells = cells;
    let mut attempts = 0;
    loop {
        match ehvi_reference(g, front, cells) {
            Err(Error::ResolutionTooLow { .. }) if attempts < 2 => {
                log::debug!("reference quadrature unresolved at {cells} cells, doubling");
                cells *= 2;
                attempts += 1;
            }
            other => return other,
        }
    }
}

fn run_trial(plan: &Plan, trial: usize) -> Result<ExperimentRecord> {
    let front = &plan.front;
    let m = front.dim();
    let mut rng = RngStream::for_task(plan.seed, trial as u64);
    let density = match plan.kind {
        DistributionKind::Independent => random_independent(front.points(), &mut rng)?,
        DistributionKind::Correlated => {
            random_correlated_with_dof(front.points(), &mut rng, plan.dof)?
        }
    };

    let mut values = Vec::new();
    let options = GhOptions::default();
    push(
        &mut values,
        "mc".into(),
        timed(plan.timing, || {
            ehvi_mc(&density, front, plan.mc_samples, &mut rng)
        })?,
    );
    for &n in &plan.gh_nodes {
        let est = timed(plan.timing, || {
            let grid = gh_grid_with(&density, n, plan.prune, &options)?;
            ehvi_on_grid(&grid, front)
        })?;
        push(&mut values, format!("gh{n}"), est);
    }
    match plan.kind {
        DistributionKind::Independent => {
            if m == 2 {
                let est = timed(plan.timing, || ehvi_exact_2d(&density, front))?;
                push(&mut values, "exact".into(), est);
            } else if m <= 3 {
                let est = timed(plan.timing, || {
                    reference_with_escalation(&density, front, plan.reference_cells)
                })?;
                push(&mut values, "reference".into(), est);
            }
        }
        DistributionKind::Correlated => {
            let diag = density.diag_only();
            if m == 2 {
                let est = timed(plan.timing, || ehvi_exact_2d(&diag, front))?;
                push(&mut values, "diag_exact".into(), est);
            } else if m <= 3 {
                let est = timed(plan.timing, || {
                    reference_with_escalation(&diag, front, plan.reference_cells)
                })?;
                push(&mut values, "diag_reference".into(), est);
            }
        }
    }
    Ok(ExperimentRecord {
        trial,
        density,
        values,
    })
}

/// Runs every trial and ranks each method against the baseline.
pub fn run_compare(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let front = config.build_front()?;
    let m = front.dim();
    let dof = config.wishart_dof.unwrap_or_else(|| default_wishart_dof(m));
    if config.kind == DistributionKind::Correlated && dof < m {
        return Err(Error::InvalidConfig(format!(
            "wishart dof {dof} is below m = {m}"
        )));
    }
    let reference_cells = reference_cells_for(m, config.reference_cells);
    let plan = Plan {
        front,
        kind: config.kind,
        dof,
        mc_samples: config.mc_samples,
        gh_nodes: config.gh_nodes.clone(),
        prune: config.prune,
        reference_cells,
        timing: config.timing,
        seed: config.seed,
    };

    let records: Vec<ExperimentRecord> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(&plan, i))
        .collect::<Result<_>>()?;

    let baseline = baseline_label(config.kind, m);
    let base_values: Vec<f64> = records.iter().filter_map(|r| r.value(baseline)).collect();
    let labels: Vec<String> = records[0]
        .values
        .iter()
        .map(|v| v.label.clone())
        .filter(|l| l != baseline)
        .collect();
    let mut summaries = Vec::with_capacity(labels.len());
    for label in labels {
        let column: Vec<f64> = records.iter().filter_map(|r| r.value(&label)).collect();
        let k = kendall_tau(&column, &base_values)?;
        summaries.push(TauSummary {
            method: label,
            baseline: baseline.to_string(),
            tau: k.tau,
            p_value: k.p_value,
            n: k.n,
        });
    }

    let uses_reference = records[0]
        .values
        .iter()
        .any(|v| v.method == Method::Reference);
    let correlated = config.kind == DistributionKind::Correlated;
    let metadata = RunMetadata {
        baseline: baseline.to_string(),
        front_points: plan.front.len(),
        reference_point: plan.front.reference().to_vec(),
        box_margin: BOX_MARGIN,
        variance_floor: VARIANCE_FLOOR,
        wishart_dof: correlated.then_some(dof),
        wishart_scaling: correlated.then(|| "(1/dof) D W D, D = diag(sqrt(u - l))".to_string()),
        reference_cells: uses_reference.then_some(reference_cells),
        gh_weights_renormalized: false,
        rng: "splitmix64 counter stream, trial i seeded with seed ^ i".into(),
    };
    Ok(ExperimentOutput {
        config: config.clone(),
        metadata,
        records,
        summaries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub odd: bool,
    pub nodes: u128,
    pub tau: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub compare: ExperimentOutput,
    pub rows: Vec<SweepRow>,
    /// Tau never drops by more than [`SWEEP_SLACK`] along the odd node counts.
    pub monotone_odd: bool,
    pub monotone_even: bool,
}

pub const SWEEP_SLACK: f64 = 0.02;

/// Rank correlation of `GH_n` with the baseline for every configured `n`.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutput> {
    if config.gh_nodes.len() < 2 {
        return Err(Error::InvalidConfig(
            "a sweep needs at least two node counts".into(),
        ));
    }
    let compare = run_compare(config)?;
    let m = compare.records[0].density.dim();
    let mut rows: Vec<SweepRow> = config
        .gh_nodes
        .iter()
        .map(|&n| {
            let s = compare
                .summary(&format!("gh{n}"))
                .expect("every node count has a summary");
            SweepRow {
                n,
                odd: n % 2 == 1,
                nodes: crate::quadrature::node_count(n, m, config.prune),
                tau: s.tau,
                p_value: s.p_value,
            }
        })
        .collect();
    rows.sort_by_key(|r| r.n);
    rows.dedup_by_key(|r| r.n);
    let monotone = |odd: bool| {
        let taus: Vec<f64> = rows
            .iter()
            .filter(|r| r.odd == odd)
            .map(|r| r.tau)
            .collect();
        taus.windows(2).all(|w| w[1] + SWEEP_SLACK >= w[0])
    };
    let monotone_odd = monotone(true);
    let monotone_even = monotone(false);
    Ok(SweepOutput {
        compare,
        rows,
        monotone_odd,
        monotone_even,
    })
}

fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// One record per row: trial, mean, row-major covariance, then for every
/// method its value and evaluation count (plus `_se` for Monte Carlo and
/// `_ns` when timing is on).
pub fn records_csv(output: &ExperimentOutput) -> String {
    let mut out = String::new();
    let Some(first) = output.records.first() else {
        return out;
    };
    let m = first.density.dim();
    let mut header: Vec<String> = vec!["trial".into()];
    header.extend((1..=m).map(|i| format!("mean_{i}")));
    for i in 1..=m {
        header.extend((1..=m).map(|j| format!("cov_{i}{j}")));
    }
    for v in &first.values {
        header.push(v.label.clone());
        header.push(format!("{}_evals", v.label));
        if v.mc_std_error.is_some() {
            header.push(format!("{}_se", v.label));
        }
        if v.wall_ns.is_some() {
            header.push(format!("{}_ns", v.label));
        }
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for rec in &output.records {
        let mut row: Vec<String> = vec![rec.trial.to_string()];
        row.extend(rec.density.mean().iter().map(|v| fmt_f64(*v)));
        row.extend(
            rec.density
                .covariance()
                .as_matrix()
                .as_slice()
                .iter()
                .map(|v| fmt_f64(*v)),
        );
        for v in &rec.values {
            row.push(fmt_f64(v.value));
            row.push(v.evaluations.to_string());
            if let Some(se) = v.mc_std_error {
                row.push(fmt_f64(se));
            }
            if let Some(ns) = v.wall_ns {
                row.push(ns.to_string());
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn summaries_csv(summaries: &[TauSummary]) -> String {
    let mut out = String::from("method,baseline,tau,p_value,n\n");
    for s in summaries {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.method,
            s.baseline,
            fmt_f64(s.tau),
            fmt_f64(s.p_value),
            s.n
        );
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("n,parity,nodes,tau,p_value\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            if r.odd { "odd" } else { "even" },
            r.nodes,
            fmt_f64(r.tau),
            fmt_f64(r.p_value)
        );
    }
    out
}

/// Gauss-Hermite nodes and weights as CSV (`x1..xm,weight`).
pub fn grid_csv(density: &GaussianDensity, n: usize, r: f64) -> Result<String> {
    let grid = gh_grid_with(density, n, r, &GhOptions::default())?;
    let m = grid.dim();
    let mut out = String::new();
    let header: Vec<String> = (1..=m)
        .map(|i| format!("x{i}"))
        .chain(["weight".into()])
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for (x, w) in grid.iter() {
        let row: Vec<String> = x
            .iter()
            .chain(std::iter::once(&w))
            .map(|v| fmt_f64(*v))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Writes the grid CSV to `out`; nothing is written if building the grid
/// fails.
pub fn run_grid_dump(density: &GaussianDensity, n: usize, r: f64, out: &Path) -> Result<usize> {
    let text = grid_csv(density, n, r)?;
    std::fs::write(out, &text)?;
    Ok(text.lines().count() - 1)
}
