//! Command-line front end: `synth`, `select`, `cluster`, `classify`, `eval`, `oracle`.
//!
//! Datasets are CSV with a header row `f0,...,f{D-1}[,label]`; a trailing
//! `label` column is detected from the header. Label files hold one integer
//! per line. Every JSON output carries the parsed command under `config`.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::{src_classify, LabeledExemplars};
use crate::cluster::{esc_with_exemplars, EscParams};
use crate::dataset::{
    normalize_columns, read_csv, synth_union_of_subspaces, write_csv, CsvOptions, DataMatrix,
    SubspaceSpec,
};
use crate::ffs::{ffs_lazy, ffs_naive, select_random, ExemplarSet, FfsOptions};
use crate::geometry::{
    covering_radius, inradius, l1_min_exact, minkowski_functional, sup_l1_cost, symmetrize,
    SymmetricHull, DEFAULT_RESOLUTION_S1,
};
use crate::lasso::{Dictionary, LassoProblem, SolverOptions, SparseCode};
use crate::metrics::{
    class_counts, clustering_accuracy, clustering_fscore, imbalance, subspace_preserving_rate,
    MetricsReport,
};
use crate::rng::seeded;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "exemplars",
    version,
    about = "Exemplar selection, subspace clustering and classification"
)]
pub struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Sample points from a union of random subspaces.
    Synth(SynthArgs),
    /// Select exemplars.
    Select(SelectArgs),
    /// Cluster a dataset through its exemplars.
    Cluster(ClusterArgs),
    /// Classify a dataset from labeled exemplars.
    Classify(ClassifyArgs),
    /// Compare two label files.
    Eval(EvalArgs),
    /// Run a brute-force geometric audit.
    Oracle(OracleArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    /// Ambient dimension.
    #[arg(long = "D", value_name = "D")]
    pub ambient_dim: usize,
    /// Subspace dimensions, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    /// Points per subspace, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub counts: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Standard deviation of additive Gaussian noise before normalization.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Output CSV (default: stdout).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Farthest-first search with lazy bound updates.
    Ffs,
    /// Farthest-first search evaluating every point each round.
    FfsNaive,
    /// Uniform random subset.
    Random,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct SelectionArgs {
    /// Number of exemplars.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 100.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Solver tolerance on duality gap and subgradient violation.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Method::Ffs)]
    pub method: Method,
    /// Start the search from this index instead of a seeded random one.
    #[arg(long)]
    pub first_index: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct SelectArgs {
    /// Dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub sel: SelectionArgs,
    /// Output JSON (default: stdout).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ClusterArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub sel: SelectionArgs,
    /// Use the exemplars from a `select` output instead of selecting.
    #[arg(long)]
    pub exemplars: Option<PathBuf>,
    /// Neighbors per point in the affinity graph.
    #[arg(long, default_value_t = 3)]
    pub t: usize,
    /// Number of clusters (default: number of distinct labels in the dataset).
    #[arg(long)]
    pub n_clusters: Option<usize>,
    /// Predicted labels, one per line.
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
    /// Metrics JSON (default: stdout).
    #[arg(long)]
    pub metrics_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    /// Dataset CSV; its label column supplies exemplar labels unless `--exemplar-labels` is given.
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub sel: SelectionArgs,
    /// Use the exemplars from a `select` output instead of selecting.
    #[arg(long)]
    pub exemplars: Option<PathBuf>,
    /// JSON object `{"index": class, ...}` of labeled exemplars.
    #[arg(long)]
    pub exemplar_labels: Option<PathBuf>,
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
    #[arg(long)]
    pub metrics_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    /// Ground-truth labels, one per line.
    #[arg(long)]
    pub truth: PathBuf,
    /// Predicted labels, one per line.
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// Gauge of the symmetric hull against exact ℓ1 minimization.
    Gauge,
    /// Sup of the exact ℓ1 cost vs inverse inradius vs inverse cosine of the covering radius on S¹.
    Chain,
    /// Exact ℓ1 minimization against the LASSO objective at lambda = 1e6.
    LassoLimit,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub check: Check,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Ambient dimension for `gauge` and `lasso-limit`.
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Angular grid resolution for `chain`.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION_S1)]
    pub resolution: f64,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be positive");
        }
        // Fails only if a pool already exists, in which case it is left as is.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let config = serde_json::to_value(&cli.command)?;
    match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Select(a) => cmd_select(a, config),
        Command::Cluster(a) => cmd_cluster(a, config),
        Command::Classify(a) => cmd_classify(a, config),
        Command::Eval(a) => cmd_eval(a, config),
        Command::Oracle(a) => cmd_oracle(a, config),
    }
}

fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn emit_json(path: Option<&Path>, v: &Value) -> anyhow::Result<()> {
    emit(path, &(serde_json::to_string_pretty(v)? + "\n"))
}

/// Loads a dataset CSV, detecting a header and a trailing `label` column, and
/// normalizes its columns.
pub fn load_dataset(path: &Path) -> anyhow::Result<DataMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    let fields: Vec<&str> = first.split(',').map(str::trim).collect();
    let header = fields.iter().any(|f| f.parse::<f64>().is_err());
    let labels = header
        && fields
            .last()
            .is_some_and(|f| f.eq_ignore_ascii_case("label"));
    let m = read_csv(text.as_bytes(), CsvOptions { header, labels })
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(normalize_columns(&m)?)
}

pub fn read_labels(path: &Path) -> anyhow::Result<Vec<usize>> {
    let f = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        let s = line.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        out.push(
            s.parse()
                .with_context(|| format!("{}:{}: bad label {s:?}", path.display(), n + 1))?,
        );
    }
    Ok(out)
}

pub fn format_labels(labels: &[usize]) -> String {
    labels.iter().map(|l| format!("{l}\n")).collect()
}

fn cmd_synth(a: &SynthArgs) -> anyhow::Result<()> {
    let spec = SubspaceSpec {
        ambient_dim: a.ambient_dim,
        dims: a.dims.clone(),
        counts: a.counts.clone(),
        noise_sigma: a.noise,
        seed: a.seed,
    };
    let m = synth_union_of_subspaces(&spec)?;
    let mut buf = Vec::new();
    write_csv(
        &m,
        &mut buf,
        CsvOptions {
            header: true,
            labels: true,
        },
    )?;
    emit(a.out.as_deref(), std::str::from_utf8(&buf)?)
}

fn run_selection(data: &DataMatrix, s: &SelectionArgs) -> anyhow::Result<ExemplarSet> {
    let Some(k) = s.k else {
        bail!("--k is required unless exemplars are supplied");
    };
    let opts = FfsOptions {
        solver: SolverOptions::with_tol(s.tol),
        first_index: s.first_index,
        warm_start: true,
    };
    Ok(match s.method {
        Method::Ffs => ffs_lazy(data, s.lambda, k, s.seed, &opts)?,
        Method::FfsNaive => ffs_naive(data, s.lambda, k, s.seed, &opts)?,
        Method::Random => select_random(data, k, s.seed)?,
    })
}

fn selection_json(sel: &ExemplarSet, config: Value) -> anyhow::Result<Value> {
    let mut v = serde_json::to_value(sel)?;
    v["config"] = config;
    Ok(v)
}

fn cmd_select(a: &SelectArgs, config: Value) -> anyhow::Result<()> {
    let data = load_dataset(&a.data)?;
    let sel = run_selection(&data, &a.sel)?;
    emit_json(a.out.as_deref(), &selection_json(&sel, config)?)
}

fn exemplars_from(path: &Path) -> anyhow::Result<Vec<usize>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text)?;
    let idx = v
        .get("indices")
        .context("exemplar file has no \"indices\" array")?;
    Ok(serde_json::from_value(idx.clone())?)
}

fn resolve_exemplars(
    data: &DataMatrix,
    file: Option<&Path>,
    s: &SelectionArgs,
) -> anyhow::Result<(Vec<usize>, Option<ExemplarSet>)> {
    match file {
        Some(p) => Ok((exemplars_from(p)?, None)),
        None => {
            let sel = run_selection(data, s)?;
            Ok((sel.indices.clone(), Some(sel)))
        }
    }
}

fn sp_rate(codes: &[SparseCode], exemplars: &[usize], labels: &[usize]) -> anyhow::Result<f64> {
    let coeffs: Vec<Vec<f64>> = codes.iter().map(|c| c.coeffs.clone()).collect();
    let ex_labels: Vec<usize> = exemplars.iter().map(|&i| labels[i]).collect();
    Ok(subspace_preserving_rate(&coeffs, &ex_labels, labels)?.rate)
}

fn report(
    data: &DataMatrix,
    pred: &[usize],
    exemplars: &[usize],
    codes: &[SparseCode],
) -> anyhow::Result<MetricsReport> {
    let Some(truth) = data.labels() else {
        return Ok(MetricsReport {
            accuracy: None,
            fscore: None,
            imbalance: None,
            sp_rate: None,
        });
    };
    let n_classes = truth.iter().max().map_or(0, |m| m + 1);
    Ok(MetricsReport {
        accuracy: Some(clustering_accuracy(truth, pred)?),
        fscore: Some(clustering_fscore(truth, pred)?),
        imbalance: Some(imbalance(&class_counts(exemplars, truth, n_classes))?),
        sp_rate: Some(sp_rate(codes, exemplars, truth)?),
    })
}

fn metrics_json(m: &MetricsReport, config: Value, extra: Value) -> anyhow::Result<Value> {
    let mut v = serde_json::to_value(m)?;
    v["config"] = config;
    if let Value::Object(extra) = extra {
        for (k, x) in extra {
            v[k] = x;
        }
    }
    Ok(v)
}

fn cmd_cluster(a: &ClusterArgs, config: Value) -> anyhow::Result<()> {
    let data = load_dataset(&a.data)?;
    let n_clusters = match (a.n_clusters, data.labels()) {
        (Some(n), _) => n,
        (None, Some(l)) => l.iter().collect::<std::collections::BTreeSet<_>>().len(),
        (None, None) => bail!("--n-clusters is required for unlabeled data"),
    };
    let (exemplars, sel) = resolve_exemplars(&data, a.exemplars.as_deref(), &a.sel)?;
    let params = EscParams {
        lambda: a.sel.lambda,
        t: a.t,
        n_clusters,
        seed: a.sel.seed,
        solver: SolverOptions::with_tol(a.sel.tol),
    };
    let res = esc_with_exemplars(&data, &exemplars, &params)?;
    for &j in &res.zero_codes {
        eprintln!("warning: point {j} has a zero code; assigned via its most correlated exemplar");
    }
    if let Some(p) = &a.labels_out {
        emit(Some(p), &format_labels(&res.assignment.labels))?;
    }
    let m = report(&data, &res.assignment.labels, &exemplars, &res.codes)?;
    let extra = json!({
        "exemplars": exemplars,
        "zero_codes": res.zero_codes,
        "isolated": res.assignment.isolated,
        "selection_evals": sel.map(|s| s.total_evals()),
    });
    emit_json(a.metrics_out.as_deref(), &metrics_json(&m, config, extra)?)
}

fn cmd_classify(a: &ClassifyArgs, config: Value) -> anyhow::Result<()> {
    let data = load_dataset(&a.data)?;
    let ex = match &a.exemplar_labels {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            LabeledExemplars::from_json(&text, None)?
        }
        None => {
            let (idx, _) = resolve_exemplars(&data, a.exemplars.as_deref(), &a.sel)?;
            LabeledExemplars::from_dataset(&data, &idx)?
        }
    };
    let out = src_classify(
        &data,
        &ex,
        a.sel.lambda,
        &SolverOptions::with_tol(a.sel.tol),
    )?;
    if let Some(p) = &a.labels_out {
        emit(Some(p), &format_labels(&out.assignment.labels))?;
    }
    let m = report(&data, &out.assignment.labels, &ex.indices, &out.codes)?;
    let extra = json!({ "exemplars": ex.indices });
    emit_json(a.metrics_out.as_deref(), &metrics_json(&m, config, extra)?)
}

fn cmd_eval(a: &EvalArgs, config: Value) -> anyhow::Result<()> {
    let truth = read_labels(&a.truth)?;
    let pred = read_labels(&a.pred)?;
    let v = json!({
        "accuracy": clustering_accuracy(&truth, &pred)?,
        "fscore": clustering_fscore(&truth, &pred)?,
        "imbalance": Value::Null,
        "sp_rate": Value::Null,
        "config": config,
    });
    emit_json(a.out.as_deref(), &v)
}

fn random_unit_columns(rng: &mut crate::rng::Rng, d: usize, m: usize) -> DMatrix<f64> {
    let mut a = DMatrix::from_fn(d, m, |_, _| StandardNormal.sample(rng));
    for mut c in a.column_iter_mut() {
        let n = c.norm();
        c /= n;
    }
    a
}

fn cmd_oracle(a: &OracleArgs, config: Value) -> anyhow::Result<()> {
    let mut rng = seeded(a.seed);
    let mut worst = 0.0f64;
    let mut skipped = 0usize;
    for _ in 0..a.trials {
        match a.check {
            Check::Gauge | Check::LassoLimit => {
                let m = a.dim + rand::Rng::random_range(&mut rng, 0..=a.dim + 3);
                let x0 = random_unit_columns(&mut rng, a.dim, m);
                let x = random_unit_columns(&mut rng, a.dim, 1);
                let lp = l1_min_exact(&x0, x.column(0))?.value;
                if !lp.is_finite() {
                    skipped += 1;
                    continue;
                }
                let other = if a.check == Check::Gauge {
                    minkowski_functional(&SymmetricHull::new(&x0)?, x.column(0))?
                } else {
                    let dict = Dictionary::new(x0)?;
                    LassoProblem::new(&dict, x.column(0), 1e6)?
                        .solve(&SolverOptions::default())?
                        .objective
                };
                worst = worst.max((lp - other).abs());
            }
            Check::Chain => {
                let m = rand::Rng::random_range(&mut rng, 2..=8usize);
                let x0 = random_unit_columns(&mut rng, 2, m);
                let f = sup_l1_cost(&x0, a.resolution)?;
                let r = inradius(&SymmetricHull::new(&x0)?, a.resolution)?;
                let g = covering_radius(&symmetrize(&x0), a.resolution)?;
                let vals = [f, 1.0 / r, 1.0 / g.cos()];
                for i in 0..3 {
                    for j in 0..i {
                        worst = worst.max((vals[i] - vals[j]).abs());
                    }
                }
            }
        }
    }
    let v = json!({
        "check": a.check,
        "trials": a.trials,
        "skipped_infeasible": skipped,
        "max_deviation": worst,
        "config": config,
    });
    emit_json(a.out.as_deref(), &v)
}
