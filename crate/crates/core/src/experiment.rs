//! End-to-end runs: load, partition, run the protocol, evaluate, report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{
    load_dataset, normalize_minmax, partition_noniid, DataFormat, LabelSpec, MultiLabelDataset, PartitionParams,
    PartitionPlan,
};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate_subset, Metrics, DEFAULT_MLKNN_K, DEFAULT_SMOOTH};
use crate::exec::Execution;
use crate::federation::{
    communication_cost, raw_data_cost, run_protocol, CostComparison, ProtocolConfig, ProtocolOutcome, Round,
    StdAggregation, DEFAULT_BITS_PER_VALUE,
};
use crate::graph::DEFAULT_ZETA;
use crate::presets::preset;

/// Largest |ΔAP| against the published reference still reported as "close".
pub const REFERENCE_AP_TOLERANCE: f64 = 0.08;

/// Every knob of a run. Parsed from `key = value` lines or set from flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub format: Option<DataFormat>,
    /// Trailing label count, `.xml` label file, or comma-separated label names.
    pub labels: Option<String>,
    pub clients: usize,
    pub seed: u64,
    pub lambda: f64,
    /// Neighbor-set size for the dependency degree.
    pub knn_k: usize,
    pub mlknn_k: usize,
    pub smooth: f64,
    pub zeta: f64,
    /// Features to keep; defaults to the dataset preset when the name matches.
    pub select: Option<usize>,
    pub labeled_fraction: f64,
    pub test_fraction: f64,
    pub alpha: f64,
    pub std_agg: StdAggregation,
    pub distances: Option<Vec<f64>>,
    pub bits_per_value: u32,
    /// Random feature subsets evaluated as a control; 0 disables the control.
    pub repeats: usize,
    pub sequential: bool,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PartitionParams::default();
        Self {
            dataset: None,
            format: None,
            labels: None,
            clients: p.clients,
            seed: p.seed,
            lambda: 1.2,
            knn_k: 10,
            mlknn_k: DEFAULT_MLKNN_K,
            smooth: DEFAULT_SMOOTH,
            zeta: DEFAULT_ZETA,
            select: None,
            labeled_fraction: p.labeled_fraction,
            test_fraction: p.test_fraction,
            alpha: p.skew_alpha,
            std_agg: StdAggregation::PooledExact,
            distances: None,
            bits_per_value: DEFAULT_BITS_PER_VALUE,
            repeats: 20,
            sequential: false,
            out: None,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::config(format!("invalid value `{value}` for `{key}`"))),
    }
}

/// Comma-separated list of reals.
pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

/// `6` → trailing count, `*.xml` → label file, anything else → names.
pub fn parse_label_spec(s: &str) -> LabelSpec {
    let s = s.trim();
    if let Ok(k) = s.parse() {
        LabelSpec::Trailing(k)
    } else if s.to_ascii_lowercase().ends_with(".xml") {
        LabelSpec::Xml(PathBuf::from(s))
    } else {
        LabelSpec::Names(s.split(',').map(|n| n.trim().to_string()).filter(|n| !n.is_empty()).collect())
    }
}

impl RunConfig {
    /// Applies one setting; keys match the long command-line flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "dataset" => self.dataset = Some(PathBuf::from(value)),
            "format" => self.format = Some(value.parse()?),
            "labels" => self.labels = Some(value.to_string()),
            "clients" | "m" => self.clients = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "lambda" => self.lambda = parse_value(key, value)?,
            "knn_k" | "k" => self.knn_k = parse_value(key, value)?,
            "mlknn_k" => self.mlknn_k = parse_value(key, value)?,
            "smooth" => self.smooth = parse_value(key, value)?,
            "zeta" => self.zeta = parse_value(key, value)?,
            "select" | "m_selected" => self.select = Some(parse_value(key, value)?),
            "labeled" | "labeled_fraction" => self.labeled_fraction = parse_value(key, value)?,
            "test_frac" | "test_fraction" => self.test_fraction = parse_value(key, value)?,
            "alpha" | "skew_alpha" => self.alpha = parse_value(key, value)?,
            "std_agg" => self.std_agg = value.parse()?,
            "distances" => self.distances = Some(parse_list(key, value)?),
            "bits" | "bits_per_value" => self.bits_per_value = parse_value(key, value)?,
            "repeats" => self.repeats = parse_value(key, value)?,
            "sequential" => self.sequential = parse_bool(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(Error::config(format!("unknown setting `{other}`"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines on top of the defaults; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: no + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set(key, value).map_err(|e| Error::Parse {
                line: no + 1,
                message: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse { line, message } => Error::config(format!("{}:{line}: {message}", path.display())),
            other => other,
        })
    }

    pub fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    pub fn partition_params(&self) -> PartitionParams {
        PartitionParams {
            clients: self.clients,
            skew_alpha: self.alpha,
            labeled_fraction: self.labeled_fraction,
            test_fraction: self.test_fraction,
            seed: self.seed,
        }
    }

    pub fn protocol_config(&self, select: usize) -> ProtocolConfig {
        ProtocolConfig {
            lambda: self.lambda,
            knn_k: self.knn_k,
            zeta: self.zeta,
            std_agg: self.std_agg,
            select: Some(select),
            distances: self.distances.clone(),
            bits_per_value: self.bits_per_value,
            exec: self.execution(),
            ..ProtocolConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.clients < 2 {
            return Err(Error::config(format!("at least two clients are required, got {}", self.clients)));
        }
        if self.select == Some(0) {
            return Err(Error::config("--select must be at least 1"));
        }
        for (name, f) in [("labeled", self.labeled_fraction), ("test-frac", self.test_fraction)] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::config(format!("--{name} must lie in (0, 1), got {f}")));
            }
        }
        if self.knn_k == 0 || self.mlknn_k == 0 {
            return Err(Error::config("neighbor counts must be at least 1"));
        }
        if self.bits_per_value == 0 {
            return Err(Error::config("bits per value must be positive"));
        }
        if let Some(d) = &self.distances {
            if d.len() != self.clients {
                return Err(Error::config(format!(
                    "{} distances given for {} clients",
                    d.len(),
                    self.clients
                )));
            }
        }
        Ok(())
    }

    /// Explicit label spec, else a sidecar `.xml` next to the data file, else
    /// the trailing label count of a known dataset.
    pub fn label_spec(&self, dataset: &Path) -> Result<LabelSpec> {
        if let Some(s) = &self.labels {
            return Ok(parse_label_spec(s));
        }
        let sidecar = dataset.with_extension("xml");
        if sidecar.is_file() {
            return Ok(LabelSpec::Xml(sidecar));
        }
        let stem = dataset.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        preset(stem)
            .map(|p| LabelSpec::Trailing(p.labels))
            .ok_or_else(|| Error::config(format!("no label spec for {}; pass --labels", dataset.display())))
    }

    pub fn load_dataset(&self) -> Result<MultiLabelDataset> {
        let path = self
            .dataset
            .as_deref()
            .ok_or_else(|| Error::config("no dataset given; pass --dataset"))?;
        let format = match self.format {
            Some(f) => f,
            None => DataFormat::from_path(path)
                .ok_or_else(|| Error::config(format!("cannot infer format of {}; pass --format", path.display())))?,
        };
        load_dataset(path, format, &self.label_spec(path)?)
    }

    /// `select`, or the preset size for a recognized dataset.
    pub fn resolve_select(&self, ds: &MultiLabelDataset) -> Result<usize> {
        let m = match self.select {
            Some(m) => m,
            None => preset(&ds.source_id)
                .filter(|p| p.features == ds.n_features())
                .map(|p| p.selected)
                .ok_or_else(|| Error::config("number of features to keep is unknown; pass --select"))?,
        };
        if m == 0 || m > ds.n_features() {
            return Err(Error::config(format!(
                "--select must be in 1..={}, got {m}",
                ds.n_features()
            )));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Mean and sample standard deviation (zero for a single value).
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSummary {
    pub m: usize,
    pub repeats: usize,
    pub seed: u64,
    pub average_precision: MeanStd,
    pub coverage: MeanStd,
    pub ranking_loss: MeanStd,
    pub subsets: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub source_id: String,
    pub instances: usize,
    pub features: usize,
    pub labels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSummary {
    pub clients: usize,
    pub shard_sizes: Vec<usize>,
    pub server_labeled: usize,
    pub test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSummary {
    pub total_bytes: usize,
    pub bytes_per_round: Vec<(Round, usize)>,
    pub bits_per_value: u32,
    /// Distance-weighted protocol bits.
    pub protocol_cost: f64,
    /// Shipping every raw shard with all features.
    pub raw_cost_before: f64,
    /// Shipping every raw shard with only the selected features.
    pub raw_cost_after: f64,
    pub comparison: CostComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCheck {
    pub dataset: String,
    pub reference_ap: f64,
    pub measured_ap: f64,
    pub delta_ap: f64,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub dataset: DatasetSummary,
    pub partition: PartitionSummary,
    pub ranking: Vec<usize>,
    pub scores: Vec<f64>,
    pub pagerank_iterations: usize,
    pub pagerank_converged: bool,
    pub dependency: Vec<f64>,
    pub selected: Vec<usize>,
    pub metrics: Metrics,
    pub random_control: Option<RandomSummary>,
    pub cost: CostSummary,
    pub reference: Option<ReferenceCheck>,
    pub rank_tie_rule: String,
    pub manifest_path: Option<PathBuf>,
    pub elapsed_ms: f64,
}

impl RunReport {
    /// Copy with timing zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            elapsed_ms: 0.0,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let d = &self.dataset;
        let p = &self.partition;
        let _ = writeln!(s, "dataset    {} ({} × {}, {} labels)", d.source_id, d.instances, d.features, d.labels);
        let _ = writeln!(
            s,
            "partition  {} clients {:?}, {} labeled, {} test, seed {}",
            p.clients, p.shard_sizes, p.server_labeled, p.test, self.config.seed
        );
        let _ = writeln!(s, "selected   {} features: {:?}", self.selected.len(), self.selected);
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<10} {:>14} {:>20}", "metric", "selected", "random (mean±std)");
        let m = &self.metrics;
        let rows = [
            ("AP", m.average_precision, self.random_control.as_ref().map(|r| r.average_precision)),
            ("CV", m.coverage, self.random_control.as_ref().map(|r| r.coverage)),
            ("RL", m.ranking_loss, self.random_control.as_ref().map(|r| r.ranking_loss)),
        ];
        for (name, v, r) in rows {
            let random = r.map_or_else(|| "-".to_string(), |r| format!("{:.4}±{:.4}", r.mean, r.std));
            let _ = writeln!(s, "{:<10} {:>14} {:>20}", format!("{name} {}", v.direction.arrow()), format!("{:.4}", v.value), random);
        }
        let _ = writeln!(
            s,
            "skipped    AP {} / CV {} / RL {} test instances",
            m.average_precision.skipped, m.coverage.skipped, m.ranking_loss.skipped
        );
        if let Some(r) = &self.reference {
            let _ = writeln!(
                s,
                "reference  AP {:.4} vs {:.4} measured (Δ {:+.4}, {})",
                r.reference_ap,
                r.measured_ap,
                r.delta_ap,
                if r.within_tolerance { "within 0.08" } else { "outside 0.08" }
            );
        }
        let c = &self.cost;
        let _ = writeln!(s);
        let _ = writeln!(s, "protocol   {} bytes, cost {:.0} bit·distance", c.total_bytes, c.protocol_cost);
        for (round, b) in &c.bytes_per_round {
            let _ = writeln!(s, "  {round:<20} {b} bytes");
        }
        let _ = writeln!(s, "raw data   before {:.0}, after {:.0}", c.raw_cost_before, c.raw_cost_after);
        let (a, b) = c.comparison.ratio();
        let _ = writeln!(
            s,
            "shipment   {}  →  {}  (ratio {a}/{b})",
            c.comparison.before_formula, c.comparison.after_formula
        );
        let _ = writeln!(s, "ties       {}", self.rank_tie_rule);
        let _ = writeln!(s, "time       {:.1} ms", self.elapsed_ms);
        s
    }
}

/// A finished run with its intermediate results.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub report: RunReport,
    pub plan: PartitionPlan,
    pub outcome: ProtocolOutcome,
}

/// Training (server and client rows, with labels) and test sets, both scaled
/// with the training range.
pub fn evaluation_split(ds: &MultiLabelDataset, plan: &PartitionPlan) -> Result<(MultiLabelDataset, MultiLabelDataset)> {
    let train = ds.subset(&plan.training_indices())?;
    let test = ds.subset(&plan.test_set)?;
    let (mins, maxs) = train.column_ranges();
    Ok((normalize_minmax(&train, &mins, &maxs)?, normalize_minmax(&test, &mins, &maxs)?))
}

/// Evaluates `repeats` uniformly random `m`-feature subsets.
pub fn random_subsets(
    train: &MultiLabelDataset,
    test: &MultiLabelDataset,
    m: usize,
    repeats: usize,
    seed: u64,
    cfg: &RunConfig,
) -> Result<RandomSummary> {
    let d = train.n_features();
    if m == 0 || m > d {
        return Err(Error::config(format!("subset size must be in 1..={d}, got {m}")));
    }
    if repeats == 0 {
        return Err(Error::config("repeats must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let subsets: Vec<Vec<usize>> = (0..repeats)
        .map(|_| {
            let mut s = index::sample(&mut rng, d, m).into_vec();
            s.sort_unstable();
            s
        })
        .collect();
    let metrics = subsets
        .iter()
        .map(|s| evaluate_subset(train, test, s, cfg.mlknn_k, cfg.smooth, cfg.execution()))
        .collect::<Result<Vec<_>>>()?;
    let summary = |f: fn(&Metrics) -> f64| MeanStd::of(&metrics.iter().map(f).collect::<Vec<_>>());
    Ok(RandomSummary {
        m,
        repeats,
        seed,
        average_precision: summary(|m| m.average_precision.value),
        coverage: summary(|m| m.coverage.value),
        ranking_loss: summary(|m| m.ranking_loss.value),
        subsets,
    })
}

/// Random-subset control on the split `cfg` describes.
pub fn run_random_baseline(
    ds: &MultiLabelDataset,
    cfg: &RunConfig,
    m: usize,
    repeats: usize,
    seed: u64,
) -> Result<RandomSummary> {
    cfg.validate()?;
    let plan = partition_noniid(ds, &cfg.partition_params())?;
    let (train, test) = evaluation_split(ds, &plan)?;
    random_subsets(&train, &test, m, repeats, seed, cfg)
}

/// Runs the pipeline on an already loaded dataset. Writes artifacts when
/// `cfg.out` is set.
pub fn run_experiment(ds: &MultiLabelDataset, cfg: &RunConfig) -> Result<RunArtifacts> {
    let start = Instant::now();
    cfg.validate()?;
    let m = cfg.resolve_select(ds)?;
    let plan = partition_noniid(ds, &cfg.partition_params())?;
    let outcome = run_protocol(&plan, ds, &cfg.protocol_config(m))?;
    let selected = outcome.selected.clone().expect("selection requested");

    let (train, test) = evaluation_split(ds, &plan)?;
    let exec = cfg.execution();
    let metrics = evaluate_subset(&train, &test, &selected, cfg.mlknn_k, cfg.smooth, exec)?;
    let random_control = if cfg.repeats > 0 {
        Some(random_subsets(&train, &test, m, cfg.repeats, cfg.seed, cfg)?)
    } else {
        None
    };

    let ledger = &outcome.ledger;
    let d = ds.n_features();
    let cost = CostSummary {
        total_bytes: ledger.total_bytes(),
        bytes_per_round: ledger.bytes_per_round(),
        bits_per_value: cfg.bits_per_value,
        protocol_cost: communication_cost(ledger),
        raw_cost_before: raw_data_cost(&plan, d, &ledger.distances, cfg.bits_per_value)?,
        raw_cost_after: raw_data_cost(&plan, m, &ledger.distances, cfg.bits_per_value)?,
        comparison: CostComparison::new(ds.n_instances(), d, m, &ledger.distances, cfg.bits_per_value)?,
    };
    let reference = preset(&ds.source_id)
        .filter(|p| p.features == d && p.instances == ds.n_instances())
        .map(|p| {
            let measured = metrics.average_precision.value;
            let delta = measured - p.reference.average_precision;
            ReferenceCheck {
                dataset: p.name.to_string(),
                reference_ap: p.reference.average_precision,
                measured_ap: measured,
                delta_ap: delta,
                within_tolerance: delta.abs() <= REFERENCE_AP_TOLERANCE,
            }
        });

    let mut report = RunReport {
        config: cfg.clone(),
        dataset: DatasetSummary {
            source_id: ds.source_id.clone(),
            instances: ds.n_instances(),
            features: d,
            labels: ds.n_labels(),
        },
        partition: PartitionSummary {
            clients: plan.clients(),
            shard_sizes: plan.client_shards.iter().map(Vec::len).collect(),
            server_labeled: plan.server_labeled.len(),
            test: plan.test_set.len(),
        },
        ranking: outcome.ranking.order.clone(),
        scores: outcome.ranking.scores.clone(),
        pagerank_iterations: outcome.ranking.iterations,
        pagerank_converged: outcome.ranking.converged,
        dependency: outcome.dependency.values.clone(),
        selected,
        metrics,
        random_control,
        cost,
        reference,
        rank_tie_rule: "equal scores ranked by ascending index (features and labels)".to_string(),
        manifest_path: None,
        elapsed_ms: 0.0,
    };
    if let Some(dir) = &cfg.out {
        report.manifest_path = Some(dir.join("partition.json"));
    }
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let artifacts = RunArtifacts { report, plan, outcome };
    if let Some(dir) = &cfg.out {
        write_artifacts(dir, &artifacts)?;
    }
    Ok(artifacts)
}

/// Loads the configured dataset and runs the pipeline.
pub fn run(cfg: &RunConfig) -> Result<RunArtifacts> {
    let ds = cfg.load_dataset()?;
    run_experiment(&ds, cfg)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `report.json`, `report.txt`, `ranking.tsv`, `dependency.tsv` and the
/// `partition.json` manifest into `dir`.
pub fn write_artifacts(dir: &Path, a: &RunArtifacts) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join("report.json"), (a.report.to_json()? + "\n").as_bytes())?;
    write_file(&dir.join("report.txt"), a.report.to_text().as_bytes())?;
    let mut ranking = Vec::new();
    a.outcome.ranking.write_table(&mut ranking).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join("ranking.tsv"), &ranking)?;
    let mut dependency = Vec::new();
    a.outcome
        .dependency
        .write_table(&mut dependency)
        .map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join("dependency.tsv"), &dependency)?;
    a.plan.save(&dir.join("partition.json"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub fractions: Vec<f64>,
    pub reports: Vec<RunReport>,
}

impl SweepReport {
    /// CSV with one row per labeled fraction.
    pub fn plot_data(&self) -> String {
        let mut s = String::from("labeled_fraction,ap,cv,rl,random_ap,random_cv,random_rl\n");
        for (f, r) in self.fractions.iter().zip(&self.reports) {
            let m = &r.metrics;
            let rc = r.random_control.as_ref();
            let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
            let _ = writeln!(
                s,
                "{f},{},{},{},{},{},{}",
                m.average_precision.value,
                m.coverage.value,
                m.ranking_loss.value,
                opt(rc.map(|r| r.average_precision.mean)),
                opt(rc.map(|r| r.coverage.mean)),
                opt(rc.map(|r| r.ranking_loss.mean)),
            );
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{:<10} {:>8} {:>8} {:>8}\n", "labeled", "AP ↑", "CV ↓", "RL ↓");
        for (f, r) in self.fractions.iter().zip(&self.reports) {
            let m = &r.metrics;
            let _ = writeln!(
                s,
                "{:<10} {:>8.4} {:>8.4} {:>8.4}",
                f, m.average_precision.value, m.coverage.value, m.ranking_loss.value
            );
        }
        s
    }
}

/// One run per labeled fraction; each run's artifacts go to `out/labeled_<f>`.
pub fn run_sweep(ds: &MultiLabelDataset, cfg: &RunConfig, fractions: &[f64]) -> Result<SweepReport> {
    if fractions.is_empty() {
        return Err(Error::config("the list of labeled fractions is empty"));
    }
    if let Some(f) = fractions.iter().find(|f| !(**f > 0.0 && **f < 1.0)) {
        return Err(Error::config(format!("labeled fraction must lie in (0, 1), got {f}")));
    }
    let reports = fractions
        .iter()
        .map(|&f| {
            let run_cfg = RunConfig {
                labeled_fraction: f,
                out: cfg.out.as_ref().map(|o| o.join(format!("labeled_{f}"))),
                ..cfg.clone()
            };
            run_experiment(ds, &run_cfg).map(|a| a.report)
        })
        .collect::<Result<Vec<_>>>()?;
    let sweep = SweepReport {
        fractions: fractions.to_vec(),
        reports,
    };
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_file(&dir.join("sweep.csv"), sweep.plot_data().as_bytes())?;
        write_file(&dir.join("sweep.txt"), sweep.to_text().as_bytes())?;
        write_file(
            &dir.join("sweep.json"),
            (serde_json::to_string_pretty(&sweep)? + "\n").as_bytes(),
        )?;
    }
    Ok(sweep)
}
