use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ssfmlfs_core::dataset::DataFormat;
use ssfmlfs_core::experiment::{parse_list, run_experiment, run_random_baseline, run_sweep, RunConfig};
use ssfmlfs_core::federation::StdAggregation;
use ssfmlfs_core::{Error, ErrorKind};

#[derive(Debug, Parser)]
#[command(name = "ssfmlfs", version, about = "Federated multi-label feature selection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the protocol, select features and evaluate them.
    Run {
        #[command(flatten)]
        common: Common,
        /// Print the JSON report instead of the text summary.
        #[arg(long)]
        json: bool,
    },
    /// Repeat `run` for several labeled fractions.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated labeled fractions, e.g. 0.1,0.2,0.3,0.4.
        #[arg(long, default_value = "0.1,0.2,0.3,0.4")]
        fractions: String,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate random feature subsets of size `--select`.
    Baseline {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Key = value run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// ARFF or CSV file.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// `arff` or `csv`; guessed from the extension by default.
    #[arg(long, value_parser = parse_format)]
    format: Option<DataFormat>,
    /// Trailing label count, label XML file, or comma-separated label names.
    #[arg(long)]
    labels: Option<String>,
    /// Number of unlabeled clients (at least 2).
    #[arg(long)]
    clients: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Radius divisor: similarity radius is std / lambda, lambda in [0.4, 2].
    #[arg(long)]
    lambda: Option<f64>,
    /// Label-space neighbors used for the dependency degree.
    #[arg(long)]
    knn_k: Option<usize>,
    /// PageRank damping factor in (0, 1).
    #[arg(long)]
    zeta: Option<f64>,
    /// Number of features to keep; defaults to the preset count for known datasets.
    #[arg(long)]
    select: Option<usize>,
    /// Fraction of training rows held labeled by the server.
    #[arg(long)]
    labeled: Option<f64>,
    /// Fraction of rows held out for evaluation.
    #[arg(long)]
    test_frac: Option<f64>,
    /// Dirichlet concentration of the non-IID client split.
    #[arg(long)]
    alpha: Option<f64>,
    /// `pooled-exact` or `weighted-mean`.
    #[arg(long, value_parser = parse_std_agg)]
    std_agg: Option<StdAggregation>,
    /// Comma-separated client distances.
    #[arg(long)]
    distances: Option<String>,
    /// Random subsets evaluated as a control.
    #[arg(long)]
    repeats: Option<usize>,
    /// Single-threaded, bit-reproducible execution.
    #[arg(long)]
    sequential: bool,
    /// Directory for report, ranking and partition artifacts.
    #[arg(long, env = "SSFMLFS_OUT_DIR")]
    out: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<DataFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_std_agg(s: &str) -> Result<StdAggregation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Common {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident => $target:ident),* $(,)?) => {
                $(if let Some(v) = &self.$field { cfg.$target = v.clone().into(); })*
            };
        }
        apply!(
            dataset => dataset,
            format => format,
            labels => labels,
            clients => clients,
            seed => seed,
            lambda => lambda,
            knn_k => knn_k,
            zeta => zeta,
            select => select,
            labeled => labeled_fraction,
            test_frac => test_fraction,
            alpha => alpha,
            std_agg => std_agg,
            repeats => repeats,
            out => out,
        );
        if let Some(d) = &self.distances {
            cfg.distances = Some(parse_list("distances", d)?);
        }
        if self.sequential {
            cfg.sequential = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Error> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run { common, json } => {
            let cfg = common.config()?;
            let report = run_experiment(&cfg.load_dataset()?, &cfg)?.report;
            if json {
                println!("{}", report.to_json()?);
            } else {
                print!("{}", report.to_text());
            }
        }
        Command::Sweep {
            common,
            fractions,
            json,
        } => {
            let cfg = common.config()?;
            let fractions = parse_list("fractions", &fractions)?;
            let sweep = run_sweep(&cfg.load_dataset()?, &cfg, &fractions)?;
            if json {
                println!("{}", to_json(&sweep)?);
            } else {
                print!("{}", sweep.to_text());
            }
        }
        Command::Baseline { common, json } => {
            let cfg = common.config()?;
            let ds = cfg.load_dataset()?;
            let m = cfg.resolve_select(&ds)?;
            let summary = run_random_baseline(&ds, &cfg, m, cfg.repeats.max(1), cfg.seed)?;
            if json {
                println!("{}", to_json(&summary)?);
            } else {
                println!("random subsets: m = {}, repeats = {}, seed = {}", m, summary.repeats, summary.seed);
                for (name, v) in [
                    ("AP ↑", summary.average_precision),
                    ("CV ↓", summary.coverage),
                    ("RL ↓", summary.ranking_loss),
                ] {
                    println!("{name}  {:.4} ± {:.4}", v.mean, v.std);
                }
            }
        }
    }
    Ok(())
}

fn error_record(kind: ErrorKind, message: &str) -> String {
    serde_json::json!({ "error": { "kind": kind.as_str(), "message": message } }).to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            eprintln!("{}", error_record(ErrorKind::Config, message.trim()));
            return ExitCode::from(ErrorKind::Config.exit_code() as u8);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e.kind();
            eprintln!("{}", error_record(kind, &e.to_string()));
            ExitCode::from(kind.exit_code() as u8)
        }
    }
}
