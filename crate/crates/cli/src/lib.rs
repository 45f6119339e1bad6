//! Command-line pipeline: fit a surrogate embedding, project target features
//! onto it, measure the overlap and correlate overlap with attack success.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use xmanifold::embed::{EmbedParams, Init};
use xmanifold::topology::DEFAULT_MAX_POINTS;
use xmanifold::Metric;

use commands::{AnalyzeJob, FitJob, MetricsJob, Outcome, ProjectJob, RecordSource};
use config::{MetricKind, PipelineConfig};
pub use error::CliError;
use report::Format;

#[derive(Debug, Parser)]
#[command(name = "xmanifold", version, about = "Cross-manifold embedding analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for every random stage of the command.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// `key = value` file with [pipeline] and [embed] sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EmbedArgs {
    /// Preset neighbor count and minimum distance (si-score, resisc, fashion-mnist).
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long)]
    pub n_neighbors: Option<usize>,
    #[arg(long)]
    pub min_dist: Option<f64>,
    #[arg(long)]
    pub n_epochs: Option<usize>,
    #[arg(long)]
    pub metric: Option<Metric>,
    #[arg(long)]
    pub init: Option<Init>,
    #[arg(long)]
    pub negative_sample_rate: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Width every feature matrix is zero-padded to before fitting.
    #[arg(long)]
    pub pad_dim: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct MetricArgs {
    /// Comma-separated subset of hausdorff, procrustes, persistence, bottleneck.
    #[arg(long, value_delimiter = ',')]
    pub metrics: Option<Vec<MetricKind>>,
    /// Rips truncation radius in diagonal units; defaults to the normalized Hausdorff distance.
    #[arg(long)]
    pub max_radius: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
    pub max_points: usize,
    /// Also compare H0 diagrams.
    #[arg(long)]
    pub include_h0: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit an embedding of surrogate features; writes model.xmem and coords.fvec.
    Fit {
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        embed: EmbedArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Project target features onto a fitted model; writes projected.fvec.
    Project {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Overlap metrics between two coordinate files.
    Metrics {
        #[arg(long)]
        a: Option<PathBuf>,
        #[arg(long)]
        b: Option<PathBuf>,
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Correlation, PCA and separability of (H, AA) records.
    Analyze {
        #[arg(long, conflicts_with = "table3", required_unless_present = "table3")]
        records: Option<PathBuf>,
        /// Use the bundled Table 3 results.
        #[arg(long)]
        table3: bool,
        #[arg(long, default_value_t = 0.4)]
        threshold: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Figure 4 numbers from the bundled Table 3.
    #[command(name = "repro-fig4")]
    ReproFig4 {
        #[arg(long, default_value_t = 0.4)]
        threshold: f64,
        #[command(flatten)]
        common: Common,
    },
    /// fit, project and metrics in sequence, driven by a config file.
    Run {
        #[arg(long)]
        surrogate: Option<PathBuf>,
        #[arg(long)]
        target: Option<PathBuf>,
        #[command(flatten)]
        embed: EmbedArgs,
        #[command(flatten)]
        metric: MetricArgs,
        #[command(flatten)]
        common: Common,
    },
}

fn base_config(common: &Common) -> Result<PipelineConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.embed.seed = seed;
    }
    if let Some(dir) = &common.output_dir {
        cfg.outputs = dir.clone();
    }
    if let Some(f) = common.format {
        cfg.format = f;
    }
    Ok(cfg)
}

fn apply_embed(cfg: &mut PipelineConfig, a: &EmbedArgs) -> Result<(), CliError> {
    if let Some(name) = &a.dataset {
        let preset =
            EmbedParams::for_dataset(name).ok_or_else(|| CliError::Usage(format!("unknown dataset {name:?}")))?;
        cfg.embed.n_neighbors = preset.n_neighbors;
        cfg.embed.min_dist = preset.min_dist;
    }
    let e = &mut cfg.embed;
    if let Some(v) = a.n_neighbors {
        e.n_neighbors = v;
    }
    if let Some(v) = a.min_dist {
        e.min_dist = v;
    }
    if let Some(v) = a.n_epochs {
        e.n_epochs = v;
    }
    if let Some(v) = a.metric {
        e.metric = v;
    }
    if let Some(v) = a.init {
        e.init = v;
    }
    if let Some(v) = a.negative_sample_rate {
        e.negative_sample_rate = v;
    }
    if let Some(v) = a.learning_rate {
        e.learning_rate = v;
    }
    if let Some(v) = a.pad_dim {
        cfg.pad_dim = v;
    }
    Ok(())
}

fn required(value: Option<PathBuf>, what: &str) -> Result<PathBuf, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing {what} (pass the flag or set it in --config)")))
}

fn metrics_job(cfg: &PipelineConfig, m: &MetricArgs, a: PathBuf, b: PathBuf) -> MetricsJob {
    MetricsJob {
        a,
        b,
        metrics: match &m.metrics {
            Some(list) => {
                let mut list = list.clone();
                list.sort();
                list.dedup();
                list
            }
            None => cfg.metrics.clone(),
        },
        max_radius: m.max_radius,
        max_points: m.max_points,
        seed: cfg.embed.seed,
        include_h0: m.include_h0,
        out_dir: cfg.outputs.clone(),
        format: cfg.format,
    }
}

/// Runs one parsed command line.
pub fn run(cli: Cli) -> Result<Vec<Outcome>, CliError> {
    match cli.command {
        Command::Fit { input, embed, common } => {
            let mut cfg = base_config(&common)?;
            apply_embed(&mut cfg, &embed)?;
            let input = required(input.or(cfg.surrogate_fvec.clone()), "--input")?;
            let job = FitJob { input, pad_dim: cfg.pad_dim, params: cfg.embed, out_dir: cfg.outputs, format: cfg.format };
            Ok(vec![commands::fit(&job)?])
        }
        Command::Project { model, input, common } => {
            let cfg = base_config(&common)?;
            let model = model.unwrap_or_else(|| cfg.outputs.join(commands::MODEL_FILE));
            let input = required(input.or(cfg.target_fvec.clone()), "--input")?;
            let job = ProjectJob { model, input, seed: common.seed, out_dir: cfg.outputs, format: cfg.format };
            Ok(vec![commands::project(&job)?])
        }
        Command::Metrics { a, b, metric, common } => {
            let cfg = base_config(&common)?;
            let a = a.unwrap_or_else(|| cfg.outputs.join(commands::COORDS_FILE));
            let b = b.unwrap_or_else(|| cfg.outputs.join(commands::PROJECTED_FILE));
            Ok(vec![commands::metrics(&metrics_job(&cfg, &metric, a, b))?])
        }
        Command::Analyze { records, table3: _, threshold, common } => {
            let cfg = base_config(&common)?;
            let source = records.map_or(RecordSource::Table3, RecordSource::Csv);
            let job = AnalyzeJob { source, threshold, out_dir: cfg.outputs, format: cfg.format, command: "analyze" };
            Ok(vec![commands::analyze(&job)?])
        }
        Command::ReproFig4 { threshold, common } => {
            let cfg = base_config(&common)?;
            let job = AnalyzeJob {
                source: RecordSource::Table3,
                threshold,
                out_dir: cfg.outputs,
                format: cfg.format,
                command: "repro-fig4",
            };
            Ok(vec![commands::analyze(&job)?])
        }
        Command::Run { surrogate, target, embed, metric, common } => {
            let mut cfg = base_config(&common)?;
            apply_embed(&mut cfg, &embed)?;
            let surrogate = required(surrogate.or(cfg.surrogate_fvec.clone()), "--surrogate")?;
            let target = required(target.or(cfg.target_fvec.clone()), "--target")?;
            let dir = cfg.outputs.clone();
            let fit = commands::fit(&FitJob {
                input: surrogate,
                pad_dim: cfg.pad_dim,
                params: cfg.embed,
                out_dir: dir.clone(),
                format: cfg.format,
            })?;
            let project = commands::project(&ProjectJob {
                model: dir.join(commands::MODEL_FILE),
                input: target,
                seed: common.seed,
                out_dir: dir.clone(),
                format: cfg.format,
            })?;
            let job = metrics_job(&cfg, &metric, dir.join(commands::COORDS_FILE), dir.join(commands::PROJECTED_FILE));
            let metrics = commands::metrics(&job)?;
            Ok(vec![fit, project, metrics])
        }
    }
}

/// Applies `XMANIFOLD_THREADS` to the global thread pool.
pub fn configure_threads() -> Result<(), CliError> {
    match std::env::var("XMANIFOLD_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::Usage(format!("XMANIFOLD_THREADS = {v:?} is not a positive integer")))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
        }
        Err(_) => Ok(()),
    }
}
