//! Flat `key = value` configuration with `[pipeline]` and `[embed]` sections.
//!
//! ```text
//! [pipeline]
//! surrogate_fvec = data/resnet.fvec
//! target_fvec = data/mobilenet.fvec
//! pad_dim = 2048
//! outputs = out
//! metrics = hausdorff, procrustes, persistence, bottleneck
//! seed = 42
//! format = json
//!
//! [embed]
//! dataset = si-score
//! n_neighbors = 20
//! min_dist = 0.25
//! n_epochs = 200
//! metric = euclidean
//! init = spectral
//! negative_sample_rate = 5
//! learning_rate = 1.0
//! ```
//!
//! `dataset` selects the per-dataset neighbor count and minimum distance;
//! explicit keys after it still win. Command-line flags override everything.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;
use xmanifold::embed::{EmbedParams, Init};
use xmanifold::{Metric, PaddingPolicy};

use crate::error::CliError;
use crate::report::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MetricKind {
    Hausdorff,
    Procrustes,
    Persistence,
    Bottleneck,
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hausdorff" => Ok(Self::Hausdorff),
            "procrustes" => Ok(Self::Procrustes),
            "persistence" => Ok(Self::Persistence),
            "bottleneck" => Ok(Self::Bottleneck),
            other => Err(format!("unknown metric {other:?}")),
        }
    }
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Hausdorff => "hausdorff",
            Self::Procrustes => "procrustes",
            Self::Persistence => "persistence",
            Self::Bottleneck => "bottleneck",
        }
    }
}

pub fn parse_metric_list(s: &str) -> Result<Vec<MetricKind>, String> {
    let mut out: Vec<MetricKind> =
        s.split(',').filter(|p| !p.trim().is_empty()).map(MetricKind::from_str).collect::<Result<_, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub surrogate_fvec: Option<PathBuf>,
    pub target_fvec: Option<PathBuf>,
    pub pad_dim: usize,
    pub embed: EmbedParams,
    pub outputs: PathBuf,
    pub metrics: Vec<MetricKind>,
    pub format: Format,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            surrogate_fvec: None,
            target_fvec: None,
            pad_dim: PaddingPolicy::default().target_dim,
            embed: EmbedParams::default(),
            outputs: PathBuf::from("."),
            metrics: vec![MetricKind::Hausdorff],
            format: Format::Json,
        }
    }
}

fn parse<T: FromStr>(section: &str, key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e| CliError::Config(format!("[{section}] {key} = {value:?}: {e}")))
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::parse_str(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse_str(text: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let mut cfg = Self::default();
        for (section, props) in ini.iter() {
            let section = section.unwrap_or("");
            match section {
                "pipeline" => {
                    for (key, value) in props.iter() {
                        match key {
                            "surrogate_fvec" => cfg.surrogate_fvec = Some(PathBuf::from(value.trim())),
                            "target_fvec" => cfg.target_fvec = Some(PathBuf::from(value.trim())),
                            "pad_dim" => cfg.pad_dim = parse(section, key, value)?,
                            "outputs" => cfg.outputs = PathBuf::from(value.trim()),
                            "metrics" => {
                                cfg.metrics = parse_metric_list(value).map_err(CliError::Config)?;
                            }
                            "seed" => cfg.embed.seed = parse(section, key, value)?,
                            "format" => cfg.format = parse(section, key, value)?,
                            other => return Err(CliError::Config(format!("unknown key [pipeline] {other}"))),
                        }
                    }
                }
                "embed" => {
                    if let Some(name) = props.get("dataset") {
                        let preset = EmbedParams::for_dataset(name)
                            .ok_or_else(|| CliError::Config(format!("unknown dataset {name:?}")))?;
                        cfg.embed.n_neighbors = preset.n_neighbors;
                        cfg.embed.min_dist = preset.min_dist;
                    }
                    for (key, value) in props.iter() {
                        let e = &mut cfg.embed;
                        match key {
                            "dataset" => {}
                            "n_neighbors" => e.n_neighbors = parse(section, key, value)?,
                            "min_dist" => e.min_dist = parse(section, key, value)?,
                            "n_epochs" => e.n_epochs = parse(section, key, value)?,
                            "metric" => e.metric = parse::<Metric>(section, key, value)?,
                            "init" => e.init = parse::<Init>(section, key, value)?,
                            "negative_sample_rate" => e.negative_sample_rate = parse(section, key, value)?,
                            "learning_rate" => e.learning_rate = parse(section, key, value)?,
                            "seed" => e.seed = parse(section, key, value)?,
                            other => return Err(CliError::Config(format!("unknown key [embed] {other}"))),
                        }
                    }
                }
                "" if props.is_empty() => {}
                other => return Err(CliError::Config(format!("unknown section [{other}]"))),
            }
        }
        Ok(cfg)
    }
}
