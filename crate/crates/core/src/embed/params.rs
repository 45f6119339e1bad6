use crate::error::{Error, Result};
use crate::knn::Metric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Init {
    /// Eigenvectors 2 and 3 of the normalized graph Laplacian.
    #[default]
    Spectral,
    /// Uniform in `[-10, 10]²` from the seed.
    SeededRandom,
}

impl Init {
    pub fn code(self) -> u8 {
        match self {
            Init::Spectral => 0,
            Init::SeededRandom => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Init::Spectral),
            1 => Some(Init::SeededRandom),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Init::Spectral => "spectral",
            Init::SeededRandom => "seeded_random",
        }
    }
}

impl std::str::FromStr for Init {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "spectral" => Ok(Init::Spectral),
            "seeded_random" | "random" => Ok(Init::SeededRandom),
            other => Err(Error::InvalidParameter(format!("unknown init {other:?}"))),
        }
    }
}

/// Hyperparameters of the embedding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedParams {
    pub n_neighbors: usize,
    pub min_dist: f64,
    pub n_epochs: usize,
    pub metric: Metric,
    pub seed: u64,
    pub init: Init,
    pub negative_sample_rate: usize,
    pub learning_rate: f64,
}

impl Default for EmbedParams {
    fn default() -> Self {
        EmbedParams {
            n_neighbors: 15,
            min_dist: 0.1,
            n_epochs: 200,
            metric: Metric::Euclidean,
            seed: 42,
            init: Init::Spectral,
            negative_sample_rate: 5,
            learning_rate: 1.0,
        }
    }
}

impl EmbedParams {
    /// Neighbor count and minimum distance used for the benchmark datasets.
    ///
    /// Recognizes `si-score`, `resisc` and `fashion-mnist` (case and
    /// punctuation insensitive); other fields keep their defaults.
    pub fn for_dataset(name: &str) -> Option<Self> {
        let key: String = name.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_lowercase();
        let (n_neighbors, min_dist) = match key.as_str() {
            "siscore" => (20, 0.25),
            "resisc" | "resisc45" | "nwpuresisc45" => (50, 0.1),
            "fashionmnist" => (500, 0.1),
            _ => return None,
        };
        Some(EmbedParams { n_neighbors, min_dist, ..Default::default() })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_neighbors < 2 {
            return Err(Error::InvalidParameter(format!("n_neighbors = {} must be >= 2", self.n_neighbors)));
        }
        if !(self.min_dist > 0.0 && self.min_dist <= 1.0) {
            return Err(Error::InvalidParameter(format!("min_dist = {} must lie in (0, 1]", self.min_dist)));
        }
        if self.n_epochs == 0 {
            return Err(Error::InvalidParameter("n_epochs must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!("learning_rate = {} must be positive", self.learning_rate)));
        }
        Ok(())
    }

    /// Optimization epochs used when projecting new points.
    pub fn transform_epochs(&self) -> usize {
        (self.n_epochs / 3).max(30)
    }
}
