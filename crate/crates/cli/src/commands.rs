use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use xmanifold::data::{read_fvec, write_fvec};
use xmanifold::embed::{self, read_model, write_model, EmbedParams};
use xmanifold::geometry::{hausdorff, procrustes};
use xmanifold::stats::{
    correlation_report, linear_separability_check, load_table3, read_records, write_fig4_points, AnalysisRecord,
    Flag,
};
use xmanifold::topology::{
    bottleneck, rips_persistence, subsample_indices, write_diagrams_csv, PersistenceDiagram, RipsParams,
};
use xmanifold::{zero_pad, Embedding2D, FeatureMatrix, PaddingPolicy};

use crate::config::MetricKind;
use crate::error::CliError;
use crate::report::{ensure_dir, output_error, write_report, Format, SPEC_VERSION};

pub const MODEL_FILE: &str = "model.xmem";
pub const COORDS_FILE: &str = "coords.fvec";
pub const PROJECTED_FILE: &str = "projected.fvec";
pub const FIG4_FILE: &str = "fig4_points.csv";

/// Eigenvalues printed under the published Figure 4, kept for side-by-side reporting.
pub const REFERENCE_EIGENVALUES: [f64; 2] = [7.13, 0.00];

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub files: Vec<PathBuf>,
    /// Human-readable lines for stdout.
    pub summary: Vec<String>,
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn params_json(p: &EmbedParams) -> Value {
    json!({
        "n_neighbors": p.n_neighbors,
        "min_dist": p.min_dist,
        "n_epochs": p.n_epochs,
        "metric": p.metric.name(),
        "seed": p.seed,
        "init": p.init.name(),
        "negative_sample_rate": p.negative_sample_rate,
        "learning_rate": p.learning_rate,
    })
}

fn coords_matrix(e: &Embedding2D<f64>, labels: Option<&[u32]>) -> Result<FeatureMatrix, CliError> {
    let m = e.to_feature_matrix()?;
    let tag = m.source_tag().to_string();
    let values = m.values().to_vec();
    Ok(FeatureMatrix::with_labels(m.rows(), 2, values, labels.map(<[u32]>::to_vec))?.with_source_tag(tag))
}

fn write_coords(path: &Path, e: &Embedding2D<f64>, labels: Option<&[u32]>) -> Result<(), CliError> {
    write_fvec(&coords_matrix(e, labels)?, path)?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct FitJob {
    pub input: PathBuf,
    pub pad_dim: usize,
    pub params: EmbedParams,
    pub out_dir: PathBuf,
    pub format: Format,
}

pub fn fit(job: &FitJob) -> Result<Outcome, CliError> {
    let raw = read_fvec(&job.input)?;
    let data = zero_pad(&raw, PaddingPolicy::to_dim(job.pad_dim))?;
    let model = embed::fit(&data, job.params)?;
    ensure_dir(&job.out_dir)?;
    let model_path = job.out_dir.join(MODEL_FILE);
    let coords_path = job.out_dir.join(COORDS_FILE);
    write_model(&model, &model_path)?;
    write_coords(&coords_path, model.coords(), raw.labels())?;
    let (a, b) = model.curve();
    let report = json!({
        "spec_version": SPEC_VERSION,
        "command": "fit",
        "input": path_str(&job.input),
        "rows": raw.rows(),
        "input_dim": raw.cols(),
        "pad_dim": job.pad_dim,
        "params": params_json(&job.params),
        "init_used": model.init_used().name(),
        "curve": {"a": a, "b": b},
        "outputs": {"model": MODEL_FILE, "coords": COORDS_FILE},
    });
    let report_path = write_report(&job.out_dir, "fit", &report, job.format)?;
    let p = &job.params;
    Ok(Outcome {
        summary: vec![
            format!("seed {}", p.seed),
            format!(
                "n_neighbors {} min_dist {} n_epochs {} metric {} init {} (used {})",
                p.n_neighbors,
                p.min_dist,
                p.n_epochs,
                p.metric.name(),
                p.init.name(),
                model.init_used().name()
            ),
            format!("fitted {} rows of width {} (padded to {})", raw.rows(), raw.cols(), job.pad_dim),
        ],
        report,
        files: vec![model_path, coords_path, report_path],
    })
}

#[derive(Debug, Clone)]
pub struct ProjectJob {
    pub model: PathBuf,
    pub input: PathBuf,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub format: Format,
}

pub fn project(job: &ProjectJob) -> Result<Outcome, CliError> {
    let model = read_model(&job.model)?;
    let raw = read_fvec(&job.input)?;
    let data = zero_pad(&raw, PaddingPolicy::to_dim(model.dim()))?;
    let seed = job.seed.unwrap_or(model.params().seed);
    let proj = model.transform_seeded(&data, seed)?;
    ensure_dir(&job.out_dir)?;
    let coords_path = job.out_dir.join(PROJECTED_FILE);
    write_coords(&coords_path, &proj.embedding, raw.labels())?;
    let report = json!({
        "spec_version": SPEC_VERSION,
        "command": "project",
        "model": path_str(&job.model),
        "input": path_str(&job.input),
        "rows": raw.rows(),
        "input_dim": raw.cols(),
        "model_dim": model.dim(),
        "seed": seed,
        "flagged_count": proj.flagged.len(),
        "flagged": proj.flagged,
        "outputs": {"coords": PROJECTED_FILE},
    });
    let report_path = write_report(&job.out_dir, "project", &report, job.format)?;
    Ok(Outcome {
        summary: vec![
            format!("seed {seed}"),
            format!("projected {} rows onto a {}-row model", raw.rows(), model.training_data().rows()),
            format!("flagged {}", proj.flagged.len()),
        ],
        report,
        files: vec![coords_path, report_path],
    })
}

#[derive(Debug, Clone)]
pub struct MetricsJob {
    pub a: PathBuf,
    pub b: PathBuf,
    pub metrics: Vec<MetricKind>,
    /// Overrides the default truncation radius (the normalized Hausdorff distance).
    pub max_radius: Option<f64>,
    pub max_points: usize,
    pub seed: u64,
    pub include_h0: bool,
    pub out_dir: PathBuf,
    pub format: Format,
}

fn load_coords(path: &Path) -> Result<Embedding2D<f64>, CliError> {
    Ok(Embedding2D::from_feature_matrix(&read_fvec(path)?)?)
}

fn diagram_json(d: &PersistenceDiagram<f64>) -> Value {
    json!({
        "dim": d.dim,
        "pairs": d.pairs.iter().map(|&(b, e)| [b, e]).collect::<Vec<_>>(),
        "essential": d.essential(),
        "essential_births": d.essential_births,
    })
}

pub fn metrics(job: &MetricsJob) -> Result<Outcome, CliError> {
    let ea = load_coords(&job.a)?;
    let eb = load_coords(&job.b)?;
    let h = hausdorff(&ea, &eb)?;
    let mut report = json!({
        "spec_version": SPEC_VERSION,
        "command": "metrics",
        "a": path_str(&job.a),
        "b": path_str(&job.b),
        "rows_a": ea.len(),
        "rows_b": eb.len(),
        "metrics": job.metrics.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "hausdorff": h,
    });
    let mut summary = vec![format!("normalized Hausdorff {:.6} (symmetric {:.6})", h.normalized, h.symmetric)];
    let mut files = Vec::new();
    ensure_dir(&job.out_dir)?;

    if job.metrics.contains(&MetricKind::Procrustes) {
        let p = procrustes(&ea, &eb)?;
        summary.push(format!("procrustes disparity {:.6e}", p.disparity));
        report["procrustes"] = serde_json::to_value(p).expect("serializable");
    }

    let want_bottleneck = job.metrics.contains(&MetricKind::Bottleneck);
    if want_bottleneck || job.metrics.contains(&MetricKind::Persistence) {
        // Work in units of the union bounding-box diagonal so that the
        // truncation radius and the normalized Hausdorff distance agree.
        let (scale, offset) = if h.diagonal > 0.0 {
            let lo = ea.points().iter().chain(eb.points()).fold([f64::INFINITY; 2], |m, p| {
                [m[0].min(p[0]), m[1].min(p[1])]
            });
            (1.0 / h.diagonal, [-lo[0] / h.diagonal, -lo[1] / h.diagonal])
        } else {
            (1.0, [0.0, 0.0])
        };
        let (radius, source) = match job.max_radius {
            Some(r) => (r, "flag"),
            None if h.normalized > 0.0 => (h.normalized, "normalized_hausdorff"),
            None => (1.0, "fallback_full_diagonal"),
        };
        let params = RipsParams::new(radius).with_max_points(job.max_points).with_seed(job.seed);
        let mut sides = serde_json::Map::new();
        let mut diagrams = Vec::new();
        for (name, e, file) in [("a", &ea, "diagrams_a.csv"), ("b", &eb, "diagrams_b.csv")] {
            let scaled = e.map_affine(scale, offset);
            let (d0, d1) = rips_persistence(&scaled, &params)?;
            let used = subsample_indices(e.len(), job.max_points, job.seed).map_or(e.len(), |v| v.len());
            let path = job.out_dir.join(file);
            let mut buf = Vec::new();
            write_diagrams_csv(&mut buf, &[&d0, &d1])?;
            std::fs::write(&path, buf).map_err(|err| output_error(&path, err))?;
            files.push(path);
            if used < e.len() {
                summary.push(format!("persistence on {name}: subsampled {} -> {used} points", e.len()));
            }
            sides.insert(
                name.to_owned(),
                json!({
                    "points_in": e.len(),
                    "points_used": used,
                    "subsampled": used < e.len(),
                    "h0": diagram_json(&d0),
                    "h1": diagram_json(&d1),
                    "diagram_csv": file,
                }),
            );
            diagrams.push((d0, d1));
        }
        report["persistence"] = json!({
            "coordinate_scale": "union_bbox_diagonal",
            "max_radius": radius,
            "max_radius_source": source,
            "max_points": job.max_points,
            "subsample_seed": job.seed,
            "a": sides["a"],
            "b": sides["b"],
        });
        if want_bottleneck {
            let b1 = bottleneck(&diagrams[0].1, &diagrams[1].1)?;
            summary.push(format!("bottleneck H1 {b1:.6}"));
            let mut b = json!({"h1": b1});
            if job.include_h0 {
                b["h0"] = json!(bottleneck(&diagrams[0].0, &diagrams[1].0)?);
            }
            report["bottleneck"] = b;
        }
    }
    files.insert(0, write_report(&job.out_dir, "metrics", &report, job.format)?);
    Ok(Outcome { report, files, summary })
}

#[derive(Debug, Clone)]
pub enum RecordSource {
    Table3,
    Csv(PathBuf),
}

#[derive(Debug, Clone)]
pub struct AnalyzeJob {
    pub source: RecordSource,
    pub threshold: f64,
    pub out_dir: PathBuf,
    pub format: Format,
    /// Report stem and `command` field.
    pub command: &'static str,
}

pub fn analyze(job: &AnalyzeJob) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let (records, source): (Vec<AnalysisRecord>, String) = match &job.source {
        RecordSource::Table3 => (load_table3()?, "table3".into()),
        RecordSource::Csv(p) => (read_records(p)?, path_str(p)),
    };
    let rep = correlation_report(&records)?;
    let sep = linear_separability_check(&records, job.threshold);
    let count = |f: Flag| records.iter().filter(|r| r.has_flag(f)).count();
    let report = json!({
        "spec_version": SPEC_VERSION,
        "command": job.command,
        "source": source,
        "n_records": records.len(),
        "flags": {"suppressed_AA": count(Flag::SuppressedAa), "missing_H": count(Flag::MissingH)},
        "correlation": rep,
        "pca": {
            "covariance": rep.eigenvalues,
            "scatter": rep.scatter_eigenvalues,
            "covariance_trace": rep.std_h * rep.std_h + rep.std_aa * rep.std_aa,
            "reference": REFERENCE_EIGENVALUES,
        },
        "separability": sep,
        "outputs": {"points": FIG4_FILE},
    });
    ensure_dir(&job.out_dir)?;
    let points = job.out_dir.join(FIG4_FILE);
    let file = std::fs::File::create(&points).map_err(|e| output_error(&points, e))?;
    write_fig4_points(std::io::BufWriter::new(file), &records)?;
    let report_path = write_report(&job.out_dir, job.command, &report, job.format)?;
    let elapsed = start.elapsed();
    Ok(Outcome {
        summary: vec![
            format!("rho {:.4} over {} records ({} without H)", rep.rho, rep.n_used, rep.n_excluded),
            format!("eigenvalues covariance {:?} scatter {:?}", rep.eigenvalues, rep.scatter_eigenvalues),
            format!("reference eigenvalues {REFERENCE_EIGENVALUES:?}"),
            format!(
                "AA >= {}: {} robust, {} vulnerable",
                job.threshold, sep.robust, sep.vulnerable
            ),
            format!("elapsed {:.3} s", elapsed.as_secs_f64()),
        ],
        report,
        files: vec![report_path, points],
    })
}
