//! Correlating overlap with attack success.

mod records;

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use records::{
    load_table3, read_records, read_records_from, table3_csv, write_records, AnalysisRecord, Flag, RECORDS_HEADER,
};

/// Which 2×2 matrix of the centered `(H, AA)` cloud to diagonalize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PcaMode {
    /// Population covariance (scatter divided by `n`).
    Covariance,
    /// Unnormalized scatter matrix.
    Scatter,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport<T> {
    pub rho: T,
    pub n_used: usize,
    /// Records dropped for lack of an `H` value.
    pub n_excluded: usize,
    /// Covariance-mode eigenvalues, descending.
    pub eigenvalues: [T; 2],
    pub scatter_eigenvalues: [T; 2],
    pub mean_h: T,
    pub mean_aa: T,
    pub std_h: T,
    pub std_aa: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Separability {
    pub threshold: f64,
    /// `AA >= threshold`.
    pub robust: usize,
    pub vulnerable: usize,
    pub mean_h_robust: Option<f64>,
    pub mean_h_vulnerable: Option<f64>,
}

/// `(H, AA)` for every record with `H` present.
pub fn usable_pairs(records: &[AnalysisRecord]) -> Vec<(f64, f64)> {
    records.iter().filter_map(|r| r.h.map(|h| (h, r.aa))).collect()
}

fn moments<T: Real>(pairs: &[(T, T)]) -> ([T; 2], [T; 3]) {
    let n = T::from_usize(pairs.len()).unwrap();
    let mx = pairs.iter().map(|p| p.0).sum::<T>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<T>() / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for &(x, y) in pairs {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    ([mx, my], [sxx, sxy, syy])
}

fn require_two<T>(pairs: &[(T, T)]) -> Result<()> {
    if pairs.len() < 2 {
        return Err(Error::InsufficientData(format!("need >= 2 usable records, got {}", pairs.len())));
    }
    Ok(())
}

/// Pearson correlation with population moments.
pub fn pearson<T: Real>(pairs: &[(T, T)]) -> Result<T> {
    require_two(pairs)?;
    let (_, [sxx, sxy, syy]) = moments(pairs);
    if sxx <= T::zero() {
        return Err(Error::ZeroVariance("H"));
    }
    if syy <= T::zero() {
        return Err(Error::ZeroVariance("AA"));
    }
    let rho = sxy / (sxx * syy).sqrt();
    Ok(rho.max(-T::one()).min(T::one()))
}

/// Descending eigenvalues of the chosen matrix of the centered pairs.
pub fn pca_eigen_pairs<T: Real>(pairs: &[(T, T)], mode: PcaMode) -> Result<[T; 2]> {
    require_two(pairs)?;
    let (_, mut s) = moments(pairs);
    if mode == PcaMode::Covariance {
        let n = T::from_usize(pairs.len()).unwrap();
        s.iter_mut().for_each(|v| *v /= n);
    }
    Ok(sym2_eigen(s))
}

/// Eigenvalues of `[[a, b], [b, c]]`, descending, the smaller clamped at zero
/// for positive semidefinite input.
fn sym2_eigen<T: Real>([a, b, c]: [T; 3]) -> [T; 2] {
    let half = T::lit(0.5);
    let mid = (a + c) * half;
    let rad = ((a - c) * half).hypot(b);
    let hi = mid + rad;
    let lo = if hi > T::zero() { (a * c - b * b) / hi } else { mid - rad };
    [hi, lo.max(T::zero())]
}

pub fn correlation(records: &[AnalysisRecord]) -> Result<f64> {
    pearson(&usable_pairs(records))
}

pub fn pca_eigen(records: &[AnalysisRecord], mode: PcaMode) -> Result<[f64; 2]> {
    pca_eigen_pairs(&usable_pairs(records), mode)
}

pub fn correlation_report(records: &[AnalysisRecord]) -> Result<CorrelationReport<f64>> {
    let pairs = usable_pairs(records);
    let rho = pearson(&pairs)?;
    let n = pairs.len() as f64;
    let ([mean_h, mean_aa], [sxx, _, syy]) = moments(&pairs);
    Ok(CorrelationReport {
        rho,
        n_used: pairs.len(),
        n_excluded: records.len() - pairs.len(),
        eigenvalues: pca_eigen_pairs(&pairs, PcaMode::Covariance)?,
        scatter_eigenvalues: pca_eigen_pairs(&pairs, PcaMode::Scatter)?,
        mean_h,
        mean_aa,
        std_h: (sxx / n).sqrt(),
        std_aa: (syy / n).sqrt(),
    })
}

/// Splits records at `AA = threshold`; ties count as robust.
pub fn linear_separability_check(records: &[AnalysisRecord], threshold: f64) -> Separability {
    let mean = |v: Vec<f64>| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    let (robust, vulnerable): (Vec<&AnalysisRecord>, Vec<&AnalysisRecord>) =
        records.iter().partition(|r| r.aa >= threshold);
    Separability {
        threshold,
        robust: robust.len(),
        vulnerable: vulnerable.len(),
        mean_h_robust: mean(robust.iter().filter_map(|r| r.h).collect()),
        mean_h_vulnerable: mean(vulnerable.iter().filter_map(|r| r.h).collect()),
    }
}

/// `target,surrogate,dataset,H,AA` for every usable record.
pub fn write_fig4_points<W: Write>(out: W, records: &[AnalysisRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Csv { line: 0, message: e.to_string() };
    w.write_record(["target", "surrogate", "dataset", "H", "AA"]).map_err(err)?;
    for r in records {
        if let Some(h) = r.h {
            w.write_record([&r.target, &r.surrogate, &r.dataset, &h.to_string(), &r.aa.to_string()])
                .map_err(err)?;
        }
    }
    w.flush().map_err(|e| Error::io("<fig4 csv>", e))
}
