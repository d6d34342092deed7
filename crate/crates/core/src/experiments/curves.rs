use crate::error::{Error, Result};
use crate::risk::{FigureMeasure, RiskReport};

/// Largest value of a measure over the gamma grid at one sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstCase {
    pub n: usize,
    pub max: f64,
    pub argmax_gamma: f64,
    /// Monte Carlo standard error of the cell attaining the max.
    pub se: f64,
}

/// Per sample size, the max of `measure` over gamma for `estimator`.
/// Ties resolve to the smallest gamma.
pub fn worst_case_curve(report: &RiskReport, estimator: &str, measure: FigureMeasure) -> Result<Vec<WorstCase>> {
    let mut out = Vec::new();
    for n in report.sample_sizes() {
        let mut rows: Vec<_> = report.rows_for(estimator).filter(|r| r.n == n).collect();
        rows.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
        let mut best: Option<WorstCase> = None;
        for r in rows {
            let (v, se) = measure.value(r);
            if best.is_none_or(|b| v > b.max) {
                best = Some(WorstCase {
                    n,
                    max: v,
                    argmax_gamma: r.gamma,
                    se,
                });
            }
        }
        out.extend(best);
    }
    if out.is_empty() {
        return Err(Error::invalid(format!("report has no rows for estimator {estimator:?}")));
    }
    Ok(out)
}

/// Three-point moving average; the end points average their two neighbours' window.
pub fn smooth3(values: &[f64]) -> Vec<f64> {
    let m = values.len();
    (0..m)
        .map(|i| {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(m - 1);
            values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Indices of interior local maxima. A plateau counts once, at its left end.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let mut peaks = Vec::new();
    let m = values.len();
    let mut i = 1;
    while i + 1 < m {
        if values[i] > values[i - 1] {
            let mut j = i;
            while j + 1 < m && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < m && values[j + 1] < values[i] {
                peaks.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Topographic prominence of each local maximum: its height above the higher
/// of the two lowest points separating it from taller ground (or the ends).
pub fn prominences(values: &[f64]) -> Vec<(usize, f64)> {
    local_maxima(values)
        .into_iter()
        .map(|i| {
            let h = values[i];
            let left = values[..i].iter().rev().take_while(|&&v| v <= h).fold(h, |m, &v| m.min(v));
            let right = values[i + 1..].iter().take_while(|&&v| v <= h).fold(h, |m, &v| m.min(v));
            (i, h - left.max(right))
        })
        .collect()
}

/// Local maxima whose prominence exceeds `min_prominence`.
pub fn prominent_maxima(values: &[f64], min_prominence: f64) -> Vec<usize> {
    prominences(values)
        .into_iter()
        .filter(|&(_, p)| p > min_prominence)
        .map(|(i, _)| i)
        .collect()
}

/// `(gamma, value, se)` of one estimator's measure at one sample size, sorted by gamma.
pub fn measure_curve(report: &RiskReport, estimator: &str, n: usize, measure: FigureMeasure) -> Vec<(f64, f64, f64)> {
    let mut out: Vec<_> = report
        .rows_for(estimator)
        .filter(|r| r.n == n)
        .map(|r| {
            let (v, se) = measure.value(r);
            (r.gamma, v, se)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}
