//! Comparing simulated scores against a tabulated analytic density.

use crate::csv;
use crate::error::{Error, Result};

use super::marginal::DensityGrid;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// Count divided by `n·width`, comparable with the density.
    pub empirical_density: f64,
    /// Mean analytic density over the bin.
    pub analytic_density: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistogramComparison {
    pub ks_statistic: f64,
    pub bins: Vec<HistogramBin>,
}

impl HistogramComparison {
    pub fn to_csv(&self) -> String {
        csv::render(
            &["lo", "hi", "count", "empirical_density", "analytic_density"],
            self.bins.iter().map(|b| {
                vec![
                    csv::format_number(b.lo),
                    csv::format_number(b.hi),
                    b.count.to_string(),
                    csv::format_number(b.empirical_density),
                    csv::format_number(b.analytic_density),
                ]
            }),
        )
    }
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// Freedman–Diaconis bin count, clamped to `[20, 200]`.
pub fn freedman_diaconis_bins(sorted: &[f64]) -> usize {
    if sorted.len() < 2 {
        return 20;
    }
    let iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    let range = sorted[sorted.len() - 1] - sorted[0];
    let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
    if !(width > 0.0) || !(range > 0.0) {
        return 20;
    }
    ((range / width).ceil() as usize).clamp(20, 200)
}

/// Linear interpolation of a tabulated CDF; `xs` increasing.
fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let i = xs.partition_point(|v| *v <= x);
    let (x0, x1) = (xs[i - 1], xs[i]);
    ys[i - 1] + (ys[i] - ys[i - 1]) * (x - x0) / (x1 - x0)
}

/// KS distance between the empirical CDF of `scores` and the grid's
/// integrated CDF, plus a histogram table for plotting.
pub fn histogram_vs_analytic(scores: &[f64], grid: &DensityGrid) -> Result<HistogramComparison> {
    if scores.is_empty() {
        return Err(Error::contract("no scores to compare"));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::contract("scores must be finite"));
    }
    if grid.len() < 2 {
        return Err(Error::Coverage("density grid has fewer than two points".into()));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (glo, ghi) = (grid.h_values[0], grid.h_values[grid.len() - 1]);
    let slack = 1e-9 * (ghi - glo);
    let (smin, smax) = (sorted[0], sorted[sorted.len() - 1]);
    if smin < glo - slack || smax > ghi + slack {
        return Err(Error::Coverage(format!(
            "scores span [{smin}, {smax}] but the grid covers [{glo}, {ghi}]"
        )));
    }

    let cdf = grid.cumulative();
    let n = sorted.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, s) in sorted.iter().enumerate() {
        let f = interp(&grid.h_values, &cdf, *s);
        ks = ks.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }

    let nbins = freedman_diaconis_bins(&sorted);
    let width = if smax > smin { (smax - smin) / nbins as f64 } else { 1.0 };
    let mut counts = vec![0usize; nbins];
    for s in &sorted {
        let k = (((s - smin) / width) as usize).min(nbins - 1);
        counts[k] += 1;
    }
    let bins = counts
        .iter()
        .enumerate()
        .map(|(k, &count)| {
            let lo = smin + k as f64 * width;
            let hi = lo + width;
            let mass = interp(&grid.h_values, &cdf, hi) - interp(&grid.h_values, &cdf, lo);
            HistogramBin {
                lo,
                hi,
                count,
                empirical_density: count as f64 / (n * width),
                analytic_density: mass / width,
            }
        })
        .collect();
    Ok(HistogramComparison { ks_statistic: ks, bins })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Class;

    fn uniform_grid() -> DensityGrid {
        let h: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        DensityGrid {
            class: Class::One,
            density: vec![1.0; h.len()],
            est_error: vec![0.0; h.len()],
            converged: vec![true; h.len()],
            h_values: h,
        }
    }

    #[test]
    fn ks_of_uniform_quantiles_is_small() {
        let scores: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let r = histogram_vs_analytic(&scores, &uniform_grid()).unwrap();
        assert!(r.ks_statistic <= 0.5e-3 + 1e-12, "{}", r.ks_statistic);
        assert_eq!(r.bins.iter().map(|b| b.count).sum::<usize>(), 1000);
    }

    #[test]
    fn coverage_is_enforced() {
        assert!(matches!(
            histogram_vs_analytic(&[2.0, 3.0], &uniform_grid()),
            Err(Error::Coverage(_))
        ));
    }

    #[test]
    fn bin_count_is_clamped() {
        let few: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert_eq!(freedman_diaconis_bins(&few), 20);
        // Cauchy quantiles: tiny IQR relative to the range
        let many: Vec<f64> = (0..1000)
            .map(|i| (std::f64::consts::PI * ((i as f64 + 0.5) / 1000.0 - 0.5)).tan())
            .collect();
        assert_eq!(freedman_diaconis_bins(&many), 200);
    }
}
