//! Performance measurement for a scoring classifier.
//!
//! Nonparametric estimators work on a [`ScoreSet`]: error fractions at a
//! threshold, the empirical ROC curve from a full threshold sweep, and the
//! AUC both as a trapezoid area and as the Mann–Whitney pair average with
//! kernel ψ = 1, ½, 0 for win, tie, loss. Curves built by
//! [`empirical_roc`] carry integer counts, so the two AUC routes agree
//! bit for bit.
//!
//! The binormal model summarizes a ROC by the intercept `a` and slope `b` of
//! its normal-deviate plot: TPF = Φ(a + b·Φ⁻¹(FPF)), AUC = Φ(a/√(1+b²)).

use crate::csv;
use crate::error::{Error, Result};
use crate::smallmat::{std_normal_cdf, std_normal_quantile};

/// Scores of class-one cases and of class-two cases.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScoreSet {
    class1: Vec<f64>,
    class2: Vec<f64>,
}

impl ScoreSet {
    pub fn new(class1: Vec<f64>, class2: Vec<f64>) -> Result<Self> {
        if class1.iter().chain(&class2).any(|s| !s.is_finite()) {
            return Err(Error::contract("scores must be finite"));
        }
        Ok(ScoreSet { class1, class2 })
    }

    pub fn class1(&self) -> &[f64] {
        &self.class1
    }

    pub fn class2(&self) -> &[f64] {
        &self.class2
    }

    pub fn swapped(&self) -> ScoreSet {
        ScoreSet {
            class1: self.class2.clone(),
            class2: self.class1.clone(),
        }
    }

    fn require_non_empty(&self) -> Result<()> {
        if self.class1.is_empty() || self.class2.is_empty() {
            return Err(Error::contract(format!(
                "both score lists must be non-empty (n1 = {}, n2 = {})",
                self.class1.len(),
                self.class2.len()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorFractions {
    /// Class-one scores strictly below the threshold, as a fraction of n₁.
    pub fnf: f64,
    /// Class-two scores strictly above the threshold, as a fraction of n₂.
    pub fpf: f64,
}

impl ErrorFractions {
    pub fn tpf(&self) -> f64 {
        1.0 - self.fnf
    }
}

/// Scores equal to the threshold count toward neither error.
pub fn empirical_error_fractions(scores: &ScoreSet, th: f64) -> Result<ErrorFractions> {
    scores.require_non_empty()?;
    let false_neg = scores.class1.iter().filter(|&&s| s < th).count();
    let false_pos = scores.class2.iter().filter(|&&s| s > th).count();
    Ok(ErrorFractions {
        fnf: false_neg as f64 / scores.class1.len() as f64,
        fpf: false_pos as f64 / scores.class2.len() as f64,
    })
}

/// Twice the Mann–Whitney sum, `2·#wins + #ties`, as an exact integer.
fn doubled_pair_sum(scores: &ScoreSet) -> u128 {
    let mut sorted2 = scores.class2.clone();
    sorted2.sort_by(f64::total_cmp);
    scores
        .class1
        .iter()
        .map(|&s| {
            let below = sorted2.partition_point(|&t| t < s);
            let at_or_below = sorted2.partition_point(|&t| t <= s);
            2 * below as u128 + (at_or_below - below) as u128
        })
        .sum()
}

fn pair_fraction(doubled: u128, n1: usize, n2: usize) -> f64 {
    doubled as f64 / (2 * n1 as u128 * n2 as u128) as f64
}

/// Mann–Whitney estimate `(1/n₁n₂) Σᵢⱼ ψ(h₁ᵢ, h₂ⱼ)`.
pub fn empirical_auc(scores: &ScoreSet) -> Result<f64> {
    scores.require_non_empty()?;
    Ok(pair_fraction(
        doubled_pair_sum(scores),
        scores.class1.len(),
        scores.class2.len(),
    ))
}

/// Returns the Mann–Whitney AUC and, by separate double enumeration, the
/// probability that a class-two score falls below a class-one score (ties
/// counted half). The two are equal; the pair makes that identity testable.
pub fn auc_probability_identity_check(scores: &ScoreSet) -> Result<(f64, f64)> {
    let auc_mw = empirical_auc(scores)?;
    let mut less = 0u128;
    let mut tied = 0u128;
    for &h1 in &scores.class1 {
        for &h2 in &scores.class2 {
            if h2 < h1 {
                less += 1;
            } else if h2 == h1 {
                tied += 1;
            }
        }
    }
    let auc_prob = pair_fraction(2 * less + tied, scores.class1.len(), scores.class2.len());
    Ok((auc_mw, auc_prob))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RocPoint {
    pub fpf: f64,
    pub tpf: f64,
    /// Decide class one when `score ≥ threshold`; `±∞` at the anchors.
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
struct RocCounts {
    n1: usize,
    n2: usize,
    /// (false positives, true positives) per point.
    per_point: Vec<(u64, u64)>,
}

/// Ordered ROC points from (0,0) to (1,1), both coordinates non-decreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve {
    points: Vec<RocPoint>,
    counts: Option<RocCounts>,
}

impl RocCurve {
    pub fn from_points(points: Vec<RocPoint>) -> Result<Self> {
        validate_points(&points)?;
        Ok(RocCurve {
            points,
            counts: None,
        })
    }

    pub fn points(&self) -> &[RocPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Normal-deviate coordinates `(Φ⁻¹(FPF), Φ⁻¹(TPF))` of the points with
    /// both fractions strictly inside (0, 1).
    pub fn deviate_points(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.fpf > 0.0 && p.fpf < 1.0 && p.tpf > 0.0 && p.tpf < 1.0)
            .map(|p| {
                (
                    std_normal_quantile(p.fpf).expect("interior fraction"),
                    std_normal_quantile(p.tpf).expect("interior fraction"),
                )
            })
            .collect()
    }

    /// CSV with header `fpf,tpf,threshold`.
    pub fn to_csv(&self) -> String {
        csv::render(
            &["fpf", "tpf", "threshold"],
            self.points.iter().map(|p| {
                vec![
                    csv::format_number(p.fpf),
                    csv::format_number(p.tpf),
                    csv::format_number(p.threshold),
                ]
            }),
        )
    }
}

fn validate_points(points: &[RocPoint]) -> Result<()> {
    let (first, last) = match (points.first(), points.last()) {
        (Some(f), Some(l)) if points.len() >= 2 => (f, l),
        _ => return Err(Error::contract("ROC curve needs at least two points")),
    };
    if (first.fpf, first.tpf) != (0.0, 0.0) || (last.fpf, last.tpf) != (1.0, 1.0) {
        return Err(Error::contract("ROC curve must run from (0,0) to (1,1)"));
    }
    for (i, w) in points.windows(2).enumerate() {
        let ok = w[1].fpf >= w[0].fpf
            && w[1].tpf >= w[0].tpf
            && (0.0..=1.0).contains(&w[1].fpf)
            && (0.0..=1.0).contains(&w[1].tpf);
        if !ok {
            return Err(Error::contract(format!(
                "ROC curve is not monotone at point {}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Threshold sweep over every distinct pooled score, highest first, plus the
/// anchors (0,0) at `+∞` and (1,1) at `−∞`. A point at threshold `t`
/// classifies `score ≥ t` as class one, so tied scores form diagonal segments.
pub fn empirical_roc(scores: &ScoreSet) -> Result<RocCurve> {
    scores.require_non_empty()?;
    let n1 = scores.class1.len();
    let n2 = scores.class2.len();
    let mut pooled: Vec<(f64, bool)> = scores
        .class1
        .iter()
        .map(|&s| (s, true))
        .chain(scores.class2.iter().map(|&s| (s, false)))
        .collect();
    pooled.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = vec![RocPoint {
        fpf: 0.0,
        tpf: 0.0,
        threshold: f64::INFINITY,
    }];
    let mut per_point = vec![(0u64, 0u64)];
    let (mut fp, mut tp) = (0u64, 0u64);
    let mut i = 0;
    while i < pooled.len() {
        let value = pooled[i].0;
        while i < pooled.len() && pooled[i].0 == value {
            if pooled[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpf: fp as f64 / n2 as f64,
            tpf: tp as f64 / n1 as f64,
            threshold: value,
        });
        per_point.push((fp, tp));
    }
    points.push(RocPoint {
        fpf: 1.0,
        tpf: 1.0,
        threshold: f64::NEG_INFINITY,
    });
    per_point.push((n2 as u64, n1 as u64));

    Ok(RocCurve {
        points,
        counts: Some(RocCounts { n1, n2, per_point }),
    })
}

/// Trapezoid area under the curve. Curves that carry integer counts are
/// integrated exactly in integer arithmetic before the final division.
pub fn trapezoid_auc(curve: &RocCurve) -> Result<f64> {
    validate_points(&curve.points)?;
    if let Some(c) = &curve.counts {
        let doubled: u128 = c
            .per_point
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) as u128 * (w[1].1 + w[0].1) as u128)
            .sum();
        return Ok(pair_fraction(doubled, c.n1, c.n2));
    }
    Ok(curve
        .points
        .windows(2)
        .map(|w| (w[1].fpf - w[0].fpf) * 0.5 * (w[1].tpf + w[0].tpf))
        .sum())
}

/// TPF of the binormal ROC with deviate intercept `a` and slope `b`.
pub fn binormal_tpf(a: f64, b: f64, fpf: f64) -> Result<f64> {
    if !(fpf > 0.0 && fpf < 1.0) {
        return Err(Error::domain(format!("fpf must lie in (0,1), got {fpf}")));
    }
    Ok(std_normal_cdf(a + b * std_normal_quantile(fpf)?))
}

pub fn binormal_auc(a: f64, b: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::domain(format!("binormal slope must be positive, got {b}")));
    }
    Ok(std_normal_cdf(a / (1.0 + b * b).sqrt()))
}

/// Binormal ROC sampled at `n_interior` evenly spaced FPF values plus anchors.
pub fn binormal_roc(a: f64, b: f64, n_interior: usize) -> Result<RocCurve> {
    let mut points = vec![RocPoint {
        fpf: 0.0,
        tpf: 0.0,
        threshold: f64::INFINITY,
    }];
    for i in 1..=n_interior {
        let fpf = i as f64 / (n_interior + 1) as f64;
        let z = std_normal_quantile(fpf)?;
        points.push(RocPoint {
            fpf,
            tpf: binormal_tpf(a, b, fpf)?,
            // threshold in class-two standard units
            threshold: -z,
        });
    }
    points.push(RocPoint {
        fpf: 1.0,
        tpf: 1.0,
        threshold: f64::NEG_INFINITY,
    });
    RocCurve::from_points(points)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinormalFit {
    pub a: f64,
    pub b: f64,
    /// Root-mean-square deviation of the deviate points from the fitted line.
    pub residual: f64,
    pub n_points: usize,
}

impl BinormalFit {
    pub fn auc(&self) -> Result<f64> {
        binormal_auc(self.a, self.b)
    }
}

/// Ordinary least squares line through the normal-deviate points.
pub fn normal_deviate_fit(curve: &RocCurve) -> Result<BinormalFit> {
    fit_line(&curve.deviate_points())
}

pub fn fit_line(pts: &[(f64, f64)]) -> Result<BinormalFit> {
    if pts.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData { needed: 2, got: 1 });
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - a - b * p.0).powi(2)).sum();
    Ok(BinormalFit {
        a,
        b,
        residual: (rss / n).sqrt(),
        n_points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(a: &[f64], b: &[f64]) -> ScoreSet {
        ScoreSet::new(a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn error_fraction_examples() {
        let f = empirical_error_fractions(&set(&[2.0, 3.0], &[0.0, 1.0]), 1.5).unwrap();
        assert_eq!((f.fnf, f.fpf), (0.0, 0.0));
        let f = empirical_error_fractions(&set(&[-1.0, -2.0], &[1.0, 2.0]), 0.0).unwrap();
        assert_eq!((f.fnf, f.fpf), (1.0, 1.0));
        let f = empirical_error_fractions(&set(&[1.0, 2.0], &[1.0, 0.0]), 1.0).unwrap();
        assert_eq!((f.fnf, f.fpf), (0.0, 0.0));
    }

    #[test]
    fn auc_examples() {
        assert_eq!(empirical_auc(&set(&[2.0, 3.0], &[0.0, 1.0])).unwrap(), 1.0);
        assert_eq!(empirical_auc(&set(&[1.0], &[1.0])).unwrap(), 0.5);
        assert_eq!(empirical_auc(&set(&[3.0, 1.0], &[2.0, 0.0])).unwrap(), 0.75);
    }

    #[test]
    fn empty_lists_rejected() {
        let s = set(&[], &[1.0]);
        assert!(matches!(empirical_auc(&s), Err(Error::Contract(_))));
        assert!(matches!(empirical_roc(&s), Err(Error::Contract(_))));
        assert!(empirical_error_fractions(&s, 0.0).is_err());
        assert!(auc_probability_identity_check(&s).is_err());
        assert!(ScoreSet::new(vec![f64::NAN], vec![]).is_err());
    }

    #[test]
    fn roc_shapes() {
        let sep = empirical_roc(&set(&[2.0, 3.0], &[0.0, 1.0])).unwrap();
        assert!(sep.points().iter().any(|p| p.fpf == 0.0 && p.tpf == 1.0));
        assert_eq!(sep.len(), 4 + 2);
        let same = empirical_roc(&set(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0])).unwrap();
        assert!(same.points().iter().all(|p| p.fpf == p.tpf));
        assert_eq!(trapezoid_auc(&same).unwrap(), 0.5);
        assert_eq!(same.points()[0].threshold, f64::INFINITY);
        assert_eq!(same.points().last().unwrap().threshold, f64::NEG_INFINITY);
    }

    #[test]
    fn trapezoid_examples_and_malformed() {
        let p = |fpf, tpf| RocPoint {
            fpf,
            tpf,
            threshold: 0.0,
        };
        let diag = RocCurve::from_points(vec![p(0.0, 0.0), p(1.0, 1.0)]).unwrap();
        assert_eq!(trapezoid_auc(&diag).unwrap(), 0.5);
        let perfect = RocCurve::from_points(vec![p(0.0, 0.0), p(0.0, 1.0), p(1.0, 1.0)]).unwrap();
        assert_eq!(trapezoid_auc(&perfect).unwrap(), 1.0);
        assert!(RocCurve::from_points(vec![p(0.0, 0.0), p(0.5, 0.6), p(0.4, 0.7), p(1.0, 1.0)]).is_err());
        assert!(RocCurve::from_points(vec![p(0.1, 0.0), p(1.0, 1.0)]).is_err());
    }

    #[test]
    fn binormal_basics() {
        for fpf in [0.01, 0.3, 0.5, 0.77] {
            assert!((binormal_tpf(0.0, 1.0, fpf).unwrap() - fpf).abs() < 1e-12);
        }
        assert_eq!(binormal_tpf(0.7, 1.9, 0.5).unwrap(), std_normal_cdf(0.7));
        assert!(binormal_tpf(0.0, 1.0, 0.0).is_err());
        assert!(binormal_tpf(0.0, 1.0, 1.0).is_err());
        for b in [0.3, 1.0, 3.0] {
            assert_eq!(binormal_auc(0.0, b).unwrap(), 0.5);
        }
        assert!(binormal_auc(1.0, 0.0).is_err());
        assert!((binormal_auc(0.8955, 1.0).unwrap() - 0.7367).abs() < 1e-4);
    }

    #[test]
    fn deviate_fit_round_trip() {
        let curve = binormal_roc(1.2, 0.8, 99).unwrap();
        let fit = normal_deviate_fit(&curve).unwrap();
        assert!((fit.a - 1.2).abs() < 1e-6 && (fit.b - 0.8).abs() < 1e-6, "{fit:?}");
        assert!(fit.residual < 1e-9);

        let p = |f| RocPoint {
            fpf: f,
            tpf: f,
            threshold: 0.0,
        };
        let diag =
            RocCurve::from_points(vec![p(0.0), p(0.1), p(0.4), p(0.8), p(1.0)]).unwrap();
        let fit = normal_deviate_fit(&diag).unwrap();
        assert!(fit.a.abs() < 1e-9 && (fit.b - 1.0).abs() < 1e-9);

        let short = RocCurve::from_points(vec![p(0.0), p(0.5), p(1.0)]).unwrap();
        assert!(matches!(
            normal_deviate_fit(&short),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn csv_has_anchors() {
        let csv = empirical_roc(&set(&[1.0], &[0.0])).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "fpf,tpf,threshold");
        assert!(lines[1].ends_with(",inf"));
        assert!(lines.last().unwrap().ends_with(",-inf"));
    }
}
