//! Monte-Carlo learning curves for the plug-in Bayes classifier.
//!
//! Populations: `N(0, I)` for class one and `N(c·1, I)` for class two in `p`
//! dimensions, with `c` chosen so that the squared Mahalanobis distance is
//! the configured Δ². Each trial draws `n` training vectors per class, fits
//! both Gaussians by plug-in estimation, and measures the AUC of the fitted
//! LLR on the training set itself (apparent) and on a fresh test set (true).
//!
//! Every trial owns a random stream derived from `(base_seed, p, n, trial)`,
//! so results do not depend on scheduling. The test set of a trial is derived
//! from `(base_seed, p, trial)` only and is shared by all training sizes;
//! these common random numbers make comparisons across `n` sharper without
//! changing any single-cell distribution.
//!
//! A finite test set adds its own noise to each "true" AUC, which dominates
//! at large `n` and keeps the variance from vanishing. By default each AUC is
//! therefore corrected with a control variate: the AUC of the exact Bayes
//! rule on the very same vectors, whose expectation Φ(Δ/√2) is known.
//! `AUC(fitted) − AUC(Bayes) + Φ(Δ/√2)` has the same mean as the raw value
//! and far less test-set noise. The raw values are kept in [`TrialResult`].

use rayon::prelude::*;

use crate::bayesllr::TwoClassProblem;
use crate::csv;
use crate::error::{Error, Result};
use crate::gaussmodel::{estimate_params, mvn_sample, GaussianParams, SeededRng};
use crate::rocauc::{empirical_auc, ScoreSet};
use crate::smallmat::{std_normal_cdf, Matrix, Vector};

const MAX_RETRIES: u64 = 3;
const ROLE_TRAIN: u64 = 1;
const ROLE_TEST: u64 = 2;

/// How per-trial AUCs are turned into the summary statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AucEstimator {
    /// Mann–Whitney AUC on the evaluation vectors, as measured.
    Raw,
    /// Raw AUC minus the exact Bayes rule's AUC on the same vectors, plus its known mean.
    #[default]
    ControlVariate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dims: Vec<usize>,
    pub train_sizes: Vec<usize>,
    pub n_trials: usize,
    /// Test vectors per class.
    pub test_size: usize,
    pub target_delta_sq: f64,
    pub base_seed: u64,
    pub estimator: AucEstimator,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dims: vec![3, 7, 11],
            train_sizes: vec![20, 50, 100, 500, 2000],
            n_trials: 100,
            test_size: 1000,
            target_delta_sq: 0.8,
            base_seed: 0,
            estimator: AucEstimator::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.train_sizes.is_empty() {
            return Err(Error::contract("dims and train_sizes must be non-empty"));
        }
        if self.dims.contains(&0) || self.n_trials == 0 || self.test_size == 0 {
            return Err(Error::contract("dims, n_trials and test_size must be at least 1"));
        }
        if !(self.target_delta_sq > 0.0 && self.target_delta_sq.is_finite()) {
            return Err(Error::domain(format!(
                "target_delta_sq must be positive, got {}",
                self.target_delta_sq
            )));
        }
        let max_p = *self.dims.iter().max().unwrap();
        if let Some(&n) = self.train_sizes.iter().find(|&&n| n <= max_p) {
            return Err(Error::InsufficientData {
                needed: max_p + 1,
                got: n,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialResult {
    /// Fitted rule on the test set.
    pub auc_true: f64,
    /// Fitted rule on its own training set.
    pub auc_apparent: f64,
    /// Exact Bayes rule on the test set.
    pub bayes_auc_test: f64,
    /// Exact Bayes rule on the training set.
    pub bayes_auc_train: f64,
    pub n: usize,
    pub p: usize,
    pub trial_index: usize,
}

impl TrialResult {
    /// `(true, apparent)` under `estimator`; `asymptote` is the Bayes AUC.
    pub fn estimates(&self, estimator: AucEstimator, asymptote: f64) -> (f64, f64) {
        match estimator {
            AucEstimator::Raw => (self.auc_true, self.auc_apparent),
            AucEstimator::ControlVariate => (
                self.auc_true - self.bayes_auc_test + asymptote,
                self.auc_apparent - self.bayes_auc_train + asymptote,
            ),
        }
    }
}

/// AUCs measured in one trial: fitted rule and exact Bayes rule, on test and training data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialAucs {
    pub fitted_test: f64,
    pub fitted_train: f64,
    pub bayes_test: f64,
    pub bayes_train: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveRow {
    pub p: usize,
    pub n: usize,
    pub mean_auc_true: f64,
    pub mean_auc_apparent: f64,
    /// `None` with a single trial.
    pub var_auc_true: Option<f64>,
    pub var_auc_apparent: Option<f64>,
    pub n_trials: usize,
}

impl CurveRow {
    /// Standard error of `mean_auc_true`.
    pub fn se_true(&self) -> Option<f64> {
        self.var_auc_true.map(|v| (v / self.n_trials as f64).sqrt())
    }

    pub fn se_apparent(&self) -> Option<f64> {
        self.var_auc_apparent.map(|v| (v / self.n_trials as f64).sqrt())
    }
}

/// Rows ordered by `p`, then `n`, both ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSummary {
    pub rows: Vec<CurveRow>,
}

impl CurveSummary {
    pub fn row(&self, p: usize, n: usize) -> Option<&CurveRow> {
        self.rows.iter().find(|r| r.p == p && r.n == n)
    }

    /// CSV with header
    /// `p,n,mean_auc_true,mean_auc_apparent,var_auc_true,var_auc_apparent,n_trials`.
    pub fn to_csv(&self) -> String {
        csv::render(
            &[
                "p",
                "n",
                "mean_auc_true",
                "mean_auc_apparent",
                "var_auc_true",
                "var_auc_apparent",
                "n_trials",
            ],
            self.rows.iter().map(|r| {
                vec![
                    r.p.to_string(),
                    r.n.to_string(),
                    csv::format_number(r.mean_auc_true),
                    csv::format_number(r.mean_auc_apparent),
                    csv::format_optional(r.var_auc_true),
                    csv::format_optional(r.var_auc_apparent),
                    r.n_trials.to_string(),
                ]
            }),
        )
    }
}

/// Per-coordinate mean offset giving squared Mahalanobis distance Δ² under `Σ = I`.
pub fn calibrate_c(p: usize, target_delta_sq: f64) -> Result<f64> {
    if p == 0 {
        return Err(Error::contract("dimension must be at least 1"));
    }
    if !(target_delta_sq > 0.0 && target_delta_sq.is_finite()) {
        return Err(Error::domain(format!(
            "target_delta_sq must be positive, got {target_delta_sq}"
        )));
    }
    Ok((target_delta_sq / p as f64).sqrt())
}

/// AUC of the Bayes rule for two equal-covariance normals at separation Δ.
pub fn asymptotic_auc(target_delta_sq: f64) -> Result<f64> {
    if !(target_delta_sq >= 0.0 && target_delta_sq.is_finite()) {
        return Err(Error::domain(format!(
            "target_delta_sq must be non-negative, got {target_delta_sq}"
        )));
    }
    Ok(std_normal_cdf((target_delta_sq / 2.0).sqrt()))
}

/// The two populations of the experiment at dimension `p` and offset `c`.
pub fn populations(p: usize, c: f64) -> Result<(GaussianParams, GaussianParams)> {
    Ok((
        GaussianParams::new(Vector::zeros(p), Matrix::identity(p))?,
        GaussianParams::new(Vector::filled(p, c), Matrix::identity(p))?,
    ))
}

fn stream_root(base_seed: u64) -> SeededRng {
    SeededRng::new(base_seed, 0)
}

fn trial_streams(base_seed: u64, p: usize, n: usize, trial: usize) -> (SeededRng, SeededRng) {
    let root = stream_root(base_seed);
    (
        root.derive(&[ROLE_TRAIN, p as u64, n as u64, trial as u64]),
        root.derive(&[ROLE_TEST, p as u64, trial as u64]),
    )
}

/// One train/score/test cycle. `train` supplies training data (retries use
/// sub-streams derived from it); `test` supplies the test set.
pub fn run_trial_with(
    p: usize,
    n: usize,
    c: f64,
    test_size: usize,
    train: &SeededRng,
    test: &SeededRng,
) -> Result<TrialAucs> {
    if n <= p {
        return Err(Error::InsufficientData { needed: p + 1, got: n });
    }
    let (pop1, pop2) = populations(p, c)?;
    let exact = TwoClassProblem::symmetric(pop1.clone(), pop2.clone())?;
    let exact = exact.scorer();
    let auc_of = |scorer: &crate::bayesllr::LlrScorer<'_>, a: &[Vector], b: &[Vector]| {
        empirical_auc(&ScoreSet::new(scorer.score_all(a), scorer.score_all(b))?)
    };
    let mut last_err = None;
    for attempt in 0..=MAX_RETRIES {
        let mut rng = if attempt == 0 {
            train.clone()
        } else {
            train.derive(&[attempt])
        };
        let x1 = mvn_sample(&pop1, n, &mut rng);
        let x2 = mvn_sample(&pop2, n, &mut rng);
        let fitted = estimate_params(&x1)
            .and_then(|e1| Ok((e1, estimate_params(&x2)?)))
            .and_then(|(e1, e2)| TwoClassProblem::symmetric(e1, e2));
        let problem = match fitted {
            Ok(problem) => problem,
            Err(e) => {
                log::warn!("estimation failed at p = {p}, n = {n} (attempt {attempt}): {e}; retrying");
                last_err = Some(e);
                continue;
            }
        };
        let fitted = problem.scorer();
        let mut trng = test.clone();
        let t1 = mvn_sample(&pop1, test_size, &mut trng);
        let t2 = mvn_sample(&pop2, test_size, &mut trng);
        return Ok(TrialAucs {
            fitted_test: auc_of(&fitted, &t1, &t2)?,
            fitted_train: auc_of(&fitted, &x1, &x2)?,
            bayes_test: auc_of(&exact, &t1, &t2)?,
            bayes_train: auc_of(&exact, &x1, &x2)?,
        });
    }
    Err(last_err.expect("at least one attempt ran"))
}

/// Trial `trial_index` of the cell `(p, n)` under `base_seed`.
pub fn run_trial(
    p: usize,
    n: usize,
    c: f64,
    test_size: usize,
    base_seed: u64,
    trial_index: usize,
) -> Result<TrialResult> {
    let (train, test) = trial_streams(base_seed, p, n, trial_index);
    let aucs = run_trial_with(p, n, c, test_size, &train, &test)
        .map_err(|e| Error::Trial {
            p,
            n,
            trial: trial_index,
            source: Box::new(e),
        })?;
    Ok(TrialResult {
        auc_true: aucs.fitted_test,
        auc_apparent: aucs.fitted_train,
        bayes_auc_test: aucs.bayes_test,
        bayes_auc_train: aucs.bayes_train,
        n,
        p,
        trial_index,
    })
}

fn mean_var(xs: &[f64]) -> (f64, Option<f64>) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    let var = (xs.len() > 1)
        .then(|| xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0));
    (mean, var)
}

/// Mean and unbiased variance of both AUC kinds for every `(p, n)`.
pub fn learning_curve(config: &ExperimentConfig) -> Result<CurveSummary> {
    config.validate()?;
    let mut dims = config.dims.clone();
    dims.sort_unstable();
    dims.dedup();
    let mut sizes = config.train_sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();

    let cells: Vec<(usize, usize, usize)> = dims
        .iter()
        .flat_map(|&p| {
            sizes
                .iter()
                .flat_map(move |&n| (0..config.n_trials).map(move |t| (p, n, t)))
        })
        .collect();
    // collect() keeps input order, so the reduction below is schedule independent
    let results: Vec<TrialResult> = cells
        .par_iter()
        .map(|&(p, n, t)| {
            let c = calibrate_c(p, config.target_delta_sq)?;
            run_trial(p, n, c, config.test_size, config.base_seed, t)
        })
        .collect::<Result<_>>()?;

    let asymptote = asymptotic_auc(config.target_delta_sq)?;
    let rows = results
        .chunks(config.n_trials)
        .map(|chunk| {
            let (truth, apparent): (Vec<f64>, Vec<f64>) = chunk
                .iter()
                .map(|r| r.estimates(config.estimator, asymptote))
                .unzip();
            let (mean_auc_true, var_auc_true) = mean_var(&truth);
            let (mean_auc_apparent, var_auc_apparent) = mean_var(&apparent);
            CurveRow {
                p: chunk[0].p,
                n: chunk[0].n,
                mean_auc_true,
                mean_auc_apparent,
                var_auc_true,
                var_auc_apparent,
                n_trials: chunk.len(),
            }
        })
        .collect();
    Ok(CurveSummary { rows })
}

/// Learning curve at a single dimensionality, read for its variance column.
pub fn variance_study(config: &ExperimentConfig) -> Result<CurveSummary> {
    if config.dims.len() != 1 {
        return Err(Error::contract(format!(
            "variance study needs exactly one dimensionality, got {}",
            config.dims.len()
        )));
    }
    learning_curve(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussmodel::mahalanobis_sq;

    #[test]
    fn calibration() {
        assert!((calibrate_c(11, 0.8).unwrap() - 0.2697).abs() < 1e-4);
        assert!((calibrate_c(1, 0.8).unwrap() - 0.8944).abs() < 1e-4);
        for p in [3, 7, 11] {
            let c = calibrate_c(p, 0.8).unwrap();
            let d = mahalanobis_sq(&Vector::zeros(p), &Vector::filled(p, c), &Matrix::identity(p)).unwrap();
            assert!((d - 0.8).abs() < 1e-12);
        }
        assert!(calibrate_c(0, 0.8).is_err());
        assert!(calibrate_c(3, 0.0).is_err());
    }

    #[test]
    fn asymptote() {
        // Φ(√(0.8019/2)) = 0.73670
        assert!((asymptotic_auc(0.8019).unwrap() - 0.7367).abs() < 1e-4);
        assert_eq!(asymptotic_auc(0.0).unwrap(), 0.5);
    }

    #[test]
    fn trial_is_deterministic_and_bounded() {
        let c = calibrate_c(3, 0.8).unwrap();
        let a = run_trial(3, 5, c, 200, 42, 7).unwrap();
        let b = run_trial(3, 5, c, 200, 42, 7).unwrap();
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a.auc_true) && (0.0..=1.0).contains(&a.auc_apparent));
    }

    #[test]
    fn single_trial_has_no_variance() {
        let cfg = ExperimentConfig {
            dims: vec![2],
            train_sizes: vec![10],
            n_trials: 1,
            test_size: 50,
            ..Default::default()
        };
        let s = learning_curve(&cfg).unwrap();
        let r = s.rows[0];
        assert_eq!(r.var_auc_true, None);
        let t = run_trial(2, 10, calibrate_c(2, 0.8).unwrap(), 50, 0, 0).unwrap();
        let (truth, _) = t.estimates(cfg.estimator, asymptotic_auc(0.8).unwrap());
        assert_eq!(r.mean_auc_true, truth);
        let raw = learning_curve(&ExperimentConfig {
            estimator: AucEstimator::Raw,
            ..cfg
        })
        .unwrap();
        assert_eq!(raw.rows[0].mean_auc_true, t.auc_true);
        assert!(s.to_csv().lines().nth(1).unwrap().contains(",NA,NA,1"));
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.train_sizes = vec![11];
        assert!(matches!(cfg.validate(), Err(Error::InsufficientData { .. })));
        let cfg = ExperimentConfig {
            target_delta_sq: -1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        assert!(variance_study(&ExperimentConfig::default()).is_err());
    }
}
