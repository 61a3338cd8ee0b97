//! Spread of the trial-to-trial AUC at eleven features, raw and with the
//! exact Bayes rule used as a control variate.

use llr_lab::mcharness::{variance_study, AucEstimator, ExperimentConfig};

fn main() -> llr_lab::Result<()> {
    for estimator in [AucEstimator::Raw, AucEstimator::ControlVariate] {
        let cfg = ExperimentConfig {
            dims: vec![11],
            base_seed: 2024,
            estimator,
            ..ExperimentConfig::default()
        };
        println!("{estimator:?}");
        for r in &variance_study(&cfg)?.rows {
            println!(
                "  n = {:>5}: mean {:.4}, variance true {:.2e}, apparent {:.2e}",
                r.n,
                r.mean_auc_true,
                r.var_auc_true.unwrap_or(f64::NAN),
                r.var_auc_apparent.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
