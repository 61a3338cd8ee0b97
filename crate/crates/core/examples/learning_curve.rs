//! Mean true and apparent AUC of the plug-in rule as the training set
//! grows, for three dimensionalities at a fixed separation.
//!
//! `cargo run --release --example learning_curve -- [trials]`

use llr_lab::mcharness::{asymptotic_auc, learning_curve, ExperimentConfig};

fn main() -> llr_lab::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let cfg = ExperimentConfig {
        n_trials: trials,
        base_seed: 2024,
        ..ExperimentConfig::default()
    };
    let summary = learning_curve(&cfg)?;
    println!("asymptote {:.4}", asymptotic_auc(cfg.target_delta_sq)?);
    println!(" p     n   true (se)          apparent (se)");
    for r in &summary.rows {
        println!(
            "{:>2} {:>5}   {:.4} ({:.4})    {:.4} ({:.4})",
            r.p,
            r.n,
            r.mean_auc_true,
            r.se_true().unwrap_or(f64::NAN),
            r.mean_auc_apparent,
            r.se_apparent().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
