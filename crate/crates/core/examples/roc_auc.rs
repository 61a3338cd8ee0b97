//! Empirical ROC and AUC from simulated scores next to the exact AUC
//! computed from the tabulated score densities.

use llr_lab::gaussmodel::SeededRng;
use llr_lab::llrdist::{analytic_auc, analytic_roc, marginal_density, score_grid, simulate_scores};
use llr_lab::rocauc::{auc_probability_identity_check, empirical_roc, trapezoid_auc};
use llr_lab::{reference_problem, Class};

fn main() -> llr_lab::Result<()> {
    let problem = reference_problem();
    let mut rng = SeededRng::new(7, 0);

    for n in [100, 1_000, 10_000] {
        let scores = simulate_scores(&problem, n, n, &mut rng)?;
        let roc = empirical_roc(&scores)?;
        let (mw, prob) = auc_probability_identity_check(&scores)?;
        println!(
            "n = {n:>6}: {:>6} ROC points, trapezoid AUC {:.6}, Mann-Whitney {mw:.6}, P(h1 > h2) {prob:.6}",
            roc.len(),
            trapezoid_auc(&roc)?
        );
    }

    let h = score_grid(&problem, 4001, 40.0)?;
    let f1 = marginal_density(&h, Class::One, &problem)?;
    let f2 = marginal_density(&h, Class::Two, &problem)?;
    println!("exact AUC from the score densities: {:.6}", analytic_auc(&f1, &f2)?);

    let curve = analytic_roc(&f1, &f2, 1e-3)?;
    println!("exact ROC, a few points:");
    let pts = curve.points();
    for k in (0..pts.len()).step_by(pts.len() / 8) {
        println!("  FPF {:.4}  TPF {:.4}  threshold {:+.3}", pts[k].fpf, pts[k].tpf, pts[k].threshold);
    }
    Ok(())
}
