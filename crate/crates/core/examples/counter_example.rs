//! Exact LLR score densities for the reference problem, compared with
//! simulated scores. The two densities are single-tailed and far from
//! normal, even though the features are.

use std::time::Instant;

use llr_lab::gaussmodel::SeededRng;
use llr_lab::llrdist::{
    histogram_vs_analytic, marginal_density, score_grid, score_support_bounds, simulate_scores,
};
use llr_lab::{reference_problem, Class};

fn main() -> llr_lab::Result<()> {
    let problem = reference_problem();
    let (lo, _) = score_support_bounds(&problem)?;
    println!("score support starts at h* = {lo:.6}");

    let start = Instant::now();
    let h = score_grid(&problem, 2001, 40.0)?;
    let f1 = marginal_density(&h, Class::One, &problem)?;
    let f2 = marginal_density(&h, Class::Two, &problem)?;
    println!(
        "{} grid points on [{:.3}, {:.3}] in {:.2?}",
        h.len(),
        h[0],
        h[h.len() - 1],
        start.elapsed()
    );
    for g in [&f1, &f2] {
        let worst = g.est_error.iter().cloned().fold(0.0, f64::max);
        println!(
            "class {}: integral = {:.8}, worst error estimate {:.1e}, flagged {}",
            g.class,
            g.integral(),
            worst,
            g.flagged()
        );
    }

    let mut worst_ratio: f64 = 0.0;
    for i in 0..h.len() {
        if f1.density[i] > 1e-8 && f2.density[i] > 1e-8 {
            let rel = (f1.density[i] - h[i].exp() * f2.density[i]).abs() / f1.density[i];
            worst_ratio = worst_ratio.max(rel);
        }
    }
    println!("density-ratio law f1 = e^h f2: worst relative gap {worst_ratio:.2e}");

    let mut rng = SeededRng::new(2024, 0);
    let scores = simulate_scores(&problem, 10_000, 10_000, &mut rng)?;
    let ks1 = histogram_vs_analytic(scores.class1(), &f1)?.ks_statistic;
    let ks2 = histogram_vs_analytic(scores.class2(), &f2)?.ks_statistic;
    let cross = histogram_vs_analytic(scores.class1(), &f2)?.ks_statistic;
    println!("KS vs 10^4 simulated scores: class 1 {ks1:.4}, class 2 {ks2:.4}, mismatched {cross:.4}");
    Ok(())
}
