//! Moving to coordinates where both covariances are diagonal leaves every
//! score unchanged and makes the support boundary a simple conic.

use llr_lab::bayesllr::llr_score;
use llr_lab::gaussmodel::{mvn_sample, SeededRng};
use llr_lab::llrdist::{support_region, transform_problem, LlrQuadratic};
use llr_lab::reference_problem;

fn main() -> llr_lab::Result<()> {
    let problem = reference_problem();
    let d = transform_problem(&problem)?;
    println!("W = {:?}", d.transform);
    println!("lambda = {:?}", d.lambda);
    println!("new means: {:?} and {:?}", d.problem.class1.mu(), d.problem.class2.mu());

    let mut worst: f64 = 0.0;
    for x in mvn_sample(&problem.class1, 1000, &mut SeededRng::new(1, 0)) {
        let a = llr_score(&x, &problem)?.0;
        let b = llr_score(&d.map_point(&x)?, &d.problem)?.0;
        worst = worst.max((a - b).abs());
    }
    println!("largest score change over 1000 points: {worst:.1e}");

    for (name, p) in [("original", &problem), ("diagonalized", &d.problem)] {
        let c = LlrQuadratic::from_problem(p)?.discriminant().normalized();
        println!(
            "{name:>12} support conic: {:+.4} {:+.4} h {:+.4} x1 {:+.0} x1^2 >= 0",
            c.constant, c.h, c.x1, c.x1_sq
        );
    }
    for h in [-2.0, 0.0, 2.0] {
        let r = support_region(h, &problem)?;
        for iv in &r.intervals {
            println!("h = {h:+}: x1 in [{:.4}, {:.4}]", iv.lo, iv.hi);
        }
    }
    Ok(())
}
