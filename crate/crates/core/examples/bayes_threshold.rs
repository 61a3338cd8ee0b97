//! Priors and costs move the decision threshold on the LLR. A sweep over
//! thresholds on simulated data shows the risk bottoming out at the
//! computed value.

use llr_lab::bayesllr::{bayes_threshold, classify, Score, Threshold, TwoClassProblem};
use llr_lab::gaussmodel::{mvn_sample, SeededRng};
use llr_lab::{reference_problem, Class};

fn main() -> llr_lab::Result<()> {
    let base = reference_problem();
    let costs = [[0.0, 4.0], [1.0, 0.0]];
    let problem = TwoClassProblem::new(base.class1.clone(), base.class2.clone(), 0.25, 0.75, costs)?;
    let th = bayes_threshold(&problem)?;
    println!("prior 0.25 / 0.75, missing class 1 costs 4: threshold {:+.4}", th.0);

    let n = 200_000;
    let n1 = n / 4;
    let mut rng = SeededRng::new(3, 0);
    let scorer = problem.scorer();
    let mut cases = Vec::with_capacity(n);
    for x in mvn_sample(&problem.class1, n1, &mut rng) {
        cases.push((Class::One, scorer.score(&x)?.0));
    }
    for x in mvn_sample(&problem.class2, n - n1, &mut rng) {
        cases.push((Class::Two, scorer.score(&x)?.0));
    }
    let risk = |t: f64| {
        cases
            .iter()
            .map(|&(truth, h)| costs[truth.index() - 1][classify(Score(h), Threshold(t)).index() - 1])
            .sum::<f64>()
            / n as f64
    };
    for k in -4..=4 {
        let t = th.0 + 0.5 * k as f64;
        let mark = if k == 0 { "  <- Bayes" } else { "" };
        println!("threshold {t:+.3}: risk {:.5}{mark}", risk(t));
    }
    Ok(())
}
