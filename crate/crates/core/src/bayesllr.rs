//! Bayes decision machinery: log-likelihood-ratio score, threshold from
//! priors and costs, and the final decision rule.
//!
//! The threshold is kept apart from the score so that one set of scores can
//! serve every threshold in a sweep.

use crate::error::{Error, Result};
use crate::gaussmodel::GaussianParams;
use crate::smallmat::Vector;
use crate::Class;

/// `costs[i][j]` is the price of deciding class `j+1` for a class-`i+1` case.
pub type CostMatrix = [[f64; 2]; 2];

pub const ZERO_ONE_COSTS: CostMatrix = [[0.0, 1.0], [1.0, 0.0]];

#[derive(Clone, Debug, PartialEq)]
pub struct TwoClassProblem {
    pub class1: GaussianParams,
    pub class2: GaussianParams,
    prior1: f64,
    prior2: f64,
    costs: CostMatrix,
}

impl TwoClassProblem {
    pub fn new(
        class1: GaussianParams,
        class2: GaussianParams,
        prior1: f64,
        prior2: f64,
        costs: CostMatrix,
    ) -> Result<Self> {
        if class1.dim() != class2.dim() {
            return Err(Error::Dimension {
                expected: class1.dim(),
                got: class2.dim(),
            });
        }
        if !(prior1 > 0.0 && prior1 < 1.0 && prior2 > 0.0 && prior2 < 1.0)
            || (prior1 + prior2 - 1.0).abs() > 1e-12
        {
            return Err(Error::domain(format!(
                "priors must lie in (0,1) and sum to 1, got {prior1} and {prior2}"
            )));
        }
        if costs.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::domain("costs must be finite"));
        }
        check_cost_order(&costs)?;
        Ok(TwoClassProblem {
            class1,
            class2,
            prior1,
            prior2,
            costs,
        })
    }

    /// Equal priors, 0–1 costs: threshold zero.
    pub fn symmetric(class1: GaussianParams, class2: GaussianParams) -> Result<Self> {
        TwoClassProblem::new(class1, class2, 0.5, 0.5, ZERO_ONE_COSTS)
    }

    pub fn dim(&self) -> usize {
        self.class1.dim()
    }

    pub fn prior1(&self) -> f64 {
        self.prior1
    }

    pub fn prior2(&self) -> f64 {
        self.prior2
    }

    pub fn costs(&self) -> &CostMatrix {
        &self.costs
    }

    pub fn class(&self, which: Class) -> &GaussianParams {
        match which {
            Class::One => &self.class1,
            Class::Two => &self.class2,
        }
    }

    /// The same problem with the class roles exchanged.
    pub fn swapped(&self) -> TwoClassProblem {
        let c = self.costs;
        TwoClassProblem {
            class1: self.class2.clone(),
            class2: self.class1.clone(),
            prior1: self.prior2,
            prior2: self.prior1,
            costs: [[c[1][1], c[1][0]], [c[0][1], c[0][0]]],
        }
    }

    pub fn scorer(&self) -> LlrScorer<'_> {
        LlrScorer::new(self)
    }
}

fn check_cost_order(costs: &CostMatrix) -> Result<()> {
    let [[c11, c12], [c21, c22]] = *costs;
    if c11 == c12 || c21 == c22 {
        return Err(Error::DegenerateCost);
    }
    if c12 < c11 || c21 < c22 {
        return Err(Error::domain(
            "misclassification costs must exceed correct-decision costs",
        ));
    }
    Ok(())
}

/// Log-likelihood ratio, in nats.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Score(pub f64);

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Threshold(pub f64);

/// Scores many points against one problem, reusing the Cholesky factors.
#[derive(Clone, Debug)]
pub struct LlrScorer<'a> {
    problem: &'a TwoClassProblem,
    half_log_det_ratio: f64,
}

impl<'a> LlrScorer<'a> {
    pub fn new(problem: &'a TwoClassProblem) -> Self {
        LlrScorer {
            problem,
            half_log_det_ratio: 0.5 * (problem.class1.log_det() - problem.class2.log_det()),
        }
    }

    /// `−½[(x−μ₁)ᵀΣ₁⁻¹(x−μ₁) − (x−μ₂)ᵀΣ₂⁻¹(x−μ₂)] − ½ ln(|Σ₁|/|Σ₂|)`.
    ///
    /// `x` must have the problem's dimension.
    pub fn score_slice(&self, x: &[f64], scratch: &mut Vec<f64>) -> f64 {
        let q1 = self.problem.class1.mahalanobis_sq_to(x, scratch);
        let q2 = self.problem.class2.mahalanobis_sq_to(x, scratch);
        -0.5 * (q1 - q2) - self.half_log_det_ratio
    }

    pub fn score(&self, x: &Vector) -> Result<Score> {
        if x.dim() != self.problem.dim() {
            return Err(Error::Dimension {
                expected: self.problem.dim(),
                got: x.dim(),
            });
        }
        let mut scratch = Vec::with_capacity(x.dim());
        Ok(Score(self.score_slice(x.as_slice(), &mut scratch)))
    }

    pub fn score_all(&self, xs: &[Vector]) -> Vec<f64> {
        let mut scratch = Vec::with_capacity(self.problem.dim());
        xs.iter()
            .map(|x| self.score_slice(x.as_slice(), &mut scratch))
            .collect()
    }
}

pub fn llr_score(x: &Vector, problem: &TwoClassProblem) -> Result<Score> {
    problem.scorer().score(x)
}

/// `ln[ Pr₂(c₂₂−c₂₁) / (Pr₁(c₁₁−c₁₂)) ]`, the risk-minimizing threshold on the LLR.
pub fn threshold_from(prior1: f64, prior2: f64, costs: &CostMatrix) -> Result<Threshold> {
    let [[c11, c12], [c21, c22]] = *costs;
    if c11 == c12 || c21 == c22 {
        return Err(Error::DegenerateCost);
    }
    let ratio = prior2 * (c22 - c21) / (prior1 * (c11 - c12));
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::domain(format!(
            "threshold ratio {ratio} is not a positive finite number"
        )));
    }
    Ok(Threshold(ratio.ln()))
}

pub fn bayes_threshold(problem: &TwoClassProblem) -> Result<Threshold> {
    threshold_from(problem.prior1, problem.prior2, &problem.costs)
}

/// Class one when the score exceeds the threshold; ties go to class two.
pub fn classify(score: Score, th: Threshold) -> Class {
    if score.0 > th.0 {
        Class::One
    } else {
        Class::Two
    }
}
