//! Exact distribution of the LLR score for two-dimensional problems.
//!
//! For fixed `(h, x1)` the score equation is quadratic in x₂, so the map
//! `(x1, x2) ↦ (h, x1)` is two-to-one. The joint density of `(h, x1)` is the
//! branch sum of feature densities over `|∂h/∂x₂|`, and the score density is
//! its integral over x₁. Higher dimensions are handled by simulation only.

mod geometry;
mod histogram;
mod marginal;
mod simdiag;
mod support;

pub use geometry::{invert_llr, joint_density, Discriminant, LlrQuadratic};
pub use histogram::{freedman_diaconis_bins, histogram_vs_analytic, HistogramBin, HistogramComparison};
pub use marginal::{
    analytic_auc, analytic_roc, marginal_density, marginal_density_with, score_grid,
    score_moments, DensityGrid, MarginalOptions,
};
pub use simdiag::{simdiag, transform_problem, DiagonalizedProblem, SimDiag};
pub use support::{score_support_bounds, support_region, SupportInterval, SupportRegion};

use crate::bayesllr::TwoClassProblem;
use crate::gaussmodel::{mvn_sample, SeededRng};
use crate::rocauc::ScoreSet;
use crate::Result;

/// LLR scores of `n1` and `n2` vectors drawn from the two class models.
pub fn simulate_scores(
    problem: &TwoClassProblem,
    n1: usize,
    n2: usize,
    rng: &mut SeededRng,
) -> Result<ScoreSet> {
    let scorer = problem.scorer();
    let s1 = scorer.score_all(&mvn_sample(&problem.class1, n1, rng));
    let s2 = scorer.score_all(&mvn_sample(&problem.class2, n2, rng));
    ScoreSet::new(s1, s2)
}
