//! Numerical laboratory for two-class multinormal problems.
//!
//! The crate scores feature vectors by their log-likelihood ratio (LLR),
//! computes the exact distribution of that score in two dimensions by a
//! change of variables plus adaptive quadrature, estimates ROC curves and
//! AUC both nonparametrically and under the binormal model, and runs seeded
//! Monte-Carlo learning-curve experiments for the plug-in Bayes classifier.
//!
//! | module | contents |
//! |--------|----------|
//! | [`smallmat`] | dense matrices, Cholesky, symmetric eigen, Φ and Φ⁻¹ |
//! | [`gaussmodel`] | multinormal density, sampling, estimation, Mahalanobis distance, seeded streams |
//! | [`bayesllr`] | LLR score, Bayes threshold from priors and costs, decision rule |
//! | [`rocauc`] | error fractions, empirical ROC, trapezoid and Mann–Whitney AUC, binormal model |
//! | [`llrdist`] | analytic score densities in 2-D, support region, simultaneous diagonalization |
//! | [`mcharness`] | learning curves and variance study of the plug-in classifier |
//! | [`cli`] | config parsing, CSV tables, SVG plots, command orchestration |
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod bayesllr;
pub mod cli;
pub mod csv;
pub mod error;
pub mod gaussmodel;
pub mod llrdist;
pub mod mcharness;
pub mod quadrature;
pub mod rocauc;
pub mod smallmat;

pub use error::{Error, Result};

use std::fmt;

/// Class identifier. `One` is the class favoured by large scores.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    One,
    Two,
}

impl Class {
    pub fn index(self) -> usize {
        match self {
            Class::One => 1,
            Class::Two => 2,
        }
    }

    pub fn other(self) -> Class {
        match self {
            Class::One => Class::Two,
            Class::Two => Class::One,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// The two-class problem used throughout the documentation and examples:
/// μ₁ = (2, 2), Σ₁ = [[1, .2], [.2, 1]], μ₂ = (1, 1), Σ₂ = [[.3, .1], [.1, .3]],
/// equal priors and 0–1 costs.
pub fn reference_problem() -> bayesllr::TwoClassProblem {
    use smallmat::{Matrix, Vector};
    let class1 = gaussmodel::GaussianParams::new(
        Vector::new(vec![2.0, 2.0]).unwrap(),
        Matrix::from_rows(&[vec![1.0, 0.2], vec![0.2, 1.0]]).unwrap(),
    )
    .unwrap();
    let class2 = gaussmodel::GaussianParams::new(
        Vector::new(vec![1.0, 1.0]).unwrap(),
        Matrix::from_rows(&[vec![0.3, 0.1], vec![0.1, 0.3]]).unwrap(),
    )
    .unwrap();
    bayesllr::TwoClassProblem::symmetric(class1, class2).unwrap()
}
