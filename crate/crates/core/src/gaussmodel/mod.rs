//! Multinormal class models: density, sampling, plug-in estimation and the
//! Mahalanobis separation between two means.

mod rng;

pub use rng::SeededRng;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::smallmat::{Cholesky, Matrix, Vector};
use crate::Class;

/// Mean and covariance of one class. The covariance is validated as
/// symmetric positive definite and well conditioned on construction, and its
/// Cholesky factor is kept for evaluation and sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianParams {
    mu: Vector,
    sigma: Matrix,
    chol: Cholesky,
}

impl GaussianParams {
    pub fn new(mu: Vector, sigma: Matrix) -> Result<Self> {
        if sigma.rows() != mu.dim() || !sigma.is_square() {
            return Err(Error::Dimension {
                expected: mu.dim(),
                got: sigma.rows(),
            });
        }
        let chol = Cholesky::new(&sigma)?;
        chol.check_conditioning()?;
        Ok(GaussianParams { mu, sigma, chol })
    }

    /// `N(0, I)` in `dim` dimensions.
    pub fn standard(dim: usize) -> Self {
        GaussianParams::new(Vector::zeros(dim), Matrix::identity(dim))
            .expect("identity covariance is SPD")
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }

    pub fn mu(&self) -> &Vector {
        &self.mu
    }

    pub fn sigma(&self) -> &Matrix {
        &self.sigma
    }

    pub fn cholesky(&self) -> &Cholesky {
        &self.chol
    }

    pub fn log_det(&self) -> f64 {
        self.chol.log_det()
    }

    /// Squared Mahalanobis distance of `x` from the mean, `(x−μ)ᵀΣ⁻¹(x−μ)`.
    pub fn mahalanobis_sq_to(&self, x: &[f64], scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        scratch.extend(x.iter().zip(self.mu.iter()).map(|(a, b)| a - b));
        self.chol.forward_in_place(scratch);
        scratch.iter().map(|v| v * v).sum()
    }

    pub fn log_pdf(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x)?;
        let mut scratch = Vec::with_capacity(self.dim());
        Ok(self.log_pdf_unchecked(x.as_slice(), &mut scratch))
    }

    pub(crate) fn log_pdf_unchecked(&self, x: &[f64], scratch: &mut Vec<f64>) -> f64 {
        let q = self.mahalanobis_sq_to(x, scratch);
        -0.5 * q - 0.5 * self.log_det() - 0.5 * self.dim() as f64 * (2.0 * PI).ln()
    }

    fn check_dim(&self, x: &Vector) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// Affine image `x ↦ Aᵀx`: mean `Aᵀμ`, covariance `AᵀΣA`.
    pub fn transformed(&self, a: &Matrix) -> Result<GaussianParams> {
        let at = a.transpose();
        let mu = at.matvec(&self.mu)?;
        let mut sigma = at.matmul(&self.sigma)?.matmul(a)?;
        // restore exact symmetry lost to rounding
        let sym = sigma.add(&sigma.transpose())?.scale(0.5);
        sigma = sym;
        GaussianParams::new(mu, sigma)
    }
}

/// A feature vector with its true class.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    pub features: Vector,
    pub label: Class,
}

/// Multinormal density at `x`.
pub fn mvn_pdf(x: &Vector, params: &GaussianParams) -> Result<f64> {
    params.log_pdf(x).map(f64::exp)
}

/// `n` draws `μ + L·z` with `z` standard normal and `L` the Cholesky factor of Σ.
pub fn mvn_sample(params: &GaussianParams, n: usize, rng: &mut SeededRng) -> Vec<Vector> {
    let p = params.dim();
    let l = params.cholesky().factor();
    let mut z = vec![0.0; p];
    (0..n)
        .map(|_| {
            z.iter_mut().for_each(|zi| *zi = rng.next_std_normal());
            let x = (0..p)
                .map(|i| {
                    let row = l.row(i);
                    params.mu()[i] + (0..=i).map(|k| row[k] * z[k]).sum::<f64>()
                })
                .collect();
            Vector::from_vec(x)
        })
        .collect()
}

/// Plug-in estimates: arithmetic mean and the `1/(n−1)` sample covariance.
///
/// Fewer than two samples leave the covariance undefined (insufficient data);
/// a scatter matrix that is singular or worse than the condition limit is
/// reported as [`Error::IllConditioned`] rather than regularized.
pub fn estimate_params(samples: &[Vector]) -> Result<GaussianParams> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let p = samples[0].dim();
    if let Some(bad) = samples.iter().find(|s| s.dim() != p) {
        return Err(Error::Dimension {
            expected: p,
            got: bad.dim(),
        });
    }
    let mut mean = vec![0.0; p];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(s.iter()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = Matrix::zeros(p, p);
    let mut d = vec![0.0; p];
    for s in samples {
        for (di, (v, m)) in d.iter_mut().zip(s.iter().zip(&mean)) {
            *di = v - m;
        }
        for i in 0..p {
            for j in 0..=i {
                cov[(i, j)] += d[i] * d[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..p {
        for j in 0..=i {
            let v = cov[(i, j)] / denom;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    GaussianParams::new(Vector::from_vec(mean), cov).map_err(|e| match e {
        Error::NotPositiveDefinite { .. } => Error::IllConditioned {
            estimate: f64::INFINITY,
        },
        other => other,
    })
}

/// Squared Mahalanobis distance `(μ₁−μ₂)ᵀΣ⁻¹(μ₁−μ₂)`.
pub fn mahalanobis_sq(mu1: &Vector, mu2: &Vector, sigma: &Matrix) -> Result<f64> {
    if mu1.dim() != mu2.dim() || sigma.rows() != mu1.dim() {
        return Err(Error::Dimension {
            expected: mu1.dim(),
            got: if mu2.dim() != mu1.dim() {
                mu2.dim()
            } else {
                sigma.rows()
            },
        });
    }
    let diff = mu1.sub(mu2);
    let solved = crate::smallmat::spd_solve(sigma, &diff)?;
    Ok(diff.dot(&solved).max(0.0))
}

/// Mahalanobis distance `Δ = [(μ₁−μ₂)ᵀΣ⁻¹(μ₁−μ₂)]^{1/2}`.
pub fn mahalanobis(mu1: &Vector, mu2: &Vector, sigma: &Matrix) -> Result<f64> {
    mahalanobis_sq(mu1, mu2, sigma).map(f64::sqrt)
}
