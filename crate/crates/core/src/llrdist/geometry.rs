//! The 2-D LLR as an explicit quadratic and its inversion in x₂.

use crate::bayesllr::TwoClassProblem;
use crate::error::{Error, Result};
use crate::gaussmodel::GaussianParams;
use crate::Class;

/// `h(x) = q11·x1² + 2·q12·x1·x2 + q22·x2² + l1·x1 + l2·x2 + k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LlrQuadratic {
    pub q11: f64,
    pub q12: f64,
    pub q22: f64,
    pub l1: f64,
    pub l2: f64,
    pub k: f64,
}

pub(crate) fn require_2d(problem: &TwoClassProblem) -> Result<()> {
    if problem.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: problem.dim(),
        });
    }
    Ok(())
}

impl LlrQuadratic {
    pub fn from_problem(problem: &TwoClassProblem) -> Result<Self> {
        require_2d(problem)?;
        let a = problem.class1.cholesky().inverse();
        let b = problem.class2.cholesky().inverse();
        let m1 = problem.class1.mu();
        let m2 = problem.class2.mu();
        let am1 = a.matvec(m1)?;
        let bm2 = b.matvec(m2)?;
        let k = -0.5 * (m1.dot(&am1) - m2.dot(&bm2))
            - 0.5 * (problem.class1.log_det() - problem.class2.log_det());
        Ok(LlrQuadratic {
            q11: -0.5 * (a[(0, 0)] - b[(0, 0)]),
            q12: -0.25 * ((a[(0, 1)] - b[(0, 1)]) + (a[(1, 0)] - b[(1, 0)])),
            q22: -0.5 * (a[(1, 1)] - b[(1, 1)]),
            l1: am1[0] - bm2[0],
            l2: am1[1] - bm2[1],
            k,
        })
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        self.q11 * x1 * x1
            + 2.0 * self.q12 * x1 * x2
            + self.q22 * x2 * x2
            + self.l1 * x1
            + self.l2 * x2
            + self.k
    }

    /// Roles of the two coordinates exchanged.
    pub fn swapped(&self) -> Self {
        LlrQuadratic {
            q11: self.q22,
            q12: self.q12,
            q22: self.q11,
            l1: self.l2,
            l2: self.l1,
            k: self.k,
        }
    }

    fn scale(&self) -> f64 {
        [self.q11, self.q12, self.q22, self.l1, self.l2]
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn negligible(&self, v: f64) -> bool {
        v.abs() <= 1e-14 * self.scale()
    }

    /// No x₂² term: for fixed x₁ the score is affine in x₂.
    pub fn is_linear_in_x2(&self) -> bool {
        self.negligible(self.q22)
    }

    /// The score does not depend on x₂ at all.
    pub fn ignores_x2(&self) -> bool {
        self.is_linear_in_x2() && self.negligible(self.q12) && self.negligible(self.l2)
    }

    /// Coefficients of `α·x2² + β·x2 + γ = 0` at fixed `(h, x1)`.
    pub(crate) fn x2_coefficients(&self, h: f64, x1: f64) -> (f64, f64, f64) {
        (
            self.q22,
            2.0 * self.q12 * x1 + self.l2,
            self.q11 * x1 * x1 + self.l1 * x1 + self.k - h,
        )
    }

    /// `D(h, x1) = β² − 4αγ` as a polynomial in x₁ and h.
    pub fn discriminant(&self) -> Discriminant {
        Discriminant {
            x1_sq: 4.0 * (self.q12 * self.q12 - self.q22 * self.q11),
            x1: 4.0 * (self.q12 * self.l2 - self.q22 * self.l1),
            constant: self.l2 * self.l2 - 4.0 * self.q22 * self.k,
            h: 4.0 * self.q22,
        }
    }
}

/// `D(h, x1) = x1_sq·x1² + x1·x1 + constant + h·h`; real preimages of
/// `(h, x1)` exist where `D ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Discriminant {
    pub x1_sq: f64,
    pub x1: f64,
    pub constant: f64,
    pub h: f64,
}

impl Discriminant {
    pub fn eval(&self, h: f64, x1: f64) -> f64 {
        self.x1_sq * x1 * x1 + self.x1 * x1 + self.constant + self.h * h
    }

    /// Rescaled so the x₁² coefficient is ±1 (the conic in its printed form).
    pub fn normalized(&self) -> Discriminant {
        let s = self.x1_sq.abs();
        if s == 0.0 {
            return *self;
        }
        Discriminant {
            x1_sq: self.x1_sq / s,
            x1: self.x1 / s,
            constant: self.constant / s,
            h: self.h / s,
        }
    }
}

/// Real x₂ solutions of `h(x1, x2) = h`: none, one (tangency or affine case) or two.
pub fn invert_llr(h: f64, x1: f64, problem: &TwoClassProblem) -> Result<Vec<f64>> {
    let quad = LlrQuadratic::from_problem(problem)?;
    invert_quadratic(&quad, h, x1)
}

pub(crate) fn invert_quadratic(quad: &LlrQuadratic, h: f64, x1: f64) -> Result<Vec<f64>> {
    let (alpha, beta, gamma) = quad.x2_coefficients(h, x1);
    if quad.is_linear_in_x2() {
        if quad.negligible(beta) {
            return Err(Error::DegenerateGeometry);
        }
        return Ok(vec![-gamma / beta]);
    }
    let d = beta * beta - 4.0 * alpha * gamma;
    let tol = 1e-12 * (beta * beta + (4.0 * alpha * gamma).abs());
    if d < -tol {
        return Ok(vec![]);
    }
    if d <= tol {
        return Ok(vec![-beta / (2.0 * alpha)]);
    }
    let (r1, r2) = stable_roots(alpha, beta, gamma, d.sqrt());
    Ok(vec![r1.min(r2), r1.max(r2)])
}

/// Roots of `αt² + βt + γ` given `√(β² − 4αγ)`, avoiding cancellation.
pub(crate) fn stable_roots(alpha: f64, beta: f64, gamma: f64, sqrt_d: f64) -> (f64, f64) {
    let q = -0.5 * (beta + beta.signum() * sqrt_d);
    if q == 0.0 {
        let r = -beta / (2.0 * alpha);
        return (r, r);
    }
    (q / alpha, gamma / q)
}

/// Fast density of a 2-D normal, optionally with its coordinates exchanged.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Bivariate {
    m1: f64,
    m2: f64,
    p11: f64,
    p12: f64,
    p22: f64,
    log_norm: f64,
}

impl Bivariate {
    pub(crate) fn new(params: &GaussianParams, swap: bool) -> Self {
        let inv = params.cholesky().inverse();
        let (i, j) = if swap { (1, 0) } else { (0, 1) };
        Bivariate {
            m1: params.mu()[i],
            m2: params.mu()[j],
            p11: inv[(i, i)],
            p12: 0.5 * (inv[(i, j)] + inv[(j, i)]),
            p22: inv[(j, j)],
            log_norm: -(2.0 * std::f64::consts::PI).ln() - 0.5 * params.log_det(),
        }
    }

    pub(crate) fn pdf(&self, x1: f64, x2: f64) -> f64 {
        let d1 = x1 - self.m1;
        let d2 = x2 - self.m2;
        let q = self.p11 * d1 * d1 + 2.0 * self.p12 * d1 * d2 + self.p22 * d2 * d2;
        (self.log_norm - 0.5 * q).exp()
    }
}

/// Joint density of `(h, x1)` under `class`: the sum over the x₂ preimages of
/// the feature density divided by `|∂h/∂x₂|`.
pub fn joint_density(h: f64, x1: f64, class: Class, problem: &TwoClassProblem) -> Result<f64> {
    let quad = LlrQuadratic::from_problem(problem)?;
    let density = Bivariate::new(problem.class(class), false);
    let roots = invert_quadratic(&quad, h, x1)?;
    let mut total = 0.0;
    for x2 in roots {
        let (alpha, beta, _) = quad.x2_coefficients(h, x1);
        let jac = (2.0 * alpha * x2 + beta).abs();
        if jac < 1e-12 {
            return Err(Error::Singularity { x1, x2 });
        }
        total += density.pdf(x1, x2) / jac;
    }
    Ok(total)
}
