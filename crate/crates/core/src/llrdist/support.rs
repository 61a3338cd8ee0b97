//! Where in `(h, x1)` space the LLR has real preimages.

use crate::bayesllr::TwoClassProblem;
use crate::error::Result;

use super::geometry::{Discriminant, LlrQuadratic};

/// A piece of the x₁ axis. Endpoints flagged `singular` are roots of the
/// discriminant, where the joint density has an inverse-square-root blow-up.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_singular: bool,
    pub hi_singular: bool,
}

impl SupportInterval {
    pub fn contains(&self, x1: f64) -> bool {
        x1 >= self.lo && x1 <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// The x₁ slice of the support at a fixed score value.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportRegion {
    pub h: f64,
    pub discriminant: Discriminant,
    /// False when the score is affine in x₂ and every x₁ has one preimage.
    pub quadratic_in_x2: bool,
    pub intervals: Vec<SupportInterval>,
}

impl SupportRegion {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x1: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(x1))
    }
}

pub fn support_region(h: f64, problem: &TwoClassProblem) -> Result<SupportRegion> {
    let quad = LlrQuadratic::from_problem(problem)?;
    Ok(support_of(&quad, h))
}

/// Interval bookkeeping shared with the marginal integrator.
pub(crate) fn support_of(quad: &LlrQuadratic, h: f64) -> SupportRegion {
    let disc = quad.discriminant();
    let mut region = SupportRegion {
        h,
        discriminant: disc,
        quadratic_in_x2: !quad.is_linear_in_x2(),
        intervals: Vec::new(),
    };
    if !region.quadratic_in_x2 {
        region.intervals.push(SupportInterval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_singular: false,
            hi_singular: false,
        });
        return region;
    }

    let a = disc.x1_sq;
    let b = disc.x1;
    let c = disc.constant + disc.h * h;
    let scale = disc.x1_sq.abs().max(disc.x1.abs()).max(disc.constant.abs()).max(disc.h.abs());

    if a.abs() <= 1e-14 * scale {
        // D affine in x1
        if b.abs() <= 1e-14 * scale {
            if c >= 0.0 {
                region.intervals.push(SupportInterval {
                    lo: f64::NEG_INFINITY,
                    hi: f64::INFINITY,
                    lo_singular: false,
                    hi_singular: false,
                });
            }
        } else {
            let root = -c / b;
            region.intervals.push(if b > 0.0 {
                SupportInterval {
                    lo: root,
                    hi: f64::INFINITY,
                    lo_singular: true,
                    hi_singular: false,
                }
            } else {
                SupportInterval {
                    lo: f64::NEG_INFINITY,
                    hi: root,
                    lo_singular: false,
                    hi_singular: true,
                }
            });
        }
        return region;
    }

    let disc_x = b * b - 4.0 * a * c;
    let tol = 1e-12 * (b * b + (4.0 * a * c).abs());
    if a < 0.0 {
        // bounded interval between the roots, empty if they are complex
        if disc_x < -tol {
            return region;
        }
        let center = -b / (2.0 * a);
        let half = disc_x.max(0.0).sqrt() / (2.0 * a.abs());
        region.intervals.push(SupportInterval {
            lo: center - half,
            hi: center + half,
            lo_singular: true,
            hi_singular: true,
        });
    } else if disc_x <= tol {
        // D ≥ 0 everywhere (touching zero at most once)
        region.intervals.push(SupportInterval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_singular: false,
            hi_singular: false,
        });
    } else {
        let sq = disc_x.sqrt();
        let q = -0.5 * (b + b.signum() * sq);
        let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
        let (lo_root, hi_root) = (r1.min(r2), r1.max(r2));
        region.intervals.push(SupportInterval {
            lo: f64::NEG_INFINITY,
            hi: lo_root,
            lo_singular: false,
            hi_singular: true,
        });
        region.intervals.push(SupportInterval {
            lo: hi_root,
            hi: f64::INFINITY,
            lo_singular: true,
            hi_singular: false,
        });
    }
    region
}

/// Range of score values with a non-empty support slice: `(lower, upper)`,
/// infinite where unbounded.
pub fn score_support_bounds(problem: &TwoClassProblem) -> Result<(f64, f64)> {
    let quad = LlrQuadratic::from_problem(problem)?;
    Ok(score_bounds_of(&quad))
}

pub(crate) fn score_bounds_of(quad: &LlrQuadratic) -> (f64, f64) {
    if quad.is_linear_in_x2() {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    let d = quad.discriminant();
    let scale = d.x1_sq.abs().max(d.x1.abs()).max(d.constant.abs()).max(d.h.abs());
    if d.x1_sq > 1e-14 * scale {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    if d.x1_sq < -1e-14 * scale {
        // max over x1 of D is constant + h·h − x1²/(4·x1_sq); non-negative beyond h*
        let h_star = (d.x1 * d.x1 / (4.0 * d.x1_sq) - d.constant) / d.h;
        return if d.h > 0.0 {
            (h_star, f64::INFINITY)
        } else {
            (f64::NEG_INFINITY, h_star)
        };
    }
    if d.x1.abs() > 1e-14 * scale {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    let h_star = -d.constant / d.h;
    if d.h > 0.0 {
        (h_star, f64::INFINITY)
    } else {
        (f64::NEG_INFINITY, h_star)
    }
}
