//! Numerical marginalization of the joint `(h, x1)` density over x₁.
//!
//! At fixed h the integrand behaves like `1/√dist` at each root of the
//! discriminant. Bounded slices use `x1 = c + w·sin θ`, which cancels both
//! endpoint singularities exactly; slices with one singular end use
//! `x1 = s ± u²`. Unbounded slices are clipped to a window of ±12 standard
//! deviations around both class means in the integration coordinate.

use rayon::prelude::*;

use crate::bayesllr::TwoClassProblem;
use crate::csv;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadResult, QuadTolerance};
use crate::rocauc::{RocCurve, RocPoint};
use crate::Class;

use super::geometry::{stable_roots, Bivariate, LlrQuadratic};
use super::support::{score_bounds_of, support_of, SupportRegion};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarginalOptions {
    pub tolerance: QuadTolerance,
    /// Half-width, in standard deviations, of the window used to clip unbounded slices.
    pub window_sds: f64,
}

impl Default for MarginalOptions {
    fn default() -> Self {
        MarginalOptions {
            tolerance: QuadTolerance {
                abs: 1e-15,
                rel: 1e-10,
                max_evals: 1 << 15,
            },
            window_sds: 12.0,
        }
    }
}

/// Tabulated score density `f(h | class)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityGrid {
    pub class: Class,
    pub h_values: Vec<f64>,
    pub density: Vec<f64>,
    /// Quadrature error estimate per point.
    pub est_error: Vec<f64>,
    /// False where the refinement budget ran out; `est_error` then bounds the damage.
    pub converged: Vec<bool>,
}

impl DensityGrid {
    pub fn len(&self) -> usize {
        self.h_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_values.is_empty()
    }

    pub fn flagged(&self) -> usize {
        self.converged.iter().filter(|c| !**c).count()
    }

    /// Running integral of the density from the first grid point, using the
    /// local quadratic interpolant on each cell.
    pub fn cumulative(&self) -> Vec<f64> {
        cumulative_integral(&self.h_values, &self.density)
    }

    pub fn integral(&self) -> f64 {
        self.cumulative().last().copied().unwrap_or(0.0)
    }

    /// CSV with header `h,density,est_error,class`.
    pub fn to_csv(&self) -> String {
        csv::render(
            &["h", "density", "est_error", "class"],
            (0..self.len()).map(|i| {
                vec![
                    csv::format_number(self.h_values[i]),
                    csv::format_number(self.density[i]),
                    csv::format_number(self.est_error[i]),
                    self.class.to_string(),
                ]
            }),
        )
    }
}

fn quadratic_piece(x: [f64; 3], f: [f64; 3], a: f64, b: f64) -> f64 {
    // integral over [a, b] of the Lagrange interpolant through three points
    let prim = |t: f64, i: usize| {
        let (p, q) = match i {
            0 => (x[1], x[2]),
            1 => (x[0], x[2]),
            _ => (x[0], x[1]),
        };
        let denom = (x[i] - p) * (x[i] - q);
        (t * t * t / 3.0 - (p + q) * t * t / 2.0 + p * q * t) / denom
    };
    (0..3).map(|i| f[i] * (prim(b, i) - prim(a, i))).sum()
}

pub(crate) fn cumulative_integral(xs: &[f64], fs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * (xs[1] - xs[0]) * (fs[0] + fs[1]);
        return out;
    }
    for i in 1..n {
        // cell [i-1, i]; pick a stencil of three nodes containing it
        let s = if i + 1 < n { i - 1 } else { n - 3 };
        let xl = [xs[s], xs[s + 1], xs[s + 2]];
        let fl = [fs[s], fs[s + 1], fs[s + 2]];
        // center the local origin to keep the cubic primitive well conditioned
        let c = xl[1];
        let local = [xl[0] - c, xl[1] - c, xl[2] - c];
        out[i] = out[i - 1] + quadratic_piece(local, fl, xs[i - 1] - c, xs[i] - c);
    }
    out
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    lo: f64,
    hi: f64,
    lo_singular: bool,
    hi_singular: bool,
    /// Root of the discriminant at the far side, for one-sided substitutions.
    other_root: Option<f64>,
}

/// Per-class integrator in a fixed orientation.
struct Marginalizer {
    quad: LlrQuadratic,
    density: Bivariate,
    window: (f64, f64),
    tolerance: QuadTolerance,
}

fn window_for(problem: &TwoClassProblem, coord: usize, sds: f64) -> (f64, f64) {
    [Class::One, Class::Two]
        .iter()
        .map(|&c| {
            let g = problem.class(c);
            let m = g.mu()[coord];
            let s = g.sigma()[(coord, coord)].sqrt();
            (m - sds * s, m + sds * s)
        })
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| {
            (lo.min(a), hi.max(b))
        })
}

impl Marginalizer {
    fn new(problem: &TwoClassProblem, class: Class, opts: &MarginalOptions) -> Result<Self> {
        let quad = LlrQuadratic::from_problem(problem)?;
        // integrate over whichever coordinate leaves the score dependent on the other
        let swap = quad.ignores_x2();
        let quad = if swap {
            let s = quad.swapped();
            if s.ignores_x2() {
                return Err(Error::DegenerateGeometry);
            }
            s
        } else {
            quad
        };
        Ok(Marginalizer {
            quad,
            density: Bivariate::new(problem.class(class), swap),
            window: window_for(problem, if swap { 1 } else { 0 }, opts.window_sds),
            tolerance: opts.tolerance,
        })
    }

    fn branch_sum(&self, h: f64, x1: f64, sqrt_d: f64) -> f64 {
        let (alpha, beta, gamma) = self.quad.x2_coefficients(h, x1);
        let (r1, r2) = stable_roots(alpha, beta, gamma, sqrt_d);
        self.density.pdf(x1, r1) + self.density.pdf(x1, r2)
    }

    fn pieces(&self, region: &SupportRegion) -> Vec<Piece> {
        let iv = &region.intervals;
        let raw: Vec<Piece> = match iv.len() {
            2 => vec![
                Piece {
                    lo: iv[0].lo,
                    hi: iv[0].hi,
                    lo_singular: iv[0].lo_singular,
                    hi_singular: iv[0].hi_singular,
                    other_root: Some(iv[1].lo),
                },
                Piece {
                    lo: iv[1].lo,
                    hi: iv[1].hi,
                    lo_singular: iv[1].lo_singular,
                    hi_singular: iv[1].hi_singular,
                    other_root: Some(iv[0].hi),
                },
            ],
            1 => {
                let i = iv[0];
                let other_root = if i.lo_singular && i.hi_singular {
                    None // both ends handled together; see `one_sided`
                } else {
                    None
                };
                vec![Piece {
                    lo: i.lo,
                    hi: i.hi,
                    lo_singular: i.lo_singular,
                    hi_singular: i.hi_singular,
                    other_root,
                }]
            }
            _ => vec![],
        };
        let (wl, wr) = self.window;
        raw.into_iter()
            .filter_map(|p| {
                let mut q = p;
                if p.lo < wl {
                    q.lo = wl;
                    q.lo_singular = false;
                    if p.hi_singular && p.lo_singular {
                        q.other_root = Some(p.lo);
                    }
                }
                if p.hi > wr {
                    q.hi = wr;
                    q.hi_singular = false;
                    if p.hi_singular && p.lo_singular {
                        q.other_root = Some(p.hi);
                    }
                }
                (q.lo < q.hi).then_some(q)
            })
            .collect()
    }

    fn density_at(&self, h: f64) -> QuadResult {
        let mut acc = QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evals: 0,
            converged: true,
        };
        let mut add = |r: QuadResult| {
            acc.value += r.value;
            acc.abs_error += r.abs_error;
            acc.evals += r.evals;
            acc.converged &= r.converged;
        };

        if self.quad.is_linear_in_x2() {
            let (wl, wr) = self.window;
            let mut cuts = vec![wl];
            if self.quad.q12 != 0.0 {
                let pole = -self.quad.l2 / (2.0 * self.quad.q12);
                if pole > wl && pole < wr {
                    cuts.push(pole);
                }
            }
            cuts.push(wr);
            for w in cuts.windows(2) {
                add(integrate(
                    |x1| {
                        let (_, beta, gamma) = self.quad.x2_coefficients(h, x1);
                        if beta == 0.0 {
                            return 0.0;
                        }
                        self.density.pdf(x1, -gamma / beta) / beta.abs()
                    },
                    w[0],
                    w[1],
                    self.tolerance,
                ));
            }
            return acc;
        }

        let region = support_of(&self.quad, h);
        let disc = region.discriminant;
        let a_abs = disc.x1_sq.abs();
        for piece in self.pieces(&region) {
            let r = if piece.lo_singular && piece.hi_singular {
                let c = 0.5 * (piece.lo + piece.hi);
                let w = 0.5 * (piece.hi - piece.lo);
                let root_a = a_abs.sqrt();
                integrate(
                    |theta: f64| {
                        let x1 = c + w * theta.sin();
                        let sqrt_d = root_a * w * theta.cos().max(0.0);
                        self.branch_sum(h, x1, sqrt_d) / root_a
                    },
                    -std::f64::consts::FRAC_PI_2,
                    std::f64::consts::FRAC_PI_2,
                    self.tolerance,
                )
            } else if piece.lo_singular || piece.hi_singular {
                let (s, dir, len) = if piece.lo_singular {
                    (piece.lo, 1.0, piece.hi - piece.lo)
                } else {
                    (piece.hi, -1.0, piece.hi - piece.lo)
                };
                let other = piece.other_root;
                let d1 = disc.x1;
                integrate(
                    |u: f64| {
                        let x1 = s + dir * u * u;
                        let factor = match other {
                            Some(ro) => (a_abs * (x1 - ro).abs()).sqrt(),
                            None => d1.abs().sqrt(),
                        };
                        if factor == 0.0 {
                            return 0.0;
                        }
                        2.0 * self.branch_sum(h, x1, u * factor) / factor
                    },
                    0.0,
                    len.sqrt(),
                    self.tolerance,
                )
            } else {
                integrate(
                    |x1: f64| {
                        let d = disc.eval(h, x1);
                        if d <= 0.0 {
                            return 0.0;
                        }
                        let sd = d.sqrt();
                        self.branch_sum(h, x1, sd) / sd
                    },
                    piece.lo,
                    piece.hi,
                    self.tolerance,
                )
            };
            add(r);
        }
        acc
    }
}

pub fn marginal_density(
    h_values: &[f64],
    class: Class,
    problem: &TwoClassProblem,
) -> Result<DensityGrid> {
    marginal_density_with(h_values, class, problem, &MarginalOptions::default())
}

/// Grid points are evaluated independently (in parallel); results do not
/// depend on evaluation order.
pub fn marginal_density_with(
    h_values: &[f64],
    class: Class,
    problem: &TwoClassProblem,
    opts: &MarginalOptions,
) -> Result<DensityGrid> {
    if h_values.iter().any(|h| !h.is_finite()) {
        return Err(Error::contract("score grid must be finite"));
    }
    if h_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::contract("score grid must be strictly increasing"));
    }
    let m = Marginalizer::new(problem, class, opts)?;
    let results: Vec<QuadResult> = h_values.par_iter().map(|&h| m.density_at(h)).collect();
    for (h, r) in h_values.iter().zip(&results) {
        if !r.converged {
            log::warn!(
                "marginal density at h = {h} did not converge (error estimate {:.3e})",
                r.abs_error
            );
        }
    }
    Ok(DensityGrid {
        class,
        h_values: h_values.to_vec(),
        density: results.iter().map(|r| r.value.max(0.0)).collect(),
        est_error: results.iter().map(|r| r.abs_error).collect(),
        converged: results.iter().map(|r| r.converged).collect(),
    })
}

/// Mean and variance of the score under `class`, in closed form.
pub fn score_moments(problem: &TwoClassProblem, class: Class) -> Result<(f64, f64)> {
    let q = LlrQuadratic::from_problem(problem)?;
    let g = problem.class(class);
    let s = g.sigma();
    let m = g.mu();
    let qm = [
        [q.q11, q.q12],
        [q.q12, q.q22],
    ];
    // E[xᵀQx] = tr(QΣ) + μᵀQμ
    let mut tr_qs = 0.0;
    let mut tr_qsqs = 0.0;
    let mut qs = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            qs[i][j] = (0..2).map(|k| qm[i][k] * s[(k, j)]).sum();
        }
    }
    for i in 0..2 {
        tr_qs += qs[i][i];
        for j in 0..2 {
            tr_qsqs += qs[i][j] * qs[j][i];
        }
    }
    let mqm: f64 = (0..2)
        .map(|i| (0..2).map(|j| m[i] * qm[i][j] * m[j]).sum::<f64>())
        .sum();
    let mean = tr_qs + mqm + q.l1 * m[0] + q.l2 * m[1] + q.k;
    // gradient of the quadratic at the mean
    let g_vec = [
        2.0 * (qm[0][0] * m[0] + qm[0][1] * m[1]) + q.l1,
        2.0 * (qm[1][0] * m[0] + qm[1][1] * m[1]) + q.l2,
    ];
    let gsg: f64 = (0..2)
        .map(|i| (0..2).map(|j| g_vec[i] * s[(i, j)] * g_vec[j]).sum::<f64>())
        .sum();
    Ok((mean, 2.0 * tr_qsqs + gsg))
}

/// Uniform grid of `n` points covering the score distribution of both
/// classes: `±tail_sds` standard deviations around each class mean, clipped
/// to the support.
pub fn score_grid(problem: &TwoClassProblem, n: usize, tail_sds: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::contract("score grid needs at least two points"));
    }
    let quad = LlrQuadratic::from_problem(problem)?;
    let (sup_lo, sup_hi) = score_bounds_of(&quad);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for c in [Class::One, Class::Two] {
        let (mean, var) = score_moments(problem, c)?;
        let sd = var.sqrt();
        lo = lo.min(mean - tail_sds * sd);
        hi = hi.max(mean + tail_sds * sd);
    }
    let lo = lo.max(sup_lo);
    let hi = hi.min(sup_hi);
    if !(hi > lo) {
        return Err(Error::DegenerateGeometry);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

fn check_pair(g1: &DensityGrid, g2: &DensityGrid) -> Result<()> {
    if g1.h_values != g2.h_values {
        return Err(Error::contract("density grids must share their h values"));
    }
    if g1.class != Class::One || g2.class != Class::Two {
        return Err(Error::contract("expected a class-one and a class-two grid"));
    }
    Ok(())
}

/// `P(h₂ < h₁) = ∫ f₁(h)·F₂(h) dh` from two tabulated densities.
pub fn analytic_auc(g1: &DensityGrid, g2: &DensityGrid) -> Result<f64> {
    check_pair(g1, g2)?;
    let cdf2 = g2.cumulative();
    let integrand: Vec<f64> = g1.density.iter().zip(&cdf2).map(|(f, c)| f * c).collect();
    Ok(*cumulative_integral(&g1.h_values, &integrand)
        .last()
        .unwrap_or(&0.0))
}

/// ROC from two tabulated densities, one point per grid threshold with both
/// fractions in `[min_fraction, 1 − min_fraction]`, plus the anchors.
pub fn analytic_roc(g1: &DensityGrid, g2: &DensityGrid, min_fraction: f64) -> Result<RocCurve> {
    check_pair(g1, g2)?;
    let c1 = g1.cumulative();
    let c2 = g2.cumulative();
    let (t1, t2) = (c1[c1.len() - 1], c2[c2.len() - 1]);
    let mut points = vec![RocPoint {
        fpf: 0.0,
        tpf: 0.0,
        threshold: f64::INFINITY,
    }];
    for i in (0..g1.len()).rev() {
        let tpf = (t1 - c1[i]).clamp(0.0, 1.0);
        let fpf = (t2 - c2[i]).clamp(0.0, 1.0);
        let inside = |v: f64| v >= min_fraction && v <= 1.0 - min_fraction;
        if inside(tpf) && inside(fpf) {
            points.push(RocPoint {
                fpf,
                tpf,
                threshold: g1.h_values[i],
            });
        }
    }
    points.push(RocPoint {
        fpf: 1.0,
        tpf: 1.0,
        threshold: f64::NEG_INFINITY,
    });
    RocCurve::from_points(points)
}
