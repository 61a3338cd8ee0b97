use crate::error::{Error, Result};

use super::{Matrix, Vector};

/// Matrices whose condition estimate exceeds this are treated as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

const SYMMETRY_TOL: f64 = 1e-12;

/// Lower-triangular factor `L` of a symmetric positive-definite `S = L·Lᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn new(s: &Matrix) -> Result<Self> {
        if !s.is_square() {
            return Err(Error::Dimension {
                expected: s.rows(),
                got: s.cols(),
            });
        }
        let asymmetry = s.asymmetry();
        if asymmetry > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { asymmetry });
        }
        let n = s.rows();
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut diag = s[(j, j)];
            for k in 0..j {
                diag -= l[(j, k)] * l[(j, k)];
            }
            if diag <= 0.0 || !diag.is_finite() {
                return Err(Error::NotPositiveDefinite {
                    pivot: j,
                    value: diag,
                });
            }
            let ljj = diag.sqrt();
            l[(j, j)] = ljj;
            for i in j + 1..n {
                // lower triangle only; the upper one was checked for symmetry
                let mut v = s[(i, j)];
                for k in 0..j {
                    v -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = v / ljj;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn factor(&self) -> &Matrix {
        &self.l
    }

    pub fn into_factor(self) -> Matrix {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Cheap lower bound on the 2-norm condition number: `(max Lᵢᵢ / min Lᵢᵢ)²`.
    pub fn condition_estimate(&self) -> f64 {
        let (lo, hi) = (0..self.dim())
            .map(|i| self.l[(i, i)])
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
        (hi / lo).powi(2)
    }

    pub fn check_conditioning(&self) -> Result<()> {
        let estimate = self.condition_estimate();
        if estimate > CONDITION_LIMIT || !estimate.is_finite() {
            Err(Error::IllConditioned { estimate })
        } else {
            Ok(())
        }
    }

    /// `ln |S|` from the factor diagonal.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim()).map(|i| self.l[(i, i)].ln()).sum::<f64>()
    }

    pub fn det(&self) -> f64 {
        self.log_det().exp()
    }

    /// Solves `L·y = v` in place.
    pub fn forward_in_place(&self, v: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let row = self.l.row(i);
            let mut acc = v[i];
            for k in 0..i {
                acc -= row[k] * v[k];
            }
            v[i] = acc / row[i];
        }
    }

    /// Solves `Lᵀ·x = y` in place.
    pub fn backward_in_place(&self, v: &mut [f64]) {
        let n = self.dim();
        for i in (0..n).rev() {
            let mut acc = v[i];
            for k in i + 1..n {
                acc -= self.l[(k, i)] * v[k];
            }
            v[i] = acc / self.l[(i, i)];
        }
    }

    pub fn solve(&self, v: &Vector) -> Result<Vector> {
        if v.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: v.dim(),
            });
        }
        let mut x = v.as_slice().to_vec();
        self.forward_in_place(&mut x);
        self.backward_in_place(&mut x);
        Ok(Vector::from_vec(x))
    }

    /// `‖L⁻¹ d‖²`, i.e. `dᵀ S⁻¹ d`, without forming the inverse.
    pub fn inv_quad_form(&self, d: &[f64], scratch: &mut Vec<f64>) -> f64 {
        scratch.clear();
        scratch.extend_from_slice(d);
        self.forward_in_place(scratch);
        scratch.iter().map(|v| v * v).sum()
    }

    /// Explicit `S⁻¹`.
    pub fn inverse(&self) -> Matrix {
        let n = self.dim();
        let mut inv = Matrix::zeros(n, n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            col.iter_mut().for_each(|c| *c = 0.0);
            col[j] = 1.0;
            self.forward_in_place(&mut col);
            self.backward_in_place(&mut col);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

pub fn cholesky(s: &Matrix) -> Result<Matrix> {
    Cholesky::new(s).map(Cholesky::into_factor)
}

/// Solves `S·x = v` for symmetric positive-definite `S`.
pub fn spd_solve(s: &Matrix, v: &Vector) -> Result<Vector> {
    if v.dim() != s.rows() {
        return Err(Error::Dimension {
            expected: s.rows(),
            got: v.dim(),
        });
    }
    let chol = Cholesky::new(s).map_err(|e| match e {
        Error::NotPositiveDefinite { .. } => Error::IllConditioned {
            estimate: f64::INFINITY,
        },
        other => other,
    })?;
    chol.check_conditioning()?;
    chol.solve(v)
}
