//! Simultaneous diagonalization of the two class covariances.

use crate::bayesllr::TwoClassProblem;
use crate::error::{Error, Result};
use crate::smallmat::{symmetric_eigen, Cholesky, Matrix, Vector};

/// `W` with `Wᵀ·Σ₁·W = I` and `Wᵀ·Σ₂·W = diag(lambda)`, lambda descending.
#[derive(Clone, Debug, PartialEq)]
pub struct SimDiag {
    pub transform: Matrix,
    pub lambda: Vec<f64>,
}

/// The problem expressed in the coordinates `y = Wᵀx`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalizedProblem {
    pub transform: Matrix,
    pub problem: TwoClassProblem,
    pub lambda: Vec<f64>,
}

impl DiagonalizedProblem {
    /// Image `Wᵀx` of a point in the original coordinates.
    pub fn map_point(&self, x: &Vector) -> Result<Vector> {
        self.transform.transpose().matvec(x)
    }
}

pub fn simdiag(sigma1: &Matrix, sigma2: &Matrix) -> Result<SimDiag> {
    if sigma1.rows() != sigma2.rows() || !sigma2.is_square() {
        return Err(Error::Dimension {
            expected: sigma1.rows(),
            got: sigma2.rows(),
        });
    }
    let n = sigma1.rows();
    let c1 = Cholesky::new(sigma1)?;
    Cholesky::new(sigma2)?;

    // L⁻¹ column by column
    let mut linv = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|v| *v = 0.0);
        col[j] = 1.0;
        c1.forward_in_place(&mut col);
        for i in 0..n {
            linv[i * n + j] = col[i];
        }
    }
    let linv = Matrix::new(n, n, linv)?;
    let m = linv.matmul(sigma2)?.matmul(&linv.transpose())?;
    let m = m.add(&m.transpose())?.scale(0.5);
    let eig = symmetric_eigen(&m)?;
    let transform = linv.transpose().matmul(&eig.vectors)?;
    Ok(SimDiag {
        transform,
        lambda: eig.values,
    })
}

pub fn transform_problem(problem: &TwoClassProblem) -> Result<DiagonalizedProblem> {
    let sd = simdiag(problem.class1.sigma(), problem.class2.sigma())?;
    let class1 = problem.class1.transformed(&sd.transform)?;
    let class2 = problem.class2.transformed(&sd.transform)?;
    // the map is invertible, so log|W| cancels in the ratio and scores are unchanged
    let transformed = TwoClassProblem::new(
        class1,
        class2,
        problem.prior1(),
        problem.prior2(),
        *problem.costs(),
    )?;
    Ok(DiagonalizedProblem {
        transform: sd.transform,
        problem: transformed,
        lambda: sd.lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayesllr::llr_score;

    fn residuals(s1: &Matrix, s2: &Matrix) -> (f64, f64, Vec<f64>) {
        let d = simdiag(s1, s2).unwrap();
        let w = &d.transform;
        let a = w.transpose().matmul(s1).unwrap().matmul(w).unwrap();
        let b = w.transpose().matmul(s2).unwrap().matmul(w).unwrap();
        let r1 = a.sub(&Matrix::identity(s1.rows())).unwrap().max_abs();
        let r2 = b.sub(&Matrix::diagonal(&d.lambda)).unwrap().max_abs();
        (r1, r2, d.lambda)
    }

    #[test]
    fn reference_pair() {
        let p = crate::reference_problem();
        let (r1, r2, lambda) = residuals(p.class1.sigma(), p.class2.sigma());
        assert!(r1 < 1e-10 && r2 < 1e-10);
        assert!((lambda[0] - 1.0 / 3.0).abs() < 1e-12 && (lambda[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn equal_covariances_give_unit_lambda() {
        let s = Matrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let (_, _, lambda) = residuals(&s, &s);
        assert!(lambda.iter().all(|l| (l - 1.0).abs() < 1e-12));
    }

    #[test]
    fn scores_are_invariant() {
        let p = crate::reference_problem();
        let d = transform_problem(&p).unwrap();
        for (a, b) in [(0.0, 0.0), (1.5, -0.3), (3.0, 2.5)] {
            let x = Vector::new(vec![a, b]).unwrap();
            let y = d.map_point(&x).unwrap();
            let h0 = llr_score(&x, &p).unwrap().0;
            let h1 = llr_score(&y, &d.problem).unwrap().0;
            assert!((h0 - h1).abs() < 1e-10, "{h0} vs {h1}");
        }
    }

    #[test]
    fn rejects_non_spd() {
        let bad = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(simdiag(&Matrix::identity(2), &bad).is_err());
        assert!(simdiag(&bad, &Matrix::identity(2)).is_err());
    }
}
