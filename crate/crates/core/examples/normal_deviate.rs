//! Straight-line fits in normal-deviate coordinates. With equal class
//! covariances the scores are normal and the line fits exactly with unit
//! slope; the reference problem bends the curve away from any line.

use llr_lab::bayesllr::TwoClassProblem;
use llr_lab::gaussmodel::GaussianParams;
use llr_lab::llrdist::{analytic_roc, marginal_density, score_grid};
use llr_lab::rocauc::{binormal_auc, normal_deviate_fit};
use llr_lab::smallmat::{Matrix, Vector};
use llr_lab::{reference_problem, Class};

fn report(name: &str, problem: &TwoClassProblem) -> llr_lab::Result<()> {
    let h = score_grid(problem, 4001, 10.0)?;
    let f1 = marginal_density(&h, Class::One, problem)?;
    let f2 = marginal_density(&h, Class::Two, problem)?;
    let roc = analytic_roc(&f1, &f2, 1e-4)?;
    let fit = normal_deviate_fit(&roc)?;
    println!(
        "{name}: a = {:.4}, b = {:.4}, rms residual {:.2e} over {} points, binormal AUC {:.4}",
        fit.a,
        fit.b,
        fit.residual,
        fit.n_points,
        binormal_auc(fit.a, fit.b)?
    );
    Ok(())
}

fn main() -> llr_lab::Result<()> {
    let sigma = Matrix::from_rows(&[vec![1.0, 0.3], vec![0.3, 0.8]])?;
    let equal = TwoClassProblem::symmetric(
        GaussianParams::new(Vector::new(vec![1.0, 0.5])?, sigma.clone())?,
        GaussianParams::new(Vector::new(vec![0.0, 0.0])?, sigma)?,
    )?;
    report("equal covariances", &equal)?;
    report("reference problem", &reference_problem())?;
    Ok(())
}
