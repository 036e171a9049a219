use nalgebra::{DMatrix, DVector};

use super::LearningError;
use crate::rng::Seed;
use crate::units::RealVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    /// `(θ - a)^2` on a scalar model.
    QuadraticScalar,
    /// `‖Aθ - b‖² + reg·‖θ‖²`.
    LinearRegression,
}

/// One worker's private objective `f_n(θ) = ‖Aθ - b‖² + reg·‖θ‖²`.
///
/// The Hessian `2(AᵀA + reg·I)` and the linear term `2Aᵀb` are cached since
/// every primal update solves against them.
#[derive(Debug, Clone)]
pub struct LocalProblem {
    kind: LossKind,
    features: DMatrix<f64>,
    targets: DVector<f64>,
    regularization: f64,
    hessian: DMatrix<f64>,
    linear: DVector<f64>,
}

impl LocalProblem {
    pub fn scalar_quadratic(center: f64) -> Self {
        Self::build(
            LossKind::QuadraticScalar,
            DMatrix::from_element(1, 1, 1.0),
            DVector::from_element(1, center),
            0.0,
        )
    }

    pub fn linear_regression(
        features: DMatrix<f64>,
        targets: DVector<f64>,
        regularization: f64,
    ) -> Result<Self, LearningError> {
        if features.nrows() == 0 || features.ncols() == 0 {
            return Err(LearningError::EmptyProblem);
        }
        if features.nrows() != targets.len() {
            return Err(LearningError::DimensionMismatch {
                expected: features.nrows(),
                found: targets.len(),
            });
        }
        if !(regularization >= 0.0 && regularization.is_finite()) {
            return Err(LearningError::InvalidParameter(
                "regularization must be >= 0",
            ));
        }
        if features
            .iter()
            .chain(targets.iter())
            .any(|x| !x.is_finite())
        {
            return Err(LearningError::InvalidParameter("data must be finite"));
        }
        Ok(Self::build(
            LossKind::LinearRegression,
            features,
            targets,
            regularization,
        ))
    }

    fn build(
        kind: LossKind,
        features: DMatrix<f64>,
        targets: DVector<f64>,
        regularization: f64,
    ) -> Self {
        let d = features.ncols();
        let hessian =
            (features.transpose() * &features + DMatrix::identity(d, d) * regularization) * 2.0;
        let linear = features.transpose() * &targets * 2.0;
        Self {
            kind,
            features,
            targets,
            regularization,
            hessian,
            linear,
        }
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn samples(&self) -> usize {
        self.features.nrows()
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn targets(&self) -> &DVector<f64> {
        &self.targets
    }

    pub fn regularization(&self) -> f64 {
        self.regularization
    }

    pub(crate) fn hessian(&self) -> &DMatrix<f64> {
        &self.hessian
    }

    pub(crate) fn linear(&self) -> &DVector<f64> {
        &self.linear
    }

    pub fn value(&self, theta: &DVector<f64>) -> f64 {
        let r = &self.features * theta - &self.targets;
        r.norm_squared() + self.regularization * theta.norm_squared()
    }

    pub fn gradient(&self, theta: &DVector<f64>) -> DVector<f64> {
        &self.hessian * theta - &self.linear
    }
}

/// Exact minimizer of `Σ f_n(θ)` over one shared `θ`, by a Cholesky solve of
/// the aggregated normal equations.
pub fn centralized_solution(problems: &[LocalProblem]) -> Result<RealVector, LearningError> {
    let d = check_dims(problems)?;
    let mut h = DMatrix::zeros(d, d);
    let mut g = DVector::zeros(d);
    for p in problems {
        h += p.hessian();
        g += p.linear();
    }
    let scale = h.diagonal().amax().max(f64::MIN_POSITIVE);
    let chol = h.cholesky().ok_or(LearningError::SingularSystem)?;
    if chol
        .l_dirty()
        .diagonal()
        .iter()
        .any(|&l| l * l <= scale * 1e-12)
    {
        return Err(LearningError::SingularSystem);
    }
    RealVector::from_dvector(chol.solve(&g)).map_err(|_| LearningError::SingularSystem)
}

/// `Σ_n f_n(θ)` for a shared model.
pub fn total_objective(problems: &[LocalProblem], theta: &DVector<f64>) -> f64 {
    problems.iter().map(|p| p.value(theta)).sum()
}

pub(crate) fn check_dims(problems: &[LocalProblem]) -> Result<usize, LearningError> {
    let first = problems.first().ok_or(LearningError::EmptyProblem)?;
    let d = first.dim();
    for p in problems {
        if p.dim() != d {
            return Err(LearningError::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
    }
    Ok(d)
}

/// Synthetic linear-regression workload split across workers.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticRegression {
    pub workers: usize,
    pub dim: usize,
    pub samples_per_worker: usize,
    /// Std-dev of the additive target noise.
    pub noise: f64,
    /// Std-dev of each worker's private perturbation of the ground-truth model,
    /// which makes the local optima disagree.
    pub heterogeneity: f64,
    pub regularization: f64,
}

impl Default for SyntheticRegression {
    fn default() -> Self {
        Self {
            workers: 18,
            dim: 14,
            samples_per_worker: 20,
            noise: 0.1,
            heterogeneity: 0.5,
            regularization: 0.0,
        }
    }
}

impl SyntheticRegression {
    /// Rows are standard normal scaled by `1/sqrt(samples)`, so each worker's
    /// Gram matrix is close to the identity.
    pub fn generate(&self, seed: Seed) -> Result<Vec<LocalProblem>, LearningError> {
        if self.workers == 0 || self.dim == 0 || self.samples_per_worker == 0 {
            return Err(LearningError::EmptyProblem);
        }
        let mut rng = seed.derive(0x5EED_DA7A).rng();
        let truth = DVector::from_fn(self.dim, |_, _| rng.standard_normal());
        let scale = 1.0 / (self.samples_per_worker as f64).sqrt();
        (0..self.workers)
            .map(|_| {
                let local = &truth
                    + DVector::from_fn(self.dim, |_, _| self.heterogeneity * rng.standard_normal());
                let a = DMatrix::from_fn(self.samples_per_worker, self.dim, |_, _| {
                    scale * rng.standard_normal()
                });
                let noise = DVector::from_fn(self.samples_per_worker, |_, _| {
                    self.noise * rng.standard_normal()
                });
                let b = &a * local + noise;
                LocalProblem::linear_regression(a, b, self.regularization)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratics(centers: &[f64]) -> Vec<LocalProblem> {
        centers
            .iter()
            .map(|&a| LocalProblem::scalar_quadratic(a))
            .collect()
    }

    #[test]
    fn mean_of_scalar_quadratics() {
        let ps = quadratics(&[1.0, 2.0, 3.0, 4.0]);
        let theta = centralized_solution(&ps).unwrap();
        assert!((theta[0] - 2.5).abs() < 1e-12);
        assert!((total_objective(&ps, &theta) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn single_worker_is_local_least_squares() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 2.0]);
        let p = LocalProblem::linear_regression(a.clone(), b.clone(), 0.0).unwrap();
        let theta = centralized_solution(std::slice::from_ref(&p)).unwrap();
        // normal equations solved independently via QR
        let qr = a.clone().qr();
        let expected = qr.r().try_inverse().unwrap() * qr.q().transpose() * b;
        assert!((theta.as_dvector() - expected).amax() < 1e-12);
    }

    #[test]
    fn duplicated_data_same_optimum() {
        let ps = SyntheticRegression {
            workers: 1,
            ..Default::default()
        }
        .generate(Seed(3))
        .unwrap();
        let one = centralized_solution(&ps).unwrap();
        let two = centralized_solution(&[ps[0].clone(), ps[0].clone()]).unwrap();
        assert!((one.as_dvector() - two.as_dvector()).amax() < 1e-10);
    }

    #[test]
    fn rank_deficient_without_regularization_is_singular() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        let p = LocalProblem::linear_regression(a.clone(), b.clone(), 0.0).unwrap();
        assert_eq!(
            centralized_solution(&[p]).unwrap_err(),
            LearningError::SingularSystem
        );
        let p = LocalProblem::linear_regression(a, b, 0.1).unwrap();
        assert!(centralized_solution(&[p]).is_ok());
    }

    #[test]
    fn gradient_vanishes_at_centralized_optimum() {
        let ps = SyntheticRegression::default().generate(Seed(9)).unwrap();
        let theta = centralized_solution(&ps).unwrap();
        let g = ps
            .iter()
            .fold(DVector::zeros(14), |acc, p| acc + p.gradient(&theta));
        assert!(g.amax() < 1e-9);
    }

    #[test]
    fn rejects_mismatched_targets() {
        let err = LocalProblem::linear_regression(DMatrix::zeros(3, 2), DVector::zeros(2), 0.0)
            .unwrap_err();
        assert!(matches!(err, LearningError::DimensionMismatch { .. }));
    }
}
