//! Independent verifiers: a fundamental-matrix shooting solver for the
//! scattering problem, a least-squares check of the quadratic dispersion and
//! an eigen-residual probe.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::params::ModelParams;
use crate::scattering::{propagation_matrix, Matrix2c, MediumSpec, ScatterError, ScatterResult};
use crate::spectrum::{DispersionBranch, EffectiveHamiltonian, Vector6c};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("discretisation error estimate {estimate:e} exceeds tolerance {tolerance:e} at {steps} steps")]
    StepCountInsufficient {
        estimate: f64,
        tolerance: f64,
        steps: usize,
    },
    #[error("need at least {needed} samples inside the fit window, found {found}")]
    InsufficientSamples { needed: usize, found: usize },
    #[error("step count must be even and at least 2")]
    InvalidStepCount,
    #[error(transparent)]
    Scatter(#[from] ScatterError),
}

/// Fixed-step RK4 configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingConfig {
    pub step_count: usize,
    pub tolerance: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            step_count: 20_000,
            tolerance: 1e-7,
        }
    }
}

pub const MIN_ACCEPTANCE_STEPS: usize = 1_000;

/// Fundamental matrix Y(L) of `dY/dz = −i·M(z)·Y`, Y(0) = I, by classical
/// RK4 with `steps` equal steps.
pub fn fundamental_matrix(
    p: &ModelParams,
    med: &MediumSpec,
    steps: usize,
) -> Result<Matrix2c, ScatterError> {
    let l = med.length;
    if l == 0.0 {
        return Ok(Matrix2c::identity());
    }
    let h = l / steps as f64;
    let mi = Complex64::new(0.0, -1.0);
    let rhs = |z: f64, y: &Matrix2c| -> Result<Matrix2c, ScatterError> {
        Ok(propagation_matrix(p, med.level_shift(z))? * y * mi)
    };
    let mut y = Matrix2c::identity();
    let hc = Complex64::new(h, 0.0);
    let half = Complex64::new(h / 2.0, 0.0);
    let two = Complex64::new(2.0, 0.0);
    for i in 0..steps {
        let z = i as f64 * h;
        let k1 = rhs(z, &y)?;
        let k2 = rhs(z + h / 2.0, &(y + k1 * half))?;
        let k3 = rhs(z + h / 2.0, &(y + k2 * half))?;
        let k4 = rhs(z + h, &(y + k3 * hc))?;
        y += (k1 + (k2 + k3) * two + k4) * (hc / 6.0);
    }
    Ok(y)
}

/// Apply E₊(0) = 1, E₋(L) = 0 to the fundamental matrix: solve
/// Y·(1, r)ᵀ = (t, 0)ᵀ for the unknowns (r, t).
fn boundary_solve(y: &Matrix2c) -> Result<ScatterResult, ScatterError> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let norm = y.norm();
    let ill = ScatterError::IllConditionedBVP {
        u22: y[(1, 1)].norm(),
        norm,
    };
    if y[(1, 1)].norm() < crate::scattering::ILL_CONDITIONED_TOL * norm {
        return Err(ill);
    }
    let system = Matrix2c::new(y[(0, 1)], -one, y[(1, 1)], zero);
    let rhs = nalgebra::Vector2::new(-y[(0, 0)], -y[(1, 0)]);
    let x = system.lu().solve(&rhs).ok_or(ill)?;
    Ok(ScatterResult::from_amplitudes(x[1], x[0]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootingResult {
    pub result: ScatterResult,
    /// Richardson estimate of the error in T and R at `step_count` steps.
    pub error_estimate: f64,
}

/// Scattering by shooting two initial-value problems across the medium.
pub fn shoot_scatter(
    p: &ModelParams,
    med: &MediumSpec,
    cfg: &ShootingConfig,
) -> Result<ShootingResult, OracleError> {
    let shot = shooting_error_estimate(p, med, cfg.step_count)?;
    if shot.error_estimate > cfg.tolerance {
        return Err(OracleError::StepCountInsufficient {
            estimate: shot.error_estimate,
            tolerance: cfg.tolerance,
            steps: cfg.step_count,
        });
    }
    Ok(shot)
}

/// Richardson estimate max(|ΔT|, |ΔR|)/15 between `steps` and `steps/2`.
pub fn shooting_error_estimate(
    p: &ModelParams,
    med: &MediumSpec,
    steps: usize,
) -> Result<ShootingResult, OracleError> {
    if steps < 2 || steps % 2 != 0 {
        return Err(OracleError::InvalidStepCount);
    }
    med.validate()?;
    let fine = boundary_solve(&fundamental_matrix(p, med, steps)?)?;
    let coarse = boundary_solve(&fundamental_matrix(p, med, steps / 2)?)?;
    let diff = (fine.transmission - coarse.transmission)
        .abs()
        .max((fine.reflection - coarse.reflection).abs());
    Ok(ShootingResult {
        result: fine,
        error_estimate: diff / 15.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticFit {
    /// Coefficient b of Im ω/γ̄ ≈ a + b·κ².
    pub coefficient: f64,
    pub intercept: f64,
    /// ‖residuals‖₂ of the fit.
    pub residual_norm: f64,
    pub samples: usize,
}

pub const MIN_FIT_SAMPLES: usize = 10;

/// Ordinary least squares of y against x² over |x| ≤ window.
pub fn fit_quadratic(points: &[(f64, f64)], window: f64) -> Result<QuadraticFit, OracleError> {
    let inside: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(x, _)| x.abs() <= window)
        .collect();
    if inside.len() < MIN_FIT_SAMPLES {
        return Err(OracleError::InsufficientSamples {
            needed: MIN_FIT_SAMPLES,
            found: inside.len(),
        });
    }
    let n = inside.len() as f64;
    let mean_u = inside.iter().map(|(x, _)| x * x).sum::<f64>() / n;
    let mean_y = inside.iter().map(|(_, y)| y).sum::<f64>() / n;
    let (mut suu, mut suy) = (0.0, 0.0);
    for (x, y) in &inside {
        let du = x * x - mean_u;
        suu += du * du;
        suy += du * (y - mean_y);
    }
    if suu == 0.0 {
        return Err(OracleError::InsufficientSamples {
            needed: MIN_FIT_SAMPLES,
            found: 1,
        });
    }
    let b = suy / suu;
    let a = mean_y - b * mean_u;
    let residual_norm = inside
        .iter()
        .map(|(x, y)| (y - a - b * x * x).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(QuadraticFit {
        coefficient: b,
        intercept: a,
        residual_norm,
        samples: inside.len(),
    })
}

/// Fit Im ω/γ̄ against κ² on a tracked branch, |κ| ≤ `window`.
pub fn fit_quadratic_dispersion(
    branch: &DispersionBranch,
    window: f64,
) -> Result<QuadraticFit, OracleError> {
    fit_quadratic(&branch.scaled_imaginary(), window)
}

/// ‖H·v − ω·v‖₂ / (‖H‖_F·‖v‖₂).
pub fn eigen_residual(h: &EffectiveHamiltonian, omega: Complex64, v: &Vector6c) -> f64 {
    let r = h.matrix * v - v * omega;
    r.norm() / (h.frobenius_norm() * v.norm())
}
