//! Steady-state scattering of a cw probe through a finite medium that
//! contains a Rydberg impurity.
//!
//! The two probe amplitudes obey `i ∂z E = M(z) E` with the position
//! dependent propagation matrix built from the susceptibilities at the local
//! van der Waals shift. The boundary-value problem E₊(0) = E₀, E₋(L) = 0 is
//! solved through the total transfer matrix U, E(L) = U·E(0).

mod medium;
mod scan;
mod susceptibility;
mod transfer;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub use medium::{
    vdw_potential, GridPolicy, Impurity, InteractionModel, MediumSpec, MIN_QUANTUM_NUMBER,
};
pub use scan::{scan_quantum_number, scan_ratio, ScanRow, ScanTable};
pub use susceptibility::{propagation_matrix, susceptibilities, Matrix2c, SusceptibilityPair, POLE_TOL};
pub use transfer::{
    compose, compose_until_converged, mesh, slab_transfer, slice_transfer,
    transfer_through_medium, bisect_all, MediumTransfer, CONVERGENCE_TOL, FLOOR_FRACTION, MAX_ROUNDS,
};

use crate::params::ModelParams;

/// |U₂₂| below this fraction of ‖U‖_F makes the reflection solve unreliable.
pub const ILL_CONDITIONED_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatterError {
    #[error("susceptibility denominator vanishes at level shift {shift}")]
    SingularDenominator { shift: f64 },
    #[error("level shift is NaN")]
    NonFiniteShift,
    #[error("grid refinement did not converge after {refinements} doublings (last change {change:e})")]
    GridNotConverged { change: f64, refinements: u32 },
    #[error("boundary-value problem is ill-conditioned: |U22| = {u22:e}, ||U|| = {norm:e}")]
    IllConditionedBVP { u22: f64, norm: f64 },
    #[error("invalid medium: {0}")]
    InvalidMedium(String),
}

/// Energy-style coefficients T², R², 1 − T² − R².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntensityCoefficients {
    pub transmission: f64,
    pub reflection: f64,
    pub absorption: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub z: f64,
    pub e_plus: Complex64,
    pub e_minus: Complex64,
}

/// Boundary amplitudes and amplitude-convention coefficients
/// T = |E₊(L)/E₀|, R = |E₋(0)/E₀|, A = 1 − T − R.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterResult {
    pub t_amp: Complex64,
    pub r_amp: Complex64,
    pub transmission: f64,
    pub reflection: f64,
    pub absorption: f64,
    pub intensity: IntensityCoefficients,
    pub converged: bool,
    pub slice_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<ProfileSample>>,
}

impl ScatterResult {
    pub fn from_amplitudes(t_amp: Complex64, r_amp: Complex64) -> Self {
        let t = t_amp.norm();
        let r = r_amp.norm();
        Self {
            t_amp,
            r_amp,
            transmission: t,
            reflection: r,
            absorption: 1.0 - t - r,
            intensity: IntensityCoefficients {
                transmission: t * t,
                reflection: r * r,
                absorption: 1.0 - t * t - r * r,
            },
            converged: true,
            slice_count: 0,
            profile: None,
        }
    }

    /// Solve the two-point problem from a total transfer matrix.
    pub fn from_transfer(u: &Matrix2c) -> Result<Self, ScatterError> {
        let u22 = u[(1, 1)];
        let norm = u.norm();
        if u22.norm() < ILL_CONDITIONED_TOL * norm {
            return Err(ScatterError::IllConditionedBVP {
                u22: u22.norm(),
                norm,
            });
        }
        let r_amp = -u[(1, 0)] / u22;
        let t_amp = u[(0, 0)] + u[(0, 1)] * r_amp;
        Ok(Self::from_amplitudes(t_amp, r_amp))
    }
}

fn solve(p: &ModelParams, med: &MediumSpec, strict: bool) -> Result<ScatterResult, ScatterError> {
    let t = if strict {
        transfer_through_medium(p, med)?
    } else {
        compose_until_converged(p, med)?
    };
    let mut result = ScatterResult::from_transfer(&t.matrix)?;
    result.converged = t.converged;
    result.slice_count = t.slice_count;
    Ok(result)
}

/// T, R, A for a probe incident from z = 0.
pub fn scatter(p: &ModelParams, med: &MediumSpec) -> Result<ScatterResult, ScatterError> {
    solve(p, med, true)
}

/// Like [`scatter`] but returns the finest level reached, flagged, instead
/// of failing when grid refinement hits its cap.
pub fn scatter_lenient(p: &ModelParams, med: &MediumSpec) -> Result<ScatterResult, ScatterError> {
    solve(p, med, false)
}

/// [`scatter`] plus E±(z) at `samples` evenly spaced positions.
pub fn scatter_with_profile(
    p: &ModelParams,
    med: &MediumSpec,
    samples: usize,
) -> Result<ScatterResult, ScatterError> {
    let t = transfer_through_medium(p, med)?;
    let l = med.length;
    let samples = samples.max(2);
    let probes: Vec<f64> = (0..samples)
        .map(|i| l * i as f64 / (samples - 1) as f64)
        .collect();
    let mut points = t.points.clone();
    points.extend_from_slice(&probes);
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * l.max(f64::MIN_POSITIVE));

    // solve on the merged mesh so the stepped field meets E₋(L) = 0 exactly
    let slices: Vec<Matrix2c> = points
        .windows(2)
        .map(|w| slice_transfer(p, med, w[0], w[1]))
        .collect::<Result<_, _>>()?;
    let u = slices.iter().fold(Matrix2c::identity(), |acc, s| s * acc);
    let mut result = ScatterResult::from_transfer(&u)?;
    result.slice_count = slices.len();
    result.converged = t.converged;

    let mut field = nalgebra::Vector2::new(Complex64::new(1.0, 0.0), result.r_amp);
    let mut profile = Vec::with_capacity(samples);
    let mut next = 0;
    let mut record = |z: f64, field: &nalgebra::Vector2<Complex64>, next: &mut usize| {
        while *next < probes.len() && (probes[*next] - z).abs() <= 1e-13 * l.max(f64::MIN_POSITIVE) {
            profile.push(ProfileSample {
                z: probes[*next],
                e_plus: field[0],
                e_minus: field[1],
            });
            *next += 1;
        }
    };
    record(points[0], &field, &mut next);
    for (w, s) in points.windows(2).zip(&slices) {
        field = s * field;
        record(w[1], &field, &mut next);
    }
    result.profile = Some(profile);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::canonical;

    fn slp() -> ModelParams {
        canonical(1.0, 1.0, 1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn stationary_baseline() {
        let r = scatter(&slp(), &MediumSpec::uniform(3.0)).unwrap();
        assert!((r.transmission - 0.4).abs() < 1e-12);
        assert!((r.reflection - 0.6).abs() < 1e-12);
        assert!(r.absorption.abs() < 1e-12);
        assert!((r.intensity.transmission - 0.16).abs() < 1e-12);
        assert!((r.intensity.absorption - 0.48).abs() < 1e-12);
    }

    #[test]
    fn two_level_attenuation() {
        let p = canonical(0.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let r = scatter(&p, &MediumSpec::uniform(3.0)).unwrap();
        assert!((r.transmission - (-3f64).exp()).abs() < 1e-14);
        assert!(r.reflection < 1e-14);
        assert!((r.absorption - (1.0 - (-3f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn empty_slab() {
        let r = scatter(&slp(), &MediumSpec::uniform(0.0)).unwrap();
        assert_eq!((r.transmission, r.reflection, r.absorption), (1.0, 0.0, 0.0));
    }

    #[test]
    fn ill_conditioned_detected() {
        let u = Matrix2c::new(1.0.into(), 2.0.into(), 3.0.into(), 0.0.into());
        assert!(matches!(
            ScatterResult::from_transfer(&u),
            Err(ScatterError::IllConditionedBVP { .. })
        ));
    }

    #[test]
    fn profile_meets_boundary_conditions() {
        let med = MediumSpec::with_impurity(3.0, 1.5, InteractionModel::C6 { c6: 0.004 });
        let r = scatter_with_profile(&slp(), &med, 31).unwrap();
        let profile = r.profile.as_ref().unwrap();
        assert_eq!(profile.len(), 31);
        assert_eq!(profile[0].e_plus, Complex64::new(1.0, 0.0));
        assert!((profile[0].e_minus - r.r_amp).norm() < 1e-15);
        let last = profile.last().unwrap();
        assert_eq!(last.z, 3.0);
        assert!(last.e_minus.norm() < 1e-12);
        assert!((last.e_plus - r.t_amp).norm() < 1e-12);
        let plain = scatter(&slp(), &med).unwrap();
        assert!((plain.transmission - r.transmission).abs() < 1e-7);
    }
}
