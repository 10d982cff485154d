use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use super::ScatterError;
use crate::params::ModelParams;

pub type Matrix2c = Matrix2<Complex64>;

/// Effective potentials of the counter-propagating probe modes
/// (units of inverse length).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SusceptibilityPair {
    pub chi_pp: Complex64,
    pub chi_pm: Complex64,
}

/// Denominators below this (in units of γ³) are treated as a pole.
pub const POLE_TOL: f64 = 1e-14;

/// Susceptibilities at level shift `v` (finite or ±∞).
///
/// With x = V − δr:
///   χ₊₊ = (−iG²/cγ̄)·[x(γ̄δ − iΩc²) + γ̄Ωs²] / [x(γ̄δ − 2iΩc²) + γ̄Ωs²]
///   χ₊₋ = (G²/cγ̄)·xΩc² / [x(γ̄δ − 2iΩc²) + γ̄Ωs²]
pub fn susceptibilities(p: &ModelParams, v: f64) -> Result<SusceptibilityPair, ScatterError> {
    let gb = p.gamma_bar();
    let pref = p.big_g().powi(2) / (p.light_speed() * gb);
    let i = Complex64::i();
    let wc2 = p.omega_c().powi(2);
    if wc2 == 0.0 {
        // numerator and denominator coincide
        return Ok(SusceptibilityPair {
            chi_pp: -i * pref,
            chi_pm: Complex64::new(0.0, 0.0),
        });
    }
    let a = Complex64::new(gb * p.delta(), -wc2);
    let b = Complex64::new(gb * p.delta(), -2.0 * wc2);
    let ws2 = gb * p.omega_s().powi(2);

    let (num, den, cross) = if v.is_infinite() {
        (a, b, Complex64::new(wc2, 0.0))
    } else if v.is_nan() {
        return Err(ScatterError::NonFiniteShift);
    } else {
        let x = v - p.delta_r();
        if x.abs() > 1.0 {
            // divide through by x so huge shifts stay finite
            let w = ws2 / x;
            (a + w, b + w, Complex64::new(wc2, 0.0))
        } else {
            (a * x + ws2, b * x + ws2, Complex64::new(x * wc2, 0.0))
        }
    };
    let gamma3 = p.gamma().powi(3);
    let scale = if v.is_finite() && (v - p.delta_r()).abs() > 1.0 {
        gamma3 / (v - p.delta_r()).abs()
    } else {
        gamma3
    };
    if den.norm() < POLE_TOL * scale {
        return Err(ScatterError::SingularDenominator { shift: v });
    }
    Ok(SusceptibilityPair {
        chi_pp: -i * pref * num / den,
        chi_pm: pref * cross / den,
    })
}

/// M = [[χ₊₊, χ₊₋], [−χ₊₋, −χ₊₊]].
pub fn propagation_matrix(p: &ModelParams, v: f64) -> Result<Matrix2c, ScatterError> {
    let s = susceptibilities(p, v)?;
    Ok(Matrix2c::new(s.chi_pp, s.chi_pm, -s.chi_pm, -s.chi_pp))
}
