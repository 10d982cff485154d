use num_complex::Complex64;
use serde::Serialize;

use super::eigen::{eigensystem, Vector6c};
use super::hamiltonian::{build_heff, D, E_MINUS, E_PLUS, P_MINUS, P_PLUS, S};
use super::SpectrumError;
use crate::params::ModelParams;

/// Normalised 6-component amplitude vector in (E+, E−, D, S, P+, P−) order.
///
/// Phase gauge: the first component with modulus above [`PHASE_FLOOR`] is
/// real and positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolaritonState {
    pub amplitudes: [Complex64; 6],
    pub eigenvalue: Complex64,
    /// |⟨reference|ψ⟩|² with the analytic dark-state vector.
    pub dark_overlap: f64,
}

pub const PHASE_FLOOR: f64 = 1e-12;

impl PolaritonState {
    pub fn new(v: Vector6c, eigenvalue: Complex64, reference: &Vector6c) -> Self {
        let norm = v.norm();
        let mut v = v / Complex64::new(norm, 0.0);
        if let Some(first) = v.iter().find(|z| z.norm() > PHASE_FLOOR).copied() {
            let phase = first.conj() / first.norm();
            v *= phase;
        }
        let dark_overlap = overlap(reference, &v).powi(2).min(1.0);
        Self {
            amplitudes: v.into(),
            eigenvalue,
            dark_overlap,
        }
    }

    pub fn vector(&self) -> Vector6c {
        Vector6c::from(self.amplitudes)
    }

    /// |P+|² + |P−|².
    pub fn intermediate_population(&self) -> f64 {
        self.amplitudes[P_PLUS].norm_sqr() + self.amplitudes[P_MINUS].norm_sqr()
    }

    pub fn probe_population(&self) -> f64 {
        self.amplitudes[E_PLUS].norm_sqr() + self.amplitudes[E_MINUS].norm_sqr()
    }

    pub fn rydberg_amplitude(&self) -> Complex64 {
        self.amplitudes[S]
    }
}

/// |⟨a|b⟩| for vectors of any norm, normalised.
pub fn overlap(a: &Vector6c, b: &Vector6c) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    a.dotc(b).norm() / (na * nb)
}

fn real_vector(c: [f64; 6]) -> Vector6c {
    Vector6c::from_fn(|i, _| Complex64::new(c[i], 0.0))
}

/// Analytic k = 0 dark-state direction (Ωc, Ωc, −G, −σG, 0, 0), scaled to
/// unit length. σ = +1 on the δ ≥ 0 branch and −1 for δ < 0, where the
/// resonant D–S combination is D − S.
pub fn dark_reference(p: &ModelParams) -> Vector6c {
    let sigma = if p.delta() < 0.0 { -1.0 } else { 1.0 };
    let wc = p.omega_c();
    let g = p.big_g();
    // D and S each carry G, so the norm is √2·[G² + Ωc²]^{1/2}
    let n = (2.0 * g * g + 2.0 * wc * wc).sqrt();
    real_vector([wc / n, wc / n, -g / n, -sigma * g / n, 0.0, 0.0])
}

/// Dressed dark-state vector (Ωc, Ωc, −G, −G·Ωs/Δs, 0, 0)/𝒩′ with
/// 𝒩′ = [G²(1 + Ωs²/Δs²) + 2Ωc²]^{1/2}.
pub fn dressed_reference(p: &ModelParams) -> Vector6c {
    let wc = p.omega_c();
    let g = p.big_g();
    let ratio = p.omega_s() / p.delta_s();
    let n = (g * g * (1.0 + ratio * ratio) + 2.0 * wc * wc).sqrt();
    real_vector([wc / n, wc / n, -g / n, -g * ratio / n, 0.0, 0.0])
}

fn resonance_tolerance(p: &ModelParams) -> f64 {
    1e-12 * p.gamma().max(p.omega_s()).max(p.delta().abs())
}

fn max_overlap(
    states: Vec<PolaritonState>,
    reference: &Vector6c,
) -> Result<(PolaritonState, f64), SpectrumError> {
    let mut scored: Vec<(f64, PolaritonState)> = states
        .into_iter()
        .map(|s| (overlap(reference, &s.vector()).powi(2), s))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    if scored.len() > 1 && scored[0].0 - scored[1].0 < super::AMBIGUITY_GAP {
        return Err(SpectrumError::BranchAmbiguity {
            best: scored[0].0,
            runner_up: scored[1].0,
        });
    }
    let (score, state) = scored.swap_remove(0);
    Ok((state, score))
}

/// The stationary polariton at δ = ±Ωs, Δs = 0.
pub fn dark_state(p: &ModelParams, k: f64) -> Result<PolaritonState, SpectrumError> {
    let tol = resonance_tolerance(p);
    if p.omega_s() <= 0.0 {
        return Err(SpectrumError::PreconditionViolated("omega_s must be positive"));
    }
    if (p.delta().abs() - p.omega_s()).abs() > tol {
        return Err(SpectrumError::PreconditionViolated("delta must equal +/- omega_s"));
    }
    if p.delta_s().abs() > tol {
        return Err(SpectrumError::PreconditionViolated("delta_s must vanish"));
    }
    let states = eigensystem(&build_heff(p, k, 0.0))?;
    let (state, _) = max_overlap(states, &dark_reference(p))?;
    Ok(state)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DressedDarkState {
    pub state: PolaritonState,
    /// |⟨ψ′|ψ⟩|² with the analytic dressed vector.
    pub reference_overlap: f64,
    pub overlap_deficit: f64,
    /// (Ωs/Δs)², the scale of the expected deficit.
    pub admixture_sq: f64,
}

/// Dark state under Rydberg dressing: δ = 0, |Δs| ≥ 10·Ωs.
pub fn dressed_dark_state(p: &ModelParams) -> Result<DressedDarkState, SpectrumError> {
    if p.omega_s() <= 0.0 {
        return Err(SpectrumError::PreconditionViolated("omega_s must be positive"));
    }
    if p.delta().abs() > resonance_tolerance(p) {
        return Err(SpectrumError::PreconditionViolated("delta must vanish"));
    }
    if p.delta_s().abs() < 10.0 * p.omega_s() {
        return Err(SpectrumError::PreconditionViolated(
            "|delta_s| must be at least 10 omega_s",
        ));
    }
    let reference = dressed_reference(p);
    let states = eigensystem(&build_heff(p, 0.0, 0.0))?;
    let (state, reference_overlap) = max_overlap(states, &reference)?;
    let ratio = p.omega_s() / p.delta_s();
    Ok(DressedDarkState {
        state,
        reference_overlap,
        overlap_deficit: 1.0 - reference_overlap,
        admixture_sq: ratio * ratio,
    })
}

/// D and S amplitudes of a state, for composition checks.
pub fn ground_components(state: &PolaritonState) -> (Complex64, Complex64) {
    (state.amplitudes[D], state.amplitudes[S])
}
