use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::eigen::eigensystem;
use super::hamiltonian::build_heff;
use super::state::{overlap, PolaritonState};
use super::{SpectrumError, AMBIGUITY_GAP, CONTINUITY_FLOOR};
use crate::params::ModelParams;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchSample {
    pub k: f64,
    pub omega: Complex64,
    pub state: PolaritonState,
}

/// One eigenbranch tracked across a momentum grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionBranch {
    pub samples: Vec<BranchSample>,
    pub params: ModelParams,
}

impl DispersionBranch {
    /// (κ, Im ω/γ̄) pairs with κ = k·l_abs.
    pub fn scaled_imaginary(&self) -> Vec<(f64, f64)> {
        let l = self.params.l_abs();
        let gb = self.params.gamma_bar();
        self.samples
            .iter()
            .map(|s| (s.k * l, s.omega.im / gb))
            .collect()
    }

    /// Smallest |⟨v(kᵢ)|v(kᵢ₊₁)⟩| along the branch.
    pub fn min_continuity(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| overlap(&w[0].state.vector(), &w[1].state.vector()))
            .fold(1.0, f64::min)
    }
}

/// −i·c²·γ̄·Ωc²·k² / (G²(G² + Ωc²)).
pub fn analytic_dispersion(p: &ModelParams, k: f64) -> Complex64 {
    let c = p.light_speed();
    let g2 = p.big_g().powi(2);
    let wc2 = p.omega_c().powi(2);
    Complex64::new(0.0, -c * c * p.gamma_bar() * wc2 * k * k / (g2 * (g2 + wc2)))
}

/// Pick the state with the largest |⟨reference|ψ⟩|², refusing near-ties.
pub(crate) fn seed_state(states: &[PolaritonState]) -> Result<usize, SpectrumError> {
    pick_best(states.iter().map(|s| s.dark_overlap))
}

fn pick_best(scores: impl Iterator<Item = f64>) -> Result<usize, SpectrumError> {
    let scores: Vec<f64> = scores.collect();
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    if order.len() > 1 && scores[order[0]] - scores[order[1]] < AMBIGUITY_GAP {
        return Err(SpectrumError::BranchAmbiguity {
            best: scores[order[0]],
            runner_up: scores[order[1]],
        });
    }
    Ok(order[0])
}

/// Track the dark branch over `k_grid`.
///
/// The branch is seeded at the grid point closest to k = 0 by maximal dark
/// overlap and continued outwards in both directions by maximal overlap with
/// the previous eigenvector.
pub fn dispersion_scan(p: &ModelParams, k_grid: &[f64]) -> Result<DispersionBranch, SpectrumError> {
    if k_grid.is_empty() {
        return Err(SpectrumError::InvalidGrid("empty momentum grid"));
    }
    if k_grid.iter().any(|k| !k.is_finite()) || k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SpectrumError::InvalidGrid("momenta must be finite and strictly increasing"));
    }
    let spectra: Vec<Vec<PolaritonState>> = k_grid
        .par_iter()
        .map(|&k| eigensystem(&build_heff(p, k, 0.0)))
        .collect::<Result<_, _>>()?;

    let seed = k_grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap();
    let mut chosen = vec![0usize; k_grid.len()];
    chosen[seed] = seed_state(&spectra[seed])?;

    let follow = |from: usize, to: usize, chosen: &mut Vec<usize>| -> Result<(), SpectrumError> {
        let prev = spectra[from][chosen[from]].vector();
        let scores: Vec<f64> = spectra[to]
            .iter()
            .map(|s| overlap(&prev, &s.vector()))
            .collect();
        let best = pick_best(scores.iter().copied())?;
        if scores[best] < CONTINUITY_FLOOR {
            return Err(SpectrumError::TrackingLost {
                k: k_grid[to],
                overlap: scores[best],
            });
        }
        chosen[to] = best;
        Ok(())
    };
    for i in (seed + 1)..k_grid.len() {
        follow(i - 1, i, &mut chosen)?;
    }
    for i in (0..seed).rev() {
        follow(i + 1, i, &mut chosen)?;
    }

    let samples = spectra
        .into_iter()
        .zip(chosen)
        .zip(k_grid)
        .map(|((mut states, idx), &k)| {
            let state = states.swap_remove(idx);
            BranchSample {
                k,
                omega: state.eigenvalue,
                state,
            }
        })
        .collect();
    Ok(DispersionBranch {
        samples,
        params: *p,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationSample {
    /// δ/Ωs
    pub ratio: f64,
    pub population: f64,
    pub state: PolaritonState,
}

/// |P+|² + |P−|² of the k = 0 dark-branch state as δ/Ωs varies.
pub fn intermediate_population(
    p: &ModelParams,
    ratio_grid: &[f64],
) -> Result<Vec<PopulationSample>, SpectrumError> {
    if p.omega_s() <= 0.0 {
        return Err(SpectrumError::PreconditionViolated("omega_s must be positive"));
    }
    ratio_grid
        .par_iter()
        .map(|&ratio| {
            let q = p
                .modify(|r| r.delta = ratio * r.omega_s)
                .map_err(|_| SpectrumError::InvalidGrid("non-finite ratio"))?;
            let states = eigensystem(&build_heff(&q, 0.0, 0.0))?;
            let idx = seed_state(&states)?;
            let state = states[idx].clone();
            Ok(PopulationSample {
                ratio,
                population: state.intermediate_population().clamp(0.0, 1.0),
                state,
            })
        })
        .collect()
}
