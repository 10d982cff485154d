//! The invariant and oracle checks behind `srpol verify`.
//!
//! Every check reduces to one number compared against a bound. Draws come
//! from a seeded ChaCha stream, so the report is a pure function of
//! [`SuiteOptions`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::oracle::{
    eigen_residual, fit_quadratic_dispersion, shoot_scatter, shooting_error_estimate,
    ShootingConfig,
};
use crate::params::{canonical, fig2_params, fig3_problem, ModelParams, Rb87Preset};
use crate::scattering::{
    scan_quantum_number, scan_ratio, scatter, transfer_through_medium, InteractionModel,
    MediumSpec,
};
use crate::spectrum::{
    build_heff, dark_state, dispersion_scan, dressed_dark_state, eigenpairs, eigensystem,
    intermediate_population, P_MINUS, P_PLUS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// |observed − expected| ≤ tolerance
    Within,
    /// observed ≤ expected + tolerance
    AtMost,
    /// observed ≥ expected − tolerance
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub test_name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: &str, observed: f64, expected: f64, tolerance: f64, relation: Relation) -> Self {
        let pass = observed.is_finite()
            && match relation {
                Relation::Within => (observed - expected).abs() <= tolerance,
                Relation::AtMost => observed <= expected + tolerance,
                Relation::AtLeast => observed >= expected - tolerance,
            };
        Self {
            test_name: name.to_string(),
            observed,
            expected,
            tolerance,
            relation,
            pass,
        }
    }

    pub fn within(name: &str, observed: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(name, observed, expected, tolerance, Relation::Within)
    }

    pub fn at_most(name: &str, observed: f64, bound: f64) -> Self {
        Self::new(name, observed, bound, 0.0, Relation::AtMost)
    }

    pub fn at_least(name: &str, observed: f64, bound: f64) -> Self {
        Self::new(name, observed, bound, 0.0, Relation::AtLeast)
    }

    /// A check whose computation itself failed.
    pub fn failed(name: &str, expected: f64, tolerance: f64, relation: Relation) -> Self {
        Self::new(name, f64::NAN, expected, tolerance, relation)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("verification suite produced no results")]
    EmptySuite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub overall_pass: bool,
    pub results: Vec<CheckRecord>,
}

impl Report {
    pub fn new(results: Vec<CheckRecord>) -> Result<Self, ReportError> {
        if results.is_empty() {
            return Err(ReportError::EmptySuite);
        }
        Ok(Self {
            overall_pass: results.iter().all(|r| r.pass),
            results,
        })
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.results.iter().filter(|r| !r.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub seed: u64,
    pub dark_draws: usize,
    pub scatter_draws: usize,
    pub shooting: ShootingConfig,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 0x5eed_2024,
            dark_draws: 50,
            scatter_draws: 100,
            shooting: ShootingConfig::default(),
        }
    }
}

fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Run every check. Order is fixed.
pub fn run_suite(opts: &SuiteOptions) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    out.extend(dark_state_checks(opts));
    out.extend(dispersion_checks());
    out.extend(population_checks());
    out.extend(baseline_checks(opts));
    out.extend(random_scatter_checks(opts));
    out.extend(trend_checks());
    out.extend(symmetry_checks());
    out.extend(dressed_checks());
    out
}

/// Random (Ωc, Ωs, G) ∈ (0, 10]³ at δ = ±Ωs, Δs = 0, k = 0.
pub fn dark_state_checks(opts: &SuiteOptions) -> Vec<CheckRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let draws: Vec<(f64, f64, f64)> = (0..opts.dark_draws)
        .map(|_| {
            let mut u = || 10.0 * (1.0 - rng.random::<f64>());
            (u(), u(), u())
        })
        .collect();
    let mut eig = 0.0f64;
    let mut ovl = 1.0f64;
    let mut pmax = 0.0f64;
    let mut neg_eig = 0.0f64;
    let mut neg_p = 0.0f64;
    let mut resid = 0.0f64;
    let mut ok = true;
    for &(wc, ws, g) in &draws {
        for sign in [1.0, -1.0] {
            let p = match canonical(wc, ws, sign * ws, 0.0, g) {
                Ok(p) => p,
                Err(_) => {
                    ok = false;
                    continue;
                }
            };
            let s = match dark_state(&p, 0.0) {
                Ok(s) => s,
                Err(_) => {
                    ok = false;
                    continue;
                }
            };
            let p_amp = s.amplitudes[P_PLUS].norm().max(s.amplitudes[P_MINUS].norm());
            let h = build_heff(&p, 0.0, 0.0);
            resid = resid.max(eigen_residual(&h, s.eigenvalue, &s.vector()));
            if sign > 0.0 {
                eig = eig.max(s.eigenvalue.norm());
                ovl = ovl.min(s.dark_overlap);
                pmax = pmax.max(p_amp);
            } else {
                neg_eig = neg_eig.max(s.eigenvalue.norm());
                neg_p = neg_p.max(p_amp);
            }
        }
    }
    let bad = |x: f64| if ok { x } else { f64::NAN };
    vec![
        CheckRecord::at_most("dark_state_max_abs_eigenvalue", bad(eig), 1e-10),
        CheckRecord::at_least("dark_state_min_overlap", bad(ovl), 1.0 - 1e-10),
        CheckRecord::at_most("dark_state_max_intermediate_amplitude", bad(pmax), 1e-10),
        CheckRecord::at_most("dark_state_negative_branch_max_abs_eigenvalue", bad(neg_eig), 1e-10),
        CheckRecord::at_most("dark_state_negative_branch_max_intermediate_amplitude", bad(neg_p), 1e-10),
        CheckRecord::at_most("dark_state_max_eigen_residual", bad(resid), 1e-10),
    ]
}

/// Coefficient of Im ω/γ̄ against κ² over |κ| ≤ 0.05.
pub fn quadratic_coefficient(p: &ModelParams) -> Option<f64> {
    let l = p.l_abs();
    let grid: Vec<f64> = linspace(-0.05, 0.05, 101).into_iter().map(|x| x / l).collect();
    let branch = dispersion_scan(p, &grid).ok()?;
    fit_quadratic_dispersion(&branch, 0.05).ok().map(|f| f.coefficient)
}

pub fn dispersion_checks() -> Vec<CheckRecord> {
    [0.5, 1.0, 2.0]
        .into_iter()
        .map(|ws| {
            let name = format!("dispersion_quadratic_coefficient_omega_s_{ws}");
            let coefficient = fig2_params()
                .modify(|r| {
                    r.omega_s = ws;
                    r.delta = ws;
                })
                .ok()
                .and_then(|p| quadratic_coefficient(&p))
                .unwrap_or(f64::NAN);
            CheckRecord::within(&name, coefficient, -2.0, 0.02)
        })
        .collect()
}

pub fn population_checks() -> Vec<CheckRecord> {
    let p = fig2_params();
    let zeros = intermediate_population(&p, &[1.0, -1.0]);
    let others = intermediate_population(&p, &[0.0, 0.5, -0.5, 2.0, -2.0]);
    let max_zero = zeros
        .map(|v| v.iter().map(|s| s.population).fold(0.0, f64::max))
        .unwrap_or(f64::NAN);
    let min_other = others
        .map(|v| v.iter().map(|s| s.population).fold(f64::INFINITY, f64::min))
        .unwrap_or(f64::NAN);
    vec![
        CheckRecord::at_most("population_at_stationary_detuning", max_zero, 1e-10),
        CheckRecord::at_least("population_away_from_stationary_detuning", min_other, 1e-3),
    ]
}

pub fn baseline_checks(opts: &SuiteOptions) -> Vec<CheckRecord> {
    let (p, med) = fig3_problem();
    let bare = med.without_impurity();
    let mut out = Vec::new();
    match scatter(&p, &bare) {
        Ok(r) => {
            out.push(CheckRecord::within("baseline_transmission", r.transmission, 0.4, 1e-6));
            out.push(CheckRecord::within("baseline_reflection", r.reflection, 0.6, 1e-6));
            out.push(CheckRecord::within("baseline_absorption", r.absorption, 0.0, 1e-6));
            match shoot_scatter(&p, &bare, &opts.shooting) {
                Ok(s) => {
                    let dt = (s.result.transmission - r.transmission).abs();
                    let dr = (s.result.reflection - r.reflection).abs();
                    out.push(CheckRecord::at_most("baseline_shooting_agreement", dt.max(dr), 1e-6));
                }
                Err(_) => out.push(CheckRecord::failed("baseline_shooting_agreement", 1e-6, 0.0, Relation::AtMost)),
            }
        }
        Err(_) => {
            for name in ["baseline_transmission", "baseline_reflection", "baseline_absorption"] {
                out.push(CheckRecord::failed(name, 0.0, 1e-6, Relation::Within));
            }
        }
    }

    let two_level = p.modify(|r| r.omega_c = 0.0);
    match two_level.map(|q| scatter(&q, &bare)) {
        Ok(Ok(r)) => {
            out.push(CheckRecord::within("two_level_transmission", r.transmission, (-3f64).exp(), 1e-6));
            out.push(CheckRecord::at_most("two_level_reflection", r.reflection, 1e-10));
        }
        _ => {
            out.push(CheckRecord::failed("two_level_transmission", (-3f64).exp(), 1e-6, Relation::Within));
            out.push(CheckRecord::failed("two_level_reflection", 1e-10, 0.0, Relation::AtMost));
        }
    }

    // the SI record must give the same answer as the canonical one
    let rb = Rb87Preset::default();
    let diff = match (scatter(&rb.model_params(), &rb.medium()), scatter(&p, &med)) {
        (Ok(a), Ok(b)) => (a.transmission - b.transmission)
            .abs()
            .max((a.reflection - b.reflection).abs()),
        _ => f64::NAN,
    };
    out.push(CheckRecord::at_most("si_and_canonical_units_agree", diff, 1e-8));

    // fourth order: halving the step cuts the error estimate ~16×. The
    // stationary medium has a linear field profile that RK4 integrates
    // exactly, so the two-level medium is used here.
    let ratio = match p.modify(|r| r.omega_c = 0.0) {
        Ok(q) => match (
            shooting_error_estimate(&q, &bare, 64),
            shooting_error_estimate(&q, &bare, 128),
        ) {
            (Ok(c), Ok(f)) => c.error_estimate / f.error_estimate,
            _ => f64::NAN,
        },
        Err(_) => f64::NAN,
    };
    out.push(CheckRecord::within("shooting_convergence_order_ratio", ratio, 16.0, 2.0));
    out
}

/// One random scattering problem: canonical parameters with δ = ±Ωs,
/// OD ∈ [0.5, 5], z0 ∈ [0.1L, 0.9L], log-uniform C6 over eight decades.
pub fn random_problem(rng: &mut impl Rng) -> (ModelParams, MediumSpec) {
    let wc = rng.random_range(0.2..3.0);
    let ws = rng.random_range(0.2..3.0);
    let g = rng.random_range(0.5..3.0);
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let p = canonical(wc, ws, sign * ws, 0.0, g).expect("draw is valid");
    let length = rng.random_range(0.5..5.0);
    let z0 = length * rng.random_range(0.1..0.9);
    let c6 = 10f64.powf(rng.random_range(-6.0..2.0));
    (p, MediumSpec::with_impurity(length, z0, InteractionModel::C6 { c6 }))
}

pub fn random_scatter_checks(opts: &SuiteOptions) -> Vec<CheckRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x00ff_00ff);
    let problems: Vec<_> = (0..opts.scatter_draws).map(|_| random_problem(&mut rng)).collect();
    let rows: Vec<Option<(f64, f64, f64)>> = problems
        .par_iter()
        .map(|(p, med)| {
            let u = transfer_through_medium(p, med).ok()?;
            let r = crate::scattering::ScatterResult::from_transfer(&u.matrix).ok()?;
            let s = shoot_scatter(p, med, &opts.shooting).ok()?;
            let det = (u.matrix.determinant() - Complex64::new(1.0, 0.0)).norm();
            Some((
                (r.transmission - s.result.transmission).abs(),
                (r.reflection - s.result.reflection).abs(),
                det,
            ))
        })
        .collect();
    let worst = |f: fn(&(f64, f64, f64)) -> f64| {
        rows.iter()
            .map(|r| r.as_ref().map(f).unwrap_or(f64::NAN))
            .fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) })
    };
    vec![
        CheckRecord::at_most("random_transfer_vs_shooting_transmission", worst(|r| r.0), 1e-6),
        CheckRecord::at_most("random_transfer_vs_shooting_reflection", worst(|r| r.1), 1e-6),
        CheckRecord::at_most("random_transfer_unit_determinant", worst(|r| r.2), 1e-9),
    ]
}

pub fn trend_checks() -> Vec<CheckRecord> {
    let (p, med) = fig3_problem();
    let mut out = Vec::new();

    let n_grid: Vec<u32> = (40..=100).step_by(10).collect();
    let step = match scan_quantum_number(&p, &med, &n_grid) {
        Ok(t) => t
            .rows
            .windows(2)
            .map(|w| w[1].result.absorption - w[0].result.absorption)
            .fold(f64::INFINITY, f64::min),
        Err(_) => f64::NAN,
    };
    out.push(CheckRecord::new("absorption_non_decreasing_in_n", step, 0.0, 1e-12, Relation::AtLeast));

    match scan_ratio(&p, &med, &[20.0], 60) {
        Ok(t) => {
            let r = &t.rows[0].result;
            let b = &t.baseline;
            out.push(CheckRecord::at_most("absorption_at_ratio_20", r.absorption, 0.05));
            out.push(CheckRecord::at_most(
                "transmission_at_ratio_20_relative_to_baseline",
                (r.transmission - b.transmission).abs() / b.transmission,
                0.02,
            ));
            out.push(CheckRecord::at_most(
                "reflection_at_ratio_20_relative_to_baseline",
                (r.reflection - b.reflection).abs() / b.reflection,
                0.02,
            ));
        }
        Err(_) => {
            out.push(CheckRecord::failed("absorption_at_ratio_20", 0.05, 0.0, Relation::AtMost));
        }
    }

    let absorption_at = |ws: f64| -> Option<f64> {
        let q = p.modify(|r| r.omega_s = ws).ok()?;
        let t = scan_ratio(&q, &med, &[1.0], 60).ok()?;
        Some(t.rows[0].result.absorption)
    };
    let gap = match (absorption_at(0.5), absorption_at(2.0)) {
        (Some(a), Some(b)) => a - b,
        _ => f64::NAN,
    };
    out.push(CheckRecord::new("absorption_weak_minus_strong_omega_s", gap, 0.0, 0.0, Relation::AtLeast));
    out
}

pub fn symmetry_checks() -> Vec<CheckRecord> {
    let (p, med) = fig3_problem();
    let bare = med.without_impurity();
    let flipped = p.modify(|r| r.delta = -r.omega_s);
    let diff = match (scatter(&p, &bare), flipped.map(|q| scatter(&q, &bare))) {
        (Ok(a), Ok(Ok(b))) => (a.transmission - b.transmission)
            .abs()
            .max((a.reflection - b.reflection).abs())
            .max((a.absorption - b.absorption).abs()),
        _ => f64::NAN,
    };

    let q = canonical(1.3, 0.7, 0.4, 0.2, 1.9).expect("valid");
    let mut worst = 0.0f64;
    for k in linspace(0.05, 1.0, 20) {
        let plus = eigenpairs(&build_heff(&q, k, 0.0).matrix);
        let minus = eigenpairs(&build_heff(&q, -k, 0.0).matrix);
        let (Ok(plus), Ok(minus)) = (plus, minus) else {
            worst = f64::NAN;
            break;
        };
        for (w, _) in &plus {
            let nearest = minus
                .iter()
                .map(|(v, _)| (v - w).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(nearest);
        }
    }

    let states = eigensystem(&build_heff(&q, 0.3, 0.0));
    let resid = match states {
        Ok(states) => {
            let h = build_heff(&q, 0.3, 0.0);
            states
                .iter()
                .map(|s| eigen_residual(&h, s.eigenvalue, &s.vector()))
                .fold(0.0, f64::max)
        }
        Err(_) => f64::NAN,
    };
    vec![
        CheckRecord::at_most("detuning_sign_symmetry_no_impurity", diff, 1e-10),
        CheckRecord::at_most("momentum_reversal_eigenvalues", worst, 1e-10),
        CheckRecord::at_most("general_eigen_residual", resid, 1e-10),
    ]
}

pub fn dressed_checks() -> Vec<CheckRecord> {
    let p = canonical(1.0, 1.0, 0.0, 20.0, 1.0).expect("valid");
    match dressed_dark_state(&p) {
        Ok(d) => {
            let ratio = p.omega_s() / p.delta_s();
            let g = p.big_g();
            let n = (g * g * (1.0 + ratio * ratio) + 2.0 * p.omega_c().powi(2)).sqrt();
            let expected = ratio * g / n;
            let got = d.state.rydberg_amplitude().norm();
            vec![
                CheckRecord::at_most("dressed_overlap_deficit", d.overlap_deficit, 2.5e-3),
                CheckRecord::at_most(
                    "dressed_rydberg_amplitude_relative_error",
                    (got - expected).abs() / expected,
                    0.1,
                ),
            ]
        }
        Err(_) => vec![
            CheckRecord::failed("dressed_overlap_deficit", 2.5e-3, 0.0, Relation::AtMost),
            CheckRecord::failed("dressed_rydberg_amplitude_relative_error", 0.1, 0.0, Relation::AtMost),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_relations() {
        assert!(CheckRecord::within("a", 1.0, 1.1, 0.2).pass);
        assert!(!CheckRecord::within("a", 1.0, 1.5, 0.2).pass);
        assert!(CheckRecord::at_most("b", 1e-12, 1e-10).pass);
        assert!(!CheckRecord::at_least("c", 0.5, 0.6).pass);
        assert!(!CheckRecord::at_most("d", f64::NAN, 1.0).pass);
    }

    #[test]
    fn report_overall_flag() {
        assert_eq!(Report::new(vec![]), Err(ReportError::EmptySuite));
        let ok = Report::new(vec![CheckRecord::at_most("a", 0.0, 1.0)]).unwrap();
        assert!(ok.overall_pass);
        let bad = Report::new(vec![
            CheckRecord::at_most("a", 0.0, 1.0),
            CheckRecord::within("b", 2.0, 1.0, 0.5),
        ])
        .unwrap();
        assert!(!bad.overall_pass);
        let f: Vec<_> = bad.failures().collect();
        assert_eq!(f.len(), 1);
        assert_eq!((f[0].observed, f[0].expected), (2.0, 1.0));
    }

    #[test]
    fn nan_serialises_as_null() {
        let r = CheckRecord::failed("x", 1.0, 0.0, Relation::AtMost);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"observed\":null"), "{s}");
    }
}
