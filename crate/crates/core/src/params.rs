//! Physical parameters of the dual-V + Rydberg level scheme.
//!
//! Every other module consumes a [`ModelParams`] that has passed
//! [`RawParams::validate`]. Frequencies are angular and share one unit; the
//! light speed fixes the length unit. The canonical system used for all
//! numerics has `gamma = 1` and `l_abs = 1`.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scattering::{GridPolicy, Impurity, InteractionModel, MediumSpec};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;

/// Unvalidated parameter record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub gamma: f64,
    pub omega_c: f64,
    pub omega_s: f64,
    pub delta: f64,
    pub delta_s: f64,
    pub big_g: f64,
    pub light_speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamField {
    Gamma,
    OmegaC,
    OmegaS,
    Delta,
    DeltaS,
    BigG,
    LightSpeed,
}

impl fmt::Display for ParamField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ParamField::Gamma => "gamma",
            ParamField::OmegaC => "omega_c",
            ParamField::OmegaS => "omega_s",
            ParamField::Delta => "delta",
            ParamField::DeltaS => "delta_s",
            ParamField::BigG => "big_g",
            ParamField::LightSpeed => "light_speed",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    NonPositive(ParamField),
    NegativeRabi(ParamField),
    NonFinite(ParamField),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositive(p) => write!(f, "NonPositive({p})"),
            Violation::NegativeRabi(p) => write!(f, "NegativeRabi({p})"),
            Violation::NonFinite(p) => write!(f, "NonFinite({p})"),
        }
    }
}

/// All constraints a raw record violated, in field order.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameters: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))]
pub struct ParamError {
    pub violations: Vec<Violation>,
}

impl RawParams {
    pub fn validate(self) -> Result<ModelParams, ParamError> {
        use ParamField::*;
        let mut violations = Vec::new();
        let fields = [
            (Gamma, self.gamma),
            (OmegaC, self.omega_c),
            (OmegaS, self.omega_s),
            (Delta, self.delta),
            (DeltaS, self.delta_s),
            (BigG, self.big_g),
            (LightSpeed, self.light_speed),
        ];
        for (field, value) in fields {
            if !value.is_finite() {
                violations.push(Violation::NonFinite(field));
                continue;
            }
            match field {
                Gamma | BigG | LightSpeed if value <= 0.0 => {
                    violations.push(Violation::NonPositive(field))
                }
                OmegaC | OmegaS if value < 0.0 => violations.push(Violation::NegativeRabi(field)),
                _ => {}
            }
        }
        if violations.is_empty() {
            Ok(ModelParams { raw: self })
        } else {
            Err(ParamError { violations })
        }
    }
}

/// Validated parameters. Immutable; use [`ModelParams::modify`] to derive
/// a new record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ModelParams {
    raw: RawParams,
}

impl ModelParams {
    pub fn gamma(&self) -> f64 {
        self.raw.gamma
    }

    pub fn omega_c(&self) -> f64 {
        self.raw.omega_c
    }

    pub fn omega_s(&self) -> f64 {
        self.raw.omega_s
    }

    pub fn delta(&self) -> f64 {
        self.raw.delta
    }

    pub fn delta_s(&self) -> f64 {
        self.raw.delta_s
    }

    pub fn big_g(&self) -> f64 {
        self.raw.big_g
    }

    pub fn light_speed(&self) -> f64 {
        self.raw.light_speed
    }

    /// Coherence decay rate of the intermediate states, γ/2.
    pub fn gamma_bar(&self) -> f64 {
        self.raw.gamma / 2.0
    }

    /// Resonant absorption length c·γ̄/G².
    pub fn l_abs(&self) -> f64 {
        self.raw.light_speed * self.gamma_bar() / (self.raw.big_g * self.raw.big_g)
    }

    /// Detuning of the Rydberg level, δ + Δs.
    pub fn delta_r(&self) -> f64 {
        self.raw.delta + self.raw.delta_s
    }

    pub fn raw(&self) -> RawParams {
        self.raw
    }

    /// Apply `f` to a copy of the raw record and revalidate.
    pub fn modify(&self, f: impl FnOnce(&mut RawParams)) -> Result<ModelParams, ParamError> {
        let mut raw = self.raw;
        f(&mut raw);
        raw.validate()
    }

    /// The unit scale (γ, l_abs) of this record.
    pub fn scale(&self) -> Scale {
        Scale {
            frequency: self.gamma(),
            length: self.l_abs(),
        }
    }

    /// Rescale to γ = 1 and l_abs = 1. Idempotent on canonical records.
    pub fn to_dimensionless(&self) -> ModelParams {
        if self.gamma() == 1.0 && self.l_abs() == 1.0 {
            return *self;
        }
        let scale = self.scale();
        let w = scale.frequency;
        let raw = RawParams {
            gamma: 1.0,
            omega_c: self.omega_c() / w,
            omega_s: self.omega_s() / w,
            delta: self.delta() / w,
            delta_s: self.delta_s() / w,
            big_g: self.big_g() / w,
            light_speed: self.light_speed() / (w * scale.length),
        };
        ModelParams { raw }
    }

    pub fn is_dimensionless(&self) -> bool {
        (self.gamma() - 1.0).abs() <= 1e-12 && (self.l_abs() - 1.0).abs() <= 1e-12
    }
}

impl<'de> Deserialize<'de> for ModelParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        RawParams::deserialize(d)?
            .validate()
            .map_err(serde::de::Error::custom)
    }
}

/// Frequency and length units of a parameter record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    pub frequency: f64,
    pub length: f64,
}

impl Scale {
    pub const CANONICAL: Scale = Scale {
        frequency: 1.0,
        length: 1.0,
    };
}

/// Canonical record with the given γ-scaled couplings and l_abs = 1.
pub fn canonical(
    omega_c: f64,
    omega_s: f64,
    delta: f64,
    delta_s: f64,
    big_g: f64,
) -> Result<ModelParams, ParamError> {
    RawParams {
        gamma: 1.0,
        omega_c,
        omega_s,
        delta,
        delta_s,
        big_g,
        light_speed: 2.0 * big_g * big_g,
    }
    .validate()
}

/// Ωs = Ωc = G = γ, δ = Ωs, Δs = 0 in canonical units.
pub fn fig2_params() -> ModelParams {
    canonical(1.0, 1.0, 1.0, 0.0, 1.0).expect("fig2 preset is valid")
}

/// ⁸⁷Rb realisation in SI units (rad/s, metres).
///
/// Level assignments are documentation only; nothing here computes
/// hyperfine structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Rb87Preset {
    /// Intermediate-state decay rate, 2π·6 MHz.
    pub gamma_si: f64,
    /// Medium length, 40 μm.
    pub slab_length: f64,
    /// L / l_abs.
    pub optical_depth: f64,
    /// Atomic density, 1 μm⁻³ (in m⁻³).
    pub density: f64,
    /// Control and Rydberg Rabi frequencies in units of γ.
    pub omega_c_over_gamma: f64,
    pub omega_s_over_gamma: f64,
    /// Reference quantum number and C6 (rad/s·m⁶) of the impurity state.
    /// External literature input, not derived here.
    pub n_ref: u32,
    pub c6_ref: f64,
    pub n: u32,
    pub levels: [(&'static str, &'static str); 5],
}

impl Default for Rb87Preset {
    fn default() -> Self {
        Self {
            gamma_si: TAU * 6.0e6,
            slab_length: 40.0e-6,
            optical_depth: 3.0,
            density: 1.0e18,
            omega_c_over_gamma: 1.0,
            omega_s_over_gamma: 1.0,
            n_ref: 60,
            // C6(60S1/2)/2π ≈ 140 GHz·μm⁶
            c6_ref: TAU * 140.0e9 * 1.0e-36,
            n: 60,
            levels: [
                ("g", "5S1/2, F=1, mF=0"),
                ("d", "5S1/2, F=2, mF=0"),
                ("e+", "5P3/2, F=1, mF=+1"),
                ("e-", "5P3/2, F=1, mF=-1"),
                ("r", "nS1/2, J=1/2, mJ=1/2"),
            ],
        }
    }
}

impl Rb87Preset {
    /// SI parameters with G fixed by OD = L/l_abs, i.e. G² = OD·c·γ̄/L.
    pub fn model_params(&self) -> ModelParams {
        let gamma = self.gamma_si;
        let gamma_bar = gamma / 2.0;
        let g2 = self.optical_depth * SPEED_OF_LIGHT_SI * gamma_bar / self.slab_length;
        let omega_s = self.omega_s_over_gamma * gamma;
        RawParams {
            gamma,
            omega_c: self.omega_c_over_gamma * gamma,
            omega_s,
            delta: omega_s,
            delta_s: 0.0,
            big_g: g2.sqrt(),
            light_speed: SPEED_OF_LIGHT_SI,
        }
        .validate()
        .expect("rb87 preset is valid")
    }

    /// Slab with the impurity at the centre, in metres.
    pub fn medium(&self) -> MediumSpec {
        MediumSpec {
            length: self.slab_length,
            impurity: Some(Impurity {
                position: self.slab_length / 2.0,
                interaction: InteractionModel::QuantumNumber {
                    n: self.n,
                    n_ref: self.n_ref,
                    c6_ref: self.c6_ref,
                },
            }),
            grid: GridPolicy::default(),
        }
    }
}

/// The rb87 preset rescaled to canonical units; OD = 3 becomes L = 3.
pub fn fig3_problem() -> (ModelParams, MediumSpec) {
    let preset = Rb87Preset::default();
    let p = preset.model_params();
    let scale = p.scale();
    (p.to_dimensionless(), preset.medium().to_dimensionless(scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_raw() -> RawParams {
        RawParams {
            gamma: 1.0,
            omega_c: 1.0,
            omega_s: 1.0,
            delta: 1.0,
            delta_s: 0.0,
            big_g: 1.0,
            light_speed: 1.0,
        }
    }

    #[test]
    fn accessors() {
        let p = unit_raw().validate().unwrap();
        assert_eq!(p.gamma_bar(), 0.5);
        assert_eq!(p.l_abs(), 0.5);
        assert_eq!(p.delta_r(), 1.0);
    }

    #[test]
    fn zero_gamma_rejected() {
        let raw = RawParams { gamma: 0.0, ..unit_raw() };
        let err = raw.validate().unwrap_err();
        assert_eq!(err.violations, vec![Violation::NonPositive(ParamField::Gamma)]);
    }

    #[test]
    fn every_violation_reported() {
        let raw = RawParams {
            gamma: -1.0,
            omega_c: -0.1,
            omega_s: -2.0,
            big_g: 0.0,
            light_speed: f64::NAN,
            ..unit_raw()
        };
        let err = raw.validate().unwrap_err();
        assert_eq!(
            err.violations,
            vec![
                Violation::NonPositive(ParamField::Gamma),
                Violation::NegativeRabi(ParamField::OmegaC),
                Violation::NegativeRabi(ParamField::OmegaS),
                Violation::NonPositive(ParamField::BigG),
                Violation::NonFinite(ParamField::LightSpeed),
            ]
        );
        assert!(err.to_string().contains("NegativeRabi(omega_s)"));
    }

    #[test]
    fn negative_detunings_allowed() {
        let raw = RawParams { delta: -3.0, delta_s: -7.0, ..unit_raw() };
        assert!(raw.validate().is_ok());
    }

    #[test]
    fn rb87_fixes_optical_depth() {
        let preset = Rb87Preset::default();
        let p = preset.model_params();
        assert!((p.gamma() - TAU * 6.0e6).abs() < 1e-6);
        let g2 = 3.0 * SPEED_OF_LIGHT_SI * p.gamma_bar() / 40.0e-6;
        assert!((p.big_g().powi(2) / g2 - 1.0).abs() < 1e-14);
        assert!((preset.slab_length / p.l_abs() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn dimensionless_rb87() {
        let p = Rb87Preset::default().model_params();
        let d = p.to_dimensionless();
        assert_eq!(d.gamma(), 1.0);
        assert!((d.l_abs() - 1.0).abs() < 1e-14);
        assert!((d.omega_c() - 1.0).abs() < 1e-15);
        assert!((d.delta() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimensionless_is_idempotent() {
        let p = fig2_params();
        assert_eq!(p.to_dimensionless(), p);
        let d = Rb87Preset::default().model_params().to_dimensionless();
        let dd = d.to_dimensionless();
        assert!((dd.light_speed() / d.light_speed() - 1.0).abs() < 1e-15);
        assert_eq!(dd.omega_c(), d.omega_c());
    }

    #[test]
    fn si_rabi_in_gamma_units() {
        // Ωc = 2π·6 MHz is one γ; the SI analytic dispersion evaluated at the
        // same κ must agree with the canonical one in units of γ̄.
        let p = Rb87Preset::default().model_params();
        let d = p.to_dimensionless();
        assert!((d.omega_c() - 1.0).abs() < 1e-15);
        let kappa = 0.3;
        let w_si = crate::spectrum::analytic_dispersion(&p, kappa / p.l_abs());
        let w_d = crate::spectrum::analytic_dispersion(&d, kappa);
        assert!((w_si.im / p.gamma_bar() - w_d.im / d.gamma_bar()).abs() < 1e-12);
    }

    #[test]
    fn modify_revalidates() {
        let p = fig2_params();
        assert!(p.modify(|r| r.omega_c = -1.0).is_err());
        assert_eq!(p.modify(|r| r.omega_c = 3.0).unwrap().omega_c(), 3.0);
    }

    #[test]
    fn deserialize_validates() {
        let ok: ModelParams = serde_json::from_str(
            r#"{"gamma":1,"omega_c":1,"omega_s":1,"delta":1,"delta_s":0,"big_g":1,"light_speed":2}"#,
        )
        .unwrap();
        assert_eq!(ok.l_abs(), 1.0);
        let bad = serde_json::from_str::<ModelParams>(
            r#"{"gamma":0,"omega_c":1,"omega_s":1,"delta":1,"delta_s":0,"big_g":1,"light_speed":2}"#,
        );
        assert!(bad.is_err());
    }
}
