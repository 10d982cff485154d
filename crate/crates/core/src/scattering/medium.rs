use serde::{Deserialize, Serialize};

use super::ScatterError;
use crate::params::Scale;

/// Van der Waals strength of the impurity–medium interaction.
///
/// C6 carries units of angular frequency × length⁶. A negative value flips
/// the sign of the level shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum InteractionModel {
    C6 { c6: f64 },
    /// C6(n) = C6_ref·(n/n_ref)¹¹.
    #[serde(rename = "n")]
    QuantumNumber { n: u32, n_ref: u32, c6_ref: f64 },
}

pub const MIN_QUANTUM_NUMBER: u32 = 10;

impl InteractionModel {
    pub fn c6(&self) -> f64 {
        match *self {
            InteractionModel::C6 { c6 } => c6,
            InteractionModel::QuantumNumber { n, n_ref, c6_ref } => {
                c6_ref * (n as f64 / n_ref as f64).powi(11)
            }
        }
    }

    pub fn with_quantum_number(self, n: u32) -> Result<Self, ScatterError> {
        match self {
            InteractionModel::QuantumNumber { n_ref, c6_ref, .. } => {
                let m = InteractionModel::QuantumNumber { n, n_ref, c6_ref };
                m.validate()?;
                Ok(m)
            }
            InteractionModel::C6 { .. } => Err(ScatterError::InvalidMedium(
                "quantum-number scan needs an n-variant interaction".into(),
            )),
        }
    }

    pub fn validate(&self) -> Result<(), ScatterError> {
        match *self {
            InteractionModel::C6 { c6 } if !c6.is_finite() => {
                Err(ScatterError::InvalidMedium("c6 must be finite".into()))
            }
            InteractionModel::QuantumNumber { n, n_ref, c6_ref } => {
                if n < MIN_QUANTUM_NUMBER || n_ref < MIN_QUANTUM_NUMBER {
                    Err(ScatterError::InvalidMedium(format!(
                        "quantum numbers must be >= {MIN_QUANTUM_NUMBER} (n={n}, n_ref={n_ref})"
                    )))
                } else if !c6_ref.is_finite() {
                    Err(ScatterError::InvalidMedium("c6_ref must be finite".into()))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    fn rescaled(self, factor: f64) -> Self {
        match self {
            InteractionModel::C6 { c6 } => InteractionModel::C6 { c6: c6 * factor },
            InteractionModel::QuantumNumber { n, n_ref, c6_ref } => InteractionModel::QuantumNumber {
                n,
                n_ref,
                c6_ref: c6_ref * factor,
            },
        }
    }
}

/// Level shift C6/(z − z0)⁶; ±∞ at z = z0.
pub fn vdw_potential(m: &InteractionModel, z: f64, z0: f64) -> f64 {
    let c6 = m.c6();
    let r = z - z0;
    if r == 0.0 {
        return if c6 < 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
    }
    c6 / r.powi(6)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Impurity {
    pub position: f64,
    pub interaction: InteractionModel,
}

/// Slicing policy for the transfer-matrix composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridPolicy {
    /// Cells of the uniform starting grid.
    pub base_slices: usize,
    /// Maximum number of times any starting cell may be bisected.
    pub max_refinements: u32,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            base_slices: 64,
            max_refinements: 20,
        }
    }
}

/// Finite slab [0, L] with an optional Rydberg impurity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumSpec {
    pub length: f64,
    pub impurity: Option<Impurity>,
    #[serde(default)]
    pub grid: GridPolicy,
}

impl MediumSpec {
    pub fn uniform(length: f64) -> Self {
        Self {
            length,
            impurity: None,
            grid: GridPolicy::default(),
        }
    }

    pub fn with_impurity(length: f64, position: f64, interaction: InteractionModel) -> Self {
        Self {
            length,
            impurity: Some(Impurity {
                position,
                interaction,
            }),
            grid: GridPolicy::default(),
        }
    }

    pub fn without_impurity(&self) -> Self {
        Self {
            impurity: None,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<(), ScatterError> {
        if !(self.length.is_finite() && self.length >= 0.0) {
            return Err(ScatterError::InvalidMedium(format!(
                "length must be finite and non-negative, got {}",
                self.length
            )));
        }
        if self.grid.base_slices == 0 {
            return Err(ScatterError::InvalidMedium("base_slices must be positive".into()));
        }
        if let Some(imp) = &self.impurity {
            if !(imp.position >= 0.0 && imp.position <= self.length) {
                return Err(ScatterError::InvalidMedium(format!(
                    "impurity position {} outside [0, {}]",
                    imp.position, self.length
                )));
            }
            imp.interaction.validate()?;
        }
        Ok(())
    }

    /// Level shift at z (0 without an impurity).
    pub fn level_shift(&self, z: f64) -> f64 {
        match &self.impurity {
            Some(imp) => vdw_potential(&imp.interaction, z, imp.position),
            None => 0.0,
        }
    }

    /// Express lengths in units of `scale.length` and C6 in units of
    /// `scale.frequency · scale.length⁶`.
    pub fn to_dimensionless(&self, scale: Scale) -> MediumSpec {
        let l = scale.length;
        MediumSpec {
            length: self.length / l,
            impurity: self.impurity.map(|imp| Impurity {
                position: imp.position / l,
                interaction: imp
                    .interaction
                    .rescaled(1.0 / (scale.frequency * l.powi(6))),
            }),
            grid: self.grid,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law() {
        let m = InteractionModel::C6 { c6: 1.0 };
        assert_eq!(vdw_potential(&m, 1.0, 0.0), 1.0);
        assert_eq!(vdw_potential(&m, 2.0, 0.0), 1.0 / 64.0);
        assert_eq!(vdw_potential(&m, -2.0, 0.0), 1.0 / 64.0);
        assert_eq!(vdw_potential(&m, 0.5, 0.5), f64::INFINITY);
        let neg = InteractionModel::C6 { c6: -2.0 };
        assert_eq!(vdw_potential(&neg, 0.5, 0.5), f64::NEG_INFINITY);
        assert_eq!(vdw_potential(&neg, 1.0, 0.0), -2.0);
    }

    #[test]
    fn quantum_number_scaling() {
        let at = |n| InteractionModel::QuantumNumber { n, n_ref: 60, c6_ref: 3.0 };
        let ratio = vdw_potential(&at(60), 1.3, 0.2) / vdw_potential(&at(40), 1.3, 0.2);
        // (60/40)^11 = 1.5^11
        assert!((ratio - 86.497_558_593_75).abs() < 1e-9);
        assert_eq!(at(60).c6(), 3.0);
    }

    #[test]
    fn rejects_low_quantum_number() {
        let m = InteractionModel::QuantumNumber { n: 9, n_ref: 60, c6_ref: 1.0 };
        assert!(m.validate().is_err());
        let c6 = InteractionModel::C6 { c6: 1.0 };
        assert!(c6.with_quantum_number(50).is_err());
    }

    #[test]
    fn medium_validation() {
        let inside = MediumSpec::with_impurity(2.0, 1.0, InteractionModel::C6 { c6: 1.0 });
        assert!(inside.validate().is_ok());
        let outside = MediumSpec::with_impurity(2.0, 2.5, InteractionModel::C6 { c6: 1.0 });
        assert!(outside.validate().is_err());
        assert!(MediumSpec::uniform(-1.0).validate().is_err());
        assert!(MediumSpec::uniform(0.0).validate().is_ok());
    }

    #[test]
    fn dimensionless_potential_matches() {
        let scale = Scale { frequency: 4.0, length: 0.5 };
        let m = MediumSpec::with_impurity(3.0, 1.0, InteractionModel::C6 { c6: 7.0 });
        let d = m.to_dimensionless(scale);
        assert_eq!(d.length, 6.0);
        let z = 1.7;
        let v = m.level_shift(z) / scale.frequency;
        let vd = d.level_shift(z / scale.length);
        assert!((v - vd).abs() < 1e-12 * v.abs());
    }

    #[test]
    fn json_schema() {
        let m: MediumSpec = serde_json::from_str(
            r#"{"length":3,"impurity":{"position":1.5,"interaction":{"type":"n","n":60,"n_ref":60,"c6_ref":0.004}},"grid":{"base_slices":32,"max_refinements":8}}"#,
        )
        .unwrap();
        assert_eq!(m.grid.base_slices, 32);
        assert!(matches!(
            m.impurity.unwrap().interaction,
            InteractionModel::QuantumNumber { n: 60, .. }
        ));
    }
}
