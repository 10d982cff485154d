//! JSON problem documents: a parameter record in a declared unit system, an
//! optional medium, built-in presets and dotted-path overrides.
//!
//! ```json
//! {"preset": "rb87", "omega_c": 2.0e8, "medium": {"z0": 1.0e-5}}
//! ```
//!
//! With `"units": "gamma"` frequencies are multiples of γ, lengths are in
//! units of l_abs and C6 is in γ·l_abs⁶; the light speed is then fixed by
//! l_abs = 1. With `"units": "si"` frequencies are angular (rad/s), lengths
//! are metres and C6 is in rad/s·m⁶. Omitting `delta` pins δ = Ωs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::params::{
    fig3_problem, ModelParams, ParamError, RawParams, Rb87Preset, SPEED_OF_LIGHT_SI,
};
use crate::scattering::{GridPolicy, Impurity, InteractionModel, MediumSpec, ScatterError};

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Medium(#[from] ScatterError),
    #[error("unknown preset {0:?} (expected fig2, fig3 or rb87)")]
    UnknownPreset(String),
    #[error("override {0:?} is not of the form key=value")]
    MalformedOverride(String),
    #[error("cannot set {path}: {reason}")]
    BadPath { path: String, reason: String },
    #[error("{0}")]
    Units(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Gamma,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig2,
    Fig3,
    Rb87,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Fig2, Preset::Fig3, Preset::Rb87];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Rb87 => "rb87",
        }
    }

    /// The complete document this preset stands for. `delta` is left out so
    /// that it follows `omega_s`.
    pub fn document(self) -> ProblemDocument {
        let (params, medium) = fig3_problem();
        let canonical_medium = MediumDocument::from_spec(&medium);
        match self {
            Preset::Fig2 => ProblemDocument {
                preset: Some(self),
                units: Units::Gamma,
                gamma: Some(1.0),
                omega_c: 1.0,
                omega_s: 1.0,
                delta: None,
                delta_s: 0.0,
                big_g: 1.0,
                medium: Some(canonical_medium),
            },
            Preset::Fig3 => ProblemDocument {
                preset: Some(self),
                units: Units::Gamma,
                gamma: Some(1.0),
                omega_c: params.omega_c(),
                omega_s: params.omega_s(),
                delta: None,
                delta_s: 0.0,
                big_g: params.big_g(),
                medium: Some(canonical_medium),
            },
            Preset::Rb87 => {
                let rb = Rb87Preset::default();
                let p = rb.model_params();
                ProblemDocument {
                    preset: Some(self),
                    units: Units::Si,
                    gamma: Some(p.gamma()),
                    omega_c: p.omega_c(),
                    omega_s: p.omega_s(),
                    delta: None,
                    delta_s: p.delta_s(),
                    big_g: p.big_g(),
                    medium: Some(MediumDocument::from_spec(&rb.medium())),
                }
            }
        }
    }
}

impl FromStr for Preset {
    type Err = DocumentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| DocumentError::UnknownPreset(s.to_string()))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Medium in document form. No `interaction` means no impurity; `z0`
/// defaults to the slab centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumDocument {
    pub length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<InteractionModel>,
    #[serde(default)]
    pub grid: GridPolicy,
}

impl MediumDocument {
    pub fn from_spec(m: &MediumSpec) -> Self {
        Self {
            length: m.length,
            z0: m.impurity.map(|i| i.position),
            interaction: m.impurity.map(|i| i.interaction),
            grid: m.grid,
        }
    }

    pub fn to_spec(&self) -> Result<MediumSpec, ScatterError> {
        let spec = MediumSpec {
            length: self.length,
            impurity: self.interaction.map(|interaction| Impurity {
                position: self.z0.unwrap_or(self.length / 2.0),
                interaction,
            }),
            grid: self.grid,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    pub units: Units,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub omega_c: f64,
    pub omega_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub delta_s: f64,
    pub big_g: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medium: Option<MediumDocument>,
}

/// A resolved problem: the document with every default filled in, plus the
/// canonical (γ = 1, l_abs = 1) parameters and medium used for computation.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub document: ProblemDocument,
    pub params: ModelParams,
    pub medium: Option<MediumSpec>,
}

impl ProblemDocument {
    pub fn resolve(&self) -> Result<Problem, DocumentError> {
        let mut document = self.clone();
        let delta = *document.delta.get_or_insert(document.omega_s);
        let (native, light_speed) = match document.units {
            Units::Gamma => {
                let gamma = *document.gamma.get_or_insert(1.0);
                if gamma != 1.0 {
                    return Err(DocumentError::Units(format!(
                        "gamma must be 1 in gamma units, got {gamma}"
                    )));
                }
                // l_abs = c·γ̄/G² = 1
                (gamma, 2.0 * document.big_g * document.big_g)
            }
            Units::Si => {
                let gamma = document
                    .gamma
                    .ok_or_else(|| DocumentError::Units("si units need gamma in rad/s".into()))?;
                (gamma, SPEED_OF_LIGHT_SI)
            }
        };
        let raw = RawParams {
            gamma: native,
            omega_c: document.omega_c,
            omega_s: document.omega_s,
            delta,
            delta_s: document.delta_s,
            big_g: document.big_g,
            light_speed,
        };
        let p = raw.validate()?;
        let scale = p.scale();
        let medium = match &document.medium {
            Some(m) => Some(m.to_spec()?.to_dimensionless(scale)),
            None => None,
        };
        Ok(Problem {
            document,
            params: p.to_dimensionless(),
            medium,
        })
    }

    pub fn from_value(v: Value) -> Result<Self, DocumentError> {
        Ok(serde_json::from_value(expand_preset(v)?)?)
    }
}

/// Replace a `"preset"` key by the preset's full document with the remaining
/// keys merged over it.
pub fn expand_preset(v: Value) -> Result<Value, DocumentError> {
    let name = match v.get("preset") {
        None => return Ok(v),
        Some(Value::String(s)) => s.clone(),
        Some(other) => return Err(DocumentError::UnknownPreset(other.to_string())),
    };
    let preset: Preset = name.parse()?;
    let mut base = serde_json::to_value(preset.document())?;
    merge(&mut base, v);
    Ok(base)
}

/// Recursive object merge; non-object values in `over` replace those in
/// `base`.
pub fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Apply `key.sub=value`. The value is parsed as JSON when possible and
/// taken as a string otherwise; missing intermediate objects are created.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), DocumentError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| DocumentError::MalformedOverride(assignment.to_string()))?;
    let path = path.trim();
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(DocumentError::MalformedOverride(assignment.to_string()));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    let mut node = doc;
    for (i, key) in keys.iter().enumerate() {
        if node.is_null() {
            *node = Value::Object(Map::new());
        }
        let obj = node.as_object_mut().ok_or_else(|| DocumentError::BadPath {
            path: path.to_string(),
            reason: format!("{} is not an object", keys[..i].join(".")),
        })?;
        if i + 1 == keys.len() {
            obj.insert(key.to_string(), value);
            return Ok(());
        }
        node = obj.entry(key.to_string()).or_insert(Value::Null);
    }
    unreachable!("path has at least one key")
}
