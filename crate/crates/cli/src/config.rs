use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::Value;
use srpol::document::{apply_override, Problem, ProblemDocument};

use crate::error::CliError;

/// `start:stop:count`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub const fn new(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(format!("grid {s:?} is not start:stop:count"));
        };
        let num = |x: &str| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("grid bound {x:?} is not a finite number"))
        };
        let start = num(start)?;
        let stop = num(stop)?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| format!("grid count {count:?} is not a positive integer"))?;
        if count == 0 || (count == 1 && start != stop) {
            return Err(format!("grid {s:?} needs count >= 2 unless start == stop"));
        }
        Ok(Self { start, stop, count })
    }
}

/// Where the problem document comes from, in increasing precedence:
/// config file, `--preset`, `--set` overrides.
#[derive(Debug, Clone, Default)]
pub struct Sources {
    pub config: Option<PathBuf>,
    pub preset: Option<String>,
    pub overrides: Vec<String>,
}

impl Sources {
    pub fn is_empty(&self) -> bool {
        self.config.is_none() && self.preset.is_none() && self.overrides.is_empty()
    }

    pub fn load(&self) -> Result<Problem, CliError> {
        let mut doc = match &self.config {
            Some(path) => read_json(path)?,
            None => Value::Object(Default::default()),
        };
        if let Some(name) = &self.preset {
            let obj = doc
                .as_object_mut()
                .ok_or_else(|| CliError::config("config document must be a JSON object"))?;
            obj.insert("preset".into(), Value::String(name.clone()));
        }
        for assignment in &self.overrides {
            apply_override(&mut doc, assignment).map_err(CliError::config)?;
        }
        ProblemDocument::from_value(doc)
            .and_then(|d| d.resolve())
            .map_err(CliError::config)
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
