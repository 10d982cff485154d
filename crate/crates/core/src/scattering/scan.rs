use rayon::prelude::*;
use serde::Serialize;

use super::{scatter_lenient, MediumSpec, ScatterError, ScatterResult};
use crate::params::ModelParams;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub variable: f64,
    pub result: ScatterResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub variable: &'static str,
    pub rows: Vec<ScanRow>,
    /// Same parameters without the impurity.
    pub baseline: ScatterResult,
}

impl ScanTable {
    /// True if A never decreases along the scan (tolerance 1e-12).
    pub fn absorption_non_decreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].result.absorption >= w[0].result.absorption - 1e-12)
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.result.converged)
    }
}

fn impurity_of(med: &MediumSpec) -> Result<super::Impurity, ScatterError> {
    med.impurity
        .ok_or_else(|| ScatterError::InvalidMedium("scan requires an impurity".into()))
}

/// T, R, A as the impurity's principal quantum number varies.
pub fn scan_quantum_number(
    p: &ModelParams,
    med: &MediumSpec,
    n_grid: &[u32],
) -> Result<ScanTable, ScatterError> {
    let imp = impurity_of(med)?;
    let rows = n_grid
        .par_iter()
        .map(|&n| {
            let mut m = *med;
            m.impurity = Some(super::Impurity {
                interaction: imp.interaction.with_quantum_number(n)?,
                ..imp
            });
            Ok(ScanRow {
                variable: n as f64,
                result: scatter_lenient(p, &m)?,
            })
        })
        .collect::<Result<Vec<_>, ScatterError>>()?;
    Ok(ScanTable {
        variable: "n",
        rows,
        baseline: scatter_lenient(p, &med.without_impurity())?,
    })
}

/// T, R, A as Ωc/Ωs varies at quantum number `n`, with δ re-pinned to Ωs.
pub fn scan_ratio(
    p: &ModelParams,
    med: &MediumSpec,
    ratio_grid: &[f64],
    n: u32,
) -> Result<ScanTable, ScatterError> {
    let imp = impurity_of(med)?;
    let mut m = *med;
    m.impurity = Some(super::Impurity {
        interaction: imp.interaction.with_quantum_number(n)?,
        ..imp
    });
    let pin = |ratio: f64| {
        p.modify(|r| {
            r.omega_c = ratio * r.omega_s;
            r.delta = r.omega_s;
        })
        .map_err(|e| ScatterError::InvalidMedium(format!("ratio {ratio}: {e}")))
    };
    let rows = ratio_grid
        .par_iter()
        .map(|&ratio| {
            Ok(ScanRow {
                variable: ratio,
                result: scatter_lenient(&pin(ratio)?, &m)?,
            })
        })
        .collect::<Result<Vec<_>, ScatterError>>()?;
    let base = pin(p.omega_c() / p.omega_s())?;
    Ok(ScanTable {
        variable: "omega_c_over_omega_s",
        rows,
        baseline: scatter_lenient(&base, &med.without_impurity())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::fig3_problem;
    use crate::scattering::InteractionModel;

    #[test]
    fn ratio_zero_is_two_level() {
        let (p, med) = fig3_problem();
        let t = scan_ratio(&p, &med, &[0.0], 60).unwrap();
        let r = &t.rows[0].result;
        assert!((r.transmission - (-3f64).exp()).abs() < 1e-6);
        assert!(r.reflection < 1e-10);
    }

    #[test]
    fn needs_quantum_number_model() {
        let (p, mut med) = fig3_problem();
        med.impurity.as_mut().unwrap().interaction = InteractionModel::C6 { c6: 1.0 };
        assert!(scan_quantum_number(&p, &med, &[50]).is_err());
        assert!(scan_quantum_number(&p, &med.without_impurity(), &[50]).is_err());
    }

    #[test]
    fn baseline_row_present() {
        let (p, med) = fig3_problem();
        let t = scan_quantum_number(&p, &med, &[40, 60]).unwrap();
        assert!((t.baseline.transmission - 0.4).abs() < 1e-9);
        assert!((t.baseline.reflection - 0.6).abs() < 1e-9);
        assert_eq!(t.rows.len(), 2);
        assert!(t.all_converged());
    }
}
