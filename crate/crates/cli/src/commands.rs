use std::path::PathBuf;

use serde_json::json;
use srpol::document::Problem;
use srpol::oracle::eigen_residual;
use srpol::scattering::{
    scan_quantum_number, scan_ratio, scatter_lenient, InteractionModel, MediumSpec, ScanTable,
    ScatterResult, MIN_QUANTUM_NUMBER,
};
use srpol::spectrum::{
    analytic_dispersion, build_heff, dark_state, dispersion_scan, dressed_dark_state,
    intermediate_population, BASIS,
};
use srpol::verify::{run_suite, Report, SuiteOptions};

use crate::config::{Grid, Sources};
use crate::error::CliError;
use crate::output::{ensure_dir, num, provenance, write_csv, write_json, write_plot_script};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Dispersion,
    Population,
    Darkstate,
    DressedDarkstate,
    Scatter,
    ScanN,
    ScanRatio,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dispersion => "dispersion",
            Command::Population => "population",
            Command::Darkstate => "darkstate",
            Command::DressedDarkstate => "dressed-darkstate",
            Command::Scatter => "scatter",
            Command::ScanN => "scan-n",
            Command::ScanRatio => "scan-ratio",
            Command::Verify => "verify",
        }
    }

    pub fn default_grid(self) -> Option<Grid> {
        match self {
            Command::Dispersion => Some(Grid::new(-1.0, 1.0, 401)),
            Command::Population => Some(Grid::new(-3.0, 3.0, 601)),
            Command::ScanN => Some(Grid::new(40.0, 100.0, 7)),
            Command::ScanRatio => Some(Grid::new(0.0, 20.0, 41)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub sources: Sources,
    pub output: PathBuf,
    pub grid: Option<Grid>,
    pub no_impurity: bool,
}

impl RunConfig {
    fn grid(&self) -> Vec<f64> {
        self.grid
            .or(self.command.default_grid())
            .map(|g| g.points())
            .unwrap_or_default()
    }

    fn problem(&self) -> Result<Problem, CliError> {
        if self.sources.is_empty() {
            return Err(CliError::config(
                "no parameters given: use --preset, --config or --set",
            ));
        }
        self.sources.load()
    }
}

/// Run one command; returns the files written.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    if cfg.command == Command::Verify {
        return verify(cfg);
    }
    let problem = cfg.problem()?;
    ensure_dir(&cfg.output)?;
    match cfg.command {
        Command::Dispersion => dispersion(cfg, &problem),
        Command::Population => population(cfg, &problem),
        Command::Darkstate => darkstate(cfg, &problem),
        Command::DressedDarkstate => dressed(cfg, &problem),
        Command::Scatter => scatter_cmd(cfg, &problem),
        Command::ScanN => scan_n(cfg, &problem),
        Command::ScanRatio => scan_ratio_cmd(cfg, &problem),
        Command::Verify => unreachable!(),
    }
}

fn dispersion(cfg: &RunConfig, problem: &Problem) -> Result<Vec<PathBuf>, CliError> {
    let p = &problem.params;
    let kappa = cfg.grid();
    let branch = dispersion_scan(p, &kappa).map_err(|e| CliError::computation("dispersion", e))?;
    let gb = p.gamma_bar();
    let rows: Vec<Vec<String>> = branch
        .samples
        .iter()
        .map(|s| {
            vec![
                num(s.k * p.l_abs()),
                num(s.omega.re / gb),
                num(s.omega.im / gb),
                num(s.state.intermediate_population()),
                num(s.state.dark_overlap),
                num(analytic_dispersion(p, s.k).im / gb),
            ]
        })
        .collect();
    let csv = write_csv(
        &cfg.output.join("fig2a.csv"),
        &provenance(cfg.command.name(), problem),
        &[
            "k_labs",
            "re_omega_over_gammabar",
            "im_omega_over_gammabar",
            "pop_e_plus_minus",
            "dark_overlap",
            "im_omega_analytic_over_gammabar",
        ],
        &rows,
    )?;
    Ok(vec![csv, write_plot_script(&cfg.output)?])
}

fn population(cfg: &RunConfig, problem: &Problem) -> Result<Vec<PathBuf>, CliError> {
    let p = &problem.params;
    let samples = intermediate_population(p, &cfg.grid())
        .map_err(|e| CliError::computation("population", e))?;
    let gb = p.gamma_bar();
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| {
            vec![
                num(s.ratio),
                num(s.population),
                num(s.state.eigenvalue.re / gb),
                num(s.state.eigenvalue.im / gb),
                num(s.state.dark_overlap),
            ]
        })
        .collect();
    let csv = write_csv(
        &cfg.output.join("fig2b.csv"),
        &provenance(cfg.command.name(), problem),
        &[
            "delta_over_omega_s",
            "pop_e_plus_minus",
            "re_omega_over_gammabar",
            "im_omega_over_gammabar",
            "dark_overlap",
        ],
        &rows,
    )?;
    Ok(vec![csv, write_plot_script(&cfg.output)?])
}

fn darkstate(cfg: &RunConfig, problem: &Problem) -> Result<Vec<PathBuf>, CliError> {
    let p = &problem.params;
    let state = dark_state(p, 0.0).map_err(|e| CliError::computation("dark state", e))?;
    let residual = eigen_residual(&build_heff(p, 0.0, 0.0), state.eigenvalue, &state.vector());
    let record = json!({
        "document": problem.document,
        "basis": BASIS,
        "k": 0.0,
        "state": state,
        "intermediate_population": state.intermediate_population(),
        "eigen_residual": residual,
    });
    Ok(vec![write_json(&cfg.output.join("darkstate.json"), &record)?])
}

fn dressed(cfg: &RunConfig, problem: &Problem) -> Result<Vec<PathBuf>, CliError> {
    let p = &problem.params;
    let d = dressed_dark_state(p).map_err(|e| CliError::computation("dressed dark state", e))?;
    let record = json!({
        "document": problem.document,
        "basis": BASIS,
        "dressed": d,
        "rydberg_amplitude_abs": d.state.rydberg_amplitude().norm(),
    });
    Ok(vec![write_json(&cfg.output.join("dressed-darkstate.json"), &record)?])
}

fn medium_of(cfg: &RunConfig, problem: &Problem) -> Result<MediumSpec, CliError> {
    let med = problem
        .medium
        .ok_or_else(|| CliError::config("this command needs a medium in the document"))?;
    Ok(if cfg.no_impurity {
        med.without_impurity()
    } else {
        med
    })
}

const SCATTER_COLUMNS: [&str; 7] = [
    "T",
    "R",
    "A",
    "T_intensity",
    "R_intensity",
    "A_intensity",
    "converged_flag",
];

fn scatter_row(label: String, r: &ScatterResult) -> Vec<String> {
    vec![
        label,
        num(r.transmission),
        num(r.reflection),
        num(r.absorption),
        num(r.intensity.transmission),
        num(r.intensity.reflection),
        num(r.intensity.absorption),
        r.converged.to_string(),
    ]
}

fn scatter_cmd(cfg: &RunConfig, problem: &Problem) -> Result<Vec<PathBuf>, CliError> {
    let p = &problem.params;
    let med = medium_of(cfg, problem)?;
    let mut rows = Vec::new();
    if med.impurity.is_some() {
        let r = scatter_lenient(p, &med).map_err(|e| CliError::computation("scatter", e))?;
        rows.push(scatter_row("impurity".into(), &r));
    }
    let base = scatter_lenient(p, &med.without_impurity())
        .map_err(|e| CliError::computation("scatter baseline", e))?;
    rows.push(scatter_row("baseline".into(), &base));
    let mut columns = vec!["case"];
    columns.extend(SCATTER_COLUMNS);
    let csv = write_csv(
        &cfg.output.join("scatter.csv"),
        &provenance(cfg.command.name(), problem),
        &columns,
        &rows,
    )?;
    Ok(vec![csv])
}

fn scan_rows(table: &ScanTable, integer: bool) -> Vec<Vec<String>> {
    let mut rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            let x = if integer {
                format!("{}", r.variable as u32)
            } else {
                num(r.variable)
            };
            scatter_row(x, &r.result)
        })
        .collect();
    rows.push(scatter_row("baseline".into(), &table.baseline));
    rows
}

fn scan_medium(cfg: &RunConfig, problem: &Problem) -> Result<(MediumSpec, u32), CliError> {
    if cfg.no_impurity {
        return Err(CliError::config("scans need the impurity; drop --no-impurity"));
    }
    let med = medium_of(cfg, problem)?;
    match med.impurity.map(|i| i.interaction) {
        Some(InteractionModel::QuantumNumber { n, .. }) => Ok((med, n)),
        Some(_) => Err(CliError::config(
            "scans need an interaction of type \"n\" (n, n_ref, c6_ref)",
        )),
        None => Err(CliError::config("scans need an impurity in the medium")),
    }
}

fn write_scan(
    cfg: &RunConfig,
    problem: &Problem,
    file: &str,
    table: &ScanTable,
    integer: bool,
) -> Result<Vec<PathBuf>, CliError> {
    let mut columns = vec!["scan_variable"];
    columns.extend(SCATTER_COLUMNS);
    let csv = write_csv(
        &cfg.output.join(file),
        &provenance(cfg.command.name(), problem),
        &columns,
        &scan_rows(table, integer),
    )?;
    Ok(vec![csv, write_plot_script(&cfg.output)?])
}

fn scan_n(cfg: &RunConfig, problem: &Problem) -> Result<Vec<PathBuf>, CliError> {
    let (med, _) = scan_medium(cfg, problem)?;
    let n_grid = cfg
        .grid()
        .into_iter()
        .map(|x| {
            let n = x.round();
            if (x - n).abs() > 1e-9 || n < MIN_QUANTUM_NUMBER as f64 || n > u32::MAX as f64 {
                Err(CliError::Config(format!(
                    "quantum number {x} must be an integer >= {MIN_QUANTUM_NUMBER}"
                )))
            } else {
                Ok(n as u32)
            }
        })
        .collect::<Result<Vec<u32>, _>>()?;
    let table = scan_quantum_number(&problem.params, &med, &n_grid)
        .map_err(|e| CliError::computation("scan over n", e))?;
    write_scan(cfg, problem, "fig3-upper.csv", &table, true)
}

fn scan_ratio_cmd(cfg: &RunConfig, problem: &Problem) -> Result<Vec<PathBuf>, CliError> {
    let (med, n) = scan_medium(cfg, problem)?;
    let ratios = cfg.grid();
    if let Some(bad) = ratios.iter().find(|r| **r < 0.0) {
        return Err(CliError::Config(format!("ratio {bad} must be non-negative")));
    }
    let table = scan_ratio(&problem.params, &med, &ratios, n)
        .map_err(|e| CliError::computation("scan over omega_c/omega_s", e))?;
    write_scan(cfg, problem, "fig3-lower.csv", &table, false)
}

fn verify(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(&cfg.output)?;
    let report = Report::new(run_suite(&SuiteOptions::default()))
        .map_err(|e| CliError::computation("verify", e))?;
    let path = write_json(&cfg.output.join("report.json"), &report)?;
    if !report.overall_pass {
        let names: Vec<&str> = report.failures().map(|r| r.test_name.as_str()).collect();
        return Err(CliError::Verification(format!(
            "{} check(s) failed: {}; see {}",
            names.len(),
            names.join(", "),
            path.display()
        )));
    }
    Ok(vec![path])
}
