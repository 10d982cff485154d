//! Momentum-space eigenanalysis of the dual-V + Rydberg scheme.

mod dispersion;
mod eigen;
mod hamiltonian;
mod state;

use thiserror::Error;

pub use dispersion::{
    analytic_dispersion, dispersion_scan, intermediate_population, BranchSample,
    DispersionBranch, PopulationSample,
};
pub use eigen::{eigenpairs, eigensystem, Vector6c, MAX_ITERATIONS, RESIDUAL_TOL};
pub use hamiltonian::{
    build_heff, mirror, EffectiveHamiltonian, Matrix6c, BASIS, D, E_MINUS, E_PLUS, P_MINUS,
    P_PLUS, S,
};
pub use state::{
    dark_reference, dark_state, dressed_dark_state, dressed_reference, ground_components,
    overlap, DressedDarkState, PolaritonState, PHASE_FLOOR,
};

/// Two candidates closer than this in overlap are treated as a tie.
pub const AMBIGUITY_GAP: f64 = 1e-3;
/// Minimum |⟨v(kᵢ)|v(kᵢ₊₁)⟩| between consecutive branch samples.
pub const CONTINUITY_FLOOR: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("eigen-solver did not converge within {MAX_ITERATIONS} iterations")]
    ConvergenceFailure,
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("ambiguous branch: best overlap {best:.6} vs runner-up {runner_up:.6}; refine the grid")]
    BranchAmbiguity { best: f64, runner_up: f64 },
    #[error("branch continuity lost at k={k}: best overlap {overlap:.4}")]
    TrackingLost { k: f64, overlap: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
}
