//! Stationary Rydberg polaritons in a dual-V + Rydberg level scheme.
//!
//! * [`params`]: validated physical parameters, unit scaling and presets.
//! * [`spectrum`]: the 6×6 effective Hamiltonian, dark states and dispersion.
//! * [`scattering`]: cw probe transmission/reflection through a medium with a
//!   Rydberg impurity.
//! * [`oracle`]: independent verifiers used by the test and verify suites.
//! * [`verify`]: the invariant/oracle suite behind `srpol verify`.

pub mod document;
pub mod oracle;
pub mod params;
pub mod scattering;
pub mod spectrum;
pub mod verify;

pub use num_complex::Complex64;
pub use params::{ModelParams, RawParams};
