//! Eigen-decomposition of the 6×6 non-Hermitian effective Hamiltonian.
//!
//! Eigenvalues come from a complex Schur factorisation `H = Q T Q†`;
//! eigenvectors are recovered by back-substitution on the triangular factor
//! and polished by inverse iteration when the residual bound is missed.

use nalgebra::{Schur, Vector6};
use num_complex::Complex64;

use super::hamiltonian::{EffectiveHamiltonian, Matrix6c};
use super::state::PolaritonState;
use super::SpectrumError;

pub type Vector6c = Vector6<Complex64>;

/// Residual bound relative to ‖H‖_F.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 10_000;

/// Eigenpairs sorted by ascending |Im ω|, then Re ω.
pub fn eigensystem(h: &EffectiveHamiltonian) -> Result<Vec<PolaritonState>, SpectrumError> {
    let pairs = eigenpairs(&h.matrix)?;
    let reference = super::state::dark_reference(&h.params);
    Ok(pairs
        .into_iter()
        .map(|(w, v)| PolaritonState::new(v, w, &reference))
        .collect())
}

/// Raw eigenpairs of an arbitrary complex 6×6 matrix, normalised, sorted as
/// in [`eigensystem`].
pub fn eigenpairs(m: &Matrix6c) -> Result<Vec<(Complex64, Vector6c)>, SpectrumError> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(SpectrumError::NonFinite);
    }
    let norm = m.norm();
    if norm == 0.0 {
        return Ok((0..6)
            .map(|i| (Complex64::new(0.0, 0.0), Vector6c::ith(i, Complex64::new(1.0, 0.0))))
            .collect());
    }
    let schur = Schur::try_new(*m, f64::EPSILON, MAX_ITERATIONS)
        .ok_or(SpectrumError::ConvergenceFailure)?;
    let (q, t) = schur.unpack();

    let small = f64::EPSILON * norm;
    let mut pairs = Vec::with_capacity(6);
    for i in 0..6 {
        let w = t[(i, i)];
        let mut y = Vector6c::zeros();
        y[i] = Complex64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in (j + 1)..=i {
                acc += t[(j, l)] * y[l];
            }
            let mut pivot = t[(j, j)] - w;
            if pivot.norm() < small {
                pivot = Complex64::new(small, 0.0);
            }
            y[j] = -acc / pivot;
        }
        let mut v = q * y;
        v /= Complex64::new(v.norm(), 0.0);
        if residual(m, w, &v) > RESIDUAL_TOL * norm {
            v = polish(m, w, v, norm);
        }
        if residual(m, w, &v) > RESIDUAL_TOL * norm {
            return Err(SpectrumError::ConvergenceFailure);
        }
        pairs.push((w, v));
    }

    let quantum = 1e-12 * norm.max(1.0);
    pairs.sort_by(|a, b| {
        let ka = (a.0.im.abs() / quantum).round();
        let kb = (b.0.im.abs() / quantum).round();
        ka.total_cmp(&kb).then(a.0.re.total_cmp(&b.0.re))
    });
    Ok(pairs)
}

fn residual(m: &Matrix6c, w: Complex64, v: &Vector6c) -> f64 {
    (m * v - v * w).norm()
}

/// Inverse iteration with a slightly shifted eigenvalue.
fn polish(m: &Matrix6c, w: Complex64, mut v: Vector6c, norm: f64) -> Vector6c {
    let shift = w + Complex64::new(norm * 1e-13, norm * 1e-13);
    let a = m - Matrix6c::identity() * shift;
    let lu = a.lu();
    for _ in 0..3 {
        match lu.solve(&v) {
            Some(x) if x.norm().is_finite() && x.norm() > 0.0 => {
                v = &x / Complex64::new(x.norm(), 0.0);
            }
            _ => break,
        }
    }
    v
}
