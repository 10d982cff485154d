//! Piecewise-constant transfer matrices for `i ∂z E = M(z) E`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::susceptibility::{propagation_matrix, Matrix2c};
use super::{MediumSpec, ScatterError};
use crate::params::ModelParams;

/// Relative change of U under grid doubling accepted as converged.
pub const CONVERGENCE_TOL: f64 = 1e-8;
/// Geometric refinement around the impurity stops at this fraction of L.
pub const FLOOR_FRACTION: f64 = 1e-6;

/// exp(−i·M·dz) for a 2×2 matrix, stable as the eigenvalues ±λ → 0.
///
/// Writing M = (tr/2)·I + M₀ with M₀² = μ·I, the exponential is
/// e^{−i·tr·dz/2}·[cos(λdz)·I − i·sinc(λdz)·dz·M₀] with λ² = μ. Both cos and
/// sinc are even in λ, so they are evaluated from λ²dz² directly.
pub fn slab_transfer(m: &Matrix2c, dz: f64) -> Matrix2c {
    let half_trace = m.trace() / 2.0;
    let m0 = m - Matrix2c::identity() * half_trace;
    let mu = m0[(0, 0)] * m0[(0, 0)] + m0[(0, 1)] * m0[(1, 0)];
    let x2 = mu * dz * dz;
    let (cos, sinc) = if x2.norm() < 1e-4 {
        // truncation error below x2⁴/8! ≈ 2e-21
        let x4 = x2 * x2;
        let x6 = x4 * x2;
        (
            1.0 - x2 / 2.0 + x4 / 24.0 - x6 / 720.0,
            1.0 - x2 / 6.0 + x4 / 120.0 - x6 / 5040.0,
        )
    } else {
        let x = x2.sqrt();
        (x.cos(), x.sin() / x)
    };
    let phase = (-Complex64::i() * half_trace * dz).exp();
    (Matrix2c::identity() * cos - m0 * (Complex64::i() * sinc * dz)) * phase
}

/// Slice boundaries on [0, L]: a uniform grid of `slices` cells plus, with
/// an impurity, z0 itself and z0 ± L·2⁻ʲ down to [`FLOOR_FRACTION`]·L.
pub fn mesh(med: &MediumSpec, slices: usize) -> Vec<f64> {
    let l = med.length;
    let mut points: Vec<f64> = (0..=slices).map(|i| l * i as f64 / slices as f64).collect();
    if let Some(imp) = &med.impurity {
        let z0 = imp.position;
        points.push(z0);
        let mut w = l / 2.0;
        while w >= FLOOR_FRACTION * l {
            points.push(z0 - w);
            points.push(z0 + w);
            w /= 2.0;
        }
    }
    points.retain(|z| (0.0..=l).contains(z));
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * l);
    if let Some(last) = points.last_mut() {
        *last = l;
    }
    points
}

/// Effective constant generator for a slice: fourth-order Magnus
/// expansion from two Gauss–Legendre samples of M.
fn slice_generator(
    p: &ModelParams,
    med: &MediumSpec,
    a: f64,
    b: f64,
) -> Result<Matrix2c, ScatterError> {
    let h = b - a;
    let offset = 3f64.sqrt() / 6.0;
    let m1 = propagation_matrix(p, med.level_shift(a + (0.5 - offset) * h))?;
    let m2 = propagation_matrix(p, med.level_shift(a + (0.5 + offset) * h))?;
    let commutator = m2 * m1 - m1 * m2;
    let k = Complex64::new(0.0, -3f64.sqrt() * h / 12.0);
    Ok((m1 + m2) / Complex64::new(2.0, 0.0) + commutator * k)
}

/// Transfer matrix across slice `[a, b]`.
pub fn slice_transfer(
    p: &ModelParams,
    med: &MediumSpec,
    a: f64,
    b: f64,
) -> Result<Matrix2c, ScatterError> {
    if med.impurity.is_none() {
        return Ok(slab_transfer(&propagation_matrix(p, 0.0)?, b - a));
    }
    Ok(slab_transfer(&slice_generator(p, med, a, b)?, b - a))
}

/// Product of slice transfers ordered from z = 0 to z = L, so that
/// E(L) = U·E(0).
pub fn compose(p: &ModelParams, med: &MediumSpec, points: &[f64]) -> Result<Matrix2c, ScatterError> {
    let slices: Vec<Matrix2c> = points
        .par_windows(2)
        .map(|w| slice_transfer(p, med, w[0], w[1]))
        .collect::<Result<_, _>>()?;
    Ok(slices
        .iter()
        .fold(Matrix2c::identity(), |acc, t| t * acc))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MediumTransfer {
    pub matrix: Matrix2c,
    /// Slice boundaries the matrix was composed on.
    pub points: Vec<f64>,
    pub base_slices: usize,
    /// Deepest bisection of any base slice.
    pub refinements: u32,
    pub slice_count: usize,
    /// ‖U(bisected) − U‖_F / ‖U(bisected)‖_F at the returned level.
    pub change: f64,
    pub converged: bool,
}

/// Rounds of local-tolerance tightening before giving up.
pub const MAX_ROUNDS: u32 = 6;

/// Every slice split in two.
pub fn bisect_all(points: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * points.len());
    for w in points.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.extend(points.last());
    out
}

/// Bisect [a, b] until one slice and its two halves agree to
/// `tol · (b − a)`, or `depth` runs out. Pushes interior boundaries and b.
#[allow(clippy::too_many_arguments)]
fn adapt_slice(
    p: &ModelParams,
    med: &MediumSpec,
    a: f64,
    b: f64,
    whole: Matrix2c,
    tol: f64,
    depth: u32,
    out: &mut Vec<f64>,
    deepest: &mut u32,
    level: u32,
) -> Result<(), ScatterError> {
    let mid = 0.5 * (a + b);
    let left = slice_transfer(p, med, a, mid)?;
    let right = slice_transfer(p, med, mid, b)?;
    let error = (right * left - whole).norm();
    if error <= tol * (b - a) || level >= depth || mid <= a || mid >= b {
        *deepest = (*deepest).max(level);
        out.push(b);
        return Ok(());
    }
    adapt_slice(p, med, a, mid, left, tol, depth, out, deepest, level + 1)?;
    adapt_slice(p, med, mid, b, right, tol, depth, out, deepest, level + 1)
}

/// Locally refined copy of `base`. `tol` is an error per unit length in
/// units of L⁻¹.
fn adapt(
    p: &ModelParams,
    med: &MediumSpec,
    base: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, u32), ScatterError> {
    let per_length = tol / med.length;
    let depth = med.grid.max_refinements;
    let parts: Vec<(Vec<f64>, u32)> = base
        .par_windows(2)
        .map(|w| {
            let whole = slice_transfer(p, med, w[0], w[1])?;
            let mut out = Vec::new();
            let mut deepest = 0;
            adapt_slice(p, med, w[0], w[1], whole, per_length, depth, &mut out, &mut deepest, 0)?;
            Ok((out, deepest))
        })
        .collect::<Result<_, ScatterError>>()?;
    let mut points = vec![base[0]];
    let mut deepest = 0;
    for (pts, d) in parts {
        points.extend(pts);
        deepest = deepest.max(d);
    }
    Ok((points, deepest))
}

/// Refine until U stops changing under bisection of every slice; returns
/// the last level even when refinement runs out, with `converged = false`.
///
/// Slices are bisected where a slice and its two halves disagree, so the
/// narrow resonance shells around the impurity get resolved without
/// refining the smooth remainder of the medium.
pub fn compose_until_converged(
    p: &ModelParams,
    med: &MediumSpec,
) -> Result<MediumTransfer, ScatterError> {
    med.validate()?;
    let base_slices = med.grid.base_slices;
    if med.length == 0.0 {
        return Ok(MediumTransfer {
            matrix: Matrix2c::identity(),
            points: vec![0.0],
            base_slices,
            refinements: 0,
            slice_count: 0,
            change: 0.0,
            converged: true,
        });
    }
    if med.impurity.is_none() {
        let u = slab_transfer(&propagation_matrix(p, 0.0)?, med.length);
        return Ok(MediumTransfer {
            matrix: u,
            points: vec![0.0, med.length],
            base_slices,
            refinements: 0,
            slice_count: 1,
            change: 0.0,
            converged: true,
        });
    }
    let base = mesh(med, base_slices);
    let mut tol = CONVERGENCE_TOL;
    let mut last: Option<MediumTransfer> = None;
    for _ in 0..MAX_ROUNDS {
        let (points, deepest) = adapt(p, med, &base, tol)?;
        if last.as_ref().is_some_and(|t| t.points == points) {
            // tightening changed nothing; more rounds will not either
            break;
        }
        let u = compose(p, med, &points)?;
        let finer = bisect_all(&points);
        let check = compose(p, med, &finer)?;
        let change = (check - u).norm() / check.norm();
        let t = MediumTransfer {
            matrix: check,
            slice_count: finer.len() - 1,
            points: finer,
            base_slices,
            refinements: deepest + 1,
            change,
            converged: change < CONVERGENCE_TOL,
        };
        if t.converged {
            return Ok(t);
        }
        last = Some(t);
        tol /= 16.0;
    }
    Ok(last.expect("at least one round"))
}

/// Total transfer matrix across the medium; errors if the refinement cap is
/// reached before convergence.
pub fn transfer_through_medium(
    p: &ModelParams,
    med: &MediumSpec,
) -> Result<MediumTransfer, ScatterError> {
    let t = compose_until_converged(p, med)?;
    if !t.converged {
        return Err(ScatterError::GridNotConverged {
            change: t.change,
            refinements: t.refinements,
        });
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::canonical;
    use crate::scattering::InteractionModel;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Taylor series of exp(A) summed to convergence, for reference.
    fn expm_series(a: Matrix2c) -> Matrix2c {
        let mut term = Matrix2c::identity();
        let mut sum = Matrix2c::identity();
        for n in 1..80 {
            term = term * a / Complex64::new(n as f64, 0.0);
            sum += term;
        }
        sum
    }

    #[test]
    fn zero_generator_is_identity() {
        assert_eq!(slab_transfer(&Matrix2c::zeros(), 0.7), Matrix2c::identity());
    }

    #[test]
    fn nilpotent_series_terminates() {
        let q = c(0.5, 0.0);
        let i = Complex64::i();
        let m = Matrix2c::new(-i * q, i * q, -i * q, i * q);
        let dz = 1.7;
        let u = slab_transfer(&m, dz);
        let expected = Matrix2c::identity() - m * (i * dz);
        assert!((u - expected).norm() < 1e-15);
    }

    #[test]
    fn matches_taylor_series() {
        let m = Matrix2c::new(c(0.3, -0.8), c(-0.2, 0.4), c(1.1, 0.1), c(-0.5, 0.2));
        for dz in [1e-6, 0.01, 0.5, 2.0] {
            let u = slab_transfer(&m, dz);
            let e = expm_series(m * c(0.0, -dz));
            assert!((u - e).norm() < 1e-13 * e.norm(), "dz={dz}");
        }
    }

    #[test]
    fn traceless_has_unit_determinant() {
        let m = Matrix2c::new(c(0.3, -0.8), c(-0.2, 0.4), c(0.2, -0.4), c(-0.3, 0.8));
        for dz in [0.1, 1.0, 3.0] {
            assert!((slab_transfer(&m, dz).determinant() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn uniform_medium_independent_of_slicing() {
        let p = canonical(0.8, 1.2, 0.4, 0.3, 1.0).unwrap();
        let m = propagation_matrix(&p, 0.0).unwrap();
        let exact = slab_transfer(&m, 2.5);
        let med = MediumSpec::uniform(2.5);
        for n in [1, 7, 64] {
            let u = compose(&p, &med, &mesh(&med, n)).unwrap();
            assert!((u - exact).norm() < 1e-10 * exact.norm());
        }
    }

    #[test]
    fn empty_medium_is_identity() {
        let p = canonical(1.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let t = transfer_through_medium(&p, &MediumSpec::uniform(0.0)).unwrap();
        assert_eq!(t.matrix, Matrix2c::identity());
    }

    #[test]
    fn mesh_contains_refinement() {
        let med = MediumSpec::with_impurity(3.0, 1.1, InteractionModel::C6 { c6: 0.01 });
        let pts = mesh(&med, 8);
        assert_eq!(pts[0], 0.0);
        assert_eq!(*pts.last().unwrap(), 3.0);
        assert!(pts.contains(&1.1));
        assert!(pts.windows(2).all(|w| w[1] > w[0]));
        let finest = pts.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        assert!(finest >= FLOOR_FRACTION * 3.0 * 0.999);
        assert!(finest < 4.0 * FLOOR_FRACTION * 3.0);
    }

    #[test]
    fn impurity_converges_under_doubling() {
        let p = canonical(1.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let med = MediumSpec::with_impurity(3.0, 1.5, InteractionModel::C6 { c6: 0.004 });
        let t = transfer_through_medium(&p, &med).unwrap();
        assert!(t.converged);
        assert!((t.matrix.determinant() - 1.0).norm() < 1e-9);
        // one more bisection moves U by less than the tolerance
        let finer = compose(&p, &med, &bisect_all(&t.points)).unwrap();
        assert!((finer - t.matrix).norm() / t.matrix.norm() < CONVERGENCE_TOL);
    }

    #[test]
    fn bisect_all_doubles() {
        assert_eq!(bisect_all(&[0.0, 1.0, 3.0]), vec![0.0, 0.5, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn narrow_resonance_shell_is_resolved() {
        // Ωc = 20: the two-photon shell around the impurity is ~1e-4 wide
        let p = canonical(20.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let med = MediumSpec::with_impurity(3.0, 1.5, InteractionModel::C6 { c6: 0.004 });
        let t = transfer_through_medium(&p, &med).unwrap();
        assert!(t.slice_count < 20_000, "{}", t.slice_count);
        let finer = compose(&p, &med, &bisect_all(&t.points)).unwrap();
        assert!((finer - t.matrix).norm() / t.matrix.norm() < CONVERGENCE_TOL);
    }

    #[test]
    fn refinement_cap_reported() {
        let p = canonical(1.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let mut med = MediumSpec::with_impurity(3.0, 1.5, InteractionModel::C6 { c6: 0.004 });
        med.grid.base_slices = 2;
        med.grid.max_refinements = 0;
        let err = transfer_through_medium(&p, &med).unwrap_err();
        assert!(matches!(err, ScatterError::GridNotConverged { .. }));
    }
}
