use nalgebra::{Matrix4, Matrix6, SMatrix};
use num_complex::Complex64;

use crate::params::ModelParams;

/// Basis order of [`EffectiveHamiltonian`] rows and columns.
pub const BASIS: [&str; 6] = ["E+", "E-", "D", "S", "P+", "P-"];

pub const E_PLUS: usize = 0;
pub const E_MINUS: usize = 1;
pub const D: usize = 2;
pub const S: usize = 3;
pub const P_PLUS: usize = 4;
pub const P_MINUS: usize = 5;

pub type Matrix6c = Matrix6<Complex64>;

/// Momentum-space coefficient matrix of the coupled probe/coherence
/// equations, `i ∂t Υ = H Υ`.
///
/// The D–S coupling carries a minus sign (a π phase on the Rydberg
/// coupling field). Observables depend on Ωs only through Ωs², and with this
/// phase the k = 0 dark state at δ = +Ωs is (Ωc, Ωc, −G, −G, 0, 0)/𝒩.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonian {
    pub matrix: Matrix6c,
    pub k: f64,
    pub v_shift: f64,
    pub params: ModelParams,
}

pub fn build_heff(p: &ModelParams, k: f64, v: f64) -> EffectiveHamiltonian {
    let re = |x: f64| Complex64::new(x, 0.0);
    let mut h = Matrix6c::zeros();
    let ck = p.light_speed() * k;
    let g = p.big_g();
    let wc = p.omega_c();
    let ws = p.omega_s();

    h[(E_PLUS, E_PLUS)] = re(ck);
    h[(E_MINUS, E_MINUS)] = re(-ck);
    h[(E_PLUS, P_PLUS)] = re(g);
    h[(E_MINUS, P_MINUS)] = re(g);

    h[(P_PLUS, E_PLUS)] = re(g);
    h[(P_MINUS, E_MINUS)] = re(g);
    h[(P_PLUS, D)] = re(wc);
    h[(P_MINUS, D)] = re(wc);
    h[(P_PLUS, P_PLUS)] = Complex64::new(0.0, -p.gamma_bar());
    h[(P_MINUS, P_MINUS)] = Complex64::new(0.0, -p.gamma_bar());

    h[(D, P_PLUS)] = re(wc);
    h[(D, P_MINUS)] = re(wc);
    h[(D, D)] = re(p.delta());
    h[(D, S)] = re(-ws);

    h[(S, D)] = re(-ws);
    // impurity enters as +iV·S in ∂t S
    h[(S, S)] = re(p.delta_r() - v);

    EffectiveHamiltonian {
        matrix: h,
        k,
        v_shift: v,
        params: *p,
    }
}

impl EffectiveHamiltonian {
    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Steady-state propagation matrix obtained by eliminating the atomic
    /// coherences (D, S, P±) from `H Υ = 0`. Returns `None` when the atomic
    /// block is singular.
    ///
    /// This is an independent route to the susceptibilities: it uses only the
    /// matrix entries, not the closed-form expressions.
    pub fn steady_state_reduction(&self) -> Option<SMatrix<Complex64, 2, 2>> {
        let h = &self.matrix;
        let atoms = [D, S, P_PLUS, P_MINUS];
        let fields = [E_PLUS, E_MINUS];
        let a = Matrix4::from_fn(|i, j| h[(atoms[i], atoms[j])]);
        let b = SMatrix::<Complex64, 4, 2>::from_fn(|i, j| h[(atoms[i], fields[j])]);
        let c = SMatrix::<Complex64, 2, 4>::from_fn(|i, j| h[(fields[i], atoms[j])]);
        let x = a.lu().solve(&b)?;
        let mut m = -(c * x) / Complex64::new(self.params.light_speed(), 0.0);
        // E₋ propagates backwards
        for j in 0..2 {
            m[(1, j)] = -m[(1, j)];
        }
        Some(m)
    }
}

/// Relabel E+↔E− and P+↔P−.
pub fn mirror(m: &Matrix6c) -> Matrix6c {
    let perm = [E_MINUS, E_PLUS, D, S, P_MINUS, P_PLUS];
    Matrix6c::from_fn(|i, j| m[(perm[i], perm[j])])
}
