//! Two-level Bloch dynamics under drive, decay, incoherent pump and pure
//! dephasing, in transient and steady-state regimes.
//!
//! The equations of motion are
//!
//! ```text
//! d⟨σ−⟩/dt = −((γ+γ*+ξ)/2 − iδ_L)⟨σ−⟩ + Ω⟨σz⟩
//! d⟨σz⟩/dt = −(γ+ξ)(⟨σz⟩ + 1/2) + ξ − Ω·Re⟨σ−⟩
//! ```
//!
//! Internally the state lives in the real 3-vector (Re⟨σ−⟩, Im⟨σ−⟩, ⟨σz⟩);
//! the complex coherence is reconstructed at the boundary.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use num_complex::Complex64;
use thiserror::Error;

use crate::model::{TimeGrid, TwoLevelParams};

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("grid too coarse: dt = {dt} exceeds {max_dt} required by the fastest rate")]
    GridTooCoarse { dt: f64, max_dt: f64 },
    #[error("no unique steady state: all rates and the drive vanish")]
    NoUniqueSteadyState,
}

/// Atomic expectation values ⟨σ−⟩ and ⟨σz⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub s_minus: Complex64,
    pub s_z: f64,
}

impl BlochState {
    pub const EXCITED: Self = Self { s_minus: Complex64::new(0.0, 0.0), s_z: 0.5 };
    pub const GROUND: Self = Self { s_minus: Complex64::new(0.0, 0.0), s_z: -0.5 };

    pub fn new(s_minus: Complex64, s_z: f64) -> Self {
        Self { s_minus, s_z }
    }

    /// Excited state population P_e = ⟨σz⟩ + 1/2.
    pub fn excited_population(&self) -> f64 {
        self.s_z + 0.5
    }

    /// Inside the Bloch ball, |⟨σ−⟩|² + ⟨σz⟩² ≤ 1/4 + tol.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.s_minus.norm_sqr() + self.s_z * self.s_z <= 0.25 + tol
            && (-0.5 - tol..=0.5 + tol).contains(&self.s_z)
    }

    fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.s_minus.re, self.s_minus.im, self.s_z)
    }

    fn from_vector(v: Vector3<f64>) -> Self {
        Self { s_minus: Complex64::new(v[0], v[1]), s_z: v[2] }
    }
}

/// Time derivative of a [`BlochState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDeriv {
    pub d_s_minus: Complex64,
    pub d_s_z: f64,
}

/// Sampled solution of the Bloch equations.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlochState>,
}

impl BlochTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn excited_population(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.excited_population()).collect()
    }
}

/// The Bloch system is affine-linear, dx/dt = A·x + b.
fn system_matrices(params: &TwoLevelParams) -> (Matrix3<f64>, Vector3<f64>) {
    let g2 = params.coherence_decay();
    let gt = params.gamma + params.xi;
    let omega = params.rabi_frequency();
    let d = params.delta_l;
    let a = Matrix3::new(
        -g2, -d, omega, //
        d, -g2, 0.0, //
        -omega, 0.0, -gt,
    );
    let b = Vector3::new(0.0, 0.0, params.xi - gt / 2.0);
    (a, b)
}

/// Right-hand side of the Bloch equations.
pub fn bloch_rhs(state: &BlochState, params: &TwoLevelParams) -> BlochDeriv {
    let (a, b) = system_matrices(params);
    let dx = a * state.to_vector() + b;
    BlochDeriv { d_s_minus: Complex64::new(dx[0], dx[1]), d_s_z: dx[2] }
}

fn check_grid(params: &TwoLevelParams, grid: &TimeGrid) -> Result<f64, SolveError> {
    let fastest = (params.gamma + params.gamma_star + params.xi).max(params.rabi_frequency());
    let max_dt = 0.1 / fastest;
    let dt = grid.dt();
    if dt > max_dt {
        return Err(SolveError::GridTooCoarse { dt, max_dt });
    }
    Ok(dt)
}

/// Classic fixed-step 4th-order Runge-Kutta integration sampled on the grid
/// nodes.
pub fn evolve_rk4(
    params: &TwoLevelParams,
    init: &BlochState,
    grid: &TimeGrid,
) -> Result<BlochTrajectory, SolveError> {
    let dt = check_grid(params, grid)?;
    let (a, b) = system_matrices(params);
    let rhs = |x: &Vector3<f64>| a * x + b;

    let mut x = init.to_vector();
    let mut states = Vec::with_capacity(grid.n_steps + 1);
    states.push(BlochState::from_vector(x));
    for _ in 0..grid.n_steps {
        let k1 = rhs(&x);
        let k2 = rhs(&(x + 0.5 * dt * k1));
        let k3 = rhs(&(x + 0.5 * dt * k2));
        let k4 = rhs(&(x + dt * k3));
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        states.push(BlochState::from_vector(x));
    }
    Ok(BlochTrajectory { times: grid.times(), states })
}

/// Exact propagation of the affine system via the augmented matrix
/// exponential exp([[A, b], [0, 0]]·t), which also covers a singular A with
/// no stationary point.
pub fn evolve_exact(
    params: &TwoLevelParams,
    init: &BlochState,
    grid: &TimeGrid,
) -> Result<BlochTrajectory, SolveError> {
    let dt = grid.dt();
    let (a, b) = system_matrices(params);
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&a);
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&b);
    let step = (m * dt).exp();

    let x0 = init.to_vector();
    let mut y = Vector4::new(x0[0], x0[1], x0[2], 1.0);
    let mut states = Vec::with_capacity(grid.n_steps + 1);
    states.push(*init);
    for _ in 0..grid.n_steps {
        y = step * y;
        states.push(BlochState::from_vector(Vector3::new(y[0], y[1], y[2])));
    }
    Ok(BlochTrajectory { times: grid.times(), states })
}

/// Steady state of the Bloch equations. Uses the closed form at δ_L = 0 and
/// the direct 3×3 linear solve otherwise.
pub fn steady_state(params: &TwoLevelParams) -> Result<BlochState, SolveError> {
    if params.delta_l != 0.0 {
        return steady_state_linear(params);
    }
    let gt = params.gamma + params.xi;
    let g2 = params.coherence_decay();
    let omega = params.rabi_frequency();
    if g2 == 0.0 {
        // all rates vanish; a pure drive only rotates the Bloch vector
        return Err(SolveError::NoUniqueSteadyState);
    }
    let s_z = (params.xi - params.gamma) / 2.0 / (gt + omega * omega / g2);
    let s_minus = Complex64::new(omega * s_z / g2, 0.0);
    Ok(BlochState { s_minus, s_z })
}

/// Steady state via the 3×3 linear solve A·x = −b. Cross-check route for the
/// closed form.
pub fn steady_state_linear(params: &TwoLevelParams) -> Result<BlochState, SolveError> {
    let (a, b) = system_matrices(params);
    let lu = a.lu();
    match lu.solve(&(-b)) {
        Some(x) => Ok(BlochState::from_vector(x)),
        None => Err(SolveError::NoUniqueSteadyState),
    }
}
