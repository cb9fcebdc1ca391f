//! Exciton/biexciton cascade: a three-level ladder (|g⟩, |X⟩, |XX⟩) with
//! resonant two-photon pumping of the biexciton, a resonant probe on the
//! excitonic transition, and Lindblad decays |XX⟩→|X⟩ (Γ_XX) and |X⟩→|g⟩
//! (Γ_X).
//!
//! Density matrices are vectorized column-major; the Liouvillian acts as a
//! 9×9 complex matrix on vec(ρ).

use nalgebra::{Matrix3, SMatrix, SVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::model::{ThreeLevelParams, TimeGrid};

type C64 = Complex64;
type M3 = Matrix3<C64>;
type M9 = SMatrix<C64, 9, 9>;
type V9 = SVector<C64, 9>;

/// Basis indices in the ordered basis (|g⟩, |X⟩, |XX⟩).
pub const GROUND: usize = 0;
pub const EXCITON: usize = 1;
pub const BIEXCITON: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum CascadeError {
    #[error("grid too coarse: dt = {dt} exceeds {max_dt} required by the fastest rate")]
    GridTooCoarse { dt: f64, max_dt: f64 },
    #[error("non-unique steady state (Liouvillian rank {rank} < 8) for {params:?}")]
    NonUniqueSteadyState { rank: usize, params: ThreeLevelParams },
}

/// 3×3 density matrix over (|g⟩, |X⟩, |XX⟩).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix3(pub M3);

impl DensityMatrix3 {
    pub fn pure(level: usize) -> Self {
        let mut m = M3::zeros();
        m[(level, level)] = C64::new(1.0, 0.0);
        Self(m)
    }

    pub fn population(&self, level: usize) -> f64 {
        self.0[(level, level)].re
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.population(GROUND), self.population(EXCITON), self.population(BIEXCITON)]
    }

    /// Probe coherence ⟨σ−⟩ = tr(ρ|g⟩⟨X|) = ⟨X|ρ|g⟩.
    pub fn probe_coherence(&self) -> C64 {
        self.0[(EXCITON, GROUND)]
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self.0 - self.0.adjoint()).norm()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        herm.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Hermitian, unit trace, positive within the stated tolerances.
    pub fn is_physical(&self) -> bool {
        self.hermiticity_defect() <= 1e-12
            && (self.trace().re - 1.0).abs() <= 1e-10
            && self.trace().im.abs() <= 1e-10
            && self.min_eigenvalue() >= -1e-9
    }

    fn to_vector(&self) -> V9 {
        let mut v = V9::zeros();
        for c in 0..3 {
            for r in 0..3 {
                v[c * 3 + r] = self.0[(r, c)];
            }
        }
        v
    }

    fn from_vector(v: &V9) -> Self {
        let mut m = M3::zeros();
        for c in 0..3 {
            for r in 0..3 {
                m[(r, c)] = v[c * 3 + r];
            }
        }
        Self(m)
    }
}

/// Vectorized Lindblad generator.
#[derive(Debug, Clone, PartialEq)]
pub struct LiouvillianMatrix(pub M9);

impl LiouvillianMatrix {
    pub fn apply(&self, rho: &DensityMatrix3) -> DensityMatrix3 {
        DensityMatrix3::from_vector(&(self.0 * rho.to_vector()))
    }

    /// Max |column sum| of the rows corresponding to diagonal entries; zero
    /// for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        (0..9)
            .map(|col| {
                (self.0[(0, col)] + self.0[(4, col)] + self.0[(8, col)]).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Number of singular values above a relative tolerance; a unique steady
    /// state requires rank 8.
    pub fn rank(&self) -> usize {
        let sv = self.0.svd(false, false).singular_values;
        let max = sv.iter().cloned().fold(0.0, f64::max);
        sv.iter().filter(|&&s| s > 1e-10 * max.max(1.0)).count()
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Effective Hamiltonian in the frame rotating at the two-photon drive:
/// the pump couples |g⟩ and |XX⟩ at rate Λ²/Δ, and the probe couples |g⟩
/// and |X⟩ as H_probe = i(Ω/2)(|g⟩⟨X| − |X⟩⟨g|).
pub fn build_hamiltonian(params: &ThreeLevelParams) -> M3 {
    let mut h = M3::zeros();
    h[(BIEXCITON, GROUND)] = c(params.g2);
    h[(GROUND, BIEXCITON)] = c(params.g2);
    h[(BIEXCITON, BIEXCITON)] = c(-params.delta_2ph);
    let half_omega = params.rabi_frequency() / 2.0;
    h[(GROUND, EXCITON)] = C64::new(0.0, half_omega);
    h[(EXCITON, GROUND)] = C64::new(0.0, -half_omega);
    h
}

/// Kronecker product of 3×3 blocks, (a ⊗ b)[(3i+k, 3j+l)] = a[(i,j)]·b[(k,l)].
fn kron(a: &M3, b: &M3) -> M9 {
    let mut out = M9::zeros();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    out[(3 * i + k, 3 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Vectorized dissipator D(C)[ρ] = CρC† − ½{C†C, ρ}.
fn dissipator(collapse: &M3) -> M9 {
    let cdc = collapse.adjoint() * collapse;
    kron(&collapse.conjugate(), collapse)
        - (kron(&M3::identity(), &cdc) + kron(&cdc.transpose(), &M3::identity())) * c(0.5)
}

/// Vectorized generator L[ρ] = −i[H, ρ] + decay and dephasing dissipators.
pub fn build_liouvillian(params: &ThreeLevelParams) -> LiouvillianMatrix {
    let h = build_hamiltonian(params);
    let id = M3::identity();
    let minus_i = C64::new(0.0, -1.0);
    let mut l = (kron(&id, &h) - kron(&h.transpose(), &id)) * minus_i;

    // |XX⟩ → |X⟩ at Γ_XX, |X⟩ → |g⟩ at Γ_X
    let mut decay_xx = M3::zeros();
    decay_xx[(EXCITON, BIEXCITON)] = c(params.gamma_xx.sqrt());
    let mut decay_x = M3::zeros();
    decay_x[(GROUND, EXCITON)] = c(params.gamma_x.sqrt());
    l += dissipator(&decay_xx) + dissipator(&decay_x);

    if params.gamma_star > 0.0 {
        let rate = (params.gamma_star / 2.0).sqrt();
        let mut deph_x = M3::zeros();
        deph_x[(EXCITON, EXCITON)] = c(rate);
        let mut deph_xx = M3::zeros();
        deph_xx[(BIEXCITON, BIEXCITON)] = c(rate);
        l += dissipator(&deph_x) + dissipator(&deph_xx);
    }

    LiouvillianMatrix(l)
}

fn check_grid(params: &ThreeLevelParams, grid: &TimeGrid) -> Result<f64, CascadeError> {
    let fastest = [
        params.gamma_x + params.gamma_xx + params.gamma_star,
        params.rabi_frequency(),
        params.g2,
    ]
    .into_iter()
    .fold(params.gamma_x, f64::max);
    let max_dt = 0.1 / fastest;
    let dt = grid.dt();
    if dt > max_dt {
        return Err(CascadeError::GridTooCoarse { dt, max_dt });
    }
    Ok(dt)
}

/// Propagates vec(ρ) with the 9×9 matrix exponential of the generator,
/// sampled on the grid nodes.
pub fn evolve_three_level(
    params: &ThreeLevelParams,
    rho0: &DensityMatrix3,
    grid: &TimeGrid,
) -> Result<Vec<DensityMatrix3>, CascadeError> {
    let dt = check_grid(params, grid)?;
    let l = build_liouvillian(params);
    let step = (l.0 * c(dt)).exp();
    let mut v = rho0.to_vector();
    let mut out = Vec::with_capacity(grid.n_steps + 1);
    out.push(rho0.clone());
    for _ in 0..grid.n_steps {
        v = step * v;
        out.push(DensityMatrix3::from_vector(&v));
    }
    Ok(out)
}

/// Unique steady state of the generator: solves L·vec(ρ) = 0 with the first
/// row replaced by the trace constraint, falling back to least squares when
/// the replaced system is ill-conditioned.
pub fn steady_state_three_level(
    params: &ThreeLevelParams,
) -> Result<DensityMatrix3, CascadeError> {
    let l = build_liouvillian(params);
    let rank = l.rank();
    if rank < 8 {
        return Err(CascadeError::NonUniqueSteadyState { rank, params: *params });
    }

    let mut m = l.0;
    for col in 0..9 {
        m[(0, col)] = c(0.0);
    }
    m[(0, 0)] = c(1.0);
    m[(0, 4)] = c(1.0);
    m[(0, 8)] = c(1.0);
    let mut rhs = V9::zeros();
    rhs[0] = c(1.0);

    let svd = m.svd(true, true);
    let sv = &svd.singular_values;
    let cond = sv.iter().cloned().fold(0.0, f64::max)
        / sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if cond > 1e12 {
        log::warn!("trace-replaced steady-state system ill-conditioned (cond = {cond:.3e}); using least squares");
    }
    let v = svd.solve(&rhs, 1e-14).expect("svd solve");
    let rho = DensityMatrix3::from_vector(&v);
    // symmetrize away the solver's rounding
    Ok(DensityMatrix3((rho.0 + rho.0.adjoint()) * c(0.5)))
}

/// Steady-state figures of merit of the cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelObservables {
    pub p_g: f64,
    pub p_x: f64,
    pub p_xx: f64,
    /// Photon rate at the biexcitonic frequency, Γ_XX·P_XX.
    pub emission_rate: f64,
    /// Probe absorption on the exciton line, −Ω·Re⟨σ−⟩.
    pub absorption: f64,
    /// Monitor ratio (Γ_X/2·P_X)/(Γ_XX·P_XX); `None` when P_XX = 0.
    pub beta_r_3l: Option<f64>,
}

pub fn observables_three_level(
    rho: &DensityMatrix3,
    params: &ThreeLevelParams,
) -> ThreeLevelObservables {
    let [p_g, p_x, p_xx] = rho.populations();
    let emission_rate = params.gamma_xx * p_xx;
    let absorption = -params.rabi_frequency() * rho.probe_coherence().re;
    let beta_r_3l = if emission_rate > 0.0 {
        Some(params.gamma_x / 2.0 * p_x / emission_rate)
    } else {
        None
    };
    ThreeLevelObservables { p_g, p_x, p_xx, emission_rate, absorption, beta_r_3l }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig4_params(p: f64) -> ThreeLevelParams {
        ThreeLevelParams { g2: 4.0, p, ..Default::default() }
    }

    #[test]
    fn hamiltonian_empty_without_drives() {
        let h = build_hamiltonian(&ThreeLevelParams::default());
        assert_eq!(h, M3::zeros());
    }

    #[test]
    fn hamiltonian_pump_block() {
        let h = build_hamiltonian(&ThreeLevelParams { g2: 4.0, ..Default::default() });
        assert_eq!(h[(BIEXCITON, GROUND)], c(4.0));
        assert_eq!(h[(GROUND, BIEXCITON)], c(4.0));
        assert_eq!(h[(GROUND, EXCITON)], c(0.0));
        assert_eq!(h[(EXCITON, EXCITON)], c(0.0));
    }

    #[test]
    fn hamiltonian_probe_block() {
        // Ω = 2 at p = 2, β = 1
        let h = build_hamiltonian(&ThreeLevelParams { p: 2.0, ..Default::default() });
        assert_eq!(h[(GROUND, EXCITON)], C64::new(0.0, 1.0));
        assert_eq!(h[(EXCITON, GROUND)], C64::new(0.0, -1.0));
        assert_eq!(h[(BIEXCITON, GROUND)], c(0.0));
    }

    #[test]
    fn liouvillian_annihilates_trace() {
        let l = build_liouvillian(&ThreeLevelParams {
            g2: 4.0,
            p: 3.0,
            gamma_star: 0.5,
            delta_2ph: 0.2,
            ..Default::default()
        });
        assert!(l.trace_defect() < 1e-12);
    }

    #[test]
    fn liouvillian_cascade_bookkeeping() {
        let l = build_liouvillian(&ThreeLevelParams::default());
        let d = l.apply(&DensityMatrix3::pure(BIEXCITON));
        assert_relative_eq!(d.population(BIEXCITON), -2.0, max_relative = 1e-14);
        assert_relative_eq!(d.population(EXCITON), 2.0, max_relative = 1e-14);
        assert_relative_eq!(d.population(GROUND), 0.0);
    }

    #[test]
    fn liouvillian_rank_generic() {
        let l = build_liouvillian(&fig4_params(1.0));
        assert_eq!(l.rank(), 8);
    }

    #[test]
    fn evolve_returns_initial_state_at_first_node() {
        let rho0 = DensityMatrix3::pure(EXCITON);
        let grid = TimeGrid::new(1.0, 100);
        let traj = evolve_three_level(&ThreeLevelParams::default(), &rho0, &grid).unwrap();
        assert_eq!(traj[0], rho0);
    }

    #[test]
    fn evolve_cascade_closed_form() {
        // from |XX⟩ with no drives: P_X(t) = Γ_XX/(Γ_X−Γ_XX)(e^{−Γ_XX t} − e^{−Γ_X t})
        let params = ThreeLevelParams::default();
        let grid = TimeGrid::with_step(5.0, params.default_time_step());
        let traj = evolve_three_level(&params, &DensityMatrix3::pure(BIEXCITON), &grid).unwrap();
        for (k, rho) in traj.iter().enumerate() {
            let t = k as f64 * grid.dt();
            let expect = 2.0 / (1.0 - 2.0) * ((-2.0 * t).exp() - (-t).exp());
            assert!((rho.population(EXCITON) - expect).abs() < 1e-10);
            assert!(rho.is_physical());
        }
    }

    #[test]
    fn steady_state_decays_to_ground() {
        let rho = steady_state_three_level(&ThreeLevelParams::default()).unwrap();
        assert!((rho.population(GROUND) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn steady_state_strong_pump_populations() {
        let rho =
            steady_state_three_level(&ThreeLevelParams { g2: 50.0, ..Default::default() })
                .unwrap();
        let [p_g, p_x, p_xx] = rho.populations();
        assert!((p_x - 0.5).abs() < 0.02);
        assert!((p_xx - 0.25).abs() < 0.02);
        assert!((p_g - 0.25).abs() < 0.02);
    }

    #[test]
    fn detailed_balance_without_probe() {
        for g2 in [0.5, 4.0, 20.0] {
            let params = ThreeLevelParams { g2, ..Default::default() };
            let rho = steady_state_three_level(&params).unwrap();
            let flow_in = params.gamma_xx * rho.population(BIEXCITON);
            let flow_out = params.gamma_x * rho.population(EXCITON);
            assert!((flow_in - flow_out).abs() < 1e-10, "g2 = {g2}");
        }
    }

    #[test]
    fn observables_undefined_without_biexciton() {
        let obs = observables_three_level(
            &DensityMatrix3::pure(GROUND),
            &ThreeLevelParams::default(),
        );
        assert_eq!(obs.p_g, 1.0);
        assert_eq!(obs.emission_rate, 0.0);
        assert_eq!(obs.beta_r_3l, None);
    }

    #[test]
    fn monitor_ratio_strong_pump_limit() {
        let params = ThreeLevelParams { g2: 50.0, ..Default::default() };
        let rho = steady_state_three_level(&params).unwrap();
        let obs = observables_three_level(&rho, &params);
        // Γ_X/Γ_XX = 1/2 from detailed balance
        assert!((obs.beta_r_3l.unwrap() - 0.5).abs() < 1e-8);
    }
}
