//! Time evolution of two-boson states.
//!
//! [`SpectralPropagator`] diagonalizes the pair-basis Hamiltonian once and then
//! evolves to any time exactly. [`evolve_stepper`] integrates the grid
//! equations with classical RK4 and exists as an independent cross-check.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Par};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{apply_hamiltonian_grid, AmplitudeGrid, HamiltonianMatrix, ModelParams, PairBasis, ReducedState, TwoBosonState};

/// Uniform sampling of [0, t_final] including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_final: f64,
    pub samples: usize,
}

impl TimeGrid {
    pub const DEFAULT_T_FINAL: f64 = 10.0;
    pub const DEFAULT_SAMPLES: usize = 101;

    pub fn new(t_final: f64, samples: usize) -> Result<Self> {
        let grid = Self { t_final, samples };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::Parameter(format!("t_final must be positive, got {}", self.t_final)));
        }
        if self.samples < 2 {
            return Err(Error::Parameter(format!("need at least 2 time samples, got {}", self.samples)));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let last = self.samples - 1;
        (0..self.samples)
            .map(|k| if k == last { self.t_final } else { self.t_final * k as f64 / last as f64 })
            .collect()
    }

    pub fn spacing(&self) -> f64 {
        self.t_final / (self.samples - 1) as f64
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_final: Self::DEFAULT_T_FINAL,
            samples: Self::DEFAULT_SAMPLES,
        }
    }
}

/// Eigendecomposition H = V Λ Vᵀ of a pair-basis Hamiltonian.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    basis: PairBasis,
    eigenvalues: Vec<f64>,
    vectors: Mat<f64>,
}

impl SpectralPropagator {
    pub const RECONSTRUCTION_TOL: f64 = 1e-10;
    pub const ORTHONORMALITY_TOL: f64 = 1e-10;

    /// Runs a sequential dense symmetric eigensolver (Householder
    /// tridiagonalization followed by a tridiagonal QR-class solve), so the
    /// result does not depend on the surrounding thread pool.
    pub fn new(hamiltonian: &HamiltonianMatrix) -> Result<Self> {
        let d = hamiltonian.dim();
        let mut vectors = Mat::<f64>::zeros(d, d);
        let mut s = faer::diag::Diag::<f64>::zeros(d);
        let par = Par::Seq;
        let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<f64>(
            d,
            ComputeEigenvectors::Yes,
            par,
            Default::default(),
        ));
        evd::self_adjoint_evd(
            hamiltonian.as_mat().as_ref(),
            s.as_mut(),
            Some(vectors.as_mut()),
            par,
            MemStack::new(&mut buf),
            Default::default(),
        )
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let eigenvalues = s.column_vector().iter().copied().collect();
        Ok(Self {
            basis: hamiltonian.basis(),
            eigenvalues,
            vectors,
        })
    }

    pub fn basis(&self) -> PairBasis {
        self.basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vectors(&self) -> &Mat<f64> {
        &self.vectors
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// ‖H − VΛVᵀ‖_max. Costs one dense matrix product.
    pub fn reconstruction_residual(&self, hamiltonian: &HamiltonianMatrix) -> f64 {
        let d = self.eigenvalues.len();
        let scaled = Mat::<f64>::from_fn(d, d, |i, j| self.vectors[(i, j)] * self.eigenvalues[j]);
        let mut rebuilt = Mat::<f64>::zeros(d, d);
        matmul(
            rebuilt.as_mut(),
            Accum::Replace,
            scaled.as_ref(),
            self.vectors.transpose(),
            1.0,
            Par::Seq,
        );
        let h = hamiltonian.as_mat();
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                worst = worst.max((h[(i, j)] - rebuilt[(i, j)]).abs());
            }
        }
        worst
    }

    /// ‖VᵀV − I‖_max.
    pub fn orthonormality_defect(&self) -> f64 {
        let d = self.eigenvalues.len();
        let mut gram = Mat::<f64>::zeros(d, d);
        matmul(
            gram.as_mut(),
            Accum::Replace,
            self.vectors.transpose(),
            self.vectors.as_ref(),
            1.0,
            Par::Seq,
        );
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Relative residual ‖Hx − VΛVᵀx‖_∞ / ‖H‖ for a fixed probe vector.
    ///
    /// O(D²), used as a per-realization sanity check where the full
    /// reconstruction would be too expensive.
    pub fn probe_residual(&self, hamiltonian: &HamiltonianMatrix) -> f64 {
        let d = self.eigenvalues.len();
        let x = Mat::<f64>::from_fn(d, 1, |i, _| ((i as f64 + 1.0) * 0.7548776662466927).sin());
        let mut hx = Mat::<f64>::zeros(d, 1);
        matmul(hx.as_mut(), Accum::Replace, hamiltonian.as_mat().as_ref(), x.as_ref(), 1.0, Par::Seq);
        let mut w = Mat::<f64>::zeros(d, 1);
        matmul(w.as_mut(), Accum::Replace, self.vectors.transpose(), x.as_ref(), 1.0, Par::Seq);
        for i in 0..d {
            w[(i, 0)] *= self.eigenvalues[i];
        }
        let mut vx = Mat::<f64>::zeros(d, 1);
        matmul(vx.as_mut(), Accum::Replace, self.vectors.as_ref(), w.as_ref(), 1.0, Par::Seq);
        let scale = self.spectral_radius().max(1.0);
        (0..d).fold(0.0f64, |m, i| m.max((hx[(i, 0)] - vx[(i, 0)]).abs())) / scale
    }

    fn check_input(&self, state: &TwoBosonState) -> Result<ReducedState> {
        if state.sites() != self.basis.sites() {
            return Err(Error::Shape {
                what: "state sites",
                expected: self.basis.sites(),
                got: state.sites(),
            });
        }
        state.ensure_normalized()?;
        ReducedState::from_state(state)
    }

    pub fn evolve(&self, state: &TwoBosonState, t: f64) -> Result<TwoBosonState> {
        Ok(self.evolve_many(state, &[t])?.pop().expect("one time requested"))
    }

    /// Evolves one initial state to every time in `times`.
    ///
    /// Projects once onto the eigenbasis and then performs a single pair of
    /// real matrix products for all requested times.
    pub fn evolve_many(&self, state: &TwoBosonState, times: &[f64]) -> Result<Vec<TwoBosonState>> {
        let v0 = self.check_input(state)?;
        let d = self.basis.dim();
        let nt = times.len();
        let x = Mat::<f64>::from_fn(d, 2, |i, k| if k == 0 { v0.coeffs()[i].re } else { v0.coeffs()[i].im });
        let mut w = Mat::<f64>::zeros(d, 2);
        matmul(w.as_mut(), Accum::Replace, self.vectors.transpose(), x.as_ref(), 1.0, Par::Seq);

        // columns 0..nt hold real parts, nt..2nt imaginary parts
        let mut phased = Mat::<f64>::zeros(d, 2 * nt);
        for (k, &t) in times.iter().enumerate() {
            for i in 0..d {
                let (sin, cos) = (self.eigenvalues[i] * t).sin_cos();
                let z = Complex64::new(w[(i, 0)], w[(i, 1)]) * Complex64::new(cos, -sin);
                phased[(i, k)] = z.re;
                phased[(i, nt + k)] = z.im;
            }
        }
        let mut out = Mat::<f64>::zeros(d, 2 * nt);
        matmul(out.as_mut(), Accum::Replace, self.vectors.as_ref(), phased.as_ref(), 1.0, Par::Seq);

        let states = times
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                if t == 0.0 {
                    return v0.to_state();
                }
                let coeffs = (0..d).map(|i| Complex64::new(out[(i, k)], out[(i, nt + k)])).collect();
                ReducedState::from_coeffs(self.basis, coeffs)
                    .expect("dimension preserved")
                    .to_state()
            })
            .collect();
        Ok(states)
    }
}

/// Largest step accepted by [`evolve_stepper`]: 0.1 / (max|ε_n+ε_m+Uδ| + 4 max J).
pub fn stepper_bound(params: &ModelParams) -> f64 {
    let scale = params.max_abs_diagonal() + 4.0 * params.max_abs_hopping();
    if scale == 0.0 {
        f64::INFINITY
    } else {
        0.1 / scale
    }
}

/// Integrates i ċ = H c on the full grid with classical fourth-order
/// Runge-Kutta, returning the state at every sample of `grid`.
///
/// Each sampling interval is split into the smallest number of equal steps
/// not exceeding `dt`. Works for both exchange statistics.
pub fn evolve_stepper(params: &ModelParams, state0: &TwoBosonState, grid: &TimeGrid, dt: f64) -> Result<Vec<TwoBosonState>> {
    grid.validate()?;
    if state0.sites() != params.sites() {
        return Err(Error::Shape {
            what: "state sites",
            expected: params.sites(),
            got: state0.sites(),
        });
    }
    state0.ensure_normalized()?;
    let bound = stepper_bound(params);
    if !(dt > 0.0 && dt <= bound) {
        return Err(Error::StepSize { dt, bound });
    }

    let spacing = grid.spacing();
    let substeps = (spacing / dt).ceil().max(1.0) as usize;
    let h = spacing / substeps as f64;
    let stats = state0.statistics();

    let mut current = state0.amplitudes().clone();
    let mut out = Vec::with_capacity(grid.samples);
    out.push(state0.clone());
    for _ in 1..grid.samples {
        for _ in 0..substeps {
            current = rk4_step(params, &current, h)?;
        }
        out.push(TwoBosonState::from_parts_unchecked(current.clone(), stats));
    }
    Ok(out)
}

fn rk4_step(params: &ModelParams, c: &AmplitudeGrid, h: f64) -> Result<AmplitudeGrid> {
    let minus_i = Complex64::new(0.0, -1.0);
    let deriv = |g: &AmplitudeGrid| -> Result<AmplitudeGrid> {
        let mut d = apply_hamiltonian_grid(params, g)?;
        d.scale(minus_i);
        Ok(d)
    };
    let axpy = |base: &AmplitudeGrid, k: &AmplitudeGrid, a: f64| -> AmplitudeGrid {
        let data = base.as_slice().iter().zip(k.as_slice()).map(|(x, y)| x + y * a).collect();
        AmplitudeGrid::from_vec(base.sites(), data).expect("same size")
    };
    let k1 = deriv(c)?;
    let k2 = deriv(&axpy(c, &k1, 0.5 * h))?;
    let k3 = deriv(&axpy(c, &k2, 0.5 * h))?;
    let k4 = deriv(&axpy(c, &k3, h))?;
    let data = c
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, x)| x + (k1.as_slice()[i] + (k2.as_slice()[i] + k3.as_slice()[i]) * 2.0 + k4.as_slice()[i]) * (h / 6.0))
        .collect();
    AmplitudeGrid::from_vec(c.sites(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, LatticeSpec, Statistics};

    #[test]
    fn time_grid_includes_endpoints() {
        let g = TimeGrid::new(10.0, 11).unwrap();
        let t = g.times();
        assert_eq!(t.len(), 11);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[10], 10.0);
        assert!((t[3] - 3.0).abs() < 1e-15);
        assert!(TimeGrid::new(0.0, 5).is_err());
        assert!(TimeGrid::new(1.0, 1).is_err());
    }

    #[test]
    fn rejects_unnormalized_input() {
        let l = LatticeSpec::new(3).unwrap();
        let p = ModelParams::uniform(&l, 2.0, 1.0, 1.0).unwrap();
        let prop = SpectralPropagator::new(&build_hamiltonian(&l, &p).unwrap()).unwrap();
        let mut grid = AmplitudeGrid::zeros(3);
        grid.set(1, 1, Complex64::new(0.5, 0.0));
        let bad = TwoBosonState::from_parts_unchecked(grid, Statistics::Bosonic);
        assert!(matches!(prop.evolve(&bad, 1.0), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn stepper_rejects_large_step() {
        let l = LatticeSpec::new(3).unwrap();
        let p = ModelParams::uniform(&l, 2.0, 1.0, 20.0).unwrap();
        let bound = stepper_bound(&p);
        assert!((bound - 0.1 / 28.0).abs() < 1e-15);
        let mut grid = AmplitudeGrid::zeros(3);
        grid.set(1, 1, Complex64::new(1.0, 0.0));
        let s = TwoBosonState::new(grid, Statistics::Bosonic).unwrap();
        let err = evolve_stepper(&p, &s, &TimeGrid::new(1.0, 2).unwrap(), 2.0 * bound).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }));
    }

    #[test]
    fn zero_hamiltonian_keeps_state_constant() {
        let l = LatticeSpec::new(4).unwrap();
        let p = ModelParams::new(&l, vec![0.0; 4], vec![0.0; 3], 0.0).unwrap();
        let mut grid = AmplitudeGrid::zeros(4);
        grid.set(0, 2, Complex64::new(0.6, 0.0));
        grid.set(2, 0, Complex64::new(0.6, 0.0));
        grid.set(3, 3, Complex64::new(0.0, 0.52915026221291811));
        let s = TwoBosonState::new(grid, Statistics::Bosonic).unwrap();
        let traj = evolve_stepper(&p, &s, &TimeGrid::new(2.0, 5).unwrap(), 0.1).unwrap();
        for st in &traj {
            assert_eq!(st.amplitudes(), s.amplitudes());
        }
    }
}
