//! π-boost and time reversal, and the exact ±U correspondence they imply.
//!
//! With B the π-boost c_{n,m} → (−1)^{n+m} c_{n,m}, the pair Hamiltonian
//! obeys B H(U, ε̄+δ) B = −H(−U, ε̄−δ) + 4ε̄. Because H is real, a real
//! initial state with B ψ₀ = ±ψ₀ therefore evolves under (−U, ε̄−δ) into
//! B times the complex conjugate of its (+U, ε̄+δ) evolution, up to a
//! global phase. Every observable built from |c_{n,m}| is then identical
//! for the two sign choices of U, realization by realization.

use serde::{Deserialize, Serialize};

use crate::disorder::{negate_disorder, sample_realization, DisorderSpec, SeedPlan};
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, AmplitudeGrid, LatticeSpec, TwoBosonState};
use crate::observables::{correlation, density, participation_ratio};
use crate::propagator::{SpectralPropagator, TimeGrid};

pub const PARITY_TOL: f64 = 1e-12;
pub const PM_U_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoostParity {
    Even,
    Odd,
    Broken,
}

fn boost_sign(lattice: &LatticeSpec, n: usize, m: usize) -> f64 {
    if (lattice.label_of(n) + lattice.label_of(m)).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// c_{n,m} → (−1)^{n+m} c_{n,m} with centered labels n, m.
pub fn pi_boost(state: &TwoBosonState) -> TwoBosonState {
    let lattice = state.lattice();
    let grid = AmplitudeGrid::from_fn(state.sites(), |n, m| state.amp(n, m) * boost_sign(&lattice, n, m));
    TwoBosonState::from_parts_unchecked(grid, state.statistics())
}

/// Complex conjugation of every amplitude.
pub fn time_reverse(state: &TwoBosonState) -> TwoBosonState {
    let grid = AmplitudeGrid::from_fn(state.sites(), |n, m| state.amp(n, m).conj());
    TwoBosonState::from_parts_unchecked(grid, state.statistics())
}

pub fn classify_boost(state: &TwoBosonState) -> BoostParity {
    let boosted = pi_boost(state);
    let a = state.amplitudes();
    let b = boosted.amplitudes();
    if a.max_abs_diff(b) <= PARITY_TOL {
        return BoostParity::Even;
    }
    let odd_defect = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .fold(0.0f64, |m, (x, y)| m.max((x + y).norm()));
    if odd_defect <= PARITY_TOL {
        BoostParity::Odd
    } else {
        BoostParity::Broken
    }
}

/// Largest imaginary part over all amplitudes.
pub fn max_imaginary(state: &TwoBosonState) -> f64 {
    state.amplitudes().as_slice().iter().fold(0.0f64, |m, z| m.max(z.im.abs()))
}

/// Per-realization deviations between the (+U, ε̄+δ) and (−U, ε̄−δ) runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationDeviation {
    pub realization: usize,
    pub max_pr_deviation: f64,
    pub max_gamma_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmUReport {
    pub interaction: f64,
    pub parity: BoostParity,
    pub tolerance: f64,
    pub realizations: Vec<RealizationDeviation>,
    pub max_pr_deviation: f64,
    pub max_gamma_deviation: f64,
    pub passed: bool,
}

/// Checks the ±U identity on every realization of `seeds`.
///
/// The −U run uses the reflected disorder from [`negate_disorder`]; for pure
/// off-diagonal disorder that is the same realization.
pub fn verify_pm_u(
    spec: &DisorderSpec,
    lattice: &LatticeSpec,
    state0: &TwoBosonState,
    interaction: f64,
    grid: &TimeGrid,
    seeds: &SeedPlan,
) -> Result<PmUReport> {
    let parity = classify_boost(state0);
    let imag = max_imaginary(state0);
    if parity == BoostParity::Broken || imag > PARITY_TOL {
        return Err(Error::Symmetry(format!(
            "initial state must be real and boost-even or boost-odd; got parity {parity:?}, max |Im c| = {imag:e}"
        )));
    }
    let times = grid.times();
    let mut realizations = Vec::with_capacity(seeds.realization_count);
    for (i, substream) in seeds.substreams().enumerate() {
        let plus = sample_realization(spec, lattice, interaction, substream)?;
        let minus = negate_disorder(&plus, spec).with_interaction(-interaction);
        let traj_plus = SpectralPropagator::new(&build_hamiltonian(lattice, &plus)?)?.evolve_many(state0, &times)?;
        let traj_minus = SpectralPropagator::new(&build_hamiltonian(lattice, &minus)?)?.evolve_many(state0, &times)?;
        let mut dev = RealizationDeviation {
            realization: i,
            max_pr_deviation: 0.0,
            max_gamma_deviation: 0.0,
        };
        for (a, b) in traj_plus.iter().zip(&traj_minus) {
            let pr_a = participation_ratio(&density(a))?;
            let pr_b = participation_ratio(&density(b))?;
            dev.max_pr_deviation = dev.max_pr_deviation.max((pr_a - pr_b).abs());
            let ga = correlation(a);
            let gb = correlation(b);
            let g = ga
                .values()
                .iter()
                .zip(gb.values())
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            dev.max_gamma_deviation = dev.max_gamma_deviation.max(g);
        }
        realizations.push(dev);
    }
    let max_pr_deviation = realizations.iter().fold(0.0f64, |m, r| m.max(r.max_pr_deviation));
    let max_gamma_deviation = realizations.iter().fold(0.0f64, |m, r| m.max(r.max_gamma_deviation));
    Ok(PmUReport {
        interaction,
        parity,
        tolerance: PM_U_TOL,
        passed: max_pr_deviation <= PM_U_TOL && max_gamma_deviation <= PM_U_TOL,
        realizations,
        max_pr_deviation,
        max_gamma_deviation,
    })
}
