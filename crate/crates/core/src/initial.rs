//! Initial conditions and their launch plans as classical input beams.
//!
//! Builders take centered site labels; a pair `(n, m)` of labels addresses
//! waveguide row `n`, column `m` of the square array.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AmplitudeGrid, LatticeSpec, Statistics, TwoBosonState};

/// One grid amplitude c_{n,m} before (anti)symmetrization and normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputEntry {
    pub n: i64,
    pub m: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl InputEntry {
    pub fn new(n: i64, m: i64, amplitude: Complex64) -> Self {
        Self {
            n,
            m,
            re: amplitude.re,
            im: amplitude.im,
        }
    }

    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct InputSpec {
    pub entries: Vec<InputEntry>,
    #[serde(default)]
    pub statistics: Statistics,
}

/// Both particles on site `j`: (a_j†)²/√2 |0⟩.
pub fn same_site(lattice: &LatticeSpec, j: i64) -> Result<TwoBosonState> {
    let i = lattice.index_of(j)?;
    let mut g = AmplitudeGrid::zeros(lattice.sites());
    g.set(i, i, Complex64::new(1.0, 0.0));
    TwoBosonState::new(g, Statistics::Bosonic)
}

/// One particle on each of the distinct sites `j` and `k`: a_j† a_k† |0⟩, or
/// its antisymmetric counterpart.
pub fn two_site(lattice: &LatticeSpec, j: i64, k: i64, statistics: Statistics) -> Result<TwoBosonState> {
    if j == k {
        return Err(Error::State(format!(
            "two_site needs distinct sites, got {j} twice (use same_site)"
        )));
    }
    let (a, b) = (lattice.index_of(j)?, lattice.index_of(k)?);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut g = AmplitudeGrid::zeros(lattice.sites());
    g.set(a, b, Complex64::new(h, 0.0));
    g.set(b, a, Complex64::new(statistics.exchange_sign() * h, 0.0));
    TwoBosonState::new(g, statistics)
}

/// Arbitrary superposition: entries are summed onto the grid, projected onto
/// the requested exchange symmetry and normalized.
pub fn superposition(lattice: &LatticeSpec, spec: &InputSpec) -> Result<TwoBosonState> {
    let l = lattice.sites();
    let mut raw = AmplitudeGrid::zeros(l);
    for e in &spec.entries {
        let (n, m) = (lattice.index_of(e.n)?, lattice.index_of(e.m)?);
        if !(e.re.is_finite() && e.im.is_finite()) {
            return Err(Error::State(format!("non-finite amplitude at ({}, {})", e.n, e.m)));
        }
        raw.set(n, m, raw.get(n, m) + e.amplitude());
    }
    let sign = spec.statistics.exchange_sign();
    let mut g = AmplitudeGrid::from_fn(l, |n, m| (raw.get(n, m) + raw.get(m, n) * sign) * 0.5);
    let norm_sq = g.norm_sq();
    if norm_sq == 0.0 {
        return Err(Error::State(format!(
            "input has no {:?} component after symmetrization",
            spec.statistics
        )));
    }
    g.scale(Complex64::new(1.0 / norm_sq.sqrt(), 0.0));
    TwoBosonState::new(g, spec.statistics)
}

/// A classical coherent beam launched into waveguide `(n, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beam {
    pub n: i64,
    pub m: i64,
    /// Field amplitude |c_{n,m}|.
    pub amplitude: f64,
    /// arg c_{n,m} relative to the first beam, in (−π, π].
    pub phase: f64,
}

/// One beam per nonzero grid amplitude, in row-major waveguide order.
pub fn beam_plan(state: &TwoBosonState) -> Vec<Beam> {
    let lattice = state.lattice();
    let l = state.sites();
    let mut reference: Option<Complex64> = None;
    let mut beams = Vec::new();
    for n in 0..l {
        for m in 0..l {
            let c = state.amp(n, m);
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let r = *reference.get_or_insert(c);
            beams.push(Beam {
                n: lattice.label_of(n),
                m: lattice.label_of(m),
                amplitude: c.norm(),
                phase: (c / r).arg(),
            });
        }
    }
    beams
}

/// Inverse of [`beam_plan`], up to the global phase of the first beam.
pub fn reconstruct(lattice: &LatticeSpec, beams: &[Beam], statistics: Statistics) -> Result<TwoBosonState> {
    let mut g = AmplitudeGrid::zeros(lattice.sites());
    for b in beams {
        let (n, m) = (lattice.index_of(b.n)?, lattice.index_of(b.m)?);
        g.set(n, m, Complex64::from_polar(b.amplitude, b.phase));
    }
    TwoBosonState::new(g, statistics)
}
