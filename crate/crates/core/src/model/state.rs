use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LatticeSpec;

/// Exchange statistics of the two-particle amplitude matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    #[default]
    Bosonic,
    Fermionic,
}

impl Statistics {
    pub fn exchange_sign(self) -> f64 {
        match self {
            Statistics::Bosonic => 1.0,
            Statistics::Fermionic => -1.0,
        }
    }
}

/// Dense L×L complex matrix indexed by internal site indices `(n, m)`,
/// stored row-major. Carries no symmetry or normalization invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeGrid {
    sites: usize,
    data: Vec<Complex64>,
}

impl AmplitudeGrid {
    pub fn zeros(sites: usize) -> Self {
        Self {
            sites,
            data: vec![Complex64::new(0.0, 0.0); sites * sites],
        }
    }

    pub fn from_vec(sites: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != sites * sites {
            return Err(Error::Shape {
                what: "grid entries",
                expected: sites * sites,
                got: data.len(),
            });
        }
        Ok(Self { sites, data })
    }

    pub fn from_fn(sites: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(sites * sites);
        for n in 0..sites {
            for m in 0..sites {
                data.push(f(n, m));
            }
        }
        Self { sites, data }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    #[inline]
    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.data[n * self.sites + m]
    }

    #[inline]
    pub fn set(&mut self, n: usize, m: usize, value: Complex64) {
        self.data[n * self.sites + m] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    /// Σ |c_nm|² over the full double sum.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// max |c_nm − s·c_mn| for exchange sign `s`.
    pub fn exchange_defect(&self, sign: f64) -> f64 {
        let mut worst = 0.0f64;
        for n in 0..self.sites {
            for m in n..self.sites {
                worst = worst.max((self.get(n, m) - self.get(m, n) * sign).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &AmplitudeGrid) -> f64 {
        assert_eq!(self.sites, other.sites, "grid size mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn scale(&mut self, factor: Complex64) {
        for z in &mut self.data {
            *z *= factor;
        }
    }
}

/// Two-particle wavefunction as the amplitude matrix c_{n,m} of the Fock
/// expansion |ψ⟩ = (1/√2) Σ_{n,m} c_{n,m} a_n† a_m† |0⟩.
///
/// Normalized so that Σ_{n,m} |c_{n,m}|² = 1, which makes the density
/// P_n = Σ_m |c_{n,m}|² sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBosonState {
    amps: AmplitudeGrid,
    statistics: Statistics,
}

impl TwoBosonState {
    pub const SYMMETRY_TOL: f64 = 1e-10;
    pub const NORM_TOL: f64 = 1e-8;

    /// Validates exchange symmetry and normalization.
    pub fn new(amps: AmplitudeGrid, statistics: Statistics) -> Result<Self> {
        let defect = amps.exchange_defect(statistics.exchange_sign());
        if defect > Self::SYMMETRY_TOL {
            return Err(Error::State(format!(
                "amplitudes violate {statistics:?} exchange symmetry by {defect:e}"
            )));
        }
        let norm_sq = amps.norm_sq();
        if (norm_sq - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amps, statistics })
    }

    pub(crate) fn from_parts_unchecked(amps: AmplitudeGrid, statistics: Statistics) -> Self {
        Self { amps, statistics }
    }

    pub fn sites(&self) -> usize {
        self.amps.sites()
    }

    pub fn lattice(&self) -> LatticeSpec {
        LatticeSpec::new(self.sites()).expect("state built on a valid lattice")
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn amplitudes(&self) -> &AmplitudeGrid {
        &self.amps
    }

    #[inline]
    pub fn amp(&self, n: usize, m: usize) -> Complex64 {
        self.amps.get(n, m)
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.norm_sq()
    }

    pub fn into_amplitudes(self) -> AmplitudeGrid {
        self.amps
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        let norm_sq = self.norm_sq();
        if (norm_sq - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(())
    }

    /// ⟨φ|ψ⟩ in the Fock inner product.
    ///
    /// With the 1/√2 normalization of the expansion the Fock overlap equals the
    /// plain Frobenius overlap Σ conj(φ_nm) ψ_nm for (anti)symmetric matrices.
    pub fn overlap(&self, other: &TwoBosonState) -> Complex64 {
        self.amps
            .as_slice()
            .iter()
            .zip(other.amps.as_slice())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Enumerates the unordered pairs n ≤ m of an L-site chain.
///
/// Flat index of `(n, m)` runs row by row over the upper triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairBasis {
    sites: usize,
}

impl PairBasis {
    pub fn new(sites: usize) -> Self {
        Self { sites }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.sites * (self.sites + 1) / 2
    }

    #[inline]
    pub fn index(&self, n: usize, m: usize) -> usize {
        let (n, m) = if n <= m { (n, m) } else { (m, n) };
        debug_assert!(m < self.sites);
        // rows 0..n hold L, L-1, ..., L-n+1 pairs
        n * self.sites - n * n.saturating_sub(1) / 2 + (m - n)
    }

    /// Iterates `(n, m)` with n ≤ m in flat-index order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.sites).flat_map(move |n| (n..self.sites).map(move |m| (n, m)))
    }
}

/// Coefficients of a symmetric two-boson state in the normalized Fock basis
/// {(a_n†)²/√2 |0⟩, a_n† a_m† |0⟩ (n < m)}.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    basis: PairBasis,
    coeffs: Vec<Complex64>,
}

impl ReducedState {
    pub fn from_state(state: &TwoBosonState) -> Result<Self> {
        if state.statistics() != Statistics::Bosonic {
            return Err(Error::State(
                "the symmetric pair basis only represents bosonic states".into(),
            ));
        }
        Ok(Self::from_symmetric_grid(state.amplitudes()))
    }

    /// Maps a symmetric grid onto pair coefficients: b_nn = c_nn and
    /// b_nm = √2 c_nm for n < m. Antisymmetric parts are discarded.
    pub fn from_symmetric_grid(grid: &AmplitudeGrid) -> Self {
        let basis = PairBasis::new(grid.sites());
        let coeffs = basis
            .pairs()
            .map(|(n, m)| {
                if n == m {
                    grid.get(n, n)
                } else {
                    (grid.get(n, m) + grid.get(m, n)) * (0.5 * SQRT_2)
                }
            })
            .collect();
        Self { basis, coeffs }
    }

    pub fn from_coeffs(basis: PairBasis, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(Error::Shape {
                what: "pair coefficients",
                expected: basis.dim(),
                got: coeffs.len(),
            });
        }
        Ok(Self { basis, coeffs })
    }

    pub fn basis(&self) -> PairBasis {
        self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn to_grid(&self) -> AmplitudeGrid {
        let l = self.basis.sites();
        let mut grid = AmplitudeGrid::zeros(l);
        for ((n, m), &b) in self.basis.pairs().zip(&self.coeffs) {
            if n == m {
                grid.set(n, n, b);
            } else {
                let c = b / SQRT_2;
                grid.set(n, m, c);
                grid.set(m, n, c);
            }
        }
        grid
    }

    pub fn to_state(&self) -> TwoBosonState {
        TwoBosonState::from_parts_unchecked(self.to_grid(), Statistics::Bosonic)
    }
}
