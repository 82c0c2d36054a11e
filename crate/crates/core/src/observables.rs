//! Density, participation ratio and the intensity correlation Γ.
//!
//! All quantities follow from the intensities |c_{n,m}|² of the amplitude
//! grid alone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::TwoBosonState;

/// Default number of edge sites watched by the leakage guard.
pub const LEAKAGE_MARGIN: usize = 3;
/// Edge density above which a run warns that the open boundary is felt.
pub const LEAKAGE_THRESHOLD: f64 = 1e-3;

/// Normalized single-particle density P_n = Σ_m |c_{n,m}|².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile(pub Vec<f64>);

impl DensityProfile {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Γ_{j,k} = ⟨a_j† a_k† a_k a_j⟩ on internal indices, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    sites: usize,
    values: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn zeros(sites: usize) -> Self {
        Self {
            sites,
            values: vec![0.0; sites * sites],
        }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.sites + k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.sites).map(|j| self.get(j, j)).sum()
    }

    pub fn row_sum(&self, j: usize) -> f64 {
        self.values[j * self.sites..(j + 1) * self.sites].iter().sum()
    }

    /// Share of Γ on the diagonal, Σ_j Γ_jj / Σ_jk Γ_jk.
    pub fn diagonal_weight(&self) -> f64 {
        self.trace() / self.total()
    }

    pub(crate) fn accumulate(&mut self, other: &CorrelationMatrix, weight: f64) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += weight * b;
        }
    }
}

pub fn density(state: &TwoBosonState) -> DensityProfile {
    let l = state.sites();
    DensityProfile(
        (0..l)
            .map(|n| (0..l).map(|m| state.amp(n, m).norm_sqr()).sum())
            .collect(),
    )
}

/// (Σ P)² / Σ P², between 1 (one site) and L (uniform).
pub fn participation_ratio(profile: &DensityProfile) -> Result<f64> {
    let sum: f64 = profile.0.iter().sum();
    let sum_sq: f64 = profile.0.iter().map(|p| p * p).sum();
    if sum_sq == 0.0 {
        return Err(Error::Parameter("participation ratio of an all-zero profile".into()));
    }
    Ok(sum * sum / sum_sq)
}

/// Γ_{j,k} = 2 |c_{j,k}|².
///
/// Expanding |ψ⟩ = (1/√2) Σ c_nm a_n† a_m† |0⟩ gives a_k a_j |ψ⟩ =
/// √2 c_jk |0⟩ for j ≠ k and 2 c_jj / √2 |0⟩ on the diagonal, so the norm
/// squared is 2|c_jk|² in both cases.
pub fn correlation(state: &TwoBosonState) -> CorrelationMatrix {
    let l = state.sites();
    let values = state
        .amplitudes()
        .as_slice()
        .iter()
        .map(|z| 2.0 * z.norm_sqr())
        .collect();
    CorrelationMatrix { sites: l, values }
}

/// Total density on the `margin` outermost sites at each end of the chain.
pub fn boundary_leakage(profile: &DensityProfile, margin: usize) -> Result<f64> {
    let l = profile.0.len();
    if 2 * margin >= l {
        return Err(Error::Parameter(format!("leakage margin {margin} must be below L/2 for L = {l}")));
    }
    let left: f64 = profile.0[..margin].iter().sum();
    let right: f64 = profile.0[l - margin..].iter().sum();
    Ok(left + right)
}
