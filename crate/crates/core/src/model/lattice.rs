use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite 1D chain with open boundaries.
///
/// Sites carry centered labels so that the middle site of an odd chain is
/// label 0: index `i` has label `i - (L - 1) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    sites: usize,
}

impl LatticeSpec {
    pub const DEFAULT_SITES: usize = 41;

    pub fn new(sites: usize) -> Result<Self> {
        if sites < 2 {
            return Err(Error::Lattice(format!("need at least 2 sites, got {sites}")));
        }
        Ok(Self { sites })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Dimension of the symmetric two-particle subspace, L(L+1)/2.
    pub fn pair_dim(&self) -> usize {
        self.sites * (self.sites + 1) / 2
    }

    fn offset(&self) -> i64 {
        ((self.sites - 1) / 2) as i64
    }

    pub fn min_label(&self) -> i64 {
        -self.offset()
    }

    pub fn max_label(&self) -> i64 {
        self.sites as i64 - 1 - self.offset()
    }

    pub fn index_of(&self, label: i64) -> Result<usize> {
        if label < self.min_label() || label > self.max_label() {
            return Err(Error::SiteOutOfRange {
                label,
                min: self.min_label(),
                max: self.max_label(),
            });
        }
        Ok((label + self.offset()) as usize)
    }

    pub fn label_of(&self, index: usize) -> i64 {
        debug_assert!(index < self.sites);
        index as i64 - self.offset()
    }
}

impl Default for LatticeSpec {
    fn default() -> Self {
        Self {
            sites: Self::DEFAULT_SITES,
        }
    }
}

/// One realization of the Bose-Hubbard parameters: on-site energies, the
/// nearest-neighbour couplings and the on-site interaction.
///
/// `hopping[j]` couples sites `j` and `j + 1` (internal indices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub eps: Vec<f64>,
    pub hopping: Vec<f64>,
    pub interaction: f64,
}

impl ModelParams {
    /// Checks shapes and finiteness only; use [`ModelParams::physical`] for
    /// values that must also satisfy the positivity constraint.
    pub fn new(lattice: &LatticeSpec, eps: Vec<f64>, hopping: Vec<f64>, interaction: f64) -> Result<Self> {
        let params = Self {
            eps,
            hopping,
            interaction,
        };
        params.check_shape(lattice)?;
        if params.eps.iter().chain(&params.hopping).any(|x| !x.is_finite()) || !interaction.is_finite() {
            return Err(Error::Parameter("non-finite model parameter".into()));
        }
        Ok(params)
    }

    /// Like [`ModelParams::new`] but also requires every ε_j > 0 and J > 0.
    pub fn physical(lattice: &LatticeSpec, eps: Vec<f64>, hopping: Vec<f64>, interaction: f64) -> Result<Self> {
        let params = Self::new(lattice, eps, hopping, interaction)?;
        params.check_positive()?;
        Ok(params)
    }

    /// Uniform lattice with every ε equal to `eps` and every J equal to `hopping`.
    pub fn uniform(lattice: &LatticeSpec, eps: f64, hopping: f64, interaction: f64) -> Result<Self> {
        Self::new(
            lattice,
            vec![eps; lattice.sites()],
            vec![hopping; lattice.sites() - 1],
            interaction,
        )
    }

    pub fn sites(&self) -> usize {
        self.eps.len()
    }

    pub fn lattice(&self) -> LatticeSpec {
        LatticeSpec { sites: self.eps.len() }
    }

    pub fn check_shape(&self, lattice: &LatticeSpec) -> Result<()> {
        if self.eps.len() != lattice.sites() {
            return Err(Error::Shape {
                what: "on-site energies",
                expected: lattice.sites(),
                got: self.eps.len(),
            });
        }
        if self.hopping.len() + 1 != lattice.sites() {
            return Err(Error::Shape {
                what: "couplings",
                expected: lattice.sites() - 1,
                got: self.hopping.len(),
            });
        }
        Ok(())
    }

    pub fn check_positive(&self) -> Result<()> {
        if let Some((j, e)) = self.eps.iter().enumerate().find(|(_, e)| **e <= 0.0) {
            return Err(Error::Parameter(format!("on-site energy eps[{j}] = {e} is not positive")));
        }
        if let Some((j, h)) = self.hopping.iter().enumerate().find(|(_, h)| **h <= 0.0) {
            return Err(Error::Parameter(format!("coupling J[{j}] = {h} is not positive")));
        }
        Ok(())
    }

    pub fn with_interaction(&self, interaction: f64) -> Self {
        Self {
            interaction,
            ..self.clone()
        }
    }

    /// Largest |ε_n + ε_m + U δ_nm| over the grid.
    pub fn max_abs_diagonal(&self) -> f64 {
        let lo = self.eps.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.eps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let pair_extremes = [2.0 * lo, 2.0 * hi, 2.0 * lo + self.interaction, 2.0 * hi + self.interaction];
        let mut m = pair_extremes.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        // an off-diagonal pair never carries U
        if self.sites() > 1 {
            m = m.max((lo + hi).abs());
        }
        m
    }

    pub fn max_abs_hopping(&self) -> f64 {
        self.hopping.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}
