//! Seed-reproducible diagonal and off-diagonal disorder.
//!
//! Realization `i` of a [`SeedPlan`] draws from ChaCha8 stream `i` seeded by
//! the plan's base seed, so each realization is reproducible on its own and
//! the ensemble can be evaluated in any order.

use rand::distr::Open01;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LatticeSpec, ModelParams};

/// Mean and half-width of the uniform laws for ε_j and J_{j,j+1}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub eps_mean: f64,
    pub eps_spread: f64,
    pub hopping_mean: f64,
    pub hopping_spread: f64,
}

impl DisorderSpec {
    pub fn new(eps_mean: f64, eps_spread: f64, hopping_mean: f64, hopping_spread: f64) -> Result<Self> {
        let spec = Self {
            eps_mean,
            eps_spread,
            hopping_mean,
            hopping_spread,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Sampled values live on open intervals, so a spread equal to the mean
    /// still keeps every draw strictly positive.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eps_mean", self.eps_mean),
            ("eps_spread", self.eps_spread),
            ("hopping_mean", self.hopping_mean),
            ("hopping_spread", self.hopping_spread),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Parameter(format!("{name} = {v} must be finite and non-negative")));
            }
        }
        if self.eps_mean <= 0.0 || self.hopping_mean <= 0.0 {
            return Err(Error::Parameter("eps_mean and hopping_mean must be positive".into()));
        }
        if self.eps_spread > self.eps_mean {
            return Err(Error::Parameter(format!(
                "eps_spread {} exceeds eps_mean {}: on-site energies could turn negative",
                self.eps_spread, self.eps_mean
            )));
        }
        if self.hopping_spread > self.hopping_mean {
            return Err(Error::Parameter(format!(
                "hopping_spread {} exceeds hopping_mean {}: couplings could turn negative",
                self.hopping_spread, self.hopping_mean
            )));
        }
        Ok(())
    }

    pub fn is_diagonal(&self) -> bool {
        self.eps_spread > 0.0
    }

    pub fn is_off_diagonal(&self) -> bool {
        self.hopping_spread > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPlan {
    pub base_seed: u64,
    pub realization_count: usize,
}

impl SeedPlan {
    pub fn new(base_seed: u64, realization_count: usize) -> Result<Self> {
        if realization_count == 0 {
            return Err(Error::Parameter("realization_count must be positive".into()));
        }
        Ok(Self {
            base_seed,
            realization_count,
        })
    }

    pub fn substream(&self, realization: usize) -> Substream {
        Substream {
            base_seed: self.base_seed,
            stream: realization as u64,
        }
    }

    pub fn substreams(&self) -> impl Iterator<Item = Substream> + '_ {
        (0..self.realization_count).map(|i| self.substream(i))
    }
}

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Substream {
    pub base_seed: u64,
    pub stream: u64,
}

impl Substream {
    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn uniform_open(rng: &mut ChaCha8Rng, mean: f64, spread: f64) -> f64 {
    if spread == 0.0 {
        return mean;
    }
    let (lo, hi) = (mean - spread, mean + spread);
    let u: f64 = rng.sample(Open01);
    let x = lo + (hi - lo) * u;
    // rounding can land on an endpoint when u is within an ulp of 0 or 1
    x.clamp(lo.next_up(), hi.next_down())
}

/// Draws one realization: ε_j for every site first, then J_{j,j+1}.
///
/// Site `j` always consumes the j-th draw of the stream, so the result depends
/// only on `(spec, lattice, interaction, substream)`.
pub fn sample_realization(
    spec: &DisorderSpec,
    lattice: &LatticeSpec,
    interaction: f64,
    substream: Substream,
) -> Result<ModelParams> {
    spec.validate()?;
    let mut rng = substream.rng();
    let eps = (0..lattice.sites())
        .map(|_| uniform_open(&mut rng, spec.eps_mean, spec.eps_spread))
        .collect();
    let hopping = (0..lattice.sites() - 1)
        .map(|_| uniform_open(&mut rng, spec.hopping_mean, spec.hopping_spread))
        .collect();
    ModelParams::physical(lattice, eps, hopping, interaction)
}

/// Reflects on-site fluctuations about the mean: ε_j → 2ε̄ − ε_j, J untouched.
pub fn negate_disorder(params: &ModelParams, spec: &DisorderSpec) -> ModelParams {
    ModelParams {
        eps: params.eps.iter().map(|e| 2.0 * spec.eps_mean - e).collect(),
        hopping: params.hopping.clone(),
        interaction: params.interaction,
    }
}
