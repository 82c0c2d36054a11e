//! Two interacting bosons on a disordered Bose-Hubbard chain, together with
//! the equivalent linear propagation of classical light in a square
//! waveguide array.
//!
//! The wavefunction is the symmetric amplitude matrix c_{n,m}
//! ([`model::TwoBosonState`]). It is evolved exactly through a dense
//! eigendecomposition of the pair-basis Hamiltonian ([`propagator`]) or,
//! independently, by integrating the coupled-mode equations on the grid
//! ([`waveguide`]). Disorder ensembles are swept by [`sweep`].

pub mod disorder;
pub mod error;
pub mod initial;
pub mod model;
pub mod observables;
pub mod propagator;
pub mod selftest;
pub mod sweep;
pub mod symmetry;
pub mod waveguide;

pub use error::{Error, Result};
