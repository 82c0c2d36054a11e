//! Lattice, two-particle state and the Bose-Hubbard Hamiltonian, in both the
//! full L×L amplitude-grid picture and the reduced pair basis.

mod hamiltonian;
mod lattice;
mod state;

pub use hamiltonian::{apply_hamiltonian_grid, build_hamiltonian, HamiltonianMatrix};
pub use lattice::{LatticeSpec, ModelParams};
pub use state::{AmplitudeGrid, PairBasis, ReducedState, Statistics, TwoBosonState};
