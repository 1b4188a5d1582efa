//! Sparse Hermitian operators, local projectors and the model Hamiltonians
//! built from them.

pub mod cell;
pub mod chain;
pub mod linear;
pub mod local;
pub mod sparse;

pub use cell::{
    hamiltonian_on_layout, patch_operator, plaquette_hamiltonian, region_hamiltonian, CellTerm, InteractionCell,
};
pub use chain::{
    bond, chain_hamiltonian, q_and_f, ring_terms, ring_window, segment_hamiltonian, subchain_operator, Boundary,
    ChainModel,
};
pub use linear::{Combination, LinearOperator, ProductSum};
pub use local::{embed, embed_ordered, projector_complement_kernel, LocalProjector};
pub use sparse::SparseHermitianOperator;
