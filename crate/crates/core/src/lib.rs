//! Symmetry-filtered UCCSD excitation pools, their dynamical Lie algebras, and a
//! Jordan–Wigner statevector VQE for diagnosing Abelian-subgroup filtering.
//!
//! The crate is organised bottom-up:
//!
//! - [`fermion`]: canonical second-quantized operator algebra and dense realizations.
//! - [`group`]: finite point groups, irreps, Abelian subgroups and the adjoint action.
//! - [`orbitals`]: symmetry-labelled orbital shells and the occupied/virtual partition.
//! - [`pool`]: UCCSD pool generation, the three filters and deficit accounting.
//! - [`dla`]: Lie closure of generator sets and torus reachability checks.
//! - [`hamiltonian`]: FCIDUMP ingestion, Hamiltonian assembly, the prism testbed and
//!   degenerate-shell rotations.
//! - [`fock`] and [`simulator`]: Fock-space bases, sparse operators and statevectors.
//! - [`vqe`]: FCI references, BFGS optimisation and the initialization-gradient diagnostic.
//! - [`report`]: run manifests and report serialisation used by the CLI.

pub mod dla;
pub mod error;
pub mod fermion;
pub mod fock;
pub mod group;
pub mod hamiltonian;
pub mod orbitals;
pub mod pool;
pub mod report;
pub mod simulator;
pub mod vqe;

pub use error::{Error, Result};
pub use num_complex::Complex64;
