//! Symmetry-reduced ansatz construction and variational quantum imaginary
//! time evolution on small lattice models.
//!
//! The pipeline: build a model's local terms and symmetry generators
//! ([`lattice`]), reduce each term's Pauli pool to the symmetry-allowed
//! generators ([`symmetry`]), assemble a layered ansatz ([`ansatz`]), and
//! evolve its parameters ([`varqite`]) on a dense simulator
//! ([`statevector`]). [`oracle`] provides the exact references.

pub mod ansatz;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod pauli;
pub mod statevector;
pub mod symmetry;
pub mod validation;
pub mod varqite;

pub use ansatz::{Ansatz, CountsReport, Gate, GateList};
pub use error::{Error, Result};
pub use lattice::{
    build_hamiltonian, build_symmetry_generators, relevant_basis, BasisForm, Boundary, Encoding, Lattice,
    LocalTerm, ModelKind, ModelSpec, ReductionMode,
};
pub use oracle::{detqite_run, detqite_step, exact_qite, gibbs_expectation, Spectrum};
pub use pauli::{decompose, Pauli, PauliString, PauliSum, Phase};
pub use statevector::{run_ansatz, StateVector};
pub use symmetry::{c_matrix, solve_constraints, tr_filter, verify_fixed_point, CMatrix, GeneratorBasis, SymmetryGenerator};
pub use varqite::{evolve, EvolutionConfig, EvolutionTrace};
