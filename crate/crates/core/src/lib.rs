//! Molecular unfolding over discretized torsion angles.
//!
//! The pipeline reads a molecule, finds its rotatable bonds, and maximizes the
//! sum of squared cross-fragment atom distances ("molecular volume") over a
//! uniform torsion grid. The objective is compiled into a multilinear
//! polynomial over binary variables (phase or one-hot encoded) and handed to
//! ballistic simulated bifurcation, simulated annealing, exhaustive search, a
//! greedy sweep, or a single-layer QAOA statevector simulation.

pub mod bench;
pub mod encoding;
pub mod geom;
pub mod hubo;
pub mod molgraph;
pub mod qaoa;
pub mod solvers;

pub use encoding::{AngleGrid, Encoding, EncodingKind, OneHotCode, PhaseCode, TrigPolynomial};
pub use geom::{Conformation, RotationSpec, TorsionAssignment, Vec3};
pub use hubo::{Domain, Monomial, Polynomial, VariableRegistry};
pub use molgraph::{Atom, Bond, FragmentDecomposition, Molecule, RotatableBond, TorsionPath};
pub use solvers::SolveResult;
