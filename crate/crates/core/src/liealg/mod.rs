//! Generators with differential-form slots and the algebras they span.

pub mod algebra;
pub mod automorphism;
pub mod generator;
pub mod lrt;
pub mod span;

pub use algebra::{check_table, express, same_span, structure_constants, BasisElement, Combination, LieAlgebra, Term};
pub use automorphism::{automorphism_constraints, verify_automorphism_solution, AutomorphismMatrix, AutomorphismReport};
pub use generator::{commutator, EquivalenceGenerator, FormMatrix, Generator, GeneratorFile};
