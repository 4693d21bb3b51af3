//! Simulation and verification toolkit for relativistic multi-prover
//! zero-knowledge proofs of knowledge.
//!
//! The crate has three layers:
//!
//! * protocol machinery: prime-field arithmetic ([`field`]), the
//!   relativistic bit commitment scheme ([`commitments`]), a two-prover
//!   sigma-protocol engine with simulated timing ([`sigma`]), and the
//!   concrete proof systems for Hamiltonian cycle, subset-sum and graph
//!   3-coloring ([`protocols`]);
//! * knowledge extractors, both classical (snapshot rewinding) and quantum
//!   (unitary rewinding with exact branch bookkeeping) in [`extractors`];
//! * numerical verifiers for the measurement-theoretic inequalities the
//!   soundness analysis rests on ([`quantum`]) together with closed-form
//!   soundness/knowledge-error calculators ([`bounds`]).
//!
//! [`experiments`] packages the above into seeded, reproducible batch
//! drivers used by the `rzk` command-line tool. Hot loops run on rayon
//! when the `parallel` feature (default) is enabled; every driver also has
//! a sequential form for benchmarking and constrained builds.

pub mod bounds;
pub mod commitments;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod extractors;
pub mod field;
pub mod graph;
pub mod numeric;
pub mod protocols;
pub mod quantum;
pub mod sigma;

pub use error::CoreError;
