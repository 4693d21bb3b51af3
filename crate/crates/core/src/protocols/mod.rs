//! Concrete proof systems: the Hamiltonian-cycle and subset-sum
//! sigma-protocols over `F_Q`, and the two- and three-prover graph
//! 3-coloring games with their question distribution.

pub mod hamiltonian;
pub mod subset_sum;
pub mod three_col;

pub use hamiltonian::{
    hc_commit_matrix, hc_respond, hc_verify, FMatrix, HamiltonianWitness, HcProtocol, HcResponse,
};
pub use subset_sum::{
    subset_respond, subset_verify, SubsetCommitment, SubsetResponse, SubsetSumInstance,
    SubsetSumProtocol, SubsetWitness,
};
pub use three_col::{
    dg_eval_evt, dg_eval_wdt, dg_pair_mass, dg_sample, dg_sample_triple, threecol_2p_verify,
    threecol_3p_verify, EdgeAnswer, Labeling, Question, TableStrategy,
};
