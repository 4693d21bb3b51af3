//! Knowledge extractors: the canonical rewinding extractor in classical
//! (snapshot) and quantum (adjoint-unitary) form, the special extractors
//! it composes with, and the multi-rewinding extractors for the
//! 3-coloring games.

pub mod classical;
pub mod quantum;
pub mod targets;
pub mod three_col;

pub use classical::{
    canonical_extract_classical, forge_double_opening_pair, hc_double_opening_enumeration,
    k0_hc, k0_subset, ConversationPair, DoubleOpeningReport, ExtractionOutcome, SpecialExtract,
};
pub use quantum::{
    canonical_extract_quantum, BranchRecord, ExtractionTarget, QuantumExtractionReport,
    QuantumProverSpec, UnitaryProver,
};
pub use three_col::{
    exact_acceptance_3p_quantum, expected_extracted_game_value, extract_3col_classical,
    extract_3col_quantum, ColExtraction, ColProver, ThreeColQuantumSpec,
};
