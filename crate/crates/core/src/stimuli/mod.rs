//! Procedural stimulus generation for both experiments.

pub mod exp1;
pub mod exp2;
pub mod manifest;
pub mod templates;

pub use exp1::{apply_constraints, generate_exp1, select_exp1_pairs, Exp1Params, SelectedPair};
pub use exp2::{
    derive_single_premise, generate_exp2, generate_exp2_two_premise, stratify_blocks, BinMode, BlockAssignment,
    Exp2Params, Exp2Split, ScoredArgument,
};
pub use manifest::{sha256_hex, ArgumentStimulus, AttentionCheck, Experiment, PairStimulus, SuiteManifest};
pub use templates::{sample_candidates, validate_pair, ConclusionKind, Constraint, PhenomenonTemplate};
