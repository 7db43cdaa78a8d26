//! Computational machinery for property-induction studies: similarity norms,
//! the similarity-coverage model, procedural stimulus generation, factorial
//! prompt composition, agent adapters and the statistics used to compare
//! agents with people.

pub mod agents;
pub mod argument;
pub mod domain;
pub mod error;
pub mod rng;
pub mod scm;
pub mod prompts;
pub mod similarity;
pub mod stats;
pub mod stimuli;
pub mod store;

pub use argument::{Argument, ArgumentPair, Conclusion, Phenomenon};
pub use domain::{Domain, DomainSet, Lexicon};
pub use error::{Error, Result};
pub use scm::{ScmModel, ScmParams};
pub use similarity::{Scale, SimilarityMatrix, TypicalityVector};
pub use store::NormStore;
