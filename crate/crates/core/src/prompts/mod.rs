//! Factorial prompt composition and response parsing.

pub mod corpus;
pub mod parse;
pub mod render;
pub mod templates;

pub use parse::{parse_choice, parse_rating, parse_similarity};
pub use render::{
    compose_pair_prompt, compose_practice_prompt, compose_rating_prompt, render_argument, similarity_prompt,
    ChatMessage, LabelOrder, PromptEnv, PromptSpec, RenderedPrompt, ResponseKind, Role,
};
pub use templates::PromptTemplates;
