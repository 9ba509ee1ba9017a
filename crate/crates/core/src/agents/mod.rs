//! Subject-vehicle agents: perception, directive interpretation and policies.

pub mod interpret;
pub mod perception;
pub mod policy;

pub use interpret::{interpret_directives, meaning, Constraint, Directive, Meaning, Scene, REGISTRY};
pub use perception::{perceive, stop_line_ahead, PerceptionMap};
pub use policy::{predict, ranked_commands, Agent, DecisionRecord, DirectiveFilter, PolicyKind};

use crate::rule_core::Atom;

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("no interpretation registered for action `{0}`")]
    Unregistered(Atom),
    #[error("unknown agent kind `{0}` (expected reactive, morally_bankrupt or proactive)")]
    UnknownPolicy(String),
}
