pub mod rule_core;
pub mod rulebook;
pub mod simworld;
pub mod agents;
pub mod harness;
