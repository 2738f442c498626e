//! Deterministic text environments for closed-loop agent evaluation:
//! flat exploration, object search and table setting, with their wire
//! dialects, baseline agents and episode scoring.

pub mod agents;
pub mod envs;
pub mod harness;
pub mod prompts;
pub mod protocol;
pub mod world;
