//! Baseline agents and the external-agent connector.
//!
//! Every agent talks in wire lines: it receives the environment's rendered
//! reply and emits the next command line, exactly as an external process
//! would.

mod explorer;
mod external;
mod planner;
mod scripted;
mod searcher;
mod sweep;
mod table;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::{Dialect, FlatDescription};
use crate::world::ObjectId;

pub use explorer::{explorer_next, ExplorerAgent, ExplorerMemory};
pub use external::{escape_line, unescape_line, ExternalAgent, LineAgent, DEFAULT_TURN_TIMEOUT};
pub use planner::{bfs_shortest_doors, PlanError};
pub use scripted::ScriptedAgent;
pub use searcher::{searcher_next, SearcherAgent, SearcherMemory};
pub use table::{table_planner_next, TableAgent, TableMemory};

/// Final payload an agent reports when it stops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DonePayload {
    Nothing,
    Map(FlatDescription),
    Found(Option<ObjectId>),
    Complete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgentTurn {
    Emit(String),
    /// Terminal: no further turns follow.
    Done(DonePayload),
    /// The agent gives up, e.g. the required objects do not exist.
    Fail(String),
}

/// What the harness hands an agent before the first turn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Opening {
    /// Full first-prompt text (multi-line).
    pub prompt: String,
    /// Initial observation line, for exploration episodes.
    pub observation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("agent did not answer within {0:?}")]
    Timeout(std::time::Duration),
    #[error("agent closed the connection")]
    AgentClosed,
    #[error("agent handshake failed: {0}")]
    Handshake(String),
    #[error("agent i/o error: {0}")]
    Io(String),
}

pub trait Agent {
    /// Short identifier recorded in transcript headers.
    fn id(&self) -> String;

    fn dialect(&self) -> Dialect;

    fn begin(&mut self, opening: &Opening) -> Result<AgentTurn, AgentError>;

    fn respond(&mut self, env_line: &str) -> Result<AgentTurn, AgentError>;
}
