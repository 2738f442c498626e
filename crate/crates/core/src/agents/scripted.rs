use super::{Agent, AgentError, AgentTurn, DonePayload, Opening};
use crate::protocol::Dialect;

/// Replays a fixed list of agent lines, ignoring the replies, then stops.
#[derive(Debug, Clone)]
pub struct ScriptedAgent {
    id: String,
    dialect: Dialect,
    lines: Vec<String>,
    next: usize,
}

impl ScriptedAgent {
    pub fn new(id: impl Into<String>, dialect: Dialect, lines: Vec<String>) -> Self {
        ScriptedAgent {
            id: id.into(),
            dialect,
            lines,
            next: 0,
        }
    }

    fn advance(&mut self) -> AgentTurn {
        match self.lines.get(self.next) {
            Some(line) => {
                self.next += 1;
                AgentTurn::Emit(line.clone())
            }
            None => AgentTurn::Done(DonePayload::Nothing),
        }
    }
}

impl Agent for ScriptedAgent {
    fn id(&self) -> String {
        self.id.clone()
    }

    fn dialect(&self) -> Dialect {
        self.dialect
    }

    fn begin(&mut self, _opening: &Opening) -> Result<AgentTurn, AgentError> {
        self.next = 0;
        Ok(self.advance())
    }

    fn respond(&mut self, _env_line: &str) -> Result<AgentTurn, AgentError> {
        Ok(self.advance())
    }
}
