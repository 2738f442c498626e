use super::sweep::Sweep;
use super::{Agent, AgentError, AgentTurn, DonePayload, Opening};
use crate::protocol::{parse_response, Command, Dialect, Response};
use crate::world::ObjectId;

/// State of the systematic object searcher.
#[derive(Debug, Clone)]
pub struct SearcherMemory {
    target: ObjectId,
    dialect: Dialect,
    sweep: Sweep,
    /// Set while the final CLOSE of the container holding the target is in
    /// flight.
    closing: Option<ObjectId>,
}

impl SearcherMemory {
    pub fn new(target: ObjectId) -> Self {
        SearcherMemory {
            target,
            dialect: Dialect::Sp,
            sweep: Sweep::new(),
            closing: None,
        }
    }

    fn emit(&self, c: &Command) -> AgentTurn {
        AgentTurn::Emit(c.render(self.dialect).expect("sweep commands exist in every robot dialect"))
    }

    /// The opening move.
    pub fn start(&mut self) -> AgentTurn {
        let first = self.sweep.start();
        self.emit(&first)
    }
}

/// Next move of the searcher given the reply to its previous command.
pub fn searcher_next(m: &mut SearcherMemory, r: &Response) -> AgentTurn {
    if let Some(holder) = m.closing.take() {
        return AgentTurn::Done(DonePayload::Found(Some(holder)));
    }
    match r {
        Response::SeenOn(f, objs) if objs.contains(&m.target) => {
            return AgentTurn::Done(DonePayload::Found(Some(f.clone())));
        }
        Response::SeenIn(f, objs) if objs.contains(&m.target) => {
            m.closing = Some(f.clone());
            return m.emit(&Command::Close(f.clone()));
        }
        _ => {}
    }
    match m.sweep.advance(r) {
        Ok(Some(c)) => m.emit(&c),
        Ok(None) => AgentTurn::Done(DonePayload::Found(None)),
        Err(reason) => AgentTurn::Fail(reason),
    }
}

/// Builtin search agent.
#[derive(Debug)]
pub struct SearcherAgent {
    memory: SearcherMemory,
}

impl SearcherAgent {
    pub fn new(target: ObjectId) -> Self {
        SearcherAgent {
            memory: SearcherMemory::new(target),
        }
    }
}

impl Agent for SearcherAgent {
    fn id(&self) -> String {
        "builtin:searcher".into()
    }

    fn dialect(&self) -> Dialect {
        self.memory.dialect
    }

    fn begin(&mut self, _opening: &Opening) -> Result<AgentTurn, AgentError> {
        Ok(self.memory.start())
    }

    fn respond(&mut self, env_line: &str) -> Result<AgentTurn, AgentError> {
        Ok(match parse_response(env_line, self.memory.dialect) {
            Ok(r) => searcher_next(&mut self.memory, &r),
            Err(e) => AgentTurn::Fail(format!("unreadable reply {env_line:?}: {e}")),
        })
    }
}
