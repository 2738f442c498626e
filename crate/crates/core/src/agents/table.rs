use std::collections::VecDeque;

use indexmap::IndexMap;

use super::sweep::Sweep;
use super::{Agent, AgentError, AgentTurn, DonePayload, Opening};
use crate::protocol::{parse_response, Command, Dialect, Response};
use crate::world::ObjectId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Sweeping,
    Transport,
}

/// State of the table-setting planner: an inventory sweep, then one
/// fetch-and-place trip per source furniture.
#[derive(Debug, Clone)]
pub struct TableMemory {
    persons: usize,
    table: ObjectId,
    kinds: Vec<String>,
    sweep: Sweep,
    phase: Phase,
    plan: VecDeque<Command>,
}

impl TableMemory {
    pub fn new(persons: u32, table: ObjectId, kinds: Vec<String>) -> Self {
        TableMemory {
            persons: persons as usize,
            table,
            kinds,
            sweep: Sweep::new(),
            phase: Phase::Sweeping,
            plan: VecDeque::new(),
        }
    }

    pub fn start(&mut self) -> AgentTurn {
        emit(&self.sweep.start())
    }

    /// Chooses which objects to move and lays out the trips. Objects already
    /// on the table count towards each kind.
    fn make_plan(&mut self) -> Result<(), String> {
        let on_table = |s: &super::sweep::Sighting| s.holder == self.table && !s.inside;
        let mut trips: IndexMap<ObjectId, (Vec<ObjectId>, bool)> = IndexMap::new();
        for kind in &self.kinds {
            let have = self
                .sweep
                .seen
                .iter()
                .filter(|(o, s)| o.prefix() == kind && on_table(s))
                .count();
            let need = self.persons.saturating_sub(have);
            let candidates: Vec<_> = self
                .sweep
                .seen
                .iter()
                .filter(|(o, s)| o.prefix() == kind && !on_table(s) && !s.holder.is_floor())
                .take(need)
                .collect();
            if candidates.len() < need {
                return Err(format!(
                    "insufficient {kind}: need {need}, found {}",
                    candidates.len()
                ));
            }
            for (o, s) in candidates {
                let trip = trips.entry(s.holder.clone()).or_default();
                trip.0.push(o.clone());
                trip.1 |= s.inside;
            }
        }
        for (source, (objs, needs_open)) in trips {
            self.plan.push_back(Command::Goto(source.clone()));
            if needs_open {
                self.plan.push_back(Command::Open(source.clone()));
            }
            self.plan.push_back(Command::Take(objs.clone()));
            if needs_open {
                self.plan.push_back(Command::Close(source));
            }
            self.plan.push_back(Command::Goto(self.table.clone()));
            self.plan.push_back(Command::PutOn(objs, self.table.clone()));
        }
        Ok(())
    }
}

fn emit(c: &Command) -> AgentTurn {
    AgentTurn::Emit(c.render(Dialect::Mp).expect("planner commands exist in MP"))
}

pub fn table_planner_next(m: &mut TableMemory, r: &Response) -> AgentTurn {
    if m.phase == Phase::Sweeping {
        match m.sweep.advance(r) {
            Ok(Some(c)) => return emit(&c),
            Ok(None) => {
                if let Err(reason) = m.make_plan() {
                    return AgentTurn::Fail(reason);
                }
                m.phase = Phase::Transport;
                return match m.plan.pop_front() {
                    Some(c) => emit(&c),
                    None => AgentTurn::Done(DonePayload::Complete),
                };
            }
            Err(reason) => return AgentTurn::Fail(reason),
        }
    }
    if let Response::Impossible(msg) = r {
        return AgentTurn::Fail(format!(
            "transport step refused: {}",
            msg.as_deref().unwrap_or("no reason given")
        ));
    }
    match m.plan.pop_front() {
        Some(c) => emit(&c),
        None => AgentTurn::Done(DonePayload::Complete),
    }
}

/// Builtin table-setting agent.
#[derive(Debug)]
pub struct TableAgent {
    memory: TableMemory,
}

impl TableAgent {
    pub fn new(persons: u32, table: ObjectId, kinds: Vec<String>) -> Self {
        TableAgent {
            memory: TableMemory::new(persons, table, kinds),
        }
    }
}

impl Agent for TableAgent {
    fn id(&self) -> String {
        "builtin:table".into()
    }

    fn dialect(&self) -> Dialect {
        Dialect::Mp
    }

    fn begin(&mut self, _opening: &Opening) -> Result<AgentTurn, AgentError> {
        Ok(self.memory.start())
    }

    fn respond(&mut self, env_line: &str) -> Result<AgentTurn, AgentError> {
        Ok(match parse_response(env_line, Dialect::Mp) {
            Ok(r) => table_planner_next(&mut self.memory, &r),
            Err(e) => AgentTurn::Fail(format!("unreadable reply {env_line:?}: {e}")),
        })
    }
}
