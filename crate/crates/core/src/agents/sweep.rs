use std::collections::VecDeque;

use indexmap::IndexMap;

use crate::protocol::{Command, Response};
use crate::world::ObjectId;

/// Where the sweep last saw an object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Sighting {
    pub holder: ObjectId,
    pub inside: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Floor,
    Goto,
    LookOn,
    Open,
    LookIn,
    Close,
    Finished,
}

/// Room inventory shared by the searcher and the table planner:
/// `LOOK ON floor`, then per furniture GOTO, LOOK ON, OPEN, and if that
/// worked LOOK IN and CLOSE. Capabilities are discovered by trying.
#[derive(Debug, Clone)]
pub(crate) struct Sweep {
    stage: Stage,
    queue: VecDeque<ObjectId>,
    current: Option<ObjectId>,
    pub furniture: Vec<ObjectId>,
    pub seen: IndexMap<ObjectId, Sighting>,
    pub openable: IndexMap<ObjectId, bool>,
}

impl Sweep {
    pub fn new() -> Self {
        Sweep {
            stage: Stage::Floor,
            queue: VecDeque::new(),
            current: None,
            furniture: Vec::new(),
            seen: IndexMap::new(),
            openable: IndexMap::new(),
        }
    }

    pub fn start(&mut self) -> Command {
        self.stage = Stage::Floor;
        Command::LookOn(ObjectId::floor())
    }

    fn record(&mut self, holder: &ObjectId, objs: &[ObjectId], inside: bool) {
        self.seen.retain(|_, s| !(s.holder == *holder && s.inside == inside));
        for o in objs {
            self.seen.insert(
                o.clone(),
                Sighting {
                    holder: holder.clone(),
                    inside,
                },
            );
        }
    }

    fn next_furniture(&mut self) -> Option<Command> {
        match self.queue.pop_front() {
            Some(f) => {
                self.current = Some(f.clone());
                self.stage = Stage::Goto;
                Some(Command::Goto(f))
            }
            None => {
                self.current = None;
                self.stage = Stage::Finished;
                None
            }
        }
    }

    /// Absorbs the reply to the last command and yields the next one, or
    /// `None` once every furniture has been visited. `Err` means the reply
    /// made no sense for the command that was sent.
    pub fn advance(&mut self, r: &Response) -> Result<Option<Command>, String> {
        match r {
            Response::SeenOn(f, objs) => self.record(f, objs, false),
            Response::SeenIn(f, objs) => self.record(f, objs, true),
            _ => {}
        }
        let stage = self.stage;
        if stage == Stage::Floor {
            let Response::SeenOn(f, objs) = r else {
                return Err(format!("expected the floor listing, got {r:?}"));
            };
            if !f.is_floor() {
                return Err(format!("expected the floor listing, got {f}"));
            }
            self.furniture = objs.clone();
            self.queue = objs.iter().cloned().collect();
            return Ok(self.next_furniture());
        }
        let Some(f) = self.current.clone() else {
            return Ok(None);
        };
        match stage {
            Stage::Goto => match r {
                Response::RobotAt(at) if *at == f => {
                    self.stage = Stage::LookOn;
                    Ok(Some(Command::LookOn(f)))
                }
                // could not get there; skip it
                _ => Ok(self.next_furniture()),
            },
            Stage::LookOn => {
                self.stage = Stage::Open;
                Ok(Some(Command::Open(f)))
            }
            Stage::Open => match r {
                Response::Opened(_) => {
                    self.openable.insert(f.clone(), true);
                    self.stage = Stage::LookIn;
                    Ok(Some(Command::LookIn(f)))
                }
                Response::Impossible(msg) => {
                    if msg.as_deref().is_none_or(|m| m.contains("cannot be opened")) {
                        self.openable.insert(f, false);
                    }
                    Ok(self.next_furniture())
                }
                other => Err(format!("unexpected reply to OPEN: {other:?}")),
            },
            Stage::LookIn => {
                self.stage = Stage::Close;
                Ok(Some(Command::Close(f)))
            }
            Stage::Close => Ok(self.next_furniture()),
            Stage::Floor | Stage::Finished => Ok(None),
        }
    }
}
