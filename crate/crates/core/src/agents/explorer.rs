use indexmap::IndexMap;

use super::{Agent, AgentError, AgentTurn, DonePayload, Opening};
use crate::protocol::{
    parse_response, Dialect, DoorEnds, FlatDescription, Observation, ObservationKind, Response,
};
use crate::world::{normalize_room, ObjectId};

#[derive(Debug, Clone, PartialEq, Eq)]
struct DoorRecord {
    /// Room the door was first seen from.
    from: String,
    /// Room on the other side, known once the door has been passed.
    to: Option<String>,
    traversed: bool,
}

/// What the depth-first explorer has learned so far.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExplorerMemory {
    rooms: Vec<String>,
    doors: IndexMap<ObjectId, DoorRecord>,
    current: Option<String>,
    /// Doors passed forward and not yet walked back.
    stack: Vec<ObjectId>,
    /// Door just requested, and whether it was a backtrack step.
    pending: Option<(ObjectId, bool)>,
}

impl ExplorerMemory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Map built from everything observed so far.
    pub fn description(&self) -> FlatDescription {
        FlatDescription {
            rooms: self.rooms.clone(),
            doors: self
                .doors
                .iter()
                .filter_map(|(id, rec)| {
                    let to = rec.to.clone()?;
                    Some((
                        id.to_string(),
                        DoorEnds {
                            from: rec.from.clone(),
                            to,
                        },
                    ))
                })
                .collect(),
        }
    }

    fn note_room(&mut self, room: &str) {
        let norm = normalize_room(room);
        if !self.rooms.iter().any(|r| normalize_room(r) == norm) {
            self.rooms.push(room.to_string());
        }
    }
}

/// Depth-first exploration over doors.
///
/// Passes the lowest-id untraversed door of the current room; when there is
/// none, walks back through the door it arrived by. Stops once every door it
/// has seen has been passed.
pub fn explorer_next(m: &mut ExplorerMemory, obs: &Observation) -> AgentTurn {
    let room = obs.room.clone();

    if let Some((door, backtrack)) = m.pending.take() {
        if let ObservationKind::Blocked(_) = obs.kind {
            return AgentTurn::Fail(format!("could not pass {door}"));
        }
        let departed = m.current.clone().unwrap_or_default();
        if let Some(rec) = m.doors.get_mut(&door) {
            if rec.to.is_none() {
                let far = if normalize_room(&rec.from) == normalize_room(&room) {
                    departed
                } else {
                    room.clone()
                };
                rec.to = Some(far);
            }
            rec.traversed = true;
        }
        if !backtrack {
            m.stack.push(door);
        }
    }

    m.current = Some(room.clone());
    m.note_room(&room);
    for door in &obs.doors {
        m.doors.entry(door.clone()).or_insert_with(|| DoorRecord {
            from: room.clone(),
            to: None,
            traversed: false,
        });
    }

    if m.doors.values().all(|rec| rec.traversed) {
        return AgentTurn::Done(DonePayload::Map(m.description()));
    }

    let fresh = obs
        .doors
        .iter()
        .filter(|d| m.doors.get(*d).is_some_and(|rec| !rec.traversed))
        .min()
        .cloned();
    let (door, backtrack) = match fresh {
        Some(door) => (door, false),
        None => match m.stack.pop() {
            Some(door) => (door, true),
            None => return AgentTurn::Fail("unexplored doors are unreachable".into()),
        },
    };
    m.pending = Some((door.clone(), backtrack));
    AgentTurn::Emit(format!("pass {door}"))
}

/// Builtin exploration agent.
#[derive(Debug, Default)]
pub struct ExplorerAgent {
    memory: ExplorerMemory,
}

impl ExplorerAgent {
    pub fn new() -> Self {
        Self::default()
    }

    fn observe(&mut self, line: &str) -> AgentTurn {
        match parse_response(line, Dialect::Ep) {
            Ok(Response::Observation(obs)) => explorer_next(&mut self.memory, &obs),
            _ => AgentTurn::Fail(format!("unreadable observation {line:?}")),
        }
    }
}

impl Agent for ExplorerAgent {
    fn id(&self) -> String {
        "builtin:explorer".into()
    }

    fn dialect(&self) -> Dialect {
        Dialect::Ep
    }

    fn begin(&mut self, opening: &Opening) -> Result<AgentTurn, AgentError> {
        Ok(match &opening.observation {
            Some(line) => self.observe(line),
            None => AgentTurn::Fail("no initial observation".into()),
        })
    }

    fn respond(&mut self, env_line: &str) -> Result<AgentTurn, AgentError> {
        Ok(self.observe(env_line))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(room: &str, doors: &[&str], kind: ObservationKind) -> Observation {
        Observation {
            room: room.into(),
            doors: doors.iter().map(|d| ObjectId::new(*d).unwrap()).collect(),
            kind,
        }
    }

    #[test]
    fn first_move_is_lowest_door() {
        let mut m = ExplorerMemory::new();
        let turn = explorer_next(&mut m, &obs("dining room", &["door2", "door1"], ObservationKind::Start));
        assert_eq!(turn, AgentTurn::Emit("pass door1".into()));
    }

    #[test]
    fn single_room_without_doors() {
        let mut m = ExplorerMemory::new();
        let turn = explorer_next(&mut m, &obs("hall", &[], ObservationKind::Start));
        let AgentTurn::Done(DonePayload::Map(fd)) = turn else {
            panic!("{turn:?}")
        };
        assert_eq!(fd.rooms, vec!["hall".to_string()]);
        assert!(fd.doors.is_empty());
    }

    #[test]
    fn backtracks_and_records_sighting_orientation() {
        // a --door1-- b, a --door2-- c
        let mut m = ExplorerMemory::new();
        let t = explorer_next(&mut m, &obs("a", &["door1", "door2"], ObservationKind::Start));
        assert_eq!(t, AgentTurn::Emit("pass door1".into()));
        let t = explorer_next(&mut m, &obs("b", &["door1"], ObservationKind::Arrived));
        assert_eq!(t, AgentTurn::Emit("pass door1".into()));
        let t = explorer_next(&mut m, &obs("a", &["door1", "door2"], ObservationKind::Arrived));
        assert_eq!(t, AgentTurn::Emit("pass door2".into()));
        let t = explorer_next(&mut m, &obs("c", &["door2"], ObservationKind::Arrived));
        let AgentTurn::Done(DonePayload::Map(fd)) = t else {
            panic!("{t:?}")
        };
        assert_eq!(fd.rooms, ["a", "b", "c"]);
        assert_eq!(fd.doors["door1"], DoorEnds { from: "a".into(), to: "b".into() });
        assert_eq!(fd.doors["door2"], DoorEnds { from: "a".into(), to: "c".into() });
    }

    #[test]
    fn blocked_door_gives_up() {
        let mut m = ExplorerMemory::new();
        explorer_next(&mut m, &obs("a", &["door1"], ObservationKind::Start));
        let t = explorer_next(
            &mut m,
            &obs("a", &["door1"], ObservationKind::Blocked(ObjectId::new("door1").unwrap())),
        );
        assert!(matches!(t, AgentTurn::Fail(_)));
    }
}
