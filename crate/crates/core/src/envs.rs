//! Step functions for the exploration, search and manipulation
//! environments, plus task-status evaluation.
//!
//! All steps are pure: they take a state by reference and return a new one.
//! A refused command returns the pre-state unchanged.

use serde::{Deserialize, Serialize};

use crate::protocol::{Command, Dialect, Observation, ObservationKind, Response};
use crate::world::{normalize_room, Location, ObjectId, Scenario, ScenarioKind, Task, WorldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Violation {
    ImpossibleCommand,
    UnparseableTurn,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepResult {
    pub state: WorldState,
    pub response: Response,
    pub violation: Option<Violation>,
}

impl StepResult {
    fn ok(state: WorldState, response: Response) -> Self {
        StepResult {
            state,
            response,
            violation: None,
        }
    }

    fn refused(pre: &WorldState, response: Response) -> Self {
        StepResult {
            state: pre.clone(),
            response,
            violation: Some(Violation::ImpossibleCommand),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", content = "at", rename_all = "snake_case")]
pub enum TaskStatus {
    Incomplete,
    FoundAt(ObjectId),
    Complete,
}

impl TaskStatus {
    pub fn is_achieved(&self) -> bool {
        !matches!(self, TaskStatus::Incomplete)
    }
}

pub fn dialect_for(kind: ScenarioKind) -> Dialect {
    match kind {
        ScenarioKind::Exploration => Dialect::Ep,
        ScenarioKind::Search => Dialect::Sp,
        ScenarioKind::Manipulation => Dialect::Mp,
    }
}

/// What the agent sees in `room`: every incident door, in declaration order.
pub fn observe_room(s: &Scenario, room: &str, kind: ObservationKind) -> Observation {
    Observation {
        room: s.flat.canonical_room(room).unwrap_or(room).to_string(),
        doors: s
            .flat
            .incident_doors(room)
            .into_iter()
            .map(|d| d.id.clone())
            .collect(),
        kind,
    }
}

/// The opening observation of an exploration episode.
pub fn initial_observation(s: &Scenario, w: &WorldState) -> Option<Observation> {
    let room = w.current_room.as_deref()?;
    Some(observe_room(s, room, ObservationKind::Start))
}

pub fn exploration_step(s: &Scenario, w: &WorldState, door: &ObjectId) -> StepResult {
    let Some(here) = w.current_room.as_deref() else {
        return StepResult::refused(w, Response::Impossible(None));
    };
    let target = s.flat.door(door).and_then(|d| d.other_side(here));
    match target {
        Some(next) => {
            let next = s.flat.canonical_room(next).unwrap_or(next).to_string();
            let obs = observe_room(s, &next, ObservationKind::Arrived);
            let mut post = w.clone();
            post.current_room = Some(next);
            StepResult::ok(post, Response::Observation(obs))
        }
        None => {
            let obs = observe_room(s, here, ObservationKind::Blocked(door.clone()));
            StepResult::refused(w, Response::Observation(obs))
        }
    }
}

/// Search environment: SP semantics, bare refusals.
pub fn search_step(s: &Scenario, w: &WorldState, c: &Command) -> StepResult {
    robot_step(s, w, c, Dialect::Sp)
}

/// Manipulation environment: MP semantics with take/put and error messages.
pub fn manipulation_step(s: &Scenario, w: &WorldState, c: &Command) -> StepResult {
    robot_step(s, w, c, Dialect::Mp)
}

/// Dispatches on the scenario kind.
pub fn step(s: &Scenario, w: &WorldState, c: &Command) -> StepResult {
    match (s.kind, c) {
        (ScenarioKind::Exploration, Command::PassDoor(door)) => exploration_step(s, w, door),
        (ScenarioKind::Exploration, _) => {
            let obs = w
                .current_room
                .as_deref()
                .map(|room| observe_room(s, room, ObservationKind::Start));
            StepResult::refused(w, obs.map_or(Response::Impossible(None), Response::Observation))
        }
        (ScenarioKind::Search, _) => search_step(s, w, c),
        (ScenarioKind::Manipulation, _) => manipulation_step(s, w, c),
    }
}

fn here(w: &WorldState) -> String {
    w.robot_at
        .as_ref()
        .map_or_else(|| "nothing".to_string(), ObjectId::to_string)
}

fn names(ids: &[ObjectId]) -> String {
    ids.iter().map(ObjectId::as_str).collect::<Vec<_>>().join(",")
}

fn robot_step(s: &Scenario, w: &WorldState, c: &Command, d: Dialect) -> StepResult {
    match apply(s, w, c, d) {
        Ok((state, response)) => StepResult::ok(state, response),
        Err(msg) => {
            let msg = match d {
                Dialect::Mp => Some(msg),
                _ => None,
            };
            StepResult::refused(w, Response::Impossible(msg))
        }
    }
}

fn furniture_at<'a>(
    s: &'a Scenario,
    id: &ObjectId,
) -> Result<&'a crate::world::Furniture, String> {
    s.furniture(id)
        .ok_or_else(|| format!("{id} is not a furniture object"))
}

fn require_at(w: &WorldState, f: &ObjectId, verb: &str) -> Result<(), String> {
    if w.robot_at.as_ref() == Some(f) {
        Ok(())
    } else {
        Err(format!(
            "robot is at {}, robot must be at {f} to {verb} the {f}",
            here(w)
        ))
    }
}

fn apply(s: &Scenario, w: &WorldState, c: &Command, d: Dialect) -> Result<(WorldState, Response), String> {
    let mut post = w.clone();
    let response = match c {
        Command::PassDoor(door) => return Err(format!("there is no {door} here")),
        Command::Goto(f) => {
            furniture_at(s, f)?;
            if f.is_floor() {
                return Err(format!("{f} is not a furniture object"));
            }
            post.robot_at = Some(f.clone());
            Response::RobotAt(f.clone())
        }
        Command::Open(f) => {
            let furniture = furniture_at(s, f)?;
            require_at(w, f, "open")?;
            if !furniture.openable {
                return Err(format!("{f} cannot be opened"));
            }
            if w.is_open(f) {
                return Err(format!("{f} is already opened"));
            }
            post.open.insert(f.clone());
            Response::Opened(f.clone())
        }
        Command::Close(f) => {
            let furniture = furniture_at(s, f)?;
            require_at(w, f, "close")?;
            if !furniture.openable {
                return Err(format!("{f} cannot be closed"));
            }
            if !w.is_open(f) {
                return Err(format!("{f} is already closed"));
            }
            post.open.remove(f);
            Response::Closed(f.clone())
        }
        Command::LookOn(f) => {
            let furniture = furniture_at(s, f)?;
            if !f.is_floor() {
                require_at(w, f, "look on")?;
            }
            if !furniture.has_surface {
                return Err(format!("{f} has no surface"));
            }
            Response::SeenOn(f.clone(), w.objects_at(&Location::OnSurface(f.clone())))
        }
        Command::LookIn(f) => {
            let furniture = furniture_at(s, f)?;
            require_at(w, f, "look in")?;
            if !furniture.has_interior {
                return Err(format!("{f} has no interior"));
            }
            if !w.is_open(f) {
                return Err(format!("{f} is closed"));
            }
            Response::SeenIn(f.clone(), w.objects_at(&Location::Inside(f.clone())))
        }
        Command::Take(objs) if d == Dialect::Mp => {
            let Some(at) = w.robot_at.clone() else {
                return Err("robot is not at any furniture object".to_string());
            };
            let visible = |o: &ObjectId| {
                !s.is_furniture(o)
                    && match w.placement.get(o) {
                        Some(Location::OnSurface(p)) => *p == at,
                        Some(Location::Inside(p)) => *p == at && w.is_open(&at),
                        _ => false,
                    }
            };
            let missing: Vec<ObjectId> = objs.iter().filter(|o| !visible(o)).cloned().collect();
            if !missing.is_empty() {
                return Err(format!(
                    "{} are not visible object on or in {at}",
                    names(&missing)
                ));
            }
            for o in objs {
                post.placement.insert(o.clone(), Location::OnRobot);
            }
            Response::OnRobot(objs.clone())
        }
        Command::PutOn(objs, f) | Command::PutIn(objs, f) if d == Dialect::Mp => {
            let inside = matches!(c, Command::PutIn(..));
            let furniture = furniture_at(s, f)?;
            if w.robot_at.as_ref() != Some(f) {
                let prep = if inside { "in" } else { "on" };
                return Err(format!(
                    "robot is at {}, robot must be at {f} to put objects {prep} {f}",
                    here(w)
                ));
            }
            if inside {
                if !furniture.has_interior {
                    return Err(format!("{f} has no interior"));
                }
                if !w.is_open(f) {
                    return Err(format!("{f} is closed"));
                }
            } else if !furniture.has_surface {
                return Err(format!("{f} has no surface"));
            }
            let missing: Vec<ObjectId> = objs
                .iter()
                .filter(|o| w.placement.get(*o) != Some(&Location::OnRobot))
                .cloned()
                .collect();
            if !missing.is_empty() {
                return Err(format!("{} are not on robot", names(&missing)));
            }
            let dest = if inside {
                Location::Inside(f.clone())
            } else {
                Location::OnSurface(f.clone())
            };
            for o in objs {
                post.placement.insert(o.clone(), dest.clone());
            }
            if inside {
                Response::InDest(objs.clone(), f.clone())
            } else {
                Response::OnDest(objs.clone(), f.clone())
            }
        }
        Command::Take(_) | Command::PutOn(..) | Command::PutIn(..) => {
            return Err("unknown command".to_string())
        }
    };
    Ok((post, response))
}

/// Task status implied by the current state and the latest reply.
///
/// `FindObject` only looks at `last`; keeping it monotone across an episode
/// is the caller's job (see [`StatusTracker`]).
pub fn task_status(_scenario: &Scenario, w: &WorldState, t: &Task, last: &Response) -> TaskStatus {
    match t {
        Task::ExploreAndMap => TaskStatus::Incomplete,
        Task::FindObject { target } => match last {
            Response::SeenOn(f, objs) | Response::SeenIn(f, objs) if objs.contains(target) => {
                TaskStatus::FoundAt(f.clone())
            }
            _ => TaskStatus::Incomplete,
        },
        Task::DressTable {
            persons,
            table,
            kinds,
        } => {
            let on_table = w.objects_at(&Location::OnSurface(table.clone()));
            let complete = kinds.iter().all(|kind| {
                on_table.iter().filter(|o| o.prefix() == kind).count() >= *persons as usize
            });
            if complete {
                TaskStatus::Complete
            } else {
                TaskStatus::Incomplete
            }
        }
    }
}

/// Folds per-step statuses into the episode status: a found object stays
/// found, table completeness is re-evaluated each step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatusTracker {
    pub status: TaskStatus,
    pub first_achieved: Option<usize>,
}

impl Default for StatusTracker {
    fn default() -> Self {
        StatusTracker {
            status: TaskStatus::Incomplete,
            first_achieved: None,
        }
    }
}

impl StatusTracker {
    pub fn update(&mut self, s: &Scenario, w: &WorldState, last: &Response, turn: usize) {
        let now = task_status(s, w, &s.task, last);
        let next = match (&s.task, &self.status) {
            (Task::FindObject { .. }, TaskStatus::FoundAt(_)) => self.status.clone(),
            _ => now,
        };
        if next.is_achieved() && self.first_achieved.is_none() {
            self.first_achieved = Some(turn);
        }
        self.status = next;
    }
}

/// Room equality under the scenario's normalization.
pub fn same_room(a: &str, b: &str) -> bool {
    normalize_room(a) == normalize_room(b)
}
