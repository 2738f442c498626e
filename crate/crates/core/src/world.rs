//! Static scenario definitions and mutable episode state.
//!
//! A [`Scenario`] is loaded once from JSON and never mutated. A [`WorldState`]
//! is the per-episode value the step functions fold over.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// The distinguished pseudo-furniture every object tree is rooted at.
pub const FLOOR: &str = "floor";

/// Kinds required per person when a dress-table task does not list them.
pub const DEFAULT_TABLE_KINDS: [&str; 4] = ["fork", "knife", "plate", "glass"];

/// Identifier of a door, a piece of furniture or a movable object.
///
/// Always a run of lowercase ASCII letters followed by an optional decimal
/// index (`cupboard1`, `floor`). Ordering is natural: prefix first, then the
/// numeric value of the index, so `door9 < door10`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ObjectId(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid object id {0:?}: expected lowercase letters followed by optional digits")]
pub struct InvalidId(pub String);

impl ObjectId {
    pub fn new(raw: impl Into<String>) -> Result<Self, InvalidId> {
        let raw = raw.into();
        let letters = raw.bytes().take_while(u8::is_ascii_lowercase).count();
        let valid = letters > 0 && raw.bytes().skip(letters).all(|b| b.is_ascii_digit());
        if valid {
            Ok(ObjectId(raw))
        } else {
            Err(InvalidId(raw))
        }
    }

    pub fn floor() -> Self {
        ObjectId(FLOOR.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The letter part, e.g. `fork` for `fork2`.
    pub fn prefix(&self) -> &str {
        let end = self.0.bytes().take_while(u8::is_ascii_lowercase).count();
        &self.0[..end]
    }

    /// The digit part, possibly empty.
    pub fn index_digits(&self) -> &str {
        &self.0[self.prefix().len()..]
    }

    pub fn is_floor(&self) -> bool {
        self.0 == FLOOR
    }
}

impl Ord for ObjectId {
    fn cmp(&self, other: &Self) -> Ordering {
        fn numeric(digits: &str) -> &str {
            digits.trim_start_matches('0')
        }
        self.prefix()
            .cmp(other.prefix())
            .then_with(|| {
                let (a, b) = (self.index_digits(), other.index_digits());
                match (a.is_empty(), b.is_empty()) {
                    (true, true) => Ordering::Equal,
                    (true, false) => Ordering::Less,
                    (false, true) => Ordering::Greater,
                    (false, false) => {
                        let (na, nb) = (numeric(a), numeric(b));
                        na.len().cmp(&nb.len()).then_with(|| na.cmp(nb))
                    }
                }
            })
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ObjectId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<String> for ObjectId {
    type Error = InvalidId;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        ObjectId::new(value)
    }
}

impl TryFrom<&str> for ObjectId {
    type Error = InvalidId;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        ObjectId::new(value)
    }
}

impl From<ObjectId> for String {
    fn from(id: ObjectId) -> String {
        id.0
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Canonical form used for every room-name comparison: lowercase with
/// internal whitespace collapsed. No spelling correction.
pub fn normalize_room(name: &str) -> String {
    name.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Door {
    pub id: ObjectId,
    pub from: String,
    pub to: String,
}

impl Door {
    /// The room on the other side of this door when standing in `room`.
    pub fn other_side(&self, room: &str) -> Option<&str> {
        let room = normalize_room(room);
        if normalize_room(&self.from) == room {
            Some(&self.to)
        } else if normalize_room(&self.to) == room {
            Some(&self.from)
        } else {
            None
        }
    }

    pub fn touches(&self, room: &str) -> bool {
        self.other_side(room).is_some()
    }
}

/// Rooms joined by doors. Doors are physically two-way; `from`/`to` is only
/// the recorded orientation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlatGraph {
    pub rooms: Vec<String>,
    pub doors: Vec<Door>,
}

impl FlatGraph {
    pub fn contains_room(&self, room: &str) -> bool {
        let room = normalize_room(room);
        self.rooms.iter().any(|r| normalize_room(r) == room)
    }

    /// Declared spelling of a room, looked up by normalized name.
    pub fn canonical_room(&self, room: &str) -> Option<&str> {
        let room = normalize_room(room);
        self.rooms
            .iter()
            .find(|r| normalize_room(r) == room)
            .map(String::as_str)
    }

    pub fn door(&self, id: &ObjectId) -> Option<&Door> {
        self.doors.iter().find(|d| &d.id == id)
    }

    /// Doors touching `room`, in declaration order.
    pub fn incident_doors(&self, room: &str) -> Vec<&Door> {
        self.doors.iter().filter(|d| d.touches(room)).collect()
    }

    pub fn is_connected(&self) -> bool {
        let Some(first) = self.rooms.first() else {
            return true;
        };
        let mut seen: BTreeSet<String> = BTreeSet::new();
        let mut queue = VecDeque::from([normalize_room(first)]);
        seen.insert(normalize_room(first));
        while let Some(room) = queue.pop_front() {
            for door in self.incident_doors(&room) {
                if let Some(next) = door.other_side(&room) {
                    if seen.insert(normalize_room(next)) {
                        queue.push_back(normalize_room(next));
                    }
                }
            }
        }
        self.rooms.iter().all(|r| seen.contains(&normalize_room(r)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Furniture {
    pub openable: bool,
    #[serde(rename = "surface")]
    pub has_surface: bool,
    #[serde(rename = "interior")]
    pub has_interior: bool,
}

impl Furniture {
    pub const FLOOR: Furniture = Furniture {
        openable: false,
        has_surface: true,
        has_interior: false,
    };
}

/// Where an object currently is.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    OnSurface(ObjectId),
    Inside(ObjectId),
    OnRobot,
}

impl Location {
    pub fn parent(&self) -> Option<&ObjectId> {
        match self {
            Location::OnSurface(p) | Location::Inside(p) => Some(p),
            Location::OnRobot => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Exploration,
    Search,
    Manipulation,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Exploration => "exploration",
            ScenarioKind::Search => "search",
            ScenarioKind::Manipulation => "manipulation",
        })
    }
}

fn default_kinds() -> Vec<String> {
    DEFAULT_TABLE_KINDS.iter().map(|k| k.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    #[serde(rename = "explore")]
    ExploreAndMap,
    #[serde(rename = "find")]
    FindObject { target: ObjectId },
    DressTable {
        persons: u32,
        table: ObjectId,
        #[serde(default = "default_kinds")]
        kinds: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub flat: FlatGraph,
    pub start_room: Option<String>,
    /// Declaration order; `floor` is always the first entry for search and
    /// manipulation scenarios.
    pub furniture: IndexMap<ObjectId, Furniture>,
    /// Initial placement of movable objects, in declaration order.
    pub objects: IndexMap<ObjectId, Location>,
    pub task: Task,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("validation error: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("{0} is the root of the containment tree and has no location")]
    Root(ObjectId),
}

// On-disk schema.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    rooms: Vec<String>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    doors: IndexMap<String, RawDoor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start_room: Option<String>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    furniture: IndexMap<String, Furniture>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    objects: IndexMap<String, RawPlacement>,
    task: Task,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoor {
    from: String,
    to: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlacement {
    #[serde(rename = "in", default, skip_serializing_if = "Option::is_none")]
    inside: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    on: Option<String>,
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation(msg.into())
}

fn parse_id(raw: &str) -> Result<ObjectId, ScenarioError> {
    ObjectId::new(raw).map_err(|e| invalid(e.to_string()))
}

/// Parses and validates scenario JSON.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario =
        serde_json::from_str(text).map_err(|e| ScenarioError::Schema(e.to_string()))?;
    Scenario::from_raw(raw)
}

impl Scenario {
    fn from_raw(raw: RawScenario) -> Result<Self, ScenarioError> {
        let mut taken: BTreeSet<ObjectId> = BTreeSet::new();
        let mut claim = |id: &ObjectId| -> Result<(), ScenarioError> {
            if taken.insert(id.clone()) {
                Ok(())
            } else {
                Err(invalid(format!("duplicate id {id}")))
            }
        };

        let mut rooms: Vec<String> = Vec::new();
        for room in &raw.rooms {
            let norm = normalize_room(room);
            if norm.is_empty() {
                return Err(invalid("empty room name"));
            }
            if rooms.iter().any(|r| normalize_room(r) == norm) {
                return Err(invalid(format!("duplicate room {room:?}")));
            }
            rooms.push(room.clone());
        }
        let mut flat = FlatGraph {
            rooms,
            doors: Vec::new(),
        };
        for (id, door) in &raw.doors {
            let id = parse_id(id)?;
            claim(&id)?;
            for end in [&door.from, &door.to] {
                if !flat.contains_room(end) {
                    return Err(invalid(format!("{id} references undeclared room {end:?}")));
                }
            }
            if normalize_room(&door.from) == normalize_room(&door.to) {
                return Err(invalid(format!("{id} joins a room to itself")));
            }
            flat.doors.push(Door {
                id,
                from: door.from.clone(),
                to: door.to.clone(),
            });
        }

        let mut furniture: IndexMap<ObjectId, Furniture> = IndexMap::new();
        let mut objects: IndexMap<ObjectId, Location> = IndexMap::new();

        match raw.kind {
            ScenarioKind::Exploration => {
                if flat.rooms.is_empty() {
                    return Err(invalid("exploration scenario declares no rooms"));
                }
                let start = raw
                    .start_room
                    .as_deref()
                    .ok_or_else(|| invalid("exploration scenario needs start_room"))?;
                if !flat.contains_room(start) {
                    return Err(invalid(format!("start_room {start:?} is not a declared room")));
                }
                if !flat.is_connected() {
                    return Err(invalid("flat is not connected"));
                }
                if !raw.furniture.is_empty() || !raw.objects.is_empty() {
                    return Err(invalid("exploration scenarios carry no furniture or objects"));
                }
            }
            ScenarioKind::Search | ScenarioKind::Manipulation => {
                if !flat.doors.is_empty() {
                    return Err(invalid(format!("{} scenarios have no doors", raw.kind)));
                }
                let floor = ObjectId::floor();
                claim(&floor)?;
                furniture.insert(floor, Furniture::FLOOR);
                for (id, f) in &raw.furniture {
                    let id = parse_id(id)?;
                    if id.is_floor() {
                        if *f != Furniture::FLOOR {
                            return Err(invalid("floor must be surface-only and not openable"));
                        }
                        continue;
                    }
                    claim(&id)?;
                    if f.openable && !f.has_interior {
                        return Err(invalid(format!("{id} is openable but has no interior")));
                    }
                    furniture.insert(id, *f);
                }
                for (id, placement) in &raw.objects {
                    let id = parse_id(id)?;
                    claim(&id)?;
                    let location = match (&placement.inside, &placement.on) {
                        (Some(p), None) => Location::Inside(parse_id(p)?),
                        (None, Some(p)) => Location::OnSurface(parse_id(p)?),
                        _ => {
                            return Err(ScenarioError::Schema(format!(
                                "object {id} needs exactly one of \"in\" or \"on\""
                            )))
                        }
                    };
                    let parent = location.parent().expect("placed objects have a parent");
                    let Some(holder) = furniture.get(parent) else {
                        let reason = if raw.objects.contains_key(parent.as_str()) {
                            "objects can only be placed on or in furniture"
                        } else {
                            "dangling reference"
                        };
                        return Err(invalid(format!("{id} -> {parent}: {reason}")));
                    };
                    match &location {
                        Location::Inside(_) if !holder.has_interior => {
                            return Err(invalid(format!("{parent} has no interior for {id}")))
                        }
                        Location::OnSurface(_) if !holder.has_surface => {
                            return Err(invalid(format!("{parent} has no surface for {id}")))
                        }
                        _ => {}
                    }
                    objects.insert(id, location);
                }
            }
        }

        match (&raw.task, raw.kind) {
            (Task::ExploreAndMap, ScenarioKind::Exploration) => {}
            (Task::FindObject { target }, ScenarioKind::Search) => {
                if !objects.contains_key(target) && !furniture.contains_key(target) {
                    return Err(invalid(format!("find target {target} is not declared")));
                }
            }
            (Task::DressTable { persons, table, kinds }, ScenarioKind::Manipulation) => {
                if *persons < 1 {
                    return Err(invalid("dress_table needs at least one person"));
                }
                match furniture.get(table) {
                    Some(f) if f.has_surface && !table.is_floor() => {}
                    _ => return Err(invalid(format!("{table} is not a furniture surface"))),
                }
                if kinds.is_empty() {
                    return Err(invalid("dress_table needs at least one kind"));
                }
                for kind in kinds {
                    if kind.is_empty() || !kind.bytes().all(|b| b.is_ascii_lowercase()) {
                        return Err(invalid(format!("bad object kind {kind:?}")));
                    }
                }
            }
            (task, kind) => {
                return Err(invalid(format!("task {task:?} does not fit a {kind} scenario")));
            }
        }

        let start_room = match raw.kind {
            ScenarioKind::Exploration => raw.start_room.clone(),
            _ => None,
        };
        let scenario = Scenario {
            kind: raw.kind,
            flat,
            start_room,
            furniture,
            objects,
            task: raw.task,
        };
        check_forest(&scenario, &initial_state(&scenario)).map_err(invalid)?;
        Ok(scenario)
    }

    /// Serializes back into the on-disk schema. `floor` stays implicit.
    pub fn to_json(&self) -> String {
        let raw = RawScenario {
            kind: self.kind,
            rooms: self.flat.rooms.clone(),
            doors: self
                .flat
                .doors
                .iter()
                .map(|d| {
                    (
                        d.id.to_string(),
                        RawDoor {
                            from: d.from.clone(),
                            to: d.to.clone(),
                        },
                    )
                })
                .collect(),
            start_room: self.start_room.clone(),
            furniture: self
                .furniture
                .iter()
                .filter(|(id, _)| !id.is_floor())
                .map(|(id, f)| (id.to_string(), *f))
                .collect(),
            objects: self
                .objects
                .iter()
                .map(|(id, loc)| {
                    let placement = match loc {
                        Location::Inside(p) => RawPlacement {
                            inside: Some(p.to_string()),
                            on: None,
                        },
                        Location::OnSurface(p) => RawPlacement {
                            inside: None,
                            on: Some(p.to_string()),
                        },
                        Location::OnRobot => unreachable!("scenarios never start with carried objects"),
                    };
                    (id.to_string(), placement)
                })
                .collect(),
            task: self.task.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("scenario serializes")
    }

    pub fn furniture(&self, id: &ObjectId) -> Option<&Furniture> {
        self.furniture.get(id)
    }

    pub fn is_furniture(&self, id: &ObjectId) -> bool {
        self.furniture.contains_key(id)
    }

    /// Every id that can carry a location or a door.
    pub fn is_declared(&self, id: &ObjectId) -> bool {
        self.furniture.contains_key(id)
            || self.objects.contains_key(id)
            || self.flat.door(id).is_some()
    }
}

/// Mutable episode state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorldState {
    pub robot_at: Option<ObjectId>,
    pub open: BTreeSet<ObjectId>,
    /// Every furniture (except the floor) and every movable object, in
    /// scenario declaration order. Listing order of observations follows
    /// this order.
    pub placement: IndexMap<ObjectId, Location>,
    pub current_room: Option<String>,
}

impl WorldState {
    /// Objects whose location is exactly `loc`, in declaration order.
    pub fn objects_at(&self, loc: &Location) -> Vec<ObjectId> {
        self.placement
            .iter()
            .filter(|(_, l)| *l == loc)
            .map(|(id, _)| id.clone())
            .collect()
    }

    pub fn is_open(&self, id: &ObjectId) -> bool {
        self.open.contains(id)
    }

    /// Stable fingerprint of the serialized state.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("state serializes");
        let hash = Sha256::digest(&bytes);
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

pub fn initial_state(s: &Scenario) -> WorldState {
    let mut placement = IndexMap::new();
    for id in s.furniture.keys().filter(|id| !id.is_floor()) {
        placement.insert(id.clone(), Location::OnSurface(ObjectId::floor()));
    }
    for (id, loc) in &s.objects {
        placement.insert(id.clone(), loc.clone());
    }
    WorldState {
        robot_at: None,
        open: BTreeSet::new(),
        placement,
        current_room: match s.kind {
            ScenarioKind::Exploration => s
                .start_room
                .as_deref()
                .and_then(|r| s.flat.canonical_room(r))
                .map(str::to_string),
            _ => None,
        },
    }
}

pub fn locate(w: &WorldState, id: &ObjectId) -> Result<Location, WorldError> {
    if id.is_floor() {
        return Err(WorldError::Root(id.clone()));
    }
    w.placement
        .get(id)
        .cloned()
        .ok_or_else(|| WorldError::UnknownObject(id.to_string()))
}

/// Full-traversal check of the containment forest and of the open set.
pub fn check_forest(s: &Scenario, w: &WorldState) -> Result<(), String> {
    for (id, loc) in &w.placement {
        if !s.is_furniture(id) && !s.objects.contains_key(id) {
            return Err(format!("{id} is placed but not declared"));
        }
        if let Some(parent) = loc.parent() {
            let Some(holder) = s.furniture(parent) else {
                return Err(format!("{id} sits on non-furniture {parent}"));
            };
            match loc {
                Location::Inside(_) if !holder.has_interior => {
                    return Err(format!("{id} inside {parent}, which has no interior"))
                }
                Location::OnSurface(_) if !holder.has_surface => {
                    return Err(format!("{id} on {parent}, which has no surface"))
                }
                _ => {}
            }
        }
        // Walk to a root; more steps than objects means a cycle.
        let mut cursor = loc.clone();
        let mut steps = 0;
        while let Some(parent) = cursor.parent() {
            if parent.is_floor() {
                break;
            }
            steps += 1;
            if steps > w.placement.len() {
                return Err(format!("containment cycle through {id}"));
            }
            cursor = match w.placement.get(parent) {
                Some(next) => next.clone(),
                None => return Err(format!("{parent} has no location")),
            };
        }
    }
    let declared = s.furniture.keys().filter(|id| !id.is_floor()).count() + s.objects.len();
    if declared != w.placement.len() {
        return Err("some declared objects have no location".into());
    }
    for id in &w.open {
        if !s.furniture(id).is_some_and(|f| f.openable) {
            return Err(format!("{id} is open but not openable"));
        }
    }
    Ok(())
}
