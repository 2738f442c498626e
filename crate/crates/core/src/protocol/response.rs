use std::sync::OnceLock;

use regex::Regex;

use super::command::{join_ids, Dialect};
use super::ParseError;
use crate::world::ObjectId;

/// How an exploration observation is phrased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObservationKind {
    /// Very first observation of the episode.
    Start,
    /// After passing a door.
    Arrived,
    /// The requested door does not touch the current room.
    Blocked(ObjectId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub room: String,
    pub doors: Vec<ObjectId>,
    pub kind: ObservationKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Response {
    RobotAt(ObjectId),
    Opened(ObjectId),
    Closed(ObjectId),
    SeenOn(ObjectId, Vec<ObjectId>),
    SeenIn(ObjectId, Vec<ObjectId>),
    OnRobot(Vec<ObjectId>),
    OnDest(Vec<ObjectId>, ObjectId),
    InDest(Vec<ObjectId>, ObjectId),
    Impossible(Option<String>),
    Observation(Observation),
}

impl Response {
    pub fn is_impossible(&self) -> bool {
        match self {
            Response::Impossible(_) => true,
            Response::Observation(o) => matches!(o.kind, ObservationKind::Blocked(_)),
            _ => false,
        }
    }
}

fn list(ids: &[ObjectId]) -> String {
    if ids.is_empty() {
        "nothing".to_string()
    } else {
        join_ids(ids)
    }
}

fn door_phrase(doors: &[ObjectId]) -> String {
    match doors {
        [] => "you see no doors".to_string(),
        [one] => format!("you only see {one}"),
        [init @ .., last] => {
            let head: Vec<&str> = init.iter().map(ObjectId::as_str).collect();
            format!("you see {} and {last}", head.join(", "))
        }
    }
}

/// Renders an environment reply as its exact wire line (no newline).
pub fn render_response(r: &Response, d: Dialect) -> String {
    match r {
        Response::RobotAt(f) => match d {
            Dialect::Mp => format!("robot AT {f}"),
            _ => format!("ROBOT AT {f}"),
        },
        Response::Opened(f) => format!("{f} OPENED"),
        Response::Closed(f) => format!("{f} CLOSED"),
        Response::SeenOn(f, objs) => format!("SEEN ON {f}: {}", list(objs)),
        Response::SeenIn(f, objs) => match d {
            Dialect::Mp => format!("SEEN IN {f}: {}", list(objs)),
            _ => format!("SEEN INSIDE {f}: {}", list(objs)),
        },
        Response::OnRobot(objs) => format!("{} ON robot", list(objs)),
        Response::OnDest(objs, f) => format!("{} ON {f}", list(objs)),
        Response::InDest(objs, f) => format!("{} IN {f}", list(objs)),
        Response::Impossible(msg) => match (d, msg) {
            (Dialect::Mp, Some(msg)) => format!("COMMAND IMPOSSIBLE: {msg}"),
            _ => "COMMAND IMPOSSIBLE".to_string(),
        },
        Response::Observation(obs) => {
            let doors = door_phrase(&obs.doors);
            match &obs.kind {
                ObservationKind::Start => format!("You are in the {} and {doors}.", obs.room),
                ObservationKind::Arrived => {
                    format!("you are now in the {} and {doors}.", obs.room)
                }
                ObservationKind::Blocked(door) => format!(
                    "There is no {door} here. You are in the {} and {doors}.",
                    obs.room
                ),
            }
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<ObjectId>, ParseError> {
    let text = text.trim();
    if text.eq_ignore_ascii_case("nothing") || text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|item| {
            let item = item.trim().to_ascii_lowercase();
            ObjectId::new(item).map_err(|e| ParseError::BadId(e.0))
        })
        .collect()
}

fn parse_id(text: &str) -> Result<ObjectId, ParseError> {
    ObjectId::new(text.trim().to_ascii_lowercase()).map_err(|e| ParseError::BadId(e.0))
}

fn observation_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"(?i)^(?:there is no (\S+) here\.\s*)?you are (now )?in (?:the |a )?(.+?) and you (only )?see (.+?)\.?$",
        )
        .expect("valid regex")
    })
}

fn parse_observation(line: &str) -> Result<Observation, ParseError> {
    let caps = observation_pattern()
        .captures(line)
        .ok_or_else(|| ParseError::Malformed(format!("not an observation: {line:?}")))?;
    let kind = match (caps.get(1), caps.get(2)) {
        (Some(door), _) => ObservationKind::Blocked(parse_id(door.as_str())?),
        (None, Some(_)) => ObservationKind::Arrived,
        (None, None) => ObservationKind::Start,
    };
    let doors_text = caps[5].trim();
    let doors = if doors_text.eq_ignore_ascii_case("no doors") {
        Vec::new()
    } else {
        doors_text
            .split(',')
            .flat_map(|part| part.split(" and "))
            .map(str::trim)
            .filter(|part| !part.is_empty() && !part.eq_ignore_ascii_case("and"))
            .map(|part| {
                let part = part.trim_start_matches("and ").replace(' ', "");
                parse_id(&part)
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(Observation {
        room: caps[3].trim().to_string(),
        doors,
        kind,
    })
}

/// Reads an environment reply back into a [`Response`].
///
/// Lenient where renderings are unambiguous: keywords are case-insensitive,
/// list items may carry spaces, ids are lowercased, and both `SEEN IN` and
/// `SEEN INSIDE` are understood.
pub fn parse_response(line: &str, d: Dialect) -> Result<Response, ParseError> {
    let line = line.trim();
    if line.is_empty() {
        return Err(ParseError::Empty);
    }
    if d == Dialect::Ep {
        return parse_observation(line).map(Response::Observation);
    }
    let upper = line.to_ascii_uppercase();
    if upper.starts_with("COMMAND IMPOSSIBLE") {
        let rest = line["COMMAND IMPOSSIBLE".len()..].trim();
        let msg = rest.strip_prefix(':').map(str::trim).filter(|m| !m.is_empty());
        return Ok(Response::Impossible(msg.map(str::to_string)));
    }
    for (prefix, inside) in [("SEEN INSIDE ", true), ("SEEN IN ", true), ("SEEN ON ", false)] {
        if upper.starts_with(prefix) {
            let rest = &line[prefix.len()..];
            let (target, items) = rest
                .split_once(':')
                .ok_or_else(|| ParseError::Malformed(format!("missing ':' in {line:?}")))?;
            let target = parse_id(target)?;
            let items = parse_list(items)?;
            return Ok(if inside {
                Response::SeenIn(target, items)
            } else {
                Response::SeenOn(target, items)
            });
        }
    }
    if upper.starts_with("ROBOT AT ") {
        return parse_id(&line["ROBOT AT ".len()..]).map(Response::RobotAt);
    }
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if let [subject, state] = tokens.as_slice() {
        if state.eq_ignore_ascii_case("OPENED") {
            return parse_id(subject).map(Response::Opened);
        }
        if state.eq_ignore_ascii_case("CLOSED") {
            return parse_id(subject).map(Response::Closed);
        }
    }
    if tokens.len() >= 3 {
        let dest = tokens[tokens.len() - 1];
        let prep = tokens[tokens.len() - 2];
        let items = tokens[..tokens.len() - 2].join(" ");
        if prep.eq_ignore_ascii_case("ON") {
            let items = parse_list(&items)?;
            return Ok(if dest.eq_ignore_ascii_case("robot") {
                Response::OnRobot(items)
            } else {
                Response::OnDest(items, parse_id(dest)?)
            });
        }
        if prep.eq_ignore_ascii_case("IN") {
            return Ok(Response::InDest(parse_list(&items)?, parse_id(dest)?));
        }
    }
    Err(ParseError::Malformed(format!("unrecognized response {line:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> ObjectId {
        ObjectId::new(s).unwrap()
    }

    fn ids(list: &[&str]) -> Vec<ObjectId> {
        list.iter().map(|s| id(s)).collect()
    }

    #[test]
    fn renders_transcript_lines() {
        let floor = Response::SeenOn(
            id("floor"),
            ids(&["chair1", "chair2", "table1", "closet1", "cupboard1", "cupboard2"]),
        );
        assert_eq!(
            render_response(&floor, Dialect::Sp),
            "SEEN ON floor: chair1,chair2,table1,closet1,cupboard1,cupboard2"
        );
        assert_eq!(
            render_response(&Response::SeenIn(id("cupboard2"), vec![]), Dialect::Mp),
            "SEEN IN cupboard2: nothing"
        );
        assert_eq!(
            render_response(
                &Response::Impossible(Some("cupboard1 is already opened".into())),
                Dialect::Mp
            ),
            "COMMAND IMPOSSIBLE: cupboard1 is already opened"
        );
        assert_eq!(
            render_response(&Response::Impossible(Some("whatever".into())), Dialect::Sp),
            "COMMAND IMPOSSIBLE"
        );
        assert_eq!(render_response(&Response::RobotAt(id("table1")), Dialect::Sp), "ROBOT AT table1");
        assert_eq!(render_response(&Response::RobotAt(id("table1")), Dialect::Mp), "robot AT table1");
        assert_eq!(
            render_response(&Response::SeenIn(id("closet1"), ids(&["napkin1", "napkin2"])), Dialect::Sp),
            "SEEN INSIDE closet1: napkin1,napkin2"
        );
        assert_eq!(
            render_response(&Response::OnRobot(ids(&["fork1", "fork2"])), Dialect::Mp),
            "fork1,fork2 ON robot"
        );
        assert_eq!(
            render_response(&Response::InDest(ids(&["fork1"]), id("closet1")), Dialect::Mp),
            "fork1 IN closet1"
        );
    }

    #[test]
    fn renders_observations() {
        let obs = |room: &str, doors: &[&str], kind| {
            Response::Observation(Observation {
                room: room.into(),
                doors: ids(doors),
                kind,
            })
        };
        assert_eq!(
            render_response(&obs("dining room", &["door1", "door2"], ObservationKind::Start), Dialect::Ep),
            "You are in the dining room and you see door1 and door2."
        );
        assert_eq!(
            render_response(
                &obs("kitchen", &["door1", "door7", "door8"], ObservationKind::Arrived),
                Dialect::Ep
            ),
            "you are now in the kitchen and you see door1, door7 and door8."
        );
        assert_eq!(
            render_response(&obs("bedroom", &["door5"], ObservationKind::Arrived), Dialect::Ep),
            "you are now in the bedroom and you only see door5."
        );
        assert_eq!(
            render_response(
                &obs("bedroom", &["door5"], ObservationKind::Blocked(id("door4"))),
                Dialect::Ep
            ),
            "There is no door4 here. You are in the bedroom and you only see door5."
        );
        assert_eq!(
            render_response(&obs("hall", &[], ObservationKind::Start), Dialect::Ep),
            "You are in the hall and you see no doors."
        );
    }

    #[test]
    fn parses_alternate_spellings() {
        assert_eq!(
            parse_response("SEEN ON table1: lamp1, pencil1", Dialect::Sp),
            Ok(Response::SeenOn(id("table1"), ids(&["lamp1", "pencil1"])))
        );
        assert_eq!(
            parse_response("SEEN ON Floor: chair1,chair2", Dialect::Mp),
            Ok(Response::SeenOn(id("floor"), ids(&["chair1", "chair2"])))
        );
        assert_eq!(parse_response("COMMAND IMPOSSIBLE", Dialect::Sp), Ok(Response::Impossible(None)));
        assert_eq!(
            parse_response("COMMAND IMPOSSIBLE.", Dialect::Sp),
            Ok(Response::Impossible(None))
        );
        let obs = parse_response(
            "you are now in the kitchen and you see door1, door 7 and door8.",
            Dialect::Ep,
        )
        .unwrap();
        assert_eq!(
            obs,
            Response::Observation(Observation {
                room: "kitchen".into(),
                doors: ids(&["door1", "door7", "door8"]),
                kind: ObservationKind::Arrived
            })
        );
        let Response::Observation(obs) = parse_response(
            "you are now in a corridor and you see door6, door8, door5, door4 and door3.",
            Dialect::Ep,
        )
        .unwrap() else {
            panic!()
        };
        assert_eq!(obs.room, "corridor");
        assert_eq!(obs.doors.len(), 5);
        let Response::Observation(obs) =
            parse_response("you are now in the living room and you see door3, and door2.", Dialect::Ep)
                .unwrap()
        else {
            panic!()
        };
        assert_eq!(obs.doors, ids(&["door3", "door2"]));
        let Response::Observation(obs) =
            parse_response("You are in the bed and breakfast and you see door1.", Dialect::Ep).unwrap()
        else {
            panic!()
        };
        assert_eq!(obs.room, "bed and breakfast");
    }

    #[test]
    fn render_parse_agree() {
        let samples = vec![
            Response::RobotAt(id("chair1")),
            Response::Opened(id("closet1")),
            Response::Closed(id("closet1")),
            Response::SeenOn(id("chair1"), vec![]),
            Response::SeenIn(id("cupboard1"), ids(&["fork1", "ball1"])),
            Response::OnRobot(ids(&["fork1"])),
            Response::OnDest(ids(&["fork1", "knife1"]), id("table1")),
            Response::InDest(ids(&["fork1"]), id("closet1")),
            Response::Impossible(Some("robot is at table1, robot must be at cupboard1 to open the cupboard1".into())),
        ];
        for r in samples {
            let line = render_response(&r, Dialect::Mp);
            assert_eq!(parse_response(&line, Dialect::Mp), Ok(r.clone()), "{line}");
        }
    }
}
