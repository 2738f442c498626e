//! The agent-produced flat map: a room list plus a door map.

use std::fmt;

use indexmap::IndexMap;
use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoorEnds {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatDescription {
    #[serde(rename = "roomList")]
    pub rooms: Vec<String>,
    #[serde(rename = "doorList", deserialize_with = "unique_doors")]
    pub doors: IndexMap<String, DoorEnds>,
}

struct DoorMapVisitor;

impl<'de> Visitor<'de> for DoorMapVisitor {
    type Value = IndexMap<String, DoorEnds>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a map of door ids to {from, to}")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
        let mut doors = IndexMap::new();
        while let Some((key, ends)) = map.next_entry::<String, DoorEnds>()? {
            if ends.from.trim().is_empty() || ends.to.trim().is_empty() {
                return Err(de::Error::custom(format!("{key}: empty from/to")));
            }
            if doors.insert(key.clone(), ends).is_some() {
                return Err(de::Error::custom(format!("duplicate door {key}")));
            }
        }
        Ok(doors)
    }
}

fn unique_doors<'de, D: Deserializer<'de>>(d: D) -> Result<IndexMap<String, DoorEnds>, D::Error> {
    d.deserialize_map(DoorMapVisitor)
}

/// Scans from `open` (an index of `[` or `{`) to its matching closer,
/// skipping string literals.
fn matching_close(text: &str, open: usize) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate().skip(open) {
        if in_string {
            match b {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => in_string = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'[' | b'{' => depth += 1,
            b']' | b'}' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

/// Rewrites `"doorList": [ "door1": {...}, ... ]` into an object.
fn repair_door_array(text: &str) -> Option<String> {
    let key = text.find("\"doorList\"")?;
    let after = key + "\"doorList\"".len();
    let rest = &text[after..];
    let colon = rest.find(|c: char| !c.is_whitespace())?;
    if !rest[colon..].starts_with(':') {
        return None;
    }
    let bracket_rel = rest[colon + 1..].find(|c: char| !c.is_whitespace())?;
    let open = after + colon + 1 + bracket_rel;
    if text.as_bytes()[open] != b'[' {
        return None;
    }
    let close = matching_close(text, open)?;
    let mut repaired = String::with_capacity(text.len());
    repaired.push_str(&text[..open]);
    repaired.push('{');
    repaired.push_str(&text[open + 1..close]);
    repaired.push('}');
    repaired.push_str(&text[close + 1..]);
    Some(repaired)
}

/// Accepts strict JSON, or the same with `doorList` written as an array of
/// `"doorN": {...}` pairs. Anything else is an error.
pub fn parse_flat_description(text: &str) -> Result<FlatDescription, ParseError> {
    let strict = serde_json::from_str::<FlatDescription>(text);
    match strict {
        Ok(fd) => Ok(fd),
        Err(first) => {
            let Some(repaired) = repair_door_array(text) else {
                return Err(ParseError::Malformed(first.to_string()));
            };
            serde_json::from_str::<FlatDescription>(&repaired)
                .map_err(|e| ParseError::Malformed(e.to_string()))
        }
    }
}

/// Locates and parses the first JSON object carrying a `roomList` inside a
/// free-form reply.
pub fn find_flat_description(reply: &str) -> Option<FlatDescription> {
    let key = reply.find("\"roomList\"")?;
    let open = reply[..key].rfind('{')?;
    let close = matching_close(reply, open)?;
    parse_flat_description(&reply[open..=close]).ok()
}

fn quoted(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// Strict JSON with two-space indentation, one door per line, keys in
/// first-seen order.
pub fn render_flat_description(fd: &FlatDescription) -> String {
    let mut out = String::from("{\n  \"roomList\": [");
    if fd.rooms.is_empty() {
        out.push(']');
    } else {
        let rooms: Vec<String> = fd.rooms.iter().map(|r| format!("    {}", quoted(r))).collect();
        out.push('\n');
        out.push_str(&rooms.join(",\n"));
        out.push_str("\n  ]");
    }
    out.push_str(",\n  \"doorList\": {");
    if fd.doors.is_empty() {
        out.push('}');
    } else {
        let doors: Vec<String> = fd
            .doors
            .iter()
            .map(|(id, ends)| {
                format!(
                    "    {}: {{\"from\": {}, \"to\": {}}}",
                    quoted(id),
                    quoted(&ends.from),
                    quoted(&ends.to)
                )
            })
            .collect();
        out.push('\n');
        out.push_str(&doors.join(",\n"));
        out.push_str("\n  }");
    }
    out.push_str("\n}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FINAL: &str = include_str!("../../../../assets/golden/flat_final.txt");
    const INTERMEDIATE: &str = include_str!("../../../../assets/golden/flat_intermediate.txt");

    #[test]
    fn parses_pseudo_json_array_form() {
        let fd = parse_flat_description(FINAL).unwrap();
        assert_eq!(fd.rooms.len(), 7);
        assert_eq!(fd.doors.len(), 8);
        assert_eq!(fd.doors.keys().next().map(String::as_str), Some("door1"));
        assert_eq!(
            fd.doors["door3"],
            DoorEnds {
                from: "corridor".into(),
                to: "living room".into()
            }
        );
        let fd = parse_flat_description(INTERMEDIATE).unwrap();
        assert_eq!((fd.rooms.len(), fd.doors.len()), (6, 6));
    }

    #[test]
    fn empty_description() {
        let fd = parse_flat_description(r#"{"roomList": [], "doorList": {}}"#).unwrap();
        assert_eq!(fd, FlatDescription::default());
        let text = render_flat_description(&fd);
        let compact: String = text.split_whitespace().collect();
        assert_eq!(compact, r#"{"roomList":[],"doorList":{}}"#);
    }

    #[test]
    fn rejects_other_malformations() {
        assert!(parse_flat_description(r#"{"roomList": []}"#).is_err());
        assert!(parse_flat_description(r#"{"doorList": {}}"#).is_err());
        assert!(parse_flat_description("roomList").is_err());
        assert!(parse_flat_description(r#"{"roomList": ["a"], "doorList": {"door1": {"from": "a"}}}"#).is_err());
        assert!(parse_flat_description(
            r#"{"roomList": ["a"], "doorList": {"door1": {"from": "a", "to": "b"}, "door1": {"from": "a", "to": "b"}}}"#
        )
        .is_err());
        assert!(parse_flat_description(r#"{"roomList": ["a",], "doorList": {}}"#).is_err());
    }

    #[test]
    fn render_contains_door_lines() {
        let fd = parse_flat_description(FINAL).unwrap();
        let text = render_flat_description(&fd);
        assert!(text.contains(r#""door8": {"from": "kitchen", "to": "corridor"}"#));
        serde_json::from_str::<serde_json::Value>(&text).expect("strict JSON");
    }

    #[test]
    fn finds_description_in_prose() {
        let reply = format!("I have reached the end. Here it is: {FINAL} Please check.");
        let fd = find_flat_description(&reply).unwrap();
        assert_eq!(fd.doors.len(), 8);
        assert!(find_flat_description("My command is \"pass door1\"").is_none());
    }

    fn description() -> impl Strategy<Value = FlatDescription> {
        let room = "[a-z]{1,8}( [a-z]{1,6})?";
        (
            proptest::collection::vec(room, 0..8),
            proptest::collection::vec((room, room), 0..10),
        )
            .prop_map(|(rooms, doors)| FlatDescription {
                rooms,
                doors: doors
                    .into_iter()
                    .enumerate()
                    .map(|(i, (from, to))| (format!("door{}", i + 1), DoorEnds { from, to }))
                    .collect(),
            })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(fd in description()) {
            let text = render_flat_description(&fd);
            prop_assert_eq!(parse_flat_description(&text).unwrap(), fd);
        }
    }
}
