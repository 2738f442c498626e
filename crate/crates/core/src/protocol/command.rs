use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::ParseError;
use crate::world::ObjectId;

/// One of the three command/response grammars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dialect {
    /// Exploration: `pass <door>` commands, prose observations.
    #[serde(rename = "EP")]
    Ep,
    /// Simple search: underscore verbs, bare `COMMAND IMPOSSIBLE`.
    #[serde(rename = "SP")]
    Sp,
    /// Manipulation: spaced verbs, take/put, verbose errors.
    #[serde(rename = "MP")]
    Mp,
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::Ep => "EP",
            Dialect::Sp => "SP",
            Dialect::Mp => "MP",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Command {
    PassDoor(ObjectId),
    Goto(ObjectId),
    Open(ObjectId),
    Close(ObjectId),
    LookOn(ObjectId),
    LookIn(ObjectId),
    Take(Vec<ObjectId>),
    PutOn(Vec<ObjectId>, ObjectId),
    PutIn(Vec<ObjectId>, ObjectId),
}

pub(crate) fn join_ids(ids: &[ObjectId]) -> String {
    ids.iter().map(ObjectId::as_str).collect::<Vec<_>>().join(",")
}

impl Command {
    /// Agent-side rendering; `None` when the dialect has no form for it.
    pub fn render(&self, d: Dialect) -> Option<String> {
        use Command::*;
        let line = match (self, d) {
            (PassDoor(door), Dialect::Ep) => format!("pass {door}"),
            (_, Dialect::Ep) | (PassDoor(_), _) => return None,
            (Goto(f), _) => format!("GOTO {f}"),
            (Open(f), _) => format!("OPEN {f}"),
            (Close(f), _) => format!("CLOSE {f}"),
            (LookOn(f), Dialect::Sp) => format!("LOOK_ON {f}"),
            (LookIn(f), Dialect::Sp) => format!("LOOK_INSIDE {f}"),
            (LookOn(f), Dialect::Mp) => format!("LOOK ON {f}"),
            (LookIn(f), Dialect::Mp) => format!("LOOK IN {f}"),
            (Take(_) | PutOn(..) | PutIn(..), Dialect::Sp) => return None,
            (Take(objs), Dialect::Mp) => format!("TAKE {}", join_ids(objs)),
            (PutOn(objs, f), Dialect::Mp) => format!("PUT {} ON {f}", join_ids(objs)),
            (PutIn(objs, f), Dialect::Mp) => format!("PUT {} IN {f}", join_ids(objs)),
        };
        Some(line)
    }

    /// The furniture a single-target command addresses.
    pub fn target(&self) -> Option<&ObjectId> {
        match self {
            Command::Goto(f)
            | Command::Open(f)
            | Command::Close(f)
            | Command::LookOn(f)
            | Command::LookIn(f)
            | Command::PutOn(_, f)
            | Command::PutIn(_, f) => Some(f),
            Command::PassDoor(_) | Command::Take(_) => None,
        }
    }
}

fn single_id(rest: &[&str], verb: &str) -> Result<ObjectId, ParseError> {
    match rest {
        [] => Err(ParseError::MissingObject(verb.to_string())),
        [one] => ObjectId::new(*one).map_err(|e| ParseError::BadId(e.0)),
        _ => Err(ParseError::Malformed(format!(
            "{verb} takes a single object, got {:?}",
            rest.join(" ")
        ))),
    }
}

fn id_list(tokens: &[&str], verb: &str) -> Result<Vec<ObjectId>, ParseError> {
    if tokens.is_empty() {
        return Err(ParseError::MissingObject(verb.to_string()));
    }
    let joined = tokens.join(" ");
    let mut ids: Vec<ObjectId> = Vec::new();
    for item in joined.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(ParseError::Malformed(format!("empty item in list {joined:?}")));
        }
        let id = ObjectId::new(item).map_err(|e| ParseError::BadId(e.0))?;
        if ids.contains(&id) {
            return Err(ParseError::Duplicate(id.to_string()));
        }
        ids.push(id);
    }
    Ok(ids)
}

/// Parses one agent line in the given dialect.
///
/// Surrounding whitespace and a single trailing `.` are ignored; verbs are
/// case-insensitive, ids are not.
pub fn parse_command(line: &str, d: Dialect) -> Result<Command, ParseError> {
    let line = line.trim();
    let line = line.strip_suffix('.').unwrap_or(line).trim_end();
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let Some((verb, rest)) = tokens.split_first() else {
        return Err(ParseError::Empty);
    };
    let upper = verb.to_ascii_uppercase();

    if d == Dialect::Ep {
        return match upper.as_str() {
            "PASS" => single_id(rest, "pass").map(Command::PassDoor),
            _ => Err(ParseError::UnknownVerb(verb.to_string())),
        };
    }

    match upper.as_str() {
        "GOTO" => single_id(rest, "GOTO").map(Command::Goto),
        "OPEN" => single_id(rest, "OPEN").map(Command::Open),
        "CLOSE" => single_id(rest, "CLOSE").map(Command::Close),
        "LOOK_ON" => single_id(rest, "LOOK_ON").map(Command::LookOn),
        "LOOK_INSIDE" => single_id(rest, "LOOK_INSIDE").map(Command::LookIn),
        "LOOK" if d == Dialect::Mp => match rest.split_first() {
            Some((prep, target)) if prep.eq_ignore_ascii_case("ON") => {
                single_id(target, "LOOK ON").map(Command::LookOn)
            }
            Some((prep, target)) if prep.eq_ignore_ascii_case("IN") => {
                single_id(target, "LOOK IN").map(Command::LookIn)
            }
            _ => Err(ParseError::MissingKeyword("LOOK needs ON or IN".into())),
        },
        "TAKE" if d == Dialect::Mp => id_list(rest, "TAKE").map(Command::Take),
        "PUT" if d == Dialect::Mp => {
            let Some(k) = rest
                .iter()
                .rposition(|t| t.eq_ignore_ascii_case("ON") || t.eq_ignore_ascii_case("IN"))
            else {
                return Err(ParseError::MissingKeyword("PUT needs ON or IN".into()));
            };
            let objs = id_list(&rest[..k], "PUT")?;
            let dest = single_id(&rest[k + 1..], "PUT")?;
            if rest[k].eq_ignore_ascii_case("ON") {
                Ok(Command::PutOn(objs, dest))
            } else {
                Ok(Command::PutIn(objs, dest))
            }
        }
        "LOOK" | "TAKE" | "PUT" => Err(ParseError::WrongDialect {
            verb: verb.to_string(),
            dialect: d,
        }),
        _ => Err(ParseError::UnknownVerb(verb.to_string())),
    }
}

fn ep_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\bpass\s+(door[0-9]+)\b").expect("valid regex"))
}

/// Finds the first `pass door<N>` in free-form agent text.
pub fn extract_ep_command(text: &str) -> Option<Command> {
    let caps = ep_pattern().captures(text)?;
    let door = caps[1].to_ascii_lowercase();
    ObjectId::new(door).ok().map(Command::PassDoor)
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
    fn sp_commands_from_the_search_session() {
        assert_eq!(parse_command("LOOK_ON floor.", Dialect::Sp), Ok(Command::LookOn(id("floor"))));
        assert_eq!(parse_command("GOTO table1.", Dialect::Sp), Ok(Command::Goto(id("table1"))));
        assert_eq!(
            parse_command("LOOK_INSIDE cupboard1.", Dialect::Sp),
            Ok(Command::LookIn(id("cupboard1")))
        );
        assert_eq!(parse_command("  open closet1  ", Dialect::Sp), Ok(Command::Open(id("closet1"))));
    }

    #[test]
    fn mp_commands_from_the_table_session() {
        assert_eq!(
            parse_command("PUT fork1,fork2,knife1,knife2 ON table1", Dialect::Mp),
            Ok(Command::PutOn(ids(&["fork1", "fork2", "knife1", "knife2"]), id("table1")))
        );
        assert_eq!(
            parse_command("TAKE fork1, fork2", Dialect::Mp),
            Ok(Command::Take(ids(&["fork1", "fork2"])))
        );
        assert_eq!(parse_command("LOOK ON floor.", Dialect::Mp), Ok(Command::LookOn(id("floor"))));
        assert_eq!(parse_command("look in cupboard2", Dialect::Mp), Ok(Command::LookIn(id("cupboard2"))));
        assert_eq!(parse_command("LOOK_ON floor", Dialect::Mp), Ok(Command::LookOn(id("floor"))));
        assert_eq!(
            parse_command("PUT napkin1 IN closet1", Dialect::Mp),
            Ok(Command::PutIn(ids(&["napkin1"]), id("closet1")))
        );
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_command("", Dialect::Sp), Err(ParseError::Empty));
        assert_eq!(parse_command(" . ", Dialect::Sp), Err(ParseError::Empty));
        assert!(matches!(
            parse_command("TAKE fork1", Dialect::Sp),
            Err(ParseError::WrongDialect { .. })
        ));
        assert!(matches!(
            parse_command("LOOK ON floor", Dialect::Sp),
            Err(ParseError::WrongDialect { .. })
        ));
        assert!(matches!(parse_command("JUMP", Dialect::Mp), Err(ParseError::UnknownVerb(_))));
        assert!(matches!(
            parse_command("PUT fork1 table1", Dialect::Mp),
            Err(ParseError::MissingKeyword(_))
        ));
        assert!(matches!(
            parse_command("TAKE fork1,,fork2", Dialect::Mp),
            Err(ParseError::Malformed(_))
        ));
        assert!(matches!(
            parse_command("TAKE fork1,fork1", Dialect::Mp),
            Err(ParseError::Duplicate(_))
        ));
        assert!(matches!(parse_command("GOTO Table1", Dialect::Sp), Err(ParseError::BadId(_))));
        assert!(matches!(parse_command("GOTO", Dialect::Sp), Err(ParseError::MissingObject(_))));
        assert!(matches!(
            parse_command("GOTO table1 now", Dialect::Sp),
            Err(ParseError::Malformed(_))
        ));
    }

    #[test]
    fn ep_extraction() {
        assert_eq!(
            extract_ep_command(r#"My command is "pass door7""#),
            Some(Command::PassDoor(id("door7")))
        );
        assert_eq!(
            extract_ep_command(r#"{ "command": "pass door1" }"#),
            Some(Command::PassDoor(id("door1")))
        );
        assert_eq!(
            extract_ep_command("first PASS Door3 then pass door4"),
            Some(Command::PassDoor(id("door3")))
        );
        assert_eq!(extract_ep_command("I have reached the end of the navigation."), None);
        assert_eq!(extract_ep_command("bypass door2"), None);
        assert_eq!(parse_command("pass door2", Dialect::Ep), Ok(Command::PassDoor(id("door2"))));
        assert!(parse_command("GOTO door2", Dialect::Ep).is_err());
    }

    #[test]
    fn render_by_dialect() {
        let take = Command::Take(ids(&["fork1", "fork2"]));
        assert_eq!(take.render(Dialect::Mp).as_deref(), Some("TAKE fork1,fork2"));
        assert_eq!(take.render(Dialect::Sp), None);
        assert_eq!(Command::LookIn(id("x1")).render(Dialect::Sp).as_deref(), Some("LOOK_INSIDE x1"));
        assert_eq!(Command::LookIn(id("x1")).render(Dialect::Mp).as_deref(), Some("LOOK IN x1"));
        assert_eq!(Command::PassDoor(id("door1")).render(Dialect::Sp), None);
    }
}
