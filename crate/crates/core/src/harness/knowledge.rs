use std::collections::BTreeSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::transcript::{MalformedTranscript, Transcript};
use crate::protocol::{parse_command, parse_response, Command, Dialect, Response};
use crate::world::{ObjectId, Scenario};

/// What the agent knows about one piece of furniture. The floor entry lists
/// the furniture and has no `open` flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FurnitureKnowledge {
    pub objects: Vec<ObjectId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub open: Option<bool>,
}

/// Furniture the agent has looked at, in order of first observation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KnowledgeState(pub IndexMap<ObjectId, FurnitureKnowledge>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Openability {
    pub openable: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OpenabilityReport(pub IndexMap<ObjectId, Openability>);

fn robot_responses(t: &Transcript) -> Result<Vec<Response>, MalformedTranscript> {
    if t.header.dialect == Dialect::Ep {
        return Err(MalformedTranscript::new(
            1,
            "knowledge reports need a search or manipulation transcript",
        ));
    }
    t.turns
        .iter()
        .map(|turn| {
            parse_response(&turn.response, t.header.dialect).map_err(|e| {
                MalformedTranscript::new(turn.i + 1, format!("turn {}: {e}", turn.i))
            })
        })
        .collect()
}

#[derive(Default)]
struct Seen {
    surface: Option<Vec<ObjectId>>,
    interior: Option<Vec<ObjectId>>,
}

/// Rebuilds the agent's knowledge from the response lines alone: each
/// surface and interior shows its last listing, objects taken onto the
/// robot disappear, and `open` is the state at the end.
pub fn derive_knowledge_state(t: &Transcript) -> Result<KnowledgeState, MalformedTranscript> {
    let mut seen: IndexMap<ObjectId, Seen> = IndexMap::new();
    let mut open: BTreeSet<ObjectId> = BTreeSet::new();
    let forget = |seen: &mut IndexMap<ObjectId, Seen>, objs: &[ObjectId]| {
        for entry in seen.values_mut() {
            for list in [&mut entry.surface, &mut entry.interior].into_iter().flatten() {
                list.retain(|o| !objs.contains(o));
            }
        }
    };
    for r in robot_responses(t)? {
        match r {
            Response::SeenOn(f, objs) => {
                forget(&mut seen, &objs);
                seen.entry(f).or_default().surface = Some(objs);
            }
            Response::SeenIn(f, objs) => {
                forget(&mut seen, &objs);
                seen.entry(f).or_default().interior = Some(objs);
            }
            Response::Opened(f) => {
                open.insert(f);
            }
            Response::Closed(f) => {
                open.remove(&f);
            }
            Response::OnRobot(objs) => forget(&mut seen, &objs),
            _ => {}
        }
    }
    Ok(KnowledgeState(
        seen.into_iter()
            .map(|(f, s)| {
                let objects = s.surface.into_iter().chain(s.interior).flatten().collect();
                let open = (!f.is_floor()).then(|| open.contains(&f));
                (f, FurnitureKnowledge { objects, open })
            })
            .collect(),
    ))
}

/// Which furniture can be opened.
///
/// With `experience_only`, only what the transcript proves: an `OPENED`
/// reply means yes, and a refused OPEN means no when nothing else explains
/// the refusal (robot elsewhere, already open). Otherwise the scenario's
/// full capability list.
pub fn derive_openability(
    t: &Transcript,
    experience_only: bool,
    s: &Scenario,
) -> OpenabilityReport {
    if !experience_only {
        return OpenabilityReport(
            s.furniture
                .iter()
                .filter(|(id, _)| !id.is_floor())
                .map(|(id, f)| (id.clone(), Openability { openable: f.openable }))
                .collect(),
        );
    }
    let dialect = t.header.dialect;
    let mut out: IndexMap<ObjectId, Openability> = IndexMap::new();
    let mut robot_at: Option<ObjectId> = None;
    let mut open: BTreeSet<ObjectId> = BTreeSet::new();
    for turn in &t.turns {
        let Ok(r) = parse_response(&turn.response, dialect) else {
            continue;
        };
        if let Ok(Command::Open(f)) = parse_command(&turn.agent, dialect) {
            match &r {
                Response::Opened(g) => {
                    out.insert(g.clone(), Openability { openable: true });
                }
                Response::Impossible(msg) => {
                    let refused = match msg {
                        Some(msg) => msg.contains("cannot be opened"),
                        None => {
                            robot_at.as_ref() == Some(&f)
                                && !open.contains(&f)
                                && out.get(&f) != Some(&Openability { openable: true })
                        }
                    };
                    if refused {
                        out.insert(f, Openability { openable: false });
                    }
                }
                _ => {}
            }
        }
        match r {
            Response::RobotAt(f) => robot_at = Some(f),
            Response::Opened(f) => {
                open.insert(f);
            }
            Response::Closed(f) => {
                open.remove(&f);
            }
            _ => {}
        }
    }
    OpenabilityReport(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::golden::parse_golden;
    use crate::harness::transcript::{Header, Turn};
    use crate::world::{load_scenario, Task};

    fn id(s: &str) -> ObjectId {
        ObjectId::new(s).unwrap()
    }

    fn ids(list: &[&str]) -> Vec<ObjectId> {
        list.iter().map(|s| id(s)).collect()
    }

    fn from_golden(text: &str, dialect: Dialect) -> Transcript {
        let mut t = Transcript::new(Header {
            scenario: "golden".into(),
            dialect,
            agent: "script".into(),
            timestamp: String::new(),
            seed: None,
            task: Task::ExploreAndMap,
        });
        for (n, g) in parse_golden(text).unwrap().into_iter().enumerate() {
            t.turns.push(Turn {
                i: n + 1,
                agent: g.agent,
                command: None,
                response: g.expected,
                violation: None,
                digest: String::new(),
            });
        }
        t
    }

    fn ball() -> Transcript {
        from_golden(include_str!("../../../../assets/golden/ball_search.txt"), Dialect::Sp)
    }

    #[test]
    fn ball_search_knowledge() {
        let k = derive_knowledge_state(&ball()).unwrap().0;
        let keys: Vec<_> = k.keys().map(ObjectId::as_str).collect();
        assert_eq!(keys, ["floor", "table1", "closet1", "cupboard1"]);
        assert_eq!(k[&id("floor")].objects.len(), 6);
        assert_eq!(k[&id("floor")].open, None);
        assert_eq!(k[&id("table1")].objects, ids(&["lamp1", "pencil1"]));
        assert_eq!(k[&id("table1")].open, Some(false));
        assert_eq!(k[&id("closet1")].open, Some(false));
        assert_eq!(k[&id("cupboard1")].objects, ids(&["fork1", "fork2", "knife1", "knife2", "ball1"]));
        assert_eq!(k[&id("cupboard1")].open, Some(true));
        let json = serde_json::to_string(&KnowledgeState(k)).unwrap();
        assert!(json.starts_with(r#"{"floor":{"objects":["chair1","#));
    }

    #[test]
    fn ball_search_openability() {
        let s = load_scenario(include_str!("../../../../assets/scenarios/room6.json")).unwrap();
        let o = derive_openability(&ball(), true, &s).0;
        assert_eq!(o.len(), 3);
        assert!(o[&id("closet1")].openable);
        assert!(o[&id("cupboard1")].openable);
        assert!(!o[&id("table1")].openable);

        let full = derive_openability(&ball(), false, &s).0;
        let open: Vec<_> = full.iter().filter(|(_, v)| v.openable).map(|(k, _)| k.as_str()).collect();
        assert_eq!(open, ["closet1", "cupboard1", "cupboard2"]);
        assert_eq!(full.len(), 6);
    }

    #[test]
    fn table_setting_knowledge() {
        let t = from_golden(include_str!("../../../../assets/golden/table_setting.txt"), Dialect::Mp);
        let k = derive_knowledge_state(&t).unwrap().0;
        assert_eq!(k[&id("cupboard2")].objects, vec![]);
        assert_eq!(k[&id("cupboard1")].objects, ids(&["vase1", "ball1"]));
        assert_eq!(k[&id("closet1")].objects, ids(&["notebook1", "basket1"]));
        assert!(k[&id("table1")].objects.contains(&id("glass2")));
        assert!(!k[&id("table1")].objects.contains(&id("napkin1")));
        let s = load_scenario(include_str!("../../../../assets/scenarios/room6_table.json")).unwrap();
        let o = derive_openability(&t, true, &s).0;
        // the "robot must be at" and "already opened" refusals say nothing
        assert_eq!(o.len(), 3);
        assert!(o.values().all(|v| v.openable));
    }

    #[test]
    fn empty_transcript() {
        let t = from_golden("", Dialect::Sp);
        assert!(derive_knowledge_state(&t).unwrap().0.is_empty());
        let s = load_scenario(include_str!("../../../../assets/scenarios/room6.json")).unwrap();
        assert!(derive_openability(&t, true, &s).0.is_empty());
        let ep = from_golden("", Dialect::Ep);
        assert!(derive_knowledge_state(&ep).is_err());
    }
}
