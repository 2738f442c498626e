use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::transcript::Transcript;
use crate::agents::DonePayload;
use crate::envs::Violation;
use crate::protocol::{parse_response, Response};
use crate::world::{ObjectId, Task};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub commands_issued: usize,
    pub impossible_count: usize,
    pub unparseable_count: usize,
    /// Furniture opened and never closed again.
    pub unclosed_at_end: Vec<ObjectId>,
    /// Turn at which the task was first achieved, judged from the replies:
    /// the target listed in a SEEN line, or the table observed complete.
    /// For exploration, the number of turns before the agent handed in its map.
    pub turns_to_completion: Option<usize>,
}

/// Tracks what the replies say is on the table.
struct TableWatch<'a> {
    table: &'a ObjectId,
    persons: usize,
    kinds: &'a [String],
    on_table: Vec<ObjectId>,
}

impl TableWatch<'_> {
    fn absorb(&mut self, r: &Response) {
        match r {
            Response::SeenOn(f, objs) if f == self.table => self.on_table = objs.clone(),
            Response::OnDest(objs, f) if f == self.table => {
                for o in objs {
                    if !self.on_table.contains(o) {
                        self.on_table.push(o.clone());
                    }
                }
            }
            Response::OnRobot(objs) => self.on_table.retain(|o| !objs.contains(o)),
            _ => {}
        }
    }

    fn complete(&self) -> bool {
        self.kinds.iter().all(|k| {
            self.on_table.iter().filter(|o| o.prefix() == k).count() >= self.persons
        })
    }
}

/// Episode metrics, computed from the transcript's lines only.
pub fn metrics(t: &Transcript) -> EpisodeMetrics {
    let dialect = t.header.dialect;
    let mut m = EpisodeMetrics {
        commands_issued: t.turns.len(),
        ..Default::default()
    };
    let mut open: BTreeSet<ObjectId> = BTreeSet::new();
    let mut table = match &t.header.task {
        Task::DressTable {
            persons,
            table,
            kinds,
        } => Some(TableWatch {
            table,
            persons: *persons as usize,
            kinds,
            on_table: Vec::new(),
        }),
        _ => None,
    };
    for turn in &t.turns {
        if turn.violation == Some(Violation::UnparseableTurn) {
            m.unparseable_count += 1;
        }
        let Ok(r) = parse_response(&turn.response, dialect) else {
            continue;
        };
        if r.is_impossible() {
            m.impossible_count += 1;
        }
        match &r {
            Response::Opened(f) => {
                open.insert(f.clone());
            }
            Response::Closed(f) => {
                open.remove(f);
            }
            _ => {}
        }
        let achieved = match (&t.header.task, &r) {
            (Task::FindObject { target }, Response::SeenOn(_, objs) | Response::SeenIn(_, objs)) => {
                objs.contains(target)
            }
            (Task::DressTable { .. }, _) => {
                let watch = table.as_mut().expect("set for table tasks");
                watch.absorb(&r);
                watch.complete()
            }
            _ => false,
        };
        if achieved && m.turns_to_completion.is_none() {
            m.turns_to_completion = Some(turn.i);
        }
    }
    if t.header.task == Task::ExploreAndMap {
        let mapped = matches!(
            t.footer.as_ref().and_then(|f| f.done.as_ref()),
            Some(DonePayload::Map(_))
        );
        if mapped {
            m.turns_to_completion = Some(t.turns.len());
        }
    }
    m.unclosed_at_end = open.into_iter().collect();
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::golden::parse_golden;
    use crate::harness::transcript::{Header, Turn};
    use crate::protocol::Dialect;

    fn transcript(text: &str, dialect: Dialect, task: Task) -> Transcript {
        let mut t = Transcript::new(Header {
            scenario: "golden".into(),
            dialect,
            agent: "script".into(),
            timestamp: String::new(),
            seed: None,
            task,
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

    #[test]
    fn ball_search() {
        let t = transcript(
            include_str!("../../../../assets/golden/ball_search.txt"),
            Dialect::Sp,
            Task::FindObject {
                target: ObjectId::new("ball1").unwrap(),
            },
        );
        let m = metrics(&t);
        assert_eq!(m.commands_issued, t.turns.len());
        assert_eq!(m.impossible_count, 1);
        assert_eq!(m.unparseable_count, 0);
        assert_eq!(m.unclosed_at_end, vec![ObjectId::new("cupboard1").unwrap()]);
        assert_eq!(m.turns_to_completion, Some(t.turns.len()));
    }

    #[test]
    fn table_setting() {
        let t = transcript(
            include_str!("../../../../assets/golden/table_setting.txt"),
            Dialect::Mp,
            Task::DressTable {
                persons: 2,
                table: ObjectId::new("table1").unwrap(),
                kinds: ["fork", "knife", "plate", "glass"].map(String::from).to_vec(),
            },
        );
        let m = metrics(&t);
        assert_eq!(m.impossible_count, 6);
        // phase 1 ends with the plates and glasses put on the table
        let done_at = t
            .turns
            .iter()
            .position(|x| x.response == "plate1,plate2,glass1,glass2 ON table1")
            .unwrap();
        assert_eq!(m.turns_to_completion, Some(done_at + 1));
        let unclosed: Vec<_> = m.unclosed_at_end.iter().map(ObjectId::as_str).collect();
        assert_eq!(unclosed, ["closet1", "cupboard1", "cupboard2"]);
    }

    #[test]
    fn empty() {
        let t = transcript("", Dialect::Sp, Task::ExploreAndMap);
        assert_eq!(metrics(&t), EpisodeMetrics::default());
    }
}
