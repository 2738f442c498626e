use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::DonePayload;
use crate::envs::{TaskStatus, Violation};
use crate::protocol::Dialect;
use crate::world::Task;

/// Why an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The agent declared it was finished.
    Done,
    /// The agent stopped on its own without finishing (a policy failure).
    GaveUp,
    /// The task was achieved and the run was configured to stop there.
    TaskComplete,
    /// The agent could not be talked to (timeout, i/o error, bad handshake).
    AgentFailure,
    /// The turn budget ran out.
    Limit,
    /// The agent went away, or repeated unparseable turns.
    Aborted,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Termination::Done => "done",
            Termination::GaveUp => "gave_up",
            Termination::TaskComplete => "task_complete",
            Termination::AgentFailure => "agent_failure",
            Termination::Limit => "limit",
            Termination::Aborted => "aborted",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Header {
    pub scenario: String,
    pub dialect: Dialect,
    pub agent: String,
    pub timestamp: String,
    pub seed: Option<u64>,
    pub task: Task,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Turn {
    pub i: usize,
    /// The agent line exactly as received.
    pub agent: String,
    /// Canonical rendering of the parsed command, if it parsed.
    pub command: Option<String>,
    pub response: String,
    pub violation: Option<Violation>,
    /// Short hash of the world state after this turn.
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Footer {
    pub termination: Termination,
    pub detail: Option<String>,
    pub status: TaskStatus,
    pub done: Option<DonePayload>,
    pub report: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Record {
    Header(Header),
    Turn(Turn),
    Footer(Footer),
}

/// One recorded episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub header: Header,
    pub turns: Vec<Turn>,
    pub footer: Option<Footer>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed transcript (line {line}): {reason}")]
pub struct MalformedTranscript {
    pub line: usize,
    pub reason: String,
}

impl MalformedTranscript {
    pub(crate) fn new(line: usize, reason: impl Into<String>) -> Self {
        MalformedTranscript {
            line,
            reason: reason.into(),
        }
    }
}

impl Transcript {
    pub fn new(header: Header) -> Self {
        Transcript {
            header,
            turns: Vec::new(),
            footer: None,
        }
    }

    /// JSON Lines: header, one record per turn, then the footer if present.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |r: Record| {
            out.push_str(&serde_json::to_string(&r).expect("records serialize"));
            out.push('\n');
        };
        push(Record::Header(self.header.clone()));
        for t in &self.turns {
            push(Record::Turn(t.clone()));
        }
        if let Some(f) = &self.footer {
            push(Record::Footer(f.clone()));
        }
        out
    }

    /// The same transcript with the timestamp blanked, for comparisons.
    pub fn without_timestamp(&self) -> Transcript {
        let mut t = self.clone();
        t.header.timestamp.clear();
        t
    }
}

/// Parses a complete transcript file. The footer is required, so a
/// truncated file is rejected.
pub fn parse_jsonl(text: &str) -> Result<Transcript, MalformedTranscript> {
    let mut header = None;
    let mut turns: Vec<Turn> = Vec::new();
    let mut footer = None;
    let mut last_line = 0;
    for (n, line) in text.lines().enumerate() {
        let n = n + 1;
        last_line = n;
        if line.trim().is_empty() {
            continue;
        }
        if footer.is_some() {
            return Err(MalformedTranscript::new(n, "record after footer"));
        }
        let record: Record = serde_json::from_str(line)
            .map_err(|e| MalformedTranscript::new(n, e.to_string()))?;
        match (record, header.is_some()) {
            (Record::Header(h), false) => header = Some(h),
            (Record::Header(_), true) => {
                return Err(MalformedTranscript::new(n, "second header"))
            }
            (_, false) => return Err(MalformedTranscript::new(n, "first record must be the header")),
            (Record::Turn(t), true) => {
                if t.i != turns.len() + 1 {
                    return Err(MalformedTranscript::new(
                        n,
                        format!("turn index {} out of sequence, expected {}", t.i, turns.len() + 1),
                    ));
                }
                turns.push(t);
            }
            (Record::Footer(f), true) => footer = Some(f),
        }
    }
    let Some(header) = header else {
        return Err(MalformedTranscript::new(last_line, "no header record"));
    };
    if footer.is_none() {
        return Err(MalformedTranscript::new(last_line, "missing footer record (truncated?)"));
    }
    Ok(Transcript {
        header,
        turns,
        footer,
    })
}
