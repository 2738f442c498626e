use chrono::{SecondsFormat, Utc};
use thiserror::Error;

use super::report::{build_report, final_status, EpisodeReport};
use super::session::Session;
use super::transcript::{Footer, Header, MalformedTranscript, Termination, Transcript, Turn};
use crate::agents::{Agent, AgentError, AgentTurn, Opening};
use crate::envs::{dialect_for, TaskStatus};
use crate::prompts::first_prompt;
use crate::protocol::Dialect;
use crate::world::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunLimits {
    pub max_turns: usize,
    /// End the episode as soon as the environment reports the task achieved,
    /// instead of waiting for the agent to say it is done.
    pub stop_on_success: bool,
}

impl Default for RunLimits {
    fn default() -> Self {
        RunLimits {
            max_turns: 200,
            stop_on_success: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("agent speaks {agent} but the scenario needs {scenario}")]
    DialectMismatch { agent: Dialect, scenario: Dialect },
}

/// Plays one episode of `agent` against `s`.
pub fn run_episode(
    s: &Scenario,
    scenario_id: &str,
    agent: &mut dyn Agent,
    limits: RunLimits,
    seed: Option<u64>,
) -> Result<(Transcript, EpisodeReport), HarnessError> {
    let dialect = dialect_for(s.kind);
    if agent.dialect() != dialect {
        return Err(HarnessError::DialectMismatch {
            agent: agent.dialect(),
            scenario: dialect,
        });
    }
    let mut session = Session::new(s);
    let mut transcript = Transcript::new(Header {
        scenario: scenario_id.to_string(),
        dialect,
        agent: agent.id(),
        timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        seed,
        task: s.task.clone(),
    });

    let mut done = None;
    let mut detail = None;
    let termination = if limits.max_turns == 0 {
        Termination::Limit
    } else {
        let opening = Opening {
            prompt: first_prompt(s),
            observation: session.opening_observation(),
        };
        let mut next = agent.begin(&opening);
        loop {
            let turn = match next {
                Ok(turn) => turn,
                Err(e) => {
                    detail = Some(e.to_string());
                    break match e {
                        AgentError::AgentClosed => Termination::Aborted,
                        _ => Termination::AgentFailure,
                    };
                }
            };
            let line = match turn {
                AgentTurn::Emit(line) => line,
                AgentTurn::Done(payload) => {
                    done = Some(payload);
                    break Termination::Done;
                }
                AgentTurn::Fail(reason) => {
                    detail = Some(reason);
                    break Termination::GaveUp;
                }
            };
            if transcript.turns.len() >= limits.max_turns {
                break Termination::Limit;
            }
            let outcome = session.process(&line);
            transcript.turns.push(Turn {
                i: transcript.turns.len() + 1,
                agent: line,
                command: outcome.command.as_ref().and_then(|c| c.render(dialect)),
                response: outcome.response.clone(),
                violation: outcome.violation,
                digest: session.state().digest(),
            });
            if outcome.abort {
                detail = Some("two unparseable turns in a row".into());
                break Termination::Aborted;
            }
            if limits.stop_on_success && session.status().is_achieved() {
                break Termination::TaskComplete;
            }
            next = agent.respond(&outcome.response);
        }
    };

    let status = final_status(s, session.status(), done.as_ref());
    transcript.footer = Some(Footer {
        termination,
        detail,
        status,
        done,
        report: serde_json::Value::Null,
    });
    let report = build_report(s, &transcript).expect("footer is set and the env renders parseable lines");
    if let Some(footer) = transcript.footer.as_mut() {
        footer.report = serde_json::to_value(&report).expect("reports serialize");
    }
    Ok((transcript, report))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Malformed(#[from] MalformedTranscript),
    #[error("transcript is a {transcript} episode but the scenario needs {scenario}")]
    DialectMismatch { transcript: Dialect, scenario: Dialect },
    #[error("transcript task does not match the scenario task")]
    TaskMismatch,
    #[error("turn {turn}: {field} differs (recorded {recorded:?}, replayed {replayed:?})")]
    Mismatch {
        turn: usize,
        field: &'static str,
        recorded: String,
        replayed: String,
    },
    #[error("final status differs (recorded {recorded:?}, replayed {replayed:?})")]
    StatusMismatch {
        recorded: Box<TaskStatus>,
        replayed: Box<TaskStatus>,
    },
    #[error("recorded report differs from the recomputed one")]
    ReportMismatch {
        recorded: Box<serde_json::Value>,
        replayed: Box<serde_json::Value>,
    },
}

impl ReplayError {
    /// First divergent turn, for per-turn mismatches.
    pub fn turn(&self) -> Option<usize> {
        match self {
            ReplayError::Mismatch { turn, .. } => Some(*turn),
            _ => None,
        }
    }
}

/// Feeds the recorded agent lines through a fresh environment and checks
/// that every reply, parsed command, violation tag and state digest comes
/// out the same, then recomputes the report.
pub fn replay(s: &Scenario, t: &Transcript) -> Result<EpisodeReport, ReplayError> {
    let footer = t
        .footer
        .as_ref()
        .ok_or_else(|| MalformedTranscript::new(t.turns.len() + 1, "missing footer record"))?;
    let dialect = dialect_for(s.kind);
    if t.header.dialect != dialect {
        return Err(ReplayError::DialectMismatch {
            transcript: t.header.dialect,
            scenario: dialect,
        });
    }
    if t.header.task != s.task {
        return Err(ReplayError::TaskMismatch);
    }
    let mut session = Session::new(s);
    for turn in &t.turns {
        let outcome = session.process(&turn.agent);
        let mismatch = |field, recorded: String, replayed: String| ReplayError::Mismatch {
            turn: turn.i,
            field,
            recorded,
            replayed,
        };
        if outcome.response != turn.response {
            return Err(mismatch("response", turn.response.clone(), outcome.response));
        }
        let command = outcome.command.as_ref().and_then(|c| c.render(dialect));
        if command != turn.command {
            return Err(mismatch(
                "command",
                format!("{:?}", turn.command),
                format!("{command:?}"),
            ));
        }
        if outcome.violation != turn.violation {
            return Err(mismatch(
                "violation",
                format!("{:?}", turn.violation),
                format!("{:?}", outcome.violation),
            ));
        }
        let digest = session.state().digest();
        if digest != turn.digest {
            return Err(mismatch("digest", turn.digest.clone(), digest));
        }
    }
    let status = final_status(s, session.status(), footer.done.as_ref());
    if status != footer.status {
        return Err(ReplayError::StatusMismatch {
            recorded: Box::new(footer.status.clone()),
            replayed: Box::new(status),
        });
    }
    let report = build_report(s, t)?;
    let replayed = serde_json::to_value(&report).expect("reports serialize");
    if replayed != footer.report {
        return Err(ReplayError::ReportMismatch {
            recorded: Box::new(footer.report.clone()),
            replayed: Box::new(replayed),
        });
    }
    Ok(report)
}
