use serde::{Deserialize, Serialize};

use super::knowledge::{derive_knowledge_state, derive_openability, KnowledgeState, OpenabilityReport};
use super::metrics::{metrics, EpisodeMetrics};
use super::score::{score_flat_description, MapScore};
use super::transcript::{MalformedTranscript, Termination, Transcript};
use crate::agents::DonePayload;
use crate::envs::TaskStatus;
use crate::protocol::Dialect;
use crate::world::{Scenario, Task};

/// Everything computed about one finished episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeReport {
    pub scenario: String,
    pub agent: String,
    pub dialect: Dialect,
    pub task: Task,
    pub termination: Termination,
    pub status: TaskStatus,
    pub success: bool,
    /// Exploration only, when the agent handed in a map.
    pub map_score: Option<MapScore>,
    pub metrics: EpisodeMetrics,
    /// Search and manipulation only.
    pub knowledge_state: Option<KnowledgeState>,
    /// Experience-only openability; search and manipulation only.
    pub openability: Option<OpenabilityReport>,
}

fn map_score(s: &Scenario, done: Option<&DonePayload>) -> Option<MapScore> {
    match done {
        Some(DonePayload::Map(fd)) => Some(score_flat_description(fd, &s.flat)),
        _ => None,
    }
}

/// Episode status: the environment's verdict, except that an exploration
/// is complete when the agent's map is perfect.
pub(crate) fn final_status(s: &Scenario, env_status: &TaskStatus, done: Option<&DonePayload>) -> TaskStatus {
    match (&s.task, map_score(s, done)) {
        (Task::ExploreAndMap, Some(score)) if score.is_perfect() => TaskStatus::Complete,
        _ => env_status.clone(),
    }
}

/// Builds the report from a transcript with its footer.
pub fn build_report(s: &Scenario, t: &Transcript) -> Result<EpisodeReport, MalformedTranscript> {
    let footer = t
        .footer
        .as_ref()
        .ok_or_else(|| MalformedTranscript::new(t.turns.len() + 1, "missing footer record"))?;
    let robot = t.header.dialect != Dialect::Ep;
    Ok(EpisodeReport {
        scenario: t.header.scenario.clone(),
        agent: t.header.agent.clone(),
        dialect: t.header.dialect,
        task: t.header.task.clone(),
        termination: footer.termination,
        status: footer.status.clone(),
        success: footer.status.is_achieved(),
        map_score: map_score(s, footer.done.as_ref()),
        metrics: metrics(t),
        knowledge_state: if robot { Some(derive_knowledge_state(t)?) } else { None },
        openability: robot.then(|| derive_openability(t, true, s)),
    })
}
