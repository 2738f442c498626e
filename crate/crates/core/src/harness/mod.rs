//! Episode runner, transcripts, and everything computed from them: map
//! scores, knowledge-state and openability reports, metrics and replay.

mod golden;
mod knowledge;
mod metrics;
mod report;
mod run;
mod score;
mod session;
mod transcript;

pub use golden::{parse_golden, GoldenError, GoldenTurn};
pub use knowledge::{
    derive_knowledge_state, derive_openability, FurnitureKnowledge, KnowledgeState,
    Openability, OpenabilityReport,
};
pub use metrics::{metrics, EpisodeMetrics};
pub use report::{build_report, EpisodeReport};
pub use run::{replay, run_episode, HarnessError, ReplayError, RunLimits};
pub use score::{score_flat_description, MapScore};
pub use session::{Session, TurnOutcome};
pub use transcript::{
    parse_jsonl, Footer, Header, MalformedTranscript, Termination, Transcript, Turn,
};
