//! Subcommand implementations for the `inloop` binary. Each returns the
//! process exit status: 0 success, 1 task failure or replay mismatch,
//! 2 usage, validation or input errors.

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use inloop_core::agents::{
    Agent, ExplorerAgent, ExternalAgent, LineAgent, SearcherAgent, TableAgent,
    DEFAULT_TURN_TIMEOUT,
};
use inloop_core::envs::dialect_for;
use inloop_core::harness::{
    parse_jsonl, replay, run_episode, EpisodeReport, ReplayError, RunLimits, Termination,
    Transcript,
};
use inloop_core::prompts::first_prompt;
use inloop_core::protocol::Dialect;
use inloop_core::world::{load_scenario, Scenario, Task};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgentSpec {
    Explorer,
    Searcher,
    Table,
    External(String),
}

impl FromStr for AgentSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "builtin:explorer" => Ok(AgentSpec::Explorer),
            "builtin:searcher" => Ok(AgentSpec::Searcher),
            "builtin:table" => Ok(AgentSpec::Table),
            _ => match s.strip_prefix("external:") {
                Some(cmd) if !cmd.trim().is_empty() => Ok(AgentSpec::External(cmd.to_string())),
                _ => Err(format!(
                    "unknown agent {s:?}; expected builtin:explorer, builtin:searcher, builtin:table or external:<command>"
                )),
            },
        }
    }
}

impl AgentSpec {
    fn dialect(&self) -> Option<Dialect> {
        match self {
            AgentSpec::Explorer => Some(Dialect::Ep),
            AgentSpec::Searcher => Some(Dialect::Sp),
            AgentSpec::Table => Some(Dialect::Mp),
            AgentSpec::External(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: PathBuf,
    pub agent: AgentSpec,
    pub max_turns: usize,
    pub transcript: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub timeout: Duration,
    pub show_prompt: bool,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn new(scenario: impl Into<PathBuf>, agent: AgentSpec) -> Self {
        RunConfig {
            scenario: scenario.into(),
            agent,
            max_turns: 200,
            transcript: None,
            report: None,
            timeout: DEFAULT_TURN_TIMEOUT,
            show_prompt: false,
            seed: None,
        }
    }
}

/// Loads a scenario file; its id is the file stem.
pub fn load_scenario_file(path: &Path) -> Result<(String, Scenario)> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let scenario = load_scenario(&text).with_context(|| format!("invalid scenario {}", path.display()))?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    Ok((id, scenario))
}

fn finish(code: Result<i32>, err: &mut dyn Write) -> i32 {
    match code {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn write_outputs(
    transcript: &Transcript,
    report: &EpisodeReport,
    transcript_path: Option<&Path>,
    report_path: Option<&Path>,
) -> Result<()> {
    if let Some(p) = transcript_path {
        fs::write(p, transcript.to_jsonl()).with_context(|| format!("cannot write {}", p.display()))?;
    }
    if let Some(p) = report_path {
        let text = serde_json::to_string_pretty(report)? + "\n";
        fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(())
}

fn summary(report: &EpisodeReport, turns: usize) -> String {
    let status = serde_json::to_value(&report.status)
        .map(|v| match (v["state"].as_str(), v["at"].as_str()) {
            (Some(state), Some(at)) => format!("{state} {at}"),
            (Some(state), None) => state.to_string(),
            _ => v.to_string(),
        })
        .unwrap_or_default();
    let mut line = format!(
        "{}: {} after {turns} turns, status {status}",
        report.scenario, report.termination
    );
    if let Some(score) = &report.map_score {
        line.push_str(&format!(
            ", rooms {}/{}, doors {}/{}, extraneous {}+{}",
            score.rooms_matched,
            score.rooms_total,
            score.doors_matched,
            score.doors_total,
            score.extraneous_rooms,
            score.extraneous_doors
        ));
    }
    line
}

fn builtin_agent(spec: &AgentSpec, scenario: &Scenario) -> Result<Box<dyn Agent>> {
    Ok(match (spec, &scenario.task) {
        (AgentSpec::Explorer, _) => Box::new(ExplorerAgent::new()),
        (AgentSpec::Searcher, Task::FindObject { target }) => Box::new(SearcherAgent::new(target.clone())),
        (AgentSpec::Table, Task::DressTable { persons, table, kinds }) => {
            Box::new(TableAgent::new(*persons, table.clone(), kinds.clone()))
        }
        (spec, task) => bail!("{spec:?} cannot work on task {task:?}"),
    })
}

/// Runs one episode and writes its transcript and report.
pub fn cmd_run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let code = run_inner(cfg, out, err);
    finish(code, err)
}

fn run_inner(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (id, scenario) = load_scenario_file(&cfg.scenario)?;
    let needed = dialect_for(scenario.kind);
    if let Some(d) = cfg.agent.dialect() {
        if d != needed {
            bail!("DialectMismatch: agent speaks {d} but {id} needs {needed} ({} scenario)", scenario.kind);
        }
    }
    if cfg.show_prompt {
        writeln!(out, "{}", first_prompt(&scenario).trim_end())?;
    }
    let (mut agent, limits): (Box<dyn Agent>, RunLimits) = match &cfg.agent {
        AgentSpec::External(cmd) => {
            let agent = ExternalAgent::spawn(cmd, needed, cfg.timeout)
                .with_context(|| format!("cannot start external agent {cmd:?}"))?;
            let limits = RunLimits {
                max_turns: cfg.max_turns,
                stop_on_success: true,
            };
            (Box::new(agent), limits)
        }
        spec => {
            let limits = RunLimits {
                max_turns: cfg.max_turns,
                stop_on_success: false,
            };
            (builtin_agent(spec, &scenario)?, limits)
        }
    };
    let (transcript, report) = run_episode(&scenario, &id, agent.as_mut(), limits, cfg.seed)?;
    write_outputs(&transcript, &report, cfg.transcript.as_deref(), cfg.report.as_deref())?;
    if cfg.report.is_none() {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    }
    writeln!(err, "{}", summary(&report, transcript.turns.len()))?;
    Ok(if report.success { EXIT_OK } else { EXIT_FAILURE })
}

/// Interactive play: the agent lines come from `input`, replies go to `out`.
pub fn cmd_play(
    cfg: &RunConfig,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let code = play_inner(cfg, input, out, err);
    finish(code, err)
}

fn play_inner(cfg: &RunConfig, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (id, scenario) = load_scenario_file(&cfg.scenario)?;
    let dialect = dialect_for(scenario.kind);
    let limits = RunLimits {
        max_turns: cfg.max_turns,
        stop_on_success: false,
    };
    let (transcript, report) = {
        let mut agent = LineAgent::new(input, &mut *out, dialect, cfg.show_prompt);
        run_episode(&scenario, &id, &mut agent, limits, cfg.seed)?
    };
    write_outputs(&transcript, &report, cfg.transcript.as_deref(), cfg.report.as_deref())?;
    writeln!(err, "{}", summary(&report, transcript.turns.len()))?;
    let clean_exit = report.termination == Termination::Aborted
        && transcript.footer.as_ref().and_then(|f| f.detail.as_deref()) == Some("agent closed the connection");
    Ok(if report.success || clean_exit { EXIT_OK } else { EXIT_FAILURE })
}

/// Replays a recorded transcript and checks it against the scenario.
pub fn cmd_eval(
    transcript: &Path,
    scenario: &Path,
    report: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let code = eval_inner(transcript, scenario, report, out, err);
    finish(code, err)
}

fn eval_inner(
    transcript_path: &Path,
    scenario_path: &Path,
    report_path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let text = fs::read_to_string(transcript_path)
        .with_context(|| format!("cannot read {}", transcript_path.display()))?;
    let transcript = parse_jsonl(&text).context("MalformedTranscript")?;
    let (_, scenario) = load_scenario_file(scenario_path)?;
    match replay(&scenario, &transcript) {
        Ok(report) => {
            write_outputs(&transcript, &report, None, report_path)?;
            writeln!(out, "replay ok: {} turns reproduced", transcript.turns.len())?;
            writeln!(err, "{}", summary(&report, transcript.turns.len()))?;
            Ok(EXIT_OK)
        }
        Err(e @ (ReplayError::Malformed(_) | ReplayError::DialectMismatch { .. } | ReplayError::TaskMismatch)) => {
            Err(e.into())
        }
        Err(e) => {
            match e.turn() {
                Some(turn) => writeln!(err, "ReplayMismatch at turn {turn}: {e}")?,
                None => writeln!(err, "ReplayMismatch: {e}")?,
            }
            Ok(EXIT_FAILURE)
        }
    }
}

/// Checks a scenario file and prints a one-line description.
pub fn cmd_validate(scenario: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let code = (|| -> Result<i32> {
        let (id, s) = load_scenario_file(scenario)?;
        let shape = match dialect_for(s.kind) {
            Dialect::Ep => format!("{} rooms, {} doors", s.flat.rooms.len(), s.flat.doors.len()),
            _ => format!(
                "{} furniture, {} objects",
                s.furniture.len().saturating_sub(1),
                s.objects.len()
            ),
        };
        writeln!(out, "{id}: valid {} scenario, {shape}", s.kind)?;
        Ok(EXIT_OK)
    })();
    finish(code, err)
}
