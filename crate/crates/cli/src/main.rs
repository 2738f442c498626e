use std::io;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use inloop_cli::{cmd_eval, cmd_play, cmd_run, cmd_validate, AgentSpec, RunConfig};

#[derive(Parser)]
#[command(name = "inloop", version, about = "Run and evaluate closed-loop text-environment episodes")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one episode with a builtin or external agent.
    Run(RunArgs),
    /// Play an episode yourself: type agent lines, read the replies.
    Play(PlayArgs),
    /// Replay a recorded transcript and recompute its report.
    Eval(EvalArgs),
    /// Check a scenario file.
    Validate { scenario: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// builtin:explorer | builtin:searcher | builtin:table | external:<command>
    #[arg(long)]
    agent: AgentSpec,
    #[arg(long, default_value_t = 200)]
    max_turns: usize,
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 60)]
    timeout_secs: u64,
    /// Print the opening prompt before the episode starts.
    #[arg(long)]
    show_prompt: bool,
    /// Recorded in the transcript; all builtin behaviour is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct PlayArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value_t = 200)]
    max_turns: usize,
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    show_prompt: bool,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    transcript: PathBuf,
    #[arg(long)]
    scenario: PathBuf,
    /// Where to write the recomputed report.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    let mut err = io::stderr();
    let code = match cli.command {
        Cmd::Run(a) => {
            let cfg = RunConfig {
                scenario: a.scenario,
                agent: a.agent,
                max_turns: a.max_turns,
                transcript: a.transcript,
                report: a.report,
                timeout: Duration::from_secs(a.timeout_secs),
                show_prompt: a.show_prompt,
                seed: a.seed,
            };
            cmd_run(&cfg, &mut out, &mut err)
        }
        Cmd::Play(a) => {
            let cfg = RunConfig {
                max_turns: a.max_turns,
                transcript: a.transcript,
                report: a.report,
                show_prompt: a.show_prompt,
                seed: a.seed,
                ..RunConfig::new(a.scenario, AgentSpec::External("human".into()))
            };
            let mut input = io::stdin().lock();
            cmd_play(&cfg, &mut input, &mut out, &mut err)
        }
        Cmd::Eval(a) => cmd_eval(&a.transcript, &a.scenario, a.report.as_deref(), &mut out, &mut err),
        Cmd::Validate { scenario } => cmd_validate(&scenario, &mut out, &mut err),
    };
    drop(out);
    std::process::exit(code);
}
