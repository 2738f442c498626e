use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use super::{Agent, AgentError, AgentTurn, DonePayload, Opening};
use crate::protocol::{find_flat_description, Dialect};

pub const DEFAULT_TURN_TIMEOUT: Duration = Duration::from_secs(60);

/// Collapses text to one line: `\` becomes `\\`, newline becomes `\n`.
pub fn escape_line(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out
}

/// Inverse of [`escape_line`]. Unknown escapes are kept as written.
pub fn unescape_line(line: &str) -> String {
    let mut out = String::with_capacity(line.len());
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

/// How a raw agent line ends an episode, if it does. Exploration agents
/// finish by sending the flat description; robot agents by a line starting
/// with `DONE`.
pub(crate) fn interpret_reply(line: &str, dialect: Dialect) -> AgentTurn {
    match dialect {
        Dialect::Ep => {
            if line.contains("roomList") {
                if let Some(fd) = find_flat_description(&unescape_line(line)) {
                    return AgentTurn::Done(DonePayload::Map(fd));
                }
            }
        }
        Dialect::Sp | Dialect::Mp => {
            let first = line.split_whitespace().next().unwrap_or("");
            if first.trim_end_matches(['.', '!']).eq_ignore_ascii_case("done") {
                return AgentTurn::Done(DonePayload::Nothing);
            }
        }
    }
    AgentTurn::Emit(line.to_string())
}

/// An agent living in a child process, spoken to one line per turn over
/// its standard input and output.
pub struct ExternalAgent {
    command: String,
    dialect: Dialect,
    timeout: Duration,
    child: Child,
    stdin: Option<ChildStdin>,
    replies: Receiver<String>,
}

impl std::fmt::Debug for ExternalAgent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExternalAgent")
            .field("command", &self.command)
            .field("dialect", &self.dialect)
            .field("timeout", &self.timeout)
            .finish_non_exhaustive()
    }
}

impl ExternalAgent {
    /// Starts `command` through `sh -c` and waits for its `READY` line.
    pub fn spawn(command: &str, dialect: Dialect, timeout: Duration) -> Result<Self, AgentError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| AgentError::Io(format!("cannot start {command:?}: {e}")))?;
        let stdout = child.stdout.take().expect("stdout is piped");
        let stdin = child.stdin.take();
        let (tx, replies) = mpsc::channel();
        // A reader thread lets each turn wait with a deadline.
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut agent = ExternalAgent {
            command: command.to_string(),
            dialect,
            timeout,
            child,
            stdin,
            replies,
        };
        match agent.read_reply() {
            Ok(line) if line.trim() == "READY" => Ok(agent),
            Ok(line) => Err(AgentError::Handshake(format!("expected READY, got {line:?}"))),
            Err(AgentError::AgentClosed) => {
                Err(AgentError::Handshake("agent exited before sending READY".into()))
            }
            Err(e) => Err(e),
        }
    }

    fn read_reply(&mut self) -> Result<String, AgentError> {
        match self.replies.recv_timeout(self.timeout) {
            Ok(line) => Ok(line.trim_end_matches('\r').to_string()),
            Err(RecvTimeoutError::Timeout) => Err(AgentError::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => Err(AgentError::AgentClosed),
        }
    }

    /// Sends one line and returns the agent's reply verbatim.
    pub fn external_turn(&mut self, env_line: &str) -> Result<String, AgentError> {
        let stdin = self.stdin.as_mut().ok_or(AgentError::AgentClosed)?;
        let sent = writeln!(stdin, "{}", escape_line(env_line)).and_then(|_| stdin.flush());
        if let Err(e) = sent {
            return Err(match e.kind() {
                ErrorKind::BrokenPipe => AgentError::AgentClosed,
                _ => AgentError::Io(e.to_string()),
            });
        }
        self.read_reply()
    }
}

impl Drop for ExternalAgent {
    fn drop(&mut self) {
        self.stdin.take();
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Agent for ExternalAgent {
    fn id(&self) -> String {
        format!("external:{}", self.command)
    }

    fn dialect(&self) -> Dialect {
        self.dialect
    }

    fn begin(&mut self, opening: &Opening) -> Result<AgentTurn, AgentError> {
        let reply = self.external_turn(&opening.prompt)?;
        Ok(interpret_reply(&reply, self.dialect))
    }

    fn respond(&mut self, env_line: &str) -> Result<AgentTurn, AgentError> {
        let reply = self.external_turn(env_line)?;
        Ok(interpret_reply(&reply, self.dialect))
    }
}

/// A human (or anything else) on a pair of streams, for interactive play.
/// Replies are printed as they are; blank input lines are skipped.
pub struct LineAgent<R, W> {
    input: R,
    output: W,
    dialect: Dialect,
    show_prompt: bool,
}

impl<R: BufRead, W: Write> LineAgent<R, W> {
    pub fn new(input: R, output: W, dialect: Dialect, show_prompt: bool) -> Self {
        LineAgent {
            input,
            output,
            dialect,
            show_prompt,
        }
    }

    fn say(&mut self, text: &str) -> Result<(), AgentError> {
        writeln!(self.output, "{text}")
            .and_then(|_| self.output.flush())
            .map_err(|e| AgentError::Io(e.to_string()))
    }

    fn listen(&mut self) -> Result<AgentTurn, AgentError> {
        let mut buf = String::new();
        loop {
            buf.clear();
            let n = self
                .input
                .read_line(&mut buf)
                .map_err(|e| AgentError::Io(e.to_string()))?;
            if n == 0 {
                return Err(AgentError::AgentClosed);
            }
            let line = buf.trim();
            if !line.is_empty() {
                return Ok(interpret_reply(line, self.dialect));
            }
        }
    }
}

impl<R: BufRead, W: Write> Agent for LineAgent<R, W> {
    fn id(&self) -> String {
        "human".into()
    }

    fn dialect(&self) -> Dialect {
        self.dialect
    }

    fn begin(&mut self, opening: &Opening) -> Result<AgentTurn, AgentError> {
        if self.show_prompt {
            self.say(opening.prompt.trim_end())?;
        } else if let Some(obs) = &opening.observation {
            self.say(obs)?;
        }
        self.listen()
    }

    fn respond(&mut self, env_line: &str) -> Result<AgentTurn, AgentError> {
        self.say(env_line)?;
        self.listen()
    }
}
