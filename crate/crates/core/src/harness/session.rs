use crate::envs::{dialect_for, initial_observation, step, StatusTracker, TaskStatus, Violation};
use crate::protocol::{
    extract_ep_command, parse_command, render_response, Command, Dialect, Response,
};
use crate::world::{initial_state, Scenario, WorldState};

/// What one agent line did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurnOutcome {
    pub command: Option<Command>,
    pub response: String,
    pub violation: Option<Violation>,
    /// Set when the episode must stop: a second unparseable exploration
    /// turn in a row.
    pub abort: bool,
}

/// The environment side of an episode: takes raw agent lines, returns the
/// exact reply lines.
///
/// Exploration turns are scanned for a `pass doorN` command anywhere in the
/// text; a turn without one gets the last observation again. Robot dialects
/// parse the whole line, and a line that does not parse is refused like any
/// impossible command.
#[derive(Debug, Clone)]
pub struct Session<'a> {
    scenario: &'a Scenario,
    dialect: Dialect,
    state: WorldState,
    last_observation: Option<String>,
    misses: usize,
    tracker: StatusTracker,
    turns: usize,
}

impl<'a> Session<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        let dialect = dialect_for(scenario.kind);
        let state = initial_state(scenario);
        let last_observation = initial_observation(scenario, &state)
            .map(|o| render_response(&Response::Observation(o), dialect));
        Session {
            scenario,
            dialect,
            state,
            last_observation,
            misses: 0,
            tracker: StatusTracker::default(),
            turns: 0,
        }
    }

    pub fn dialect(&self) -> Dialect {
        self.dialect
    }

    pub fn state(&self) -> &WorldState {
        &self.state
    }

    pub fn status(&self) -> &TaskStatus {
        &self.tracker.status
    }

    pub fn turns(&self) -> usize {
        self.turns
    }

    /// The opening observation line of an exploration episode.
    pub fn opening_observation(&self) -> Option<String> {
        match self.dialect {
            Dialect::Ep => initial_observation(self.scenario, &initial_state(self.scenario))
                .map(|o| render_response(&Response::Observation(o), Dialect::Ep)),
            _ => None,
        }
    }

    pub fn process(&mut self, line: &str) -> TurnOutcome {
        self.turns += 1;
        let command = match self.dialect {
            Dialect::Ep => extract_ep_command(line),
            d => match parse_command(line, d) {
                Ok(c) => Some(c),
                Err(e) => {
                    let reason = (d == Dialect::Mp).then(|| e.to_string());
                    return self.refuse_unparseable(Response::Impossible(reason));
                }
            },
        };
        let Some(command) = command else {
            self.misses += 1;
            let response = self.last_observation.clone().unwrap_or_default();
            return TurnOutcome {
                command: None,
                response,
                violation: Some(Violation::UnparseableTurn),
                abort: self.misses >= 2,
            };
        };
        self.misses = 0;
        let result = step(self.scenario, &self.state, &command);
        self.state = result.state;
        self.tracker
            .update(self.scenario, &self.state, &result.response, self.turns);
        let response = render_response(&result.response, self.dialect);
        if matches!(result.response, Response::Observation(_)) {
            self.last_observation = Some(response.clone());
        }
        TurnOutcome {
            command: Some(command),
            response,
            violation: result.violation,
            abort: false,
        }
    }

    fn refuse_unparseable(&mut self, r: Response) -> TurnOutcome {
        self.tracker.update(self.scenario, &self.state, &r, self.turns);
        TurnOutcome {
            command: None,
            response: render_response(&r, self.dialect),
            violation: Some(Violation::UnparseableTurn),
            abort: false,
        }
    }
}
