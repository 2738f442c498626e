//! Opening prompts handed to agents before the first turn.

use crate::envs::initial_observation;
use crate::protocol::{render_response, Dialect, Response};
use crate::world::{initial_state, Scenario, ScenarioKind, Task};

pub const EXPLORE_PROMPT: &str = include_str!("../../../assets/prompts/explore.txt");
pub const SEARCH_PROMPT: &str = include_str!("../../../assets/prompts/search.txt");
pub const TABLE_PROMPT: &str = include_str!("../../../assets/prompts/table.txt");

/// The prompt for `s`, adapted to its task: exploration prompts end with
/// the scenario's real starting observation, and the target or number of
/// persons is substituted when it differs from the stock wording.
pub fn first_prompt(s: &Scenario) -> String {
    match (&s.task, s.kind) {
        (_, ScenarioKind::Exploration) => {
            let w = initial_state(s);
            let start = initial_observation(s, &w)
                .map(|o| render_response(&Response::Observation(o), Dialect::Ep))
                .unwrap_or_default();
            let mut lines: Vec<String> = EXPLORE_PROMPT.lines().map(str::to_string).collect();
            match lines.iter().rposition(|l| l.starts_with("Let us start:")) {
                Some(i) => lines[i] = format!("Let us start: {start}"),
                None => lines.push(format!("Let us start: {start}")),
            }
            lines.join("\n") + "\n"
        }
        (Task::FindObject { target }, _) => {
            let kind = target.prefix();
            SEARCH_PROMPT
                .replace("find a ball", &format!("find a {kind}"))
                .replace("find the ball", &format!("find the {kind}"))
        }
        (Task::DressTable { persons, .. }, _) => {
            TABLE_PROMPT.replace("for 2 persons", &format!("for {persons} persons"))
        }
        (_, ScenarioKind::Search) => SEARCH_PROMPT.to_string(),
        (_, ScenarioKind::Manipulation) => TABLE_PROMPT.to_string(),
    }
}
