use thiserror::Error;

/// One agent line and the reply the environment must give to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenTurn {
    pub agent: String,
    pub expected: String,
    /// The reply as it was originally printed, when that differs from the
    /// canonical rendering (spacing, capitalization, ordering).
    pub original: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("golden file line {line}: {reason}")]
pub struct GoldenError {
    pub line: usize,
    pub reason: String,
}

/// Reads the `AI:` / `ENV:` / `ORIGINAL:` pair format. `#` lines and blank
/// lines are ignored.
pub fn parse_golden(text: &str) -> Result<Vec<GoldenTurn>, GoldenError> {
    let mut out: Vec<GoldenTurn> = Vec::new();
    let mut pending: Option<String> = None;
    for (n, raw) in text.lines().enumerate() {
        let n = n + 1;
        let err = |reason: &str| GoldenError {
            line: n,
            reason: reason.to_string(),
        };
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(agent) = line.strip_prefix("AI: ") {
            if pending.is_some() {
                return Err(err("AI line without an ENV reply"));
            }
            pending = Some(agent.to_string());
        } else if let Some(reply) = line.strip_prefix("ENV: ") {
            let agent = pending.take().ok_or_else(|| err("ENV line without an AI line"))?;
            out.push(GoldenTurn {
                agent,
                expected: reply.to_string(),
                original: None,
            });
        } else if let Some(orig) = line.strip_prefix("ORIGINAL: ") {
            match out.last_mut() {
                Some(t) if pending.is_none() && t.original.is_none() => t.original = Some(orig.to_string()),
                _ => return Err(err("ORIGINAL line must follow an ENV line")),
            }
        } else {
            return Err(err("unrecognized line"));
        }
    }
    if pending.is_some() {
        return Err(GoldenError {
            line: text.lines().count(),
            reason: "trailing AI line without an ENV reply".into(),
        });
    }
    Ok(out)
}
