//! Wire grammars for the three dialects and the flat-map JSON format.
//!
//! Every rendered line here is the exact byte string exchanged with an
//! agent; golden transcripts depend on it.

mod command;
mod flat;
mod response;

use thiserror::Error;

pub use command::{extract_ep_command, parse_command, Command, Dialect};
pub use flat::{
    find_flat_description, parse_flat_description, render_flat_description, DoorEnds,
    FlatDescription,
};
pub use response::{parse_response, render_response, Observation, ObservationKind, Response};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty command")]
    Empty,
    #[error("unknown verb {0}")]
    UnknownVerb(String),
    #[error("{verb} is not available in {dialect}")]
    WrongDialect { verb: String, dialect: Dialect },
    #[error("{0} needs an object")]
    MissingObject(String),
    #[error("{0}")]
    MissingKeyword(String),
    #[error("{0} is not a valid object name")]
    BadId(String),
    #[error("{0} is listed twice")]
    Duplicate(String),
    #[error("{0}")]
    Malformed(String),
}
