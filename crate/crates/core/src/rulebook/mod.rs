//! Rule files, the shipped corpus and the offline consistency checker.

mod consistency;
mod format;

use std::ffi::OsStr;
use std::path::Path;

use thiserror::Error;

use crate::rule_core::{RuleBase, Situation};

pub use consistency::{check_consistency, Conflict, ConsistencyReport};
pub use format::{
    parse_rulefile, parse_with_source, serialize_rulebase, ParseError, ParseErrorKind, RuleSource,
};

/// Name of the embedded UK Highway Code sample corpus.
pub const UK_HIGHWAY_SAMPLE: &str = "uk_highway_sample";

const UK_HIGHWAY_SAMPLE_TEXT: &str = include_str!("../../corpora/uk_highway_sample.rules");

#[derive(Debug, Error)]
pub enum RulebookError {
    #[error("unknown corpus `{0}`")]
    UnknownCorpus(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
}

/// Names of the corpora compiled into the library.
pub fn named_corpora() -> &'static [&'static str] {
    &[UK_HIGHWAY_SAMPLE]
}

/// Source text of an embedded corpus.
pub fn corpus_text(name: &str) -> Option<&'static str> {
    match name {
        UK_HIGHWAY_SAMPLE => Some(UK_HIGHWAY_SAMPLE_TEXT),
        _ => None,
    }
}

pub fn load_named_corpus(name: &str) -> Result<RuleBase, RulebookError> {
    let text = corpus_text(name).ok_or_else(|| RulebookError::UnknownCorpus(name.to_string()))?;
    parse_rulefile(text).map_err(|source| RulebookError::Parse {
        path: format!("<{name}>"),
        source,
    })
}

/// Looks for `<name>.rules` in each directory of a search path (platform
/// path-list syntax) before falling back to the embedded corpora.
pub fn load_corpus(name: &str, search_path: Option<&OsStr>) -> Result<RuleBase, RulebookError> {
    if let Some(dirs) = search_path {
        for dir in std::env::split_paths(dirs) {
            let candidate = dir.join(format!("{name}.rules"));
            if candidate.is_file() {
                return load_rulefile(&candidate).map(|(rb, _)| rb);
            }
        }
    }
    load_named_corpus(name)
}

/// Beliefs of the latency benchmark query: a car approaching a red light,
/// reporting many facts that no rule needs together.
pub const BENCH_BELIEFS: [&str; 15] = [
    "vehicleSafe",
    "headlightsOff",
    "allChildrenUsingChildSeatAsRequired",
    "canReadNumberPlate",
    "exitClear",
    "dualCarriageWay",
    "vehicleDoesntFitsInCentralReservation",
    "roadAheadClear",
    "fuel",
    "driving",
    "completeOvertakeBeforeSolidWhiteLine",
    "routePlanned",
    "lightRed",
    "allPassengersWearingSeatBeltsAsRequired",
    "sidelightsOff",
];

pub const BENCH_INTENTIONS: [&str; 1] = ["approachingTrafficLight"];

pub fn bench_situation() -> Situation {
    Situation::parse("standard", BENCH_BELIEFS, BENCH_INTENTIONS).expect("benchmark atoms are valid")
}

pub fn load_rulefile(path: &Path) -> Result<(RuleBase, RuleSource), RulebookError> {
    let text = std::fs::read_to_string(path).map_err(|source| RulebookError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_with_source(&text, Some(path.to_path_buf())).map_err(|source| RulebookError::Parse {
        path: path.display().to_string(),
        source,
    })
}
