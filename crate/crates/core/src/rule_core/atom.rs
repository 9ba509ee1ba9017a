use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CoreError;

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A ground term: a lowercase-initial identifier with no structure.
///
/// Both `snake_case` and `camelCase` spellings are accepted since corpora mix
/// them (`visibility_clear`, `visibilitySeriouslyReduced`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Atom(String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Result<Self, CoreError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(Atom(name))
        } else {
            Err(CoreError::InvalidAtom(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The `not_` counterpart of this atom, or the positive atom if this one
    /// is already negated.
    pub fn negation(&self) -> Atom {
        match self.0.strip_prefix("not_") {
            Some(rest) if is_identifier(rest) => Atom(rest.to_string()),
            _ => Atom(format!("not_{}", self.0)),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Atom {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Atom::new(s)
    }
}

impl TryFrom<String> for Atom {
    type Error = CoreError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Atom::new(value)
    }
}

impl From<Atom> for String {
    fn from(atom: Atom) -> Self {
        atom.0
    }
}

impl AsRef<str> for Atom {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Meta-level context a rule applies in (`standard`, `emergency`, ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ContextId(String);

impl ContextId {
    pub fn new(name: impl Into<String>) -> Result<Self, CoreError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(ContextId(name))
        } else {
            Err(CoreError::InvalidContext(name))
        }
    }

    pub fn standard() -> Self {
        ContextId("standard".to_string())
    }

    pub fn emergency() -> Self {
        ContextId("emergency".to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ContextId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ContextId {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ContextId::new(s)
    }
}

impl TryFrom<String> for ContextId {
    type Error = CoreError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        ContextId::new(value)
    }
}

impl From<ContextId> for String {
    fn from(ctx: ContextId) -> Self {
        ctx.0
    }
}
