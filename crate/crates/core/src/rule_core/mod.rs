//! Advisory semantics over ground rules.
//!
//! A [`Rule`] fires in a [`Situation`] when the contexts match and the rule's
//! trigger beliefs and intentions are subsets of the situation's. The
//! recommended set is the deduplicated union of the action pairs of every
//! firing rule, ordered `must` before `should` and then by action name.

mod atom;
mod rulebase;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use atom::{Atom, ContextId};
pub use rulebase::{Advice, RuleBase, RuleBaseBuilder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("malformed atom `{0}` (expected [a-z][a-zA-Z0-9_]*)")]
    InvalidAtom(String),
    #[error("malformed context identifier `{0}`")]
    InvalidContext(String),
    #[error("malformed rule name `{0}`")]
    InvalidRuleName(String),
    #[error("unknown label `{0}` (expected `must` or `should`)")]
    UnknownLabel(String),
    #[error("malformed action pair `{0}` (expected <label>-<action>)")]
    InvalidActionPair(String),
    #[error("rule `{0}` has no action pairs")]
    EmptyActionPairs(String),
    #[error("duplicate rule name `{0}`")]
    DuplicateRule(String),
    #[error("rule `{rule}` uses undeclared context `{context}`")]
    UndeclaredContext { rule: String, context: String },
}

/// What a vehicle reports about itself: a context plus ground beliefs and
/// intentions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Situation {
    pub context: ContextId,
    pub beliefs: BTreeSet<Atom>,
    pub intentions: BTreeSet<Atom>,
}

impl Situation {
    pub fn new(
        context: ContextId,
        beliefs: impl IntoIterator<Item = Atom>,
        intentions: impl IntoIterator<Item = Atom>,
    ) -> Self {
        Situation {
            context,
            beliefs: beliefs.into_iter().collect(),
            intentions: intentions.into_iter().collect(),
        }
    }

    /// Builds a situation from string atoms, failing on the first malformed one.
    pub fn parse<'a>(
        context: &str,
        beliefs: impl IntoIterator<Item = &'a str>,
        intentions: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, CoreError> {
        Ok(Situation {
            context: ContextId::new(context)?,
            beliefs: beliefs.into_iter().map(Atom::new).collect::<Result<_, _>>()?,
            intentions: intentions
                .into_iter()
                .map(Atom::new)
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn context(&self) -> &ContextId {
        &self.context
    }

    pub fn beliefs(&self) -> &BTreeSet<Atom> {
        &self.beliefs
    }

    pub fn intentions(&self) -> &BTreeSet<Atom> {
        &self.intentions
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.beliefs.iter().chain(self.intentions.iter())
    }
}

/// Deontic strength of a directive. `Must` sorts before `Should`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Must,
    Should,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Must, Label::Should];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Must => "must",
            Label::Should => "should",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "must" => Ok(Label::Must),
            "should" => Ok(Label::Should),
            other => Err(CoreError::UnknownLabel(other.to_string())),
        }
    }
}

/// A labelled action, printed as `must-headlights_on`.
///
/// The derived ordering compares the label first, then the action name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionPair {
    pub label: Label,
    pub action: Atom,
}

impl ActionPair {
    pub fn new(label: Label, action: Atom) -> Self {
        ActionPair { label, action }
    }

    pub fn must(action: &str) -> Result<Self, CoreError> {
        Ok(ActionPair::new(Label::Must, Atom::new(action)?))
    }

    pub fn should(action: &str) -> Result<Self, CoreError> {
        Ok(ActionPair::new(Label::Should, Atom::new(action)?))
    }
}

impl fmt::Display for ActionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.label, self.action)
    }
}

impl FromStr for ActionPair {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (label, action) = s
            .split_once('-')
            .ok_or_else(|| CoreError::InvalidActionPair(s.to_string()))?;
        Ok(ActionPair::new(label.parse()?, Atom::new(action)?))
    }
}

impl Serialize for ActionPair {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ActionPair {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A named trigger situation with a non-empty set of action pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    name: String,
    trigger: Situation,
    action_pairs: BTreeSet<ActionPair>,
}

impl Rule {
    pub fn new(
        name: impl Into<String>,
        trigger: Situation,
        action_pairs: impl IntoIterator<Item = ActionPair>,
    ) -> Result<Self, CoreError> {
        let name = name.into();
        if Atom::new(name.as_str()).is_err() {
            return Err(CoreError::InvalidRuleName(name));
        }
        let action_pairs: BTreeSet<_> = action_pairs.into_iter().collect();
        if action_pairs.is_empty() {
            return Err(CoreError::EmptyActionPairs(name));
        }
        Ok(Rule {
            name,
            trigger,
            action_pairs,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn trigger(&self) -> &Situation {
        &self.trigger
    }

    pub fn context(&self) -> &ContextId {
        &self.trigger.context
    }

    pub fn beliefs(&self) -> &BTreeSet<Atom> {
        &self.trigger.beliefs
    }

    pub fn intentions(&self) -> &BTreeSet<Atom> {
        &self.trigger.intentions
    }

    /// The rule's action pairs.
    pub fn ap(&self) -> &BTreeSet<ActionPair> {
        &self.action_pairs
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.trigger
            .atoms()
            .chain(self.action_pairs.iter().map(|p| &p.action))
    }
}

/// True iff the rule shares the situation's context and its trigger beliefs
/// and intentions are subsets of the situation's.
pub fn is_applicable(situation: &Situation, rule: &Rule) -> bool {
    rule.context() == situation.context()
        && rule.beliefs().is_subset(situation.beliefs())
        && rule.intentions().is_subset(situation.intentions())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r226b() -> Rule {
        Rule::new(
            "r226b",
            Situation::parse("standard", ["visibilityClear"], []).unwrap(),
            [ActionPair::must("fog_lights_off").unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn applicable_when_trigger_is_subset() {
        let s = Situation::parse("standard", ["visibilityClear", "driving"], []).unwrap();
        assert!(is_applicable(&s, &r226b()));
    }

    #[test]
    fn not_applicable_on_empty_beliefs() {
        let rule = Rule::new(
            "fog",
            Situation::parse("standard", ["fog"], []).unwrap(),
            [ActionPair::must("headlights_on").unwrap()],
        )
        .unwrap();
        let s = Situation::parse("standard", [], []).unwrap();
        assert!(!is_applicable(&s, &rule));
    }

    #[test]
    fn context_mismatch_overrides_subset_match() {
        let s = Situation::parse("emergency", ["visibilityClear"], []).unwrap();
        assert!(!is_applicable(&s, &r226b()));
    }

    #[test]
    fn intentions_must_also_be_covered() {
        let rule = Rule::new(
            "r176",
            Situation::parse("standard", ["lightRed"], ["approachingTrafficLight"]).unwrap(),
            [ActionPair::must("stop_at_white_line").unwrap()],
        )
        .unwrap();
        let without = Situation::parse("standard", ["lightRed"], []).unwrap();
        let with =
            Situation::parse("standard", ["lightRed"], ["approachingTrafficLight"]).unwrap();
        assert!(!is_applicable(&without, &rule));
        assert!(is_applicable(&with, &rule));
    }

    #[test]
    fn action_pair_order_is_label_then_action() {
        let mut pairs: Vec<ActionPair> = ["should-a", "must-z", "must-b", "should-0x"]
            .iter()
            .filter_map(|s| s.parse().ok())
            .collect();
        pairs.sort();
        let shown: Vec<String> = pairs.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["must-b", "must-z", "should-a"]);
    }

    #[test]
    fn action_pair_parse_errors() {
        assert_eq!(
            "shall-stop".parse::<ActionPair>(),
            Err(CoreError::UnknownLabel("shall".into()))
        );
        assert!("muststop".parse::<ActionPair>().is_err());
        assert!("must-Stop".parse::<ActionPair>().is_err());
    }

    #[test]
    fn rule_requires_action_pairs() {
        let err = Rule::new("r1", Situation::parse("standard", [], []).unwrap(), []);
        assert_eq!(err, Err(CoreError::EmptyActionPairs("r1".into())));
    }

    #[test]
    fn same_action_with_both_labels_is_kept() {
        let rule = Rule::new(
            "both",
            Situation::parse("standard", [], []).unwrap(),
            [
                ActionPair::must("x").unwrap(),
                ActionPair::should("x").unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(rule.ap().len(), 2);
    }
}
