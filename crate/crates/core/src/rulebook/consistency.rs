//! Offline detection of co-derivable contradictory `must` directives.
//!
//! Two rules conflict when they share a context and one requires `x` while the
//! other requires `not_x` (or an atom declared `exclusive` with `x`), both at
//! `must` strength. Trigger atoms are independent, so the union of the two
//! triggers always witnesses joint applicability.

use std::fmt;

use serde::Serialize;

use crate::rule_core::{Atom, Label, Rule, RuleBase, Situation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub rule_a: String,
    pub rule_b: String,
    /// Action required by `rule_a`.
    pub action: Atom,
    /// Contradicting action required by `rule_b`.
    pub opposing: Atom,
    /// A situation in which both rules are applicable.
    pub witness: Situation,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ConsistencyReport {
    pub conflicts: Vec<Conflict>,
    /// Pairs of rules with identical triggers and action pairs.
    pub duplicates: Vec<(String, String)>,
}

impl ConsistencyReport {
    pub fn is_clean(&self) -> bool {
        self.conflicts.is_empty()
    }
}

fn witness(a: &Rule, b: &Rule) -> Situation {
    Situation {
        context: a.context().clone(),
        beliefs: a.beliefs().union(b.beliefs()).cloned().collect(),
        intentions: a.intentions().union(b.intentions()).cloned().collect(),
    }
}

fn contradicts(rb: &RuleBase, x: &Atom, y: &Atom) -> bool {
    x.negation() == *y || rb.are_exclusive(x, y)
}

pub fn check_consistency(rb: &RuleBase) -> ConsistencyReport {
    let mut report = ConsistencyReport::default();
    for context in rb.contexts() {
        let rules: Vec<&Rule> = rb.rules_in_context(context).collect();
        for (i, a) in rules.iter().enumerate() {
            for b in &rules[i + 1..] {
                if a.trigger() == b.trigger() && a.ap() == b.ap() {
                    report
                        .duplicates
                        .push((a.name().to_string(), b.name().to_string()));
                }
                let musts_a = a.ap().iter().filter(|p| p.label == Label::Must);
                for pa in musts_a {
                    for pb in b.ap().iter().filter(|p| p.label == Label::Must) {
                        if contradicts(rb, &pa.action, &pb.action) {
                            report.conflicts.push(Conflict {
                                rule_a: a.name().to_string(),
                                rule_b: b.name().to_string(),
                                action: pa.action.clone(),
                                opposing: pb.action.clone(),
                                witness: witness(a, b),
                            });
                        }
                    }
                }
            }
        }
    }
    report
}

fn list(atoms: &std::collections::BTreeSet<Atom>) -> String {
    atoms.iter().map(Atom::as_str).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "conflicts: {}", self.conflicts.len())?;
        for c in &self.conflicts {
            writeln!(
                f,
                "  {} must-{} <> {} must-{} witness ({}, [{}], [{}])",
                c.rule_a,
                c.action,
                c.rule_b,
                c.opposing,
                c.witness.context,
                list(&c.witness.beliefs),
                list(&c.witness.intentions)
            )?;
        }
        writeln!(f, "duplicates: {}", self.duplicates.len())?;
        for (a, b) in &self.duplicates {
            writeln!(f, "  {a} == {b}")?;
        }
        Ok(())
    }
}
