use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;

use super::{HarnessError, Outcome, ScenarioTrace, Violation};
use crate::agents::PolicyKind;
use crate::simworld::SCENARIO_NAMES;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailReason {
    Violation(Violation),
    Outcome { outcome: Outcome },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioVerdict {
    pub scenario: String,
    pub seed: u64,
    pub outcome: Outcome,
    pub steps: usize,
    pub must_violations: usize,
    pub should_violations: usize,
    pub pass: bool,
    pub reasons: Vec<FailReason>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub agent: PolicyKind,
    pub scenarios: Vec<ScenarioVerdict>,
    pub pass: bool,
}

/// Pass iff every scenario reached its goal with no violation of either severity.
pub fn judge(traces: &[ScenarioTrace]) -> Result<Verdict, HarnessError> {
    let agent = match traces.first() {
        Some(t) => t.header.agent,
        None => {
            return Err(HarnessError::IncompleteCoverage(
                SCENARIO_NAMES.iter().map(|s| s.to_string()).collect(),
            ))
        }
    };
    if let Some(other) = traces.iter().find(|t| t.header.agent != agent) {
        return Err(HarnessError::MixedAgents(agent, other.header.agent));
    }
    let missing: Vec<String> = SCENARIO_NAMES
        .iter()
        .filter(|name| !traces.iter().any(|t| t.header.scenario == **name))
        .map(|s| s.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(HarnessError::IncompleteCoverage(missing));
    }

    let scenarios: Vec<ScenarioVerdict> = traces
        .iter()
        .map(|t| {
            let mut reasons: Vec<FailReason> =
                t.violations().cloned().map(FailReason::Violation).collect();
            if t.outcome != Outcome::GoalReached {
                reasons.push(FailReason::Outcome { outcome: t.outcome });
            }
            ScenarioVerdict {
                scenario: t.header.scenario.clone(),
                seed: t.header.seed,
                outcome: t.outcome,
                steps: t.steps.len(),
                must_violations: t.count(crate::rule_core::Label::Must),
                should_violations: t.count(crate::rule_core::Label::Should),
                pass: reasons.is_empty(),
                reasons,
            }
        })
        .collect();
    let pass = scenarios.iter().all(|s| s.pass);
    Ok(Verdict {
        agent,
        scenarios,
        pass,
    })
}

impl Verdict {
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16} {:<14} {:>6} {:>6} {:>7}  result",
            "scenario", "outcome", "steps", "must", "should"
        );
        for s in &self.scenarios {
            let _ = writeln!(
                out,
                "{:<16} {:<14} {:>6} {:>6} {:>7}  {}",
                s.scenario,
                s.outcome.as_str(),
                s.steps,
                s.must_violations,
                s.should_violations,
                if s.pass { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(
            out,
            "agent {}: {}",
            self.agent,
            if self.pass { "PASS" } else { "FAIL" }
        );
        out
    }

    /// Distinct failure reasons, one line each, in scenario order.
    pub fn reason_lines(&self) -> Vec<String> {
        let mut lines = Vec::new();
        for s in &self.scenarios {
            for r in &s.reasons {
                let line = match r {
                    FailReason::Violation(v) => format!(
                        "{}: {} violated ({})",
                        s.scenario,
                        v.pair,
                        v.rules.join(", ")
                    ),
                    FailReason::Outcome { outcome } => {
                        format!("{}: outcome {}", s.scenario, outcome.as_str())
                    }
                };
                if !lines.contains(&line) {
                    lines.push(line);
                }
            }
        }
        lines
    }

    pub fn summary_json(&self) -> serde_json::Value {
        json!({
            "record": "verdict",
            "agent": self.agent,
            "pass": self.pass,
            "scenarios": self.scenarios.iter().map(|s| json!({
                "scenario": s.scenario,
                "seed": s.seed,
                "outcome": s.outcome,
                "steps": s.steps,
                "must_violations": s.must_violations,
                "should_violations": s.should_violations,
                "pass": s.pass,
            })).collect::<Vec<_>>(),
            "reasons": self.reason_lines(),
        })
    }
}
