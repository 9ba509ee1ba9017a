use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::{ScenarioTrace, StepRecord};
use crate::agents::PolicyKind;
use crate::rule_core::{Label, RuleBase};
use crate::rulebook::serialize_rulebase;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub schema: u32,
    pub scenario: String,
    pub agent: PolicyKind,
    pub seed: u64,
    pub corpus_digest: String,
}

/// SHA-256 of the canonical serialization, so reordered but equal corpora match.
pub fn corpus_digest(rules: &RuleBase) -> String {
    hex::encode(Sha256::digest(serialize_rulebase(rules).as_bytes()))
}

fn tagged(record: &str, body: impl Serialize) -> Value {
    let mut value = serde_json::to_value(body).expect("trace records serialize");
    let map = value.as_object_mut().expect("trace records are objects");
    let mut out = serde_json::Map::new();
    out.insert("record".into(), Value::String(record.into()));
    out.append(map);
    Value::Object(out)
}

/// JSON lines: header, one record per step, outcome.
pub fn emit_trace(trace: &ScenarioTrace) -> String {
    let mut lines = vec![tagged("header", &trace.header)];
    lines.extend(trace.steps.iter().map(|s: &StepRecord| tagged("step", s)));
    lines.push(json!({
        "record": "outcome",
        "outcome": trace.outcome,
        "steps": trace.steps.len(),
        "must_violations": trace.count(Label::Must),
        "should_violations": trace.count(Label::Should),
    }));
    let mut out = String::new();
    for line in lines {
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}
