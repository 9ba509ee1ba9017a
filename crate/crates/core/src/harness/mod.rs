//! Scenario runs with an external compliance monitor, JSON-lines traces and
//! driving-test verdicts.

mod monitor;
mod trace;
mod verdict;

pub use monitor::Monitor;
pub use trace::{corpus_digest, emit_trace, TraceHeader, SCHEMA_VERSION};
pub use verdict::{judge, FailReason, ScenarioVerdict, Verdict};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::agents::{Agent, AgentError, PolicyKind};
use crate::rule_core::{ActionPair, Label, RuleBase, Situation};
use crate::simworld::{
    load_scenario, scripted_command, Heading, Lamps, Pos, Scenario, SimError, SimEvent,
    VehicleCommand, VehicleState,
};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("traces do not cover scenario(s): {}", .0.join(", "))]
    IncompleteCoverage(Vec<String>),
    #[error("traces mix agents {0} and {1}")]
    MixedAgents(PolicyKind, PolicyKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    GoalReached,
    StepLimit,
    CollisionFault,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::GoalReached => "goal_reached",
            Outcome::StepLimit => "step_limit",
            Outcome::CollisionFault => "collision_fault",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub step: u64,
    pub pair: ActionPair,
    /// Rules that produced the pair for the reported situation.
    pub rules: Vec<String>,
    pub severity: Label,
}

/// One simulation step as seen by the subject and the monitor. Position,
/// speed and lamps are taken before the command executes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub position: Pos,
    pub heading: Heading,
    pub speed: u8,
    pub lamps: Lamps,
    /// Other vehicles inside the subject's observation window.
    pub observed: Vec<VehicleState>,
    pub situation: Situation,
    pub directives: Vec<ActionPair>,
    pub accepted: Vec<ActionPair>,
    pub command: VehicleCommand,
    pub violations: Vec<Violation>,
    pub events: Vec<SimEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioTrace {
    pub header: TraceHeader,
    pub steps: Vec<StepRecord>,
    pub outcome: Outcome,
    /// ASCII frames before each step and after the last, when requested.
    pub frames: Vec<String>,
}

impl ScenarioTrace {
    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.steps.iter().flat_map(|s| s.violations.iter())
    }

    pub fn count(&self, severity: Label) -> usize {
        self.violations().filter(|v| v.severity == severity).count()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Overrides the scenario's step limit.
    pub step_limit: Option<u32>,
    pub frames: bool,
}

pub fn run_test(
    kind: PolicyKind,
    scenario: &str,
    seed: u64,
    rules: &RuleBase,
) -> Result<ScenarioTrace, HarnessError> {
    run_with(kind, scenario, seed, rules, RunOptions::default())
}

pub fn run_with(
    kind: PolicyKind,
    scenario: &str,
    seed: u64,
    rules: &RuleBase,
    options: RunOptions,
) -> Result<ScenarioTrace, HarnessError> {
    let scenario = load_scenario(scenario, seed)?;
    run_scenario(kind, &scenario, rules, options)
}

pub fn run_scenario(
    kind: PolicyKind,
    scenario: &Scenario,
    rules: &RuleBase,
    options: RunOptions,
) -> Result<ScenarioTrace, HarnessError> {
    let agent = Agent::new(kind, rules, scenario.gap);
    let monitor = Monitor::new(rules, scenario.gap);
    let limit = options.step_limit.unwrap_or(scenario.step_limit);
    let header = TraceHeader {
        schema: SCHEMA_VERSION,
        scenario: scenario.name.clone(),
        agent: kind,
        seed: scenario.seed,
        corpus_digest: corpus_digest(rules),
    };
    let mut world = scenario.world.clone();
    let mut steps = Vec::new();
    let mut frames = Vec::new();
    let at_goal = |w: &crate::simworld::World| {
        w.vehicle(scenario.subject)
            .is_some_and(|v| scenario.goal.reached(v.position))
    };

    let mut outcome = Outcome::StepLimit;
    if at_goal(&world) {
        outcome = Outcome::GoalReached;
    }
    while outcome == Outcome::StepLimit && world.step_number() < u64::from(limit) {
        if options.frames {
            frames.push(world.render());
        }
        let obs = world.observe(scenario.subject, scenario.radius)?;
        let (command, record) = agent.decide(&obs, &scenario.goal)?;
        let (_, violations) = monitor.check(&world, scenario, &record.situation, &command)?;

        let mut commands = BTreeMap::new();
        for id in world.vehicles().keys() {
            let cmd = if *id == scenario.subject {
                command.clone()
            } else {
                scripted_command(&world, *id)
            };
            commands.insert(*id, cmd);
        }
        let result = world.step(&commands)?;
        let me = obs.me();
        steps.push(StepRecord {
            step: world.step_number(),
            position: me.position,
            heading: me.heading,
            speed: me.speed,
            lamps: me.lamps,
            observed: obs.others().cloned().collect(),
            situation: record.situation,
            directives: record.directives,
            accepted: record.accepted,
            command,
            violations,
            events: result.events.clone(),
        });
        let collided = result.collided();
        world = result.world;
        if collided {
            outcome = Outcome::CollisionFault;
        } else if at_goal(&world) {
            outcome = Outcome::GoalReached;
        }
    }
    if options.frames {
        frames.push(world.render());
    }
    Ok(ScenarioTrace {
        header,
        steps,
        outcome,
        frames,
    })
}
