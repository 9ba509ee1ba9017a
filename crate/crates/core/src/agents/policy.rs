use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::interpret::{interpret_directives, Constraint, Directive, Scene};
use super::perception::PerceptionMap;
use super::AgentError;
use crate::rule_core::{ActionPair, Label, RuleBase, Situation};
use crate::simworld::{
    plan_move, Goal, Lamp, Observation, VehicleCommand,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Reactive,
    MorallyBankrupt,
    Proactive,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [
        PolicyKind::Reactive,
        PolicyKind::MorallyBankrupt,
        PolicyKind::Proactive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Reactive => "reactive",
            PolicyKind::MorallyBankrupt => "morally_bankrupt",
            PolicyKind::Proactive => "proactive",
        }
    }

    pub fn filter(self) -> DirectiveFilter {
        match self {
            PolicyKind::MorallyBankrupt => DirectiveFilter::new([Label::Must]),
            PolicyKind::Reactive | PolicyKind::Proactive => {
                DirectiveFilter::new([Label::Must, Label::Should])
            }
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = AgentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| AgentError::UnknownPolicy(s.to_string()))
    }
}

/// Labels an agent obeys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectiveFilter {
    labels: BTreeSet<Label>,
}

impl DirectiveFilter {
    pub fn new(labels: impl IntoIterator<Item = Label>) -> Self {
        let labels: BTreeSet<Label> = labels.into_iter().collect();
        assert!(!labels.is_empty(), "a directive filter accepts at least one label");
        DirectiveFilter { labels }
    }

    pub fn accepts(&self, pair: &ActionPair) -> bool {
        self.labels.contains(&pair.label)
    }

    pub fn apply(&self, pairs: &[ActionPair]) -> Vec<ActionPair> {
        pairs.iter().filter(|p| self.accepts(p)).cloned().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub situation: Situation,
    pub directives: Vec<ActionPair>,
    pub accepted: Vec<ActionPair>,
    pub command: VehicleCommand,
    /// Directives for the one-step prediction (proactive only). Kept out of
    /// traces so that they describe behaviour, not deliberation.
    #[serde(skip)]
    pub predicted: Option<Vec<ActionPair>>,
}

/// A subject-vehicle driver: perceives, queries the rule base, obeys the
/// directives its policy accepts, and otherwise heads for the goal greedily.
pub struct Agent<'a> {
    pub kind: PolicyKind,
    pub rules: &'a RuleBase,
    pub perception: PerceptionMap,
    pub gap: usize,
}

impl<'a> Agent<'a> {
    pub fn new(kind: PolicyKind, rules: &'a RuleBase, gap: usize) -> Self {
        Agent {
            kind,
            rules,
            perception: PerceptionMap::standard(),
            gap,
        }
    }

    pub fn decide(
        &self,
        obs: &Observation,
        goal: &Goal,
    ) -> Result<(VehicleCommand, DecisionRecord), AgentError> {
        let situation = self.perception.perceive(obs, goal);
        let directives = self.rules.recommended(&situation);
        let accepted = self.kind.filter().apply(&directives);
        let constraints = interpret_directives(&accepted)?;
        let scene = Scene::new(obs, self.gap);
        let ranked = ranked_commands(&scene, goal, &constraints);

        let mut predicted = None;
        let mut choice = ranked.first().cloned();
        if self.kind == PolicyKind::Proactive {
            choice = None;
            for cmd in &ranked {
                let next = predict(obs, cmd);
                let next_situation = self.perception.perceive(&next, goal);
                let next_accepted = self
                    .kind
                    .filter()
                    .apply(&self.rules.recommended(&next_situation));
                let next_constraints = interpret_directives(&next_accepted)?;
                let feasible =
                    !ranked_commands(&Scene::new(&next, self.gap), goal, &next_constraints).is_empty();
                if predicted.is_none() || feasible {
                    predicted = Some(next_accepted);
                }
                if feasible {
                    choice = Some(cmd.clone());
                    break;
                }
            }
            if choice.is_none() {
                choice = ranked.first().cloned();
            }
        }

        let mut command = choice.unwrap_or_else(VehicleCommand::stop);
        for (lamp, on) in lamp_settings(&constraints) {
            if obs.me().lamps.get(lamp) != on {
                command.lamps.insert(lamp, on);
            }
        }
        let record = DecisionRecord {
            situation,
            directives,
            accepted,
            command: command.clone(),
            predicted,
        };
        Ok((command, record))
    }
}

/// Lamp states demanded by the constraints; the first (most binding, as
/// directives sort `must` first) assignment per lamp wins.
fn lamp_settings(constraints: &[Directive]) -> Vec<(Lamp, bool)> {
    let mut seen = BTreeSet::new();
    constraints
        .iter()
        .filter_map(|d| match d.constraint {
            Constraint::Lamp(lamp, on) if seen.insert(lamp) => Some((lamp, on)),
            _ => None,
        })
        .collect()
}

/// Safe movement commands meeting every non-lamp constraint, best first:
/// nearest to the goal, then lane-keeping, then least speed change.
pub fn ranked_commands(scene: &Scene, goal: &Goal, constraints: &[Directive]) -> Vec<VehicleCommand> {
    let me = scene.obs.me();
    let mut ranked: Vec<(u32, VehicleCommand)> = VehicleCommand::movements()
        .filter_map(|cmd| {
            let mv = scene.plan(&cmd);
            if !scene.is_safe(&mv) {
                return None;
            }
            let ok = constraints
                .iter()
                .filter(|d| !matches!(d.constraint, Constraint::Lamp(..)))
                .all(|d| scene.admits(d.constraint, &cmd));
            ok.then(|| (goal.distance(mv.target()), cmd))
        })
        .collect();
    ranked.sort_by_key(|(dist, cmd)| {
        let next = cmd.longitudinal.apply(me.speed, me.max_speed);
        (*dist, cmd.lateral, next.abs_diff(me.speed), cmd.longitudinal)
    });
    ranked.into_iter().map(|(_, cmd)| cmd).collect()
}

/// The observation one step on, assuming `cmd` for the observer and that
/// everyone else holds course. Cells and light phases are left as seen.
pub fn predict(obs: &Observation, cmd: &VehicleCommand) -> Observation {
    let mut next = obs.clone();
    next.step += 1;
    next.vehicles.clear();
    for v in obs.vehicles.values() {
        let own = v.id == obs.observer;
        let c = if own { cmd.clone() } else { VehicleCommand::hold() };
        let mv = plan_move(obs, v, &c);
        let mut moved = v.clone();
        moved.position = mv.target();
        moved.heading = mv.heading;
        moved.speed = mv.speed;
        if own {
            moved.lamps = v.lamps.with(&cmd.lamps);
            next.center = moved.position;
        }
        if own || obs.sees(moved.position) {
            next.vehicles.insert(moved.id, moved);
        }
    }
    next
}
