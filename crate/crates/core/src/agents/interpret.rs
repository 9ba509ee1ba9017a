//! Directive interpretation: what each corpus action atom forbids or requires
//! of a single simulator command.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::perception::stop_line_ahead;
use super::AgentError;
use crate::rule_core::{ActionPair, Atom};
use crate::simworld::{
    plan_move, Lamp, Lateral, Move, Observation, Pos, VehicleCommand,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// Do not pass over the nearest stop line ahead this step.
    ForbidCrossStopLine,
    /// Change left, whenever a safe change left exists.
    RequireChangeLeft,
    /// A change right needs the target lane clear for two cells behind.
    SafeChangeRight,
    /// No right turn across a cell an oncoming vehicle will reach within the gap.
    GiveWayOncoming,
    Lamp(Lamp, bool),
    RequireSlowDown,
    ForbidAccelerate,
    ForbidChangeRight,
    RequireStop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Meaning {
    /// No command-level content.
    Abstract,
    Constrains(Constraint),
}

/// Every action atom the interpreter knows.
pub const REGISTRY: &[(&str, Meaning)] = &[
    ("stop_at_white_line", Meaning::Constrains(Constraint::ForbidCrossStopLine)),
    ("return_to_left_lane", Meaning::Constrains(Constraint::RequireChangeLeft)),
    ("overtake_only_when_safe", Meaning::Constrains(Constraint::SafeChangeRight)),
    ("give_way_oncoming", Meaning::Constrains(Constraint::GiveWayOncoming)),
    ("headlights_on", Meaning::Constrains(Constraint::Lamp(Lamp::Headlights, true))),
    ("fog_lights_on", Meaning::Constrains(Constraint::Lamp(Lamp::FogLights, true))),
    ("fog_lights_off", Meaning::Constrains(Constraint::Lamp(Lamp::FogLights, false))),
    ("signal_left", Meaning::Constrains(Constraint::Lamp(Lamp::IndicatorLeft, true))),
    ("signal_right", Meaning::Constrains(Constraint::Lamp(Lamp::IndicatorRight, true))),
    ("reduce_speed", Meaning::Constrains(Constraint::RequireSlowDown)),
    ("increase_following_distance", Meaning::Constrains(Constraint::ForbidAccelerate)),
    ("not_overtake", Meaning::Constrains(Constraint::ForbidChangeRight)),
    ("stop_vehicle", Meaning::Constrains(Constraint::RequireStop)),
    ("consideration_others", Meaning::Abstract),
    ("drive_care_attention", Meaning::Abstract),
    ("not_drive_dangerously", Meaning::Abstract),
    ("proceed_with_care", Meaning::Abstract),
    ("ensure_seat_belts_worn", Meaning::Abstract),
    ("use_child_restraint", Meaning::Abstract),
    ("give_way_main_road", Meaning::Abstract),
    ("give_way_right", Meaning::Abstract),
    ("make_room_emergency_vehicle", Meaning::Abstract),
    ("not_park_near_junction", Meaning::Abstract),
    ("watch_for_pedestrians", Meaning::Abstract),
    ("warn_other_traffic", Meaning::Abstract),
];

pub fn meaning(action: &Atom) -> Option<Meaning> {
    REGISTRY
        .iter()
        .find(|(name, _)| *name == action.as_str())
        .map(|(_, m)| *m)
}

/// A directive with its command-level constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Directive {
    pub pair: ActionPair,
    pub constraint: Constraint,
}

/// Constraints for `pairs`; abstract actions contribute nothing.
pub fn interpret_directives(pairs: &[ActionPair]) -> Result<Vec<Directive>, AgentError> {
    let mut out = Vec::new();
    for pair in pairs {
        match meaning(&pair.action) {
            None => return Err(AgentError::Unregistered(pair.action.clone())),
            Some(Meaning::Abstract) => {}
            Some(Meaning::Constrains(constraint)) => out.push(Directive {
                pair: pair.clone(),
                constraint,
            }),
        }
    }
    Ok(out)
}

/// Where things are, or are about to be, from the observer's point of view:
/// the other vehicles' cells and the cells they would enter holding course.
#[derive(Debug, Clone)]
pub struct Scene<'a> {
    pub obs: &'a Observation,
    pub gap: usize,
    claimed: BTreeSet<Pos>,
}

impl<'a> Scene<'a> {
    pub fn new(obs: &'a Observation, gap: usize) -> Self {
        let mut claimed = BTreeSet::new();
        for v in obs.others() {
            claimed.insert(v.position);
            claimed.extend(plan_move(obs, v, &VehicleCommand::hold()).path);
        }
        Scene { obs, gap, claimed }
    }

    pub fn plan(&self, cmd: &VehicleCommand) -> Move {
        plan_move(self.obs, self.obs.me(), cmd)
    }

    /// Valid and sweeping no cell another vehicle holds or is about to enter.
    pub fn is_safe(&self, mv: &Move) -> bool {
        mv.valid && mv.path.iter().all(|p| !self.claimed.contains(p))
    }

    fn safe_change_left_exists(&self) -> bool {
        VehicleCommand::movements()
            .filter(|c| c.lateral == Lateral::ChangeLeft)
            .any(|c| self.is_safe(&self.plan(&c)))
    }

    fn oncoming_within_gap(&self, cell: Pos) -> bool {
        let me = self.obs.me();
        let dims = self.obs.dims;
        self.obs
            .others()
            .filter(|v| v.heading == me.heading.opposite())
            .any(|v| (0..=self.gap as i64).any(|k| dims.step(cell, v.heading, -k) == v.position))
    }

    fn rear_clear(&self, side_cell: Pos) -> bool {
        let me = self.obs.me();
        (0..=2).all(|k| {
            let p = self.obs.dims.step(side_cell, me.heading, -k);
            self.obs.vehicle_at(p).is_none_or(|v| v.id == me.id)
        })
    }

    /// Whether executing `cmd` from this scene satisfies `constraint`.
    pub fn admits(&self, constraint: Constraint, cmd: &VehicleCommand) -> bool {
        let me = self.obs.me();
        let mv = self.plan(cmd);
        let next_speed = cmd.longitudinal.apply(me.speed, me.max_speed);
        match constraint {
            Constraint::ForbidCrossStopLine => {
                stop_line_ahead(self.obs).is_none_or(|line| !mv.crosses(line))
            }
            Constraint::RequireChangeLeft => {
                cmd.lateral == Lateral::ChangeLeft || !self.safe_change_left_exists()
            }
            Constraint::SafeChangeRight => {
                cmd.lateral != Lateral::ChangeRight
                    || mv.path.first().is_some_and(|side| self.rear_clear(*side))
            }
            Constraint::GiveWayOncoming => {
                cmd.lateral != Lateral::TurnRight
                    || !mv.path.iter().any(|c| self.oncoming_within_gap(*c))
            }
            Constraint::Lamp(lamp, on) => me.lamps.with(&cmd.lamps).get(lamp) == on,
            Constraint::RequireSlowDown => next_speed < me.speed || next_speed == 0,
            Constraint::ForbidAccelerate => next_speed <= me.speed,
            Constraint::ForbidChangeRight => cmd.lateral != Lateral::ChangeRight,
            Constraint::RequireStop => !mv.moves(),
        }
    }
}
