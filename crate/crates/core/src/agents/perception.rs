//! Observation to Situation. Each extractor is a named predicate; an atom is
//! reported iff its predicate holds on what the vehicle can see.

use crate::rule_core::{Atom, ContextId, Situation};
use crate::simworld::{
    CellView, Goal, Heading, Lateral, Observation, Phase, Pos, VehicleState, Visibility,
};

/// What an extractor may look at: the observation and the route goal.
pub struct Percept<'a> {
    pub obs: &'a Observation,
    pub goal: &'a Goal,
}

impl Percept<'_> {
    fn me(&self) -> &VehicleState {
        self.obs.me()
    }

    /// (forward, rightward) offset of `p` from the observer.
    fn frame(&self, p: Pos) -> (i64, i64) {
        let me = self.me();
        self.obs.dims.frame(me.position, me.heading, p)
    }

    fn lane_index(&self) -> u8 {
        self.obs
            .cell(self.me().position)
            .and_then(|c| c.lane_index)
            .unwrap_or(0)
    }

    fn ahead(&self, k: usize) -> Pos {
        let me = self.me();
        self.obs.dims.step(me.position, me.heading, k as i64)
    }

    fn same_direction_lane_on(&self, side: Heading) -> bool {
        let me = self.me();
        self.obs.runs(self.obs.dims.step(me.position, side, 1), me.heading)
    }
}

/// Nearest visible stop line ahead in the observer's lane, for its heading.
pub fn stop_line_ahead(obs: &Observation) -> Option<Pos> {
    let me = obs.me();
    (0..=obs.radius)
        .map(|k| obs.dims.step(me.position, me.heading, k as i64))
        .take_while(|p| obs.runs(*p, me.heading))
        .find(|p| obs.is_stop_line(*p, me.heading))
}

fn light_ahead(p: &Percept) -> Option<Phase> {
    stop_line_ahead(p.obs).and_then(|line| p.obs.phase_at(line))
}

fn slow_vehicle_ahead(p: &Percept) -> bool {
    let me = p.me();
    p.obs.others().any(|v| {
        let (fwd, right) = p.frame(v.position);
        v.heading == me.heading && right == 0 && fwd > 0 && v.max_speed < me.max_speed
    })
}

fn oncoming_traffic(p: &Percept) -> bool {
    let me = p.me();
    p.obs
        .others()
        .any(|v| v.heading == me.heading.opposite() && p.frame(v.position).0 >= 0)
}

fn in_right_lane(p: &Percept) -> bool {
    p.lane_index() > 0
}

fn overtake_complete(p: &Percept) -> bool {
    let me = p.me();
    in_right_lane(p)
        && p.obs.others().any(|v| {
            let (fwd, right) = p.frame(v.position);
            v.heading == me.heading && right == -1 && fwd < 0
        })
}

fn approaching_junction(p: &Percept) -> bool {
    (0..=p.obs.radius)
        .map(|k| p.ahead(k))
        .take_while(|q| p.obs.runs(*q, p.me().heading))
        .any(|q| p.obs.cell(q).is_some_and(|c| c.junction))
}

fn intend_overtake(p: &Percept) -> bool {
    slow_vehicle_ahead(p) && p.same_direction_lane_on(p.me().heading.right())
}

fn intend_turn_right(p: &Percept) -> bool {
    p.goal
        .route(p.obs, p.me().position, p.obs.radius)
        .contains(&Lateral::TurnRight)
}

pub type Extractor = fn(&Percept) -> bool;

/// Named belief and intention extractors.
pub struct PerceptionMap {
    pub beliefs: Vec<(&'static str, Extractor)>,
    pub intentions: Vec<(&'static str, Extractor)>,
}

impl PerceptionMap {
    pub fn standard() -> Self {
        PerceptionMap {
            beliefs: vec![
                ("driving", |_| true),
                ("visibilityClear", |p| p.obs.visibility == Visibility::Clear),
                ("visibilitySeriouslyReduced", |p| {
                    p.obs.visibility == Visibility::SeriouslyReduced
                }),
                ("headlights_on", |p| p.me().lamps.headlights),
                ("fog_lights_on", |p| p.me().lamps.fog_lights),
                ("lightRed", |p| light_ahead(p) == Some(Phase::Red)),
                ("lightRedAmber", |p| light_ahead(p) == Some(Phase::RedAmber)),
                ("lightGreen", |p| light_ahead(p) == Some(Phase::Green)),
                ("lightAmber", |p| light_ahead(p) == Some(Phase::Amber)),
                ("slowVehicleAhead", slow_vehicle_ahead),
                ("oncomingTraffic", oncoming_traffic),
                ("inRightLane", in_right_lane),
                ("overtakeComplete", overtake_complete),
                ("approachingJunction", approaching_junction),
            ],
            intentions: vec![
                ("approachingTrafficLight", |p| light_ahead(p).is_some()),
                ("intendOvertake", intend_overtake),
                ("intendTurnRight", intend_turn_right),
            ],
        }
    }

    /// Every atom this map can emit.
    pub fn atoms(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.beliefs
            .iter()
            .chain(&self.intentions)
            .map(|(name, _)| *name)
    }

    pub fn perceive(&self, obs: &Observation, goal: &Goal) -> Situation {
        let percept = Percept { obs, goal };
        let pick = |list: &[(&'static str, Extractor)]| -> Vec<Atom> {
            list.iter()
                .filter(|(_, f)| f(&percept))
                .map(|(name, _)| Atom::new(*name).expect("extractor names are valid atoms"))
                .collect()
        };
        Situation::new(
            ContextId::standard(),
            pick(&self.beliefs),
            pick(&self.intentions),
        )
    }
}

pub fn perceive(obs: &Observation, goal: &Goal) -> Situation {
    PerceptionMap::standard().perceive(obs, goal)
}
