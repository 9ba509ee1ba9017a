//! Scenario map files and seeded world construction.
//!
//! A map file is a `key: value` header, a `---` separator, then one row of
//! whitespace-separated cell tokens per grid row. A token starts with `.`
//! (off-road) or a lane arrow `^ > v <`, followed by any of:
//!
//! | modifier | meaning |
//! |----------|---------|
//! | `2`      | second lane (lane index 1) |
//! | `L`      | stop line for traffic in the lane direction |
//! | `T<id>`  | cell controlled by traffic light `<id>` |
//! | `J`      | junction: turns may start here |
//! | `S`      | subject start |
//! | `C`      | scripted traffic start |
//! | `G`      | goal cell |
//!
//! Header keys: `name`, `size <w> <h>`, `steps`, `radius`, `gap`,
//! `traffic <speed> <jitter>`, `light <id> <red> <red_amber> <green> <amber> <offset> <jitter>`,
//! `visibility clear|reduced`. The seed shifts traffic starts forward by up
//! to `jitter` cells and light offsets by up to the light's jitter.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::geometry::{Dims, Heading, Pos};
use super::grid::{Cell, CellView, GridMap};
use super::light::{LightId, Phase, TrafficLight, DEFAULT_DURATIONS};
use super::vehicle::{
    plan_move, Lamps, Lateral, Longitudinal, VehicleCommand, VehicleId, VehicleKind,
    VehicleState,
};
use super::world::{Visibility, World};
use super::SimError;

pub const SCENARIO_NAMES: [&str; 3] = ["traffic_light", "overtake", "right_turn"];

pub const DEFAULT_RADIUS: usize = 4;
pub const DEFAULT_GAP: usize = 4;
pub const DEFAULT_STEP_LIMIT: u32 = 200;
pub const SUBJECT_MAX_SPEED: u8 = 2;
pub const SUBJECT_ID: VehicleId = VehicleId(0);

pub fn scenario_text(name: &str) -> Option<&'static str> {
    match name {
        "traffic_light" => Some(include_str!("../../scenarios/traffic_light.map")),
        "overtake" => Some(include_str!("../../scenarios/overtake.map")),
        "right_turn" => Some(include_str!("../../scenarios/right_turn.map")),
        _ => None,
    }
}

/// Shortest number of unit moves from each cell to the nearest goal cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceField {
    dims: Dims,
    dist: Vec<u32>,
}

impl DistanceField {
    pub const UNREACHABLE: u32 = u32::MAX;

    pub fn compute(map: &GridMap, goals: &BTreeSet<Pos>) -> Self {
        let dims = map.dims();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); dims.cell_count()];
        for p in map.positions() {
            for q in unit_successors(map, p) {
                preds[dims.index(q)].push(dims.index(p));
            }
        }
        let mut dist = vec![Self::UNREACHABLE; dims.cell_count()];
        let mut queue = VecDeque::new();
        for g in goals {
            dist[dims.index(*g)] = 0;
            queue.push_back(dims.index(*g));
        }
        while let Some(i) = queue.pop_front() {
            for &j in &preds[i] {
                if dist[j] == Self::UNREACHABLE {
                    dist[j] = dist[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        DistanceField { dims, dist }
    }

    pub fn distance(&self, p: Pos) -> u32 {
        self.dist[self.dims.index(p)]
    }
}

/// One-step moves available from a lane cell: ahead, sideways into a parallel
/// lane, or a turn at a junction. Each is a single route edge.
pub fn unit_moves(view: &impl CellView, p: Pos) -> Vec<(Lateral, Pos)> {
    let Some(heading) = view.cell(p).and_then(|c| c.lane_direction) else {
        return Vec::new();
    };
    let probe = VehicleState {
        id: VehicleId(u32::MAX),
        position: p,
        heading,
        speed: 1,
        max_speed: 1,
        lamps: Lamps::default(),
        kind: VehicleKind::Traffic,
    };
    let options = [
        (Longitudinal::Hold, Lateral::Keep),
        (Longitudinal::Stop, Lateral::ChangeLeft),
        (Longitudinal::Stop, Lateral::ChangeRight),
        (Longitudinal::Hold, Lateral::TurnLeft),
        (Longitudinal::Hold, Lateral::TurnRight),
    ];
    options
        .into_iter()
        .filter_map(|(lon, lat)| {
            let mv = plan_move(view, &probe, &VehicleCommand::new(lon, lat));
            (mv.valid && mv.moves()).then(|| (lat, mv.target()))
        })
        .collect()
}

fn unit_successors(map: &GridMap, p: Pos) -> Vec<Pos> {
    unit_moves(map, p).into_iter().map(|(_, q)| q).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goal {
    pub targets: BTreeSet<Pos>,
    pub field: Arc<DistanceField>,
}

impl Goal {
    pub fn new(map: &GridMap, targets: BTreeSet<Pos>) -> Self {
        let field = Arc::new(DistanceField::compute(map, &targets));
        Goal { targets, field }
    }

    pub fn reached(&self, p: Pos) -> bool {
        self.targets.contains(&p)
    }

    pub fn distance(&self, p: Pos) -> u32 {
        self.field.distance(p)
    }

    /// Laterals along the greedy shortest route from `p`, up to `limit` edges.
    pub fn route(&self, view: &impl CellView, mut p: Pos, limit: usize) -> Vec<Lateral> {
        let mut out = Vec::new();
        for _ in 0..limit {
            if self.reached(p) {
                break;
            }
            let here = self.distance(p);
            let best = unit_moves(view, p)
                .into_iter()
                .filter(|(_, q)| self.distance(*q) < here)
                .min_by_key(|(_, q)| self.distance(*q));
            match best {
                Some((lat, q)) => {
                    out.push(lat);
                    p = q;
                }
                None => break,
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct LightPlan {
    id: LightId,
    durations: [u32; 4],
    offset: u32,
    jitter: u32,
}

/// A parsed map file, before seeding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioTemplate {
    pub name: String,
    pub map: GridMap,
    pub step_limit: u32,
    pub radius: usize,
    pub gap: usize,
    pub traffic_speed: u8,
    pub traffic_jitter: u32,
    pub visibility: Visibility,
    lights: Vec<LightPlan>,
    light_cells: BTreeMap<LightId, Vec<Pos>>,
    subject_start: Pos,
    traffic_starts: Vec<Pos>,
    goals: BTreeSet<Pos>,
}

/// A seeded, ready-to-run scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub world: World,
    pub subject: VehicleId,
    pub goal: Goal,
    pub step_limit: u32,
    pub radius: usize,
    pub gap: usize,
}

fn bad(line: usize, msg: impl Into<String>) -> SimError {
    SimError::MapParse {
        line,
        reason: msg.into(),
    }
}

fn numbers<T: std::str::FromStr>(line: usize, value: &str, count: usize) -> Result<Vec<T>, SimError> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != count {
        return Err(bad(line, format!("expected {count} number(s), found `{value}`")));
    }
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| bad(line, format!("not a number: `{p}`"))))
        .collect()
}

pub fn parse_scenario(text: &str) -> Result<ScenarioTemplate, SimError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut name = None;
    let mut dims = None;
    let mut step_limit = DEFAULT_STEP_LIMIT;
    let mut radius = DEFAULT_RADIUS;
    let mut gap = DEFAULT_GAP;
    let mut traffic_speed = 1u8;
    let mut traffic_jitter = 0u32;
    let mut visibility = Visibility::Clear;
    let mut lights = Vec::new();

    for (lineno, raw) in lines.by_ref() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "---" {
            break;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| bad(lineno, "expected `key: value` or `---`"))?;
        let value = value.trim();
        match key.trim() {
            "name" => name = Some(value.to_string()),
            "size" => {
                let v: Vec<usize> = numbers(lineno, value, 2)?;
                if v[0] == 0 || v[1] == 0 {
                    return Err(bad(lineno, "size must be positive"));
                }
                dims = Some(Dims::new(v[0], v[1]));
            }
            "steps" => step_limit = numbers(lineno, value, 1)?[0],
            "radius" => radius = numbers(lineno, value, 1)?[0],
            "gap" => gap = numbers(lineno, value, 1)?[0],
            "traffic" => {
                let v: Vec<u32> = numbers(lineno, value, 2)?;
                traffic_speed = u8::try_from(v[0]).map_err(|_| bad(lineno, "traffic speed too large"))?;
                traffic_jitter = v[1];
            }
            "light" => {
                let v: Vec<u32> = numbers(lineno, value, 7)?;
                let durations = [v[1], v[2], v[3], v[4]];
                if durations.contains(&0) {
                    return Err(bad(lineno, "light phase durations must be >= 1"));
                }
                lights.push(LightPlan {
                    id: LightId(v[0]),
                    durations,
                    offset: v[5],
                    jitter: v[6],
                });
            }
            "visibility" => {
                visibility = match value {
                    "clear" => Visibility::Clear,
                    "reduced" => Visibility::SeriouslyReduced,
                    other => return Err(bad(lineno, format!("unknown visibility `{other}`"))),
                }
            }
            other => return Err(bad(lineno, format!("unknown header key `{other}`"))),
        }
    }

    let dims = dims.ok_or_else(|| bad(0, "missing `size` header"))?;
    let name = name.ok_or_else(|| bad(0, "missing `name` header"))?;
    let mut cells = Vec::with_capacity(dims.cell_count());
    let mut stop_lines = BTreeSet::new();
    let mut light_cells: BTreeMap<LightId, Vec<Pos>> = BTreeMap::new();
    let mut subject_start = None;
    let mut traffic_starts = Vec::new();
    let mut goals = BTreeSet::new();
    let mut y = 0;

    for (lineno, raw) in lines {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if y >= dims.height {
            return Err(bad(lineno, "more rows than the declared height"));
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != dims.width {
            return Err(bad(
                lineno,
                format!("expected {} cells, found {}", dims.width, tokens.len()),
            ));
        }
        for (x, token) in tokens.iter().enumerate() {
            let p = Pos::new(x, y);
            let mut chars = token.chars().peekable();
            let base = chars.next().expect("non-empty token");
            let mut cell = match base {
                '.' => Cell::OFFROAD,
                c => match Heading::from_arrow(c) {
                    Some(h) => Cell::lane(h, 0),
                    None => return Err(bad(lineno, format!("unknown cell `{token}`"))),
                },
            };
            while let Some(m) = chars.next() {
                match m {
                    '2' => cell.lane_index = cell.lane_index.map(|_| 1),
                    'L' => match cell.lane_direction {
                        Some(h) => {
                            stop_lines.insert((p, h));
                        }
                        None => return Err(bad(lineno, format!("stop line off-road at {p}"))),
                    },
                    'J' => cell.junction = true,
                    'S' => {
                        if subject_start.replace(p).is_some() {
                            return Err(bad(lineno, "more than one subject start"));
                        }
                    }
                    'C' => traffic_starts.push(p),
                    'G' => {
                        goals.insert(p);
                    }
                    'T' => {
                        let mut digits = String::new();
                        while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                            digits.push(*d);
                            chars.next();
                        }
                        let id = LightId(
                            digits
                                .parse()
                                .map_err(|_| bad(lineno, format!("`T` needs a light id in `{token}`")))?,
                        );
                        cell.light = Some(id);
                        light_cells.entry(id).or_default().push(p);
                    }
                    other => {
                        return Err(bad(lineno, format!("unknown modifier `{other}` in `{token}`")))
                    }
                }
            }
            if !cell.drivable && (cell.junction || cell.light.is_some() || cell.lane_index.is_some()) {
                return Err(bad(lineno, format!("lane modifiers on off-road cell {p}")));
            }
            cells.push(cell);
        }
        y += 1;
    }
    if y != dims.height {
        return Err(bad(0, format!("expected {} rows, found {y}", dims.height)));
    }

    let map = GridMap::new(dims, cells, stop_lines).map_err(|e| bad(0, e))?;
    let subject_start = subject_start.ok_or_else(|| bad(0, "no subject start `S`"))?;
    for p in std::iter::once(&subject_start).chain(&traffic_starts).chain(&goals) {
        if !map.drivable(*p) {
            return Err(bad(0, format!("start or goal off-road at {p}")));
        }
    }
    if goals.is_empty() {
        return Err(bad(0, "no goal cell `G`"));
    }
    for id in light_cells.keys() {
        if !lights.iter().any(|l: &LightPlan| l.id == *id) {
            lights.push(LightPlan {
                id: *id,
                durations: DEFAULT_DURATIONS,
                offset: 0,
                jitter: 0,
            });
        }
    }
    lights.sort_by_key(|l| l.id);
    traffic_starts.sort_by_key(|p| (p.y, p.x));

    Ok(ScenarioTemplate {
        name,
        map,
        step_limit,
        radius,
        gap,
        traffic_speed,
        traffic_jitter,
        visibility,
        lights,
        light_cells,
        subject_start,
        traffic_starts,
        goals,
    })
}

impl ScenarioTemplate {
    pub fn subject_start(&self) -> Pos {
        self.subject_start
    }

    pub fn goals(&self) -> &BTreeSet<Pos> {
        &self.goals
    }

    pub fn instantiate(&self, seed: u64) -> Result<Scenario, SimError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = &self.map;
        let dims = map.dims();

        let lights: Vec<TrafficLight> = self
            .lights
            .iter()
            .map(|plan| {
                let offset = plan.offset + rng.gen_range(0..=plan.jitter);
                let cells = self.light_cells.get(&plan.id).cloned().unwrap_or_default();
                TrafficLight::new(plan.id, cells, plan.durations, offset)
            })
            .collect();

        let heading_at = |p: Pos| map.cell(p).and_then(|c| c.lane_direction).expect("start on a lane");
        let mut taken: BTreeSet<Pos> = BTreeSet::new();
        taken.insert(self.subject_start);
        taken.extend(self.traffic_starts.iter().copied());
        let mut vehicles = vec![VehicleState {
            id: SUBJECT_ID,
            position: self.subject_start,
            heading: heading_at(self.subject_start),
            speed: 0,
            max_speed: SUBJECT_MAX_SPEED,
            lamps: Lamps::default(),
            kind: VehicleKind::Subject,
        }];
        for (i, &start) in self.traffic_starts.iter().enumerate() {
            let heading = heading_at(start);
            let shift = rng.gen_range(0..=self.traffic_jitter);
            let mut at = start;
            for _ in 0..shift {
                let next = dims.step(at, heading, 1);
                if !map.runs(next, heading) || taken.contains(&next) {
                    break;
                }
                at = next;
            }
            taken.remove(&start);
            taken.insert(at);
            vehicles.push(VehicleState {
                id: VehicleId(i as u32 + 1),
                position: at,
                heading,
                speed: self.traffic_speed,
                max_speed: self.traffic_speed,
                lamps: Lamps::default(),
                kind: VehicleKind::Traffic,
            });
        }

        let world = World::new(map.clone(), lights, vehicles)?.with_visibility(self.visibility);
        Ok(Scenario {
            name: self.name.clone(),
            seed,
            world,
            subject: SUBJECT_ID,
            goal: Goal::new(map, self.goals.clone()),
            step_limit: self.step_limit,
            radius: self.radius,
            gap: self.gap,
        })
    }
}

pub fn load_scenario(name: &str, seed: u64) -> Result<Scenario, SimError> {
    let text = scenario_text(name).ok_or_else(|| SimError::UnknownScenario(name.to_string()))?;
    parse_scenario(text)?.instantiate(seed)
}

/// Scripted traffic: lane-keeping at constant speed, holding behind any
/// occupied cell and at stop lines whose light is not green.
pub fn scripted_command(world: &World, id: VehicleId) -> VehicleCommand {
    let Some(v) = world.vehicle(id) else {
        return VehicleCommand::stop();
    };
    let map = world.map();
    let dims = world.dims();
    let speed = v.max_speed.max(1);
    for k in 1..=i64::from(speed) {
        let ahead = dims.step(v.position, v.heading, k);
        let behind = dims.step(ahead, v.heading, -1);
        if world.vehicle_at(ahead).is_some() {
            return VehicleCommand::stop();
        }
        if map.is_stop_line(behind, v.heading) {
            let go = map
                .cell(behind)
                .and_then(|c| c.light)
                .and_then(|id| world.light_phase(id))
                .is_none_or(|phase| phase == Phase::Green);
            if !go {
                return VehicleCommand::stop();
            }
        }
    }
    VehicleCommand::new(Longitudinal::Accelerate, Lateral::Keep)
}
