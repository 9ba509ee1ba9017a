use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::geometry::{Dims, Heading, Pos};
use super::grid::{Cell, CellView, GridMap};
use super::light::{LightId, Phase, TrafficLight};
use super::vehicle::{plan_move, Move, VehicleCommand, VehicleId, VehicleKind, VehicleState};
use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    #[default]
    Clear,
    SeriouslyReduced,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SimEvent {
    /// Two or more vehicles claimed one cell; none of them moved.
    Contention { cell: Pos, vehicles: Vec<VehicleId> },
    /// The command was not executable on the map (off-road, turn away from a junction).
    Blocked { vehicle: VehicleId },
    /// A vehicle entered a cell another vehicle kept.
    Collision {
        vehicle: VehicleId,
        other: VehicleId,
        cell: Pos,
    },
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub world: World,
    pub events: Vec<SimEvent>,
}

impl StepResult {
    pub fn collided(&self) -> bool {
        self.events
            .iter()
            .any(|e| matches!(e, SimEvent::Collision { .. }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct World {
    map: Arc<GridMap>,
    lights: BTreeMap<LightId, TrafficLight>,
    vehicles: BTreeMap<VehicleId, VehicleState>,
    step: u64,
    visibility: Visibility,
}

impl World {
    pub fn new(
        map: GridMap,
        lights: impl IntoIterator<Item = TrafficLight>,
        vehicles: impl IntoIterator<Item = VehicleState>,
    ) -> Result<Self, SimError> {
        let map = Arc::new(map);
        let vehicles: BTreeMap<_, _> = vehicles.into_iter().map(|v| (v.id, v)).collect();
        let mut occupied = BTreeSet::new();
        for v in vehicles.values() {
            if !map.drivable(v.position) {
                return Err(SimError::Invalid(format!(
                    "{} starts off-road at {}",
                    v.id, v.position
                )));
            }
            if !occupied.insert(v.position) {
                return Err(SimError::Invalid(format!(
                    "two vehicles start at {}",
                    v.position
                )));
            }
        }
        Ok(World {
            map,
            lights: lights.into_iter().map(|l| (l.id, l)).collect(),
            vehicles,
            step: 0,
            visibility: Visibility::Clear,
        })
    }

    pub fn with_visibility(mut self, visibility: Visibility) -> Self {
        self.visibility = visibility;
        self
    }

    pub fn map(&self) -> &GridMap {
        &self.map
    }

    pub fn dims(&self) -> Dims {
        self.map.dims()
    }

    pub fn step_number(&self) -> u64 {
        self.step
    }

    pub fn visibility(&self) -> Visibility {
        self.visibility
    }

    pub fn vehicles(&self) -> &BTreeMap<VehicleId, VehicleState> {
        &self.vehicles
    }

    pub fn vehicle(&self, id: VehicleId) -> Option<&VehicleState> {
        self.vehicles.get(&id)
    }

    pub fn lights(&self) -> &BTreeMap<LightId, TrafficLight> {
        &self.lights
    }

    pub fn light_phase(&self, id: LightId) -> Option<Phase> {
        self.lights.get(&id).map(TrafficLight::phase)
    }

    pub fn vehicle_at(&self, p: Pos) -> Option<&VehicleState> {
        self.vehicles.values().find(|v| v.position == p)
    }

    /// Commands given as a list of pairs; duplicate ids are rejected.
    pub fn step_with(
        &self,
        commands: impl IntoIterator<Item = (VehicleId, VehicleCommand)>,
    ) -> Result<StepResult, SimError> {
        let mut map = BTreeMap::new();
        for (id, cmd) in commands {
            if map.insert(id, cmd).is_some() {
                return Err(SimError::DuplicateCommand(id));
            }
        }
        self.step(&map)
    }

    /// Resolves every command against this (pre-step) snapshot, then advances
    /// the lights by one tick.
    pub fn step(&self, commands: &BTreeMap<VehicleId, VehicleCommand>) -> Result<StepResult, SimError> {
        if let Some(id) = commands.keys().find(|id| !self.vehicles.contains_key(id)) {
            return Err(SimError::UnknownVehicle(*id));
        }
        if let Some(id) = self.vehicles.keys().find(|id| !commands.contains_key(id)) {
            return Err(SimError::MissingCommand(*id));
        }

        let mut events = Vec::new();
        let mut moves: BTreeMap<VehicleId, Move> = BTreeMap::new();
        for (id, v) in &self.vehicles {
            let mv = plan_move(&*self.map, v, &commands[id]);
            if !mv.valid {
                events.push(SimEvent::Blocked { vehicle: *id });
            }
            moves.insert(*id, mv);
        }

        let mut claims: BTreeMap<Pos, Vec<VehicleId>> = BTreeMap::new();
        for (id, mv) in &moves {
            if mv.moves() {
                claims.entry(mv.target()).or_default().push(*id);
            }
        }
        for (cell, ids) in claims {
            if ids.len() > 1 {
                for id in &ids {
                    let mv = moves.get_mut(id).expect("claimant has a move");
                    mv.path.clear();
                    mv.speed = 0;
                }
                events.push(SimEvent::Contention { cell, vehicles: ids });
            }
        }

        let kept: BTreeMap<Pos, VehicleId> = moves
            .iter()
            .filter(|(_, mv)| !mv.moves())
            .map(|(id, mv)| (mv.origin, *id))
            .collect();
        for (id, mv) in &moves {
            if mv.moves() {
                if let Some(&other) = kept.get(&mv.target()) {
                    events.push(SimEvent::Collision {
                        vehicle: *id,
                        other,
                        cell: mv.target(),
                    });
                }
            }
        }

        let mut next = self.clone();
        for (id, mv) in moves {
            let v = next.vehicles.get_mut(&id).expect("vehicle exists");
            v.position = mv.target();
            v.heading = mv.heading;
            v.speed = mv.speed;
            v.lamps = v.lamps.with(&commands[&id].lamps);
        }
        for light in next.lights.values_mut() {
            light.tick();
        }
        next.step += 1;
        Ok(StepResult {
            world: next,
            events,
        })
    }

    /// Everything within Chebyshev radius `radius` of the vehicle, and nothing else.
    pub fn observe(&self, id: VehicleId, radius: usize) -> Result<Observation, SimError> {
        let me = self.vehicles.get(&id).ok_or(SimError::UnknownVehicle(id))?;
        let dims = self.dims();
        let window = dims.window(me.position, radius);
        let visible: BTreeSet<Pos> = window.iter().copied().collect();
        let cells = window
            .iter()
            .map(|&p| (p, *self.map.cell(p).expect("window cell in map")))
            .collect();
        let stop_lines = self
            .map
            .stop_lines()
            .iter()
            .filter(|(p, _)| visible.contains(p))
            .copied()
            .collect();
        let vehicles = self
            .vehicles
            .values()
            .filter(|v| visible.contains(&v.position))
            .map(|v| (v.id, v.clone()))
            .collect();
        let lights = self
            .lights
            .values()
            .filter(|l| l.positions.iter().any(|p| visible.contains(p)))
            .map(|l| (l.id, l.phase()))
            .collect();
        Ok(Observation {
            observer: id,
            step: self.step,
            radius,
            dims,
            center: me.position,
            cells,
            stop_lines,
            vehicles,
            lights,
            visibility: self.visibility,
        })
    }

    /// ASCII frame: vehicles as `S` (subject) or a traffic digit, lanes as arrows.
    pub fn render(&self) -> String {
        let dims = self.dims();
        let mut out = String::new();
        for y in 0..dims.height {
            for x in 0..dims.width {
                let p = Pos::new(x, y);
                let c = match self.vehicle_at(p) {
                    Some(v) if v.kind == VehicleKind::Subject => 'S',
                    Some(v) => char::from_digit(v.id.0 % 10, 10).unwrap_or('C'),
                    None => {
                        let cell = self.map.cell(p).expect("in map");
                        match (cell.light, cell.lane_direction) {
                            (Some(id), _) => match self.light_phase(id) {
                                Some(Phase::Green) => 'g',
                                Some(Phase::Red) => 'r',
                                _ => 'a',
                            },
                            (None, Some(h)) => h.arrow(),
                            (None, None) => '.',
                        }
                    }
                };
                out.push(c);
            }
            out.push('\n');
        }
        out
    }
}

/// A radius-limited snapshot of the world around one vehicle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub observer: VehicleId,
    pub step: u64,
    pub radius: usize,
    pub dims: Dims,
    pub center: Pos,
    pub cells: BTreeMap<Pos, Cell>,
    pub stop_lines: BTreeSet<(Pos, Heading)>,
    pub vehicles: BTreeMap<VehicleId, VehicleState>,
    pub lights: BTreeMap<LightId, Phase>,
    pub visibility: Visibility,
}

impl Observation {
    pub fn me(&self) -> &VehicleState {
        &self.vehicles[&self.observer]
    }

    pub fn others(&self) -> impl Iterator<Item = &VehicleState> {
        self.vehicles.values().filter(move |v| v.id != self.observer)
    }

    pub fn vehicle_at(&self, p: Pos) -> Option<&VehicleState> {
        self.vehicles.values().find(|v| v.position == p)
    }

    pub fn sees(&self, p: Pos) -> bool {
        self.cells.contains_key(&p)
    }

    /// Phase of the light controlling cell `p`, if both are visible.
    pub fn phase_at(&self, p: Pos) -> Option<Phase> {
        let id = self.cells.get(&p)?.light?;
        self.lights.get(&id).copied()
    }
}

impl CellView for Observation {
    fn dims(&self) -> Dims {
        self.dims
    }

    fn cell(&self, p: Pos) -> Option<&Cell> {
        self.cells.get(&p)
    }

    fn is_stop_line(&self, p: Pos, approach: Heading) -> bool {
        self.stop_lines.contains(&(p, approach))
    }
}
