use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::geometry::{Heading, Pos};
use super::grid::CellView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VehicleId(pub u32);

impl fmt::Display for VehicleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VehicleKind {
    Subject,
    Traffic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lamp {
    Headlights,
    FogLights,
    IndicatorLeft,
    IndicatorRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Lamps {
    pub headlights: bool,
    pub fog_lights: bool,
    pub indicator_left: bool,
    pub indicator_right: bool,
}

impl Lamps {
    pub fn get(&self, lamp: Lamp) -> bool {
        match lamp {
            Lamp::Headlights => self.headlights,
            Lamp::FogLights => self.fog_lights,
            Lamp::IndicatorLeft => self.indicator_left,
            Lamp::IndicatorRight => self.indicator_right,
        }
    }

    pub fn set(&mut self, lamp: Lamp, on: bool) {
        match lamp {
            Lamp::Headlights => self.headlights = on,
            Lamp::FogLights => self.fog_lights = on,
            Lamp::IndicatorLeft => self.indicator_left = on,
            Lamp::IndicatorRight => self.indicator_right = on,
        }
    }

    pub fn with(mut self, changes: &BTreeMap<Lamp, bool>) -> Lamps {
        for (&lamp, &on) in changes {
            self.set(lamp, on);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VehicleState {
    pub id: VehicleId,
    pub position: Pos,
    pub heading: Heading,
    /// Cells per step.
    pub speed: u8,
    pub max_speed: u8,
    pub lamps: Lamps,
    pub kind: VehicleKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Longitudinal {
    Hold,
    Accelerate,
    Decelerate,
    Stop,
}

impl Longitudinal {
    pub const ALL: [Longitudinal; 4] = [
        Longitudinal::Hold,
        Longitudinal::Accelerate,
        Longitudinal::Decelerate,
        Longitudinal::Stop,
    ];

    pub fn apply(self, speed: u8, max_speed: u8) -> u8 {
        match self {
            Longitudinal::Hold => speed.min(max_speed),
            Longitudinal::Accelerate => (speed + 1).min(max_speed),
            Longitudinal::Decelerate => speed.saturating_sub(1),
            Longitudinal::Stop => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lateral {
    Keep,
    ChangeLeft,
    ChangeRight,
    TurnLeft,
    TurnRight,
}

impl Lateral {
    pub const ALL: [Lateral; 5] = [
        Lateral::Keep,
        Lateral::ChangeLeft,
        Lateral::ChangeRight,
        Lateral::TurnLeft,
        Lateral::TurnRight,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VehicleCommand {
    pub longitudinal: Longitudinal,
    pub lateral: Lateral,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lamps: BTreeMap<Lamp, bool>,
}

impl VehicleCommand {
    pub fn new(longitudinal: Longitudinal, lateral: Lateral) -> Self {
        VehicleCommand {
            longitudinal,
            lateral,
            lamps: BTreeMap::new(),
        }
    }

    pub fn hold() -> Self {
        Self::new(Longitudinal::Hold, Lateral::Keep)
    }

    pub fn stop() -> Self {
        Self::new(Longitudinal::Stop, Lateral::Keep)
    }

    pub fn with_lamp(mut self, lamp: Lamp, on: bool) -> Self {
        self.lamps.insert(lamp, on);
        self
    }

    /// All twenty movement commands, without lamp changes.
    pub fn movements() -> impl Iterator<Item = VehicleCommand> {
        Lateral::ALL
            .into_iter()
            .flat_map(|lat| Longitudinal::ALL.into_iter().map(move |lon| Self::new(lon, lat)))
    }
}

/// Furthest a turn may travel looking for the exit lane.
const TURN_REACH: i64 = 3;

/// Where a command would take a vehicle, resolved against a cell view only
/// (other vehicles are not considered).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub origin: Pos,
    /// Cells entered, in order; the last one is the target.
    pub path: Vec<Pos>,
    pub heading: Heading,
    pub speed: u8,
    pub valid: bool,
}

impl Move {
    pub fn target(&self) -> Pos {
        self.path.last().copied().unwrap_or(self.origin)
    }

    pub fn moves(&self) -> bool {
        !self.path.is_empty()
    }

    fn blocked(v: &VehicleState) -> Move {
        Move {
            origin: v.position,
            path: Vec::new(),
            heading: v.heading,
            speed: 0,
            valid: false,
        }
    }

    /// True if the move passes through `line` and carries on beyond it.
    pub fn crosses(&self, line: Pos) -> bool {
        let n = self.path.len();
        if n == 0 {
            return false;
        }
        std::iter::once(self.origin)
            .chain(self.path[..n - 1].iter().copied())
            .any(|p| p == line)
    }
}

pub fn plan_move(view: &impl CellView, v: &VehicleState, cmd: &VehicleCommand) -> Move {
    let dims = view.dims();
    let speed = cmd.longitudinal.apply(v.speed, v.max_speed);
    let h = v.heading;
    let straight = |start: Pos, first: Option<Pos>| -> Option<Vec<Pos>> {
        let mut path: Vec<Pos> = first.into_iter().collect();
        let mut at = start;
        for _ in 0..speed {
            at = dims.step(at, h, 1);
            if !view.runs(at, h) {
                return None;
            }
            path.push(at);
        }
        Some(path)
    };

    let planned = match cmd.lateral {
        Lateral::Keep => straight(v.position, None).map(|path| (path, h, speed)),
        Lateral::ChangeLeft | Lateral::ChangeRight => {
            let side = if cmd.lateral == Lateral::ChangeLeft {
                h.left()
            } else {
                h.right()
            };
            let first = dims.step(v.position, side, 1);
            if view.runs(first, h) {
                straight(first, Some(first)).map(|path| (path, h, speed))
            } else {
                None
            }
        }
        Lateral::TurnLeft | Lateral::TurnRight => {
            let junction = view.cell(v.position).is_some_and(|c| c.junction);
            if !junction || speed == 0 {
                None
            } else {
                let nh = if cmd.lateral == Lateral::TurnLeft {
                    h.left()
                } else {
                    h.right()
                };
                let mut path = Vec::new();
                let mut exit = None;
                for k in 1..=TURN_REACH {
                    let p = dims.step(v.position, nh, k);
                    if !view.drivable(p) {
                        break;
                    }
                    path.push(p);
                    if view.runs(p, nh) {
                        exit = Some(path.clone());
                        break;
                    }
                }
                exit.map(|path| (path, nh, 1))
            }
        }
    };

    match planned {
        Some((path, heading, speed)) => Move {
            origin: v.position,
            path,
            heading,
            speed,
            valid: true,
        },
        None => Move::blocked(v),
    }
}
