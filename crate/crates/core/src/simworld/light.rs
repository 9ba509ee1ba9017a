use std::fmt;

use serde::{Deserialize, Serialize};

use super::geometry::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LightId(pub u32);

impl fmt::Display for LightId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.0)
    }
}

/// UK signal sequence: red, red+amber, green, amber, back to red.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Red,
    RedAmber,
    Green,
    Amber,
}

impl Phase {
    pub fn next(self) -> Phase {
        match self {
            Phase::Red => Phase::RedAmber,
            Phase::RedAmber => Phase::Green,
            Phase::Green => Phase::Amber,
            Phase::Amber => Phase::Red,
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

/// Steps spent in red, red-amber, green and amber.
pub const DEFAULT_DURATIONS: [u32; 4] = [8, 2, 8, 2];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrafficLight {
    pub id: LightId,
    pub positions: Vec<Pos>,
    durations: [u32; 4],
    phase: Phase,
    elapsed: u32,
}

impl TrafficLight {
    /// A light starting at the beginning of red, then advanced `offset` ticks.
    pub fn new(id: LightId, positions: Vec<Pos>, durations: [u32; 4], offset: u32) -> Self {
        assert!(durations.iter().all(|&d| d >= 1), "phase durations must be >= 1");
        let mut light = TrafficLight {
            id,
            positions,
            durations,
            phase: Phase::Red,
            elapsed: 0,
        };
        for _ in 0..offset {
            light.tick();
        }
        light
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn durations(&self) -> [u32; 4] {
        self.durations
    }

    pub fn tick(&mut self) {
        self.elapsed += 1;
        if self.elapsed >= self.durations[self.phase.slot()] {
            self.phase = self.phase.next();
            self.elapsed = 0;
        }
    }
}
