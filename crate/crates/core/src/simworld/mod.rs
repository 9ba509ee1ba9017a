//! Discrete-time grid-world traffic simulator on a torus.

pub mod geometry;
pub mod grid;
pub mod light;
pub mod scenario;
pub mod vehicle;
pub mod world;

pub use geometry::{Dims, Heading, Pos};
pub use grid::{Cell, CellView, GridMap};
pub use light::{LightId, Phase, TrafficLight, DEFAULT_DURATIONS};
pub use scenario::{
    load_scenario, parse_scenario, scenario_text, scripted_command, DistanceField, Goal, Scenario,
    ScenarioTemplate, SCENARIO_NAMES,
};
pub use vehicle::{
    plan_move, Lamp, Lamps, Lateral, Longitudinal, Move, VehicleCommand, VehicleId, VehicleKind,
    VehicleState,
};
pub use world::{Observation, SimEvent, StepResult, Visibility, World};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid world: {0}")]
    Invalid(String),
    #[error("more than one command for {0}")]
    DuplicateCommand(VehicleId),
    #[error("no such vehicle: {0}")]
    UnknownVehicle(VehicleId),
    #[error("no command given for {0}")]
    MissingCommand(VehicleId),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("map line {line}: {reason}")]
    MapParse { line: usize, reason: String },
}
