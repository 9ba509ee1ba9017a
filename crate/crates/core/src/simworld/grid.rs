use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::geometry::{Dims, Heading, Pos};
use super::light::LightId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub drivable: bool,
    pub lane_direction: Option<Heading>,
    /// 0 is the leftmost lane in the direction of travel.
    pub lane_index: Option<u8>,
    pub light: Option<LightId>,
    pub junction: bool,
}

impl Cell {
    pub const OFFROAD: Cell = Cell {
        drivable: false,
        lane_direction: None,
        lane_index: None,
        light: None,
        junction: false,
    };

    pub fn lane(direction: Heading, index: u8) -> Cell {
        Cell {
            drivable: true,
            lane_direction: Some(direction),
            lane_index: Some(index),
            light: None,
            junction: false,
        }
    }

    pub fn runs(&self, heading: Heading) -> bool {
        self.drivable && self.lane_direction == Some(heading)
    }
}

/// Read access to (part of) a grid. Cells a view does not contain are `None`
/// and treated as impassable.
pub trait CellView {
    fn dims(&self) -> Dims;
    fn cell(&self, p: Pos) -> Option<&Cell>;
    fn is_stop_line(&self, p: Pos, approach: Heading) -> bool;

    fn runs(&self, p: Pos, heading: Heading) -> bool {
        self.cell(p).is_some_and(|c| c.runs(heading))
    }

    fn drivable(&self, p: Pos) -> bool {
        self.cell(p).is_some_and(|c| c.drivable)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    dims: Dims,
    cells: Vec<Cell>,
    stop_lines: BTreeSet<(Pos, Heading)>,
}

impl GridMap {
    /// Builds a map, checking that lane data and stop lines sit on drivable cells.
    pub fn new(
        dims: Dims,
        cells: Vec<Cell>,
        stop_lines: BTreeSet<(Pos, Heading)>,
    ) -> Result<Self, String> {
        if cells.len() != dims.cell_count() {
            return Err(format!(
                "expected {} cells, found {}",
                dims.cell_count(),
                cells.len()
            ));
        }
        for (i, c) in cells.iter().enumerate() {
            if c.drivable != c.lane_direction.is_some() {
                return Err(format!(
                    "cell {} has lane direction iff drivable violated",
                    dims.pos(i)
                ));
            }
        }
        for &(p, h) in &stop_lines {
            if !cells[dims.index(p)].runs(h) {
                return Err(format!("stop line at {p} is not on a drivable lane heading {h:?}"));
            }
        }
        Ok(GridMap {
            dims,
            cells,
            stop_lines,
        })
    }

    pub fn stop_lines(&self) -> &BTreeSet<(Pos, Heading)> {
        &self.stop_lines
    }

    pub fn positions(&self) -> impl Iterator<Item = Pos> + '_ {
        (0..self.cells.len()).map(|i| self.dims.pos(i))
    }
}

impl CellView for GridMap {
    fn dims(&self) -> Dims {
        self.dims
    }

    fn cell(&self, p: Pos) -> Option<&Cell> {
        self.cells.get(self.dims.index(p))
    }

    fn is_stop_line(&self, p: Pos, approach: Heading) -> bool {
        self.stop_lines.contains(&(p, approach))
    }
}
