use std::fmt;

use serde::{Deserialize, Serialize};

/// Cell coordinate; `y` grows southwards, as rows appear in a map file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pos {
    pub x: usize,
    pub y: usize,
}

impl Pos {
    pub const fn new(x: usize, y: usize) -> Self {
        Pos { x, y }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heading {
    N,
    E,
    S,
    W,
}

impl Heading {
    pub const ALL: [Heading; 4] = [Heading::N, Heading::E, Heading::S, Heading::W];

    pub fn delta(self) -> (i64, i64) {
        match self {
            Heading::N => (0, -1),
            Heading::E => (1, 0),
            Heading::S => (0, 1),
            Heading::W => (-1, 0),
        }
    }

    pub fn right(self) -> Heading {
        match self {
            Heading::N => Heading::E,
            Heading::E => Heading::S,
            Heading::S => Heading::W,
            Heading::W => Heading::N,
        }
    }

    pub fn left(self) -> Heading {
        self.right().opposite()
    }

    pub fn opposite(self) -> Heading {
        self.right().right()
    }

    pub fn arrow(self) -> char {
        match self {
            Heading::N => '^',
            Heading::E => '>',
            Heading::S => 'v',
            Heading::W => '<',
        }
    }

    pub fn from_arrow(c: char) -> Option<Heading> {
        match c {
            '^' => Some(Heading::N),
            '>' => Some(Heading::E),
            'v' => Some(Heading::S),
            '<' => Some(Heading::W),
            _ => None,
        }
    }
}

/// Torus dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub width: usize,
    pub height: usize,
}

impl Dims {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "torus dimensions must be positive");
        Dims { width, height }
    }

    pub fn cell_count(self) -> usize {
        self.width * self.height
    }

    pub fn index(self, p: Pos) -> usize {
        p.y * self.width + p.x
    }

    pub fn pos(self, index: usize) -> Pos {
        Pos::new(index % self.width, index / self.width)
    }

    pub fn offset(self, p: Pos, dx: i64, dy: i64) -> Pos {
        let w = self.width as i64;
        let h = self.height as i64;
        Pos::new(
            (p.x as i64 + dx).rem_euclid(w) as usize,
            (p.y as i64 + dy).rem_euclid(h) as usize,
        )
    }

    pub fn step(self, p: Pos, heading: Heading, n: i64) -> Pos {
        let (dx, dy) = heading.delta();
        self.offset(p, dx * n, dy * n)
    }

    /// Shortest signed offset from `from` to `to` on each axis.
    pub fn rel(self, from: Pos, to: Pos) -> (i64, i64) {
        fn axis(a: usize, b: usize, n: usize) -> i64 {
            let n = n as i64;
            let mut d = (b as i64 - a as i64).rem_euclid(n);
            if d > n / 2 {
                d -= n;
            }
            d
        }
        (axis(from.x, to.x, self.width), axis(from.y, to.y, self.height))
    }

    pub fn chebyshev(self, a: Pos, b: Pos) -> usize {
        let (dx, dy) = self.rel(a, b);
        dx.unsigned_abs().max(dy.unsigned_abs()) as usize
    }

    /// `to` expressed as (forward, rightward) offsets from `from` facing `heading`.
    pub fn frame(self, from: Pos, heading: Heading, to: Pos) -> (i64, i64) {
        let (dx, dy) = self.rel(from, to);
        let (fx, fy) = heading.delta();
        let (rx, ry) = heading.right().delta();
        (dx * fx + dy * fy, dx * rx + dy * ry)
    }

    /// Every cell within Chebyshev radius `r` of `center`, deduplicated when
    /// the window is wider than the torus.
    pub fn window(self, center: Pos, r: usize) -> Vec<Pos> {
        let r = r as i64;
        let mut cells: Vec<Pos> = (-r..=r)
            .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
            .map(|(dx, dy)| self.offset(center, dx, dy))
            .collect();
        cells.sort();
        cells.dedup();
        cells
    }
}
