//! Maze data model: rectangular grid of wall/channel cells with a designated
//! source and destination, plus parsing, generation, and adjacency queries.
//!
//! Every engine in this crate shares this model and the fixed neighbor order
//! North, East, South, West, which is the global tie-break for path tracing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// Grid coordinate, row-major, `(0, 0)` in the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

impl Coord {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// The four von Neumann directions in the fixed global tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    North,
    East,
    South,
    West,
}

impl Direction {
    /// Tie-break order used everywhere: N, E, S, W.
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::East,
        Direction::South,
        Direction::West,
    ];

    pub fn opposite(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::East => Direction::West,
            Direction::South => Direction::North,
            Direction::West => Direction::East,
        }
    }

    /// One step from `c`, or `None` when the step leaves a `width` x `height` grid.
    pub fn step(self, c: Coord, width: usize, height: usize) -> Option<Coord> {
        let (row, col) = (c.row, c.col);
        let next = match self {
            Direction::North => (row.checked_sub(1)?, col),
            Direction::East => (row, col + 1),
            Direction::South => (row + 1, col),
            Direction::West => (row, col.checked_sub(1)?),
        };
        (next.0 < height && next.1 < width).then_some(Coord::new(next.0, next.1))
    }

    pub fn glyph(self) -> char {
        match self {
            Direction::North => 'N',
            Direction::East => 'E',
            Direction::South => 'S',
            Direction::West => 'W',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Wall,
    Channel,
}

/// Maze layout family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MazeKind {
    /// Channel graph is a tree: exactly one simple path between any two cells.
    Perfect,
    /// Perfect maze braided by opening walls next to the given fraction of dead ends.
    Braided(f64),
}

/// Rectangular maze with designated source and destination channel cells.
///
/// Immutable after construction; cheap to share read-only across engines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Maze {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    source: Coord,
    destination: Coord,
}

impl Maze {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_count(&self) -> usize {
        self.width * self.height
    }

    pub fn source(&self) -> Coord {
        self.source
    }

    pub fn destination(&self) -> Coord {
        self.destination
    }

    pub fn index(&self, c: Coord) -> usize {
        c.row * self.width + c.col
    }

    pub fn in_bounds(&self, c: Coord) -> bool {
        c.row < self.height && c.col < self.width
    }

    pub fn cell(&self, c: Coord) -> Cell {
        self.cells[self.index(c)]
    }

    pub fn is_channel(&self, c: Coord) -> bool {
        self.in_bounds(c) && self.cell(c) == Cell::Channel
    }

    /// Iterator over all channel coordinates in row-major order.
    pub fn channel_cells(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.height).flat_map(move |row| {
            (0..self.width)
                .map(move |col| Coord::new(row, col))
                .filter(move |&c| self.cell(c) == Cell::Channel)
        })
    }

    pub fn channel_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == Cell::Channel).count()
    }

    /// Channel neighbors of a channel cell, in N, E, S, W order.
    ///
    /// Walls are not valid query points; asking for their neighbors is a
    /// `WallQuery` error rather than an empty list.
    pub fn neighbors(&self, c: Coord) -> Result<Vec<Coord>> {
        if !self.is_channel(c) {
            return Err(Error::WallQuery(c));
        }
        Ok(Direction::ALL
            .iter()
            .filter_map(|d| d.step(c, self.width, self.height))
            .filter(|&n| self.is_channel(n))
            .collect())
    }

    /// True iff the destination is reachable from the source through channels.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.cells.len()];
        let mut queue = VecDeque::new();
        seen[self.index(self.source)] = true;
        queue.push_back(self.source);
        while let Some(c) = queue.pop_front() {
            if c == self.destination {
                return true;
            }
            for d in Direction::ALL {
                if let Some(n) = d.step(c, self.width, self.height) {
                    if self.is_channel(n) && !seen[self.index(n)] {
                        seen[self.index(n)] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        false
    }

    /// Parse the ASCII maze format: equal-length rows of `#` (wall),
    /// `.` (channel), exactly one `S` (source) and one `D` (destination).
    pub fn parse(text: &str) -> Result<Maze> {
        let mut rows: Vec<&str> = text.split('\n').collect();
        if rows.last() == Some(&"") {
            rows.pop();
        }
        if rows.is_empty() {
            return Err(Error::MalformedInput("empty maze text".into()));
        }
        let width = rows[0].len();
        if width == 0 {
            return Err(Error::MalformedInput("empty first row".into()));
        }
        let height = rows.len();
        let mut cells = Vec::with_capacity(width * height);
        let mut source = None;
        let mut destination = None;
        for (row, line) in rows.iter().enumerate() {
            if line.len() != width {
                return Err(Error::MalformedInput(format!(
                    "ragged rows: row {} has length {}, expected {}",
                    row,
                    line.len(),
                    width
                )));
            }
            for (col, byte) in line.bytes().enumerate() {
                let cell = match byte {
                    b'#' => Cell::Wall,
                    b'.' => Cell::Channel,
                    b'S' => {
                        if source.replace(Coord::new(row, col)).is_some() {
                            return Err(Error::MalformedInput("duplicate source 'S'".into()));
                        }
                        Cell::Channel
                    }
                    b'D' => {
                        if destination.replace(Coord::new(row, col)).is_some() {
                            return Err(Error::MalformedInput("duplicate destination 'D'".into()));
                        }
                        Cell::Channel
                    }
                    other => {
                        return Err(Error::MalformedInput(format!(
                            "illegal character {:?} at row {row} col {col}",
                            other as char
                        )));
                    }
                };
                cells.push(cell);
            }
        }
        let source = source.ok_or_else(|| Error::MalformedInput("missing source 'S'".into()))?;
        let destination =
            destination.ok_or_else(|| Error::MalformedInput("missing destination 'D'".into()))?;
        Ok(Maze {
            width,
            height,
            cells,
            source,
            destination,
        })
    }

    /// Assemble a maze from raw parts. Endpoints must be channel cells.
    pub fn from_parts(
        width: usize,
        height: usize,
        cells: Vec<Cell>,
        source: Coord,
        destination: Coord,
    ) -> Result<Maze> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return Err(Error::InvalidDimensions(format!(
                "{}x{} grid with {} cells",
                width,
                height,
                cells.len()
            )));
        }
        let maze = Maze {
            width,
            height,
            cells,
            source,
            destination,
        };
        for endpoint in [source, destination] {
            if !maze.is_channel(endpoint) {
                return Err(Error::WallQuery(endpoint));
            }
        }
        Ok(maze)
    }

    /// Generate a maze on the odd wall lattice: rooms live on odd (row, col)
    /// pairs, walls on even rows/columns. Deterministic in all arguments.
    ///
    /// The source is the top-left room, the destination the bottom-right room.
    /// `Braided(f)` additionally opens one wall next to each of a fraction `f`
    /// of the dead ends, turning the tree into a maze with loops.
    pub fn generate(width: usize, height: usize, kind: MazeKind, seed: u64) -> Result<Maze> {
        if width < 3 || height < 3 || width % 2 == 0 || height % 2 == 0 {
            return Err(Error::InvalidDimensions(format!(
                "{width}x{height}: generation needs odd dimensions of at least 3"
            )));
        }
        if let MazeKind::Braided(fraction) = kind {
            if !(0.0..=1.0).contains(&fraction) {
                return Err(Error::InvalidDimensions(format!(
                    "braid fraction {fraction} outside [0, 1]"
                )));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cells = vec![Cell::Wall; width * height];
        let rooms_w = (width - 1) / 2;
        let rooms_h = (height - 1) / 2;
        let room = |r: usize, c: usize| Coord::new(2 * r + 1, 2 * c + 1);
        let idx = |c: Coord| c.row * width + c.col;

        // Iterative recursive-backtracker over the room lattice.
        let mut visited = vec![false; rooms_w * rooms_h];
        let mut stack = vec![(0usize, 0usize)];
        visited[0] = true;
        cells[idx(room(0, 0))] = Cell::Channel;
        while let Some(&(r, c)) = stack.last() {
            let mut candidates: Vec<(usize, usize)> = Vec::with_capacity(4);
            for d in Direction::ALL {
                let next = match d {
                    Direction::North if r > 0 => (r - 1, c),
                    Direction::East if c + 1 < rooms_w => (r, c + 1),
                    Direction::South if r + 1 < rooms_h => (r + 1, c),
                    Direction::West if c > 0 => (r, c - 1),
                    _ => continue,
                };
                if !visited[next.0 * rooms_w + next.1] {
                    candidates.push(next);
                }
            }
            if candidates.is_empty() {
                stack.pop();
                continue;
            }
            let &(nr, nc) = &candidates[rng.gen_range(0..candidates.len())];
            visited[nr * rooms_w + nc] = true;
            let a = room(r, c);
            let b = room(nr, nc);
            let wall = Coord::new((a.row + b.row) / 2, (a.col + b.col) / 2);
            cells[idx(b)] = Cell::Channel;
            cells[idx(wall)] = Cell::Channel;
            stack.push((nr, nc));
        }

        let mut maze = Maze {
            width,
            height,
            cells,
            source: room(0, 0),
            destination: room(rooms_h - 1, rooms_w - 1),
        };

        if let MazeKind::Braided(fraction) = kind {
            maze.braid(fraction, &mut rng);
        }
        Ok(maze)
    }

    /// Remove dead ends by opening one adjacent wall for each selected dead end.
    fn braid(&mut self, fraction: f64, rng: &mut ChaCha8Rng) {
        let mut dead_ends: Vec<Coord> = self
            .channel_cells()
            .filter(|&c| self.neighbors(c).map(|n| n.len() == 1).unwrap_or(false))
            .collect();
        let keep = ((dead_ends.len() as f64) * fraction).round() as usize;
        dead_ends.shuffle(rng);
        dead_ends.truncate(keep);
        for dead in dead_ends {
            // A wall is a valid opening when the cell beyond it is channel,
            // so removing it links the dead end back into the graph.
            let mut options: Vec<Coord> = Vec::with_capacity(3);
            for d in Direction::ALL {
                let Some(wall) = d.step(dead, self.width, self.height) else {
                    continue;
                };
                if self.cell(wall) != Cell::Wall {
                    continue;
                }
                let Some(beyond) = d.step(wall, self.width, self.height) else {
                    continue;
                };
                if self.is_channel(beyond) {
                    options.push(wall);
                }
            }
            if let Some(&wall) = options.as_slice().choose(rng) {
                let i = self.index(wall);
                self.cells[i] = Cell::Channel;
            }
        }
    }
}
