//! Ordered cell sequences produced by the tracers.

use crate::error::{Error, Result};
use crate::maze::{Coord, Maze};

/// An ordered sequence of adjacent channel cells.
///
/// Tracers build paths by construction; [`Path::validate`] re-checks the
/// invariants for paths read back from files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    cells: Vec<Coord>,
}

impl Path {
    pub fn new(cells: Vec<Coord>) -> Path {
        Path { cells }
    }

    pub fn cells(&self) -> &[Coord] {
        &self.cells
    }

    /// Number of steps, i.e. cells minus one.
    pub fn len(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn first(&self) -> Option<Coord> {
        self.cells.first().copied()
    }

    pub fn last(&self) -> Option<Coord> {
        self.cells.last().copied()
    }

    pub fn reversed(&self) -> Path {
        let mut cells = self.cells.clone();
        cells.reverse();
        Path { cells }
    }

    /// Check the structural invariants against a maze: all cells are channel,
    /// consecutive cells are 4-neighbors, and no cell repeats.
    pub fn validate(&self, maze: &Maze) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (i, &c) in self.cells.iter().enumerate() {
            if !maze.is_channel(c) {
                return Err(Error::PathOutsideMaze(c));
            }
            if !seen.insert(c) {
                return Err(Error::MalformedInput(format!("repeated path cell {c}")));
            }
            if i > 0 {
                let p = self.cells[i - 1];
                let adjacent = p.row.abs_diff(c.row) + p.col.abs_diff(c.col) == 1;
                if !adjacent {
                    return Err(Error::MalformedInput(format!(
                        "path cells {p} and {c} are not adjacent"
                    )));
                }
            }
        }
        Ok(())
    }

    /// True iff the path is valid and runs source -> destination.
    pub fn is_complete(&self, maze: &Maze) -> bool {
        self.validate(maze).is_ok()
            && self.first() == Some(maze.source())
            && self.last() == Some(maze.destination())
    }

    /// Serialize as `path <n>` followed by one `<row> <col>` line per cell.
    pub fn dump(&self) -> String {
        let mut out = format!("path {}\n", self.cells.len());
        for c in &self.cells {
            out.push_str(&format!("{} {}\n", c.row, c.col));
        }
        out
    }

    /// Parse the [`Path::dump`] format.
    pub fn parse(text: &str) -> Result<Path> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedInput("empty path text".into()))?;
        let count: usize = header
            .strip_prefix("path ")
            .and_then(|n| n.trim().parse().ok())
            .ok_or_else(|| Error::MalformedInput(format!("bad path header {header:?}")))?;
        let mut cells = Vec::with_capacity(count);
        for line in lines.take(count) {
            let mut parts = line.split_whitespace();
            let row = parts.next().and_then(|t| t.parse().ok());
            let col = parts.next().and_then(|t| t.parse().ok());
            match (row, col) {
                (Some(row), Some(col)) if parts.next().is_none() => {
                    cells.push(Coord::new(row, col))
                }
                _ => return Err(Error::MalformedInput(format!("bad path line {line:?}"))),
            }
        }
        if cells.len() != count {
            return Err(Error::MalformedInput(format!(
                "path header promised {} cells, found {}",
                count,
                cells.len()
            )));
        }
        Ok(Path { cells })
    }
}
