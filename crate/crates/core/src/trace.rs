//! Shared tracing kernels: monotone field descent/ascent and pointer
//! following.
//!
//! Every engine extracts its path through these two functions, so the N, E,
//! S, W tie-break and the failure semantics are identical everywhere and
//! engine outputs can be compared path-for-path.

use crate::error::{Error, Result};
use crate::maze::{Coord, Direction, Maze};
use crate::path::Path;

/// Whether the tracer climbs to the maximum or descends to the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    AscendToMax,
    DescendToMin,
}

/// Read-only view of per-cell values, implemented by scalar, distance and
/// arrival fields. Cells without a value (walls, unreached) return `None`.
pub trait ValueGrid {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn value(&self, c: Coord) -> Option<f64>;
}

/// Read-only view of per-cell pointers toward a root cell.
pub trait PointerGrid {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn root(&self) -> Coord;
    /// Direction to step from `c` toward the root, `None` at the root and on
    /// cells outside the structure.
    fn pointer(&self, c: Coord) -> Option<Direction>;
    /// True when `c` belongs to the structure (root included).
    fn covered(&self, c: Coord) -> bool;
}

/// Greedy monotone trace from `start` to `goal`.
///
/// Each step moves to the strictly improving neighbor that is extremal under
/// `mode`; value ties resolve to the first candidate in N, E, S, W order.
/// Plateaus are an error rather than a guess: a degenerate field is the
/// engine's problem, not the tracer's.
pub fn greedy_trace(
    field: &impl ValueGrid,
    maze: &Maze,
    start: Coord,
    goal: Coord,
    mode: TraceMode,
    max_steps: usize,
) -> Result<Path> {
    for endpoint in [start, goal] {
        if !maze.is_channel(endpoint) {
            return Err(Error::WallQuery(endpoint));
        }
        if field.value(endpoint).is_none() {
            return Err(Error::Unreachable);
        }
    }
    let mut cells = vec![start];
    let mut current = start;
    while current != goal {
        if cells.len() > max_steps {
            return Err(Error::StepBudgetExceeded(max_steps));
        }
        let here = field
            .value(current)
            .expect("traced cells always carry a value");
        let mut best: Option<(Coord, f64)> = None;
        for d in Direction::ALL {
            let Some(n) = d.step(current, maze.width(), maze.height()) else {
                continue;
            };
            if !maze.is_channel(n) {
                continue;
            }
            let Some(v) = field.value(n) else { continue };
            let improves = match mode {
                TraceMode::AscendToMax => v > here,
                TraceMode::DescendToMin => v < here,
            };
            // Strict inequality against the incumbent keeps the first of any
            // tied candidates, which is the N, E, S, W winner.
            let beats_best = match (mode, &best) {
                (_, None) => true,
                (TraceMode::AscendToMax, Some((_, b))) => v > *b,
                (TraceMode::DescendToMin, Some((_, b))) => v < *b,
            };
            if improves && beats_best {
                best = Some((n, v));
            }
        }
        match best {
            Some((n, _)) => {
                cells.push(n);
                current = n;
            }
            None => return Err(Error::LocalExtremum(current)),
        }
    }
    Ok(Path::new(cells))
}

/// Follow stored pointers from `start` to the structure's root.
///
/// The step budget equals the grid cell count, so a corrupted pointer map with
/// a cycle fails with `CycleDetected` instead of looping forever.
pub fn follow_pointers(grid: &impl PointerGrid, start: Coord) -> Result<Path> {
    if !grid.covered(start) {
        return Err(Error::Unreachable);
    }
    let budget = grid.width() * grid.height();
    let mut cells = vec![start];
    let mut current = start;
    while current != grid.root() {
        if cells.len() > budget {
            return Err(Error::CycleDetected);
        }
        let Some(d) = grid.pointer(current) else {
            return Err(Error::Unreachable);
        };
        let Some(next) = d.step(current, grid.width(), grid.height()) else {
            return Err(Error::Unreachable);
        };
        if !grid.covered(next) {
            return Err(Error::Unreachable);
        }
        cells.push(next);
        current = next;
    }
    Ok(Path::new(cells))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldKind, ScalarField};

    fn corridor_field(maze: &Maze) -> ScalarField {
        let mut field = ScalarField::zeros(maze, FieldKind::Potential);
        for c in maze.channel_cells() {
            field.set(c, c.col as f64);
        }
        field
    }

    #[test]
    fn single_cell_when_start_is_goal() {
        let maze = Maze::parse("S.D").unwrap();
        let field = corridor_field(&maze);
        let p = greedy_trace(
            &field,
            &maze,
            maze.source(),
            maze.source(),
            TraceMode::AscendToMax,
            10,
        )
        .unwrap();
        assert_eq!(p.cells(), &[maze.source()]);
        assert_eq!(p.len(), 0);
    }

    #[test]
    fn ascends_a_monotone_corridor() {
        let maze = Maze::parse("S...D").unwrap();
        let field = corridor_field(&maze);
        let p = greedy_trace(
            &field,
            &maze,
            maze.source(),
            maze.destination(),
            TraceMode::AscendToMax,
            100,
        )
        .unwrap();
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn constant_field_is_a_local_extremum_immediately() {
        let maze = Maze::parse("S...D").unwrap();
        let field = ScalarField::zeros(&maze, FieldKind::Potential);
        let err = greedy_trace(
            &field,
            &maze,
            maze.source(),
            maze.destination(),
            TraceMode::DescendToMin,
            100,
        )
        .unwrap_err();
        assert_eq!(err, Error::LocalExtremum(maze.source()));
    }

    #[test]
    fn step_budget_is_enforced() {
        let maze = Maze::parse("S...D").unwrap();
        let field = corridor_field(&maze);
        let err = greedy_trace(
            &field,
            &maze,
            maze.source(),
            maze.destination(),
            TraceMode::AscendToMax,
            2,
        )
        .unwrap_err();
        assert_eq!(err, Error::StepBudgetExceeded(2));
    }
}
