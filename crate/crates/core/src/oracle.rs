//! Reference shortest-path machinery: breadth-first wave labeling from an
//! origin cell, monotone label descent, the induced spanning tree, and an
//! exhaustive simple-path enumerator used as a test oracle.
//!
//! Every engine in this crate is judged against these functions.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::maze::{Coord, Direction, Maze};
use crate::path::Path;
use crate::trace::{self, PointerGrid, TraceMode, ValueGrid};

/// Breadth-first distance labels from an origin cell.
///
/// Walls and unreachable cells are unlabeled, a distinct state rather than a
/// sentinel number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceField {
    width: usize,
    height: usize,
    labels: Vec<Option<u32>>,
    origin: Coord,
}

impl DistanceField {
    pub fn origin(&self) -> Coord {
        self.origin
    }

    pub fn label(&self, c: Coord) -> Option<u32> {
        if c.row < self.height && c.col < self.width {
            self.labels[c.row * self.width + c.col]
        } else {
            None
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Dump format: header `field <width> <height> origin <row> <col>`, then
    /// one row per line of integer labels, `-` for unlabeled cells.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "field {} {} origin {} {}\n",
            self.width, self.height, self.origin.row, self.origin.col
        );
        for row in 0..self.height {
            let mut tokens = Vec::with_capacity(self.width);
            for col in 0..self.width {
                match self.labels[row * self.width + col] {
                    Some(l) => tokens.push(l.to_string()),
                    None => tokens.push("-".to_string()),
                }
            }
            out.push_str(&tokens.join(" "));
            out.push('\n');
        }
        out
    }
}

impl ValueGrid for DistanceField {
    fn width(&self) -> usize {
        self.width
    }

    fn height(&self) -> usize {
        self.height
    }

    fn value(&self, c: Coord) -> Option<f64> {
        self.label(c).map(f64::from)
    }
}

/// Per-cell direction toward the parent in a shortest-path tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentMap {
    width: usize,
    height: usize,
    parents: Vec<Option<Direction>>,
    covered: Vec<bool>,
    root: Coord,
}

impl ParentMap {
    /// Empty map rooted at `root`; only the root is covered.
    pub fn new(width: usize, height: usize, root: Coord) -> ParentMap {
        let mut covered = vec![false; width * height];
        covered[root.row * width + root.col] = true;
        ParentMap {
            width,
            height,
            parents: vec![None; width * height],
            covered,
            root,
        }
    }

    /// Set the parent direction of a non-root cell.
    pub fn set(&mut self, c: Coord, toward_parent: Direction) {
        let i = c.row * self.width + c.col;
        self.parents[i] = Some(toward_parent);
        self.covered[i] = true;
    }

    pub fn parent(&self, c: Coord) -> Option<Direction> {
        self.parents[c.row * self.width + c.col]
    }
}

impl PointerGrid for ParentMap {
    fn width(&self) -> usize {
        self.width
    }

    fn height(&self) -> usize {
        self.height
    }

    fn root(&self) -> Coord {
        self.root
    }

    fn pointer(&self, c: Coord) -> Option<Direction> {
        self.parents[c.row * self.width + c.col]
    }

    fn covered(&self, c: Coord) -> bool {
        c.row < self.height && c.col < self.width && self.covered[c.row * self.width + c.col]
    }
}

/// Label every channel cell with its shortest channel distance from `origin`.
///
/// Breadth-first wavefront: the origin gets 0, its neighbors 1, and a cell at
/// label `i` labels its not-yet-labeled neighbors `i + 1`. Each cell is
/// labeled exactly once.
pub fn lee_label(maze: &Maze, origin: Coord) -> Result<DistanceField> {
    if !maze.is_channel(origin) {
        return Err(Error::WallQuery(origin));
    }
    let mut labels = vec![None; maze.cell_count()];
    labels[maze.index(origin)] = Some(0u32);
    let mut queue = VecDeque::new();
    queue.push_back(origin);
    while let Some(c) = queue.pop_front() {
        let next = labels[maze.index(c)].expect("queued cells are labeled") + 1;
        for d in Direction::ALL {
            if let Some(n) = d.step(c, maze.width(), maze.height()) {
                if maze.is_channel(n) && labels[maze.index(n)].is_none() {
                    labels[maze.index(n)] = Some(next);
                    queue.push_back(n);
                }
            }
        }
    }
    Ok(DistanceField {
        width: maze.width(),
        height: maze.height(),
        labels,
        origin,
    })
}

/// Descend labels from `source` to the field origin.
///
/// Each step moves to the N, E, S, W-first neighbor with the minimal label;
/// the result length equals `label(source)` exactly.
pub fn lee_trace(field: &DistanceField, maze: &Maze, source: Coord) -> Result<Path> {
    if field.label(source).is_none() {
        return Err(Error::Unreachable);
    }
    let budget = field.width * field.height;
    trace::greedy_trace(
        field,
        maze,
        source,
        field.origin,
        TraceMode::DescendToMin,
        budget,
    )
}

/// The one-destination-many-sources shortest-path tree of a distance field.
///
/// Each labeled cell points to its tie-break-first neighbor with a label one
/// less; following pointers from any labeled cell reaches the origin.
pub fn spanning_tree(field: &DistanceField, maze: &Maze) -> ParentMap {
    let mut map = ParentMap::new(field.width, field.height, field.origin);
    for row in 0..field.height {
        for col in 0..field.width {
            let c = Coord::new(row, col);
            let Some(label) = field.label(c) else { continue };
            if c == field.origin {
                continue;
            }
            for d in Direction::ALL {
                if let Some(n) = d.step(c, maze.width(), maze.height()) {
                    if maze.is_channel(n) && field.label(n) == Some(label - 1) {
                        map.set(c, d);
                        break;
                    }
                }
            }
        }
    }
    map
}

/// Default cell-count cap for [`enumerate_simple_paths`].
pub const ENUMERATION_CAP: usize = 81;

/// All simple source-to-destination paths by exhaustive depth-first search.
///
/// Exponential by nature; refuses mazes larger than `cap` cells. This is the
/// independent oracle the rest of the test suite leans on, so it deliberately
/// shares no machinery with `lee_label`.
pub fn enumerate_simple_paths(maze: &Maze, cap: usize) -> Result<Vec<Path>> {
    if maze.cell_count() > cap {
        return Err(Error::TooLarge {
            cells: maze.cell_count(),
            cap,
        });
    }
    let mut paths = Vec::new();
    let mut on_path = vec![false; maze.cell_count()];
    let mut stack = vec![maze.source()];
    on_path[maze.index(maze.source())] = true;
    explore(maze, &mut stack, &mut on_path, &mut paths);
    Ok(paths)
}

fn explore(maze: &Maze, stack: &mut Vec<Coord>, on_path: &mut [bool], paths: &mut Vec<Path>) {
    let current = *stack.last().expect("stack never empty");
    if current == maze.destination() {
        paths.push(Path::new(stack.clone()));
        return;
    }
    for d in Direction::ALL {
        let Some(n) = d.step(current, maze.width(), maze.height()) else {
            continue;
        };
        if !maze.is_channel(n) || on_path[maze.index(n)] {
            continue;
        }
        on_path[maze.index(n)] = true;
        stack.push(n);
        explore(maze, stack, on_path, paths);
        stack.pop();
        on_path[maze.index(n)] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maze::MazeKind;

    #[test]
    fn corridor_labels_count_up_from_origin() {
        let maze = Maze::parse("D....S").unwrap();
        let field = lee_label(&maze, maze.destination()).unwrap();
        for col in 0..6 {
            assert_eq!(field.label(Coord::new(0, col)), Some(col as u32));
        }
        assert_eq!(field.label(maze.source()), Some(5));
    }

    #[test]
    fn origin_neighbors_get_label_one() {
        let maze = Maze::parse("...\n.D.\n.S.").unwrap();
        let field = lee_label(&maze, maze.destination()).unwrap();
        for n in maze.neighbors(maze.destination()).unwrap() {
            assert_eq!(field.label(n), Some(1));
        }
    }

    #[test]
    fn labeling_a_wall_is_an_error() {
        let maze = Maze::parse("S#D").unwrap();
        assert!(matches!(
            lee_label(&maze, Coord::new(0, 1)).unwrap_err(),
            Error::WallQuery(_)
        ));
    }

    #[test]
    fn walls_and_unreachable_cells_stay_unlabeled() {
        let maze = Maze::parse("S#D").unwrap();
        let field = lee_label(&maze, maze.source()).unwrap();
        assert_eq!(field.label(Coord::new(0, 1)), None);
        assert_eq!(field.label(maze.destination()), None);
    }

    #[test]
    fn trace_from_origin_is_a_single_cell() {
        let maze = Maze::parse("D....S").unwrap();
        let field = lee_label(&maze, maze.destination()).unwrap();
        let p = lee_trace(&field, &maze, maze.destination()).unwrap();
        assert_eq!(p.cells().len(), 1);
        assert_eq!(p.len(), 0);
    }

    #[test]
    fn trace_walks_the_corridor() {
        let maze = Maze::parse("D....S").unwrap();
        let field = lee_label(&maze, maze.destination()).unwrap();
        let p = lee_trace(&field, &maze, maze.source()).unwrap();
        assert_eq!(p.cells().len(), 6);
        assert_eq!(p.first(), Some(maze.source()));
        assert_eq!(p.last(), Some(maze.destination()));
    }

    #[test]
    fn trace_of_unlabeled_source_is_unreachable() {
        let maze = Maze::parse("S#D").unwrap();
        let field = lee_label(&maze, maze.destination()).unwrap();
        assert_eq!(
            lee_trace(&field, &maze, maze.source()).unwrap_err(),
            Error::Unreachable
        );
    }

    #[test]
    fn spanning_tree_of_single_cell_is_root_only() {
        let maze = Maze::generate(3, 3, MazeKind::Perfect, 0).unwrap();
        let field = lee_label(&maze, maze.destination()).unwrap();
        let map = spanning_tree(&field, &maze);
        assert_eq!(map.root(), maze.destination());
        assert_eq!(map.parent(maze.destination()), None);
    }

    #[test]
    fn spanning_tree_on_corridor_chains_to_origin() {
        let maze = Maze::parse("D....S").unwrap();
        let field = lee_label(&maze, maze.destination()).unwrap();
        let map = spanning_tree(&field, &maze);
        for col in 1..6 {
            assert_eq!(map.parent(Coord::new(0, col)), Some(Direction::West));
        }
        let p = trace::follow_pointers(&map, maze.source()).unwrap();
        assert_eq!(p.len() as u32, field.label(maze.source()).unwrap());
    }

    #[test]
    fn corridor_has_exactly_one_path() {
        let maze = Maze::parse("S.D").unwrap();
        let paths = enumerate_simple_paths(&maze, ENUMERATION_CAP).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].len(), 2);
    }

    #[test]
    fn open_three_by_three_has_six_shortest_paths() {
        let maze = Maze::parse("S..\n...\n..D").unwrap();
        let paths = enumerate_simple_paths(&maze, ENUMERATION_CAP).unwrap();
        let shortest = paths.iter().map(Path::len).min().unwrap();
        assert_eq!(shortest, 4);
        assert_eq!(paths.iter().filter(|p| p.len() == shortest).count(), 6);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let maze = Maze::generate(11, 11, MazeKind::Perfect, 0).unwrap();
        assert!(matches!(
            enumerate_simple_paths(&maze, ENUMERATION_CAP).unwrap_err(),
            Error::TooLarge { .. }
        ));
    }

    #[test]
    fn dump_has_header_and_dashes() {
        let maze = Maze::parse("S#D").unwrap();
        let field = lee_label(&maze, maze.source()).unwrap();
        assert_eq!(field.dump(), "field 3 1 origin 0 0\n0 - -\n");
    }
}
