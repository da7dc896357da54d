//! Temporal-gradient engines.
//!
//! A front launched at an origin cell reaches every other cell along a
//! fastest route. Three variants share the arrival-time read-out: a
//! delay-weighted wavefront (each cell holds the signal for its own delay, as
//! an elevation map would), an excitable-media automaton whose single wave
//! sweeps the channels once, and the pointer field a propagating front leaves
//! behind, from which paths are recovered by walking pointers backwards.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use crate::error::{Error, Result};
use crate::grid::ChannelSystem;
use crate::maze::{Cell, Coord, Direction, Maze};
use crate::path::Path;
use crate::trace::{self, PointerGrid, TraceMode, ValueGrid};

/// Positive per-cell signal delay in time units; uniform 1 by default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayMap {
    width: usize,
    height: usize,
    delays: Vec<u32>,
}

impl DelayMap {
    pub fn uniform(maze: &Maze, delay: u32) -> DelayMap {
        assert!(delay >= 1, "delays must be at least 1");
        DelayMap {
            width: maze.width(),
            height: maze.height(),
            delays: vec![delay; maze.cell_count()],
        }
    }

    /// Per-cell delays from a function of the coordinate, clamped to >= 1.
    pub fn from_fn(maze: &Maze, f: impl Fn(Coord) -> u32) -> DelayMap {
        let mut delays = vec![1u32; maze.cell_count()];
        for c in maze.channel_cells() {
            delays[maze.index(c)] = f(c).max(1);
        }
        DelayMap {
            width: maze.width(),
            height: maze.height(),
            delays,
        }
    }

    pub fn get(&self, c: Coord) -> u32 {
        self.delays[c.row * self.width + c.col]
    }
}

/// First arrival time and incoming-direction pointer per cell.
///
/// The pointer names the neighbor the first signal came from, so stepping
/// along pointers walks back to the origin; the pointer graph is the
/// spanning tree the front grew.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalField {
    width: usize,
    height: usize,
    arrival: Vec<Option<u64>>,
    pointer: Vec<Option<Direction>>,
    origin: Coord,
}

impl ArrivalField {
    pub fn origin(&self) -> Coord {
        self.origin
    }

    pub fn arrival(&self, c: Coord) -> Option<u64> {
        if c.row < self.height && c.col < self.width {
            self.arrival[c.row * self.width + c.col]
        } else {
            None
        }
    }

    pub fn pointer_at(&self, c: Coord) -> Option<Direction> {
        self.pointer[c.row * self.width + c.col]
    }

    pub fn max_arrival(&self) -> Option<u64> {
        self.arrival.iter().flatten().max().copied()
    }

    /// Dump: header, arrival grid (`-` for unreached), a `pointers` line,
    /// then the pointer grid (`o` marks the origin).
    pub fn dump(&self) -> String {
        let mut out = format!(
            "field {} {} origin {} {}\n",
            self.width, self.height, self.origin.row, self.origin.col
        );
        for row in 0..self.height {
            let mut tokens = Vec::with_capacity(self.width);
            for col in 0..self.width {
                match self.arrival[row * self.width + col] {
                    Some(t) => tokens.push(t.to_string()),
                    None => tokens.push("-".to_string()),
                }
            }
            out.push_str(&tokens.join(" "));
            out.push('\n');
        }
        out.push_str("pointers\n");
        for row in 0..self.height {
            let mut line = String::with_capacity(self.width);
            for col in 0..self.width {
                let c = Coord::new(row, col);
                if c == self.origin {
                    line.push('o');
                } else {
                    match self.pointer[row * self.width + col] {
                        Some(d) => line.push(d.glyph()),
                        None => line.push('-'),
                    }
                }
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

impl ValueGrid for ArrivalField {
    fn width(&self) -> usize {
        self.width
    }

    fn height(&self) -> usize {
        self.height
    }

    fn value(&self, c: Coord) -> Option<f64> {
        self.arrival(c).map(|t| t as f64)
    }
}

impl PointerGrid for ArrivalField {
    fn width(&self) -> usize {
        self.width
    }

    fn height(&self) -> usize {
        self.height
    }

    fn root(&self) -> Coord {
        self.origin
    }

    fn pointer(&self, c: Coord) -> Option<Direction> {
        self.pointer[c.row * self.width + c.col]
    }

    fn covered(&self, c: Coord) -> bool {
        self.arrival(c).is_some()
    }
}

/// Propagate a signal from `origin`; each cell delays it by its own delay.
///
/// A cell pays its delay on entry: a first arrival at time `t` through a
/// neighbor settled at `t - delay(cell)` stores that neighbor's direction and
/// ignores all later signals. Simultaneous first arrivals store the N, E, S,
/// W-first direction. Uniform delays reduce to breadth-first labeling.
pub fn weighted_wavefront(maze: &Maze, delays: &DelayMap, origin: Coord) -> Result<ArrivalField> {
    if !maze.is_channel(origin) {
        return Err(Error::WallQuery(origin));
    }
    let sys = ChannelSystem::build(maze);
    let n = sys.len();
    let origin_id = sys.id(maze, origin);
    let mut arrival: Vec<Option<u64>> = vec![None; n];
    arrival[origin_id] = Some(0);
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
    heap.push(Reverse((0, origin_id)));
    let mut settled = vec![false; n];
    while let Some(Reverse((t, i))) = heap.pop() {
        if settled[i] {
            continue;
        }
        settled[i] = true;
        for &j in &sys.neighbors[i] {
            if j < 0 {
                continue;
            }
            let j = j as usize;
            let candidate = t + u64::from(delays.get(sys.cells[j]));
            if arrival[j].map(|cur| candidate < cur).unwrap_or(true) {
                arrival[j] = Some(candidate);
                heap.push(Reverse((candidate, j)));
            }
        }
    }

    // Pointer pass: first N, E, S, W neighbor whose settled arrival explains
    // this cell's arrival. Identical to recording the first incoming signal.
    let mut pointer: Vec<Option<Direction>> = vec![None; maze.cell_count()];
    let mut arrival_grid: Vec<Option<u64>> = vec![None; maze.cell_count()];
    for (i, &c) in sys.cells.iter().enumerate() {
        arrival_grid[maze.index(c)] = arrival[i];
    }
    for (i, &c) in sys.cells.iter().enumerate() {
        if i == origin_id {
            continue;
        }
        let Some(t) = arrival[i] else { continue };
        let own_delay = u64::from(delays.get(c));
        for (k, d) in Direction::ALL.iter().enumerate() {
            let j = sys.neighbors[i][k];
            if j < 0 {
                continue;
            }
            if arrival[j as usize] == t.checked_sub(own_delay) {
                pointer[maze.index(c)] = Some(*d);
                break;
            }
        }
    }
    Ok(ArrivalField {
        width: maze.width(),
        height: maze.height(),
        arrival: arrival_grid,
        pointer,
        origin,
    })
}

/// Excitable-media parameters: post-excitation refractory steps and the
/// number of excited neighbors needed to fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaParams {
    pub refractory: u32,
    pub threshold: u32,
}

impl Default for CaParams {
    fn default() -> Self {
        CaParams {
            refractory: 3,
            threshold: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CaState {
    Resting,
    Excited,
    Refractory(u32),
}

/// Stepwise excitable-media automaton over the channel cells.
///
/// Channels are excitable, walls are not. A resting cell fires when at least
/// `threshold` of its neighbors are excited; an excited cell stays excited
/// for one step and then rests through `refractory` steps, which keeps a
/// single wave moving strictly forward. Colliding fronts annihilate.
pub struct CaSimulation {
    maze: Maze,
    params: CaParams,
    states: Vec<CaState>,
    arrival: Vec<Option<u64>>,
    pointer: Vec<Option<Direction>>,
    origin: Coord,
    time: u64,
    active: usize,
}

impl CaSimulation {
    pub fn new(maze: &Maze, origin: Coord, params: CaParams) -> Result<CaSimulation> {
        if !maze.is_channel(origin) {
            return Err(Error::WallQuery(origin));
        }
        assert!(params.refractory >= 1, "refractory must be at least 1");
        assert!(params.threshold >= 1, "threshold must be at least 1");
        let mut states = vec![CaState::Resting; maze.cell_count()];
        let mut arrival = vec![None; maze.cell_count()];
        states[maze.index(origin)] = CaState::Excited;
        arrival[maze.index(origin)] = Some(0);
        Ok(CaSimulation {
            maze: maze.clone(),
            params,
            states,
            arrival,
            pointer: vec![None; maze.cell_count()],
            origin,
            time: 0,
            active: 1,
        })
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    /// True while any cell is excited.
    pub fn is_active(&self) -> bool {
        self.active > 0
    }

    /// One synchronous update of every channel cell.
    pub fn step(&mut self) {
        let (width, height) = (self.maze.width(), self.maze.height());
        let mut next = self.states.clone();
        let mut active = 0usize;
        for c in self.maze.channel_cells() {
            let i = self.maze.index(c);
            match self.states[i] {
                CaState::Excited => {
                    next[i] = CaState::Refractory(self.params.refractory);
                }
                CaState::Refractory(k) => {
                    next[i] = if k > 1 {
                        CaState::Refractory(k - 1)
                    } else {
                        CaState::Resting
                    };
                }
                CaState::Resting => {
                    let mut excited = 0u32;
                    let mut first: Option<Direction> = None;
                    for d in Direction::ALL {
                        if let Some(n) = d.step(c, width, height) {
                            if self.maze.is_channel(n)
                                && self.states[self.maze.index(n)] == CaState::Excited
                            {
                                excited += 1;
                                first.get_or_insert(d);
                            }
                        }
                    }
                    if excited >= self.params.threshold {
                        next[i] = CaState::Excited;
                        active += 1;
                        if self.arrival[i].is_none() {
                            self.arrival[i] = Some(self.time + 1);
                            self.pointer[i] = first;
                        }
                    }
                }
            }
        }
        self.states = next;
        self.active = active;
        self.time += 1;
    }

    /// ASCII frame: `*` excited, `r` refractory, `.` resting, `#` wall.
    pub fn frame(&self) -> String {
        let mut out = String::with_capacity((self.maze.width() + 1) * self.maze.height());
        for row in 0..self.maze.height() {
            for col in 0..self.maze.width() {
                let c = Coord::new(row, col);
                let glyph = match self.maze.cell(c) {
                    Cell::Wall => '#',
                    Cell::Channel => match self.states[self.maze.index(c)] {
                        CaState::Excited => '*',
                        CaState::Refractory(_) => 'r',
                        CaState::Resting => '.',
                    },
                };
                out.push(glyph);
            }
            out.push('\n');
        }
        out
    }

    pub fn into_arrival_field(self) -> ArrivalField {
        ArrivalField {
            width: self.maze.width(),
            height: self.maze.height(),
            arrival: self.arrival,
            pointer: self.pointer,
            origin: self.origin,
        }
    }
}

/// Run the excitable automaton until quiescent, recording first excitation
/// times and incoming directions.
///
/// Fronts still active after `max_steps` (possible with `threshold > 1`
/// geometries that re-enter) fail with `NotQuiescent`.
pub fn excitable_ca(
    maze: &Maze,
    origin: Coord,
    params: CaParams,
    max_steps: usize,
) -> Result<ArrivalField> {
    let mut sim = CaSimulation::new(maze, origin, params)?;
    while sim.is_active() {
        if sim.time() >= max_steps as u64 {
            return Err(Error::NotQuiescent(max_steps));
        }
        sim.step();
    }
    Ok(sim.into_arrival_field())
}

/// Partition reached cells into arrival-time bands of the given width.
///
/// The k-th set holds cells with arrival in `[k*interval, (k+1)*interval)`;
/// empty bands are preserved so indexes align across fields.
pub fn isochrones(field: &ArrivalField, interval: u64) -> Vec<BTreeSet<Coord>> {
    assert!(interval >= 1, "interval must be positive");
    let Some(max) = field.max_arrival() else {
        return Vec::new();
    };
    let bands = (max / interval + 1) as usize;
    let mut sets = vec![BTreeSet::new(); bands];
    for row in 0..field.height {
        for col in 0..field.width {
            let c = Coord::new(row, col);
            if let Some(t) = field.arrival(c) {
                sets[(t / interval) as usize].insert(c);
            }
        }
    }
    sets
}

/// Intersect forward and backward wavefronts into the geodesic set.
///
/// `G = { c : arrival_src(c) + arrival_dst(c) = arrival_src(destination) }`
/// is exactly the union of all shortest routes under uniform delays. Returns
/// the set together with the tie-break path through it.
pub fn isochrone_intersection_path(
    maze: &Maze,
    from_source: &ArrivalField,
    from_dest: &ArrivalField,
) -> Result<(BTreeSet<Coord>, Path)> {
    let total = from_source
        .arrival(maze.destination())
        .ok_or(Error::Unreachable)?;
    let mut geodesic = BTreeSet::new();
    for c in maze.channel_cells() {
        if let (Some(a), Some(b)) = (from_source.arrival(c), from_dest.arrival(c)) {
            if a + b == total {
                geodesic.insert(c);
            }
        }
    }
    // Descending the backward field by one per step keeps the walk inside the
    // geodesic set, so the shared tie-break selects the canonical route.
    let path = trace::greedy_trace(
        from_dest,
        maze,
        maze.source(),
        maze.destination(),
        TraceMode::DescendToMin,
        maze.cell_count(),
    )?;
    Ok((geodesic, path))
}

/// Recover the path from `start` back to the field origin by following the
/// stored incoming directions.
pub fn pointer_trace(field: &ArrivalField, start: Coord) -> Result<Path> {
    trace::follow_pointers(field, start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn uniform_corridor_arrivals_count_up() {
        let maze = Maze::parse("S....D").unwrap();
        let field =
            weighted_wavefront(&maze, &DelayMap::uniform(&maze, 1), maze.source()).unwrap();
        for col in 0..6 {
            assert_eq!(field.arrival(Coord::new(0, col)), Some(col as u64));
        }
    }

    #[test]
    fn slow_cell_offsets_downstream_arrivals() {
        let maze = Maze::parse("S....D").unwrap();
        let delays = DelayMap::from_fn(&maze, |c| if c.col == 2 { 5 } else { 1 });
        let field = weighted_wavefront(&maze, &delays, maze.source()).unwrap();
        assert_eq!(field.arrival(Coord::new(0, 1)), Some(1));
        assert_eq!(field.arrival(Coord::new(0, 2)), Some(6));
        for col in 3..6 {
            assert_eq!(field.arrival(Coord::new(0, col)), Some(col as u64 + 4));
        }
    }

    #[test]
    fn uniform_wavefront_matches_lee_labels() {
        let maze = Maze::generate(11, 11, crate::maze::MazeKind::Braided(0.3), 2).unwrap();
        let field =
            weighted_wavefront(&maze, &DelayMap::uniform(&maze, 1), maze.destination()).unwrap();
        let labels = oracle::lee_label(&maze, maze.destination()).unwrap();
        for c in maze.channel_cells() {
            assert_eq!(field.arrival(c), labels.label(c).map(u64::from), "{c}");
        }
    }

    #[test]
    fn wavefront_from_wall_fails() {
        let maze = Maze::parse("S#D").unwrap();
        assert!(matches!(
            weighted_wavefront(&maze, &DelayMap::uniform(&maze, 1), Coord::new(0, 1)).unwrap_err(),
            Error::WallQuery(_)
        ));
    }

    #[test]
    fn ca_corridor_arrival_is_cell_index_and_wave_dies() {
        let maze = Maze::parse("S....D").unwrap();
        let field = excitable_ca(&maze, maze.source(), CaParams::default(), 100).unwrap();
        for col in 0..6 {
            assert_eq!(field.arrival(Coord::new(0, col)), Some(col as u64));
        }
    }

    #[test]
    fn ca_reports_not_quiescent_on_tight_budget() {
        let maze = Maze::parse("S....D").unwrap();
        assert_eq!(
            excitable_ca(&maze, maze.source(), CaParams::default(), 2).unwrap_err(),
            Error::NotQuiescent(2)
        );
    }

    #[test]
    fn ca_never_excites_a_cell_twice_on_a_loop() {
        let maze = Maze::parse("S...\n.##D\n....").unwrap();
        let mut sim = CaSimulation::new(&maze, maze.source(), CaParams::default()).unwrap();
        let mut excitations = vec![0u32; maze.cell_count()];
        excitations[maze.index(maze.source())] = 1;
        while sim.is_active() {
            let before = sim.arrival.clone();
            sim.step();
            for c in maze.channel_cells() {
                let i = maze.index(c);
                if before[i].is_none() && sim.arrival[i].is_some() {
                    excitations[i] += 1;
                }
            }
            assert!(sim.time() < 1_000);
        }
        for c in maze.channel_cells() {
            assert!(excitations[maze.index(c)] <= 1, "{c} excited twice");
        }
    }

    #[test]
    fn isochrones_partition_reached_cells() {
        let maze = Maze::parse("S....D").unwrap();
        let field =
            weighted_wavefront(&maze, &DelayMap::uniform(&maze, 1), maze.source()).unwrap();
        let bands = isochrones(&field, 1);
        assert_eq!(bands.len(), 6);
        for (k, band) in bands.iter().enumerate() {
            assert_eq!(band.len(), 1, "band {k}");
        }
        let union: BTreeSet<Coord> = bands.iter().flatten().copied().collect();
        assert_eq!(union.len(), 6);
    }

    #[test]
    fn open_grid_isochrones_are_antidiagonal_bands() {
        let maze = Maze::parse("S..\n...\n..D").unwrap();
        let field =
            weighted_wavefront(&maze, &DelayMap::uniform(&maze, 1), maze.source()).unwrap();
        let bands = isochrones(&field, 1);
        let sizes: Vec<usize> = bands.iter().map(BTreeSet::len).collect();
        assert_eq!(sizes, vec![1, 2, 3, 2, 1]);
    }

    #[test]
    fn corridor_geodesic_set_is_everything() {
        let maze = Maze::parse("S....D").unwrap();
        let uniform = DelayMap::uniform(&maze, 1);
        let fwd = weighted_wavefront(&maze, &uniform, maze.source()).unwrap();
        let bwd = weighted_wavefront(&maze, &uniform, maze.destination()).unwrap();
        let (set, path) = isochrone_intersection_path(&maze, &fwd, &bwd).unwrap();
        assert_eq!(set.len(), 6);
        assert_eq!(path.len(), 5);
    }

    #[test]
    fn pointer_trace_from_origin_is_single_cell() {
        let maze = Maze::parse("S....D").unwrap();
        let field =
            weighted_wavefront(&maze, &DelayMap::uniform(&maze, 1), maze.source()).unwrap();
        let p = pointer_trace(&field, maze.source()).unwrap();
        assert_eq!(p.cells().len(), 1);
    }

    #[test]
    fn pointer_trace_length_equals_arrival() {
        let maze = Maze::generate(9, 9, crate::maze::MazeKind::Perfect, 31).unwrap();
        let field =
            weighted_wavefront(&maze, &DelayMap::uniform(&maze, 1), maze.destination()).unwrap();
        for c in maze.channel_cells() {
            let p = pointer_trace(&field, c).unwrap();
            assert_eq!(p.len() as u64, field.arrival(c).unwrap(), "{c}");
        }
    }

    #[test]
    fn unreached_start_is_unreachable() {
        let maze = Maze::parse("S#D").unwrap();
        let field =
            weighted_wavefront(&maze, &DelayMap::uniform(&maze, 1), maze.source()).unwrap();
        assert_eq!(
            pointer_trace(&field, maze.destination()).unwrap_err(),
            Error::Unreachable
        );
    }
}
