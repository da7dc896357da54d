//! Resistance-gradient engines.
//!
//! A connected maze is read as a unit-resistor network over its channel
//! cells. One linear solve covers two physical narratives: electrical
//! potential between the endpoint electrodes, and the pressure field of a
//! viscous fluid pumped from the source to the destination (conductance of a
//! channel is inversely proportional to its length, which on the unit grid is
//! exactly the voltage analogy, so no separate solver exists for the fluidic
//! reading).
//!
//! On top of the potential solve sit three read-outs: greedy streamline
//! descent, current-magnitude hot paths (the software analog of watching the
//! maze through a thermal camera while current heats the conducting path),
//! and the tube flux-reinforcement dynamics of a foraging slime mould.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldKind, ScalarField};
use crate::grid::ChannelSystem;
use crate::maze::{Coord, Direction, Maze};
use crate::path::Path;
use crate::trace::{self, TraceMode};

/// How walls enter the discrete Laplace stencil.
///
/// `DirichletWalls` holds walls at potential zero so they sink current;
/// `NeumannWalls` treats walls as insulators excluded from the stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    DirichletWalls,
    NeumannWalls,
}

/// Convergence record of an iterative solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveDiagnostics {
    pub iterations: usize,
    /// Max-norm of the last sweep's update.
    pub final_residual: f64,
    pub converged: bool,
}

/// Relaxation scheme for the potential solve.
///
/// Jacobi is the default: its update is order-independent, so parallel sweeps
/// are bit-identical to sequential ones. Successive over-relaxation converges
/// far faster on long corridors and must reproduce the Jacobi field within
/// ten times the tolerance; it exists for large grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelaxationMethod {
    Jacobi,
    Sor { omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub method: RelaxationMethod,
    /// Run Jacobi sweeps data-parallel across cells. Identical results either
    /// way; ignored by SOR, which is inherently sequential.
    pub parallel: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: RelaxationMethod::Jacobi,
            parallel: false,
        }
    }
}

/// Convergence test on the per-sweep update norm.
///
/// A sweep update of `tol` does not mean the field is within `tol` of the
/// limit: the remaining error is the geometric tail of all future updates,
/// roughly `update * r / (1 - r)` at contraction ratio `r`. The rule
/// therefore estimates `r` from successive sweeps (two apart, which cancels
/// the parity oscillation of Jacobi on bipartite grids) and accepts once the
/// tail fits inside the tolerance, so "converged" means the field itself is
/// good to about `tol`, not just that progress stalled.
struct StopRule {
    tol: f64,
    older: [f64; 2],
    ratios: [f64; 2],
    sweeps: usize,
}

impl StopRule {
    fn new(tol: f64) -> StopRule {
        StopRule {
            tol,
            older: [f64::INFINITY; 2],
            ratios: [1.0; 2],
            sweeps: 0,
        }
    }

    fn converged(&mut self, residual: f64) -> bool {
        self.sweeps += 1;
        let two_back = self.older[1];
        self.older[1] = self.older[0];
        self.older[0] = residual;
        if residual == 0.0 {
            return true;
        }
        if two_back.is_finite() && two_back > 0.0 {
            self.ratios[1] = self.ratios[0];
            self.ratios[0] = (residual / two_back).sqrt();
        }
        if residual > self.tol {
            return false;
        }
        // Updates this deep below tol dominate any plausible tail.
        if residual <= self.tol * 1e-3 {
            return true;
        }
        let r = self.ratios[0].max(self.ratios[1]);
        self.sweeps >= 5 && r < 1.0 && residual * r / (1.0 - r) <= self.tol
    }
}

/// Near-optimal over-relaxation factor for a channel graph of `n` cells.
pub fn suggested_omega(n: usize) -> f64 {
    let n = n.max(2) as f64;
    2.0 / (1.0 + (std::f64::consts::PI / n).sin())
}

fn stencil(bc: BoundaryCondition, neighbors: &[i32; 4], x: &[f64], here: f64) -> f64 {
    let mut sum = 0.0;
    let mut count = 0u32;
    for &j in neighbors {
        if j >= 0 {
            sum += x[j as usize];
            count += 1;
        }
    }
    match bc {
        // Wall slots contribute value 0 with weight 1, so the denominator is
        // always the full stencil.
        BoundaryCondition::DirichletWalls => sum / 4.0,
        BoundaryCondition::NeumannWalls => {
            if count == 0 {
                here
            } else {
                sum / f64::from(count)
            }
        }
    }
}

/// Solve the discrete Laplace equation on the channel graph with the source
/// and destination pinned at `v_source` and `v_dest`.
///
/// Interior channel cells converge to the mean of their participating
/// stencil: Dirichlet walls join with value 0 and weight 1, Neumann walls are
/// excluded (no flux). Iterates until the max-norm update is at most `tol` or
/// `max_iter` sweeps have run; an unconverged field is returned flagged, not
/// discarded.
pub fn solve_potential(
    maze: &Maze,
    bc: BoundaryCondition,
    v_source: f64,
    v_dest: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(ScalarField, SolveDiagnostics)> {
    solve_potential_with(maze, bc, v_source, v_dest, tol, max_iter, SolveOptions::default())
}

pub fn solve_potential_with(
    maze: &Maze,
    bc: BoundaryCondition,
    v_source: f64,
    v_dest: f64,
    tol: f64,
    max_iter: usize,
    options: SolveOptions,
) -> Result<(ScalarField, SolveDiagnostics)> {
    assert!(tol > 0.0, "tolerance must be positive");
    if maze.source() == maze.destination() || v_source == v_dest {
        return Err(Error::InvalidEndpoints);
    }
    if !maze.is_connected() {
        return Err(Error::Unreachable);
    }
    let sys = ChannelSystem::build(maze);
    let n = sys.len();
    let src = sys.id(maze, maze.source());
    let dst = sys.id(maze, maze.destination());
    let mut pinned = vec![false; n];
    pinned[src] = true;
    pinned[dst] = true;

    let mut x = vec![0.0f64; n];
    x[src] = v_source;
    x[dst] = v_dest;

    let diag = match options.method {
        RelaxationMethod::Jacobi => {
            let mut next = x.clone();
            let mut rule = StopRule::new(tol);
            let mut iterations = 0;
            let mut residual = f64::INFINITY;
            let mut converged = false;
            while iterations < max_iter && !converged {
                iterations += 1;
                residual = jacobi_sweep(&sys, bc, &pinned, &x, &mut next, options.parallel);
                std::mem::swap(&mut x, &mut next);
                converged = rule.converged(residual);
            }
            SolveDiagnostics {
                iterations,
                final_residual: residual,
                converged,
            }
        }
        RelaxationMethod::Sor { omega } => {
            assert!(omega > 0.0 && omega < 2.0, "omega must lie in (0, 2)");
            let mut rule = StopRule::new(tol);
            let mut iterations = 0;
            let mut residual = f64::INFINITY;
            let mut converged = false;
            while iterations < max_iter && !converged {
                iterations += 1;
                residual = 0.0;
                for i in 0..n {
                    if pinned[i] {
                        continue;
                    }
                    let target = stencil(bc, &sys.neighbors[i], &x, x[i]);
                    let new = x[i] + omega * (target - x[i]);
                    residual = residual.max((new - x[i]).abs());
                    x[i] = new;
                }
                converged = rule.converged(residual);
            }
            SolveDiagnostics {
                iterations,
                final_residual: residual,
                converged,
            }
        }
    };

    let mut field = ScalarField::zeros(maze, FieldKind::Potential);
    for (i, &c) in sys.cells.iter().enumerate() {
        field.set(c, x[i]);
    }
    if bc == BoundaryCondition::DirichletWalls {
        field.set_wall_value(Some(0.0));
    }
    Ok((field, diag))
}

fn jacobi_sweep(
    sys: &ChannelSystem,
    bc: BoundaryCondition,
    pinned: &[bool],
    x: &[f64],
    next: &mut [f64],
    parallel: bool,
) -> f64 {
    let update = |i: usize| {
        if pinned[i] {
            x[i]
        } else {
            stencil(bc, &sys.neighbors[i], x, x[i])
        }
    };
    if parallel {
        next.par_iter_mut()
            .enumerate()
            .for_each(|(i, out)| *out = update(i));
        // Max of per-cell updates is order-independent, so the parallel
        // reduction is bit-identical to the sequential one.
        next.par_iter()
            .zip(x.par_iter())
            .map(|(a, b)| (a - b).abs())
            .reduce(|| 0.0, f64::max)
    } else {
        let mut residual = 0.0f64;
        for i in 0..next.len() {
            next[i] = update(i);
            residual = residual.max((next[i] - x[i]).abs());
        }
        residual
    }
}

/// Max-norm of the signed flow imbalance over interior channel cells.
///
/// At a converged potential every cell except the pinned endpoints satisfies
/// current conservation; this reports how far a field is from that.
pub fn kirchhoff_imbalance(potential: &ScalarField, maze: &Maze, bc: BoundaryCondition) -> f64 {
    let mut worst = 0.0f64;
    for c in maze.channel_cells() {
        if c == maze.source() || c == maze.destination() {
            continue;
        }
        let here = potential.get(c).unwrap_or(0.0);
        let mut net = 0.0;
        for d in Direction::ALL {
            match d.step(c, maze.width(), maze.height()) {
                Some(n) if maze.is_channel(n) => {
                    net += potential.get(n).unwrap_or(0.0) - here;
                }
                _ => {
                    if bc == BoundaryCondition::DirichletWalls {
                        net += 0.0 - here;
                    }
                }
            }
        }
        worst = worst.max(net.abs());
    }
    worst
}

/// Per-cell current magnitude of a converged potential.
///
/// Every cell averages its absolute in- and out-flow: half the sum of
/// absolute edge flows plus half the absolute net flow. The net term vanishes
/// on interior cells by current conservation and accounts for the externally
/// injected current at the two terminals, so a series corridor reads one
/// uniform magnitude end to end.
pub fn current_field(potential: &ScalarField, maze: &Maze, bc: BoundaryCondition) -> ScalarField {
    let mut out = ScalarField::zeros(maze, FieldKind::Current);
    for c in maze.channel_cells() {
        let here = potential.get(c).unwrap_or(0.0);
        let mut total = 0.0;
        let mut net = 0.0;
        for d in Direction::ALL {
            match d.step(c, maze.width(), maze.height()) {
                Some(n) if maze.is_channel(n) => {
                    let dv = here - potential.get(n).unwrap_or(0.0);
                    total += dv.abs();
                    net += dv;
                }
                _ => {
                    if bc == BoundaryCondition::DirichletWalls {
                        total += here.abs();
                        net += here;
                    }
                }
            }
        }
        out.set(c, (total + net.abs()) / 2.0);
    }
    out
}

/// Cells whose current magnitude clears a quantile threshold, plus the
/// source-to-destination route they contain.
#[derive(Debug, Clone)]
pub struct HotPath {
    pub cells: BTreeSet<Coord>,
    pub threshold: f64,
    pub path: Path,
}

/// Threshold the current magnitudes at the given quantile and extract the
/// route inside the surviving cell set.
///
/// The bright-cell set is connected source to destination by a breadth-first
/// search restricted to the set; if no route survives the threshold the call
/// fails with `DisconnectedHotSet`, which signals a quantile retry.
pub fn extract_hot_path(currents: &ScalarField, maze: &Maze, quantile: f64) -> Result<HotPath> {
    assert!(
        quantile > 0.0 && quantile < 1.0,
        "quantile must lie in (0, 1)"
    );
    let mut magnitudes: Vec<f64> = maze
        .channel_cells()
        .map(|c| currents.get(c).unwrap_or(0.0))
        .collect();
    magnitudes.sort_by(f64::total_cmp);
    let rank = ((quantile * magnitudes.len() as f64).ceil() as usize)
        .clamp(1, magnitudes.len());
    let threshold = magnitudes[rank - 1];
    // Magnitudes within solver noise of the threshold count as tied with it,
    // so a physically uniform current keeps the whole run of cells.
    let slack = 1e-6 * magnitudes.last().copied().unwrap_or(0.0);
    let cells: BTreeSet<Coord> = maze
        .channel_cells()
        .filter(|&c| currents.get(c).unwrap_or(0.0) >= threshold - slack)
        .collect();
    let path = path_within(maze, |c| cells.contains(&c)).ok_or(Error::DisconnectedHotSet)?;
    Ok(HotPath {
        cells,
        threshold,
        path,
    })
}

/// Shortest source-to-destination path restricted to `keep` cells, N, E, S, W
/// tie-break, or `None` when the restriction disconnects the endpoints.
fn path_within(maze: &Maze, keep: impl Fn(Coord) -> bool) -> Option<Path> {
    let (source, destination) = (maze.source(), maze.destination());
    if !keep(source) || !keep(destination) {
        return None;
    }
    let mut parent: Vec<Option<Coord>> = vec![None; maze.cell_count()];
    let mut seen = vec![false; maze.cell_count()];
    seen[maze.index(source)] = true;
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(c) = queue.pop_front() {
        if c == destination {
            let mut cells = vec![destination];
            let mut cursor = destination;
            while let Some(p) = parent[maze.index(cursor)] {
                cells.push(p);
                cursor = p;
            }
            cells.reverse();
            return Some(Path::new(cells));
        }
        for d in Direction::ALL {
            let Some(n) = d.step(c, maze.width(), maze.height()) else {
                continue;
            };
            if maze.is_channel(n) && keep(n) && !seen[maze.index(n)] {
                seen[maze.index(n)] = true;
                parent[maze.index(n)] = Some(c);
                queue.push_back(n);
            }
        }
    }
    None
}

/// Greedy potential descent from `start` to the maze destination.
///
/// Ties resolve in N, E, S, W order with exact comparison; a plateau or
/// interior minimum fails with `LocalExtremum` rather than guessing.
pub fn trace_streamline(potential: &ScalarField, maze: &Maze, start: Coord) -> Result<Path> {
    trace::greedy_trace(
        potential,
        maze,
        start,
        maze.destination(),
        TraceMode::DescendToMin,
        maze.cell_count(),
    )
}

/// Per-edge conductivity of the tube network, one value for each adjacent
/// pair of channel cells. Edge lengths are 1 on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeConductivity {
    width: usize,
    height: usize,
    /// Edge from a cell to its east neighbor, grid-indexed by the west cell.
    horizontal: Vec<Option<f64>>,
    /// Edge from a cell to its south neighbor, grid-indexed by the north cell.
    vertical: Vec<Option<f64>>,
}

impl EdgeConductivity {
    fn uniform(maze: &Maze, value: f64) -> EdgeConductivity {
        let mut horizontal = vec![None; maze.cell_count()];
        let mut vertical = vec![None; maze.cell_count()];
        for c in maze.channel_cells() {
            if let Some(e) = Direction::East.step(c, maze.width(), maze.height()) {
                if maze.is_channel(e) {
                    horizontal[maze.index(c)] = Some(value);
                }
            }
            if let Some(s) = Direction::South.step(c, maze.width(), maze.height()) {
                if maze.is_channel(s) {
                    vertical[maze.index(c)] = Some(value);
                }
            }
        }
        EdgeConductivity {
            width: maze.width(),
            height: maze.height(),
            horizontal,
            vertical,
        }
    }

    /// Conductivity of the edge between two adjacent cells, if it exists.
    pub fn get(&self, a: Coord, b: Coord) -> Option<f64> {
        let (first, second) = if (a.row, a.col) <= (b.row, b.col) {
            (a, b)
        } else {
            (b, a)
        };
        let i = first.row * self.width + first.col;
        if second == (Coord::new(first.row, first.col + 1)) {
            self.horizontal[i]
        } else if second == (Coord::new(first.row + 1, first.col)) {
            self.vertical[i]
        } else {
            None
        }
    }

    /// All edges as (cell, east-or-south neighbor, conductivity), row-major
    /// horizontal edges first.
    pub fn edges(&self) -> impl Iterator<Item = (Coord, Coord, f64)> + '_ {
        let horizontal = self.horizontal.iter().enumerate().filter_map(move |(i, d)| {
            d.map(|d| {
                let c = Coord::new(i / self.width, i % self.width);
                (c, Coord::new(c.row, c.col + 1), d)
            })
        });
        let vertical = self.vertical.iter().enumerate().filter_map(move |(i, d)| {
            d.map(|d| {
                let c = Coord::new(i / self.width, i % self.width);
                (c, Coord::new(c.row + 1, c.col), d)
            })
        });
        horizontal.chain(vertical)
    }

    pub fn max(&self) -> f64 {
        self.edges().map(|(_, _, d)| d).fold(0.0, f64::max)
    }

    /// Per-cell view for dumps and renders: each channel cell carries the
    /// maximum conductivity of its incident edges.
    pub fn cell_view(&self, maze: &Maze) -> ScalarField {
        let mut field = ScalarField::zeros(maze, FieldKind::Conductivity);
        for (a, b, d) in self.edges() {
            for c in [a, b] {
                let prev = field.get(c).unwrap_or(0.0);
                field.set(c, prev.max(d));
            }
        }
        field
    }
}

/// One flux-reinforcement step report.
#[derive(Debug, Clone, Copy)]
pub struct PhysarumStep {
    /// Max-norm of the conductivity update.
    pub max_delta: f64,
    /// Net flux leaving the source cell; 1 up to solver round-off.
    pub source_outflux: f64,
    /// Net flux entering the destination cell.
    pub destination_influx: f64,
}

/// Tube-network reinforcement dynamics.
///
/// Each step solves the pressure field for a unit flux pumped in at the
/// source and drawn at the destination, computes per-edge flux
/// `Q = D * (p_a - p_b)`, and relaxes every conductivity toward its carried
/// flux: `D += dt * (|Q| - D)`. Tubes on the winning route are reinforced to
/// unit conductivity; starved tubes decay geometrically and collapse.
pub struct PhysarumSim {
    maze: Maze,
    sys: ChannelSystem,
    conductivity: EdgeConductivity,
    /// Scratch pressure per packed cell, kept across steps for inspection.
    pressures: Vec<f64>,
}

impl PhysarumSim {
    pub fn new(maze: &Maze) -> Result<PhysarumSim> {
        if maze.source() == maze.destination() {
            return Err(Error::InvalidEndpoints);
        }
        if !maze.is_connected() {
            return Err(Error::Unreachable);
        }
        let sys = ChannelSystem::build(maze);
        let conductivity = EdgeConductivity::uniform(maze, 1.0);
        let pressures = vec![0.0; sys.len()];
        Ok(PhysarumSim {
            maze: maze.clone(),
            sys,
            conductivity,
            pressures,
        })
    }

    pub fn conductivity(&self) -> &EdgeConductivity {
        &self.conductivity
    }

    pub fn pressure(&self, c: Coord) -> Option<f64> {
        if !self.maze.is_channel(c) {
            return None;
        }
        Some(self.pressures[self.sys.id(&self.maze, c)])
    }

    pub fn step(&mut self, dt: f64) -> PhysarumStep {
        assert!(dt > 0.0 && dt <= 1.0, "dt must lie in (0, 1]");
        let n = self.sys.len();
        let src = self.sys.id(&self.maze, self.maze.source());
        let dst = self.sys.id(&self.maze, self.maze.destination());

        // Weighted Laplacian with the destination pressure pinned to zero to
        // fix the gauge.
        let mut a = vec![0.0f64; n * n];
        let mut b = vec![0.0f64; n];
        b[src] += 1.0;
        b[dst] -= 1.0;
        for (p, q, d) in self.conductivity.edges() {
            let i = self.sys.id(&self.maze, p);
            let j = self.sys.id(&self.maze, q);
            a[i * n + i] += d;
            a[j * n + j] += d;
            a[i * n + j] -= d;
            a[j * n + i] -= d;
        }
        for j in 0..n {
            a[dst * n + j] = 0.0;
        }
        a[dst * n + dst] = 1.0;
        b[dst] = 0.0;
        solve_dense(&mut a, &mut b, n);
        self.pressures.copy_from_slice(&b);

        // Conservation read-out uses the conductivities the solve saw.
        let net_at = |cell: usize| {
            let mut net = 0.0;
            for (p, q, d) in self.conductivity.edges() {
                let i = self.sys.id(&self.maze, p);
                let j = self.sys.id(&self.maze, q);
                if i == cell {
                    net += d * (b[i] - b[j]);
                } else if j == cell {
                    net += d * (b[j] - b[i]);
                }
            }
            net
        };
        let source_outflux = net_at(src);
        let destination_influx = -net_at(dst);

        let mut max_delta = 0.0f64;
        let width = self.maze.width();
        let mut update = |slot: &mut Option<f64>, i: usize, j: usize| {
            if let Some(d) = slot.as_mut() {
                let flux = *d * (b[i] - b[j]);
                let delta = dt * (flux.abs() - *d);
                *d += delta;
                max_delta = max_delta.max(delta.abs());
            }
        };
        for idx in 0..self.maze.cell_count() {
            let c = Coord::new(idx / width, idx % width);
            if self.conductivity.horizontal[idx].is_some() {
                let i = self.sys.id(&self.maze, c);
                let j = self.sys.id(&self.maze, Coord::new(c.row, c.col + 1));
                update(&mut self.conductivity.horizontal[idx], i, j);
            }
            if self.conductivity.vertical[idx].is_some() {
                let i = self.sys.id(&self.maze, c);
                let j = self.sys.id(&self.maze, Coord::new(c.row + 1, c.col));
                update(&mut self.conductivity.vertical[idx], i, j);
            }
        }

        PhysarumStep {
            max_delta,
            source_outflux,
            destination_influx,
        }
    }
}

/// Run the reinforcement dynamics until the conductivity update falls to
/// `tol` or `steps` is exhausted.
pub fn physarum_solve(
    maze: &Maze,
    steps: usize,
    dt: f64,
    tol: f64,
) -> Result<(EdgeConductivity, SolveDiagnostics)> {
    let mut sim = PhysarumSim::new(maze)?;
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < steps && residual > tol {
        iterations += 1;
        residual = sim.step(dt).max_delta;
    }
    let diag = SolveDiagnostics {
        iterations,
        final_residual: residual,
        converged: residual <= tol,
    };
    Ok((sim.conductivity, diag))
}

/// Keep edges with conductivity at least `threshold_ratio` times the maximum
/// and return the unique source-to-destination path inside the kept subgraph.
///
/// A kept subgraph offering routes of more than one length means the
/// reinforcement has not singled out a winner; that is `AmbiguousPath`.
/// Equal-length alternatives resolve through the usual N, E, S, W tie-break.
pub fn thickest_path(
    cond: &EdgeConductivity,
    maze: &Maze,
    threshold_ratio: f64,
) -> Result<Path> {
    let threshold = threshold_ratio * cond.max();
    let keep_edge =
        |a: Coord, b: Coord| cond.get(a, b).map(|d| d >= threshold).unwrap_or(false);

    // Breadth-first route through kept edges only.
    let mut parent: Vec<Option<Coord>> = vec![None; maze.cell_count()];
    let mut seen = vec![false; maze.cell_count()];
    seen[maze.index(maze.source())] = true;
    let mut queue = VecDeque::new();
    queue.push_back(maze.source());
    let mut reached = false;
    while let Some(c) = queue.pop_front() {
        if c == maze.destination() {
            reached = true;
            break;
        }
        for d in Direction::ALL {
            let Some(n) = d.step(c, maze.width(), maze.height()) else {
                continue;
            };
            if maze.is_channel(n) && keep_edge(c, n) && !seen[maze.index(n)] {
                seen[maze.index(n)] = true;
                parent[maze.index(n)] = Some(c);
                queue.push_back(n);
            }
        }
    }
    if !reached {
        return Err(Error::DisconnectedHotSet);
    }
    let mut cells = vec![maze.destination()];
    let mut cursor = maze.destination();
    while let Some(p) = parent[maze.index(cursor)] {
        cells.push(p);
        cursor = p;
    }
    cells.reverse();
    let path = Path::new(cells);

    // Certify uniqueness up to tie-breaks: every simple route in the kept
    // subgraph must have the same length.
    match route_lengths(maze, &keep_edge, 200_000) {
        Some(lengths) if lengths.len() == 1 => Ok(path),
        _ => Err(Error::AmbiguousPath),
    }
}

/// Distinct lengths of all simple source-to-destination routes through kept
/// edges, or `None` when the work budget runs out before the search finishes.
fn route_lengths(
    maze: &Maze,
    keep_edge: &impl Fn(Coord, Coord) -> bool,
    mut budget: usize,
) -> Option<BTreeSet<usize>> {
    let mut lengths = BTreeSet::new();
    let mut on_path = vec![false; maze.cell_count()];
    on_path[maze.index(maze.source())] = true;
    // Iterative depth-first enumeration: each frame is a cell plus the index
    // of the next direction to try.
    let mut stack: Vec<(Coord, usize)> = vec![(maze.source(), 0)];
    while let Some(&mut (current, ref mut dir)) = stack.last_mut() {
        if current == maze.destination() {
            lengths.insert(stack.len() - 1);
            on_path[maze.index(current)] = false;
            stack.pop();
            continue;
        }
        if *dir >= 4 {
            on_path[maze.index(current)] = false;
            stack.pop();
            continue;
        }
        let d = Direction::ALL[*dir];
        *dir += 1;
        budget = budget.checked_sub(1)?;
        let Some(n) = d.step(current, maze.width(), maze.height()) else {
            continue;
        };
        if !maze.is_channel(n) || on_path[maze.index(n)] || !keep_edge(current, n) {
            continue;
        }
        on_path[maze.index(n)] = true;
        stack.push((n, 0));
    }
    Some(lengths)
}

/// Dense Gaussian elimination with partial pivoting; result replaces `b`.
fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) {
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        if diag == 0.0 {
            continue;
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    for col in (0..n).rev() {
        let diag = a[col * n + col];
        if diag == 0.0 {
            b[col] = 0.0;
            continue;
        }
        let mut sum = b[col];
        for k in col + 1..n {
            sum -= a[col * n + k] * b[k];
        }
        b[col] = sum / diag;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corridor(n: usize) -> Maze {
        let mut text = String::from("S");
        for _ in 0..n.saturating_sub(2) {
            text.push('.');
        }
        text.push('D');
        Maze::parse(&text).unwrap()
    }

    #[test]
    fn corridor_potential_is_linear() {
        let n = 6;
        let maze = corridor(n);
        let (field, diag) = solve_potential(
            &maze,
            BoundaryCondition::NeumannWalls,
            1.0,
            0.0,
            1e-12,
            100_000,
        )
        .unwrap();
        assert!(diag.converged);
        for col in 0..n {
            let expected = 1.0 - col as f64 / (n - 1) as f64;
            let got = field.get(Coord::new(0, col)).unwrap();
            assert!((got - expected).abs() < 1e-10, "col {col}: {got}");
        }
    }

    #[test]
    fn equal_endpoint_values_are_rejected() {
        let maze = corridor(4);
        assert_eq!(
            solve_potential(&maze, BoundaryCondition::NeumannWalls, 1.0, 1.0, 1e-10, 10)
                .unwrap_err(),
            Error::InvalidEndpoints
        );
    }

    #[test]
    fn coincident_endpoints_are_rejected() {
        let maze = Maze::generate(3, 3, crate::maze::MazeKind::Perfect, 0).unwrap();
        assert_eq!(
            solve_potential(&maze, BoundaryCondition::NeumannWalls, 1.0, 0.0, 1e-10, 10)
                .unwrap_err(),
            Error::InvalidEndpoints
        );
    }

    #[test]
    fn disconnected_maze_is_unreachable() {
        let maze = Maze::parse("S#D").unwrap();
        assert_eq!(
            solve_potential(&maze, BoundaryCondition::NeumannWalls, 1.0, 0.0, 1e-10, 10)
                .unwrap_err(),
            Error::Unreachable
        );
    }

    #[test]
    fn unconverged_solve_is_flagged_not_dropped() {
        let maze = corridor(12);
        let (_, diag) =
            solve_potential(&maze, BoundaryCondition::NeumannWalls, 1.0, 0.0, 1e-12, 3).unwrap();
        assert!(!diag.converged);
        assert_eq!(diag.iterations, 3);
        assert!(diag.final_residual > 1e-12);
    }

    #[test]
    fn corridor_current_is_uniform_including_endpoints() {
        let n = 6;
        let maze = corridor(n);
        let (field, _) = solve_potential(
            &maze,
            BoundaryCondition::NeumannWalls,
            1.0,
            0.0,
            1e-13,
            200_000,
        )
        .unwrap();
        let currents = current_field(&field, &maze, BoundaryCondition::NeumannWalls);
        let expected = 1.0 / (n - 1) as f64;
        for col in 0..n {
            let got = currents.get(Coord::new(0, col)).unwrap();
            assert!((got - expected).abs() < 1e-9, "col {col}: {got}");
        }
    }

    #[test]
    fn corridor_hot_set_is_the_whole_corridor_at_any_quantile() {
        let maze = corridor(6);
        let (field, _) = solve_potential(
            &maze,
            BoundaryCondition::NeumannWalls,
            1.0,
            0.0,
            1e-13,
            200_000,
        )
        .unwrap();
        let currents = current_field(&field, &maze, BoundaryCondition::NeumannWalls);
        for quantile in [0.1, 0.5, 0.99] {
            let hot = extract_hot_path(&currents, &maze, quantile).unwrap();
            assert_eq!(hot.cells.len(), 6, "quantile {quantile}");
            assert!(hot.path.is_complete(&maze));
        }
    }

    #[test]
    fn streamline_from_destination_is_single_cell() {
        let maze = corridor(5);
        let (field, _) = solve_potential(
            &maze,
            BoundaryCondition::NeumannWalls,
            1.0,
            0.0,
            1e-12,
            100_000,
        )
        .unwrap();
        let p = trace_streamline(&field, &maze, maze.destination()).unwrap();
        assert_eq!(p.cells().len(), 1);
    }

    #[test]
    fn streamline_walks_the_corridor() {
        let maze = corridor(5);
        let (field, _) = solve_potential(
            &maze,
            BoundaryCondition::NeumannWalls,
            1.0,
            0.0,
            1e-12,
            100_000,
        )
        .unwrap();
        let p = trace_streamline(&field, &maze, maze.source()).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.is_complete(&maze));
    }

    #[test]
    fn physarum_corridor_keeps_unit_conductivity() {
        let maze = corridor(5);
        let (cond, diag) = physarum_solve(&maze, 100, 0.1, 1e-9).unwrap();
        assert!(diag.converged);
        for (_, _, d) in cond.edges() {
            assert!((d - 1.0).abs() < 1e-9, "edge conductivity {d}");
        }
        let p = thickest_path(&cond, &maze, 0.5).unwrap();
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn physarum_loop_starves_the_long_branch() {
        // Ring with arcs of 4 and 6 edges between the endpoints.
        let maze = Maze::parse("S...\n.##D\n....").unwrap();
        let (cond, _) = physarum_solve(&maze, 500, 0.1, 1e-9).unwrap();
        let max = cond.max();
        // Edge on the short (top) arc vs edge on the long (bottom) arc.
        let short_edge = cond.get(Coord::new(0, 1), Coord::new(0, 2)).unwrap();
        let long_edge = cond.get(Coord::new(2, 1), Coord::new(2, 2)).unwrap();
        assert!(short_edge > 0.99 * max);
        assert!(long_edge < 1e-3 * max, "long branch at {long_edge}");
        let p = thickest_path(&cond, &maze, 0.5).unwrap();
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn thickest_path_reports_ambiguity_before_convergence() {
        let maze = Maze::parse("S...\n.##D\n....").unwrap();
        // One step in: both branches still near unit conductivity.
        let (cond, _) = physarum_solve(&maze, 1, 0.1, 1e-12).unwrap();
        assert_eq!(
            thickest_path(&cond, &maze, 0.1).unwrap_err(),
            Error::AmbiguousPath
        );
    }

    #[test]
    fn physarum_conserves_flux() {
        let maze = Maze::parse("S...\n.##D\n....").unwrap();
        let mut sim = PhysarumSim::new(&maze).unwrap();
        for _ in 0..50 {
            let report = sim.step(0.1);
            assert!((report.source_outflux - 1.0).abs() < 1e-9);
            assert!((report.destination_influx - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sor_matches_jacobi_within_ten_tolerances() {
        let maze = Maze::generate(11, 11, crate::maze::MazeKind::Perfect, 5).unwrap();
        let tol = 1e-11;
        let (jacobi, dj) = solve_potential(
            &maze,
            BoundaryCondition::NeumannWalls,
            1.0,
            0.0,
            tol,
            2_000_000,
        )
        .unwrap();
        let omega = suggested_omega(maze.channel_count());
        let (sor, ds) = solve_potential_with(
            &maze,
            BoundaryCondition::NeumannWalls,
            1.0,
            0.0,
            tol,
            2_000_000,
            SolveOptions {
                method: RelaxationMethod::Sor { omega },
                parallel: false,
            },
        )
        .unwrap();
        assert!(dj.converged && ds.converged);
        assert!(ds.iterations < dj.iterations);
        for c in maze.channel_cells() {
            let gap = (jacobi.get(c).unwrap() - sor.get(c).unwrap()).abs();
            assert!(gap <= 10.0 * tol, "cell {c}: gap {gap}");
        }
    }

    #[test]
    fn parallel_jacobi_is_bit_identical() {
        let maze = Maze::generate(13, 13, crate::maze::MazeKind::Braided(0.4), 9).unwrap();
        let run = |parallel| {
            solve_potential_with(
                &maze,
                BoundaryCondition::NeumannWalls,
                1.0,
                0.0,
                1e-10,
                500_000,
                SolveOptions {
                    method: RelaxationMethod::Jacobi,
                    parallel,
                },
            )
            .unwrap()
        };
        let (seq, dseq) = run(false);
        let (par, dpar) = run(true);
        assert_eq!(dseq.iterations, dpar.iterations);
        assert_eq!(seq.dump(), par.dump());
    }

    #[test]
    fn dirichlet_walls_are_recorded_on_the_field() {
        let maze = corridor(4);
        let (field, _) = solve_potential(
            &maze,
            BoundaryCondition::DirichletWalls,
            1.0,
            -1.0,
            1e-12,
            100_000,
        )
        .unwrap();
        assert_eq!(field.wall_value(), Some(0.0));
        // Walls sink current, so the corridor is no longer linear.
        let inner = field.get(Coord::new(0, 1)).unwrap();
        assert!(inner < 2.0 / 3.0);
    }
}
