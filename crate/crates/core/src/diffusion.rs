//! Chemical and temperature gradient engines.
//!
//! A substance diffuses from an anchor cell (the destination: a chemical
//! source, or the cold sphere of the temperature reading) along the channels.
//! With a little per-step decay the steady state falls off monotonically with
//! channel distance, and an agent climbing the gradient walks a shortest path
//! to the anchor. Plain diffusion without decay flattens out and carries no
//! trace, which is why the decay term exists at all.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldKind, ScalarField};
use crate::grid::ChannelSystem;
use crate::maze::{Coord, Direction, Maze};
use crate::path::Path;
use crate::trace::{self, TraceMode, ValueGrid};

/// Per-step change threshold under which the field counts as a fixed point.
pub const FIXED_POINT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    /// Fractional loss per step, in [0, 1).
    pub decay: f64,
    /// Step budget; the run may stop earlier at a fixed point.
    pub steps: usize,
    /// Concentration held at the anchor after every step.
    pub clamp: f64,
}

impl DiffusionParams {
    pub fn new(decay: f64, steps: usize) -> DiffusionParams {
        DiffusionParams {
            decay,
            steps,
            clamp: 1.0,
        }
    }
}

impl Default for DiffusionParams {
    fn default() -> Self {
        DiffusionParams {
            decay: 0.05,
            steps: 100_000,
            clamp: 1.0,
        }
    }
}

/// How a chemotactic agent steps through the field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AgentPolicy {
    /// Step to the strictly larger neighbor of maximal value, N, E, S, W ties.
    DeterministicGreedy,
    /// Sample the next cell proportionally to `exp(value / temperature)`,
    /// never revisiting the previous cell unless trapped in a dead end.
    SoftmaxStochastic { temperature: f64, seed: u64 },
}

/// One explicit diffusion step on channel cells, reflecting walls, no clamp.
///
/// `next = (1 - decay) * (value + (1/4) * sum(neighbor - value))` where the
/// sum runs over channel neighbors only: a reflecting wall mirrors the cell
/// itself and contributes nothing.
pub fn diffusion_step(field: &ScalarField, maze: &Maze, decay: f64) -> ScalarField {
    assert!((0.0..1.0).contains(&decay), "decay must lie in [0, 1)");
    let mut next = field.clone();
    for c in maze.channel_cells() {
        let here = field.get(c).unwrap_or(0.0);
        let mut flux = 0.0;
        for d in Direction::ALL {
            if let Some(n) = d.step(c, maze.width(), maze.height()) {
                if maze.is_channel(n) {
                    flux += field.get(n).unwrap_or(0.0) - here;
                }
            }
        }
        next.set(c, (1.0 - decay) * (here + 0.25 * flux));
    }
    next
}

/// Diffuse from a clamped anchor for up to `params.steps` steps.
///
/// The anchor is re-clamped after every step. Stops early once the field is a
/// fixed point: no per-cell change above [`FIXED_POINT_EPS`] and the front no
/// longer reaches fresh cells (the second condition keeps far, tiny-valued
/// regions from being cut off mid-propagation).
pub fn diffuse(maze: &Maze, anchor: Coord, params: DiffusionParams) -> Result<ScalarField> {
    if !maze.is_channel(anchor) {
        return Err(Error::WallQuery(anchor));
    }
    assert!(
        (0.0..1.0).contains(&params.decay),
        "decay must lie in [0, 1)"
    );
    assert!(params.steps >= 1, "steps must be positive");

    let sys = ChannelSystem::build(maze);
    let n = sys.len();
    let anchor_id = sys.id(maze, anchor);
    let keep = 1.0 - params.decay;
    let mut values = vec![0.0f64; n];
    values[anchor_id] = params.clamp;
    let mut next = values.clone();

    for _ in 0..params.steps {
        let mut max_change = 0.0f64;
        let mut fresh = false;
        for i in 0..n {
            let here = values[i];
            let mut flux = 0.0;
            for &j in &sys.neighbors[i] {
                if j >= 0 {
                    flux += values[j as usize] - here;
                }
            }
            let new = keep * (here + 0.25 * flux);
            if here == 0.0 && new != 0.0 {
                fresh = true;
            }
            max_change = max_change.max((new - here).abs());
            next[i] = new;
        }
        next[anchor_id] = params.clamp;
        std::mem::swap(&mut values, &mut next);
        if max_change <= FIXED_POINT_EPS && !fresh {
            break;
        }
    }

    let mut field = ScalarField::zeros(maze, FieldKind::Concentration);
    for (i, &c) in sys.cells.iter().enumerate() {
        field.set(c, values[i]);
    }
    Ok(field)
}

/// Row-major first cell holding the field maximum; the anchor of a diffused
/// field, since only the clamped cell attains the peak once decay is on.
fn field_anchor(field: &ScalarField, maze: &Maze) -> Result<Coord> {
    let mut best: Option<(Coord, f64)> = None;
    for c in maze.channel_cells() {
        let v = field.get(c).ok_or(Error::WallQuery(c))?;
        if best.map(|(_, b)| v > b).unwrap_or(true) {
            best = Some((c, v));
        }
    }
    best.map(|(c, _)| c).ok_or(Error::Unreachable)
}

/// Trace an agent from `start` up the concentration gradient to the anchor.
pub fn chemotactic_trace(
    field: &ScalarField,
    maze: &Maze,
    start: Coord,
    policy: AgentPolicy,
    max_steps: usize,
) -> Result<Path> {
    let anchor = field_anchor(field, maze)?;
    match policy {
        AgentPolicy::DeterministicGreedy => trace::greedy_trace(
            field,
            maze,
            start,
            anchor,
            TraceMode::AscendToMax,
            max_steps,
        ),
        AgentPolicy::SoftmaxStochastic { temperature, seed } => {
            assert!(temperature > 0.0, "temperature must be positive");
            if !maze.is_channel(start) {
                return Err(Error::WallQuery(start));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut cells = vec![start];
            let mut previous: Option<Coord> = None;
            let mut current = start;
            while current != anchor {
                if cells.len() > max_steps {
                    return Err(Error::StepBudgetExceeded(max_steps));
                }
                let mut candidates: Vec<(Coord, f64)> = Vec::with_capacity(4);
                for d in Direction::ALL {
                    let Some(n) = d.step(current, maze.width(), maze.height()) else {
                        continue;
                    };
                    if !maze.is_channel(n) {
                        continue;
                    }
                    if let Some(v) = field.value(n) {
                        candidates.push((n, v));
                    }
                }
                // No immediate backtracking unless the dead end forces it.
                if candidates.len() > 1 {
                    if let Some(prev) = previous {
                        candidates.retain(|&(c, _)| c != prev);
                    }
                }
                if candidates.is_empty() {
                    return Err(Error::LocalExtremum(current));
                }
                let top = candidates
                    .iter()
                    .map(|&(_, v)| v)
                    .fold(f64::NEG_INFINITY, f64::max);
                let weights: Vec<f64> = candidates
                    .iter()
                    .map(|&(_, v)| ((v - top) / temperature).exp())
                    .collect();
                let total: f64 = weights.iter().sum();
                let mut draw = rng.gen::<f64>() * total;
                let mut chosen = candidates.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    if draw < *w {
                        chosen = i;
                        break;
                    }
                    draw -= w;
                }
                previous = Some(current);
                current = candidates[chosen].0;
                cells.push(current);
            }
            Ok(Path::new(cells))
        }
    }
}

/// The cell set a dye streak marks: the greedy trace as a set.
///
/// Algorithmically identical to the greedy agent; named separately because it
/// models a flow-dragged dye visualization, not a walker.
pub fn dye_advect(field: &ScalarField, maze: &Maze, start: Coord) -> Result<BTreeSet<Coord>> {
    let path = chemotactic_trace(
        field,
        maze,
        start,
        AgentPolicy::DeterministicGreedy,
        maze.cell_count(),
    )?;
    Ok(path.cells().iter().copied().collect())
}
