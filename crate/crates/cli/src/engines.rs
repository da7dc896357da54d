//! Engine pipelines: one gradient developer plus one tracer per identifier.

use clap::ValueEnum;

use mazekit::diffusion::{self, AgentPolicy, DiffusionParams};
use mazekit::error::Error;
use mazekit::field::ScalarField;
use mazekit::maze::Maze;
use mazekit::netflow::{self, BoundaryCondition, RelaxationMethod, SolveOptions};
use mazekit::oracle;
use mazekit::path::Path;
use mazekit::wavefront::{self, CaParams, DelayMap};

use crate::report::Status;

/// The solver pipelines, each modeled on one family of physical maze
/// solvers. Every pipeline develops a gradient over the channels and traces
/// the source-to-destination path along it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineId {
    /// Breadth-first wave labeling plus label descent; the reference.
    Lee,
    /// Electrical potential with insulating walls; greedy voltage descent.
    LaplaceNeumann,
    /// Electrical potential with current-sinking walls held at zero.
    LaplaceDirichlet,
    /// Current-magnitude threshold, as a thermal camera sees Joule heating.
    CurrentHot,
    /// Tube flux reinforcement of a foraging slime mould.
    Physarum,
    /// Chemo-attractant diffusion from the destination; gradient-climbing agent.
    Diffusion,
    /// Delay-weighted wavefront with stored incoming directions.
    Wavefront,
    /// Excitable-media wave; first-excitation times and pointers.
    Ca,
    /// Intersection of forward and backward excitation isochrones.
    Isochrone,
    /// Crystallization-style pointer field left by a propagating front.
    Crystal,
}

impl EngineId {
    pub const ALL: [EngineId; 10] = [
        EngineId::Lee,
        EngineId::LaplaceNeumann,
        EngineId::LaplaceDirichlet,
        EngineId::CurrentHot,
        EngineId::Physarum,
        EngineId::Diffusion,
        EngineId::Wavefront,
        EngineId::Ca,
        EngineId::Isochrone,
        EngineId::Crystal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EngineId::Lee => "lee",
            EngineId::LaplaceNeumann => "laplace-neumann",
            EngineId::LaplaceDirichlet => "laplace-dirichlet",
            EngineId::CurrentHot => "current-hot",
            EngineId::Physarum => "physarum",
            EngineId::Diffusion => "diffusion",
            EngineId::Wavefront => "wavefront",
            EngineId::Ca => "ca",
            EngineId::Isochrone => "isochrone",
            EngineId::Crystal => "crystal",
        }
    }
}

/// Resolved engine parameters; every knob has a flag, a config key, and a
/// documented default.
#[derive(Debug, Clone)]
pub struct EngineParams {
    pub tol: f64,
    /// Relaxation sweep cap; 0 means 2000 sweeps per channel cell.
    pub max_iter: usize,
    pub method: RelaxationMethod,
    pub parallel: bool,
    pub quantile: f64,
    pub decay: f64,
    /// Diffusion step budget; 0 lets the fixed-point detector decide.
    pub diffusion_steps: usize,
    /// Softmax temperature; greedy tracing when absent.
    pub temperature: Option<f64>,
    pub seed: u64,
    pub dt: f64,
    pub physarum_steps: usize,
    pub physarum_tol: f64,
    pub ratio: f64,
    pub refractory: u32,
    pub threshold: u32,
    /// Per-cell delay ceiling for `wavefront`; 1 keeps delays uniform.
    pub delay_max: u32,
}

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams {
            tol: 1e-10,
            max_iter: 0,
            method: RelaxationMethod::Jacobi,
            parallel: false,
            quantile: 0.5,
            decay: 0.05,
            diffusion_steps: 0,
            temperature: None,
            seed: 0,
            dt: 0.1,
            physarum_steps: 500,
            physarum_tol: 1e-9,
            ratio: 0.5,
            refractory: 3,
            threshold: 1,
            delay_max: 1,
        }
    }
}

impl EngineParams {
    fn max_iter_for(&self, maze: &Maze) -> usize {
        if self.max_iter == 0 {
            2000 * maze.cell_count()
        } else {
            self.max_iter
        }
    }

    fn diffusion_steps_for(&self, maze: &Maze) -> usize {
        if self.diffusion_steps == 0 {
            // Fixed-point detection stops much earlier; this is a hard cap.
            4 * maze.channel_count() + 10_000
        } else {
            self.diffusion_steps
        }
    }
}

/// Everything a run leaves behind: the outcome plus whatever gradient field
/// it developed, for renders and dumps.
pub struct EngineRun {
    pub status: Status,
    pub path: Option<Path>,
    pub iterations: usize,
    pub residual: f64,
    /// Developed scalar field, when the engine has one.
    pub field: Option<ScalarField>,
    /// Arrival field, for the temporal engines.
    pub arrival: Option<wavefront::ArrivalField>,
}

impl EngineRun {
    fn failed(status: Status) -> EngineRun {
        EngineRun {
            status,
            path: None,
            iterations: 0,
            residual: 0.0,
            field: None,
            arrival: None,
        }
    }
}

fn status_of(err: &Error) -> Status {
    match err {
        Error::Unreachable => Status::Unreachable,
        Error::LocalExtremum(_)
        | Error::StepBudgetExceeded(_)
        | Error::DisconnectedHotSet
        | Error::AmbiguousPath
        | Error::NotQuiescent(_)
        | Error::CycleDetected => Status::LocalExtremum,
        _ => Status::Unreachable,
    }
}

/// Run one engine pipeline on a connected maze.
pub fn run_engine(engine: EngineId, maze: &Maze, params: &EngineParams) -> EngineRun {
    match engine {
        EngineId::Lee => run_lee(maze),
        EngineId::LaplaceNeumann => run_laplace(maze, BoundaryCondition::NeumannWalls, params),
        EngineId::LaplaceDirichlet => run_laplace(maze, BoundaryCondition::DirichletWalls, params),
        EngineId::CurrentHot => run_current_hot(maze, params),
        EngineId::Physarum => run_physarum(maze, params),
        EngineId::Diffusion => run_diffusion(maze, params),
        EngineId::Wavefront => run_wavefront(maze, params),
        EngineId::Ca => run_ca(maze, params),
        EngineId::Isochrone => run_isochrone(maze, params),
        EngineId::Crystal => run_crystal(maze),
    }
}

fn run_lee(maze: &Maze) -> EngineRun {
    let field = match oracle::lee_label(maze, maze.destination()) {
        Ok(f) => f,
        Err(e) => return EngineRun::failed(status_of(&e)),
    };
    match oracle::lee_trace(&field, maze, maze.source()) {
        Ok(path) => EngineRun {
            status: Status::Ok,
            path: Some(path),
            iterations: 0,
            residual: 0.0,
            field: None,
            arrival: None,
        },
        Err(e) => EngineRun::failed(status_of(&e)),
    }
}

fn solve(
    maze: &Maze,
    bc: BoundaryCondition,
    params: &EngineParams,
) -> Result<(ScalarField, netflow::SolveDiagnostics), Status> {
    let (v_source, v_dest) = match bc {
        // Zero-potential walls would mask a destination at zero, so the
        // electrodes straddle the wall value instead.
        BoundaryCondition::DirichletWalls => (1.0, -1.0),
        BoundaryCondition::NeumannWalls => (1.0, 0.0),
    };
    let options = SolveOptions {
        method: params.method,
        parallel: params.parallel,
    };
    netflow::solve_potential_with(
        maze,
        bc,
        v_source,
        v_dest,
        params.tol,
        params.max_iter_for(maze),
        options,
    )
    .map_err(|e| status_of(&e))
}

fn run_laplace(maze: &Maze, bc: BoundaryCondition, params: &EngineParams) -> EngineRun {
    let (field, diag) = match solve(maze, bc, params) {
        Ok(v) => v,
        Err(status) => return EngineRun::failed(status),
    };
    if !diag.converged {
        return EngineRun {
            status: Status::NotConverged,
            path: None,
            iterations: diag.iterations,
            residual: diag.final_residual,
            field: Some(field),
            arrival: None,
        };
    }
    let traced = netflow::trace_streamline(&field, maze, maze.source());
    EngineRun {
        status: traced.as_ref().map(|_| Status::Ok).unwrap_or_else(|e| status_of(e)),
        path: traced.ok(),
        iterations: diag.iterations,
        residual: diag.final_residual,
        field: Some(field),
        arrival: None,
    }
}

fn run_current_hot(maze: &Maze, params: &EngineParams) -> EngineRun {
    let (potential, diag) = match solve(maze, BoundaryCondition::NeumannWalls, params) {
        Ok(v) => v,
        Err(status) => return EngineRun::failed(status),
    };
    if !diag.converged {
        return EngineRun {
            status: Status::NotConverged,
            path: None,
            iterations: diag.iterations,
            residual: diag.final_residual,
            field: Some(potential),
            arrival: None,
        };
    }
    let currents = netflow::current_field(&potential, maze, BoundaryCondition::NeumannWalls);
    let hot = netflow::extract_hot_path(&currents, maze, params.quantile);
    EngineRun {
        status: hot.as_ref().map(|_| Status::Ok).unwrap_or_else(|e| status_of(e)),
        path: hot.ok().map(|h| h.path),
        iterations: diag.iterations,
        residual: diag.final_residual,
        field: Some(currents),
        arrival: None,
    }
}

fn run_physarum(maze: &Maze, params: &EngineParams) -> EngineRun {
    let (cond, diag) = match netflow::physarum_solve(
        maze,
        params.physarum_steps,
        params.dt,
        params.physarum_tol,
    ) {
        Ok(v) => v,
        Err(e) => return EngineRun::failed(status_of(&e)),
    };
    let field = cond.cell_view(maze);
    if !diag.converged {
        return EngineRun {
            status: Status::NotConverged,
            path: None,
            iterations: diag.iterations,
            residual: diag.final_residual,
            field: Some(field),
            arrival: None,
        };
    }
    let traced = netflow::thickest_path(&cond, maze, params.ratio);
    EngineRun {
        status: traced.as_ref().map(|_| Status::Ok).unwrap_or_else(|e| status_of(e)),
        path: traced.ok(),
        iterations: diag.iterations,
        residual: diag.final_residual,
        field: Some(field),
        arrival: None,
    }
}

fn run_diffusion(maze: &Maze, params: &EngineParams) -> EngineRun {
    let field = match diffusion::diffuse(
        maze,
        maze.destination(),
        DiffusionParams {
            decay: params.decay,
            steps: params.diffusion_steps_for(maze),
            clamp: 1.0,
        },
    ) {
        Ok(f) => f,
        Err(e) => return EngineRun::failed(status_of(&e)),
    };
    let policy = match params.temperature {
        Some(temperature) => AgentPolicy::SoftmaxStochastic {
            temperature,
            seed: params.seed,
        },
        None => AgentPolicy::DeterministicGreedy,
    };
    let budget = match policy {
        AgentPolicy::DeterministicGreedy => maze.cell_count(),
        AgentPolicy::SoftmaxStochastic { .. } => 20 * maze.cell_count(),
    };
    let traced = diffusion::chemotactic_trace(&field, maze, maze.source(), policy, budget);
    EngineRun {
        status: traced.as_ref().map(|_| Status::Ok).unwrap_or_else(|e| status_of(e)),
        path: traced.ok(),
        iterations: 0,
        residual: 0.0,
        field: Some(field),
        arrival: None,
    }
}

fn run_wavefront(maze: &Maze, params: &EngineParams) -> EngineRun {
    let delays = if params.delay_max <= 1 {
        DelayMap::uniform(maze, 1)
    } else {
        // Deterministic pseudo-random elevation map from the seed.
        let ceiling = params.delay_max;
        let seed = params.seed;
        DelayMap::from_fn(maze, |c| {
            let mut h = seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add((c.row as u64) << 32 | c.col as u64);
            h ^= h >> 33;
            h = h.wrapping_mul(0xFF51_AFD7_ED55_8CCD);
            h ^= h >> 33;
            1 + (h % u64::from(ceiling)) as u32
        })
    };
    let field = match wavefront::weighted_wavefront(maze, &delays, maze.destination()) {
        Ok(f) => f,
        Err(e) => return EngineRun::failed(status_of(&e)),
    };
    let traced = wavefront::pointer_trace(&field, maze.source());
    EngineRun {
        status: traced.as_ref().map(|_| Status::Ok).unwrap_or_else(|e| status_of(e)),
        path: traced.ok(),
        iterations: 0,
        residual: 0.0,
        field: None,
        arrival: Some(field),
    }
}

fn run_ca(maze: &Maze, params: &EngineParams) -> EngineRun {
    let ca_params = CaParams {
        refractory: params.refractory,
        threshold: params.threshold,
    };
    let budget = 4 * maze.cell_count() + 16;
    let field = match wavefront::excitable_ca(maze, maze.destination(), ca_params, budget) {
        Ok(f) => f,
        Err(e) => return EngineRun::failed(status_of(&e)),
    };
    let traced = wavefront::pointer_trace(&field, maze.source());
    EngineRun {
        status: traced.as_ref().map(|_| Status::Ok).unwrap_or_else(|e| status_of(e)),
        path: traced.ok(),
        iterations: 0,
        residual: 0.0,
        field: None,
        arrival: Some(field),
    }
}

fn run_isochrone(maze: &Maze, params: &EngineParams) -> EngineRun {
    let ca_params = CaParams {
        refractory: params.refractory,
        threshold: params.threshold,
    };
    let budget = 4 * maze.cell_count() + 16;
    let forward = match wavefront::excitable_ca(maze, maze.source(), ca_params, budget) {
        Ok(f) => f,
        Err(e) => return EngineRun::failed(status_of(&e)),
    };
    let backward = match wavefront::excitable_ca(maze, maze.destination(), ca_params, budget) {
        Ok(f) => f,
        Err(e) => return EngineRun::failed(status_of(&e)),
    };
    let traced = wavefront::isochrone_intersection_path(maze, &forward, &backward);
    EngineRun {
        status: traced.as_ref().map(|_| Status::Ok).unwrap_or_else(|e| status_of(e)),
        path: traced.ok().map(|(_, p)| p),
        iterations: 0,
        residual: 0.0,
        field: None,
        arrival: Some(forward),
    }
}

fn run_crystal(maze: &Maze) -> EngineRun {
    let delays = DelayMap::uniform(maze, 1);
    let field = match wavefront::weighted_wavefront(maze, &delays, maze.destination()) {
        Ok(f) => f,
        Err(e) => return EngineRun::failed(status_of(&e)),
    };
    let traced = wavefront::pointer_trace(&field, maze.source());
    EngineRun {
        status: traced.as_ref().map(|_| Status::Ok).unwrap_or_else(|e| status_of(e)),
        path: traced.ok(),
        iterations: 0,
        residual: 0.0,
        field: None,
        arrival: Some(field),
    }
}

/// Reference shortest length between the endpoints, if connected.
pub fn oracle_length(maze: &Maze) -> Option<usize> {
    let field = oracle::lee_label(maze, maze.destination()).ok()?;
    field.label(maze.source()).map(|l| l as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mazekit::maze::MazeKind;

    #[test]
    fn every_engine_solves_a_small_perfect_maze() {
        let maze = Maze::generate(9, 9, MazeKind::Perfect, 3).unwrap();
        let oracle_len = oracle_length(&maze).unwrap();
        let params = EngineParams::default();
        for engine in EngineId::ALL {
            let run = run_engine(engine, &maze, &params);
            if engine == EngineId::LaplaceDirichlet {
                // Wall-sinking potentials may trap the tracer in stubs; both
                // outcomes are legitimate for this engine.
                continue;
            }
            assert_eq!(run.status, Status::Ok, "{}", engine.name());
            assert_eq!(run.path.unwrap().len(), oracle_len, "{}", engine.name());
        }
    }

    #[test]
    fn weighted_wavefront_engine_reports_a_route() {
        let maze = Maze::generate(9, 9, MazeKind::Braided(0.3), 5).unwrap();
        let params = EngineParams {
            delay_max: 9,
            seed: 7,
            ..EngineParams::default()
        };
        let run = run_engine(EngineId::Wavefront, &maze, &params);
        assert_eq!(run.status, Status::Ok);
        assert!(run.path.unwrap().is_complete(&maze));
    }
}
