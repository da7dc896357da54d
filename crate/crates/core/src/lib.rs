//! Maze solving by gradient development and tracing.
//!
//! Everything here follows the same two-phase shape: an engine develops a
//! per-cell gradient over the maze channels (breadth-first labels, electrical
//! potential, chemical concentration, or wavefront arrival times), and a
//! tracer walks that gradient from the source to the destination. The
//! breadth-first labeling in [`oracle`] is the reference implementation; the
//! physical-analog engines in [`netflow`], [`diffusion`], and [`wavefront`]
//! are verified against it path-for-path under a shared N, E, S, W tie-break.

pub mod diffusion;
pub mod error;
pub mod field;
mod grid;
pub mod maze;
pub mod netflow;
pub mod oracle;
pub mod path;
pub mod render;
pub mod trace;
pub mod wavefront;

pub use error::{Error, Result};
pub use field::{FieldKind, ScalarField};
pub use maze::{Cell, Coord, Direction, Maze, MazeKind};
pub use path::Path;
