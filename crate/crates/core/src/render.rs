//! Deterministic renders: ASCII overlays, plain grayscale images of fields
//! (the software stand-in for thermographic, glow, and dye visualizations),
//! and vector output.
//!
//! Every render is a pure function of its inputs; no timestamps, no locale,
//! floats in shortest round-trip decimal. Golden tests byte-compare outputs.

use crate::error::{Error, Result};
use crate::maze::{Cell, Coord, Maze};
use crate::path::Path;
use crate::trace::ValueGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderTarget {
    AsciiOverlay,
    GrayscaleImage,
    Vector,
}

/// How field values map onto the 1..=255 gray range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalize {
    MinMax,
    Fixed { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSpec {
    pub target: RenderTarget,
    /// Pixels per cell.
    pub scale: usize,
    pub normalize: Normalize,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            target: RenderTarget::GrayscaleImage,
            scale: 1,
            normalize: Normalize::MinMax,
        }
    }
}

/// The maze in its ASCII format, with `*` overlaid on path cells.
///
/// Source and destination keep their glyphs. Without a path this is the exact
/// inverse of parsing.
pub fn render_ascii(maze: &Maze, path: Option<&Path>) -> Result<String> {
    let mut on_path = vec![false; maze.cell_count()];
    if let Some(path) = path {
        for &c in path.cells() {
            if !maze.is_channel(c) {
                return Err(Error::PathOutsideMaze(c));
            }
            on_path[maze.index(c)] = true;
        }
    }
    let mut out = String::with_capacity((maze.width() + 1) * maze.height());
    for row in 0..maze.height() {
        for col in 0..maze.width() {
            let c = Coord::new(row, col);
            let glyph = if c == maze.source() {
                'S'
            } else if c == maze.destination() {
                'D'
            } else if on_path[maze.index(c)] {
                '*'
            } else {
                match maze.cell(c) {
                    Cell::Wall => '#',
                    Cell::Channel => '.',
                }
            };
            out.push(glyph);
        }
        out.push('\n');
    }
    Ok(out)
}

fn gray_levels(
    field: &(impl ValueGrid + ?Sized),
    maze: &Maze,
    normalize: Normalize,
) -> Result<Vec<u8>> {
    let (lo, hi) = match normalize {
        Normalize::Fixed { lo, hi } => {
            if lo >= hi {
                return Err(Error::DegenerateRange);
            }
            (lo, hi)
        }
        Normalize::MinMax => {
            let mut bounds: Option<(f64, f64)> = None;
            for c in maze.channel_cells() {
                if let Some(v) = field.value(c) {
                    bounds = Some(match bounds {
                        None => (v, v),
                        Some((lo, hi)) => (lo.min(v), hi.max(v)),
                    });
                }
            }
            let (lo, hi) = bounds.ok_or(Error::DegenerateRange)?;
            if lo == hi {
                return Err(Error::DegenerateRange);
            }
            (lo, hi)
        }
    };
    let mut levels = vec![0u8; maze.cell_count()];
    for c in maze.channel_cells() {
        if let Some(v) = field.value(c) {
            let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
            // Walls own gray 0; channel values live in 1..=255.
            levels[maze.index(c)] = 1 + (t * 254.0).round() as u8;
        }
    }
    Ok(levels)
}

/// Plain portable graymap ("P2", maxval 255) of a field.
///
/// Walls and valueless cells are black; channel values normalize into
/// 1..=255 so even the field minimum stays distinguishable from walls. Each
/// cell becomes a `scale` x `scale` pixel block.
pub fn render_field_image(
    field: &impl ValueGrid,
    maze: &Maze,
    spec: RenderSpec,
) -> Result<String> {
    assert!(spec.scale >= 1, "scale must be at least 1");
    let levels = gray_levels(field, maze, spec.normalize)?;
    let (w, h) = (maze.width() * spec.scale, maze.height() * spec.scale);
    let mut out = format!("P2\n{w} {h}\n255\n");
    for row in 0..h {
        let mut tokens = Vec::with_capacity(w);
        for col in 0..w {
            let c = Coord::new(row / spec.scale, col / spec.scale);
            tokens.push(levels[maze.index(c)].to_string());
        }
        out.push_str(&tokens.join(" "));
        out.push('\n');
    }
    Ok(out)
}

const VECTOR_SCALE: usize = 10;

/// Scalable vector markup of the maze: wall rectangles, optional field heat
/// squares, and the path polyline, all in row-major element order.
pub fn render_vector(
    maze: &Maze,
    path: &Path,
    field: Option<&dyn ValueGrid>,
) -> Result<String> {
    path.validate(maze)?;
    let s = VECTOR_SCALE;
    let (w, h) = (maze.width() * s, maze.height() * s);
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    ));
    for row in 0..maze.height() {
        for col in 0..maze.width() {
            let c = Coord::new(row, col);
            if maze.cell(c) == Cell::Wall {
                out.push_str(&format!(
                    "<rect x=\"{}\" y=\"{}\" width=\"{s}\" height=\"{s}\" fill=\"black\"/>\n",
                    col * s,
                    row * s
                ));
            }
        }
    }
    if let Some(field) = field {
        let levels = gray_levels(field, maze, Normalize::MinMax)?;
        for row in 0..maze.height() {
            for col in 0..maze.width() {
                let c = Coord::new(row, col);
                if maze.is_channel(c) && field.value(c).is_some() {
                    let g = levels[maze.index(c)];
                    out.push_str(&format!(
                        "<rect x=\"{}\" y=\"{}\" width=\"{s}\" height=\"{s}\" fill=\"rgb({g},{g},{g})\"/>\n",
                        col * s,
                        row * s
                    ));
                }
            }
        }
    }
    if !path.is_empty() {
        let points: Vec<String> = path
            .cells()
            .iter()
            .map(|c| format!("{},{}", c.col * s + s / 2, c.row * s + s / 2))
            .collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"/>\n",
            points.join(" ")
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldKind, ScalarField};

    #[test]
    fn overlay_keeps_endpoint_glyphs() {
        let maze = Maze::parse("S.D").unwrap();
        let path = Path::new(vec![Coord::new(0, 0), Coord::new(0, 1), Coord::new(0, 2)]);
        assert_eq!(render_ascii(&maze, Some(&path)).unwrap(), "S*D\n");
    }

    #[test]
    fn no_path_render_round_trips_through_parse() {
        let text = "S.#\n..D\n";
        let maze = Maze::parse(text).unwrap();
        let rendered = render_ascii(&maze, None).unwrap();
        assert_eq!(rendered, text);
        assert_eq!(Maze::parse(&rendered).unwrap(), maze);
    }

    #[test]
    fn path_through_wall_is_rejected() {
        let maze = Maze::parse("S#D").unwrap();
        let path = Path::new(vec![Coord::new(0, 1)]);
        assert!(matches!(
            render_ascii(&maze, Some(&path)).unwrap_err(),
            Error::PathOutsideMaze(_)
        ));
    }

    #[test]
    fn constant_field_needs_fixed_normalization() {
        let maze = Maze::parse("S.D").unwrap();
        let field = ScalarField::zeros(&maze, FieldKind::Potential);
        assert_eq!(
            render_field_image(&field, &maze, RenderSpec::default()).unwrap_err(),
            Error::DegenerateRange
        );
        let fixed = RenderSpec {
            normalize: Normalize::Fixed { lo: -1.0, hi: 1.0 },
            ..RenderSpec::default()
        };
        let image = render_field_image(&field, &maze, fixed).unwrap();
        assert_eq!(image, "P2\n3 1\n255\n128 128 128\n");
    }

    #[test]
    fn monotone_corridor_renders_increasing_grays() {
        let maze = Maze::parse("S...D").unwrap();
        let mut field = ScalarField::zeros(&maze, FieldKind::Potential);
        for col in 0..5 {
            field.set(Coord::new(0, col), col as f64);
        }
        let image = render_field_image(&field, &maze, RenderSpec::default()).unwrap();
        let last = image.lines().last().unwrap();
        let grays: Vec<u32> = last.split(' ').map(|t| t.parse().unwrap()).collect();
        assert_eq!(grays, vec![1, 65, 128, 192, 255]);
    }

    #[test]
    fn scale_replicates_pixels() {
        let maze = Maze::parse("SD").unwrap();
        let mut field = ScalarField::zeros(&maze, FieldKind::Potential);
        field.set(Coord::new(0, 1), 1.0);
        let spec = RenderSpec {
            scale: 2,
            ..RenderSpec::default()
        };
        let image = render_field_image(&field, &maze, spec).unwrap();
        assert_eq!(image, "P2\n4 2\n255\n1 1 255 255\n1 1 255 255\n");
    }

    #[test]
    fn corridor_vector_has_one_polyline_with_all_points() {
        let maze = Maze::parse("S...D").unwrap();
        let path = Path::new((0..5).map(|col| Coord::new(0, col)).collect());
        let svg = render_vector(&maze, &path, None).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let points = svg
            .lines()
            .find(|l| l.starts_with("<polyline"))
            .unwrap()
            .split('"')
            .nth(1)
            .unwrap();
        assert_eq!(points.split(' ').count(), 5);
    }
}
