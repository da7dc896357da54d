//! Per-cell scalar fields over a maze grid.
//!
//! One representation serves every engine: electrical potential, current
//! magnitude, chemical concentration, and per-cell conductivity read-outs all
//! carry a real value on channel cells and no value on walls.

use crate::error::{Error, Result};
use crate::maze::{Coord, Maze};
use crate::trace::ValueGrid;

/// What a scalar field means, used by the dump header and renders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Potential,
    Current,
    Conductivity,
    Concentration,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Potential => "potential",
            FieldKind::Current => "current",
            FieldKind::Conductivity => "conductivity",
            FieldKind::Concentration => "concentration",
        }
    }
}

/// Real-valued field on channel cells; walls carry no value.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    values: Vec<Option<f64>>,
    kind: FieldKind,
    /// Fixed wall potential for solves whose walls are held at a value
    /// (current sinks). `None` when walls are insulating or meaningless.
    wall_value: Option<f64>,
}

impl ScalarField {
    /// Field with a value on every channel cell of `maze` and none on walls.
    pub fn zeros(maze: &Maze, kind: FieldKind) -> ScalarField {
        let mut values = vec![None; maze.cell_count()];
        for c in maze.channel_cells() {
            values[maze.index(c)] = Some(0.0);
        }
        ScalarField {
            width: maze.width(),
            height: maze.height(),
            values,
            kind,
            wall_value: None,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub(crate) fn set_wall_value(&mut self, v: Option<f64>) {
        self.wall_value = v;
    }

    pub fn wall_value(&self) -> Option<f64> {
        self.wall_value
    }

    fn index(&self, c: Coord) -> usize {
        c.row * self.width + c.col
    }

    pub fn get(&self, c: Coord) -> Option<f64> {
        if c.row < self.height && c.col < self.width {
            self.values[self.index(c)]
        } else {
            None
        }
    }

    pub fn set(&mut self, c: Coord, v: f64) {
        let i = self.index(c);
        self.values[i] = Some(v);
    }

    /// Values over all defined cells, row-major.
    pub fn defined_values(&self) -> impl Iterator<Item = (Coord, f64)> + '_ {
        (0..self.height).flat_map(move |row| {
            (0..self.width).filter_map(move |col| {
                let c = Coord::new(row, col);
                self.values[self.index(c)].map(|v| (c, v))
            })
        })
    }

    pub fn min_max(&self) -> Option<(f64, f64)> {
        let mut it = self.defined_values().map(|(_, v)| v);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }

    /// Dump format: header `field <width> <height> kind <kind>`, then one row
    /// per line of whitespace-separated shortest round-trip decimals, `-` for
    /// walls.
    pub fn dump(&self) -> String {
        let mut out = format!("field {} {} kind {}\n", self.width, self.height, self.kind.name());
        for row in 0..self.height {
            let mut tokens = Vec::with_capacity(self.width);
            for col in 0..self.width {
                match self.values[row * self.width + col] {
                    Some(v) => tokens.push(format!("{v}")),
                    None => tokens.push("-".to_string()),
                }
            }
            out.push_str(&tokens.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn max_value(&self) -> Option<f64> {
        self.min_max().map(|(_, hi)| hi)
    }

    /// Parse the [`ScalarField::dump`] format.
    pub fn parse(text: &str) -> Result<ScalarField> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedInput("empty field text".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let (width, height, kind) = match parts.as_slice() {
            ["field", w, h, "kind", k] => {
                let width: usize = w
                    .parse()
                    .map_err(|_| Error::MalformedInput(format!("bad width {w:?}")))?;
                let height: usize = h
                    .parse()
                    .map_err(|_| Error::MalformedInput(format!("bad height {h:?}")))?;
                let kind = match *k {
                    "potential" => FieldKind::Potential,
                    "current" => FieldKind::Current,
                    "conductivity" => FieldKind::Conductivity,
                    "concentration" => FieldKind::Concentration,
                    other => {
                        return Err(Error::MalformedInput(format!("unknown field kind {other:?}")))
                    }
                };
                (width, height, kind)
            }
            _ => return Err(Error::MalformedInput(format!("bad field header {header:?}"))),
        };
        let mut values = Vec::with_capacity(width * height);
        for line in lines.take(height) {
            for token in line.split_whitespace() {
                if token == "-" {
                    values.push(None);
                } else {
                    let v: f64 = token
                        .parse()
                        .map_err(|_| Error::MalformedInput(format!("bad value {token:?}")))?;
                    values.push(Some(v));
                }
            }
        }
        if values.len() != width * height {
            return Err(Error::MalformedInput(format!(
                "expected {} values, found {}",
                width * height,
                values.len()
            )));
        }
        Ok(ScalarField {
            width,
            height,
            values,
            kind,
            wall_value: None,
        })
    }
}

impl ValueGrid for ScalarField {
    fn width(&self) -> usize {
        self.width
    }

    fn height(&self) -> usize {
        self.height
    }

    fn value(&self, c: Coord) -> Option<f64> {
        self.get(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trips() {
        let maze = Maze::parse("S.D\n#.#").unwrap();
        let mut field = ScalarField::zeros(&maze, FieldKind::Potential);
        field.set(Coord::new(0, 0), 1.0);
        field.set(Coord::new(0, 1), 0.125);
        field.set(Coord::new(1, 1), -0.25);
        let text = field.dump();
        assert_eq!(text, "field 3 2 kind potential\n1 0.125 0\n- -0.25 -\n");
        let back = ScalarField::parse(&text).unwrap();
        assert_eq!(back, {
            let mut f = field.clone();
            f.set_wall_value(None);
            f
        });
    }

    #[test]
    fn min_max_ignores_walls() {
        let maze = Maze::parse("S#D").unwrap();
        let mut field = ScalarField::zeros(&maze, FieldKind::Concentration);
        field.set(Coord::new(0, 0), 2.0);
        field.set(Coord::new(0, 2), -1.0);
        assert_eq!(field.min_max(), Some((-1.0, 2.0)));
    }
}
