//! Channel cells packed into a dense index with per-cell neighbor lists,
//! shared scaffolding for the iterative solvers.

use crate::maze::{Coord, Direction, Maze};

pub(crate) struct ChannelSystem {
    pub cells: Vec<Coord>,
    /// Grid index -> packed index, -1 for walls.
    pub packed: Vec<i32>,
    /// Packed neighbor indices in N, E, S, W order, -1 where the stencil slot
    /// is a wall or out of bounds.
    pub neighbors: Vec<[i32; 4]>,
}

impl ChannelSystem {
    pub fn build(maze: &Maze) -> ChannelSystem {
        let mut packed = vec![-1i32; maze.cell_count()];
        let cells: Vec<Coord> = maze.channel_cells().collect();
        for (i, &c) in cells.iter().enumerate() {
            packed[maze.index(c)] = i as i32;
        }
        let neighbors = cells
            .iter()
            .map(|&c| {
                let mut nb = [-1i32; 4];
                for (k, d) in Direction::ALL.iter().enumerate() {
                    if let Some(n) = d.step(c, maze.width(), maze.height()) {
                        if maze.is_channel(n) {
                            nb[k] = packed[maze.index(n)];
                        }
                    }
                }
                nb
            })
            .collect();
        ChannelSystem {
            cells,
            packed,
            neighbors,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn id(&self, maze: &Maze, c: Coord) -> usize {
        self.packed[maze.index(c)] as usize
    }
}
