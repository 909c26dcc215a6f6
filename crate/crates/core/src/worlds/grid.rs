//! 8-connected grid for a point robot.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::geometry::{Circle, Point, Raster};
use super::spec::WorldSpec;
use crate::error::{Error, Result};
use crate::graph::{ClassId, Metric, Topology, TopologyBuilder, VertexId};

const PLACEMENT_TRIES: usize = 1000;

/// One vertex per cell, at the cell center; vertex id is `y * width + x`.
#[derive(Debug)]
pub struct GridWorld {
    pub width: usize,
    pub height: usize,
    pub cell_size: f64,
    pub(super) occupied: Vec<bool>,
    pub(super) raster: Raster,
    pub(super) topology: Arc<Topology>,
    pub(super) start: VertexId,
    pub(super) goal: VertexId,
}

impl GridWorld {
    pub fn new(
        width: usize,
        height: usize,
        cell_size: f64,
        occupied: Vec<bool>,
        start: [usize; 2],
        goal: [usize; 2],
    ) -> Result<Self> {
        assert_eq!(occupied.len(), width * height);
        let id = |[x, y]: [usize; 2]| y * width + x;
        for (name, cell) in [("start", start), ("goal", goal)] {
            if cell[0] >= width || cell[1] >= height {
                return Err(Error::World(format!("{name} cell {cell:?} outside the grid")));
            }
            if occupied[id(cell)] {
                return Err(Error::World(format!("{name} cell {cell:?} is occupied")));
            }
        }
        let raster = Raster {
            origin: [0.0, 0.0],
            resolution: cell_size,
            nx: width,
            ny: height,
        };
        let mut b = TopologyBuilder::new(2, Metric::Euclidean);
        for cell in 0..raster.len() {
            b.add_vertex(&raster.center(cell));
        }
        for y in 0..height {
            for x in 0..width {
                let u = VertexId::from(id([x, y]));
                let mut link = |nx: usize, ny: usize| {
                    b.add_edge(u, VertexId::from(id([nx, ny]))).expect("cells exist");
                };
                if x + 1 < width {
                    link(x + 1, y);
                }
                if y + 1 < height {
                    link(x, y + 1);
                    if x + 1 < width {
                        link(x + 1, y + 1);
                    }
                    if x > 0 {
                        link(x - 1, y + 1);
                    }
                }
            }
        }
        Ok(GridWorld {
            width,
            height,
            cell_size,
            occupied,
            raster,
            topology: Arc::new(b.build()?),
            start: VertexId::from(id(start)),
            goal: VertexId::from(id(goal)),
        })
    }

    pub(super) fn from_spec(spec: &WorldSpec, seed: u64) -> Result<Self> {
        let (w, h) = (spec.width, spec.height);
        let mut occupied = vec![false; w * h];
        for &[x, y, bw, bh] in &spec.blocks {
            for yy in y..(y + bh).min(h) {
                for xx in x..(x + bw).min(w) {
                    occupied[yy * w + xx] = true;
                }
            }
        }
        let start = [spec.start[0], spec.start[1]];
        let goal = [spec.goal[0], spec.goal[1]];
        if let Some(r) = spec.random_obstacles {
            let cs = spec.cell_size;
            let raster = Raster {
                origin: [0.0, 0.0],
                resolution: cs,
                nx: w,
                ny: h,
            };
            let keep = [start[1] * w + start[0], goal[1] * w + goal[0]];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..r.count {
                for _ in 0..PLACEMENT_TRIES {
                    let disc = Circle {
                        center: [
                            rng.random_range(0.0..w as f64 * cs),
                            rng.random_range(0.0..h as f64 * cs),
                        ],
                        radius: rng.random_range(r.min_radius..=r.max_radius),
                    };
                    if keep.iter().any(|&c| disc.contains(raster.center(c))) {
                        continue;
                    }
                    for (c, occ) in occupied.iter_mut().enumerate() {
                        if disc.contains(raster.center(c)) {
                            *occ = true;
                        }
                    }
                    break;
                }
            }
        }
        GridWorld::new(w, h, spec.cell_size, occupied, start, goal)
    }

    pub fn vertex(&self, x: usize, y: usize) -> VertexId {
        VertexId::from(y * self.width + x)
    }

    pub fn center(&self, v: VertexId) -> Point {
        self.raster.center(v.index())
    }

    pub fn free(&self, v: VertexId) -> bool {
        !self.occupied[v.index()]
    }

    pub(super) fn classify_vertex(&self, known: &[bool], v: VertexId) -> ClassId {
        match (known[v.index()], self.occupied[v.index()]) {
            (false, _) => ClassId::UNKNOWN,
            (true, true) => ClassId::INFEASIBLE,
            (true, false) => ClassId::FEASIBLE,
        }
    }
}
