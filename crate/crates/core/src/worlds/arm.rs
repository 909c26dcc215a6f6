//! n-joint planar arm on a wrapping joint lattice.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{dist, segment_distance, Circle, Point, Raster};
use super::spec::WorldSpec;
use crate::error::{Error, Result};
use crate::graph::{ClassId, Metric, Topology, TopologyBuilder, VertexId};

const PLACEMENT_TRIES: usize = 1000;
/// Interior samples per edge for classification (parameter spacing 1/4).
const EDGE_SAMPLES: usize = 4;
/// Ground-truth checks use a hundred times finer spacing.
const DENSE_SAMPLES: usize = EDGE_SAMPLES * 100;

/// Edge weight scaling per joint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmMetric {
    /// Joint angle times the total length of the links it moves.
    #[default]
    Link,
    /// Plain joint angle.
    Angular,
}

#[derive(Debug)]
pub struct ArmWorld {
    pub joints: usize,
    pub steps_per_joint: usize,
    pub links: Vec<f64>,
    pub base: Point,
    pub obstacles: Vec<Circle>,
    pub metric: ArmMetric,
    pub(super) occupied: Vec<bool>,
    pub(super) raster: Raster,
    pub(super) topology: Arc<Topology>,
    pub(super) start: VertexId,
    pub(super) goal: VertexId,
    /// Raster cells touched by each vertex's link samples, flattened.
    cell_offsets: Vec<u32>,
    cells: Vec<u32>,
}

pub struct ArmParams<'a> {
    pub joints: usize,
    pub steps_per_joint: usize,
    pub links: &'a [f64],
    pub base: Point,
    pub obstacles: Vec<Circle>,
    pub metric: ArmMetric,
    pub vertex_cap: usize,
}

impl ArmWorld {
    pub fn new(p: ArmParams<'_>, start: &[usize], goal: &[usize]) -> Result<Self> {
        if p.joints == 0 || p.links.len() != p.joints {
            return Err(Error::World("one link length per joint is required".into()));
        }
        if p.links.iter().any(|&l| l.is_nan() || l <= 0.0) {
            return Err(Error::World("link lengths must be positive".into()));
        }
        if p.steps_per_joint < 4 {
            return Err(Error::World("at least 4 steps per joint are required".into()));
        }
        let n = u32::try_from(p.joints)
            .ok()
            .and_then(|j| p.steps_per_joint.checked_pow(j))
            .filter(|&n| n <= p.vertex_cap)
            .ok_or_else(|| {
                Error::World(format!(
                    "{}^{} joint configurations exceed the cap of {}",
                    p.steps_per_joint, p.joints, p.vertex_cap
                ))
            })?;

        let reach: f64 = p.links.iter().sum();
        let resolution = p.obstacles.iter().map(|o| o.radius).fold(reach / 10.0, f64::min) / 4.0;
        let half = reach + resolution;
        let side = (2.0 * half / resolution).ceil() as usize;
        let raster = Raster {
            origin: [p.base[0] - half, p.base[1] - half],
            resolution,
            nx: side,
            ny: side,
        };
        let occupied = (0..raster.len())
            .map(|c| {
                let (lo, hi) = raster.bounds(c);
                p.obstacles.iter().any(|o| o.hits_box(lo, hi))
            })
            .collect();

        let step = TAU / p.steps_per_joint as f64;
        let scales = match p.metric {
            ArmMetric::Link => (0..p.joints).map(|i| p.links[i..].iter().sum()).collect(),
            ArmMetric::Angular => vec![1.0; p.joints],
        };
        let mut b = TopologyBuilder::new(p.joints, Metric::Torus { period: TAU, scales });
        let mut digits = vec![0usize; p.joints];
        for _ in 0..n {
            let angles: Vec<f64> = digits.iter().map(|&d| d as f64 * step).collect();
            b.add_vertex(&angles);
            increment(&mut digits, p.steps_per_joint);
        }
        let mut stride = 1;
        for _ in 0..p.joints {
            for v in 0..n {
                let digit = (v / stride) % p.steps_per_joint;
                let w = if digit + 1 == p.steps_per_joint {
                    v - digit * stride
                } else {
                    v + stride
                };
                b.add_edge(VertexId::from(v), VertexId::from(w))
                    .expect("lattice vertices exist");
            }
            stride *= p.steps_per_joint;
        }

        let mut world = ArmWorld {
            joints: p.joints,
            steps_per_joint: p.steps_per_joint,
            links: p.links.to_vec(),
            base: p.base,
            obstacles: p.obstacles,
            metric: p.metric,
            occupied,
            raster,
            topology: Arc::new(b.build()?),
            start: VertexId(0),
            goal: VertexId(0),
            cell_offsets: Vec::new(),
            cells: Vec::new(),
        };
        world.start = world.vertex_of(start)?;
        world.goal = world.vertex_of(goal)?;
        for (name, v) in [("start", world.start), ("goal", world.goal)] {
            if !world.config_free(&world.config(v)) {
                return Err(Error::World(format!("{name} configuration collides with an obstacle")));
            }
        }
        world.index_cells();
        Ok(world)
    }

    pub(super) fn from_spec(spec: &WorldSpec, seed: u64) -> Result<Self> {
        let mut obstacles = spec.obstacles.clone();
        if let Some(r) = spec.random_obstacles {
            // Random obstacles avoid the base and the start and goal poses.
            let reach: f64 = spec.links.iter().sum();
            let step = TAU / spec.steps_per_joint as f64;
            let poses: Vec<Vec<Point>> = [&spec.start, &spec.goal]
                .iter()
                .map(|idx| {
                    chain_points(
                        spec.base,
                        &spec.links,
                        &idx.iter().map(|&d| d as f64 * step).collect::<Vec<_>>(),
                    )
                })
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..r.count {
                for _ in 0..PLACEMENT_TRIES {
                    let c = Circle {
                        center: [
                            rng.random_range(spec.base[0] - reach..=spec.base[0] + reach),
                            rng.random_range(spec.base[1] - reach..=spec.base[1] + reach),
                        ],
                        radius: rng.random_range(r.min_radius..=r.max_radius),
                    };
                    if dist(c.center, spec.base) <= c.radius || poses.iter().any(|pose| chain_hits(pose, &c)) {
                        continue;
                    }
                    obstacles.push(c);
                    break;
                }
            }
        }
        ArmWorld::new(
            ArmParams {
                joints: spec.joints,
                steps_per_joint: spec.steps_per_joint,
                links: &spec.links,
                base: spec.base,
                obstacles,
                metric: spec.metric,
                vertex_cap: spec.vertex_cap,
            },
            &spec.start,
            &spec.goal,
        )
    }

    pub fn step_angle(&self) -> f64 {
        TAU / self.steps_per_joint as f64
    }

    /// Vertex for a step index per joint; joint 0 is the least significant
    /// digit.
    pub fn vertex_of(&self, indices: &[usize]) -> Result<VertexId> {
        if indices.len() != self.joints || indices.iter().any(|&d| d >= self.steps_per_joint) {
            return Err(Error::World(format!(
                "configuration {indices:?} needs {} indices below {}",
                self.joints, self.steps_per_joint
            )));
        }
        Ok(VertexId::from(
            indices
                .iter()
                .rev()
                .fold(0usize, |acc, &d| acc * self.steps_per_joint + d),
        ))
    }

    pub fn config(&self, v: VertexId) -> Vec<f64> {
        self.topology.position(v).to_vec()
    }

    /// Base, joint positions and end effector.
    pub fn chain(&self, v: VertexId) -> Vec<Point> {
        chain_points(self.base, &self.links, self.topology.position(v))
    }

    fn link_samples(&self, angles: &[f64], mut visit: impl FnMut(Point)) {
        let pts = chain_points(self.base, &self.links, angles);
        let r = self.raster.resolution;
        for (i, pair) in pts.windows(2).enumerate() {
            let k = (self.links[i] / r).ceil().max(1.0) as usize;
            for s in 0..=k {
                let t = s as f64 / k as f64;
                visit([
                    pair[0][0] + t * (pair[1][0] - pair[0][0]),
                    pair[0][1] + t * (pair[1][1] - pair[0][1]),
                ]);
            }
        }
    }

    fn index_cells(&mut self) {
        let n = self.topology.vertex_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cells = Vec::new();
        let mut scratch = Vec::new();
        offsets.push(0u32);
        for v in 0..n {
            scratch.clear();
            let angles = self.config(VertexId::from(v));
            self.link_samples(&angles, |p| {
                scratch.push(self.raster.cell_of(p).expect("raster covers the reach") as u32)
            });
            scratch.sort_unstable();
            scratch.dedup();
            cells.extend_from_slice(&scratch);
            offsets.push(cells.len() as u32);
        }
        self.cell_offsets = offsets;
        self.cells = cells;
    }

    fn class_of_cells(&self, known: &[bool], cells: impl Iterator<Item = usize>) -> ClassId {
        let mut unknown = false;
        for c in cells {
            if !known[c] {
                unknown = true;
            } else if self.occupied[c] {
                return ClassId::INFEASIBLE;
            }
        }
        if unknown {
            ClassId::UNKNOWN
        } else {
            ClassId::FEASIBLE
        }
    }

    pub(super) fn classify_vertex(&self, known: &[bool], v: VertexId) -> ClassId {
        let (a, b) = (
            self.cell_offsets[v.index()] as usize,
            self.cell_offsets[v.index() + 1] as usize,
        );
        self.class_of_cells(known, self.cells[a..b].iter().map(|&c| c as usize))
    }

    pub fn classify_config(&self, known: &[bool], angles: &[f64]) -> ClassId {
        let mut cells = Vec::new();
        self.link_samples(angles, |p| cells.extend(self.raster.cell_of(p)));
        self.class_of_cells(known, cells.into_iter())
    }

    /// Configuration at parameter `t` along the lattice edge `u`–`v`.
    pub fn interpolate(&self, u: VertexId, v: VertexId, t: f64) -> Vec<f64> {
        let (a, b) = (self.topology.position(u), self.topology.position(v));
        let step = self.step_angle();
        a.iter()
            .zip(b)
            .map(|(&x, &y)| {
                let mut d = (y - x).rem_euclid(TAU);
                if d > TAU / 2.0 {
                    d -= TAU;
                }
                if d.abs() < step / 2.0 {
                    x
                } else {
                    x + t * d
                }
            })
            .collect()
    }

    /// Worst class over the interior samples of an edge.
    pub(super) fn classify_interior(&self, known: &[bool], u: VertexId, v: VertexId) -> ClassId {
        (1..EDGE_SAMPLES)
            .map(|s| self.classify_config(known, &self.interpolate(u, v, s as f64 / EDGE_SAMPLES as f64)))
            .max()
            .unwrap_or(ClassId::FEASIBLE)
    }

    pub fn config_free(&self, angles: &[f64]) -> bool {
        let pts = chain_points(self.base, &self.links, angles);
        !self.obstacles.iter().any(|o| chain_hits(&pts, o))
    }

    pub(super) fn edge_free(&self, u: VertexId, v: VertexId) -> bool {
        (0..=DENSE_SAMPLES).all(|s| self.config_free(&self.interpolate(u, v, s as f64 / DENSE_SAMPLES as f64)))
    }

    /// Cells whose centers lie within `radius` of any point on the links,
    /// plus the cells containing the link sample points.
    pub(super) fn sensed_cells(&self, v: VertexId, radius: f64, mut visit: impl FnMut(usize)) {
        let pts = self.chain(v);
        self.link_samples(self.topology.position(v), |p| {
            visit(self.raster.cell_of(p).expect("inside raster"))
        });
        let r = radius.max(0.0);
        let lo = pts
            .iter()
            .fold([f64::INFINITY; 2], |m, p| [m[0].min(p[0]), m[1].min(p[1])]);
        let hi = pts
            .iter()
            .fold([f64::NEG_INFINITY; 2], |m, p| [m[0].max(p[0]), m[1].max(p[1])]);
        let res = self.raster.resolution;
        let o = self.raster.origin;
        let clamp = |x: f64, n: usize| (x.max(0.0) as usize).min(n - 1);
        let (x0, x1) = (
            clamp(((lo[0] - r - o[0]) / res).floor(), self.raster.nx),
            clamp(((hi[0] + r - o[0]) / res).ceil(), self.raster.nx),
        );
        let (y0, y1) = (
            clamp(((lo[1] - r - o[1]) / res).floor(), self.raster.ny),
            clamp(((hi[1] + r - o[1]) / res).ceil(), self.raster.ny),
        );
        for y in y0..=y1 {
            for x in x0..=x1 {
                let c = y * self.raster.nx + x;
                let p = self.raster.center(c);
                if pts.windows(2).any(|s| segment_distance(p, s[0], s[1]) <= r) {
                    visit(c);
                }
            }
        }
    }
}

fn increment(digits: &mut [usize], base: usize) {
    for d in digits {
        *d += 1;
        if *d < base {
            return;
        }
        *d = 0;
    }
}

fn chain_points(base: Point, links: &[f64], angles: &[f64]) -> Vec<Point> {
    let mut pts = Vec::with_capacity(links.len() + 1);
    let mut p = base;
    let mut heading = 0.0;
    pts.push(p);
    for (l, a) in links.iter().zip(angles) {
        heading += a;
        p = [p[0] + l * heading.cos(), p[1] + l * heading.sin()];
        pts.push(p);
    }
    pts
}

fn chain_hits(pts: &[Point], c: &Circle) -> bool {
    pts.windows(2).any(|s| c.hits_segment(s[0], s[1]))
}
