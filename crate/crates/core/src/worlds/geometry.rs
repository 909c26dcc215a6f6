//! Planar primitives shared by the grid and arm worlds.

use serde::{Deserialize, Serialize};

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn contains(&self, p: Point) -> bool {
        dist(p, self.center) <= self.radius
    }

    /// Closed-segment intersection test.
    pub fn hits_segment(&self, a: Point, b: Point) -> bool {
        segment_distance(self.center, a, b) <= self.radius
    }

    /// Whether the axis-aligned square `[lo, hi]` meets the disc.
    pub fn hits_box(&self, lo: Point, hi: Point) -> bool {
        let q = [self.center[0].clamp(lo[0], hi[0]), self.center[1].clamp(lo[1], hi[1])];
        dist(q, self.center) <= self.radius
    }
}

pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Distance from `p` to the closed segment `ab`.
pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    };
    dist(p, [a[0] + t * d[0], a[1] + t * d[1]])
}

/// Square-cell bitmap over an axis-aligned box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Raster {
    pub origin: Point,
    pub resolution: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Raster {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_of(&self, p: Point) -> Option<usize> {
        let fx = ((p[0] - self.origin[0]) / self.resolution).floor();
        let fy = ((p[1] - self.origin[1]) / self.resolution).floor();
        if fx < 0.0 || fy < 0.0 || fx >= self.nx as f64 || fy >= self.ny as f64 {
            return None;
        }
        Some(fy as usize * self.nx + fx as usize)
    }

    pub fn center(&self, cell: usize) -> Point {
        let (x, y) = (cell % self.nx, cell / self.nx);
        [
            self.origin[0] + (x as f64 + 0.5) * self.resolution,
            self.origin[1] + (y as f64 + 0.5) * self.resolution,
        ]
    }

    pub fn bounds(&self, cell: usize) -> (Point, Point) {
        let (x, y) = (cell % self.nx, cell / self.nx);
        let lo = [
            self.origin[0] + x as f64 * self.resolution,
            self.origin[1] + y as f64 * self.resolution,
        ];
        (lo, [lo[0] + self.resolution, lo[1] + self.resolution])
    }

    /// Cells whose centers lie within `radius` of `p`, plus the cell
    /// containing `p`.
    pub fn disc(&self, p: Point, radius: f64, mut visit: impl FnMut(usize)) {
        if let Some(c) = self.cell_of(p) {
            visit(c);
        }
        let r = radius.max(0.0);
        let span = |o: f64, v: f64, n: usize| {
            let lo = ((v - r - o) / self.resolution - 0.5).floor().max(0.0) as usize;
            let hi = ((v + r - o) / self.resolution - 0.5).ceil().max(0.0) as usize;
            (lo, hi.min(n.saturating_sub(1)))
        };
        let (x0, x1) = span(self.origin[0], p[0], self.nx);
        let (y0, y1) = span(self.origin[1], p[1], self.ny);
        for y in y0..=y1 {
            for x in x0..=x1 {
                let c = y * self.nx + x;
                if dist(self.center(c), p) <= r {
                    visit(c);
                }
            }
        }
    }
}
