//! Static SVG snapshots of a planning instance.
//!
//! Raster cells are shaded by what the agent knows: unsensed cells grey,
//! sensed obstacle cells dark, sensed free cells white. Edges are drawn
//! between workspace points (cell centers for the grid, end effectors for the
//! arm) and styled by class: class 1 solid blue, class 2 dashed blue, class 3
//! solid red. The search tree is drawn thin, the plan thick, and the executed
//! trajectory in black. Coordinates are printed with fixed precision so equal
//! inputs give byte-identical files.

use std::fmt::Write as _;

use crate::error::Result;
use crate::graph::{ClassId, ColoredGraph, VertexId};
use crate::search::PlanResult;
use crate::sim::Snapshot;
use crate::worlds::{Belief, Point, World};

const PIXELS: f64 = 640.0;

const UNKNOWN_FILL: &str = "#c8c8c8";
const OCCUPIED_FILL: &str = "#404040";
const FREE_FILL: &str = "#ffffff";

pub struct Scene<'a> {
    pub world: &'a World,
    pub belief: &'a Belief,
    pub graph: Option<&'a ColoredGraph>,
    pub result: Option<&'a PlanResult>,
    pub trajectory: &'a [VertexId],
}

impl<'a> From<&Snapshot<'a>> for Scene<'a> {
    fn from(s: &Snapshot<'a>) -> Self {
        Scene {
            world: s.world,
            belief: s.belief,
            graph: Some(s.graph),
            result: Some(s.result),
            trajectory: s.trajectory,
        }
    }
}

struct Frame {
    origin: Point,
    scale: f64,
}

impl Frame {
    fn at(&self, p: Point) -> (f64, f64) {
        (
            (p[0] - self.origin[0]) * self.scale,
            (p[1] - self.origin[1]) * self.scale,
        )
    }
}

fn style(class: ClassId) -> &'static str {
    match class.get() {
        1 => r##"stroke="#1f4fd0""##,
        2 => r##"stroke="#1f4fd0" stroke-dasharray="4 3""##,
        _ => r##"stroke="#d01f1f""##,
    }
}

pub fn render_svg(scene: &Scene<'_>) -> Result<String> {
    let world = scene.world;
    let raster = world.raster();
    let (w, h) = (
        raster.nx as f64 * raster.resolution,
        raster.ny as f64 * raster.resolution,
    );
    let frame = Frame {
        origin: raster.origin,
        scale: PIXELS / w.max(h),
    };
    let (pw, ph) = (w * frame.scale, h * frame.scale);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{pw:.0}" height="{ph:.0}" viewBox="0 0 {pw:.2} {ph:.2}">"#
    );

    shade_cells(&mut out, world, scene.belief, &frame);
    if let World::Arm(arm) = world {
        out.push_str(r##"<g fill="none" stroke="#000000" stroke-width="1">"##);
        out.push('\n');
        for o in &arm.obstacles {
            let (x, y) = frame.at(o.center);
            let _ = writeln!(
                out,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}"/>"#,
                o.radius * frame.scale
            );
        }
        out.push_str("</g>\n");
    }

    if let (Some(graph), Some(result)) = (scene.graph, scene.result) {
        out.push_str(r#"<g fill="none" stroke-width="0.8" opacity="0.7">"#);
        out.push('\n');
        for &(u, v) in &result.tree_edges {
            edge_line(&mut out, world, graph, &frame, u, v)?;
        }
        out.push_str("</g>\n");
        out.push_str(r#"<g fill="none" stroke-width="3">"#);
        out.push('\n');
        for pair in result.path.windows(2) {
            edge_line(&mut out, world, graph, &frame, pair[0], pair[1])?;
        }
        out.push_str("</g>\n");
    }

    if scene.trajectory.len() > 1 {
        out.push_str(r##"<polyline fill="none" stroke="#000000" stroke-width="2" points=""##);
        for (i, &v) in scene.trajectory.iter().enumerate() {
            let (x, y) = frame.at(world.workspace_point(v));
            let sep = if i == 0 { "" } else { " " };
            let _ = write!(out, "{sep}{x:.2},{y:.2}");
        }
        out.push_str("\"/>\n");
    }
    if let (World::Arm(arm), Some(&at)) = (world, scene.trajectory.last()) {
        out.push_str(r##"<polyline fill="none" stroke="#2a8a2a" stroke-width="2.5" points=""##);
        for (i, p) in arm.chain(at).into_iter().enumerate() {
            let (x, y) = frame.at(p);
            let sep = if i == 0 { "" } else { " " };
            let _ = write!(out, "{sep}{x:.2},{y:.2}");
        }
        out.push_str("\"/>\n");
    }
    for (v, fill) in [(world.start(), "#2a8a2a"), (world.goal(), "#e08a00")] {
        let (x, y) = frame.at(world.workspace_point(v));
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="{fill}"/>"#);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Row-wise runs of equally shaded cells.
fn shade_cells(out: &mut String, world: &World, belief: &Belief, frame: &Frame) {
    let raster = world.raster();
    let known = belief.known_mask();
    let occupied = world.occupancy();
    let fill = |c: usize| match (known[c], occupied[c]) {
        (false, _) => UNKNOWN_FILL,
        (true, true) => OCCUPIED_FILL,
        (true, false) => FREE_FILL,
    };
    let side = raster.resolution * frame.scale;
    out.push_str("<g stroke=\"none\">\n");
    for y in 0..raster.ny {
        let mut x = 0;
        while x < raster.nx {
            let f = fill(y * raster.nx + x);
            let mut end = x + 1;
            while end < raster.nx && fill(y * raster.nx + end) == f {
                end += 1;
            }
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{side:.2}" fill="{f}"/>"#,
                x as f64 * side,
                y as f64 * side,
                (end - x) as f64 * side
            );
            x = end;
        }
    }
    out.push_str("</g>\n");
}

fn edge_line(
    out: &mut String,
    world: &World,
    graph: &ColoredGraph,
    frame: &Frame,
    u: VertexId,
    v: VertexId,
) -> Result<()> {
    let Some(e) = graph.find_edge(u, v) else {
        return Ok(());
    };
    let class = graph.evaluate_edge(e)?.class;
    let (x1, y1) = frame.at(world.workspace_point(u));
    let (x2, y2) = frame.at(world.workspace_point(v));
    let _ = writeln!(
        out,
        r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" {}/>"#,
        style(class)
    );
    Ok(())
}
