//! Line-oriented graph file format.
//!
//! ```text
//! # comment
//! classes <K> <L>
//! vertex <id> <class> <x> [<y> ...]
//! edge <u> <v> [w=<weight>] [c=<class>]
//! start <id>
//! goal <id>
//! ```
//!
//! Edges are undirected. Vertex ids must be `0..n` in any order. Omitted
//! `w=`/`c=` leave the edge to the graph's evaluator.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{ClassId, ColoredGraph, Declared, Metric, TopologyBuilder, VertexId};

#[derive(Debug)]
pub struct GraphProblem {
    pub graph: ColoredGraph,
    pub start: Option<VertexId>,
    pub goal: Option<VertexId>,
}

pub fn load_graph(text: &str) -> Result<ColoredGraph> {
    load_problem(text).map(|p| p.graph)
}

struct RawVertex {
    line: usize,
    id: usize,
    class: usize,
    position: Vec<f64>,
}

struct RawEdge {
    line: usize,
    u: usize,
    v: usize,
    weight: Option<f64>,
    class: Option<usize>,
}

fn num<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} '{tok}'")))
}

pub fn load_problem(text: &str) -> Result<GraphProblem> {
    let mut classes: Option<(usize, usize)> = None;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut start = None;
    let mut goal = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        match toks.next().unwrap() {
            "classes" => {
                let k: usize = num(line, toks.next(), "K")?;
                let l: usize = num(line, toks.next(), "L")?;
                if k == 0 || l < k || ClassId::new(l).is_none() {
                    return Err(Error::parse(line, format!("invalid class counts {k} {l}")));
                }
                classes = Some((k, l));
            }
            "vertex" => {
                let id = num(line, toks.next(), "vertex id")?;
                let class = num(line, toks.next(), "vertex class")?;
                let position = toks
                    .map(|t| num::<f64>(line, Some(t), "coordinate"))
                    .collect::<Result<Vec<_>>>()?;
                if position.is_empty() {
                    return Err(Error::parse(line, "vertex needs at least one coordinate"));
                }
                vertices.push(RawVertex {
                    line,
                    id,
                    class,
                    position,
                });
            }
            "edge" => {
                let u = num(line, toks.next(), "edge endpoint")?;
                let v = num(line, toks.next(), "edge endpoint")?;
                let mut e = RawEdge {
                    line,
                    u,
                    v,
                    weight: None,
                    class: None,
                };
                for t in toks {
                    if let Some(w) = t.strip_prefix("w=") {
                        e.weight = Some(num(line, Some(w), "weight")?);
                    } else if let Some(c) = t.strip_prefix("c=") {
                        e.class = Some(num(line, Some(c), "class")?);
                    } else {
                        return Err(Error::parse(line, format!("unexpected token '{t}'")));
                    }
                }
                edges.push(e);
            }
            "start" => start = Some(num::<usize>(line, toks.next(), "start id")?),
            "goal" => goal = Some(num::<usize>(line, toks.next(), "goal id")?),
            other => return Err(Error::parse(line, format!("unknown directive '{other}'"))),
        }
    }

    let (k, l) = classes.unwrap_or((3, 3));
    let n = vertices.len();
    vertices.sort_by_key(|v| v.id);
    let dim = vertices.first().map_or(1, |v| v.position.len());
    let mut topo = TopologyBuilder::new(dim, Metric::Euclidean);
    let mut vclass = Vec::with_capacity(n);
    for (expected, v) in vertices.iter().enumerate() {
        if v.id != expected {
            return Err(Error::parse(
                v.line,
                format!("vertex ids must be dense 0..{n}, found {}", v.id),
            ));
        }
        if v.position.len() != dim {
            return Err(Error::parse(v.line, "inconsistent coordinate dimension"));
        }
        let class = ClassId::new(v.class)
            .filter(|_| v.class <= k)
            .ok_or_else(|| Error::parse(v.line, format!("vertex class {} out of range 1..={k}", v.class)))?;
        vclass.push(class);
        topo.add_vertex(&v.position);
    }

    let check_vertex = |line: usize, id: usize| -> Result<VertexId> {
        if id < n {
            Ok(VertexId::from(id))
        } else {
            Err(Error::parse(line, format!("unknown vertex {id}")))
        }
    };

    let metric = Metric::Euclidean;
    for e in &edges {
        let u = check_vertex(e.line, e.u)?;
        let v = check_vertex(e.line, e.v)?;
        let class = match e.class {
            None => None,
            Some(c) => {
                let id = ClassId::new(c)
                    .filter(|_| c <= l)
                    .ok_or_else(|| Error::parse(e.line, format!("edge class {c} out of range 1..={l}")))?;
                let floor = vclass[u.index()].max(vclass[v.index()]);
                if id < floor {
                    return Err(Error::parse(
                        e.line,
                        format!("edge class {c} is better than endpoint class {floor}"),
                    ));
                }
                Some(id)
            }
        };
        if let Some(w) = e.weight {
            let d = metric.distance(&vertices[u.index()].position, &vertices[v.index()].position);
            if w.is_nan() || w < 0.0 || w < d - 1e-9 {
                return Err(Error::parse(
                    e.line,
                    format!("weight {w} is below the endpoint distance {d:.6}"),
                ));
            }
        }
        topo.add_declared_edge(
            u,
            v,
            Declared {
                weight: e.weight,
                class,
            },
        )
        .map_err(|err| Error::parse(e.line, err.to_string()))?;
    }

    let topology = topo.build().map_err(|e| Error::parse(0, e.to_string()))?;
    let graph = ColoredGraph::new(Arc::new(topology), vclass, k, l)?;
    let start = start.map(|s| check_vertex(0, s)).transpose()?;
    let goal = goal.map(|s| check_vertex(0, s)).transpose()?;
    Ok(GraphProblem { graph, start, goal })
}

/// Serialises a graph in the file format, declaring every edge's true values.
pub fn write_graph(graph: &ColoredGraph, start: Option<VertexId>, goal: Option<VertexId>) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "classes {} {}", graph.vertex_class_count(), graph.class_count());
    for i in 0..graph.vertex_count() {
        let v = VertexId::from(i);
        let _ = write!(out, "vertex {i} {}", graph.vertex_class(v));
        for x in graph.position(v) {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    for e in 0..graph.edge_count() {
        let e = crate::graph::EdgeId(e as u32);
        let [u, v] = graph.endpoints(e);
        let eval = graph.evaluate_edge(e)?;
        let _ = writeln!(out, "edge {u} {v} w={} c={}", eval.weight, eval.class);
    }
    if let Some(s) = start {
        let _ = writeln!(out, "start {s}");
    }
    if let Some(g) = goal {
        let _ = writeln!(out, "goal {g}");
    }
    Ok(out)
}
