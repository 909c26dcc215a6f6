//! Line-oriented world description.
//!
//! ```text
//! world grid|arm
//! size <W> <H>                  # grid
//! cell <size>                   # grid, default 1
//! block <x> <y> [<w> <h>]       # grid
//! joints <n> <steps>            # arm
//! links <l1> ... <ln>           # arm
//! base <x> <y>                  # arm, default 0 0
//! obstacle <cx> <cy> <r>        # arm
//! metric link|angular           # arm, default link
//! cap <vertices>                # arm, default 1000000
//! start ...                     # cell x y, or one step index per joint
//! goal ...
//! sensor <radius>
//! seed <int>
//! random-obstacles <count> <min_r> <max_r>
//! ```

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::arm::ArmMetric;
use super::geometry::{Circle, Point};
use crate::error::{Error, Result};

pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorldKind {
    Grid,
    Arm,
}

impl std::fmt::Display for WorldKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WorldKind::Grid => "grid",
            WorldKind::Arm => "arm",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomObstacles {
    pub count: usize,
    pub min_radius: f64,
    pub max_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldSpec {
    pub kind: WorldKind,
    pub width: usize,
    pub height: usize,
    pub cell_size: f64,
    /// `(x, y, w, h)` in cells.
    pub blocks: Vec<[usize; 4]>,
    pub joints: usize,
    pub steps_per_joint: usize,
    pub links: Vec<f64>,
    pub base: Point,
    pub obstacles: Vec<Circle>,
    pub metric: ArmMetric,
    pub vertex_cap: usize,
    pub start: Vec<usize>,
    pub goal: Vec<usize>,
    pub sensor_radius: f64,
    pub seed: u64,
    pub random_obstacles: Option<RandomObstacles>,
    /// SHA-256 of the source text.
    pub source_hash: String,
}

fn parse<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} '{tok}'")))
}

fn rest<T: std::str::FromStr>(line: usize, toks: std::str::SplitWhitespace<'_>, what: &str) -> Result<Vec<T>> {
    toks.map(|t| parse(line, Some(t), what)).collect()
}

pub fn parse_world_spec(text: &str) -> Result<WorldSpec> {
    let mut spec = WorldSpec {
        kind: WorldKind::Grid,
        width: 0,
        height: 0,
        cell_size: 1.0,
        blocks: Vec::new(),
        joints: 0,
        steps_per_joint: 0,
        links: Vec::new(),
        base: [0.0, 0.0],
        obstacles: Vec::new(),
        metric: ArmMetric::Link,
        vertex_cap: DEFAULT_VERTEX_CAP,
        start: Vec::new(),
        goal: Vec::new(),
        sensor_radius: 1.0,
        seed: 0,
        random_obstacles: None,
        source_hash: hex::encode(Sha256::digest(text.as_bytes())),
    };
    let mut kind = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let directive = toks.next().unwrap();
        match directive {
            "world" => {
                kind = Some(match toks.next() {
                    Some("grid") => WorldKind::Grid,
                    Some("arm") => WorldKind::Arm,
                    other => return Err(Error::parse(line, format!("unknown world kind {other:?}"))),
                })
            }
            "size" => {
                spec.width = parse(line, toks.next(), "width")?;
                spec.height = parse(line, toks.next(), "height")?;
            }
            "cell" => spec.cell_size = parse(line, toks.next(), "cell size")?,
            "block" => {
                let v: Vec<usize> = rest(line, toks, "block coordinate")?;
                spec.blocks.push(match v[..] {
                    [x, y] => [x, y, 1, 1],
                    [x, y, w, h] => [x, y, w, h],
                    _ => return Err(Error::parse(line, "block takes <x> <y> [<w> <h>]")),
                });
            }
            "joints" => {
                spec.joints = parse(line, toks.next(), "joint count")?;
                spec.steps_per_joint = parse(line, toks.next(), "steps per joint")?;
            }
            "links" => spec.links = rest(line, toks, "link length")?,
            "base" => spec.base = [parse(line, toks.next(), "base x")?, parse(line, toks.next(), "base y")?],
            "obstacle" => spec.obstacles.push(Circle {
                center: [
                    parse(line, toks.next(), "center x")?,
                    parse(line, toks.next(), "center y")?,
                ],
                radius: parse(line, toks.next(), "radius")?,
            }),
            "metric" => {
                spec.metric = match toks.next() {
                    Some("link") => ArmMetric::Link,
                    Some("angular") => ArmMetric::Angular,
                    other => return Err(Error::parse(line, format!("unknown metric {other:?}"))),
                }
            }
            "cap" => spec.vertex_cap = parse(line, toks.next(), "vertex cap")?,
            "start" => spec.start = rest(line, toks, "start coordinate")?,
            "goal" => spec.goal = rest(line, toks, "goal coordinate")?,
            "sensor" => spec.sensor_radius = parse(line, toks.next(), "sensor radius")?,
            "seed" => spec.seed = parse(line, toks.next(), "seed")?,
            "random-obstacles" => {
                spec.random_obstacles = Some(RandomObstacles {
                    count: parse(line, toks.next(), "obstacle count")?,
                    min_radius: parse(line, toks.next(), "minimum radius")?,
                    max_radius: parse(line, toks.next(), "maximum radius")?,
                })
            }
            other => return Err(Error::parse(line, format!("unknown directive '{other}'"))),
        }
    }
    spec.kind = kind.ok_or_else(|| Error::World("missing 'world grid|arm' line".into()))?;
    validate(&spec)?;
    Ok(spec)
}

fn validate(spec: &WorldSpec) -> Result<()> {
    let fail = |m: String| Err(Error::World(m));
    if let Some(r) = spec.random_obstacles {
        if !(r.min_radius > 0.0 && r.min_radius <= r.max_radius) {
            return fail(format!(
                "invalid random obstacle radii {} {}",
                r.min_radius, r.max_radius
            ));
        }
    }
    if spec.sensor_radius.is_nan() || spec.sensor_radius < 0.0 {
        return fail("sensor radius must be non-negative".into());
    }
    match spec.kind {
        WorldKind::Grid => {
            if spec.width == 0 || spec.height == 0 {
                return fail("grid needs 'size <W> <H>' with positive dimensions".into());
            }
            if spec.cell_size.is_nan() || spec.cell_size <= 0.0 {
                return fail("cell size must be positive".into());
            }
            for (name, p) in [("start", &spec.start), ("goal", &spec.goal)] {
                if p.len() != 2 || p[0] >= spec.width || p[1] >= spec.height {
                    return fail(format!("{name} must be a cell 'x y' inside the grid"));
                }
            }
        }
        WorldKind::Arm => {
            if spec.joints == 0 {
                return fail("arm needs at least one joint".into());
            }
            if spec.steps_per_joint < 4 {
                return fail("arm needs at least 4 steps per joint".into());
            }
            if spec.links.len() != spec.joints {
                return fail(format!("{} link lengths for {} joints", spec.links.len(), spec.joints));
            }
            if spec.links.iter().any(|&l| l.is_nan() || l <= 0.0) {
                return fail("link lengths must be positive".into());
            }
            if spec.obstacles.iter().any(|o| o.radius.is_nan() || o.radius <= 0.0) {
                return fail("obstacle radii must be positive".into());
            }
            for (name, p) in [("start", &spec.start), ("goal", &spec.goal)] {
                if p.len() != spec.joints || p.iter().any(|&s| s >= spec.steps_per_joint) {
                    return fail(format!(
                        "{name} needs one step index below {} per joint",
                        spec.steps_per_joint
                    ));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grid() {
        let s = parse_world_spec(
            "world grid\nsize 4 3\ncell 0.5\nblock 1 1\nblock 0 2 2 1\nstart 0 0\ngoal 3 2\nsensor 2\n",
        )
        .unwrap();
        assert_eq!(s.kind, WorldKind::Grid);
        assert_eq!(s.blocks, vec![[1, 1, 1, 1], [0, 2, 2, 1]]);
        assert_eq!(s.sensor_radius, 2.0);
        assert_eq!(s.source_hash.len(), 64);
    }

    #[test]
    fn parses_arm() {
        let s = parse_world_spec(
            "world arm\njoints 2 8\nlinks 1 0.5\nobstacle 1 1 0.2\nstart 0 0\ngoal 4 4\nmetric angular\nrandom-obstacles 3 0.1 0.3\nseed 9\n",
        )
        .unwrap();
        assert_eq!(s.kind, WorldKind::Arm);
        assert_eq!(s.metric, ArmMetric::Angular);
        assert_eq!(s.obstacles.len(), 1);
        assert_eq!(s.random_obstacles.unwrap().count, 3);
        assert_eq!(s.seed, 9);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(parse_world_spec("size 3 3\n").is_err());
        assert!(matches!(
            parse_world_spec("world grid\nsize 3 x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_world_spec("world grid\nsize 3 3\nstart 0 0\ngoal 3 0\n").is_err());
        assert!(parse_world_spec("world arm\njoints 1 3\nlinks 1\nstart 0\ngoal 1\n").is_err());
        assert!(parse_world_spec("world arm\njoints 2 8\nlinks 1 0\nstart 0 0\ngoal 1 1\n").is_err());
        assert!(parse_world_spec("world grid\nteleport 1\n").is_err());
    }
}
