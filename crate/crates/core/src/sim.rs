//! Sense, plan, act loop and batch runner.
//!
//! Each cycle senses from the agent's vertex, replans from scratch on the
//! belief graph when the belief changed (or there is no plan), checks the
//! plan's first edge against ground truth and either moves along it or, if
//! it turns out to be blocked, marks it infeasible and replans in place.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::astar::{astar, AStarOptions};
use crate::error::{Error, Result};
use crate::graph::{ClassId, ClassSet, ColoredGraph, VertexId};
use crate::order::{OrderMode, PathSignature};
use crate::search::{coa_star, Heuristic, PlanResult, PlanStatus, SearchOptions};
use crate::worlds::{Belief, World, WorldKind, WorldSpec};

pub const DEFAULT_STEP_CAP: usize = 10_000;

pub const CSV_HEADER: &str = "world,seed,radius,planner,step,path_len,unc_ratio,n1,n2,n3,pops,evals,runtime_ms,outcome";
pub const SUMMARY_HEADER: &str = "world,planner,plans,unc_mean,unc_median,unc_std,len_mean,len_median,len_std";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Planner {
    Coa,
    #[serde(rename = "astar")]
    AStar,
}

impl fmt::Display for Planner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Planner::Coa => "coa",
            Planner::AStar => "astar",
        })
    }
}

impl FromStr for Planner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coa" => Ok(Planner::Coa),
            "astar" => Ok(Planner::AStar),
            other => Err(Error::World(format!("unknown planner '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    ReachedGoal,
    Blocked,
    NoPath,
    StepCapExceeded,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::ReachedGoal => "ReachedGoal",
            Outcome::Blocked => "Blocked",
            Outcome::NoPath => "NoPath",
            Outcome::StepCapExceeded => "StepCapExceeded",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EpisodeParams {
    /// Planner that drives execution.
    pub planner: Planner,
    pub step_cap: usize,
    pub order_mode: OrderMode,
    pub forbidden_classes: ClassSet,
    /// Overrides the world's sensor radius.
    pub sensor_radius: Option<f64>,
    /// Also run the other planner on every belief graph. Execution follows
    /// `planner`.
    pub paired: bool,
    pub heuristic: Heuristic,
    /// Record wall-clock planning time; off keeps output byte-stable.
    pub timing: bool,
}

impl Default for EpisodeParams {
    fn default() -> Self {
        EpisodeParams {
            planner: Planner::Coa,
            step_cap: DEFAULT_STEP_CAP,
            order_mode: OrderMode::default(),
            forbidden_classes: [ClassId::INFEASIBLE].into_iter().collect(),
            sensor_radius: None,
            paired: false,
            heuristic: Heuristic::Metric,
            timing: false,
        }
    }
}

/// One planning instance.
#[derive(Clone, Debug)]
pub struct PlanRecord {
    /// Edges executed before this plan was made.
    pub step: usize,
    pub planner: Planner,
    pub status: PlanStatus,
    pub path: Vec<VertexId>,
    pub signature: PathSignature,
    pub path_len: f64,
    pub unc_ratio: f64,
    /// Edges of class 1, 2 and 3.
    pub counts: [usize; 3],
    pub pops: u64,
    pub evals: usize,
    pub runtime_ms: f64,
    /// Every vertex on the plan had been sensed.
    pub all_sensed: bool,
    /// The plan's first edge was found blocked at execution.
    pub blocked: bool,
}

impl PlanRecord {
    /// Member of the uncertainty scatter: a found plan that is not fully
    /// known.
    pub fn in_scatter(&self) -> bool {
        self.status == PlanStatus::Found && !(self.unc_ratio == 0.0 && self.all_sensed)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EpisodeMeta {
    pub world: String,
    pub world_kind: WorldKind,
    pub spec_hash: String,
    pub seed: u64,
    pub sensor_radius: f64,
    pub params: EpisodeParams,
    pub grid_connectivity: Option<u8>,
    pub arm_metric: Option<String>,
    pub arm_sensor: Option<&'static str>,
    pub raster_resolution: f64,
    pub outcome: Outcome,
    pub moves: usize,
    pub plans: usize,
    pub blocked_events: usize,
    pub dominance_violations: usize,
}

#[derive(Clone, Debug)]
pub struct EpisodeLog {
    pub world: String,
    pub seed: u64,
    pub radius: f64,
    pub records: Vec<PlanRecord>,
    pub outcome: Outcome,
    pub trajectory: Vec<VertexId>,
    pub meta: EpisodeMeta,
}

/// State handed to an episode observer after each planning instance.
pub struct Snapshot<'a> {
    pub plan_index: usize,
    pub step: usize,
    pub world: &'a World,
    pub belief: &'a Belief,
    pub graph: &'a ColoredGraph,
    pub result: &'a PlanResult,
    pub trajectory: &'a [VertexId],
}

/// Length share of class-2 edges along `path`; 0 for an empty path.
pub fn uncertainty_ratio(path: &[VertexId], graph: &ColoredGraph) -> Result<f64> {
    let (mut unknown, mut total) = (0.0, 0.0);
    for pair in path.windows(2) {
        let e = graph
            .find_edge(pair[0], pair[1])
            .ok_or(Error::NotAdjacent(pair[0], pair[1]))?;
        let eval = graph.evaluate_edge(e)?;
        total += eval.weight;
        if eval.class == ClassId::UNKNOWN {
            unknown += eval.weight;
        }
    }
    Ok(if total > 0.0 { unknown / total } else { 0.0 })
}

fn class_counts(path: &[VertexId], graph: &ColoredGraph) -> Result<[usize; 3]> {
    let mut counts = [0; 3];
    for pair in path.windows(2) {
        let e = graph
            .find_edge(pair[0], pair[1])
            .ok_or(Error::NotAdjacent(pair[0], pair[1]))?;
        let c = graph.evaluate_edge(e)?.class.index();
        if c < 3 {
            counts[c] += 1;
        }
    }
    Ok(counts)
}

fn plan_with(
    planner: Planner,
    graph: &ColoredGraph,
    from: VertexId,
    goal: VertexId,
    params: &EpisodeParams,
) -> Result<PlanResult> {
    match planner {
        Planner::Coa => coa_star(
            graph,
            from,
            goal,
            &SearchOptions {
                order_mode: params.order_mode,
                forbidden_classes: params.forbidden_classes,
                heuristic: params.heuristic,
                ..Default::default()
            },
        ),
        Planner::AStar => astar(
            graph,
            from,
            goal,
            &AStarOptions {
                blocked_classes: params.forbidden_classes,
                heuristic: params.heuristic,
                accumulation: params.order_mode.accumulation,
                ..Default::default()
            },
        ),
    }
}

fn record(
    planner: Planner,
    step: usize,
    result: &PlanResult,
    graph: &ColoredGraph,
    belief: &Belief,
    timing: bool,
) -> Result<PlanRecord> {
    let found = result.status == PlanStatus::Found;
    Ok(PlanRecord {
        step,
        planner,
        status: result.status,
        path: result.path.clone(),
        signature: result.signature.clone(),
        path_len: if found { result.signature.length } else { 0.0 },
        unc_ratio: uncertainty_ratio(&result.path, graph)?,
        counts: class_counts(&result.path, graph)?,
        pops: result.stats.pops,
        evals: result.stats.evaluations,
        runtime_ms: if timing {
            result.stats.runtime.as_secs_f64() * 1e3
        } else {
            0.0
        },
        all_sensed: result.path.iter().all(|&v| belief.is_sensed(v)),
        blocked: false,
    })
}

pub fn run_episode(
    world: &Arc<World>,
    spec: &WorldSpec,
    label: &str,
    seed: u64,
    params: &EpisodeParams,
) -> Result<EpisodeLog> {
    run_episode_observed(world, spec, label, seed, params, |_| {})
}

/// As [`run_episode`], calling `observe` after every planning instance of
/// the driving planner.
pub fn run_episode_observed(
    world: &Arc<World>,
    spec: &WorldSpec,
    label: &str,
    seed: u64,
    params: &EpisodeParams,
    mut observe: impl FnMut(&Snapshot<'_>),
) -> Result<EpisodeLog> {
    if params.step_cap == 0 {
        return Err(Error::World("step cap must be positive".into()));
    }
    let radius = params.sensor_radius.unwrap_or(spec.sensor_radius);
    let goal = world.goal();
    let other = match params.planner {
        Planner::Coa => Planner::AStar,
        Planner::AStar => Planner::Coa,
    };
    let mut belief = world.initial_belief(radius);
    let mut at = world.start();
    let mut trajectory = vec![at];
    let mut records = Vec::new();
    let mut plan: Option<Vec<VertexId>> = None;
    let mut changed = world.sense(&mut belief, at);
    let mut blocked_events = 0;
    let mut violations = 0;
    let mut plans = 0;
    let mut driver_row = 0;

    let outcome = loop {
        if at == goal {
            break Outcome::ReachedGoal;
        }
        if trajectory.len() > params.step_cap {
            break Outcome::StepCapExceeded;
        }
        let moves = trajectory.len() - 1;
        if changed || plan.is_none() {
            let graph = world.belief_graph(&belief);
            let began = Instant::now();
            let result = plan_with(params.planner, &graph, at, goal, params)?;
            let mut row = record(params.planner, moves, &result, &graph, &belief, params.timing)?;
            if params.timing {
                row.runtime_ms = began.elapsed().as_secs_f64() * 1e3;
            }
            observe(&Snapshot {
                plan_index: plans,
                step: moves,
                world,
                belief: &belief,
                graph: &graph,
                result: &result,
                trajectory: &trajectory,
            });
            plans += 1;
            driver_row = records.len();
            records.push(row);
            if params.paired {
                let twin = graph.fresh_copy();
                let other_result = plan_with(other, &twin, at, goal, params)?;
                if result.found() && other_result.found() {
                    let (coa, astar) = match params.planner {
                        Planner::Coa => (&result, &other_result),
                        Planner::AStar => (&other_result, &result),
                    };
                    if coa
                        .signature
                        .theta
                        .compare(&astar.signature.theta, params.order_mode.comparison)
                        == std::cmp::Ordering::Greater
                    {
                        violations += 1;
                        log::warn!(
                            "step {moves}: coa {} worse than astar {}",
                            coa.signature.theta,
                            astar.signature.theta
                        );
                    }
                }
                records.push(record(other, moves, &other_result, &twin, &belief, params.timing)?);
            }
            if !result.found() {
                break Outcome::NoPath;
            }
            plan = Some(result.path[1..].to_vec());
            changed = false;
        }
        let next = plan
            .as_ref()
            .and_then(|p| p.first().copied())
            .expect("non-empty plan away from goal");
        let edge = world
            .topology()
            .find_edge(at, next)
            .ok_or(Error::NotAdjacent(at, next))?;
        if !world.ground_truth_feasible(edge) {
            log::debug!("edge {at}-{next} blocked at execution");
            belief.mark_blocked(edge);
            records[driver_row].blocked = true;
            blocked_events += 1;
            plan = None;
            continue;
        }
        at = next;
        trajectory.push(at);
        if let Some(p) = plan.as_mut() {
            p.remove(0);
        }
        changed = world.sense(&mut belief, at);
    };

    let meta = EpisodeMeta {
        world: label.to_string(),
        world_kind: world.kind(),
        spec_hash: spec.source_hash.clone(),
        seed,
        sensor_radius: radius,
        params: params.clone(),
        grid_connectivity: matches!(**world, World::Grid(_)).then_some(8),
        arm_metric: match &**world {
            World::Arm(a) => Some(format!("{:?}", a.metric).to_lowercase()),
            World::Grid(_) => None,
        },
        arm_sensor: matches!(**world, World::Arm(_)).then_some("links and end effector"),
        raster_resolution: world.raster().resolution,
        outcome,
        moves: trajectory.len() - 1,
        plans,
        blocked_events,
        dominance_violations: violations,
    };
    Ok(EpisodeLog {
        world: label.to_string(),
        seed,
        radius,
        records,
        outcome,
        trajectory,
        meta,
    })
}

fn csv_row(out: &mut String, world: &str, seed: u64, radius: f64, r: &PlanRecord, outcome: &str) {
    let _ = writeln!(
        out,
        "{world},{seed},{radius},{},{},{:.6},{:.6},{},{},{},{},{},{:.3},{outcome}",
        r.planner,
        r.step,
        r.path_len,
        r.unc_ratio,
        r.counts[0],
        r.counts[1],
        r.counts[2],
        r.pops,
        r.evals,
        r.runtime_ms
    );
}

impl EpisodeLog {
    /// Rows without the header.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        let outcome = self.outcome.to_string();
        for r in &self.records {
            let o = if r.blocked { "Blocked" } else { outcome.as_str() };
            csv_row(&mut out, &self.world, self.seed, self.radius, r, o);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{CSV_HEADER}\n{}", self.csv_rows())
    }

    pub fn scatter(&self) -> impl Iterator<Item = &PlanRecord> {
        self.records.iter().filter(|r| r.in_scatter())
    }

    pub fn mean_ratio(&self, planner: Planner) -> Option<f64> {
        let v: Vec<f64> = self
            .scatter()
            .filter(|r| r.planner == planner)
            .map(|r| r.unc_ratio)
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// `world <path>`, `seeds ...`, `radii ...`, `planners coa astar`,
/// `steps <cap>`, `mode paired|independent`, `timing on|off`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub worlds: Vec<String>,
    pub seeds: Vec<u64>,
    pub radii: Vec<f64>,
    pub planners: Vec<Planner>,
    pub step_cap: usize,
    pub paired: bool,
    pub timing: bool,
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut m = Matrix {
        worlds: Vec::new(),
        seeds: Vec::new(),
        radii: Vec::new(),
        planners: vec![Planner::Coa, Planner::AStar],
        step_cap: DEFAULT_STEP_CAP,
        paired: false,
        timing: false,
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let bad = |t: &str| Error::parse(line, format!("invalid value '{t}'"));
        match toks.next().unwrap() {
            "world" => m.worlds.push(
                toks.next()
                    .ok_or_else(|| Error::parse(line, "missing world path"))?
                    .to_string(),
            ),
            "seeds" => m.seeds = toks.map(|t| t.parse().map_err(|_| bad(t))).collect::<Result<_>>()?,
            "radii" => m.radii = toks.map(|t| t.parse().map_err(|_| bad(t))).collect::<Result<_>>()?,
            "planners" => m.planners = toks.map(|t| t.parse().map_err(|_| bad(t))).collect::<Result<_>>()?,
            "steps" => {
                let t = toks.next().unwrap_or("");
                m.step_cap = t.parse().map_err(|_| bad(t))?;
            }
            "mode" => {
                m.paired = match toks.next() {
                    Some("paired") => true,
                    Some("independent") => false,
                    other => return Err(Error::parse(line, format!("unknown mode {other:?}"))),
                }
            }
            "timing" => m.timing = toks.next() == Some("on"),
            other => return Err(Error::parse(line, format!("unknown directive '{other}'"))),
        }
    }
    if m.worlds.is_empty() || m.seeds.is_empty() || m.radii.is_empty() || m.planners.is_empty() {
        return Err(Error::Matrix("matrix needs world, seeds, radii and planners".into()));
    }
    if m.step_cap == 0 {
        return Err(Error::Matrix("step cap must be positive".into()));
    }
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct BatchJob {
    pub world: usize,
    pub seed: u64,
    pub radius: f64,
    pub planner: Planner,
}

#[derive(Debug)]
pub struct BatchResult {
    pub labels: Vec<String>,
    pub jobs: Vec<BatchJob>,
    pub episodes: Vec<std::result::Result<EpisodeLog, String>>,
}

/// Runs every (world, seed, radius, planner) episode in parallel. Paired
/// matrices run one COA*-driven episode per (world, seed, radius) that plans
/// with both planners. Output order follows the matrix order.
pub fn run_batch(worlds: &[(String, WorldSpec)], matrix: &Matrix, base: &EpisodeParams) -> BatchResult {
    let planners = if matrix.paired {
        vec![Planner::Coa]
    } else {
        matrix.planners.clone()
    };
    let mut jobs = Vec::new();
    for w in 0..worlds.len() {
        for &seed in &matrix.seeds {
            for &radius in &matrix.radii {
                for &planner in &planners {
                    jobs.push(BatchJob {
                        world: w,
                        seed,
                        radius,
                        planner,
                    });
                }
            }
        }
    }
    let episodes = jobs
        .par_iter()
        .map(|job| {
            let (label, spec) = &worlds[job.world];
            let world = Arc::new(World::build(spec, Some(job.seed)).map_err(|e| e.to_string())?);
            let params = EpisodeParams {
                planner: job.planner,
                step_cap: matrix.step_cap,
                sensor_radius: Some(job.radius),
                paired: matrix.paired,
                timing: matrix.timing,
                ..base.clone()
            };
            run_episode(&world, spec, label, job.seed, &params).map_err(|e| e.to_string())
        })
        .collect();
    BatchResult {
        labels: worlds.iter().map(|(l, _)| l.clone()).collect(),
        jobs,
        episodes,
    }
}

fn stats(values: &[f64]) -> (f64, f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    };
    (mean, median, var.sqrt())
}

impl BatchResult {
    pub fn raw_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for (job, ep) in self.jobs.iter().zip(&self.episodes) {
            match ep {
                Ok(log) => out.push_str(&log.csv_rows()),
                Err(e) => {
                    log::warn!("episode {}/{}/{}: {e}", self.labels[job.world], job.seed, job.radius);
                    let _ = writeln!(
                        out,
                        "{},{},{},{},0,0.000000,0.000000,0,0,0,0,0,0.000,Error",
                        self.labels[job.world], job.seed, job.radius, job.planner
                    );
                }
            }
        }
        out
    }

    /// Scatter rows grouped by world and planner.
    pub fn scatter(&self, world: &str, planner: Planner) -> Vec<&PlanRecord> {
        self.episodes
            .iter()
            .flatten()
            .filter(|l| l.world == world)
            .flat_map(|l| l.scatter())
            .filter(|r| r.planner == planner)
            .collect()
    }

    pub fn summary_csv(&self) -> String {
        let mut out = format!("{SUMMARY_HEADER}\n");
        let mut planners: Vec<Planner> = self
            .episodes
            .iter()
            .flatten()
            .flat_map(|l| l.records.iter().map(|r| r.planner))
            .collect();
        planners.sort();
        planners.dedup();
        for label in &self.labels {
            for &p in &planners {
                let rows = self.scatter(label, p);
                let ratios: Vec<f64> = rows.iter().map(|r| r.unc_ratio).collect();
                let lens: Vec<f64> = rows.iter().map(|r| r.path_len).collect();
                let (um, umed, us) = stats(&ratios);
                let (lm, lmed, ls) = stats(&lens);
                let _ = writeln!(
                    out,
                    "{label},{p},{},{um:.6},{umed:.6},{us:.6},{lm:.6},{lmed:.6},{ls:.6}",
                    rows.len()
                );
            }
        }
        out
    }

    pub fn all_failed(&self) -> bool {
        self.episodes.iter().all(|e| e.is_err())
    }
}
