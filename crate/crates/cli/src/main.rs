use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use coa_core::graph_file::load_problem;
use coa_core::oracle::{oracle_optimal, ranked_csv, OracleOptions};
use coa_core::render::{render_svg, Scene};
use coa_core::sim::{parse_matrix, run_batch, run_episode_observed, EpisodeLog, EpisodeParams, Planner, CSV_HEADER};
use coa_core::worlds::{parse_world_spec, World, WorldSpec};
use coa_core::{
    astar, coa_star, AStarOptions, Accumulation, ClassId, ClassSet, Comparison, Heuristic, OrderMode, PlanResult,
    PlanStatus, SearchOptions, VertexId,
};

const EXIT_ERROR: u8 = 1;
const EXIT_NO_PATH: u8 = 2;
const EXIT_ORACLE_CAP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "coa",
    version,
    about = "Class-ordered A* planning on weighted colored graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one query on a graph file.
    Plan(PlanArgs),
    /// Run one sense-plan-act episode in a world.
    Sim(SimArgs),
    /// Run a batch of episodes described by a matrix file.
    Bench(BenchArgs),
    /// Enumerate all simple paths and rank them.
    Oracle(OracleArgs),
    /// Draw one planning instance of a recorded episode.
    Render(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    /// Worst class first, then its amount.
    #[value(name = "paper", alias = "worst")]
    WorstClass,
    Revlex,
}

#[derive(Clone, Copy, ValueEnum)]
enum AccumArg {
    Count,
    Length,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Metric,
    Zero,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlannerArg {
    Coa,
    Astar,
}

impl From<PlannerArg> for Planner {
    fn from(p: PlannerArg) -> Self {
        match p {
            PlannerArg::Coa => Planner::Coa,
            PlannerArg::Astar => Planner::AStar,
        }
    }
}

#[derive(Args, Clone)]
struct OrderFlags {
    #[arg(long, value_enum, default_value = "paper")]
    order: OrderArg,
    #[arg(long, value_enum, default_value = "count")]
    accum: AccumArg,
}

impl OrderFlags {
    fn mode(&self) -> OrderMode {
        OrderMode::new(
            match self.order {
                OrderArg::WorstClass => Comparison::WorstClass,
                OrderArg::Revlex => Comparison::ReverseLex,
            },
            match self.accum {
                AccumArg::Count => Accumulation::Count,
                AccumArg::Length => Accumulation::Length,
            },
        )
    }
}

#[derive(Args)]
struct QueryFlags {
    #[arg(long)]
    graph: PathBuf,
    /// Defaults to the graph file's `start` line.
    #[arg(long)]
    start: Option<u32>,
    /// Defaults to the graph file's `goal` line.
    #[arg(long)]
    goal: Option<u32>,
    #[command(flatten)]
    order: OrderFlags,
    /// Never use edges of this class. Repeatable.
    #[arg(long = "forbid")]
    forbid: Vec<usize>,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    query: QueryFlags,
    #[arg(long, value_enum, default_value = "coa")]
    planner: PlannerArg,
    #[arg(long, value_enum, default_value = "metric")]
    heuristic: HeuristicArg,
}

#[derive(Args, Clone)]
struct EpisodeFlags {
    #[arg(long)]
    world: PathBuf,
    #[arg(long, value_enum, default_value = "coa")]
    planner: PlannerArg,
    /// Overrides the world's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the world's sensor radius.
    #[arg(long)]
    radius: Option<f64>,
    /// Also plan with the other planner on every belief.
    #[arg(long)]
    paired: bool,
    #[arg(long, default_value_t = coa_core::sim::DEFAULT_STEP_CAP)]
    steps: usize,
    #[command(flatten)]
    order: OrderFlags,
    #[arg(long, value_enum, default_value = "metric")]
    heuristic: HeuristicArg,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    episode: EpisodeFlags,
    /// Write the CSV here (plus `<csv>.meta.json`) instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write an SVG snapshot at every plan made on a step divisible by K.
    #[arg(long, value_name = "K")]
    svg_every: Option<usize>,
    /// Record wall-clock planning time.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    query: QueryFlags,
    /// Also run the planner and fail on disagreement.
    #[arg(long)]
    check: bool,
    #[arg(long, default_value_t = coa_core::oracle::DEFAULT_MAX_PATHS)]
    max_paths: usize,
    /// Ranked paths to print.
    #[arg(long, default_value_t = 10)]
    top: usize,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    episode_flags: RenderEpisodeFlags,
    /// Episode CSV written by `coa sim`.
    #[arg(long)]
    episode: PathBuf,
    /// Executed edges before the drawn plan.
    #[arg(long)]
    step: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RenderEpisodeFlags {
    #[arg(long)]
    world: PathBuf,
    #[arg(long, default_value_t = coa_core::sim::DEFAULT_STEP_CAP)]
    steps: usize,
    #[command(flatten)]
    order: OrderFlags,
    #[arg(long, value_enum, default_value = "metric")]
    heuristic: HeuristicArg,
}

fn heuristic(h: HeuristicArg) -> Heuristic {
    match h {
        HeuristicArg::Metric => Heuristic::Metric,
        HeuristicArg::Zero => Heuristic::Zero,
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn class_set(classes: &[usize]) -> anyhow::Result<ClassSet> {
    classes
        .iter()
        .map(|&c| ClassId::new(c).with_context(|| format!("class {c} out of range")))
        .collect()
}

struct Query {
    graph: coa_core::ColoredGraph,
    start: VertexId,
    goal: VertexId,
    forbidden: ClassSet,
}

fn load_query(q: &QueryFlags) -> anyhow::Result<Query> {
    let problem = load_problem(&read(&q.graph)?).with_context(|| format!("parsing {}", q.graph.display()))?;
    let start = q
        .start
        .map(VertexId)
        .or(problem.start)
        .context("no start vertex given")?;
    let goal = q.goal.map(VertexId).or(problem.goal).context("no goal vertex given")?;
    problem.graph.check_vertex(start)?;
    problem.graph.check_vertex(goal)?;
    Ok(Query {
        graph: problem.graph,
        start,
        goal,
        forbidden: class_set(&q.forbid)?,
    })
}

fn path_text(path: &[VertexId]) -> String {
    path.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn report(r: &PlanResult) {
    println!("status={:?}", r.status);
    if r.found() {
        println!("path={}", path_text(&r.path));
        println!(
            "theta={} len={:.3} hops={}",
            r.signature.theta, r.signature.length, r.signature.hops
        );
    }
    println!(
        "pops={} evals={} enqueues={}",
        r.stats.pops, r.stats.evaluations, r.stats.enqueues
    );
}

fn plan(args: PlanArgs) -> anyhow::Result<u8> {
    let q = load_query(&args.query)?;
    let mode = args.query.order.mode();
    let result = match args.planner {
        PlannerArg::Coa => coa_star(
            &q.graph,
            q.start,
            q.goal,
            &SearchOptions {
                forbidden_classes: q.forbidden,
                heuristic: heuristic(args.heuristic),
                ..SearchOptions::with_mode(mode)
            },
        )?,
        PlannerArg::Astar => {
            let mut opts = AStarOptions {
                heuristic: heuristic(args.heuristic),
                accumulation: mode.accumulation,
                ..Default::default()
            };
            if !args.query.forbid.is_empty() {
                opts.blocked_classes = q.forbidden;
            }
            astar(&q.graph, q.start, q.goal, &opts)?
        }
    };
    report(&result);
    Ok(match result.status {
        PlanStatus::Found => 0,
        PlanStatus::NoPath => EXIT_NO_PATH,
        PlanStatus::Aborted => EXIT_ERROR,
    })
}

fn load_world(path: &Path, seed: Option<u64>) -> anyhow::Result<(Arc<World>, WorldSpec)> {
    let spec = parse_world_spec(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let world = World::build(&spec, seed).with_context(|| format!("building {}", path.display()))?;
    Ok((Arc::new(world), spec))
}

fn label(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "world".into(), |s| s.to_string_lossy().into_owned())
}

fn sim(args: SimArgs) -> anyhow::Result<u8> {
    let e = &args.episode;
    let (world, spec) = load_world(&e.world, e.seed)?;
    let seed = e.seed.unwrap_or(spec.seed);
    let params = EpisodeParams {
        planner: e.planner.into(),
        step_cap: e.steps,
        order_mode: e.order.mode(),
        sensor_radius: e.radius,
        paired: e.paired,
        heuristic: heuristic(e.heuristic),
        timing: args.timing,
        ..Default::default()
    };
    let svg_prefix = match &args.csv {
        Some(csv) => csv.with_extension(""),
        None => PathBuf::from(format!("{}_episode", label(&e.world))),
    };
    let mut svg_error = None;
    let mut last_step = None;
    let log = run_episode_observed(&world, &spec, &label(&e.world), seed, &params, |snap| {
        let Some(k) = args.svg_every.filter(|&k| k > 0) else {
            return;
        };
        if snap.step % k != 0 || last_step == Some(snap.step) || svg_error.is_some() {
            return;
        }
        last_step = Some(snap.step);
        let path = PathBuf::from(format!("{}_step{:05}.svg", svg_prefix.display(), snap.step));
        let written = render_svg(&Scene::from(snap))
            .map_err(anyhow::Error::from)
            .and_then(|svg| fs::write(&path, svg).with_context(|| format!("writing {}", path.display())));
        if let Err(err) = written {
            svg_error = Some(err);
        }
    })?;
    if let Some(err) = svg_error {
        return Err(err);
    }
    log::info!(
        "{} after {} moves and {} plans",
        log.outcome,
        log.meta.moves,
        log.meta.plans
    );
    match &args.csv {
        Some(path) => {
            fs::write(path, log.to_csv()).with_context(|| format!("writing {}", path.display()))?;
            let meta = PathBuf::from(format!("{}.meta.json", path.display()));
            fs::write(&meta, serde_json::to_string_pretty(&log.meta)? + "\n")
                .with_context(|| format!("writing {}", meta.display()))?;
        }
        None => print!("{}", log.to_csv()),
    }
    Ok(0)
}

fn bench(args: BenchArgs) -> anyhow::Result<u8> {
    let matrix = parse_matrix(&read(&args.matrix)?).with_context(|| format!("parsing {}", args.matrix.display()))?;
    let base = args.matrix.parent().unwrap_or(Path::new("."));
    let mut worlds = Vec::new();
    for w in &matrix.worlds {
        let path = base.join(w);
        let spec = parse_world_spec(&read(&path)?).with_context(|| format!("parsing {}", path.display()))?;
        worlds.push((label(&path), spec));
    }
    let result = run_batch(&worlds, &matrix, &EpisodeParams::default());
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for (name, body) in [("raw.csv", result.raw_csv()), ("summary.csv", result.summary_csv())] {
        let path = args.out.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    let failed = result.episodes.iter().filter(|e| e.is_err()).count();
    log::info!("{} episodes, {failed} failed", result.episodes.len());
    Ok(if result.all_failed() { EXIT_ERROR } else { 0 })
}

fn oracle(args: OracleArgs) -> anyhow::Result<u8> {
    let q = load_query(&args.query)?;
    let mode = args.query.order.mode();
    let opts = OracleOptions {
        order_mode: mode,
        forbidden_classes: q.forbidden,
        max_paths: args.max_paths,
        keep_ranked: true,
        ..Default::default()
    };
    let found = match oracle_optimal(&q.graph.fresh_copy(), q.start, q.goal, &opts) {
        Ok(found) => found,
        Err(err @ coa_core::Error::EnumerationCap(_)) => {
            eprintln!("error: {err}");
            return Ok(EXIT_ORACLE_CAP);
        }
        Err(err) => return Err(err.into()),
    };
    println!("paths={}", found.paths);
    match &found.best {
        Some((path, sig)) => println!(
            "oracle: path={} theta={} len={:.3}",
            path_text(path),
            sig.theta,
            sig.length
        ),
        None => println!("oracle: NO PATH"),
    }
    let shown = found.ranked.len().min(args.top);
    print!("{}", ranked_csv(&found.ranked[..shown]));
    if !args.check {
        return Ok(0);
    }
    let r = coa_star(
        &q.graph,
        q.start,
        q.goal,
        &SearchOptions {
            forbidden_classes: q.forbidden,
            ..SearchOptions::with_mode(mode)
        },
    )?;
    if r.found() {
        println!(
            "coa: path={} theta={} len={:.3}",
            path_text(&r.path),
            r.signature.theta,
            r.signature.length
        );
    } else {
        println!("coa: NO PATH");
    }
    let agree = match &found.best {
        None => r.status == PlanStatus::NoPath,
        Some((_, sig)) => {
            r.found() && r.signature.theta == sig.theta && (r.signature.length - sig.length).abs() <= 1e-9
        }
    };
    if !agree {
        eprintln!("error: planner and oracle disagree");
        return Ok(EXIT_ERROR);
    }
    println!("check=ok");
    Ok(0)
}

/// Columns of an episode row other than the wall-clock time.
fn row_key(row: &str) -> Vec<&str> {
    row.split(',')
        .enumerate()
        .filter(|&(i, _)| i != 12)
        .map(|(_, f)| f)
        .collect()
}

fn render(args: RenderArgs) -> anyhow::Result<u8> {
    let text = read(&args.episode)?;
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        bail!("{} is not an episode CSV", args.episode.display());
    }
    let rows: Vec<&str> = lines.filter(|l| !l.is_empty()).collect();
    let first: Vec<&str> = rows.first().context("episode CSV has no rows")?.split(',').collect();
    let seed: u64 = first[1].parse().context("bad seed column")?;
    let radius: f64 = first[2].parse().context("bad radius column")?;
    let planner: Planner = first[3].parse()?;
    let paired = rows.get(1).is_some_and(|r| {
        let f: Vec<&str> = r.split(',').collect();
        f[3] != first[3] && f[4] == first[4]
    });
    let flags = &args.episode_flags;
    let (world, spec) = load_world(&flags.world, Some(seed))?;
    let params = EpisodeParams {
        planner,
        step_cap: flags.steps,
        order_mode: flags.order.mode(),
        sensor_radius: Some(radius),
        paired,
        heuristic: heuristic(flags.heuristic),
        ..Default::default()
    };
    let mut picture = None;
    let log: EpisodeLog = run_episode_observed(&world, &spec, first[0], seed, &params, |snap| {
        if snap.step <= args.step {
            picture = Some(render_svg(&Scene::from(snap)));
        }
    })?;
    let replayed = log.csv_rows();
    let matches =
        replayed.lines().count() == rows.len() && replayed.lines().zip(&rows).all(|(a, b)| row_key(a) == row_key(b));
    if !matches {
        bail!("episode log does not match a replay of {}", flags.world.display());
    }
    if args.step > log.meta.moves {
        bail!(
            "step {} out of range: the episode made {} moves",
            args.step,
            log.meta.moves
        );
    }
    let svg = picture.context("no plan was made at or before that step")??;
    fs::write(&args.out, svg).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("COA_LOG", "warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Plan(a) => plan(a),
        Command::Sim(a) => sim(a),
        Command::Bench(a) => bench(a),
        Command::Oracle(a) => oracle(a),
        Command::Render(a) => render(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
