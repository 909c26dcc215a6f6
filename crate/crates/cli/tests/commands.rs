use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn coa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn plan_reports_the_class_optimal_diamond_path() {
    let diamond = fixture("diamond.graph");
    let o = coa(&["plan", "--graph", p(&diamond)]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("theta=[2,0,0] len=11.000"), "{out}");
    assert!(out.contains("path=0 1 3"));

    let forbid = coa(&["plan", "--graph", p(&diamond), "--forbid", "2"]);
    assert_eq!(code(&forbid), 0);
    assert!(stdout(&forbid).contains("path=0 1 3"));

    let astar = coa(&["plan", "--graph", p(&diamond), "--planner", "astar"]);
    assert!(stdout(&astar).contains("theta=[1,1,0] len=2.000"));
}

#[test]
fn plan_exit_codes() {
    assert_eq!(code(&coa(&["plan", "--graph", "/nonexistent/graph"])), 1);
    assert_eq!(code(&coa(&["plan", "--graph", p(&fixture("split.graph"))])), 2);
    assert_eq!(
        code(&coa(&["plan", "--graph", p(&fixture("diamond.graph")), "--goal", "9"])),
        1
    );
    assert_eq!(code(&coa(&["plan", "--graph", p(&fixture("grid20.world"))])), 1);
}

#[test]
fn sim_on_a_known_world_plans_once() {
    let o = coa(&["sim", "--world", p(&fixture("known.world"))]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(
        rows[0],
        "world,seed,radius,planner,step,path_len,unc_ratio,n1,n2,n3,pops,evals,runtime_ms,outcome"
    );
    assert_eq!(rows.len(), 2);
    let fields: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(fields[6], "0.000000");
    assert_eq!(fields[13], "ReachedGoal");
}

#[test]
fn sim_is_repeatable_and_writes_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let world = fixture("grid20.world");
    let mut csvs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let csv = dir.path().join(name);
        let o = coa(&["sim", "--world", p(&world), "--seed", "4", "--csv", p(&csv)]);
        assert_eq!(code(&o), 0);
        csvs.push(std::fs::read_to_string(&csv).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert!(csvs[0].lines().last().unwrap().ends_with("ReachedGoal"));
    let meta = std::fs::read_to_string(dir.path().join("a.csv.meta.json")).unwrap();
    let meta: serde_json::Value = serde_json::from_str(&meta).unwrap();
    assert_eq!(meta["outcome"], "ReachedGoal");
    assert_eq!(meta["grid_connectivity"], 8);
    assert_eq!(meta["spec_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn sim_sealed_goal_is_an_outcome_not_an_error() {
    let o = coa(&["sim", "--world", p(&fixture("sealed.world"))]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().last().unwrap().ends_with("NoPath"));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.world");
    std::fs::write(&bad, "world grid\nsize 3 3\nstart 0 0\ngoal 5 5\n").unwrap();
    assert_eq!(code(&coa(&["sim", "--world", p(&bad)])), 1);
}

#[test]
fn sim_writes_periodic_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let o = coa(&[
        "sim",
        "--world",
        p(&fixture("grid20.world")),
        "--csv",
        p(&csv),
        "--svg-every",
        "5",
    ]);
    assert_eq!(code(&o), 0);
    let first = dir.path().join("run_step00000.svg");
    let svg = std::fs::read_to_string(first).unwrap();
    assert!(svg.starts_with("<svg"));
    let count = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "svg"))
        .count();
    assert!(count >= 2);
}

#[test]
fn bench_writes_raw_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for run in ["one", "two"] {
        let out = dir.path().join(run);
        let o = coa(&["bench", "--matrix", p(&fixture("small.matrix")), "--out", p(&out)]);
        assert_eq!(code(&o), 0);
        let raw = std::fs::read_to_string(out.join("raw.csv")).unwrap();
        let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
        outputs.push((raw, summary));
    }
    assert_eq!(outputs[0], outputs[1]);
    let (raw, summary) = &outputs[0];
    assert!(raw.lines().any(|l| l.contains(",coa,")) && raw.lines().any(|l| l.contains(",astar,")));
    assert_eq!(summary.lines().count(), 3);
    assert!(summary.starts_with("world,planner,plans,"));
}

#[test]
fn bench_fails_only_when_every_episode_fails() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("w.world"),
        "world grid\nsize 4 4\nblock 0 0 4 4\nstart 0 0\ngoal 3 3\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("m.matrix"),
        "world w.world\nseeds 1\nradii 1\nplanners coa\n",
    )
    .unwrap();
    let o = coa(&[
        "bench",
        "--matrix",
        p(&dir.path().join("m.matrix")),
        "--out",
        p(&dir.path().join("out")),
    ]);
    assert_eq!(code(&o), 1);
    let raw = std::fs::read_to_string(dir.path().join("out/raw.csv")).unwrap();
    assert!(raw.lines().nth(1).unwrap().ends_with("Error"));
}

#[test]
fn oracle_check_and_cap() {
    let o = coa(&["oracle", "--graph", p(&fixture("diamond.graph")), "--check"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("paths=2"));
    assert!(out.contains("check=ok"));

    let o = coa(&["oracle", "--graph", p(&fixture("split.graph")), "--check"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("oracle: NO PATH") && out.contains("coa: NO PATH"));

    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.graph");
    let n = 30;
    let mut text = String::from("classes 1 3\n");
    for y in 0..n {
        for x in 0..n {
            let _ = writeln!(text, "vertex {} 1 {x} {y}", y * n + x);
        }
    }
    for y in 0..n {
        for x in 0..n {
            let v = y * n + x;
            if x + 1 < n {
                let _ = writeln!(text, "edge {v} {} w=1 c=1", v + 1);
            }
            if y + 1 < n {
                let _ = writeln!(text, "edge {v} {} w=1 c=1", v + n);
            }
        }
    }
    let _ = writeln!(text, "start 0\ngoal {}", n * n - 1);
    std::fs::write(&grid, text).unwrap();
    assert_eq!(code(&coa(&["oracle", "--graph", p(&grid)])), 3);
}

#[test]
fn render_replays_the_episode() {
    let dir = tempfile::tempdir().unwrap();
    let world = fixture("grid20.world");
    let csv = dir.path().join("ep.csv");
    assert_eq!(code(&coa(&["sim", "--world", p(&world), "--csv", p(&csv)])), 0);
    let first = dir.path().join("first.svg");
    let again = dir.path().join("again.svg");
    for out in [&first, &again] {
        let o = coa(&[
            "render",
            "--world",
            p(&world),
            "--episode",
            p(&csv),
            "--step",
            "0",
            "--out",
            p(out),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let svg = std::fs::read_to_string(&first).unwrap();
    assert_eq!(svg, std::fs::read_to_string(&again).unwrap());
    assert!(svg.contains("#c8c8c8"));
    let o = coa(&[
        "render",
        "--world",
        p(&world),
        "--episode",
        p(&csv),
        "--step",
        "100000",
        "--out",
        p(&first),
    ]);
    assert_eq!(code(&o), 1);

    let known = fixture("known.world");
    let csv = dir.path().join("known.csv");
    assert_eq!(code(&coa(&["sim", "--world", p(&known), "--csv", p(&csv)])), 0);
    let out = dir.path().join("known.svg");
    let o = coa(&[
        "render",
        "--world",
        p(&known),
        "--episode",
        p(&csv),
        "--step",
        "7",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(!svg.contains("stroke-dasharray"));
    assert!(!svg.contains("#c8c8c8"));

    let o = coa(&[
        "render",
        "--world",
        p(&world),
        "--episode",
        p(&csv),
        "--step",
        "0",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&o), 1);
}
