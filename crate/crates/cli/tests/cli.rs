use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_coopmotion"));
    c.env_remove("COOPMOTION_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn coopmotion")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn evolve_writes_two_step_pmf() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pmf.csv");
    let o = run(&["evolve", "--m", "1", "--q", "0.5", "--init", "0:1", "--n", "2", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), "site,mass\n0,0.375\n1,0.5\n2,0.125\n");
}

#[test]
fn evolve_to_stdout_keeps_extended_atoms() {
    let o = run(&["evolve", "--m", "1", "--q", "0.5", "--init", "-inf:0.5,0:0.5", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "site,mass\n-inf,0.5\n0,0.375\n1,0.125\n");
}

#[test]
fn reference_beta_at_one() {
    let o = run(&["reference", "--m", "1", "--q", "0.5", "--kind", "beta", "--x", "1.0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0.5");
}

#[test]
fn reference_grid_is_csv() {
    let o = run(&["reference", "--m", "1", "--q", "0.5", "--kind", "u-ab", "--a", "0", "--b", "1", "--grid", "-1:3:5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x,value\n-1,0\n0,0\n1,0.5\n2,1\n3,1\n");
}

#[test]
fn reference_missing_kind_argument() {
    let o = run(&["reference", "--m", "1", "--q", "0.5", "--kind", "extended", "--x", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--a"));
}

#[test]
fn counterexample_for_long_jump() {
    let o = run(&["counterexample", "--step", "0:0.5,2:0.5", "--m", "1", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("violation at site 3"), "{s}");
    assert!(s.contains("dominant:") && s.contains("dominated:"));
}

#[test]
fn counterexample_none_for_unit_step() {
    let o = run(&["counterexample", "--step", "0:0.5,1:0.5", "--m", "1", "--trials", "200"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no violation"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["evolve", "--m", "1"]).status.code(), Some(2));
    let bad_q = run(&["evolve", "--m", "1", "--q", "2", "--init", "0:1", "--n", "1"]);
    assert_eq!(bad_q.status.code(), Some(2));
    assert!(!bad_q.stderr.is_empty());
    let bad_mass = run(&["evolve", "--m", "1", "--q", "0.5", "--init", "0:0.7", "--n", "1"]);
    assert_eq!(bad_mass.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("pmf.csv");
    let o = run(&["evolve", "--m", "1", "--q", "0.5", "--init", "0:1", "--n", "1", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("pmf.csv");
    fs::write(&cfg, format!("# two steps\nm = 1\nq = 0.9\ninit = 0:1\nn = 2\nout = {}\n", out.display())).unwrap();
    let o = run(&["evolve", "--config", path_str(&cfg), "--q", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&out).unwrap(), "site,mass\n0,0.375\n1,0.5\n2,0.125\n");
}

#[test]
fn config_unknown_key_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(run(&["evolve", "--config", path_str(&cfg)]).status.code(), Some(2));
}

#[test]
fn passing_experiment_writes_report_and_series() {
    let dir = tempfile::tempdir().unwrap();
    let (report, series) = (dir.path().join("r.json"), dir.path().join("s.csv"));
    let o = run(&[
        "sandwich", "--m", "2", "--q", "0.5", "--eps", "0.1", "--n", "200", "--init", "0:0.5,1:0.5",
        "--report", path_str(&report), "--series", path_str(&series),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict PASS"));
    let json = fs::read_to_string(&report).unwrap();
    assert!(json.contains("\"experiment\"") && json.contains("s.csv"));
    let csv = fs::read_to_string(&series).unwrap();
    assert!(csv.starts_with("n,sup_error\n"));
    assert_eq!(csv.lines().count(), 202);
}

#[test]
fn failing_verdict_exits_one() {
    let o = run(&["extended", "--m", "1", "--q", "0.5", "--a", "0.25", "--b", "0.75", "--n", "50"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("verdict FAIL"));
}

#[test]
fn converge_lipschitz_ramp() {
    let o = run(&["converge", "--mode", "lipschitz", "--m", "1", "--q", "0.5", "--n-list", "100,1000,10000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("fitted_rate"));
}

#[test]
fn converge_rejects_n_below_threshold() {
    let o = run(&["converge", "--mode", "lipschitz", "--m", "1", "--q", "0.5", "--n-list", "2,100"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("sim{threads}.csv"));
        let o = bin()
            .env("COOPMOTION_THREADS", threads)
            .args(["simulate", "--m", "1", "--q", "0.5", "--n", "20", "--trajectories", "5000", "--seed", "9"])
            .args(["--out", path_str(&out)])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("sup_cdf_distance_to_exact"));
        files.push(fs::read_to_string(&out).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn bad_thread_count_exits_two() {
    let o = bin().env("COOPMOTION_THREADS", "zero").args(["reference", "--m", "1", "--q", "0.5", "--kind", "beta", "--x", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
