use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_distapprox");

fn distapprox(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn missing_epsilon_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = distapprox(&["run", "--alg", "mwvc-bipartite", "--gen", "path:4", "--out", path(dir.path())]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--eps"));
}

#[test]
fn unknown_flag_and_algorithm_are_usage_errors() {
    assert_eq!(code(&distapprox(&["run", "--colour", "red"])), 1);
    assert_eq!(code(&distapprox(&["run", "--alg", "mst", "--gen", "path:3", "--eps", "0.5"])), 1);
    assert_eq!(code(&distapprox(&["--help"])), 0);
}

#[test]
fn same_config_and_seed_give_identical_results() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = distapprox(&[
            "run", "--alg", "mwm-rand", "--gen", "random_general:10,0.4", "--eps", "0.25", "--trials", "6",
            "--seed", "3", "--oracle", "--no-timing", "--out", path(&out_dir),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        (fs::read(out_dir.join("results.csv")).unwrap(), fs::read(out_dir.join("traces/trial-0005.csv")).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn config_file_with_sections_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(
        &cfg,
        "# shared\ngen = cycle:6\nno_timing = true\ntrials = 2\n\n[mwvc-general]\neps = 0.5\nprovider = greedy\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = distapprox(&["run", "--config", path(&cfg), "--alg", "mwvc-general", "--trials", "3", "--out", path(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("results.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.contains(",mwvc-general,0.5,") && r.ends_with(',')));
}

#[test]
fn results_header_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let out = distapprox(&["run", "--alg", "fractional-only", "--gen", "path:5", "--eps", "0.5", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "graph_id,n,m,max_degree,max_weight,algorithm,epsilon,delta,seed,solution_weight,oracle_weight,ratio,\
         rounds_measured,rounds_cited,max_message_bits,density,wall_ms"
    );
}

#[test]
fn zero_bit_budget_is_a_violation() {
    let dir = tempfile::tempdir().unwrap();
    let out = distapprox(&[
        "run", "--alg", "mwvc-bipartite", "--gen", "random_bipartite:6,6,0.5", "--eps", "0.5", "--bit-budget", "0",
        "--out", path(dir.path()),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget is 0"));
}

#[test]
fn emitted_solutions_verify() {
    let dir = tempfile::tempdir().unwrap();
    for (alg, spec) in [
        ("mwvc-bipartite", "random_bipartite:5,5,0.5"),
        ("mwvc-general", "random_general:9,0.4"),
        ("mwm-det", "random_general:8,0.4"),
        ("cluster-only", "random_tree:30"),
        ("fractional-only", "random_general:9,0.4"),
    ] {
        let out_dir = dir.path().join(alg);
        let out = distapprox(&["run", "--alg", alg, "--gen", spec, "--eps", "0.5", "--trials", "2", "--out", path(&out_dir)]);
        assert_eq!(code(&out), 0, "{alg}: {}", String::from_utf8_lossy(&out.stderr));
        for t in 0..2 {
            let check = distapprox(&[
                "verify",
                "--graph",
                path(&out_dir.join(format!("graphs/trial-{t:04}.graph"))),
                "--solution",
                path(&out_dir.join(format!("solutions/trial-{t:04}.txt"))),
            ]);
            assert_eq!(code(&check), 0, "{alg}: {}", stdout(&check));
            assert!(!stdout(&check).contains("FAIL"));
        }
    }
}

#[test]
fn verify_names_uncovered_edge_and_shared_node() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.graph");
    fs::write(&graph, "graph 3 both 5\nv 0 1\nv 1 1\nv 2 1\ne 0 1 2\ne 1 2 3\n").unwrap();
    let sol = dir.path().join("s.txt");

    fs::write(&sol, "cover\n1\n").unwrap();
    let out = distapprox(&["verify", "--graph", path(&graph), "--solution", path(&sol)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("PASS covers-every-edge"));

    fs::write(&sol, "cover\n0\n").unwrap();
    let out = distapprox(&["verify", "--graph", path(&graph), "--solution", path(&sol)]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("FAIL covers-every-edge: edge 1 (1, 2) is uncovered"));

    fs::write(&sol, "matching\n0 1\n2 1\n").unwrap();
    let out = distapprox(&["verify", "--graph", path(&graph), "--solution", path(&sol)]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("FAIL endpoints-disjoint: node 1 is shared"));
}

#[test]
fn loaded_graph_without_required_weights_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.graph");
    fs::write(&graph, "graph 2 node 3\nv 0 1\nv 1 2\ne 0 1\n").unwrap();
    let out = distapprox(&["run", "--alg", "mwm-det", "--graph", path(&graph), "--eps", "0.5", "--out", path(dir.path())]);
    assert_eq!(code(&out), 1);
}

#[test]
fn generate_writes_parseable_graph() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.graph");
    let out = distapprox(&["generate", "--gen", "cycle:5", "--mode", "edge", "--seed", "1", "--out", path(&graph)]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&graph).unwrap();
    assert!(text.starts_with("graph 5 edge"));
}
