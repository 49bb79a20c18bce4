//! End-to-end tests of the command-line contract.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_lanegraph")
}

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn lanegraph")
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

struct Workdir {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Workdir {
    fn new() -> Self {
        let dir = tempfile::tempdir().expect("tempdir");
        let root = dir.path().to_path_buf();
        Workdir { _dir: dir, root }
    }

    fn file(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }
}

#[test]
fn pipeline_and_exit_codes() {
    let w = Workdir::new();
    let graph = path_str(&w.file("g.json"));
    let paths = path_str(&w.file("p.json"));
    let rebuilt = path_str(&w.file("r.json"));
    let svg = path_str(&w.file("fig.svg"));

    let out = run(&["synth", "--seed", "11", "--out", &graph], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(&["g2p", "--graph", &graph, "--out", &paths], &[]);
    assert!(out.status.success());

    let out = run(&["p2g", "--paths", &paths, "--out", &rebuilt], &[]);
    assert!(out.status.success());

    let out = run(
        &["eval", "--pred", &rebuilt, "--gt", &graph, "--json"],
        &[],
    );
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).expect("json");
    assert!((report["f1"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(report["config"]["directed"], true);

    let out = run(
        &["eval", "--pred", &rebuilt, "--gt", &graph, "--undirected", "--junction", "--json"],
        &[],
    );
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).expect("json");
    assert_eq!(report["config"]["directed"], false);

    let out = run(&["render", "--graph", &graph, "--paths", &paths, "--out", &svg], &[]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(w.file("fig.svg")).expect("svg written");
    assert!(body.starts_with("<svg"));

    let out = run(&["roundtrip", "--graph", &graph, "--json"], &[]);
    assert!(out.status.success());

    // missing file: nonzero exit, message on stderr
    let out = run(&["g2p", "--graph", "/nonexistent.json", "--out", &paths], &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let w = Workdir::new();
    let a = path_str(&w.file("a.json"));
    let b = path_str(&w.file("b.json"));
    run(&["synth", "--seed", "99", "--out", &a], &[]);
    run(&["synth", "--seed", "99", "--out", &b], &[]);
    let fa = std::fs::read(w.file("a.json")).unwrap();
    let fb = std::fs::read(w.file("b.json")).unwrap();
    assert_eq!(fa, fb);

    let out1 = run(&["eval", "--pred", &a, "--gt", &b, "--json"], &[]);
    let out2 = run(&["eval", "--pred", &a, "--gt", &b, "--json"], &[]);
    assert_eq!(out1.stdout, out2.stdout);

    let s1 = path_str(&w.file("s1.svg"));
    let s2 = path_str(&w.file("s2.svg"));
    run(&["render", "--graph", &a, "--out", &s1], &[]);
    run(&["render", "--graph", &a, "--out", &s2], &[]);
    assert_eq!(
        std::fs::read(w.file("s1.svg")).unwrap(),
        std::fs::read(w.file("s2.svg")).unwrap()
    );
}

#[test]
fn eval_multi_frame_ordering_and_jobs() {
    let w = Workdir::new();
    let mut preds = Vec::new();
    let mut gts = Vec::new();
    for seed in 0..6u64 {
        let g = path_str(&w.file(&format!("g{seed}.json")));
        let p = path_str(&w.file(&format!("p{seed}.json")));
        let r = path_str(&w.file(&format!("r{seed}.json")));
        run(&["synth", "--seed", &seed.to_string(), "--out", &g], &[]);
        run(&["g2p", "--graph", &g, "--out", &p], &[]);
        run(&["p2g", "--paths", &p, "--out", &r], &[]);
        preds.push(r);
        gts.push(g);
    }

    let mut args: Vec<&str> = vec!["eval", "--json", "--jobs", "3"];
    for p in &preds {
        args.push("--pred");
        args.push(p);
    }
    for g in &gts {
        args.push("--gt");
        args.push(g);
    }
    let out = run(&args, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines: Vec<&str> = std::str::from_utf8(&out.stdout)
        .unwrap()
        .lines()
        .filter(|l| !l.is_empty())
        .collect();
    assert_eq!(lines.len(), 6);
    // NDJSON rows come back in input order regardless of completion order
    for (i, line) in lines.iter().enumerate() {
        let report: serde_json::Value = serde_json::from_str(line).expect("row json");
        assert_eq!(
            report["metadata"]["pred"].as_str().unwrap(),
            preds[i],
            "row {i} out of order"
        );
        assert!((report["f1"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }

    // the env var sets the worker-pool default
    let out = run(&args[..args.len()], &[("LANEGRAPH_JOBS", "1")]);
    assert!(out.status.success());

    let mut args_no_jobs: Vec<&str> = vec!["eval", "--json"];
    for p in &preds {
        args_no_jobs.push("--pred");
        args_no_jobs.push(p);
    }
    for g in &gts {
        args_no_jobs.push("--gt");
        args_no_jobs.push(g);
    }
    let env_out = run(&args_no_jobs, &[("LANEGRAPH_JOBS", "2")]);
    assert!(env_out.status.success());
    assert_eq!(out.stdout.len(), env_out.stdout.len());

    // mismatched frame counts fail
    let bad: Vec<&str> = vec!["eval", "--pred", &preds[0], "--pred", &preds[1], "--gt", &gts[0]];
    let out = run(&bad, &[]);
    assert!(!out.status.success());
}

#[test]
fn truncated_path_sets_warn_through_eval() {
    let w = Workdir::new();
    // dense diamond stack: many root-to-leaf paths
    let mut pts = Vec::new();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    pts.push(common::p(0.0, 0.0));
    for layer in 0..4u32 {
        let base = 1 + layer * 2;
        pts.push(common::p(-0.6, 0.8 * (layer + 1) as f64));
        pts.push(common::p(0.6, 0.8 * (layer + 1) as f64));
        if layer == 0 {
            edges.push((0, 1));
            edges.push((0, 2));
        } else {
            edges.push((base - 2, base));
            edges.push((base - 2, base + 1));
            edges.push((base - 1, base));
            edges.push((base - 1, base + 1));
        }
        let _ = base;
    }
    pts.push(common::p(0.0, 4.0));
    let last = (pts.len() - 1) as u32;
    edges.push((last - 2, last));
    edges.push((last - 1, last));
    let graph = lanegraph::DirectedLaneGraph::from_positions(&pts, &edges);
    assert!(graph.validate().is_valid);

    let gfile = path_str(&w.file("dense.json"));
    lanegraph::io::save_graph(&graph, w.file("dense.json").as_path()).unwrap();

    let pfile = path_str(&w.file("paths.json"));
    let out = run(&["g2p", "--graph", &gfile, "--out", &pfile, "--cap", "2"], &[]);
    assert!(out.status.success());
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("cap"),
        "g2p must warn about the hit cap"
    );

    let rfile = path_str(&w.file("rebuilt.json"));
    run(&["p2g", "--paths", &pfile, "--out", &rfile], &[]);

    let out = run(&["eval", "--pred", &rfile, "--gt", &gfile, "--json"], &[]);
    assert!(out.status.success());
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("truncated"),
        "eval must warn about truncated inputs"
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["flags"]["truncated_input"], true);
}

#[test]
fn synth_config_file_with_seed_override() {
    let w = Workdir::new();
    let cfg = w.file("cfg.json");
    std::fs::write(
        &cfg,
        br#"{"seed": 1, "num_roots": 3, "max_depth": 3, "fork_prob": 0.0, "merge_prob": 0.0}"#,
    )
    .unwrap();
    let out_path = path_str(&w.file("g.json"));
    let out = run(
        &["synth", "--seed", "42", "--config", &path_str(&cfg), "--out", &out_path],
        &[],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let graph = lanegraph::io::load_graph(w.file("g.json").as_path()).unwrap();
    // chains only under zero fork/merge probabilities
    assert!(graph.junctions().is_empty());
    // the --seed flag overrides the config seed
    let doc = lanegraph::io::load_graph_document(w.file("g.json").as_path()).unwrap();
    assert_eq!(doc.metadata.get("seed").map(String::as_str), Some("42"));

    // malformed config reports the field
    std::fs::write(&cfg, br#"{"seed": "oops"}"#).unwrap();
    let out = run(
        &["synth", "--seed", "42", "--config", &path_str(&cfg), "--out", &out_path],
        &[],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn perturb_flags_flow_through() {
    let w = Workdir::new();
    let g = path_str(&w.file("g.json"));
    let p = path_str(&w.file("p.json"));
    let noisy = path_str(&w.file("noisy.json"));
    run(&["synth", "--seed", "5", "--out", &g], &[]);
    run(&["g2p", "--graph", &g, "--out", &p], &[]);

    // identity perturbation reproduces the input paths exactly
    let out = run(
        &["perturb", "--paths", &p, "--seed", "9", "--sigma", "0", "--out", &noisy],
        &[],
    );
    assert!(out.status.success());
    let original = lanegraph::io::load_paths(w.file("p.json").as_path()).unwrap();
    let identity = lanegraph::io::load_paths(w.file("noisy.json").as_path()).unwrap();
    assert_eq!(original.paths, identity.paths);

    let out = run(
        &["perturb", "--paths", &p, "--seed", "9", "--sigma", "0.2", "--drop", "0.1", "--out", &noisy],
        &[],
    );
    assert!(out.status.success());
    let perturbed = lanegraph::io::load_paths(w.file("noisy.json").as_path()).unwrap();
    assert_ne!(original.paths, perturbed.paths);
}
