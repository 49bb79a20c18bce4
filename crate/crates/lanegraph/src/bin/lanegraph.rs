//! Command-line surface for the lane-graph toolkit.
//!
//! Subcommands cover the full pipeline: `synth` generates a seeded graph,
//! `g2p` decomposes it into paths, `perturb` jitters them, `p2g` rebuilds a
//! graph, `eval` scores prediction against ground truth, `render` draws an
//! SVG, and `roundtrip` chains g2p -> p2g -> eval against the input itself.

use clap::{Args, Parser, Subcommand};
use lanegraph::graph2path::{graph_to_paths, DEFAULT_PATH_CAP};
use lanegraph::io::{
    load_graph, load_graph_document, load_paths, load_paths_document, save_graph_document,
    save_paths, GraphDocument,
};
use lanegraph::metrics::{junction_topo_metric, topo_metric, MetricConfig, TopoReport};
use lanegraph::path2graph::{paths_to_graph, MergeConfig};
use lanegraph::svg::{render_svg, RenderOptions};
use lanegraph::synth::{generate_graph, perturb_paths, PerturbConfig, SynthConfig};
use lanegraph::{geometry_isomorphic, Error};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Parser)]
#[command(name = "lanegraph", about = "Path-wise lane-graph toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a graph into root-to-leaf paths.
    G2p(G2pArgs),
    /// Reconstruct a graph from paths.
    P2g(P2gArgs),
    /// Evaluate predicted against ground-truth graphs (TOPO metrics).
    Eval(EvalArgs),
    /// Generate a seeded synthetic lane graph.
    Synth(SynthArgs),
    /// Perturb a path set into a "predicted" one.
    Perturb(PerturbArgs),
    /// Render a graph (plus optional paths) as SVG.
    Render(RenderArgs),
    /// Run g2p -> p2g -> eval against the input graph itself.
    Roundtrip(RoundtripArgs),
}

#[derive(Args)]
struct G2pArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Per-(root, leaf) cap on enumerated simple paths.
    #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
    cap: usize,
}

#[derive(Args)]
struct P2gArgs {
    #[arg(long)]
    paths: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Discretization step in meters.
    #[arg(long, default_value_t = 0.15)]
    step: f64,
    /// Merge radius in meters (0 = exact coincidence).
    #[arg(long = "merge-radius", default_value_t = 0.0)]
    merge_radius: f64,
}

#[derive(Args)]
struct EvalArgs {
    /// Predicted graph file(s); repeat the flag for multiple frames.
    #[arg(long, required = true)]
    pred: Vec<PathBuf>,
    /// Ground-truth graph file(s); count must match --pred.
    #[arg(long, required = true)]
    gt: Vec<PathBuf>,
    /// Evaluate on the undirected graphs.
    #[arg(long)]
    undirected: bool,
    /// Report Junction TOPO instead of TOPO.
    #[arg(long)]
    junction: bool,
    #[arg(long, default_value_t = 0.15)]
    spacing: f64,
    #[arg(long, default_value_t = 0.45)]
    threshold: f64,
    #[arg(long, default_value_t = 7.5)]
    traverse: f64,
    /// Machine-readable JSON on stdout (NDJSON for multiple frames).
    #[arg(long)]
    json: bool,
    /// Worker pool size for multiple frames (default: LANEGRAPH_JOBS or the
    /// available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    seed: u64,
    /// Generator config JSON (SynthConfig fields); the --seed flag wins.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(long)]
    paths: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Per-point Gaussian noise in meters.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    drop: f64,
    #[arg(long, default_value_t = 0.0)]
    truncate: f64,
    #[arg(long, default_value_t = 0.0)]
    spurious: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    paths: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RoundtripArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
    cap: usize,
    #[arg(long, default_value_t = 0.15)]
    step: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> lanegraph::Result<ExitCode> {
    match command {
        Command::G2p(args) => {
            let graph = load_graph(&args.graph)?;
            let set = graph_to_paths(&graph, args.cap)?;
            if set.truncated {
                eprintln!(
                    "warning: path enumeration hit the cap of {} on some (root, leaf) pair; \
                     the path set is incomplete",
                    args.cap
                );
            }
            save_paths(&set, &args.out)?;
            println!("{} paths -> {}", set.path_count(), args.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::P2g(args) => {
            let doc = load_paths_document(&args.paths)?;
            let set = doc.to_path_set()?;
            let config = MergeConfig {
                discretize_step: args.step,
                merge_radius: args.merge_radius,
                ..Default::default()
            };
            let graph = paths_to_graph(&set, &config)?;
            let mut out_doc = GraphDocument::from_graph(&graph);
            out_doc.metadata = doc.metadata.clone();
            save_graph_document(&out_doc, &args.out)?;
            println!(
                "{} vertices, {} edges -> {}",
                graph.vertex_count(),
                graph.edge_count(),
                args.out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval(args) => run_eval(args),
        Command::Synth(args) => {
            let mut config = match &args.config {
                Some(path) => load_synth_config(path)?,
                None => SynthConfig::default(),
            };
            config.seed = args.seed;
            let graph = generate_graph(&config)?;
            let mut doc = GraphDocument::from_graph(&graph);
            doc.metadata.insert("seed".to_string(), config.seed.to_string());
            save_graph_document(&doc, &args.out)?;
            println!(
                "seed {} -> {} vertices, {} edges -> {}",
                config.seed,
                graph.vertex_count(),
                graph.edge_count(),
                args.out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Perturb(args) => {
            let set = load_paths(&args.paths)?;
            let config = PerturbConfig {
                seed: args.seed,
                noise_sigma: args.sigma,
                drop_path_prob: args.drop,
                truncate_prob: args.truncate,
                spurious_path_prob: args.spurious,
            };
            let out = perturb_paths(&set, &config)?;
            save_paths(&out, &args.out)?;
            println!("{} paths -> {}", out.path_count(), args.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Render(args) => {
            let graph = load_graph(&args.graph)?;
            let paths = match &args.paths {
                Some(p) => Some(load_paths(p)?),
                None => None,
            };
            let svg = render_svg(&graph, paths.as_ref(), &RenderOptions::default());
            std::fs::write(&args.out, svg.as_bytes()).map_err(|source| Error::Io {
                path: args.out.display().to_string(),
                source,
            })?;
            println!("rendered {}", args.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Roundtrip(args) => run_roundtrip(args),
    }
}

fn load_synth_config(path: &Path) -> lanegraph::Result<SynthConfig> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let de = &mut serde_json::Deserializer::from_slice(&bytes);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        field_path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

fn default_jobs() -> usize {
    if let Ok(v) = std::env::var("LANEGRAPH_JOBS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn run_eval(args: EvalArgs) -> lanegraph::Result<ExitCode> {
    if args.pred.len() != args.gt.len() {
        return Err(Error::invalid_argument(format!(
            "{} --pred files but {} --gt files",
            args.pred.len(),
            args.gt.len()
        )));
    }
    let config = MetricConfig {
        interpolation_spacing: args.spacing,
        match_threshold: args.threshold,
        traverse_dist: args.traverse,
        directed: !args.undirected,
    };
    config.validate()?;

    let frames: Vec<(PathBuf, PathBuf)> = args
        .pred
        .iter()
        .cloned()
        .zip(args.gt.iter().cloned())
        .collect();
    let jobs = args.jobs.unwrap_or_else(default_jobs).max(1);

    let results: Vec<lanegraph::Result<TopoReport>> = if frames.len() == 1 || jobs == 1 {
        frames
            .iter()
            .map(|(p, g)| eval_frame(p, g, &config, args.junction))
            .collect()
    } else {
        // fixed worker pool; slots keep results in input order
        let slots: Mutex<Vec<Option<lanegraph::Result<TopoReport>>>> =
            Mutex::new((0..frames.len()).map(|_| None).collect());
        let cursor = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..jobs.min(frames.len()) {
                scope.spawn(|| loop {
                    let i = cursor.fetch_add(1, Ordering::Relaxed);
                    if i >= frames.len() {
                        break;
                    }
                    let (pred, gt) = &frames[i];
                    let result = eval_frame(pred, gt, &config, args.junction);
                    slots.lock().expect("worker poisoned")[i] = Some(result);
                });
            }
        });
        slots
            .into_inner()
            .expect("worker poisoned")
            .into_iter()
            .map(|r| r.expect("every frame processed"))
            .collect()
    };

    let multi = results.len() > 1;
    for ((pred, _), result) in frames.iter().zip(results) {
        let report = result?;
        if report.flags.truncated_input {
            eprintln!(
                "warning: {} was built from a truncated path set; scores may undercount",
                pred.display()
            );
        }
        if args.json {
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
        } else {
            let kind = if args.junction { "junction-topo" } else { "topo" };
            let orientation = if args.undirected { "undirected" } else { "directed" };
            let prefix = if multi {
                format!("{}: ", pred.display())
            } else {
                String::new()
            };
            println!(
                "{prefix}{kind} ({orientation}): precision={:.6} recall={:.6} f1={:.6}",
                report.precision, report.recall, report.f1
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn eval_frame(
    pred_path: &Path,
    gt_path: &Path,
    config: &MetricConfig,
    junction: bool,
) -> lanegraph::Result<TopoReport> {
    let pred_doc = load_graph_document(pred_path)?;
    let truncated_input = pred_doc.metadata.get("truncated").map(String::as_str) == Some("true");
    let pred = pred_doc.to_graph()?;
    let gt = load_graph(gt_path)?;
    let mut report = if junction {
        junction_topo_metric(&pred, &gt, config)?
    } else {
        topo_metric(&pred, &gt, config)?
    };
    report.flags.truncated_input = truncated_input;
    report
        .metadata
        .insert("pred".to_string(), pred_path.display().to_string());
    report
        .metadata
        .insert("gt".to_string(), gt_path.display().to_string());
    Ok(report)
}

fn run_roundtrip(args: RoundtripArgs) -> lanegraph::Result<ExitCode> {
    let graph = load_graph(&args.graph)?;
    let set = graph_to_paths(&graph, args.cap)?;
    let config = MergeConfig {
        discretize_step: args.step,
        ..Default::default()
    };
    let rebuilt = paths_to_graph(&set, &config)?;
    let interpolated = graph.interpolate(args.step)?;
    let isomorphic = geometry_isomorphic(&rebuilt, &interpolated, 1e-6);

    let metric_config = MetricConfig {
        interpolation_spacing: args.step,
        ..Default::default()
    };
    let mut report = topo_metric(&rebuilt, &graph, &metric_config)?;
    report.flags.truncated_input = set.truncated;
    report
        .metadata
        .insert("paths".to_string(), set.path_count().to_string());
    report
        .metadata
        .insert("isomorphic".to_string(), isomorphic.to_string());
    report
        .metadata
        .insert("discretize_step".to_string(), format!("{}", args.step));
    report
        .metadata
        .insert("merge_radius".to_string(), format!("{}", config.merge_radius));

    let ok = (report.f1 - 1.0).abs() <= 1e-9;
    if args.json {
        println!("{}", serde_json::to_string(&report).expect("report serializes"));
    } else {
        println!(
            "roundtrip: paths={} f1={:.9} isomorphic={isomorphic}",
            set.path_count(),
            report.f1
        );
    }
    if ok {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: roundtrip F1 {} differs from 1.0", report.f1);
        Ok(ExitCode::FAILURE)
    }
}
