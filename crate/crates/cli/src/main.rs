//! Command-line front end: generate parent graphs, sample them, estimate
//! component counts, run Monte Carlo sweeps and the oracle-backed
//! self-checks, and emit the adversarial pair constructions.
//!
//! Exit codes: 0 success, 1 internal error or failed check, 2 usage error
//! or model violation (a non-chordal sample without `--heuristic`).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ccsample_core::chordal::{clique_number, mcs_peo, triangulate};
use ccsample_core::estimators::{clip_round, estimate, EstimateError};
use ccsample_core::graph::{connected_components, parse_edge_list, Graph};
use ccsample_core::harness::{
    build_estimator_kind, estimator_name, run_eval, run_verify, summary_csv, trials_csv,
    EvalConfig, GeneratorSpec, VerifySuite,
};
use ccsample_core::lowerbounds::{
    gen_chordal_pair_parity, gen_clique_pair, gen_cycle_pair, gen_star_pair, GraphPair,
};
use ccsample_core::sampling::{bernoulli_sample, uniform_sample, SampleModel, SampledGraph};

#[derive(Parser)]
#[command(
    name = "ccsample",
    about = "Estimate connected-component counts from vertex-sampled subgraphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a parent graph and write it as an edge list.
    Gen(GenArgs),
    /// Sample a graph once and write the induced subgraph.
    Sample(SampleArgs),
    /// Sample a graph once and print a JSON estimate.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo sweep from a config file.
    Eval(EvalArgs),
    /// Run an oracle-backed self-check suite.
    Verify(VerifyArgs),
    /// Emit an adversarial graph pair with its metadata sidecar.
    Pair(PairArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Generator spec: `er <n> <delta>`, `named <kind> <k>`, or
    /// `copies <count> <inner>` with colon-separated inner spec.
    #[arg(required = true, num_args = 1..)]
    spec: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Apply the fill-in triangulation to the parent before writing.
    #[arg(long)]
    triangulate: bool,
    /// Output path (stdout if omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    graph: PathBuf,
    /// Bernoulli sampling ratio.
    #[arg(long, conflicts_with = "uniform_n")]
    p: Option<f64>,
    /// Uniform design: sample exactly this many vertices.
    #[arg(long)]
    uniform_n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path for the sampled edge list (stdout if omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    graph: PathBuf,
    /// Bernoulli sampling ratio.
    #[arg(long, conflicts_with = "uniform_n")]
    p: Option<f64>,
    /// Uniform design: sample exactly this many vertices (uses the
    /// uniform-design estimator).
    #[arg(long)]
    uniform_n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// unbiased | smoothed | cliques | cliques-smoothed | uniform | forest
    #[arg(long, default_value = "unbiased")]
    estimator: String,
    /// auto | plogn | `<value>`
    #[arg(long)]
    lambda: Option<String>,
    /// Assumed parent maximum degree (for `--lambda auto`).
    #[arg(long)]
    d: Option<usize>,
    /// Assumed parent clique number (for `--lambda auto`).
    #[arg(long)]
    omega: Option<usize>,
    /// Triangulate the sampled graph before estimating.
    #[arg(long)]
    heuristic: bool,
    /// Clamp to [0, N] and round.
    #[arg(long)]
    clip: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Key-value config file (see README for the format).
    config: PathBuf,
    /// Override the per-trial CSV path from the config.
    #[arg(long)]
    out_trials: Option<PathBuf>,
    /// Override the summary CSV path from the config.
    #[arg(long)]
    out_summary: Option<PathBuf>,
    /// Write the full report as JSON.
    #[arg(long)]
    report_json: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// unbiasedness | variance | tv-pairs | matching | peo | all
    suite: String,
}

#[derive(Args)]
struct PairArgs {
    /// cycle | chordal-parity | cliques | star
    construction: String,
    /// Construction parameters: r | omega m | omega | d.
    #[arg(required = true, num_args = 1..)]
    params: Vec<usize>,
    /// Output directory for `<name>_h.edges`, `<name>_h2.edges`, `<name>_meta.json`.
    #[arg(short, long, default_value = ".")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Pair(args) => cmd_pair(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = err.source();
            while let Some(inner) = source {
                eprintln!("  caused by: {inner}");
                source = inner.source();
            }
            ExitCode::from(1)
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<(), AnyError> {
    match path {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display()).into()),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn graph_summary(g: &Graph) -> String {
    let (cc, _) = connected_components(g);
    let omega = match mcs_peo(g) {
        Ok(peo) => clique_number(&peo).to_string(),
        Err(_) => "n/a (non-chordal)".to_string(),
    };
    format!(
        "n = {}, e = {}, max degree = {}, omega = {}, cc = {}",
        g.n(),
        g.edge_count(),
        g.max_degree(),
        omega,
        cc
    )
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, AnyError> {
    let tokens: Vec<&str> = args.spec.iter().map(String::as_str).collect();
    let spec = GeneratorSpec::parse(&tokens)?;
    let mut g = spec.build(args.seed)?;
    if args.triangulate {
        g = triangulate(&g);
    }
    write_or_print(&args.out, &g.to_edge_list())?;
    eprintln!("{}", graph_summary(&g));
    Ok(ExitCode::SUCCESS)
}

fn load_graph(path: &PathBuf) -> Result<Graph, AnyError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Ok(parse_edge_list(&text)?)
}

fn draw_sample(
    g: &Graph,
    p: Option<f64>,
    uniform_n: Option<usize>,
    seed: u64,
) -> Result<(SampledGraph, f64), AnyError> {
    match (p, uniform_n) {
        (Some(p), None) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("p must be in [0, 1], got {p}").into());
            }
            Ok((bernoulli_sample(g, p, seed), p))
        }
        (None, Some(n)) => {
            let sg = uniform_sample(g, n, seed)?;
            let p_equiv = n as f64 / g.n().max(1) as f64;
            Ok((sg, p_equiv))
        }
        _ => Err("exactly one of --p and --uniform-n is required".into()),
    }
}

fn cmd_sample(args: SampleArgs) -> Result<ExitCode, AnyError> {
    let g = load_graph(&args.graph)?;
    let (sg, _) = draw_sample(&g, args.p, args.uniform_n, args.seed)?;
    write_or_print(&args.out, &sg.graph.to_edge_list())?;
    let model = match sg.spec.model {
        SampleModel::Bernoulli(p) => serde_json::json!({"kind": "bernoulli", "p": p}),
        SampleModel::Uniform(n) => serde_json::json!({"kind": "uniform", "n": n}),
    };
    eprintln!(
        "{}",
        serde_json::json!({
            "parent_n": sg.parent_n,
            "model": model,
            "seed": sg.spec.seed,
            "n_sampled": sg.sampled.len(),
            "sampled": sg.sampled.members(),
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_estimate(args: EstimateArgs) -> Result<ExitCode, AnyError> {
    let g = load_graph(&args.graph)?;
    let estimator_id = if args.uniform_n.is_some() && args.estimator == "unbiased" {
        "uniform".to_string()
    } else {
        args.estimator.clone()
    };
    let kind = build_estimator_kind(
        &estimator_id,
        args.lambda.as_deref(),
        args.d,
        args.omega,
        args.heuristic,
    )?;
    let (sg, p) = draw_sample(&g, args.p, args.uniform_n, args.seed)?;
    let value = match estimate(&kind, &sg, p) {
        Ok(v) => v,
        Err(e @ EstimateError::NotChordalSample(_))
        | Err(e @ EstimateError::NotUnionOfCliques { .. }) => {
            eprintln!("model violation: {e}");
            eprintln!("hint: pass --heuristic to triangulate the sample first");
            return Ok(ExitCode::from(2));
        }
        Err(e) => return Err(e.into()),
    };
    let value = if args.clip {
        clip_round(value, sg.parent_n)
    } else {
        value
    };
    let model = match sg.spec.model {
        SampleModel::Bernoulli(p) => serde_json::json!({"kind": "bernoulli", "p": p}),
        SampleModel::Uniform(n) => serde_json::json!({"kind": "uniform", "n": n}),
    };
    println!(
        "{}",
        serde_json::json!({
            "estimate": value,
            "model": model,
            "seed": args.seed,
            "estimator": estimator_name(&kind),
            "parent_n": sg.parent_n,
            "n_sampled": sg.sampled.len(),
        })
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(args: EvalArgs) -> Result<ExitCode, AnyError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let config = EvalConfig::parse(&text)?;
    let parent = config.load_parent()?;
    let mut report = match run_eval(
        &parent,
        &config.estimator,
        &config.p_grid,
        config.trials,
        config.base_seed,
    ) {
        Ok(report) => report,
        Err(ccsample_core::harness::HarnessError::Estimate(
            e @ EstimateError::NotChordalSample(_),
        )) => {
            eprintln!("model violation during sweep: {e}");
            eprintln!("hint: set `heuristic = true` in the config");
            return Ok(ExitCode::from(2));
        }
        Err(e) => return Err(e.into()),
    };
    report.config_echo = Some(text);
    let out_trials = args.out_trials.or(config.out_trials);
    let out_summary = args.out_summary.or(config.out_summary);
    if let Some(path) = &out_trials {
        std::fs::write(path, trials_csv(&report))
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    if let Some(path) = &out_summary {
        std::fs::write(path, summary_csv(&report))
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    if let Some(path) = &args.report_json {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    if out_trials.is_none() && out_summary.is_none() {
        print!("{}", summary_csv(&report));
    }
    eprintln!(
        "estimator {}, parent n = {}, true cc = {}, total {:.1} ms",
        report.estimator, report.parent_n, report.true_cc, report.total_wall_ms
    );
    for row in &report.summary {
        eprintln!(
            "p = {:.3}: mean rel err = {:.4} (sd {:.4}), mean estimate = {:.2}",
            row.p, row.mean_rel_error, row.sd_rel_error, row.mean_estimate
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, AnyError> {
    let Some(suite) = VerifySuite::parse(&args.suite) else {
        eprintln!(
            "unknown suite {:?}; expected unbiasedness | variance | tv-pairs | matching | peo | all",
            args.suite
        );
        return Ok(ExitCode::from(2));
    };
    let outcomes = run_verify(suite);
    let mut all_ok = true;
    for outcome in &outcomes {
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        if outcome.detail.is_empty() {
            println!("{status}: {}", outcome.name);
        } else {
            println!("{status}: {} ({})", outcome.name, outcome.detail);
        }
        all_ok &= outcome.passed;
    }
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_pair(args: PairArgs) -> Result<ExitCode, AnyError> {
    let (pair, name): (GraphPair, String) =
        match (args.construction.as_str(), args.params.as_slice()) {
            ("cycle", [r]) => (gen_cycle_pair(*r)?, format!("cycle_r{r}")),
            ("chordal-parity", [omega, m]) => (
                gen_chordal_pair_parity(*omega, *m)?,
                format!("chordal_parity_w{omega}_m{m}"),
            ),
            ("cliques", [omega]) => (gen_clique_pair(*omega)?, format!("cliques_w{omega}")),
            ("star", [d]) => (gen_star_pair(*d)?, format!("star_d{d}")),
            (other, params) => {
                eprintln!(
                    "unknown pair construction {other:?} with {} parameter(s); expected \
                     cycle <r> | chordal-parity <omega> <m> | cliques <omega> | star <d>",
                    params.len()
                );
                return Ok(ExitCode::from(2));
            }
        };
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| format!("cannot create {}: {e}", args.out_dir.display()))?;
    let h_path = args.out_dir.join(format!("{name}_h.edges"));
    let h2_path = args.out_dir.join(format!("{name}_h2.edges"));
    let meta_path = args.out_dir.join(format!("{name}_meta.json"));
    std::fs::write(&h_path, pair.h.to_edge_list())?;
    std::fs::write(&h2_path, pair.h2.to_edge_list())?;
    std::fs::write(&meta_path, serde_json::to_string_pretty(&pair.meta)?)?;
    println!(
        "wrote {}, {}, {}",
        h_path.display(),
        h2_path.display(),
        meta_path.display()
    );
    println!("h : {}", graph_summary(&pair.h));
    println!("h2: {}", graph_summary(&pair.h2));
    Ok(ExitCode::SUCCESS)
}
