//! Command-line front end. Every output starts with a `#` block echoing the
//! arguments that determine it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cascade::{estimate_revenue, simulate_once, ThresholdTape};
use crate::error::{validation, Error, Result};
use crate::experiment::{
    average_curves, curves_csv, run_experiment, ExperimentConfig, StrategyKind,
};
use crate::graph::{
    generate_preferential_attachment, load_edge_list, write_edge_list, Graph, SeedSet,
};
use crate::model::{read_model_config, BuyerModel};
use crate::oracle::{
    build_hardness_instance, hardness_expected_revenue, layer_sidecar, optimal_adaptive_value,
    optimal_nonadaptive_bruteforce, verify_hardness_structure,
};
use crate::search::{EpsilonRule, SearchConfig, VisitOrder};
use crate::strategy::PricingStrategy;

/// Exit status for bad arguments, files or configuration.
pub const EXIT_USAGE: i32 = 2;
/// Exit status when an exact computation exceeds its budget.
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "cascade-pricer",
    version,
    about = "Pricing strategies for recommendation cascades"
)]
pub struct Cli {
    /// Master seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (results do not depend on it)
    #[arg(long, global = true, env = "CASCADE_PRICER_THREADS")]
    pub threads: Option<usize>,
    /// Write to this file instead of standard output
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a preferential-attachment graph as an edge list
    Generate {
        /// Generator parameters, `n=<nodes> m=<edges per new node>`
        #[arg(long, num_args = 1.., value_name = "KEY=VALUE", required = true)]
        pa: Vec<String>,
    },
    /// Evaluate strategies, or estimate the revenue of a strategy file
    Run(RunArgs),
    /// Improve strategies by local search and emit averaged revenue curves
    Localsearch(SearchArgs),
    /// Exact non-adaptive and adaptive optima on a tiny graph
    Oracle(OracleArgs),
    /// Build and check the vertex-cover reduction instance
    Hardness(HardnessArgs),
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    /// Edge-list file
    #[arg(long, conflicts_with = "pa", required_unless_present = "pa")]
    pub graph: Option<PathBuf>,
    /// Generate instead: `n=<nodes> m=<edges per new node>`, seeded by --seed
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    pub pa: Option<Vec<String>>,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Model file; the default 4-step cascade model otherwise
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Strategies to compare
    #[arg(long, value_delimiter = ',', default_value = "maxleaf,random")]
    pub strategy: Vec<StrategyKind>,
    /// Monte Carlo trials per estimate
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Repeats, each with its own seed node, strategy draw and tape
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    /// Fixed seed node instead of a random one per repeat
    #[arg(long)]
    pub seed_node: Option<usize>,
    /// Price grid for random pricing and local search
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Estimate this strategy file instead (seed node from --seed-node, default 0)
    #[arg(long)]
    pub strategy_file: Option<PathBuf>,
    /// Write cascade traces of the first trials to this file
    #[arg(long, requires = "strategy_file")]
    pub trace: Option<PathBuf>,
    /// Number of trials to trace
    #[arg(long, default_value_t = 1, requires = "trace")]
    pub trace_trials: u64,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Node visits per search
    #[arg(long, default_value_t = 200)]
    pub iterations: usize,
    /// Improvement threshold: `paired:<k>`, `incumbent:<k>` (multiples of a
    /// standard error) or `absolute:<value>`
    #[arg(long, default_value = "paired:2")]
    pub epsilon: String,
    /// Node visiting order: `degree` or `ascending`
    #[arg(long, default_value = "degree")]
    pub order: String,
    #[arg(long, default_value_t = 10)]
    pub max_passes: usize,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Model file; accepts any positive price with probability 1/2 otherwise
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed_node: usize,
    /// Save the optimal non-adaptive strategy here
    #[arg(long)]
    pub strategy_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HardnessArgs {
    /// Edge list of the vertex-cover instance
    #[arg(long)]
    pub source: PathBuf,
    /// Degree bound; the source's maximum degree by default
    #[arg(long)]
    pub d: Option<usize>,
    /// Pendants per edge node; 20d by default
    #[arg(long)]
    pub k: Option<usize>,
    /// Source vertices to make free, for the closed-form revenue
    #[arg(long, value_delimiter = ',')]
    pub cover: Option<Vec<usize>>,
    /// Write the instance edge list here
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Write the `node layer` sidecar here
    #[arg(long)]
    pub layers: Option<PathBuf>,
}

/// Parses arguments, runs, and returns the process exit status.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Budget(_) => EXIT_BUDGET,
                _ => EXIT_USAGE,
            }
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(validation("--threads must be at least 1"));
        }
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let mut manifest = Manifest::new(cli);
    let body = match &cli.command {
        Command::Generate { pa } => {
            let g = generate(pa, cli.seed, &mut manifest)?;
            write_edge_list(&g)
        }
        Command::Run(args) => cmd_run(args, cli.seed, &mut manifest)?,
        Command::Localsearch(args) => cmd_localsearch(args, cli.seed, &mut manifest)?,
        Command::Oracle(args) => cmd_oracle(args, &mut manifest)?,
        Command::Hardness(args) => cmd_hardness(args, &mut manifest)?,
    };
    let text = manifest.render() + &body;
    match &cli.output {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct Manifest(Vec<(&'static str, String)>);

impl Manifest {
    fn new(cli: &Cli) -> Self {
        let command = match cli.command {
            Command::Generate { .. } => "generate",
            Command::Run(_) => "run",
            Command::Localsearch(_) => "localsearch",
            Command::Oracle(_) => "oracle",
            Command::Hardness(_) => "hardness",
        };
        Manifest(vec![
            ("cascade-pricer", env!("CARGO_PKG_VERSION").to_string()),
            ("command", command.to_string()),
            ("seed", cli.seed.to_string()),
        ])
    }

    fn push(&mut self, key: &'static str, value: impl ToString) {
        self.0.push((key, value.to_string()));
    }

    fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.0 {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        out
    }
}

fn read_file(path: &Path, what: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{what} {}: {e}", path.display()),
        ))
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot write {}: {e}", path.display()),
        ))
    })
}

fn generate(params: &[String], seed: u64, manifest: &mut Manifest) -> Result<Graph> {
    let (mut n, mut m) = (None, None);
    for p in params {
        let (key, value) = p
            .split_once('=')
            .ok_or_else(|| validation(format!("generator parameter {p:?} is not KEY=VALUE")))?;
        let value: usize = value
            .parse()
            .map_err(|_| validation(format!("generator parameter {p:?} needs a whole number")))?;
        match key {
            "n" => n = Some(value),
            "m" => m = Some(value),
            _ => {
                return Err(validation(format!(
                    "unknown generator parameter {key:?} (expected n or m)"
                )))
            }
        }
    }
    let (Some(n), Some(m)) = (n, m) else {
        return Err(validation(
            "generator needs both n=<nodes> and m=<edges per node>",
        ));
    };
    manifest.push("graph", format!("pa n={n} m={m} seed={seed}"));
    generate_preferential_attachment(n, m, seed)
}

fn load_graph(args: &GraphArgs, seed: u64, manifest: &mut Manifest) -> Result<Graph> {
    match (&args.graph, &args.pa) {
        (Some(path), _) => {
            manifest.push("graph", path.display());
            Ok(load_edge_list(&read_file(path, "graph file")?)?.graph)
        }
        (None, Some(pa)) => generate(pa, seed, manifest),
        (None, None) => Err(validation("give either --graph or --pa")),
    }
}

fn load_model(
    path: Option<&PathBuf>,
    default: BuyerModel,
    manifest: &mut Manifest,
) -> Result<BuyerModel> {
    let model = match path {
        Some(path) => {
            manifest.push("model_file", path.display());
            read_model_config(path)?
        }
        None => default,
    };
    manifest.push("model", &model);
    Ok(model)
}

fn experiment_config(
    args: &ExperimentArgs,
    seed: u64,
    search: SearchConfig,
    manifest: &mut Manifest,
) -> ExperimentConfig {
    let strategies: Vec<String> = args.strategy.iter().map(|s| s.to_string()).collect();
    manifest.push("strategy", strategies.join(","));
    manifest.push("trials", search.trials);
    manifest.push("repeats", args.repeats);
    manifest.push(
        "seed_node",
        args.seed_node.map_or("random".into(), |v| v.to_string()),
    );
    manifest.push("grid", join(&search.grid));
    ExperimentConfig {
        strategies: args.strategy.clone(),
        repeats: args.repeats,
        seed,
        seed_node: args.seed_node,
        search,
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_run(args: &RunArgs, seed: u64, manifest: &mut Manifest) -> Result<String> {
    let ex = &args.experiment;
    let g = load_graph(&ex.graph, seed, manifest)?;
    let m = load_model(
        ex.model.as_ref(),
        BuyerModel::default_experiment(),
        manifest,
    )?;
    let Some(path) = &args.strategy_file else {
        let search = SearchConfig {
            grid: ex
                .grid
                .clone()
                .unwrap_or_else(|| SearchConfig::default().grid),
            trials: ex.trials,
            max_iterations: Some(0),
            ..SearchConfig::default()
        };
        let cfg = experiment_config(ex, seed, search, manifest);
        let runs = run_experiment(&g, &m, &cfg)?;
        return Ok(curves_csv(&average_curves(&runs, &cfg.strategies)));
    };

    let seeds = SeedSet::single(&g, ex.seed_node.unwrap_or(0))?;
    let s = PricingStrategy::from_text(&read_file(path, "strategy file")?, g.node_count(), &seeds)?;
    manifest.push("strategy_file", path.display());
    manifest.push("seed_node", seeds.members()[0]);
    manifest.push("trials", ex.trials);
    let tape = ThresholdTape::new(seed);
    let estimate = estimate_revenue(&g, &seeds, &s, &m, &tape, ex.trials)?;
    if let Some(trace) = &args.trace {
        let mut dump = String::new();
        for trial in 0..args.trace_trials {
            writeln!(dump, "# trial {trial}").unwrap();
            dump += &simulate_once(&g, &seeds, &s, &m, &tape, trial)?.dump();
        }
        write_file(trace, &dump)?;
    }
    Ok(format!("trials,mean,stderr\n{estimate}\n"))
}

fn parse_epsilon(text: &str) -> Result<EpsilonRule> {
    let bad = || {
        validation(format!(
            "epsilon {text:?} is not paired:<k>, incumbent:<k> or absolute:<value>"
        ))
    };
    let (kind, value) = text.split_once(':').ok_or_else(bad)?;
    let value: f64 = value.parse().map_err(|_| bad())?;
    match kind {
        "paired" => Ok(EpsilonRule::PairedStderr(value)),
        "incumbent" => Ok(EpsilonRule::IncumbentStderr(value)),
        "absolute" => Ok(EpsilonRule::Absolute(value)),
        _ => Err(bad()),
    }
}

fn cmd_localsearch(args: &SearchArgs, seed: u64, manifest: &mut Manifest) -> Result<String> {
    let ex = &args.experiment;
    let g = load_graph(&ex.graph, seed, manifest)?;
    let m = load_model(
        ex.model.as_ref(),
        BuyerModel::default_experiment(),
        manifest,
    )?;
    let order = match args.order.as_str() {
        "degree" => VisitOrder::DegreeDescending,
        "ascending" => VisitOrder::Ascending,
        other => return Err(validation(format!("unknown visiting order {other:?}"))),
    };
    let search = SearchConfig {
        grid: ex
            .grid
            .clone()
            .unwrap_or_else(|| SearchConfig::default().grid),
        epsilon: parse_epsilon(&args.epsilon)?,
        trials: ex.trials,
        order,
        max_passes: args.max_passes,
        max_iterations: Some(args.iterations),
    };
    manifest.push("iterations", args.iterations);
    manifest.push("epsilon", &args.epsilon);
    manifest.push("order", &args.order);
    manifest.push("max_passes", args.max_passes);
    let cfg = experiment_config(ex, seed, search, manifest);
    let runs = run_experiment(&g, &m, &cfg)?;
    Ok(curves_csv(&average_curves(&runs, &cfg.strategies)))
}

fn cmd_oracle(args: &OracleArgs, manifest: &mut Manifest) -> Result<String> {
    let g = load_graph(&args.graph, 0, manifest)?;
    let m = load_model(args.model.as_ref(), BuyerModel::accept_half(), manifest)?;
    let seeds = SeedSet::single(&g, args.seed_node)?;
    manifest.push("seed_node", args.seed_node);
    manifest.push("grid", join(&args.grid));
    let (best, fixed) = optimal_nonadaptive_bruteforce(&g, &seeds, &m, &args.grid)?;
    let adaptive = optimal_adaptive_value(&g, &seeds, &m, &args.grid)?;
    if let Some(path) = &args.strategy_out {
        write_file(path, &best.to_text())?;
    }
    Ok(format!(
        "nonadaptive,adaptive,ratio\n{fixed},{adaptive},{}\n",
        adaptive / fixed
    ))
}

fn cmd_hardness(args: &HardnessArgs, manifest: &mut Manifest) -> Result<String> {
    manifest.push("source", args.source.display());
    let source = load_edge_list(&read_file(&args.source, "source graph")?)?.graph;
    let d = args.d.unwrap_or_else(|| source.max_degree().max(1));
    let inst = build_hardness_instance(&source, d, args.k)?;
    manifest.push("d", d);
    manifest.push("k", inst.k);
    if let Some(path) = &args.edges {
        write_file(path, &write_edge_list(&inst.graph))?;
    }
    if let Some(path) = &args.layers {
        write_file(path, &layer_sidecar(&inst))?;
    }
    let report = verify_hardness_structure(&inst)?;
    let cover = match &args.cover {
        Some(c) => {
            manifest.push(
                "cover",
                c.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
            );
            hardness_expected_revenue(&inst, c)?.to_string()
        }
        None => String::new(),
    };
    let opt = |v: Option<String>| v.unwrap_or_default();
    let free = report
        .best_free_set
        .as_ref()
        .map(|s| s.iter().map(usize::to_string).collect::<Vec<_>>().join(" "));
    Ok(format!(
        "d,k,p,nodes,bound_identity,pendant_identity,min_cover_size,best_free_set,best_revenue,best_is_min_cover,formula_error,cover_revenue\n\
         {},{},{},{},{},{},{},{},{},{},{},{}\n",
        inst.d,
        inst.k,
        inst.p,
        inst.graph.node_count(),
        report.bound_identity,
        report.pendant_identity,
        opt(report.min_cover_size.map(|v| v.to_string())),
        opt(free),
        opt(report.best_revenue.map(|v| v.to_string())),
        opt(report.best_is_min_cover.map(|v| v.to_string())),
        opt(report.formula_error.map(|v| v.to_string())),
        cover,
    ))
}
