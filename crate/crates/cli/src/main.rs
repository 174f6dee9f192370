//! `contractlab`: solve, generate and verify contract-design instances.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 solver or verification
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use contractlab::generators::{
    gen_example1, gen_gnp, gen_kclique_reduction, gen_lsac, gen_planted, turan_graph, GeneratedInstance,
};
use contractlab::io::{
    load_edge_list, load_instance, save_instance, write_report, BruteForceReport, Format,
    Instance, InstanceFile, Report, SingleAgentReport,
};
use contractlab::multiagent::{bruteforce_optimum, GraphInstance, MAX_BRUTEFORCE_OPTIMUM_N};
use contractlab::oracles::{oracle_for, OracleStats};
use contractlab::ptas::{desk_m, ptas_solve, PtasConfig, DESK_REPS, DESK_ROUNDING_DRAWS};
use contractlab::rational::{parse_rational, Rational};
use contractlab::single_agent::{
    breakpoints, bruteforce_breakpoints, optimal_contract, verify_nested_chain, SingleAgentInstance,
    MAX_BRUTEFORCE_CURVE_N,
};
use contractlab::verify::{run_all, VerifyConfig};
use contractlab::{Error, Graph};

#[derive(Parser)]
#[command(name = "contractlab", version)]
#[command(about = "Combinatorial contract design with supermodular rewards")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-agent linear contracts
    #[command(subcommand)]
    Single(SingleCommand),
    /// Multi-agent uniform-cost graph contracts
    #[command(subcommand)]
    Multi(MultiCommand),
    /// Write a generated instance as JSON
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run the seeded invariant suites and print a pass/fail table
    VerifyProperties {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest instance size for enumeration-backed checks
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        /// Cases per property
        #[arg(long, default_value_t = 40)]
        cases: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum SingleCommand {
    /// Enumerate breakpoints and pick the optimal linear contract
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Cross-check the breakpoint enumeration against exhaustive search
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = MAX_BRUTEFORCE_CURVE_N)]
        max_n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum MultiCommand {
    /// Exact optimum by enumerating all subsets
    Brute {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value_t = MAX_BRUTEFORCE_OPTIMUM_N)]
        max_n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sampling + LP rounding approximation scheme
    Ptas {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DESK_REPS)]
        reps: usize,
        /// Multiset size [default: min(n, ⌈40 ln n⌉)]
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = DESK_ROUNDING_DRAWS)]
        rounding_draws: usize,
        /// Ratio of the size and edge guess grids [default: 1 + epsilon]
        #[arg(long)]
        guess_grid_ratio: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Hardness reduction: base graph with cost (k-2)/(k-1)
    KcliqueReduction {
        #[command(flatten)]
        base: BaseGraph,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-component counterexample where densest-k subgraphs underperform
    Example1 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Almost-clique reduction: base graph with cost 1 - epsilon
    Lsac {
        #[command(flatten)]
        base: BaseGraph,
        #[arg(long, value_parser = rational)]
        epsilon: Rational,
        /// Clique fraction the metadata targets describe
        #[arg(long, value_parser = rational, default_value = "1")]
        delta: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Erdős–Rényi G(n, p)
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reparameterized cost
        #[arg(long, value_parser = rational, default_value = "1/4")]
        cost: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Planted clique over a G(n, p) background
    Planted {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        clique_size: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reparameterized cost
        #[arg(long, value_parser = rational, default_value = "1/4")]
        cost: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complete balanced multipartite graph (no clique larger than the part count)
    Turan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        parts: usize,
        /// Reparameterized cost
        #[arg(long, value_parser = rational, default_value = "0")]
        cost: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// Report path [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Absolute,
    Reparameterized,
}

/// A graph instance: JSON, or an edge list with `--cost` and `--convention`.
#[derive(Args)]
struct GraphInput {
    #[arg(long)]
    instance: PathBuf,
    /// Uniform cost for edge-list input
    #[arg(long, value_parser = rational)]
    cost: Option<Rational>,
    /// Cost convention for edge-list input
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct BaseGraph {
    /// Base graph: JSON instance or edge list
    #[arg(long)]
    base: Option<PathBuf>,
    /// Use the complete graph on this many nodes as the base
    #[arg(long)]
    complete: Option<usize>,
}

fn rational(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Input(anyhow::Error),
    Solver(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::LpSolver(_) | Error::LpModel(_) | Error::Internal(_) | Error::DegeneratePair { .. } => {
                Failure::Solver(e.into())
            }
            _ => Failure::Input(e.into()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn input_error(msg: impl Into<String>) -> Failure {
    Failure::Input(anyhow::anyhow!(msg.into()))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn load(path: &Path) -> CliResult<Instance> {
    Ok(load_instance(path)?.to_instance()?)
}

fn load_single(path: &Path) -> CliResult<SingleAgentInstance> {
    match load(path)? {
        Instance::Single(i) => Ok(i),
        Instance::Multi(_) => Err(input_error(format!("{}: expected a single-agent instance", path.display()))),
    }
}

fn load_graph_instance(input: &GraphInput) -> CliResult<GraphInstance> {
    if is_json(&input.instance) {
        if input.cost.is_some() || input.convention.is_some() {
            return Err(input_error("--cost/--convention only apply to edge-list input"));
        }
        return match load(&input.instance)? {
            Instance::Multi(g) => Ok(g),
            Instance::Single(_) => Err(input_error(format!(
                "{}: expected a multi-agent-graph instance",
                input.instance.display()
            ))),
        };
    }
    let (Some(cost), Some(convention)) = (&input.cost, input.convention) else {
        return Err(input_error("edge-list input needs both --cost and --convention"));
    };
    let graph = load_edge_list(&input.instance, None)?;
    Ok(match convention {
        ConventionArg::Absolute => GraphInstance::from_absolute_cost(graph, cost)?,
        ConventionArg::Reparameterized => GraphInstance::new(graph, cost.clone())?,
    })
}

fn load_base(base: &BaseGraph) -> CliResult<Graph> {
    match (&base.base, base.complete) {
        (_, Some(n)) => Ok(Graph::complete(n)?),
        (Some(path), None) if is_json(path) => match load(path)? {
            Instance::Multi(g) => Ok(g.graph().clone()),
            Instance::Single(_) => Err(input_error("base must be a graph instance")),
        },
        (Some(path), None) => Ok(load_edge_list(path, None)?),
        (None, None) => Err(input_error("one of --base or --complete is required")),
    }
}

fn emit<R: Report>(report: &R, output: &OutputArgs) -> CliResult<()> {
    Ok(write_report(report, output.out.as_deref(), output.format.into())?)
}

fn write_instance(file: &InstanceFile, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => save_instance(file, path)?,
        None => print!("{}", contractlab::io::instance_to_string(file)?),
    }
    Ok(())
}

fn write_generated(generated: &GeneratedInstance, out: Option<&Path>) -> CliResult<()> {
    write_instance(&InstanceFile::from_generated(generated)?, out)
}

#[derive(Serialize)]
struct CrossCheck {
    n: usize,
    matches: bool,
    demand_calls: u64,
    curve_len: usize,
    query_bound_holds: bool,
    nested_chain: bool,
}

impl CrossCheck {
    fn passed(&self) -> bool {
        self.matches && self.query_bound_holds
    }
}

impl Report for CrossCheck {
    fn csv_header(&self) -> &'static [&'static str] {
        &["n", "matches", "demand_calls", "curve_len", "query_bound_holds", "nested_chain"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.n.to_string(),
            self.matches.to_string(),
            self.demand_calls.to_string(),
            self.curve_len.to_string(),
            self.query_bound_holds.to_string(),
            self.nested_chain.to_string(),
        ]]
    }
}

fn run_single(command: SingleCommand) -> CliResult<()> {
    match command {
        SingleCommand::Solve { instance, output } => {
            let instance = load_single(&instance)?;
            let oracle = oracle_for(instance.valuation())?;
            let mut stats = OracleStats::default();
            let curve = breakpoints(&instance, oracle.as_ref(), &mut stats)?;
            let optimal = optimal_contract(&curve, instance.valuation());
            emit(&SingleAgentReport::new(&instance, &curve, optimal, stats.demand_calls), &output)
        }
        SingleCommand::Verify { instance, max_n, output } => {
            let instance = load_single(&instance)?;
            if instance.n() > max_n.min(MAX_BRUTEFORCE_CURVE_N) {
                return Err(input_error(format!(
                    "n = {} exceeds --max-n {}",
                    instance.n(),
                    max_n.min(MAX_BRUTEFORCE_CURVE_N)
                )));
            }
            let oracle = oracle_for(instance.valuation())?;
            let mut stats = OracleStats::default();
            let curve = breakpoints(&instance, oracle.as_ref(), &mut stats)?;
            let reference = bruteforce_breakpoints(&instance)?;
            let check = CrossCheck {
                n: instance.n(),
                matches: curve == reference,
                demand_calls: stats.demand_calls,
                curve_len: curve.len(),
                query_bound_holds: stats.demand_calls <= 2 * curve.len() as u64 + 1,
                nested_chain: verify_nested_chain(&curve),
            };
            emit(&check, &output)?;
            if check.passed() {
                Ok(())
            } else {
                Err(Failure::Solver(anyhow::anyhow!("breakpoint enumeration disagrees with exhaustive search")))
            }
        }
    }
}

fn run_multi(command: MultiCommand) -> CliResult<()> {
    match command {
        MultiCommand::Brute { input, max_n, output } => {
            let instance = load_graph_instance(&input)?;
            if instance.n() > max_n {
                return Err(input_error(format!("n = {} exceeds --max-n {max_n}", instance.n())));
            }
            let optimum = bruteforce_optimum(&instance)?;
            emit(&BruteForceReport::new(&instance, &optimum), &output)
        }
        MultiCommand::Ptas { input, epsilon, seed, reps, m, rounding_draws, guess_grid_ratio, output } => {
            let instance = load_graph_instance(&input)?;
            let n = instance.n();
            let config = PtasConfig {
                epsilon,
                reps,
                m: m.unwrap_or_else(|| desk_m(n)),
                rounding_draws,
                seed,
                grid_ratio: guess_grid_ratio,
                size_guesses: None,
                edge_guess_range: None,
            };
            config.validate()?;
            let outcome = ptas_solve(&instance, &config)?;
            emit(&outcome.report, &output)
        }
    }
}

fn run_gen(command: GenCommand) -> CliResult<()> {
    match command {
        GenCommand::KcliqueReduction { base, k, out } => {
            write_generated(&gen_kclique_reduction(load_base(&base)?, k)?, out.as_deref())
        }
        GenCommand::Example1 { n, out } => write_generated(&gen_example1(n)?, out.as_deref()),
        GenCommand::Lsac { base, epsilon, delta, out } => {
            write_generated(&gen_lsac(load_base(&base)?, epsilon, delta)?, out.as_deref())
        }
        GenCommand::Gnp { n, p, seed, cost, out } => write_generated(&gen_gnp(n, p, seed, cost)?, out.as_deref()),
        GenCommand::Planted { n, clique_size, p, seed, cost, out } => {
            write_generated(&gen_planted(n, clique_size, p, seed, cost)?, out.as_deref())
        }
        GenCommand::Turan { n, parts, cost, out } => {
            let instance = GraphInstance::new(turan_graph(n, parts)?, cost)?;
            write_instance(&InstanceFile::from_graph(&instance), out.as_deref())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Single(c) => run_single(c),
        Command::Multi(c) => run_multi(c),
        Command::Gen(c) => run_gen(c),
        Command::VerifyProperties { seed, max_n, cases, output } => {
            let report = run_all(&VerifyConfig { seed, max_n, cases })?;
            if output.out.is_some() || matches!(output.format, FormatArg::Csv) {
                emit(&report, &output)?;
            } else {
                for row in &report.rows {
                    println!(
                        "{} {:<16} {:<60} cases={:<4} violations={}",
                        if row.passed { "PASS" } else { "FAIL" },
                        row.suite,
                        row.property,
                        row.cases,
                        row.violations
                    );
                }
            }
            if report.all_passed {
                Ok(())
            } else {
                Err(Failure::Solver(anyhow::anyhow!("some properties were violated")))
            }
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("CONTRACTLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("CONTRACTLAB_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
