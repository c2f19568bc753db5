//! Command-line interface: instance generation, solving, packing
//! verification, and oracle comparison.
//!
//! Exit codes: 0 ok, 1 infeasible packing, 2 input error, 3 bound violation
//! or internal solver failure, 4 infeasible item, 5 oracle budget exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mvbp::generate::{generate, GeneratorParams};
use mvbp::io::{self, InstanceFile, Metadata};
use mvbp::model::{check_packing, validate_instance, Instance};
use mvbp::oracle::{exact_mvbp, OracleBudget, OracleError};
use mvbp::solver::{solve_weighted, solve_weighted_wrapped, SolveReport};
use mvbp::SolveError;

const EXIT_INFEASIBLE_PACKING: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BOUND: u8 = 3;
const EXIT_INFEASIBLE_ITEM: u8 = 4;
const EXIT_BUDGET: u8 = 5;

#[derive(Parser)]
#[command(
    name = "mvbp",
    version,
    about = "Multiple-choice vector bin packing and knapsack solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random instance file.
    Generate(GenerateArgs),
    /// Solve an instance and report the cost bound audit.
    Solve(SolveArgs),
    /// Check a packing file against an instance file.
    Verify(VerifyArgs),
    /// Compare the solver against the exact oracles on a small instance.
    Compare(CompareArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of items.
    #[arg(short = 'n', long, default_value_t = 4)]
    items: usize,
    /// Maximum incarnations per item.
    #[arg(short = 'm', long, default_value_t = 2)]
    max_incarnations: usize,
    #[arg(short = 'D', long, default_value_t = 1)]
    dimension: usize,
    /// Number of bin types (0 for a pure knapsack instance).
    #[arg(short = 'T', long, default_value_t = 1)]
    bin_types: usize,
    #[arg(long, default_value_t = 0.1)]
    size_min: f64,
    #[arg(long, default_value_t = 0.6)]
    size_max: f64,
    #[arg(long, default_value_t = 1.0)]
    weight_min: f64,
    #[arg(long, default_value_t = 1.0)]
    weight_max: f64,
    #[arg(long, default_value_t = 1.0)]
    capacity_min: f64,
    #[arg(long, default_value_t = 1.0)]
    capacity_max: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instance name recorded in the file metadata.
    #[arg(long)]
    name: Option<String>,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Mmk,
    Mvbp,
    MvbpWrapped,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (JSON).
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Mvbp)]
    mode: Mode,
    /// Approximation parameter; defaults to 1.0 for mmk and 0.1 otherwise.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Write the packing (or selection) to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Human-readable table instead of key=value lines.
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance file (JSON).
    instance: PathBuf,
    /// Packing file (JSON).
    packing: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Instance file (JSON); must be within the oracle budget.
    file: PathBuf,
    /// Approximation parameter for the covering LP (default 0.1).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Overrides every oracle search budget with this count.
    #[arg(long)]
    oracle_budget: Option<u64>,
    #[arg(long)]
    pretty: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Failure::new(EXIT_INPUT, message)
    }
}

fn solve_error_failure(e: &SolveError) -> Failure {
    match e {
        SolveError::InfeasibleItem(_) => Failure::new(EXIT_INFEASIBLE_ITEM, e.to_string()),
        _ => Failure::new(EXIT_BOUND, format!("internal solver failure: {e}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => run_generate(&args),
        Command::Solve(args) => run_solve(&args),
        Command::Verify(args) => run_verify(&args),
        Command::Compare(args) => run_compare(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn read_instance(path: &Path) -> Result<InstanceFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let file = io::instance_from_json(&text)
        .map_err(|e| Failure::input(format!("cannot parse {}: {e}", path.display())))?;
    let violations = validate_instance(&file.instance());
    if !violations.is_empty() {
        let mut msg = format!("invalid instance {}:", path.display());
        for v in violations {
            let _ = write!(msg, "\n  {v}");
        }
        return Err(Failure::input(msg));
    }
    Ok(file)
}

fn emit(path: &Option<PathBuf>, contents: &str) -> Result<(), Failure> {
    match path {
        Some(path) => std::fs::write(path, contents)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn run_generate(args: &GenerateArgs) -> Result<(), Failure> {
    let params = GeneratorParams {
        items: args.items,
        max_incarnations: args.max_incarnations,
        dimension: args.dimension,
        bin_types: args.bin_types,
        size_range: (args.size_min, args.size_max),
        weight_range: (args.weight_min, args.weight_max),
        capacity_range: (args.capacity_min, args.capacity_max),
        seed: args.seed,
    };
    let inst = generate(&params).map_err(|e| Failure::input(e.to_string()))?;
    let metadata = Metadata {
        name: args.name.clone(),
        seed: Some(args.seed),
        generator: Some(params),
    };
    let file = InstanceFile::with_metadata(inst, metadata);
    emit(&args.out, &io::instance_to_json(&file))
}

fn fmt_indices(indices: &[usize]) -> String {
    indices
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn print_report(inst: &Instance, report: &SolveReport, mode: Mode, epsilon: f64, pretty: bool) {
    if pretty {
        println!("mode            {}", mode_name(mode));
        println!("items           {}", inst.num_items());
        println!("dimension       {}", inst.dimension);
        println!("bin types       {}", inst.num_bin_types());
        println!("epsilon         {epsilon}");
        println!("opt* (LP bound) {}", report.lp_value);
        println!("cost            {}", report.cost);
        println!("greedy weight   {}", report.greedy_weight);
        println!("residual cost   {}", report.residual_cost);
        println!("bins opened     {}", report.packing.bins.len());
        println!("cost bound      {}", report.bound);
        println!("bound holds     {}", report.bound_ok);
        println!("types used      {}", fmt_indices(&report.chosen_types));
        println!("subset solves   {}", report.subsolves);
        if report.wrapped_fallback {
            println!("note            too many bin types; wrapper fell back to one solve");
        }
    } else {
        println!("mode={}", mode_name(mode));
        println!("n={}", inst.num_items());
        println!("dimension={}", inst.dimension);
        println!("bin_types={}", inst.num_bin_types());
        println!("epsilon={epsilon}");
        println!("opt_star={}", report.lp_value);
        println!("cost={}", report.cost);
        println!("greedy_weight={}", report.greedy_weight);
        println!("residual_cost={}", report.residual_cost);
        println!("bins={}", report.packing.bins.len());
        println!("bound={}", report.bound);
        println!("bound_ok={}", report.bound_ok);
        println!("chosen_types={}", fmt_indices(&report.chosen_types));
        println!("subsolves={}", report.subsolves);
        println!("wrapped_fallback={}", report.wrapped_fallback);
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Mmk => "mmk",
        Mode::Mvbp => "mvbp",
        Mode::MvbpWrapped => "mvbp-wrapped",
    }
}

fn run_solve(args: &SolveArgs) -> Result<(), Failure> {
    let file = read_instance(&args.file)?;
    let inst = file.instance();

    if args.mode == Mode::Mmk {
        let epsilon = args.epsilon.unwrap_or(1.0);
        if epsilon <= 0.0 {
            return Err(Failure::input("epsilon must be positive"));
        }
        if !inst.bin_types.is_empty() {
            println!("warning=bin types ignored; solving against the unit knapsack");
        }
        let selection = mvbp::mmk::solve_mmk(inst.dimension, &inst.items, epsilon);
        if args.pretty {
            println!("mode            mmk");
            println!("items           {}", inst.num_items());
            println!("dimension       {}", inst.dimension);
            println!("epsilon         {epsilon}");
            println!("value           {}", selection.value);
            println!("chosen          {}", selection.chosen.len());
        } else {
            println!("mode=mmk");
            println!("n={}", inst.num_items());
            println!("dimension={}", inst.dimension);
            println!("epsilon={epsilon}");
            println!("value={}", selection.value);
            println!("chosen={}", selection.chosen.len());
        }
        if let Some(out) = &args.out {
            emit(&Some(out.clone()), &io::selection_to_json(&selection))?;
        }
        return Ok(());
    }

    if inst.bin_types.is_empty() {
        return Err(Failure::input("instance has no bin types; use --mode mmk"));
    }
    let epsilon = args.epsilon.unwrap_or(0.1);
    if epsilon <= 0.0 {
        return Err(Failure::input("epsilon must be positive"));
    }
    let report = match args.mode {
        Mode::Mvbp => solve_weighted(&inst, epsilon),
        Mode::MvbpWrapped => solve_weighted_wrapped(&inst, epsilon),
        Mode::Mmk => unreachable!(),
    }
    .map_err(|e| solve_error_failure(&e))?;

    print_report(&inst, &report, args.mode, epsilon, args.pretty);
    if let Some(out) = &args.out {
        emit(&Some(out.clone()), &io::packing_to_json(&report.packing))?;
    }
    if !report.bound_ok {
        return Err(Failure::new(EXIT_BOUND, "cost bound violated (solver bug)"));
    }
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let file = read_instance(&args.instance)?;
    let inst = file.instance();
    let text = std::fs::read_to_string(&args.packing)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", args.packing.display())))?;
    let packing = io::packing_from_json(&text)
        .map_err(|e| Failure::input(format!("cannot parse {}: {e}", args.packing.display())))?;

    let check = check_packing(&inst, &packing);
    if check.is_feasible() {
        println!("feasible");
        Ok(())
    } else {
        for v in &check.violations {
            println!("{v}");
        }
        Err(Failure::new(
            EXIT_INFEASIBLE_PACKING,
            "packing is infeasible",
        ))
    }
}

fn run_compare(args: &CompareArgs) -> Result<(), Failure> {
    let file = read_instance(&args.file)?;
    let inst = file.instance();
    if inst.bin_types.is_empty() {
        return Err(Failure::input("comparison needs at least one bin type"));
    }
    let epsilon = args.epsilon.unwrap_or(0.1);
    if epsilon <= 0.0 {
        return Err(Failure::input("epsilon must be positive"));
    }
    let budget = match args.oracle_budget {
        Some(v) => OracleBudget {
            max_mmk_choices: v as u128,
            max_mvbp_nodes: v,
            max_lp_columns: v.min(usize::MAX as u64) as usize,
            time_limit: None,
        },
        None => OracleBudget::default(),
    };

    let (_, oracle_opt) = exact_mvbp(&inst, &budget).map_err(|e| match e {
        OracleError::BudgetExceeded => Failure::new(EXIT_BUDGET, e.to_string()),
        OracleError::Infeasible => Failure::new(EXIT_INFEASIBLE_ITEM, e.to_string()),
    })?;
    let lp_value = mvbp::oracle::exact_cover_lp(&inst, &budget).map_err(|e| match e {
        OracleError::BudgetExceeded => Failure::new(EXIT_BUDGET, e.to_string()),
        OracleError::Infeasible => Failure::new(EXIT_INFEASIBLE_ITEM, e.to_string()),
    })?;
    let report = solve_weighted_wrapped(&inst, epsilon).map_err(|e| solve_error_failure(&e))?;

    // 0/0 is a clean solve of an empty instance.
    let ratio = if oracle_opt > 0.0 {
        report.cost / oracle_opt
    } else if report.cost <= 1e-12 {
        1.0
    } else {
        f64::INFINITY
    };
    let ceiling = (2.0 * inst.dimension as f64).ln() + 3.0;
    let ratio_ok = ratio <= ceiling + 1e-9;

    if args.pretty {
        println!("oracle optimum  {oracle_opt}");
        println!("LP relaxation   {lp_value}");
        println!("solver cost     {}", report.cost);
        println!("ratio           {ratio}");
        println!("ceiling         {ceiling}");
        println!("within ceiling  {ratio_ok}");
    } else {
        println!("oracle_opt={oracle_opt}");
        println!("lp_value={lp_value}");
        println!("cost={}", report.cost);
        println!("ratio={ratio}");
        println!("ceiling={ceiling}");
        println!("ratio_ok={ratio_ok}");
    }
    if !ratio_ok {
        return Err(Failure::new(
            EXIT_BOUND,
            "empirical ratio exceeds the proved ceiling",
        ));
    }
    Ok(())
}
