//! Command-line front end over the library: validate instances, run the
//! solvers, verify menus, generate instances, and benchmark directories.
//!
//! Exit codes: 0 on success, 1 on solver error or failed verification,
//! 2 on invalid input.

use clap::{Args, Parser, Subcommand};
use contract_menus::agent::{verify_dsic, verify_dsic_deterministic};
use contract_menus::gen::{
    gen_hardness, no_maximum_fixture, random_instance, Graph, HardnessParams, RandomParams,
};
use contract_menus::io::{
    self, deterministic_menu_to_json, instance_to_json, randomized_menu_to_json, MenuFile,
};
use contract_menus::rational::{format_rational, parse_rational, to_f64, Rational};
use contract_menus::{bench, det, randmenu, Instance};
use num_traits::Zero;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "contract-menus", version, about = "Menus of contracts for Bayesian principal-agent problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file against the model invariants.
    Validate { file: PathBuf },
    /// Compute an optimal or near-optimal menu of deterministic contracts.
    SolveDet(SolveDetArgs),
    /// Compute a near-optimal menu of randomized contracts.
    SolveRand(SolveRandArgs),
    /// Verify that a menu file is DSIC for an instance.
    Verify {
        instance: PathBuf,
        menu: PathBuf,
        /// Slack tolerance (rational), default 0.
        #[arg(long)]
        tol: Option<String>,
    },
    /// Generate an instance.
    Gen(GenArgs),
    /// Run the solvers over a directory of instances and write a report.
    Bench {
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SolveDetArgs {
    file: PathBuf,
    /// two-outcomes | const-types | ptas (default: by instance shape).
    #[arg(long)]
    mode: Option<String>,
    /// Additive loss for the ptas mode (rational in (0,1]).
    #[arg(long)]
    delta: Option<String>,
    /// Where to write the menu (default: alongside the instance).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveRandArgs {
    file: PathBuf,
    /// Distance to the supremum (positive rational).
    #[arg(long)]
    epsilon: String,
    /// Iteration trace CSV: iter,primal,dual,new_columns.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Where to write the menu (default: alongside the instance).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Collapse each type's support to one contract per played action.
    #[arg(long)]
    simplify: bool,
}

#[derive(Args)]
struct GenArgs {
    /// Named fixture: no-maximum.
    #[arg(long)]
    fixture: Option<String>,
    /// Random instance: types, actions, outcomes.
    #[arg(long, num_args = 3, value_names = ["TYPES", "ACTIONS", "OUTCOMES"])]
    random: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    sparsity: f64,
    /// Graph JSON for the independent-set reduction.
    #[arg(long)]
    hardness: Option<PathBuf>,
    /// Promise-problem approximation ratio (rational in (0,1]).
    #[arg(long)]
    alpha: Option<String>,
    /// Maximum vertex degree for the reduction.
    #[arg(long, default_value_t = 2)]
    max_degree: usize,
    /// Trig rounding precision (grid 2^-bits).
    #[arg(long, default_value_t = 40)]
    bits: u32,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the hardness witness menu, when present.
    #[arg(long)]
    witness_out: Option<PathBuf>,
}

const EXIT_SOLVER: u8 = 1;
const EXIT_INVALID: u8 = 2;

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn load_valid_instance(path: &Path) -> Result<Instance, (u8, String)> {
    let raw = io::read_instance(path).map_err(|e| (EXIT_INVALID, e.to_string()))?;
    let report = raw.validate();
    if !report.is_valid() {
        let list = report
            .violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("\n  ");
        return Err((EXIT_INVALID, format!("instance is invalid:\n  {list}")));
    }
    Ok(report.normalized.expect("valid instances normalize"))
}

fn parse_rational_arg(s: &str, what: &str) -> Result<Rational, (u8, String)> {
    parse_rational(s).map_err(|e| (EXIT_INVALID, format!("{what}: {e}")))
}

fn default_out(input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    input.with_file_name(format!("{stem}.{suffix}"))
}

fn write_json(value: &serde_json::Value, out: &Path) -> Result<(), (u8, String)> {
    io::write_menu_value(value, out).map_err(|e| (EXIT_SOLVER, e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => fail(code, msg),
    }
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    match cli.command {
        Command::Validate { file } => {
            let raw = io::read_instance(&file).map_err(|e| (EXIT_INVALID, e.to_string()))?;
            let report = raw.validate();
            if report.is_valid() {
                println!("valid");
                if !report.stripped_types.is_empty() {
                    println!("stripped zero-probability types: {}", report.stripped_types.join(", "));
                }
                if !report.stripped_outcomes.is_empty() {
                    println!("stripped unreachable outcomes: {}", report.stripped_outcomes.join(", "));
                }
                Ok(())
            } else {
                for v in &report.violations {
                    println!("violation: {v}");
                }
                Err((EXIT_INVALID, "instance is invalid".into()))
            }
        }

        Command::SolveDet(args) => {
            let instance = load_valid_instance(&args.file)?;
            let mode = match args.mode.as_deref() {
                Some(m) => m.to_string(),
                None if instance.num_outcomes() == 2 => "two-outcomes".to_string(),
                None => "const-types".to_string(),
            };
            let (menu, value) = match mode.as_str() {
                "two-outcomes" => det::solve_two_outcomes(&instance)
                    .map_err(|e| (EXIT_INVALID, e.to_string()))?,
                "const-types" => det::solve_constant_types(&instance)
                    .map_err(|e| (EXIT_SOLVER, e.to_string()))?,
                "ptas" => {
                    let delta = args
                        .delta
                        .as_deref()
                        .ok_or((EXIT_INVALID, "ptas mode requires --delta".to_string()))?;
                    let delta = parse_rational_arg(delta, "--delta")?;
                    det::ptas_constant_outcomes(&instance, &delta, det::PtasMode::AssignmentEnum)
                        .map_err(|e| (EXIT_SOLVER, e.to_string()))?
                }
                other => return Err((EXIT_INVALID, format!("unknown mode `{other}`"))),
            };
            let out = args.out.unwrap_or_else(|| default_out(&args.file, "menu.json"));
            write_json(&deterministic_menu_to_json(&menu, &instance), &out)?;
            println!("mode = {mode}");
            println!("value = {} ({})", to_f64(&value), format_rational(&value));
            println!("menu written to {}", out.display());
            Ok(())
        }

        Command::SolveRand(args) => {
            let instance = load_valid_instance(&args.file)?;
            let epsilon = parse_rational_arg(&args.epsilon, "--epsilon")?;
            let result = randmenu::solve_randomized(&instance, &epsilon)
                .map_err(|e| (EXIT_SOLVER, e.to_string()))?;
            let menu = if args.simplify {
                randmenu::simplify_menu(&instance, &result.menu)
                    .map_err(|e| (EXIT_SOLVER, e.to_string()))?
            } else {
                result.menu.clone()
            };
            if let Some(trace_path) = &args.trace {
                let mut csv = String::from("iter,primal,dual,new_columns\n");
                for row in &result.trace {
                    csv.push_str(&format!(
                        "{},{},{},{}\n",
                        row.iteration,
                        to_f64(&row.primal),
                        to_f64(&row.dual),
                        row.new_columns
                    ));
                }
                std::fs::write(trace_path, csv)
                    .map_err(|e| (EXIT_SOLVER, format!("cannot write trace: {e}")))?;
            }
            let out = args.out.unwrap_or_else(|| default_out(&args.file, "rand-menu.json"));
            write_json(&randomized_menu_to_json(&menu, &instance), &out)?;
            println!("value = {} ({})", to_f64(&result.value), format_rational(&result.value));
            println!("sup upper bound = {}", to_f64(&result.sup_upper_bound()));
            println!(
                "iterations = {}, converged = {}, max support = {}",
                result.iterations,
                result.converged,
                menu.max_support()
            );
            println!("menu written to {}", out.display());
            if !result.converged {
                return Err((
                    EXIT_SOLVER,
                    format!("iteration cap reached with remaining gap {}", to_f64(&result.remaining_gap)),
                ));
            }
            Ok(())
        }

        Command::Verify { instance, menu, tol } => {
            let inst = load_valid_instance(&instance)?;
            let tol = match tol {
                Some(t) => parse_rational_arg(&t, "--tol")?,
                None => Rational::zero(),
            };
            let report = match io::read_menu(&menu, &inst).map_err(|e| (EXIT_INVALID, e.to_string()))? {
                MenuFile::Deterministic(m) => verify_dsic_deterministic(&inst, &m, &tol),
                MenuFile::Randomized(m) => verify_dsic(&inst, &m, &tol),
            };
            match report.worst_slack() {
                Some(worst) => println!(
                    "worst slack = {} (type {} reporting {})",
                    to_f64(&worst.slack),
                    inst.types()[worst.truthful],
                    inst.types()[worst.reported]
                ),
                None => println!("single-type menu, nothing to verify"),
            }
            if report.is_dsic() {
                println!("DSIC within tolerance {}", to_f64(&tol));
                Ok(())
            } else {
                Err((EXIT_SOLVER, "menu is not DSIC".into()))
            }
        }

        Command::Gen(args) => {
            let (instance, witness) = match (&args.fixture, &args.random, &args.hardness) {
                (Some(name), None, None) => {
                    if name != "no-maximum" {
                        return Err((EXIT_INVALID, format!("unknown fixture `{name}`")));
                    }
                    (no_maximum_fixture(), None)
                }
                (None, Some(dims), None) => {
                    if dims.len() != 3 {
                        return Err((EXIT_INVALID, "--random takes TYPES ACTIONS OUTCOMES".into()));
                    }
                    let params = RandomParams {
                        num_types: dims[0],
                        num_actions: dims[1],
                        num_outcomes: dims[2],
                        seed: args.seed,
                        sparsity: args.sparsity,
                    };
                    (random_instance(&params), None)
                }
                (None, None, Some(graph_path)) => {
                    let text = std::fs::read_to_string(graph_path)
                        .map_err(|e| (EXIT_INVALID, format!("cannot read graph: {e}")))?;
                    let graph = Graph::from_json_str(&text).map_err(|e| (EXIT_INVALID, e.to_string()))?;
                    let alpha = match &args.alpha {
                        Some(a) => parse_rational_arg(a, "--alpha")?,
                        None => return Err((EXIT_INVALID, "--hardness requires --alpha".into())),
                    };
                    let params = HardnessParams {
                        max_degree: args.max_degree,
                        alpha,
                        trig_bits: args.bits,
                    };
                    let out = gen_hardness(&graph, &params).map_err(|e| (EXIT_INVALID, e.to_string()))?;
                    if let Some(bound) = &out.claimed_bound {
                        eprintln!("completeness bound (asymptotic, for large graphs): {}", to_f64(bound));
                    }
                    (out.instance, out.witness)
                }
                _ => {
                    return Err((EXIT_INVALID, "choose exactly one of --fixture, --random, --hardness".into()))
                }
            };

            let json = instance_to_json(&instance);
            match &args.out {
                Some(path) => write_json(&json, path)?,
                None => println!("{}", serde_json::to_string_pretty(&json).unwrap()),
            }
            if let (Some(w), Some(path)) = (witness, &args.witness_out) {
                write_json(&deterministic_menu_to_json(&w, &instance), path)?;
            }
            Ok(())
        }

        Command::Bench { dir, out } => {
            let report = bench::bench_dir(&dir).map_err(|e| (EXIT_INVALID, e.to_string()))?;
            bench::write_report(&report, &out).map_err(|e| (EXIT_SOLVER, e.to_string()))?;
            for row in &report.rows {
                let status = row.error.as_deref().unwrap_or("ok");
                println!("{}: {} ({} ms)", row.instance, status, row.wall_ms);
            }
            println!("report written to {}", out.display());
            Ok(())
        }
    }
}
