//! Command-line front end: solve an inclusion game, play the extracted
//! strategy, cross-check the two interpretations, or run the enumerative
//! reference oracles.
//!
//! Exit codes: 0 success, 2 unreadable or malformed input, 3 a configured
//! budget was exhausted before an answer was reached, 4 an internal
//! consistency check failed (these indicate a bug, not bad input).

use std::path::PathBuf;
use std::process::exit;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hoig_core::domain::{ModelKind, DEFAULT_DOMAIN_CAP};
use hoig_core::scheme::{Instance, Owner};
use hoig_core::solver::{check_transfer, Solver, SolverError, DEFAULT_MAX_ITERS};
use hoig_core::strategy::{
    oracle_attractor, oracle_bounded_a_win, play_random, simulate_exhaustive, OracleOutcome,
    StrategyError,
};

const EXIT_INPUT: i32 = 2;
const EXIT_BUDGET: i32 = 3;
const EXIT_INVARIANT: i32 = 4;

#[derive(Parser)]
#[command(name = "hoig", version, about = "Inclusion-game solver for word-generating recursion schemes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide the winner and report the solution formulas.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Interpretation to solve under.
        #[arg(long, value_enum, default_value_t = ModelArg::Optimized)]
        model: ModelArg,
    },
    /// Play one game: the extracted strategy answers for E, a seeded random
    /// adversary for A.
    Play {
        #[command(flatten)]
        common: Common,
        /// Stop after this many rewrite steps.
        #[arg(long, default_value_t = 64)]
        depth: usize,
        /// Adversary seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Check every adversary line of play instead of one random one.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Solve under both interpretations and check that translating the
    /// abstract solution yields the optimized one.
    CheckTransfer {
        #[command(flatten)]
        common: Common,
        /// Random function-argument samples per order-1 position.
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Sampling seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cross-check the solver against enumerative game search.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Maximum game positions the attractor construction may intern.
        #[arg(long, default_value_t = 100_000)]
        state_budget: usize,
        /// Rewrite depth for the bounded confirmation search.
        #[arg(long, default_value_t = 30)]
        depth: usize,
    },
}

#[derive(Args)]
struct Common {
    /// Scheme file.
    scheme: PathBuf,
    /// Automaton file.
    nfa: PathBuf,
    /// Refuse value domains larger than this.
    #[arg(long, default_value_t = DEFAULT_DOMAIN_CAP)]
    domain_cap: usize,
    /// Refuse fixpoint computations longer than this.
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
    /// Emit machine-readable JSON on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Optimized,
    Abstract,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> ModelKind {
        match m {
            ModelArg::Optimized => ModelKind::Optimized,
            ModelArg::Abstract => ModelKind::Abstract,
        }
    }
}

fn main() {
    // Die quietly when a downstream pipe closes, like any other filter.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Solve { common, model } => run_solve(&common, model.into()),
        Cmd::Play {
            common,
            depth,
            seed,
            exhaustive,
        } => run_play(&common, depth, seed, exhaustive),
        Cmd::CheckTransfer {
            common,
            samples,
            seed,
        } => run_check_transfer(&common, samples, seed),
        Cmd::Oracle {
            common,
            state_budget,
            depth,
        } => run_oracle(&common, state_budget, depth),
    }
}

fn load(common: &Common) -> Instance {
    let read = |path: &PathBuf| match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            exit(EXIT_INPUT);
        }
    };
    let scheme_text = read(&common.scheme);
    let nfa_text = read(&common.nfa);
    match Instance::parse(&scheme_text, &nfa_text) {
        Ok(inst) => inst,
        Err(e) => {
            eprintln!("error: {e}");
            exit(EXIT_INPUT);
        }
    }
}

fn solver_failure(e: SolverError) -> ! {
    eprintln!("error: {e}");
    exit(EXIT_BUDGET);
}

fn strategy_failure(e: StrategyError) -> ! {
    match e {
        StrategyError::Solver(e) => solver_failure(e),
        StrategyError::Refuted { ref trace, .. }
        | StrategyError::NoSatisfyingChoice { ref trace, .. } => {
            eprintln!("error: {e}");
            for line in trace {
                eprintln!("  {line}");
            }
            exit(EXIT_INVARIANT);
        }
    }
}

fn emit_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serialization"));
}

fn run_solve(common: &Common, model: ModelKind) {
    let inst = load(common);
    let mut solver = Solver::new(&inst, model, common.domain_cap, common.max_iters);
    let started = Instant::now();
    let report = solver.solve().unwrap_or_else(|e| solver_failure(e));
    let elapsed_ms = started.elapsed().as_millis();

    #[derive(Serialize)]
    struct SolveOut<'a> {
        command: &'static str,
        elapsed_ms: u128,
        report: &'a hoig_core::solver::SolveReport,
    }
    if common.json {
        emit_json(&SolveOut {
            command: "solve",
            elapsed_ms,
            report: &report,
        });
        return;
    }
    println!("model: {}", report.model);
    println!("winner: {}", report.winner);
    println!("start: {}", report.start_formula);
    println!(
        "iterations: {} ({})",
        report.iterations,
        if report.stable { "stable" } else { "not stable" }
    );
    println!("support: {} fixpoint variables", report.support);
    for d in &report.domains {
        println!("domain {}: {} elements", d.kind, d.size);
    }
    for nt in &report.nonterminals {
        let tail = match &nt.formula {
            Some(f) => format!("  solution {f}"),
            None => String::new(),
        };
        println!(
            "{} : {}  owner {}  rules {}{tail}",
            nt.name, nt.kind, nt.owner, nt.rules
        );
    }
}

fn run_play(common: &Common, depth: usize, seed: u64, exhaustive: bool) {
    let inst = load(common);
    let mut solver = Solver::new(&inst, ModelKind::Optimized, common.domain_cap, common.max_iters);
    let started = Instant::now();
    let winner = solver.winner().unwrap_or_else(|e| solver_failure(e));

    #[derive(Serialize)]
    struct PlayOut<'a> {
        command: &'static str,
        elapsed_ms: u128,
        winner: Owner,
        trace: Option<&'a hoig_core::strategy::PlayTrace>,
        exhaustive: Option<&'a hoig_core::strategy::ExhaustiveReport>,
    }

    if winner == Owner::A {
        let elapsed_ms = started.elapsed().as_millis();
        if common.json {
            emit_json(&PlayOut {
                command: "play",
                elapsed_ms,
                winner,
                trace: None,
                exhaustive: None,
            });
        } else {
            println!("winner: A");
            println!("no winning strategy for E to play");
        }
        return;
    }

    if exhaustive {
        let report = simulate_exhaustive(&mut solver, depth).unwrap_or_else(|e| strategy_failure(e));
        let elapsed_ms = started.elapsed().as_millis();
        if common.json {
            emit_json(&PlayOut {
                command: "play",
                elapsed_ms,
                winner,
                trace: None,
                exhaustive: Some(&report),
            });
        } else {
            println!("winner: E");
            println!("positions visited: {}", report.nodes);
            println!("plays completed: {}", report.completed);
            println!("deepest rewrite: {}", report.deepest);
            println!("outcome: every adversary line satisfies the invariant");
        }
        return;
    }

    let trace = play_random(&mut solver, depth, seed).unwrap_or_else(|e| strategy_failure(e));
    let elapsed_ms = started.elapsed().as_millis();
    if common.json {
        emit_json(&PlayOut {
            command: "play",
            elapsed_ms,
            winner,
            trace: Some(&trace),
            exhaustive: None,
        });
        return;
    }
    println!("winner: E");
    for (i, step) in trace.steps.iter().enumerate() {
        println!(
            "step {}: {} {} rule {} | {} | {}",
            i + 1,
            step.owner,
            step.nonterminal,
            step.rule,
            if step.prefix.is_empty() { "(empty)" } else { &step.prefix },
            step.formula
        );
    }
    if let Some(word) = &trace.word {
        println!("word: {}", if word.is_empty() { "(empty)" } else { word });
    }
    println!("outcome: {}", trace.outcome);
}

fn run_check_transfer(common: &Common, samples: usize, seed: u64) {
    let inst = load(common);
    let started = Instant::now();
    let report = check_transfer(&inst, common.domain_cap, common.max_iters, samples, seed)
        .unwrap_or_else(|e| solver_failure(e));
    let elapsed_ms = started.elapsed().as_millis();
    let exact = report.exact();

    #[derive(Serialize)]
    struct TransferOut<'a> {
        command: &'static str,
        elapsed_ms: u128,
        exact: bool,
        report: &'a hoig_core::solver::TransferReport,
    }
    if common.json {
        emit_json(&TransferOut {
            command: "check-transfer",
            elapsed_ms,
            exact,
            report: &report,
        });
    } else {
        println!("nonterminals checked: {}", report.nonterminals_checked);
        println!("ground points: {}", report.ground_points);
        println!("function points: {}", report.function_points);
        println!("image matches: {}", report.image_matches);
        for m in &report.mismatches {
            println!("mismatch: {m}");
        }
        for s in &report.skipped {
            println!("skipped: {s}");
        }
        println!("transfer: {}", if exact { "exact" } else { "broken" });
    }
    if !exact {
        exit(EXIT_INVARIANT);
    }
}

fn run_oracle(common: &Common, state_budget: usize, depth: usize) {
    let inst = load(common);
    let mut solver = Solver::new(&inst, ModelKind::Optimized, common.domain_cap, common.max_iters);
    let started = Instant::now();
    let winner = solver.winner().unwrap_or_else(|e| solver_failure(e));
    let attractor = oracle_attractor(&inst, state_budget);
    let (bounded_a_win, agreement) = match attractor {
        OracleOutcome::EWins => (None, Some(winner == Owner::E)),
        OracleOutcome::AWins => (None, Some(winner == Owner::A)),
        OracleOutcome::Unknown { .. } if winner == Owner::A => {
            let confirmed = oracle_bounded_a_win(&inst, depth);
            (Some(confirmed), confirmed.then_some(true))
        }
        OracleOutcome::Unknown { .. } => (None, None),
    };
    let elapsed_ms = started.elapsed().as_millis();

    #[derive(Serialize)]
    struct OracleOut {
        command: &'static str,
        elapsed_ms: u128,
        solver_winner: Owner,
        attractor: &'static str,
        explored: Option<usize>,
        bounded_a_win: Option<bool>,
        agreement: Option<bool>,
    }
    let (att_name, explored) = match attractor {
        OracleOutcome::EWins => ("e_wins", None),
        OracleOutcome::AWins => ("a_wins", None),
        OracleOutcome::Unknown { explored } => ("unknown", Some(explored)),
    };
    if common.json {
        emit_json(&OracleOut {
            command: "oracle",
            elapsed_ms,
            solver_winner: winner,
            attractor: att_name,
            explored,
            bounded_a_win,
            agreement,
        });
    } else {
        println!("solver winner: {winner}");
        match attractor {
            OracleOutcome::EWins => println!("attractor: E wins"),
            OracleOutcome::AWins => println!("attractor: A wins"),
            OracleOutcome::Unknown { explored } => {
                println!("attractor: unknown after {explored} positions")
            }
        }
        if let Some(confirmed) = bounded_a_win {
            println!(
                "bounded search: {}",
                if confirmed {
                    "confirms A wins"
                } else {
                    "no refutation found"
                }
            );
        }
        match agreement {
            Some(true) => println!("agreement: yes"),
            Some(false) => println!("agreement: NO"),
            None => println!("agreement: unresolved"),
        }
    }
    match agreement {
        Some(true) => {}
        Some(false) => exit(EXIT_INVARIANT),
        None => exit(EXIT_BUDGET),
    }
}
