use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use cascade_core::bench::{self, BenchRecord};
use cascade_core::generators;
use cascade_core::machines::{parse_machine, serialize_machine, serialize_mealy, serialize_om, Machine};
use cascade_core::minimization::{minimize_tail, minimize_tail_naive, SolveOptions, DEFAULT_STATE_CAP};
use cascade_core::sat::{ExternalSolver, Solver};
use cascade_core::synthesis::{feasible, minimal_solution, some_solution};
use cascade_core::{MealyMachine, ObservationMachine};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cascade", version, about = "Minimize and synthesize tail machines of Mealy cascades")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smallest tail with the same cascade behaviour
    Minimize(MinimizeArgs),
    /// Decide whether some tail makes the cascade equal the model
    Feasible {
        #[arg(long)]
        head: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
    /// Build a tail solving the cascade equation
    Synthesize(SynthesizeArgs),
    /// Write generated instances
    #[command(subcommand)]
    Generate(Generate),
    /// Benchmark harness producing CSV
    #[command(subcommand)]
    Bench(Bench),
}

#[derive(Args)]
struct SolverArgs {
    /// External SAT solver; defaults to $CASCADE_SAT_SOLVER, else built-in
    #[arg(long)]
    solver: Option<PathBuf>,
}

impl SolverArgs {
    fn solver(&self) -> Solver {
        match &self.solver {
            Some(path) => Solver::External(ExternalSolver::new(path)),
            None => Solver::from_env(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Proposed,
    Naive,
}

#[derive(Args)]
struct MinimizeArgs {
    #[arg(long)]
    head: PathBuf,
    #[arg(long)]
    tail: PathBuf,
    #[arg(short = 'o')]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "proposed")]
    method: MethodArg,
    /// Wall-clock budget in seconds
    #[arg(long)]
    timeout: Option<f64>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Directory receiving every attempted CNF in DIMACS form
    #[arg(long)]
    emit_cnf: Option<PathBuf>,
}

#[derive(Args)]
struct SynthesizeArgs {
    #[arg(long)]
    head: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(short = 'o')]
    output: PathBuf,
    /// Search for a solution with the fewest states
    #[arg(long)]
    minimal: bool,
    /// Largest subset construction allowed
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    cap: usize,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Subcommand)]
enum Generate {
    /// Uniformly random complete machine
    Random {
        #[arg(long)]
        states: usize,
        #[arg(long = "in")]
        inputs: usize,
        #[arg(long = "out")]
        outputs: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Observation machine whose implementations need 2^n states
    ExpFamily {
        #[arg(long)]
        n: usize,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Cascade whose minimal replacement size equals the implementation size of an IS machine
    NpReduction {
        #[arg(long)]
        om: PathBuf,
        #[arg(long = "o-head")]
        head: PathBuf,
        #[arg(long = "o-tail")]
        tail: PathBuf,
    },
    /// Head and model whose solutions implement an observation machine
    Split {
        #[arg(long)]
        om: PathBuf,
        #[arg(long = "o-head")]
        head: PathBuf,
        #[arg(long = "o-model")]
        model: PathBuf,
    },
}

#[derive(Subcommand)]
enum Bench {
    /// Proposed and naive methods on random cascades
    Compare {
        #[arg(long, value_delimiter = ',', default_value = "4,8,12,16")]
        sizes: Vec<usize>,
        /// Inclusive range `a..b` or comma-separated list
        #[arg(long, default_value = "0..9")]
        seeds: String,
        #[arg(long, default_value_t = 4)]
        alpha: usize,
        /// Seconds per run
        #[arg(long, default_value_t = 600.0)]
        timeout: f64,
        #[arg(short = 'o')]
        output: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Proposed method on cascades of random sizes
    Bimodal {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 12)]
        min: usize,
        #[arg(long, default_value_t = 60)]
        max: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        alpha: usize,
        /// Seconds per run
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(short = 'o')]
        output: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

fn read(path: &Path) -> Result<Machine> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_machine(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_mealy(path: &Path) -> Result<MealyMachine> {
    match read(path)? {
        Machine::Mealy(m) => Ok(m),
        other => bail!("{}: expected a mealy machine, found {}", path.display(), other.kind()),
    }
}

fn read_om(path: &Path) -> Result<ObservationMachine> {
    match read(path)? {
        Machine::Om(m) => Ok(m),
        Machine::Mealy(m) => Ok(ObservationMachine::from_mealy(&m)),
        Machine::Nfa(_) => bail!("{}: expected an observation machine, found nfa", path.display()),
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn seconds(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).with_context(|| format!("invalid timeout {s}"))
}

fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().context("seed range start")?;
        let b: u64 = b.trim().parse().context("seed range end")?;
        if a > b {
            bail!("empty seed range {text}");
        }
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().with_context(|| format!("invalid seed `{s}`")))
        .collect()
}

fn write_rows(path: &Path, rows: &[BenchRecord]) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    bench::write_csv(rows, file)?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Minimize(args) => {
            let h = read_mealy(&args.head)?;
            let t = read_mealy(&args.tail)?;
            let opts = SolveOptions {
                solver: args.solver.solver(),
                deadline: args.timeout.map(seconds).transpose()?.map(|d| Instant::now() + d),
                emit_cnf: args.emit_cnf,
                ..SolveOptions::default()
            };
            let found = match args.method {
                MethodArg::Proposed => minimize_tail(&h, &t, &opts)?,
                MethodArg::Naive => minimize_tail_naive(&h, &t, &opts)?,
            };
            eprintln!(
                "{} -> {} states ({} SAT calls{})",
                t.num_states(),
                found.machine.num_states(),
                found.sat_calls,
                if found.skipped_encoding { ", encoding skipped" } else { "" }
            );
            write(&args.output, &serialize_mealy(&found.machine))?;
        }
        Command::Feasible { head, model } => {
            let h = read_mealy(&head)?;
            let m = read_mealy(&model)?;
            let verdict = feasible(&h, &m)?;
            match verdict.witness {
                None => println!("feasible"),
                Some((w1, w2)) => {
                    println!("infeasible");
                    println!("{}", h.inputs().render(&w1));
                    println!("{}", h.inputs().render(&w2));
                    return Ok(ExitCode::from(2));
                }
            }
        }
        Command::Synthesize(args) => {
            let h = read_mealy(&args.head)?;
            let m = read_mealy(&args.model)?;
            let t = if args.minimal {
                let opts = SolveOptions {
                    solver: args.solver.solver(),
                    state_cap: args.cap,
                    ..SolveOptions::default()
                };
                minimal_solution(&h, &m, &opts)?.machine
            } else {
                some_solution(&h, &m, args.cap)?
            };
            write(&args.output, &serialize_mealy(&t))?;
        }
        Command::Generate(g) => match g {
            Generate::Random {
                states,
                inputs,
                outputs,
                seed,
                output,
            } => {
                if states == 0 || inputs == 0 || outputs == 0 {
                    bail!("sizes must be positive");
                }
                write(&output, &serialize_mealy(&generators::random_mealy(states, inputs, outputs, seed)))?;
            }
            Generate::ExpFamily { n, output } => {
                if n == 0 {
                    bail!("--n must be positive");
                }
                write(&output, &serialize_om(&generators::exp_family(n)))?;
            }
            Generate::NpReduction { om, head, tail } => {
                let (h, t) = generators::np_reduction(&read_om(&om)?)?;
                write(&head, &serialize_machine(&Machine::Mealy(h)))?;
                write(&tail, &serialize_machine(&Machine::Mealy(t)))?;
            }
            Generate::Split { om, head, model } => {
                let (h, m) = generators::split_om(&read_om(&om)?)?;
                write(&head, &serialize_mealy(&h))?;
                write(&model, &serialize_mealy(&m))?;
            }
        },
        Command::Bench(b) => match b {
            Bench::Compare {
                sizes,
                seeds,
                alpha,
                timeout,
                output,
                solver,
            } => {
                let opts = SolveOptions {
                    solver: solver.solver(),
                    ..SolveOptions::default()
                };
                let rows = bench::bench_compare(&sizes, &parse_seeds(&seeds)?, alpha, seconds(timeout)?, &opts)?;
                write_rows(&output, &rows)?;
            }
            Bench::Bimodal {
                count,
                min,
                max,
                seed,
                alpha,
                timeout,
                output,
                solver,
            } => {
                if min == 0 || min > max {
                    bail!("invalid size range {min}..{max}");
                }
                let opts = SolveOptions {
                    solver: solver.solver(),
                    ..SolveOptions::default()
                };
                let timeout = timeout.map(seconds).transpose()?;
                let rows = bench::bench_bimodal(count, min, max, seed, alpha, timeout, &opts)?;
                write_rows(&output, &rows)?;
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

/// `-o-head` style flags are accepted as written; clap only knows them
/// with a double dash.
fn normalize_args(args: impl Iterator<Item = String>) -> Vec<String> {
    args.map(|a| match a.as_str() {
        "-o-head" | "-o-tail" | "-o-model" => format!("-{a}"),
        _ => a,
    })
    .collect()
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse_from(normalize_args(std::env::args()));
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
