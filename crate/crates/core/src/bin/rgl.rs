use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rgl::agents::{compute_sample_budget, confidence_radius, etcg_budget};
use rgl::env::{
    check_monotone, check_submodular_in_expectation, CHECK_TOLERANCE, ENUMERATION_LIMIT,
};
use rgl::runner::{resolve_oracle, run_experiment, ExperimentConfig, RunOptions};
use rgl::Error;

#[derive(Parser)]
#[command(
    name = "rgl",
    version,
    about = "Randomized greedy learning for stochastic submodular bandits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every (agent, horizon, repetition) of a config and write CSVs.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory (overrides output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run on one thread.
        #[arg(long)]
        serial: bool,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the exact maximizer and a submodularity/monotonicity report.
    Oracle {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Print the RGL sample budget m and confidence radius for a horizon.
    Budget {
        #[arg(long)]
        horizon: u64,
        /// Ground set size; adds the exploration length 4nm.
        #[arg(long)]
        arms: Option<usize>,
        /// R-ETCG cardinality budget; requires --arms.
        #[arg(long, requires = "arms")]
        k: Option<usize>,
    },
    /// Check a config and its environment without running anything.
    Validate {
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Use the config's [smoke] scale.
    #[arg(long)]
    smoke: bool,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let mut config = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if self.smoke {
            config.apply_smoke()?;
        }
        Ok(config)
    }
}

/// Load-phase failures exit with 1, failures while running with 2.
enum Failure {
    Config(Error),
    Runtime(Error),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run {
            config,
            out,
            serial,
            threads,
        } => {
            let config = config.load().map_err(Failure::Config)?;
            config.build_environment().map_err(Failure::Config)?;
            let out = out.unwrap_or_else(|| config.resolve(&config.output_dir));
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| Failure::Config(Error::InvalidArgument(e.to_string())))?;
            }
            let options = RunOptions {
                parallel: !serial,
                ..RunOptions::default()
            };
            let output = run_experiment(&config, &options).map_err(Failure::Runtime)?;
            output.write(&out).map_err(Failure::Runtime)?;
            print_aggregates(&output);
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Oracle { config } => {
            let config = config.load().map_err(Failure::Config)?;
            let env = config.build_environment().map_err(Failure::Config)?;
            let mut warnings = Vec::new();
            let opt = resolve_oracle(env.as_ref(), config.oracle_mc_samples, &mut warnings)
                .map_err(Failure::Runtime)?;
            for w in &warnings {
                println!("warning: {w}");
            }
            let ground = env.ground();
            let ties: Vec<String> = opt.ties.iter().map(|s| s.to_string()).collect();
            println!("arms: {}", ground.len());
            println!("opt_set: {} (mask {})", opt.opt_set, opt.opt_set.mask());
            println!("opt_value: {}", opt.opt_value);
            println!("exact: {}", opt.exact);
            println!("ties: {}", ties.join(" "));
            report_structure(env.as_ref()).map_err(Failure::Runtime)
        }
        Command::Budget { horizon, arms, k } => {
            let m = compute_sample_budget(horizon).map_err(Failure::Config)?;
            println!("T: {horizon}");
            println!("m: {m}");
            println!("rad: {}", confidence_radius(horizon, m));
            if let Some(n) = arms {
                let explore = 4 * n as u64 * m;
                let note = if explore > horizon {
                    " (exceeds T)"
                } else {
                    ""
                };
                println!("explore_steps: {explore}{note}");
            }
            if let (Some(n), Some(k)) = (arms, k) {
                if k > n {
                    return Err(Failure::Config(Error::InvalidArgument(format!(
                        "k={k} exceeds n={n}"
                    ))));
                }
                if k == 0 {
                    println!("etcg_m: none (k = 0 exploits the empty set)");
                } else {
                    println!(
                        "etcg_m: {}",
                        etcg_budget(horizon, n, k).map_err(Failure::Config)?
                    );
                }
            }
            Ok(())
        }
        Command::Validate { config } => {
            let path = config.config.clone();
            let config = config.load().map_err(Failure::Config)?;
            let env = config.build_environment().map_err(Failure::Config)?;
            let runs = config.agents.len() * config.horizons.len() * config.repetitions as usize;
            println!("{}: ok", path.display());
            println!("experiment: {}", config.experiment_id);
            println!("arms: {}", env.ground().len());
            println!("runs: {runs}");
            Ok(())
        }
    }
}

fn report_structure(env: &dyn rgl::Environment) -> Result<(), Error> {
    let n = env.ground().len();
    if n > ENUMERATION_LIMIT {
        println!("submodular: not checked ({n} arms exceeds {ENUMERATION_LIMIT})");
        return Ok(());
    }
    match check_submodular_in_expectation(env, CHECK_TOLERANCE) {
        Ok(v) if v.is_empty() => println!("submodular: yes"),
        Ok(v) => {
            let w = &v[0];
            println!(
                "submodular: no ({} violations; e.g. A={} B={} x={} gains {} < {})",
                v.len(),
                w.a,
                w.b,
                w.x + 1,
                w.gain_a,
                w.gain_b
            );
        }
        Err(Error::ApproximateOnly) => println!("submodular: not checked (no exact expectations)"),
        Err(e) => return Err(e),
    }
    match check_monotone(env, CHECK_TOLERANCE) {
        Ok(v) if v.is_empty() => println!("monotone: yes"),
        Ok(v) => {
            let w = &v[0];
            println!(
                "monotone: no ({} violations; e.g. f({}) = {} > f({}) = {})",
                v.len(),
                w.a,
                w.value_a,
                w.b,
                w.value_b
            );
        }
        Err(Error::ApproximateOnly) => println!("monotone: not checked (no exact expectations)"),
        Err(e) => return Err(e),
    }
    Ok(())
}

fn print_aggregates(output: &rgl::runner::ExperimentOutput) {
    println!(
        "{:<12} {:>9} {:>5} {:>16} {:>16}  committed",
        "agent", "T", "reps", "regret(E)", "regret(S)"
    );
    for a in &output.manifest.aggregates {
        let committed: Vec<String> = a
            .committed_sets
            .iter()
            .map(|(s, c)| format!("{s}x{c}"))
            .collect();
        println!(
            "{:<12} {:>9} {:>5} {:>16.3} {:>16.3}  {}",
            a.agent.name(),
            a.horizon,
            a.repetitions,
            a.mean_regret_full_expected,
            a.mean_regret_full_sampled,
            committed.join(" ")
        );
    }
    for w in &output.manifest.warnings {
        println!("warning: {w}");
    }
}
