use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bagsched::harness::{
    emit_report, generate_instance, instance_to_json, run_experiment, suite_run, ExperimentConfig, Format,
    GeneratorSpec, InstanceSource, Solver,
};
use bagsched::{Budget, Epsilon, Error, Objective};

#[derive(Parser)]
#[command(name = "bagsched", version, about = "Bagging jobs for a stochastic number of machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print a report.
    Solve {
        #[arg(long)]
        objective: Objective,
        #[arg(long, default_value = "1/4")]
        epsilon: Epsilon,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "ptas")]
        solver: Solver,
        /// Also compute the exact optimum and the ratio.
        #[arg(long)]
        with_oracle: bool,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: Format,
    },
    /// Generate an instance, e.g. `uniform-int:n=5,pmax=9,M=3`.
    Gen {
        #[arg(long)]
        spec: GeneratorSpec,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run an acceptance suite.
    Suite { name: String },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation { .. } | Error::Domain(_) => 2,
        Error::Capacity { .. } | Error::NeedsOuterDp { .. } => 3,
        Error::Internal(_) => 1,
    }
}

fn write_out(output: Option<&PathBuf>, bytes: &[u8]) -> Result<(), Error> {
    match output {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| Error::validation("output", format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| Error::validation("output", e.to_string()))
        }
    }
}

fn run(cli: Cli, budget: Budget) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Solve {
            objective,
            epsilon,
            input,
            solver,
            with_oracle,
            output,
            format,
        } => {
            let mut config = ExperimentConfig::new(objective, epsilon, InstanceSource::File(input));
            config.solver = solver;
            config.with_oracle = with_oracle;
            config.budget = budget;
            config.format = format;
            let report = run_experiment(&config)?;
            for (stage, elapsed) in &report.timings {
                eprintln!("{stage}: {:.3}s", elapsed.as_secs_f64());
            }
            write_out(output.as_ref(), &emit_report(&report, format))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { spec, seed, output } => {
            let instance = generate_instance(&spec, seed)?;
            let mut text = instance_to_json(&instance);
            text.push('\n');
            write_out(output.as_ref(), text.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Suite { name } => {
            let results = suite_run(&name, &budget)?;
            for r in &results {
                println!("{r}");
            }
            Ok(if results.iter().all(|r| r.passed()) { ExitCode::SUCCESS } else { ExitCode::from(4) })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Budget::from_env().and_then(|budget| run(cli, budget));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
