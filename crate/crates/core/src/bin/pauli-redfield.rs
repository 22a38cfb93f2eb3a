// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pauli_redfield::generator::{Blocking, Dephasing};
use pauli_redfield::scenarios::{self, Scenario, VerifyOptions};
use pauli_redfield::{Error, Result};

/// Pauli-blocked secular Redfield dynamics of tight-binding chains.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one scenario and write its output bundle.
    Run {
        /// Built-in scenario name or path to a TOML file.
        #[arg(long)]
        scenario: String,
        /// Output directory (default: run.out from the scenario, else out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace the hole factors by the identity.
        #[arg(long)]
        no_blocking: bool,
        /// Let the dissipator act on populations only.
        #[arg(long)]
        no_dephasing: bool,
        /// Override run.t_max (au).
        #[arg(long)]
        tmax: Option<f64>,
        /// Override integrator.rtol.
        #[arg(long)]
        rtol: Option<f64>,
    },
    /// Print the built-in scenario names.
    ListScenarios,
    /// Print a scenario as TOML, suitable as a starting point for a file.
    ShowScenario { scenario: String },
    /// Run the property suites; exits with 4 if any fails.
    Verify {
        /// Largest Fock-space size for the double-commutator suite.
        #[arg(long, default_value_t = 4)]
        modes: usize,
        /// Random index tuples per state.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Random correlated states per mode count.
        #[arg(long, default_value_t = 20)]
        states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Swap in a generator with a flipped dissipator sign (negative control).
        #[arg(long)]
        inject_sign_error: bool,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a parameter grid, several runs at a time.
    Sweep {
        #[arg(long)]
        scenario: String,
        /// key=v1,v2,... with a dotted key into the scenario file; repeatable.
        #[arg(long = "param", required = true)]
        params: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Concurrent runs (default: available cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn apply_overrides(
    s: &mut Scenario,
    no_blocking: bool,
    no_dephasing: bool,
    tmax: Option<f64>,
    rtol: Option<f64>,
) -> Result<()> {
    if no_blocking {
        s.generator.blocking = Blocking::Unblocked;
    }
    if no_dephasing {
        s.generator.dephasing = Dephasing::PopulationsOnly;
    }
    if let Some(t) = tmax {
        s.run.t_max = t;
        s.run.snapshot_times.retain(|&x| x <= t);
    }
    if let Some(r) = rtol {
        s.integrator.rtol = r;
    }
    s.validate()
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            scenario,
            out,
            no_blocking,
            no_dephasing,
            tmax,
            rtol,
        } => {
            let mut s = scenarios::resolve(&scenario)?;
            apply_overrides(&mut s, no_blocking, no_dephasing, tmax, rtol)?;
            let dir = out
                .or_else(|| s.run.out.clone())
                .unwrap_or_else(|| PathBuf::from("out").join(&s.name));
            let result = scenarios::run(&s)?;
            let paths = scenarios::write_bundle(&result, &dir)?;
            let sm = &result.summary;
            println!("scenario        {}", sm.scenario);
            println!("output          {}", paths.dir.display());
            println!(
                "final time      {:e} au ({} steps, equilibrated: {})",
                sm.final_time, sm.steps_accepted, sm.equilibrated
            );
            println!("max |n - n_FD|  {:e}", sm.max_fd_residual);
            if let Some(c) = sm.max_canonical_relative_residual {
                println!("max canonical relative residual {c:e} (equilibrium model: canonical, not Fermi-Dirac)");
            }
            println!("trace drift     {:e}", sm.max_trace_drift);
            Ok(ExitCode::SUCCESS)
        }
        Command::ListScenarios => {
            for s in scenarios::builtin_scenarios() {
                println!("{:<6} {}", s.name, s.description);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ShowScenario { scenario } => {
            print!("{}", scenarios::resolve(&scenario)?.to_toml_string()?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            modes,
            trials,
            states,
            seed,
            inject_sign_error,
            report,
        } => {
            let r = scenarios::verify(&VerifyOptions {
                modes,
                trials,
                states,
                seed,
                inject_sign_error,
            })?;
            let text = r.to_toml_string()?;
            print!("{text}");
            if let Some(path) = report {
                std::fs::write(&path, &text).map_err(|e| Error::Io { path, source: e })?;
            }
            Ok(if r.passed { ExitCode::SUCCESS } else { ExitCode::from(4) })
        }
        Command::Sweep {
            scenario,
            params,
            out,
            jobs,
        } => {
            let base = scenarios::resolve(&scenario)?;
            let params = params
                .iter()
                .map(|p| scenarios::parse_param(p))
                .collect::<Result<Vec<_>>>()?;
            let dir = out.unwrap_or_else(|| PathBuf::from("out").join(format!("{}-sweep", base.name)));
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let runs = scenarios::sweep(&base, &params, &dir, jobs)?;
            let mut worst = 0u8;
            for r in &runs {
                let values: Vec<String> = r.assignments.iter().map(|(k, v)| format!("{k}={v}")).collect();
                match &r.result {
                    Ok(s) => println!(
                        "{}  {}  max |n - n_FD| = {:e}",
                        r.dir.display(),
                        values.join(" "),
                        s.max_fd_residual
                    ),
                    Err(e) => {
                        eprintln!("{}  {}  failed: {e}", r.dir.display(), values.join(" "));
                        worst = worst.max(e.exit_code() as u8);
                    }
                }
            }
            Ok(ExitCode::from(worst))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        let code = if e.use_stderr() { 2 } else { 0 };
        let _ = e.print();
        std::process::exit(code)
    });
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
