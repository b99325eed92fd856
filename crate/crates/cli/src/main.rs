use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use mrac_cli::commands::{self, Status};
use mrac_cli::{load, Overrides, Setup, EXIT_INPUT_ERROR};

#[derive(Parser)]
#[command(name = "robust-mrac", version, about = "Projection-based MRAC: verification, simulation and phase analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the unmodeled dynamics against the admissible class and print the bound ledger.
    Verify {
        #[command(flatten)]
        source: Source,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the closed loop; prints a summary, writes the trace with --out.
    Simulate {
        #[command(flatten)]
        source: Source,
        /// Trace CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Phase timeline of a simulated or recorded trace.
    Phases {
        #[command(flatten)]
        source: Source,
        /// Analyze this trace CSV instead of simulating.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Timeline JSON destination (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Companion `t,e,theta,region_code` CSV.
        #[arg(long)]
        plot_csv: Option<PathBuf>,
    },
    /// Run a grid of initial conditions and parameters concurrently.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// `x_p0,theta0;x_p0,theta0;...` (defaults to the scenario's list).
        #[arg(long, allow_hyphen_values = true)]
        ic_grid: Option<String>,
        /// `name=v1,v2,...`; repeat for a product grid.
        #[arg(long)]
        param_grid: Vec<String>,
        /// Results JSON destination (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Source {
    /// Built-in scenario name.
    #[arg(long)]
    preset: Option<String>,
    /// JSON scenario file.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    theta_max: Option<f64>,
    #[arg(long)]
    epsilon0: Option<f64>,
    #[arg(long)]
    xi0: Option<f64>,
    /// Run the plain gradient law.
    #[arg(long)]
    no_projection: bool,
}

impl Source {
    fn load(&self) -> Result<Setup> {
        let overrides = Overrides {
            dt: self.dt,
            t_end: self.t_end,
            gamma: self.gamma,
            stride: self.stride,
            theta_max: self.theta_max,
            epsilon0: self.epsilon0,
            xi0: self.xi0,
            no_projection: self.no_projection,
        };
        load(self.preset.as_deref(), self.scenario.as_deref(), &overrides)
    }
}

fn execute(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Verify { source, out } => {
            let report = commands::verify(&source.load()?)?;
            commands::write_json(&report, None)?;
            if let Some(path) = out {
                commands::write_json(&report, Some(&path))?;
            }
            Ok(commands::verify_status(&report))
        }
        Command::Simulate { source, out } => {
            let setup = source.load()?;
            let run = commands::run(&setup)?;
            if let Some(path) = out {
                commands::write_trace(&run.trace, &path)?;
            }
            commands::write_json(&commands::simulate_summary(&setup, &run), None)?;
            Ok(commands::run_status(&setup, &run))
        }
        Command::Phases { source, trace, out, plot_csv } => {
            let setup = source.load()?;
            let (trace, divergence_time, status) = match trace {
                Some(path) => (commands::read_trace(&path)?, None, Status::Ok),
                None => {
                    let run = commands::run(&setup)?;
                    let status = commands::run_status(&setup, &run);
                    (run.trace, run.divergence_time, status)
                }
            };
            let report = commands::phases(&setup, &trace, divergence_time)?;
            commands::write_json(&report, out.as_deref())?;
            if let Some(path) = plot_csv {
                commands::write_plot_csv(&trace, &path)?;
            }
            Ok(status)
        }
        Command::Sweep { source, ic_grid, param_grid, out } => {
            let setup = source.load()?;
            let ics = match ic_grid {
                Some(text) => commands::parse_ic_grid(&text)?,
                None => setup.initial_conditions.clone(),
            };
            if ics.is_empty() {
                bail!("the initial-condition grid is empty");
            }
            let axes = param_grid.iter().map(|p| commands::parse_param_axis(p)).collect::<Result<Vec<_>>>()?;
            let points = commands::sweep_points(&ics, &axes);
            let results = commands::sweep(&setup, &points, commands::thread_cap()?)?;
            commands::write_json(&results, out.as_deref())?;
            Ok(Status::Ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
