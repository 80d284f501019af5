use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ptssh_core::grid::linspace;
use ptssh_core::hamiltonian::{Boundary, LatticeParams};
use ptssh_core::metrics::TimeSpec;

use crate::error::{CliError, CliResult};

/// Simulator for a dimerized chain with balanced gain and loss used as a
/// quantum battery.
#[derive(Debug, Parser)]
#[command(name = "ptssh", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
    /// Output directory (created if missing).
    #[arg(long, short, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Artifact formats, comma separated.
    #[arg(long, global = true, value_delimiter = ',', default_value = "csv")]
    pub format: Vec<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, Debug, Args)]
pub struct ChainArgs {
    /// Number of unit cells.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Intra-cell hopping J₁.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub j1: f64,
    /// Inter-cell hopping J₂.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub j2: f64,
    /// Gain/loss strength γ.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Close the chain into a ring.
    #[arg(long)]
    pub periodic: bool,
}

impl ChainArgs {
    pub fn params(&self) -> CliResult<LatticeParams<f64>> {
        let boundary = if self.periodic {
            Boundary::Periodic
        } else {
            Boundary::Open
        };
        Ok(LatticeParams::new(
            self.n, self.j1, self.j2, self.gamma, boundary,
        )?)
    }
}

#[derive(Clone, Copy, Debug, Args)]
pub struct TimeArgs {
    /// Simulated time span; defaults to 200, or 100 once the bulk is broken.
    #[arg(long, allow_negative_numbers = true)]
    pub tmax: Option<f64>,
    /// Output spacing.
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    pub dt: f64,
}

impl TimeArgs {
    pub fn spec(&self) -> CliResult<TimeSpec<f64>> {
        if let Some(t) = self.tmax {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::usage(
                    "--tmax",
                    format!("{t} must be finite and > 0"),
                ));
            }
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(CliError::usage(
                "--dt",
                format!("{} must be finite and > 0", self.dt),
            ));
        }
        Ok(TimeSpec {
            t_max: self.tmax,
            dt: self.dt,
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Eigenvalues of the gain/loss Hamiltonian along a γ sweep.
    Spectrum {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value_t = 0.0)]
        gamma_min: f64,
        #[arg(long, default_value_t = 3.0)]
        gamma_max: f64,
        #[arg(long, default_value_t = 301)]
        gamma_steps: usize,
    },
    /// Topology and PT-regime labels over a (J₁, γ) grid.
    PhaseDiagram {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value_t = 0.0)]
        j1_min: f64,
        #[arg(long, default_value_t = 2.0)]
        j1_max: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma_min: f64,
        #[arg(long, default_value_t = 3.0)]
        gamma_max: f64,
        /// Points per axis; overridden by the per-axis counts.
        #[arg(long, default_value_t = 201)]
        steps: usize,
        #[arg(long)]
        j1_steps: Option<usize>,
        #[arg(long)]
        gamma_steps: Option<usize>,
    },
    /// Single charging run: stored energy and level populations.
    Charge {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        time: TimeArgs,
    },
    /// First-peak amplitude and saturation time over a (J₁, γ) grid.
    MetricsSweep {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        time: TimeArgs,
        /// Explicit J₁ values; replaces the min/max/steps grid.
        #[arg(long, value_delimiter = ',')]
        j1_list: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.1)]
        j1_min: f64,
        #[arg(long, default_value_t = 2.0)]
        j1_max: f64,
        #[arg(long, default_value_t = 12)]
        j1_steps: usize,
        /// Explicit γ values; replaces the min/max/steps grid.
        #[arg(long, value_delimiter = ',')]
        gamma_list: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.05)]
        gamma_min: f64,
        #[arg(long, default_value_t = 3.0)]
        gamma_max: f64,
        #[arg(long, default_value_t = 12)]
        gamma_steps: usize,
    },
    /// Indicators against chain length for both phases.
    Scaling {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        time: TimeArgs,
        #[arg(long, value_delimiter = ',', default_value = "4,6,8,10")]
        n_list: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.45,1,2.8")]
        gamma_list: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        j1_topo: f64,
        #[arg(long, default_value_t = 1.5)]
        j1_triv: f64,
    },
    /// Eigenbasis populations during charging.
    Populations {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        time: TimeArgs,
    },
    /// Runs the identity checks and writes verify.json.
    Verify {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[command(flatten)]
        time: TimeArgs,
    },
    /// Preset: spectra of both phases and the phase diagram.
    Fig2,
    /// Preset: charging traces of both phases at the four reference γ.
    Fig3 {
        #[command(flatten)]
        time: TimeArgs,
    },
    /// Preset: indicator maps and size scaling.
    Fig4 {
        #[command(flatten)]
        time: TimeArgs,
        #[arg(long, default_value_t = 12)]
        steps: usize,
    },
    /// Preset: population dynamics of both phases at the four reference γ.
    Fig5 {
        #[command(flatten)]
        time: TimeArgs,
    },
}

/// Fully validated description of one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub output: PathBuf,
    pub formats: Vec<Format>,
}

impl RunConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Clone, Debug)]
pub enum Command {
    Spectrum {
        params: LatticeParams<f64>,
        gammas: Vec<f64>,
    },
    PhaseDiagram {
        params: LatticeParams<f64>,
        j1s: Vec<f64>,
        gammas: Vec<f64>,
    },
    Charge {
        params: LatticeParams<f64>,
        time: TimeSpec<f64>,
    },
    MetricsSweep {
        params: LatticeParams<f64>,
        time: TimeSpec<f64>,
        j1s: Vec<f64>,
        gammas: Vec<f64>,
    },
    Scaling {
        params: LatticeParams<f64>,
        time: TimeSpec<f64>,
        ns: Vec<usize>,
        gammas: Vec<f64>,
        j1_topo: f64,
        j1_triv: f64,
    },
    Populations {
        params: LatticeParams<f64>,
        time: TimeSpec<f64>,
    },
    Verify {
        n: usize,
        time: TimeSpec<f64>,
    },
    Fig2,
    Fig3 {
        time: TimeSpec<f64>,
    },
    Fig4 {
        time: TimeSpec<f64>,
        steps: usize,
    },
    Fig5 {
        time: TimeSpec<f64>,
    },
}

fn grid(flag: &str, lo: f64, hi: f64, steps: usize) -> CliResult<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(CliError::usage(flag, "bounds must be finite"));
    }
    if steps == 0 {
        return Err(CliError::usage(flag, "needs at least one point"));
    }
    if steps > 1 && !(hi > lo) {
        return Err(CliError::usage(
            flag,
            format!("max {hi} must exceed min {lo}"),
        ));
    }
    Ok(linspace(lo, hi, steps))
}

fn increasing(flag: &str, values: Vec<f64>) -> CliResult<Vec<f64>> {
    if values.is_empty() {
        return Err(CliError::usage(flag, "list is empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::usage(flag, "values must be finite"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::usage(flag, "values must be strictly increasing"));
    }
    Ok(values)
}

impl Cli {
    pub fn into_config(self) -> CliResult<RunConfig> {
        let command = match self.command {
            CommandArgs::Spectrum {
                chain,
                gamma_min,
                gamma_max,
                gamma_steps,
            } => Command::Spectrum {
                params: chain.params()?,
                gammas: grid("--gamma-steps", gamma_min, gamma_max, gamma_steps)?,
            },
            CommandArgs::PhaseDiagram {
                chain,
                j1_min,
                j1_max,
                gamma_min,
                gamma_max,
                steps,
                j1_steps,
                gamma_steps,
            } => Command::PhaseDiagram {
                params: chain.params()?,
                j1s: grid("--j1-steps", j1_min, j1_max, j1_steps.unwrap_or(steps))?,
                gammas: grid(
                    "--gamma-steps",
                    gamma_min,
                    gamma_max,
                    gamma_steps.unwrap_or(steps),
                )?,
            },
            CommandArgs::Charge { chain, time } => Command::Charge {
                params: chain.params()?,
                time: time.spec()?,
            },
            CommandArgs::MetricsSweep {
                chain,
                time,
                j1_list,
                j1_min,
                j1_max,
                j1_steps,
                gamma_list,
                gamma_min,
                gamma_max,
                gamma_steps,
            } => Command::MetricsSweep {
                params: chain.params()?,
                time: time.spec()?,
                j1s: match j1_list {
                    Some(v) => increasing("--j1-list", v)?,
                    None => grid("--j1-steps", j1_min, j1_max, j1_steps)?,
                },
                gammas: match gamma_list {
                    Some(v) => increasing("--gamma-list", v)?,
                    None => grid("--gamma-steps", gamma_min, gamma_max, gamma_steps)?,
                },
            },
            CommandArgs::Scaling {
                chain,
                time,
                n_list,
                gamma_list,
                j1_topo,
                j1_triv,
            } => {
                if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(CliError::usage(
                        "--n-list",
                        "values must be strictly increasing",
                    ));
                }
                Command::Scaling {
                    params: chain.params()?,
                    time: time.spec()?,
                    ns: n_list,
                    gammas: increasing("--gamma-list", gamma_list)?,
                    j1_topo,
                    j1_triv,
                }
            }
            CommandArgs::Populations { chain, time } => Command::Populations {
                params: chain.params()?,
                time: time.spec()?,
            },
            CommandArgs::Verify { n, time } => Command::Verify {
                n,
                time: time.spec()?,
            },
            CommandArgs::Fig2 => Command::Fig2,
            CommandArgs::Fig3 { time } => Command::Fig3 { time: time.spec()? },
            CommandArgs::Fig4 { time, steps } => {
                if steps < 2 {
                    return Err(CliError::usage("--steps", "needs at least two points"));
                }
                Command::Fig4 {
                    time: time.spec()?,
                    steps,
                }
            }
            CommandArgs::Fig5 { time } => Command::Fig5 { time: time.spec()? },
        };
        let mut formats = self.format;
        formats.sort();
        formats.dedup();
        Ok(RunConfig {
            command,
            output: self.out,
            formats,
        })
    }
}
