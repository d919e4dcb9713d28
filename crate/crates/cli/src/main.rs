//! `gkplc`: logical channels of damped GKP qubits under photon loss.

mod commands;
mod herald;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gkp_channel::channel::{P_PLUS_EVEN, P_PLUS_ODD};
use gkp_channel::validate::ValidateConfig;

use commands::{Failure, OracleChoice, Outputs, QuadChoice, SweepParam};
use herald::{HeraldSpec, Range, SyndromeArg};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_STRICT: u8 = 3;

#[derive(Parser)]
#[command(name = "gkplc", version, about = "Logical channels of damped GKP qubits under photon loss")]
struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "GKPLC_JOBS", default_value_t = 0, global = true)]
    jobs: usize,

    /// Exit with status 3 if any warning was raised.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Channel {
    /// Damping exponent β of the code states.
    #[arg(long)]
    beta: f64,
    /// Loss rate γ in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
}

#[derive(Args)]
struct Quadrature {
    /// Gauss–Legendre points per syndrome axis.
    #[arg(long, default_value_t = 32)]
    order: usize,
    /// Warn when orders N and N/2 differ by more than this.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Skip the half-order convergence check.
    #[arg(long)]
    no_check: bool,
}

impl Quadrature {
    fn choice(&self) -> QuadChoice {
        QuadChoice {
            order: self.order,
            tol: self.tol,
            check: !self.no_check,
        }
    }
}

#[derive(Args)]
struct Oracle {
    /// Compute in a truncated Fock basis instead of with Θ functions.
    #[arg(long)]
    oracle: bool,
    /// Fock cutoff for --oracle; sized from the damping when omitted.
    #[arg(long, requires = "oracle")]
    cutoff: Option<usize>,
}

impl Oracle {
    fn choice(&self) -> OracleChoice {
        OracleChoice {
            enabled: self.oracle,
            cutoff: self.cutoff,
        }
    }
}

#[derive(Args)]
struct JsonOut {
    /// JSON output path; stdout when omitted.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Also render χ as an SVG heatmap.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write the unnormalized χ instead of the trace-one one.
    #[arg(long)]
    raw: bool,
}

impl JsonOut {
    fn outputs(self) -> Outputs {
        Outputs {
            json: self.json,
            svg: self.svg,
            raw: self.raw,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// χ(m) conditioned on a herald and a syndrome, over a grid of syndromes.
    Conditional {
        #[command(flatten)]
        channel: Channel,
        /// none, het:RE,IM, photon:J or hom:X,PHI.
        #[arg(long, default_value = "het:0,0")]
        herald: HeraldSpec,
        /// Syndrome grid points per axis.
        #[arg(long, default_value_t = 16)]
        grid: usize,
        /// A single syndrome MQ,MP instead of a grid.
        #[arg(long, allow_hyphen_values = true)]
        syndrome: Option<SyndromeArg>,
        /// CSV output path; stdout when omitted.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Render the 4×4 panels as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        oracle: Oracle,
    },
    /// Syndrome-averaged channel for one herald; `none` also averages the loss mode.
    Averaged {
        #[command(flatten)]
        channel: Channel,
        #[arg(long, default_value = "none")]
        herald: HeraldSpec,
        #[command(flatten)]
        quad: Quadrature,
        #[command(flatten)]
        oracle: Oracle,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Pure-loss channel, at one syndrome or averaged over syndromes.
    PureLoss {
        #[command(flatten)]
        channel: Channel,
        /// Fix the syndrome MQ,MP and average only over the loss mode.
        #[arg(long, allow_hyphen_values = true)]
        syndrome: Option<SyndromeArg>,
        #[command(flatten)]
        quad: Quadrature,
        #[command(flatten)]
        oracle: Oracle,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Channel heralded by J photons in the loss mode.
    Subtract {
        #[command(flatten)]
        channel: Channel,
        #[arg(long, short = 'j')]
        photons: usize,
        /// Fix the syndrome MQ,MP instead of averaging.
        #[arg(long, allow_hyphen_values = true)]
        syndrome: Option<SyndromeArg>,
        #[command(flatten)]
        quad: Quadrature,
        #[command(flatten)]
        oracle: Oracle,
        #[command(flatten)]
        out: JsonOut,
    },
    /// Average infidelity of the averaged pure-loss channel over a (β, γ) grid.
    FidelitySweep {
        /// β grid as LO:HI:N.
        #[arg(long, default_value = "0.02:0.5:20")]
        beta: Range,
        /// γ grid as LO:HI:N.
        #[arg(long, default_value = "0:0.5:20")]
        gamma: Range,
        #[arg(long, default_value_t = 24)]
        order: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Main CSV; `_argmin.csv` and `_warnings.json` are written beside it.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Images of the six Pauli eigenstates along a β or γ sweep.
    BlochTraj {
        #[arg(long, value_enum)]
        vary: SweepParam,
        /// Swept values as LO:HI:N.
        #[arg(long)]
        range: Range,
        /// Value of the parameter held fixed.
        #[arg(long)]
        fixed: f64,
        #[arg(long, default_value = "none")]
        herald: HeraldSpec,
        /// Parameter values to flag in the marker column.
        #[arg(long, value_delimiter = ',')]
        mark: Vec<f64>,
        #[arg(long, default_value_t = 16)]
        order: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the closed forms against the Fock-basis computation.
    Validate {
        /// Reduced grids and sample counts.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = P_PLUS_EVEN)]
        expect_p_plus_even: f64,
        #[arg(long, default_value_t = P_PLUS_ODD)]
        expect_p_plus_odd: f64,
    },
}

fn dispatch(command: Command) -> Result<commands::Outcome, Failure> {
    match command {
        Command::Conditional {
            channel,
            herald,
            grid,
            syndrome,
            csv,
            svg,
            oracle,
        } => commands::cmd_conditional(channel.beta, channel.gamma, herald, grid, syndrome, csv, svg, oracle.choice()),
        Command::Averaged {
            channel,
            herald,
            quad,
            oracle,
            out,
        } => commands::cmd_averaged(channel.beta, channel.gamma, herald, quad.choice(), oracle.choice(), out.outputs()),
        Command::PureLoss {
            channel,
            syndrome,
            quad,
            oracle,
            out,
        } => commands::cmd_pure_loss(channel.beta, channel.gamma, syndrome, quad.choice(), oracle.choice(), out.outputs()),
        Command::Subtract {
            channel,
            photons,
            syndrome,
            quad,
            oracle,
            out,
        } => commands::cmd_subtract(
            channel.beta,
            channel.gamma,
            photons,
            syndrome,
            quad.choice(),
            oracle.choice(),
            out.outputs(),
        ),
        Command::FidelitySweep {
            beta,
            gamma,
            order,
            tol,
            out,
            svg,
        } => commands::cmd_fidelity_sweep(beta, gamma, QuadChoice { order, tol, check: true }, out, svg),
        Command::BlochTraj {
            vary,
            range,
            fixed,
            herald,
            mark,
            order,
            tol,
            out,
        } => commands::cmd_bloch_traj(vary, range, fixed, herald, mark, QuadChoice { order, tol, check: true }, out),
        Command::Validate {
            quick,
            seed,
            out,
            expect_p_plus_even,
            expect_p_plus_odd,
        } => commands::cmd_validate(
            ValidateConfig {
                seed,
                quick,
                expected_p_plus_even: expect_p_plus_even,
                expected_p_plus_odd: expect_p_plus_odd,
            },
            out.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("error: could not start {} worker threads: {e}", cli.jobs);
            return ExitCode::from(EXIT_FAILURE);
        }
    }
    match dispatch(cli.command) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if outcome.failed {
                ExitCode::from(EXIT_FAILURE)
            } else if cli.strict && !outcome.warnings.is_empty() {
                ExitCode::from(EXIT_STRICT)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
