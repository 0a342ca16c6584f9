//! Command-line frontend: parse system/network/config files, dispatch the
//! certification pipelines, and serialize certificates, trajectories, and
//! figure data.
//!
//! Exit codes: 0 = certified / property holds, 1 = not certified / property
//! fails, 2 = usage or runtime error. Thread count for the parallel
//! template-direction solves follows `RAYON_NUM_THREADS`.

mod commands;
mod formats;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pwacert", version, about = "RPI sets and stability certificates for PWA systems with maxout controllers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by the pipeline subcommands.
#[derive(Args, Clone)]
struct CommonOpts {
    /// Template directions: "octagon", "box", or a JSON file of rows.
    #[arg(long, default_value = "auto")]
    template: String,
    /// Terminal-set convergence parameter.
    #[arg(long, default_value_t = 1e-3)]
    eps_bar: f64,
    /// Margin above 1 the contraction factor must clear.
    #[arg(long, default_value_t = 1e-8)]
    alpha_tol: f64,
    /// Iteration cap for the safe- and terminal-set loops.
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Containment tolerance on support values.
    #[arg(long, default_value_t = 1e-7)]
    containment_tol: f64,
    /// Test the terminal-set stopping condition every this many iterations.
    #[arg(long, default_value_t = 1)]
    check_stride: usize,
    /// MILP integrality tolerance.
    #[arg(long, default_value_t = 1e-6)]
    int_tol: f64,
    /// MILP absolute optimality gap.
    #[arg(long, default_value_t = 1e-9)]
    gap_abs: f64,
    /// LP feasibility tolerance.
    #[arg(long, default_value_t = 1e-9)]
    lp_tol: f64,
    /// Branch-and-bound node limit per solve.
    #[arg(long, default_value_t = 10_000_000)]
    max_nodes: u64,
    /// Wall-clock limit per solve in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// RNG seed for sampling-based steps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for result files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Full stability certification pipeline on a PWA system file.
    Certify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        network: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Fit a PWA model to sampled dynamics, bound the residual, and run the
    /// ultimate-boundedness certification pipeline.
    ApproxCertify {
        /// Sampled-dynamics JSON file; records may be empty when the file
        /// names a built-in generator.
        #[arg(long)]
        dynamics: PathBuf,
        #[arg(long)]
        network: PathBuf,
        /// Chessboard partition "c1,c2,..:half_side" over the plane.
        #[arg(long, allow_hyphen_values = true)]
        chessboard: Option<String>,
        /// Region guards as a JSON list of polyhedra (alternative to
        /// --chessboard).
        #[arg(long)]
        guards: Option<PathBuf>,
        /// Fit grid as "points_per_x_axis,points_per_u_axis" for built-in
        /// generators.
        #[arg(long, default_value = "30,5")]
        fit_grid: String,
        /// Validation grid, same format.
        #[arg(long, default_value = "120,20")]
        val_grid: String,
        /// Residual bound inflation factor.
        #[arg(long, default_value_t = 0.25)]
        inflation: f64,
        /// Use per-region residual bounds instead of the global maximum.
        #[arg(long)]
        per_region: bool,
        /// Analytic residual bound overriding the sampled one.
        #[arg(long)]
        analytic_bound: Option<f64>,
        /// Emit the reach tube around the trajectory from this start, e.g.
        /// "5.5,-1.5".
        #[arg(long, allow_hyphen_values = true)]
        traj_start: Option<String>,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Test whether a given set is RPI for the closed loop.
    CheckRpi {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        network: PathBuf,
        /// Candidate set file.
        #[arg(long)]
        set: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Compute the large RPI safe set.
    Fmax {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        network: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Compute the terminal set (runs the safe set first unless given).
    Rmin {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        network: PathBuf,
        /// Precomputed safe set file; computed when absent.
        #[arg(long)]
        fmax_file: Option<PathBuf>,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// One exact reachable-set support value.
    Support {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Direction vector, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Simulate disturbed closed-loop trajectories.
    Simulate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        network: PathBuf,
        /// Initial state, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Disturbance sampler: zero, uniform, or vertices.
        #[arg(long, default_value = "uniform")]
        sampler: String,
        /// Number of disturbed trajectories to emit.
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Export the support MILP of a set/direction/horizon as fixed-format
    /// MPS.
    ExportMps {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        dir: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Verify that the controller maps the state set into the input set.
    VerifyInputConstraints {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        network: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Re-verify a certificate's containment chain from its stored support
    /// values, without any MILP solves.
    Recheck {
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Write the built-in example inputs.
    GenExamples {
        #[arg(long, default_value = "data")]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
