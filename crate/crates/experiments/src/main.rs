use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gcs_core::{Exec, GridSpec, TruncationPolicy};
use gcs_experiments::params::parse_real;
use gcs_experiments::{
    run_fig2, run_fig3, run_fig4, run_sweep, run_witness, CliResult, Fig2Config,
    Fig3Config, Fig4Config, Numerics, PointConfig, RunSummary, SweepConfig, ThetaSpec,
};

/// Generalized coherent state sweeps: intensity-field correlations,
/// nonclassicality witnesses, photon loss and Wigner negativity.
///
/// Real-valued flags accept plain numbers or multiples of pi (`pi/4`, `-2pi/3`).
#[derive(Debug, Parser)]
#[command(name = "gcs-experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// g32 and negativity against time at theta = arg<a>, plus crossing insets.
    Fig2(Fig2Args),
    /// |G_c|/|alpha|^1.5 heat maps over time and amplitude.
    Fig3(Fig3Args),
    /// Witness and negativity of damped states against the loss 1 - eta.
    Fig4(Fig4Args),
    /// Full witness report for one state.
    Witness(WitnessArgs),
    /// Witness table over a time window for one amplitude.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Directory for CSV files and manifest.txt.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Discarded Poisson tail used to pick the Fock truncation.
    #[arg(long, default_value_t = 1e-12, value_parser = parse_real)]
    tail_tol: f64,
    /// Run on one thread.
    #[arg(long)]
    serial: bool,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Half extent L of the phase-space grid [-L, L]^2 (default: from <n>).
    #[arg(long, value_parser = parse_real)]
    grid_extent: Option<f64>,
    /// Points per grid axis, odd (default: spacing <= 0.025).
    #[arg(long)]
    grid_points: Option<usize>,
}

#[derive(Debug, Args)]
struct Fig2Args {
    /// Initial amplitude |alpha| (alternative to --mean-n).
    #[arg(long, value_parser = parse_real, conflicts_with = "mean_n")]
    alpha: Option<f64>,
    /// Initial mean photon number.
    #[arg(long, default_value_t = 1.0, value_parser = parse_real)]
    mean_n: f64,
    #[arg(long, default_value_t = 0.0, value_parser = parse_real)]
    phi: f64,
    /// Nonlinear exponents.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 2.0, 3.0], value_parser = parse_real)]
    eps: Vec<f64>,
    /// Window start (default 0).
    #[arg(long, value_parser = parse_real)]
    t_min: Option<f64>,
    /// Window end (default: revival time for eps = 2, 3, else 10).
    #[arg(long, value_parser = parse_real)]
    t_max: Option<f64>,
    #[arg(long, default_value_t = 400)]
    t_steps: usize,
    /// Phase offsets for the insets (default -pi/3,-pi/6,0,pi/6,pi/3).
    #[arg(long, value_delimiter = ',', value_parser = parse_real, allow_hyphen_values = true)]
    dphi_list: Option<Vec<f64>>,
    /// Inset half-width as a fraction of the revival period.
    #[arg(long, default_value_t = 0.05, value_parser = parse_real)]
    inset_width: f64,
    #[arg(long, default_value_t = 101)]
    inset_steps: usize,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct Fig3Args {
    #[arg(long, default_value_t = 0.1, value_parser = parse_real)]
    alpha_min: f64,
    #[arg(long, default_value_t = 4.0, value_parser = parse_real)]
    alpha_max: f64,
    #[arg(long, default_value_t = 79)]
    alpha_steps: usize,
    #[arg(long, default_value_t = 0.0, value_parser = parse_real)]
    phi: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 2.0, 3.0], value_parser = parse_real)]
    eps: Vec<f64>,
    /// Window start (default 0).
    #[arg(long, value_parser = parse_real)]
    t_min: Option<f64>,
    /// Window end (default: revival time for eps = 2, 3, else 10).
    #[arg(long, value_parser = parse_real)]
    t_max: Option<f64>,
    #[arg(long, default_value_t = 101)]
    t_steps: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct Fig4Args {
    #[arg(long, default_value_t = 1.0, value_parser = parse_real)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, value_parser = parse_real)]
    phi: f64,
    #[arg(long, default_value_t = 2.0, value_parser = parse_real)]
    eps: f64,
    /// Interaction times (default 0.15,pi/4,pi/2).
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    t: Option<Vec<f64>>,
    /// Transmissions eta in (0, 1]; overrides --eta-steps.
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    eta_list: Option<Vec<f64>>,
    /// Number of losses evenly spread over [0, 0.999].
    #[arg(long, default_value_t = 41)]
    eta_steps: usize,
    /// `match` (arg<a> of the undamped state) or `value:<rad>`.
    #[arg(long, default_value = "match", allow_hyphen_values = true)]
    theta: ThetaSpec,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[arg(long, value_parser = parse_real)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, value_parser = parse_real)]
    phi: f64,
    #[arg(long, default_value_t = 2.0, value_parser = parse_real)]
    eps: f64,
    /// Offset k in the phases t (n + k)^eps.
    #[arg(long, default_value_t = 0)]
    k: u32,
    /// `match` (arg<a> of the measured state) or `value:<rad>`.
    #[arg(long, default_value = "match", allow_hyphen_values = true)]
    theta: ThetaSpec,
    /// Transmission of a loss channel applied before measuring.
    #[arg(long, default_value_t = 1.0, value_parser = parse_real)]
    eta: f64,
}

#[derive(Debug, Args)]
struct WitnessArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    t: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, default_value_t = 0.0, value_parser = parse_real, allow_hyphen_values = true)]
    t_min: f64,
    #[arg(long, default_value = "pi", value_parser = parse_real, allow_hyphen_values = true)]
    t_max: f64,
    #[arg(long, default_value_t = 101)]
    t_steps: usize,
    /// Add a Wigner negativity column.
    #[arg(long)]
    negativity: bool,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    common: CommonArgs,
}

fn numerics(common: &CommonArgs, grid: Option<&GridArgs>) -> CliResult<Numerics> {
    let policy = TruncationPolicy {
        tail_tol: common.tail_tol,
        ..TruncationPolicy::default()
    };
    Ok(Numerics {
        policy,
        grid: GridSpec {
            half_extent: grid.and_then(|g| g.grid_extent),
            points_per_axis: grid.and_then(|g| g.grid_points),
        },
        exec: if common.serial { Exec::Serial } else { Exec::Parallel },
    })
}

fn point(p: &PointArgs, t: f64) -> PointConfig {
    PointConfig {
        alpha: p.alpha,
        phi: p.phi,
        eps: p.eps,
        t,
        k: p.k,
        theta: p.theta,
        eta: p.eta,
    }
}

fn run(cli: Cli) -> CliResult<RunSummary> {
    match cli.command {
        Command::Fig2(a) => {
            let mut cfg = Fig2Config {
                mean_n: a.alpha.map(|x| x * x).unwrap_or(a.mean_n),
                phi: a.phi,
                eps_list: a.eps,
                t_steps: a.t_steps,
                t_min: a.t_min,
                t_max: a.t_max,
                inset_fraction: a.inset_width,
                inset_steps: a.inset_steps,
                numerics: numerics(&a.common, Some(&a.grid))?,
                ..Fig2Config::default()
            };
            if let Some(d) = a.dphi_list {
                cfg.dphi_list = d;
            }
            run_fig2(&cfg, &a.common.out_dir)
        }
        Command::Fig3(a) => {
            let cfg = Fig3Config {
                phi: a.phi,
                eps_list: a.eps,
                alpha_min: a.alpha_min,
                alpha_max: a.alpha_max,
                alpha_steps: a.alpha_steps,
                t_min: a.t_min,
                t_max: a.t_max,
                t_steps: a.t_steps,
                numerics: numerics(&a.common, None)?,
            };
            run_fig3(&cfg, &a.common.out_dir)
        }
        Command::Fig4(a) => {
            let mut cfg = Fig4Config {
                alpha: a.alpha,
                phi: a.phi,
                eps: a.eps,
                eta_list: a.eta_list,
                eta_steps: a.eta_steps,
                theta: a.theta,
                numerics: numerics(&a.common, Some(&a.grid))?,
                ..Fig4Config::default()
            };
            if let Some(t) = a.t {
                cfg.t_list = t;
            }
            run_fig4(&cfg, &a.common.out_dir)
        }
        Command::Witness(a) => {
            let (summary, report) = run_witness(
                &point(&a.point, a.t),
                &numerics(&a.common, None)?,
                &a.common.out_dir,
            )?;
            print!("{report}");
            Ok(summary)
        }
        Command::Sweep(a) => {
            let cfg = SweepConfig {
                point: point(&a.point, a.t_min),
                t_min: a.t_min,
                t_max: a.t_max,
                t_steps: a.t_steps,
                with_negativity: a.negativity,
            };
            run_sweep(&cfg, &numerics(&a.common, Some(&a.grid))?, &a.common.out_dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            for (path, rows) in &summary.files {
                eprintln!("wrote {} ({rows} rows)", path.display());
            }
            eprintln!("wrote {}", summary.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
