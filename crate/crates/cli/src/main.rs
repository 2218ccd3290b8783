//! Command-line front end: runs error-rate sweeps, rotation searches,
//! and oracle checks, and writes machine-readable CSV or JSON results.
//!
//! Flags can be preloaded from a TOML config file (`--config`);
//! explicit flags override file values. Relative output paths are
//! placed under `$REPAIRSIM_OUT_DIR` when that variable is set.
//! Repeated runs with the same configuration produce byte-identical
//! output files.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use repairsim::analysis::empirical_psub_matches_oracle;
use repairsim::channel::ChannelKind;
use repairsim::rotation_opt::{
    es_over_4n0_from_ebn0_db, optimize_rotation, Objective, RotationObjectiveConfig,
    DEFAULT_THETA_GRID,
};
use repairsim::simulator::{run_sweep, SimulationPlan, ThetaMode};

mod output;

use output::{Format, OracleOutput, RotationOutput, SweepOutput};

#[derive(Parser)]
#[command(
    name = "repairsim",
    version,
    about = "Link-level node-repair simulator: error-rate sweeps, rotation design, oracle checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep of symbol and subpacket error rates over E_b/N_0
    Sweep(SweepArgs),
    /// Find the rotation angle minimizing a design objective
    OptimizeRotation(OptimizeArgs),
    /// Compare the simulated uniform-error channel with its exact formula
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// TOML file providing defaults for the flags below
    #[arg(long)]
    config: Option<PathBuf>,
    /// Constellation / field size: 4, 16, or 64
    #[arg(long)]
    q: Option<u32>,
    /// Repair locality (number of helper nodes)
    #[arg(long)]
    r: Option<u32>,
    /// Channel model: awgn or rayleigh
    #[arg(long)]
    channel: Option<String>,
    /// E_b/N_0 grid in dB, as start:stop:step (stop inclusive)
    #[arg(long)]
    ebn0: Option<String>,
    /// Trials per sweep point [default: 100000]
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed for the per-trial random streams [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Rotation handling: unrotated, fixed, optimize-f1, optimize-f2
    #[arg(long)]
    theta_mode: Option<String>,
    /// Rotation angle in radians, used with --theta-mode fixed
    #[arg(long)]
    theta: Option<f64>,
    /// Output file [default: sweep.csv or sweep.json]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json [default: from the file extension]
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct OptimizeArgs {
    /// TOML file providing defaults for the flags below
    #[arg(long)]
    config: Option<PathBuf>,
    /// Constellation / field size: 4, 16, or 64
    #[arg(long)]
    q: Option<u32>,
    /// Repair locality; only the f1 objective uses it [default: 1]
    #[arg(long)]
    r: Option<u32>,
    /// E_b/N_0 operating point in dB
    #[arg(long)]
    ebn0_db: Option<f64>,
    /// Objective to minimize: f1 or f2
    #[arg(long)]
    objective: Option<String>,
    /// Number of grid samples in [0, pi/2] [default: 1024]
    #[arg(long)]
    grid: Option<usize>,
    /// Output file [default: rotation.csv or rotation.json]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json [default: from the file extension]
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct OracleArgs {
    /// TOML file providing defaults for the flags below
    #[arg(long)]
    config: Option<PathBuf>,
    /// Field size (power of two >= 2)
    #[arg(long)]
    q: Option<u32>,
    /// Repair locality
    #[arg(long)]
    r: Option<u32>,
    /// Per-symbol corruption probability of the synthetic channel
    #[arg(long)]
    ps: Option<f64>,
    /// Monte Carlo trials [default: 1000000]
    #[arg(long)]
    trials: Option<u64>,
    /// Seed for the Monte Carlo stream [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Output file [default: oracle.csv or oracle.json]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json [default: from the file extension]
    #[arg(long)]
    format: Option<String>,
}

/// Optional config-file counterpart of the flags; every key may be
/// omitted. Unknown keys are rejected so typos surface immediately.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    q: Option<u32>,
    r: Option<u32>,
    channel: Option<String>,
    ebn0: Option<String>,
    trials: Option<u64>,
    seed: Option<u64>,
    theta_mode: Option<String>,
    theta: Option<f64>,
    ebn0_db: Option<f64>,
    objective: Option<String>,
    grid: Option<usize>,
    ps: Option<f64>,
    out: Option<PathBuf>,
    format: Option<String>,
}

fn load_config(path: &Option<PathBuf>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read config file {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("invalid config file {}", p.display()))
        }
    }
}

fn parse_channel(s: &str) -> Result<ChannelKind> {
    match s.to_ascii_lowercase().as_str() {
        "awgn" => Ok(ChannelKind::Awgn),
        "rayleigh" => Ok(ChannelKind::Rayleigh),
        other => bail!("invalid channel {other:?}: expected awgn or rayleigh"),
    }
}

fn parse_objective(s: &str) -> Result<Objective> {
    match s.to_ascii_lowercase().as_str() {
        "f1" => Ok(Objective::F1),
        "f2" => Ok(Objective::F2),
        other => bail!("invalid objective {other:?}: expected f1 or f2"),
    }
}

fn parse_theta_mode(mode: &str, theta: Option<f64>) -> Result<ThetaMode> {
    match mode.to_ascii_lowercase().as_str() {
        "unrotated" | "none" => Ok(ThetaMode::Unrotated),
        "fixed" => match theta {
            Some(t) => Ok(ThetaMode::Fixed(t)),
            None => bail!("invalid theta: --theta-mode fixed requires --theta <radians>"),
        },
        "optimize-f1" => Ok(ThetaMode::OptimizeF1),
        "optimize-f2" => Ok(ThetaMode::OptimizeF2),
        other => bail!(
            "invalid theta-mode {other:?}: expected unrotated, fixed, optimize-f1 or optimize-f2"
        ),
    }
}

/// Expands "start:stop:step" (dB) into the inclusive grid.
fn parse_ebn0_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("invalid ebn0 range {s:?}: expected start:stop:step");
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid ebn0 range {s:?}: {p:?} is not a number"))
        })
        .collect::<Result<_>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !start.is_finite() || !stop.is_finite() || !step.is_finite() {
        bail!("invalid ebn0 range {s:?}: values must be finite");
    }
    if step <= 0.0 {
        bail!("invalid ebn0 range {s:?}: step must be positive");
    }
    if stop < start {
        bail!("invalid ebn0 range {s:?}: stop is below start");
    }
    let mut points = Vec::new();
    let mut k = 0u32;
    loop {
        let v = start + f64::from(k) * step;
        if v > stop + step * 1e-9 {
            break;
        }
        points.push(v);
        k += 1;
    }
    Ok(points)
}

fn resolve_format(format: Option<String>, out: &Option<PathBuf>) -> Result<Format> {
    if let Some(f) = format {
        return match f.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => bail!("invalid format {other:?}: expected csv or json"),
        };
    }
    if let Some(path) = out {
        if path.extension().and_then(|e| e.to_str()) == Some("json") {
            return Ok(Format::Json);
        }
    }
    Ok(Format::Csv)
}

/// Relative outputs land in $REPAIRSIM_OUT_DIR when it is set.
fn resolve_out(out: PathBuf) -> PathBuf {
    if out.is_relative() {
        if let Ok(dir) = std::env::var("REPAIRSIM_OUT_DIR") {
            if !dir.is_empty() {
                return PathBuf::from(dir).join(out);
            }
        }
    }
    out
}

fn default_out(stem: &str, format: Format) -> PathBuf {
    PathBuf::from(format!("{stem}.{}", format.extension()))
}

fn write_output(path: &PathBuf, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() && !dir.exists() {
            bail!("invalid out: directory {} does not exist", dir.display());
        }
    }
    std::fs::write(path, contents)
        .with_context(|| format!("cannot write output file {}", path.display()))?;
    Ok(())
}

fn run_sweep_command(args: SweepArgs) -> Result<()> {
    let file = load_config(&args.config)?;
    let q = args.q.or(file.q).context("missing required --q")?;
    let r = args.r.or(file.r).context("missing required --r")?;
    let channel = parse_channel(
        &args
            .channel
            .or(file.channel)
            .context("missing required --channel")?,
    )?;
    let ebn0_db = parse_ebn0_range(
        &args.ebn0.or(file.ebn0).context("missing required --ebn0")?,
    )?;
    let trials = args.trials.or(file.trials).unwrap_or(100_000);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let theta = args.theta.or(file.theta);
    let theta_mode = match args.theta_mode.or(file.theta_mode) {
        Some(mode) => parse_theta_mode(&mode, theta)?,
        None => match theta {
            Some(t) => ThetaMode::Fixed(t),
            None => ThetaMode::Unrotated,
        },
    };
    let format = resolve_format(args.format.or(file.format), &args.out)?;
    let out = resolve_out(
        args.out
            .or(file.out)
            .unwrap_or_else(|| default_out("sweep", format)),
    );

    let plan = SimulationPlan {
        q,
        r,
        channel,
        theta: theta_mode,
        ebn0_db,
        trials,
        seed,
    };
    let result = run_sweep(&plan)?;
    let output = SweepOutput::new(&result);
    write_output(&out, &output.render(format))?;
    println!(
        "wrote {} ({} points, q={q}, r={r}, {channel}, {trials} trials/point)",
        out.display(),
        result.points.len()
    );
    Ok(())
}

fn run_optimize_command(args: OptimizeArgs) -> Result<()> {
    let file = load_config(&args.config)?;
    let q = args.q.or(file.q).context("missing required --q")?;
    let r = args.r.or(file.r).unwrap_or(1);
    let ebn0_db = args
        .ebn0_db
        .or(file.ebn0_db)
        .context("missing required --ebn0-db")?;
    let objective = parse_objective(
        &args
            .objective
            .or(file.objective)
            .context("missing required --objective")?,
    )?;
    let grid = args.grid.or(file.grid).unwrap_or(DEFAULT_THETA_GRID);
    let format = resolve_format(args.format.or(file.format), &args.out)?;
    let out = resolve_out(
        args.out
            .or(file.out)
            .unwrap_or_else(|| default_out("rotation", format)),
    );

    let cfg = RotationObjectiveConfig {
        q,
        r,
        es_over_4n0: es_over_4n0_from_ebn0_db(q, ebn0_db)?,
        grid,
    };
    let result = optimize_rotation(&cfg, objective)?;
    let output = RotationOutput::new(&cfg, ebn0_db, &result);
    write_output(&out, &output.render(format))?;
    println!(
        "wrote {} (theta* = {:.6} rad, {objective} = {:.9e})",
        out.display(),
        result.theta_star,
        result.objective_value
    );
    Ok(())
}

fn run_oracle_command(args: OracleArgs) -> Result<()> {
    let file = load_config(&args.config)?;
    let q = args.q.or(file.q).context("missing required --q")?;
    let r = args.r.or(file.r).context("missing required --r")?;
    let ps = args.ps.or(file.ps).context("missing required --ps")?;
    let trials = args.trials.or(file.trials).unwrap_or(1_000_000);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let format = resolve_format(args.format.or(file.format), &args.out)?;
    let out = resolve_out(
        args.out
            .or(file.out)
            .unwrap_or_else(|| default_out("oracle", format)),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let check = empirical_psub_matches_oracle(q, r, ps, trials, &mut rng)?;
    let output = OracleOutput::new(seed, &check);
    write_output(&out, &output.render(format))?;
    println!(
        "wrote {} (empirical {:.9e} vs exact {:.9e}, {:.2} sigma, {})",
        out.display(),
        check.empirical,
        check.exact,
        check.sigmas,
        if check.pass { "PASS" } else { "FAIL" }
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(args) => run_sweep_command(args),
        Command::OptimizeRotation(args) => run_optimize_command(args),
        Command::OracleCheck(args) => run_oracle_command(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
