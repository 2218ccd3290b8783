//! Result serialization. CSV columns are fixed and frozen by the
//! golden-file tests; JSON mirrors the same per-point fields plus the
//! plan metadata. All floating-point values are printed with 9
//! significant digits and LF line endings.

use serde::{Deserialize, Serialize};

use repairsim::analysis::OracleCheck;
use repairsim::channel::ChannelKind;
use repairsim::rotation_opt::{Objective, RotationObjectiveConfig, RotationResult};
use repairsim::simulator::{SweepResult, ThetaMode};

const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SWEEP_CSV_HEADER: &str =
    "ebn0_db,theta_rad,trials,ps,ps_stderr,psub,psub_stderr,lower_bound,upper_bound,r_times_ps";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// 9 significant digits, normalized scientific notation.
fn fmt9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Rounds to the 9 significant digits that the CSV prints, so the
/// JSON numbers carry exactly the same information.
fn round9(x: f64) -> f64 {
    fmt9(x).parse().expect("formatted float reparses")
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepPointJson {
    pub ebn0_db: f64,
    pub theta_rad: f64,
    pub trials: u64,
    pub ps: f64,
    pub ps_stderr: f64,
    pub psub: f64,
    pub psub_stderr: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub r_times_ps: f64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepOutput {
    pub artifact_version: String,
    pub q: u32,
    pub r: u32,
    pub channel: ChannelKind,
    pub seed: u64,
    pub theta_mode: ThetaMode,
    pub trials: u64,
    pub points: Vec<SweepPointJson>,
}

impl SweepOutput {
    pub fn new(result: &SweepResult) -> Self {
        SweepOutput {
            artifact_version: ARTIFACT_VERSION.to_string(),
            q: result.plan.q,
            r: result.plan.r,
            channel: result.plan.channel,
            seed: result.plan.seed,
            theta_mode: result.plan.theta,
            trials: result.plan.trials,
            points: result
                .points
                .iter()
                .map(|p| SweepPointJson {
                    ebn0_db: round9(p.ebn0_db),
                    theta_rad: round9(p.theta_rad),
                    trials: p.trials,
                    ps: round9(p.ps),
                    ps_stderr: round9(p.ps_stderr),
                    psub: round9(p.psub),
                    psub_stderr: round9(p.psub_stderr),
                    lower_bound: round9(p.lower_bound),
                    upper_bound: round9(p.upper_bound),
                    r_times_ps: round9(p.r_times_ps),
                })
                .collect(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let mut out = String::from(SWEEP_CSV_HEADER);
                out.push('\n');
                for p in &self.points {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{}\n",
                        fmt9(p.ebn0_db),
                        fmt9(p.theta_rad),
                        p.trials,
                        fmt9(p.ps),
                        fmt9(p.ps_stderr),
                        fmt9(p.psub),
                        fmt9(p.psub_stderr),
                        fmt9(p.lower_bound),
                        fmt9(p.upper_bound),
                        fmt9(p.r_times_ps)
                    ));
                }
                out
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct RotationOutput {
    pub artifact_version: String,
    pub q: u32,
    pub r: u32,
    pub objective: Objective,
    pub ebn0_db: f64,
    pub es_over_4n0: f64,
    pub grid: usize,
    pub theta_star: f64,
    pub objective_value: f64,
    /// (theta_rad, objective) samples of the grid scan.
    pub profile: Vec<(f64, f64)>,
}

impl RotationOutput {
    pub fn new(cfg: &RotationObjectiveConfig, ebn0_db: f64, result: &RotationResult) -> Self {
        RotationOutput {
            artifact_version: ARTIFACT_VERSION.to_string(),
            q: cfg.q,
            r: cfg.r,
            objective: result.objective_kind,
            ebn0_db: round9(ebn0_db),
            es_over_4n0: round9(cfg.es_over_4n0),
            grid: cfg.grid,
            theta_star: round9(result.theta_star),
            objective_value: round9(result.objective_value),
            profile: result
                .full_profile
                .iter()
                .map(|&(t, v)| (round9(t), round9(v)))
                .collect(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let mut out = String::from("theta_rad,objective\n");
                for &(t, v) in &self.profile {
                    out.push_str(&format!("{},{}\n", fmt9(t), fmt9(v)));
                }
                out
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct OracleOutput {
    pub artifact_version: String,
    pub seed: u64,
    pub q: u32,
    pub r: u32,
    pub ps: f64,
    pub trials: u64,
    pub empirical: f64,
    pub exact: f64,
    pub stderr: f64,
    pub sigmas: f64,
    pub pass: bool,
}

impl OracleOutput {
    pub fn new(seed: u64, check: &OracleCheck) -> Self {
        OracleOutput {
            artifact_version: ARTIFACT_VERSION.to_string(),
            seed,
            q: check.q,
            r: check.r,
            ps: round9(check.ps),
            trials: check.trials,
            empirical: round9(check.empirical),
            exact: round9(check.exact),
            stderr: round9(check.stderr),
            sigmas: round9(check.sigmas),
            pass: check.pass,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Csv => format!(
                "q,r,ps,trials,empirical,exact,stderr,sigmas,pass\n{},{},{},{},{},{},{},{},{}\n",
                self.q,
                self.r,
                fmt9(self.ps),
                self.trials,
                fmt9(self.empirical),
                fmt9(self.exact),
                fmt9(self.stderr),
                fmt9(self.sigmas),
                self.pass
            ),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable output");
    text.push('\n');
    text
}
