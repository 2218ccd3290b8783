//! Monte Carlo harness for the repair pipeline.
//!
//! One trial draws r uniform subpackets, forms their combination ω,
//! lifts each to a constellation point, sends each through an
//! independent channel use, ML-decodes, reconstructs ω̂, and records
//! whether ω̂ = ω together with the number of wrong symbols. A sweep
//! repeats this at each E_b/N_0 point and attaches the analytic
//! bounds evaluated at the measured symbol error rate.
//!
//! Every (point, trial) pair owns a dedicated random stream derived
//! from the master seed, so results are bit-identical no matter how
//! trials are scheduled across workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis;
use crate::channel::{self, ChannelConfig, ChannelKind};
use crate::constellation::Constellation;
use crate::gf::FieldParams;
use crate::rotation_opt::{
    es_over_4n0_from_ebn0_db, optimize_rotation, Objective, RotationObjectiveConfig,
    DEFAULT_THETA_GRID,
};
use crate::storage_code::RepairScenario;
use crate::{Error, Result};

/// How the rotation angle is chosen for each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "theta_rad", rename_all = "kebab-case")]
pub enum ThetaMode {
    /// θ = 0 at every point.
    Unrotated,
    /// One fixed angle at every point.
    Fixed(f64),
    /// Minimize the locality-weighted objective per point.
    OptimizeF1,
    /// Minimize the pair-sum objective per point.
    OptimizeF2,
}

/// Full description of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub q: u32,
    pub r: u32,
    pub channel: ChannelKind,
    pub theta: ThetaMode,
    pub ebn0_db: Vec<f64>,
    /// Trials per sweep point.
    pub trials: u64,
    pub seed: u64,
}

impl SimulationPlan {
    pub fn validate(&self) -> Result<()> {
        Constellation::build_qam(self.q, 0.0)?;
        if self.r == 0 {
            return Err(Error::InvalidParameter {
                field: "r",
                message: "repair locality must be at least 1".into(),
            });
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter {
                field: "trials",
                message: "at least one trial per point is required".into(),
            });
        }
        if self.ebn0_db.is_empty() {
            return Err(Error::InvalidParameter {
                field: "ebn0_db",
                message: "at least one sweep point is required".into(),
            });
        }
        for &x in &self.ebn0_db {
            if !x.is_finite() {
                return Err(Error::InvalidParameter {
                    field: "ebn0_db",
                    message: format!("{x} is not finite"),
                });
            }
        }
        for w in self.ebn0_db.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidParameter {
                    field: "ebn0_db",
                    message: format!(
                        "sweep points must be strictly increasing, got {} then {}",
                        w[0], w[1]
                    ),
                });
            }
        }
        if let ThetaMode::Fixed(theta) = self.theta {
            Constellation::build_qam(self.q, theta)?;
        }
        Ok(())
    }
}

/// Outcome of one repair trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub subpacket_correct: bool,
    /// Helpers whose symbol decoded incorrectly, out of r.
    pub symbol_errors: u32,
}

/// Runs one end-to-end repair trial.
pub fn run_trial<R: Rng + ?Sized>(
    scenario: &RepairScenario,
    c: &Constellation,
    cfg: &ChannelConfig,
    rng: &mut R,
) -> TrialOutcome {
    let field = scenario.field();
    let r = scenario.locality();
    let mut truths = Vec::with_capacity(r);
    let mut estimates = Vec::with_capacity(r);
    let mut symbol_errors = 0u32;
    for _ in 0..r {
        let w = field
            .element(rng.random_range(0..field.q()))
            .expect("uniform draw below q");
        let x = c.lift(w).expect("constellation size matches field size");
        let obs = channel::transmit(x, cfg, rng);
        let w_hat = channel::ml_decode(&obs, c);
        if w_hat != w {
            symbol_errors += 1;
        }
        truths.push(w);
        estimates.push(w_hat);
    }
    let omega = scenario.reconstruct(&truths).expect("validated lengths");
    let omega_hat = scenario.reconstruct(&estimates).expect("validated lengths");
    let subpacket_correct = omega_hat == omega;
    // a single weighted nonzero error cannot vanish
    assert!(
        !(symbol_errors == 1 && subpacket_correct),
        "one symbol error reconstructed correctly"
    );
    TrialOutcome {
        subpacket_correct,
        symbol_errors,
    }
}

/// Statistics of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub ebn0_db: f64,
    /// Rotation angle used at this point.
    pub theta_rad: f64,
    pub trials: u64,
    /// Symbol error rate over the r·trials transmissions.
    pub ps: f64,
    pub ps_stderr: f64,
    /// Subpacket error rate over the trials.
    pub psub: f64,
    pub psub_stderr: f64,
    /// r·ps·(1-ps)^(r-1) at the measured ps.
    pub lower_bound: f64,
    /// 1-(1-ps)^r at the measured ps.
    pub upper_bound: f64,
    /// r·ps at the measured ps.
    pub r_times_ps: f64,
    pub symbol_errors: u64,
    pub subpacket_errors: u64,
}

/// All points of one sweep, with the plan that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub plan: SimulationPlan,
    pub points: Vec<SweepPoint>,
}

/// Binomial standard error; when the count is degenerate (0 or n) it
/// reports the rule-of-three bound 3/n instead of a zero width.
fn stderr_or_rule_of_three(errors: u64, n: u64) -> f64 {
    if errors == 0 || errors == n {
        3.0 / n as f64
    } else {
        let p = errors as f64 / n as f64;
        (p * (1.0 - p) / n as f64).sqrt()
    }
}

/// The independent random stream of one (point, trial) pair. The
/// triple is the cipher key, so streams never overlap and any trial
/// can be replayed in isolation.
pub fn derive_trial_stream(seed: u64, point: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&point.to_le_bytes());
    key[16..24].copy_from_slice(&trial.to_le_bytes());
    key[24..].copy_from_slice(b"sweeprng");
    ChaCha8Rng::from_seed(key)
}

/// Runs the full sweep described by `plan`.
///
/// Per point: derive N0 from E_b/N_0 and the constellation's energy
/// per bit, pick the rotation angle, run the trials (in parallel, one
/// derived stream each), and attach the analytic bounds evaluated at
/// the measured symbol error rate. Deterministic in the master seed
/// regardless of worker count.
pub fn run_sweep(plan: &SimulationPlan) -> Result<SweepResult> {
    plan.validate()?;
    let base = Constellation::build_qam(plan.q, 0.0)?;
    let eb = base.energy_per_bit();
    let field = FieldParams::for_size(plan.q)?;
    let scenario = RepairScenario::xor(field, plan.r as usize)?;

    let mut points = Vec::with_capacity(plan.ebn0_db.len());
    for (point_index, &ebn0_db) in plan.ebn0_db.iter().enumerate() {
        let theta = match plan.theta {
            ThetaMode::Unrotated => 0.0,
            ThetaMode::Fixed(theta) => theta,
            ThetaMode::OptimizeF1 | ThetaMode::OptimizeF2 => {
                let cfg = RotationObjectiveConfig {
                    q: plan.q,
                    r: plan.r,
                    es_over_4n0: es_over_4n0_from_ebn0_db(plan.q, ebn0_db)?,
                    grid: DEFAULT_THETA_GRID,
                };
                let objective = if plan.theta == ThetaMode::OptimizeF1 {
                    Objective::F1
                } else {
                    Objective::F2
                };
                optimize_rotation(&cfg, objective)?.theta_star
            }
        };
        let c = Constellation::build_qam(plan.q, theta)?;
        let ceb = c.energy_per_bit();
        assert!(
            (ceb - eb).abs() <= 1e-12 * eb,
            "rotation changed the energy per bit: {ceb} vs {eb}"
        );
        let cfg = ChannelConfig::from_ebn0_db(plan.channel, ebn0_db, eb)?;

        let (subpacket_errors, symbol_errors) = (0..plan.trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = derive_trial_stream(plan.seed, point_index as u64, trial);
                let outcome = run_trial(&scenario, &c, &cfg, &mut rng);
                (
                    u64::from(!outcome.subpacket_correct),
                    u64::from(outcome.symbol_errors),
                )
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

        let symbol_trials = plan.trials * plan.r as u64;
        let ps = symbol_errors as f64 / symbol_trials as f64;
        let psub = subpacket_errors as f64 / plan.trials as f64;
        let est = analysis::bounds(ps, plan.r)?;
        points.push(SweepPoint {
            ebn0_db,
            theta_rad: theta,
            trials: plan.trials,
            ps,
            ps_stderr: stderr_or_rule_of_three(symbol_errors, symbol_trials),
            psub,
            psub_stderr: stderr_or_rule_of_three(subpacket_errors, plan.trials),
            lower_bound: est.lower,
            upper_bound: est.upper,
            r_times_ps: est.approx_simple,
            symbol_errors,
            subpacket_errors,
        });
    }
    Ok(SweepResult {
        plan: plan.clone(),
        points,
    })
}
