//! Rotation design for fading links.
//!
//! Over a per-component Rayleigh channel the pairwise error
//! probability between constellation points x and y is controlled by
//!
//! ```text
//! s(x, y) = Π_i 1 / (1 + (E_s/4N_0) |x_i - y_i|²)
//! ```
//!
//! together with a matching lower bound P_L(x, y). Two design
//! objectives follow: the plain pair sum f2(θ) = Σ_{x≠y} s(x, y), and
//! f1(θ) = f2(θ) · (1 - min P_L)^(r-1), which folds in the repair
//! locality. Both are minimized over θ ∈ [0, π/2] by a uniform grid
//! scan refined with golden-section search; the sums run over ordered
//! distinct pairs (the factor 2 cannot move the argmin).

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constellation::Constellation;
use crate::{Error, Result};

/// Default number of θ samples in [0, π/2].
pub const DEFAULT_THETA_GRID: usize = 1024;

/// Width at which golden-section refinement stops, in radians.
const REFINE_TOL: f64 = 1e-5;

/// Which design objective to minimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Pair sum weighted by the locality term (1 - min P_L)^(r-1).
    F1,
    /// Plain pairwise bound sum.
    F2,
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Objective::F1 => write!(f, "f1"),
            Objective::F2 => write!(f, "f2"),
        }
    }
}

/// Inputs of one rotation search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationObjectiveConfig {
    pub q: u32,
    /// Repair locality; only f1 uses it.
    pub r: u32,
    /// The SNR parameter E_s/(4 N_0) inside s and δ.
    pub es_over_4n0: f64,
    /// Number of grid samples in [0, π/2].
    pub grid: usize,
}

/// Result of one rotation search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationResult {
    pub theta_star: f64,
    pub objective_value: f64,
    pub objective_kind: Objective,
    /// The (θ, objective) samples of the grid scan.
    pub full_profile: Vec<(f64, f64)>,
}

/// The per-pair factor of the union bound.
pub fn s_factor(x: Complex64, y: Complex64, es_over_4n0: f64) -> f64 {
    let d1 = x.re - y.re;
    let d2 = x.im - y.im;
    1.0 / ((1.0 + es_over_4n0 * d1 * d1) * (1.0 + es_over_4n0 * d2 * d2))
}

/// The diversity quantity δ ∈ [0, 1) entering the pairwise lower
/// bound: the larger coordinate's sqrt(t / (1 + t)) with
/// t = (E_s/4N_0) |x_i - y_i|².
pub fn delta(x: Complex64, y: Complex64, es_over_4n0: f64) -> f64 {
    let term = |d: f64| {
        let t = es_over_4n0 * d * d;
        (t / (1.0 + t)).sqrt()
    };
    term(x.re - y.re).max(term(x.im - y.im))
}

/// Pairwise error probability lower bound
/// (1/4) (1/(1+δ) + 1/(1+δ)²) s(x, y). Interpreting it as a true
/// lower bound requires a full-diversity rotation; the formula itself
/// is defined for every pair.
pub fn p_lower(x: Complex64, y: Complex64, es_over_4n0: f64) -> f64 {
    let d = delta(x, y, es_over_4n0);
    let inv = 1.0 / (1.0 + d);
    0.25 * (inv + inv * inv) * s_factor(x, y, es_over_4n0)
}

/// Pair-sum objective: Σ s(x, y) over ordered distinct pairs.
pub fn f2(c: &Constellation, es_over_4n0: f64) -> f64 {
    let pts = c.points();
    let mut total = 0.0;
    for (i, &x) in pts.iter().enumerate() {
        for (j, &y) in pts.iter().enumerate() {
            if i != j {
                total += s_factor(x, y, es_over_4n0);
            }
        }
    }
    total
}

/// Smallest P_L over ordered distinct pairs.
pub fn min_p_lower(c: &Constellation, es_over_4n0: f64) -> f64 {
    let pts = c.points();
    let mut best = f64::INFINITY;
    for (i, &x) in pts.iter().enumerate() {
        for (j, &y) in pts.iter().enumerate() {
            if i != j {
                best = best.min(p_lower(x, y, es_over_4n0));
            }
        }
    }
    best
}

/// Locality-weighted objective f2 · (1 - min P_L)^(r-1). Requires
/// r >= 1.
pub fn f1(c: &Constellation, es_over_4n0: f64, r: u32) -> f64 {
    debug_assert!(r >= 1, "repair locality must be at least 1");
    f2(c, es_over_4n0) * (1.0 - min_p_lower(c, es_over_4n0)).powi(r as i32 - 1)
}

/// E_s/(4 N_0) at a target E_b/N_0 in dB: with E_s = E_b log2(q) the
/// scale of E_b drops out, leaving log2(q)/4 · 10^(dB/10).
pub fn es_over_4n0_from_ebn0_db(q: u32, ebn0_db: f64) -> Result<f64> {
    if q < 2 || !q.is_power_of_two() {
        return Err(Error::InvalidParameter {
            field: "q",
            message: format!("{q} is not a power of two >= 2"),
        });
    }
    if !ebn0_db.is_finite() {
        return Err(Error::InvalidParameter {
            field: "ebn0_db",
            message: format!("{ebn0_db} is not finite"),
        });
    }
    Ok(q.trailing_zeros() as f64 / 4.0 * 10f64.powf(ebn0_db / 10.0))
}

fn validate_config(cfg: &RotationObjectiveConfig, objective: Objective) -> Result<()> {
    if cfg.grid < 2 {
        return Err(Error::InvalidParameter {
            field: "grid",
            message: format!("{} samples; at least 2 are required", cfg.grid),
        });
    }
    if !cfg.es_over_4n0.is_finite() || cfg.es_over_4n0 <= 0.0 {
        return Err(Error::InvalidParameter {
            field: "es_over_4n0",
            message: format!("{} must be positive", cfg.es_over_4n0),
        });
    }
    if objective == Objective::F1 && cfg.r == 0 {
        return Err(Error::InvalidParameter {
            field: "r",
            message: "repair locality must be at least 1".into(),
        });
    }
    Ok(())
}

/// Minimizes the chosen objective over θ ∈ [0, π/2]: a uniform grid
/// scan picks the bracketing interval, golden-section search refines
/// it to 1e-5 rad. Fully deterministic.
pub fn optimize_rotation(
    cfg: &RotationObjectiveConfig,
    objective: Objective,
) -> Result<RotationResult> {
    validate_config(cfg, objective)?;
    // validates q once; later evaluations cannot fail
    Constellation::build_qam(cfg.q, 0.0)?;
    let eval = |theta: f64| -> f64 {
        let c = Constellation::build_qam(cfg.q, theta).expect("validated q and theta");
        match objective {
            Objective::F1 => f1(&c, cfg.es_over_4n0, cfg.r),
            Objective::F2 => f2(&c, cfg.es_over_4n0),
        }
    };

    let n = cfg.grid;
    let step = FRAC_PI_2 / (n - 1) as f64;
    let full_profile: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let theta = (k as f64 * step).min(FRAC_PI_2);
            (theta, eval(theta))
        })
        .collect();
    let k_min = full_profile
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).expect("finite objective"))
        .map(|(k, _)| k)
        .expect("non-empty grid");

    let (mut best_theta, mut best_value) = full_profile[k_min];
    let mut a = full_profile[k_min.saturating_sub(1)].0;
    let mut b = full_profile[(k_min + 1).min(n - 1)].0;

    // golden-section refinement inside the bracketing interval
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut v1 = eval(x1);
    let mut v2 = eval(x2);
    while b - a > REFINE_TOL {
        if v1 < v2 {
            b = x2;
            x2 = x1;
            v2 = v1;
            x1 = b - INV_PHI * (b - a);
            v1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            v1 = v2;
            x2 = a + INV_PHI * (b - a);
            v2 = eval(x2);
        }
    }
    for (theta, value) in [(x1, v1), (x2, v2)] {
        if value < best_value {
            best_theta = theta;
            best_value = value;
        }
    }

    Ok(RotationResult {
        theta_star: best_theta,
        objective_value: best_value,
        objective_kind: objective,
        full_profile,
    })
}
