//! The noisy link between a helper node and the newcomer.
//!
//! Each transmitted symbol x = (x1, x2) is received as
//! y_j = h_j x_j + z_j for j = 1, 2, with independent per-component
//! fade coefficients h_j (fixed at 1 for AWGN, Rayleigh with
//! E[h²] = 1 otherwise) and independent Gaussian noise of variance
//! N0/2 per component. The receiver knows the fades and performs ML
//! decoding over the constellation.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::constellation::Constellation;
use crate::gf::FieldElement;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Awgn,
    Rayleigh,
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChannelKind::Awgn => write!(f, "awgn"),
            ChannelKind::Rayleigh => write!(f, "rayleigh"),
        }
    }
}

/// Channel kind plus noise spectral density N0 (variance N0/2 per
/// component). N0 = 0 is the noiseless limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    kind: ChannelKind,
    n0: f64,
}

impl ChannelConfig {
    pub fn new(kind: ChannelKind, n0: f64) -> Result<Self> {
        if !n0.is_finite() || n0 < 0.0 {
            return Err(Error::InvalidParameter {
                field: "n0",
                message: format!("noise level {n0} must be finite and >= 0"),
            });
        }
        Ok(ChannelConfig { kind, n0 })
    }

    /// Derives N0 from a target E_b/N_0 in dB and the constellation's
    /// average energy per bit.
    pub fn from_ebn0_db(kind: ChannelKind, ebn0_db: f64, eb: f64) -> Result<Self> {
        if !ebn0_db.is_finite() {
            return Err(Error::InvalidParameter {
                field: "ebn0_db",
                message: format!("{ebn0_db} is not finite"),
            });
        }
        if !eb.is_finite() || eb <= 0.0 {
            return Err(Error::InvalidParameter {
                field: "eb",
                message: format!("energy per bit {eb} must be positive"),
            });
        }
        ChannelConfig::new(kind, eb / 10f64.powf(ebn0_db / 10.0))
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }
}

/// One received symbol: the two observed components and the two fade
/// coefficients the receiver knows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelObservation {
    pub y: [f64; 2],
    pub h: [f64; 2],
}

/// Unit-mean-square Rayleigh draw: the magnitude of a circular
/// Gaussian, sqrt(g1² + g2²) / sqrt(2).
fn rayleigh_fade<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let g1: f64 = rng.sample(StandardNormal);
    let g2: f64 = rng.sample(StandardNormal);
    ((g1 * g1 + g2 * g2) / 2.0).sqrt()
}

/// Sends one constellation point through the channel. Draw order is
/// fixed (h1, h2, then z1, z2) so a seeded stream reproduces the
/// observation exactly.
pub fn transmit<R: Rng + ?Sized>(
    x: Complex64,
    cfg: &ChannelConfig,
    rng: &mut R,
) -> ChannelObservation {
    let h = match cfg.kind {
        ChannelKind::Awgn => [1.0, 1.0],
        ChannelKind::Rayleigh => [rayleigh_fade(rng), rayleigh_fade(rng)],
    };
    let sigma = (cfg.n0 / 2.0).sqrt();
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    ChannelObservation {
        y: [h[0] * x.re + sigma * z1, h[1] * x.im + sigma * z2],
        h,
    }
}

/// ML decoding with known fades: the field element whose point
/// minimizes Σ_j (y_j − h_j x_j)². Ties break to the lowest point
/// index.
pub fn ml_decode(obs: &ChannelObservation, c: &Constellation) -> FieldElement {
    let mut best = 0usize;
    let mut best_metric = f64::INFINITY;
    for (idx, p) in c.points().iter().enumerate() {
        let d1 = obs.y[0] - obs.h[0] * p.re;
        let d2 = obs.y[1] - obs.h[1] * p.im;
        let metric = d1 * d1 + d2 * d2;
        if metric < best_metric {
            best_metric = metric;
            best = idx;
        }
    }
    c.unlift(best).expect("point index within constellation")
}

/// A Monte Carlo symbol error rate estimate with its binomial
/// standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerEstimate {
    pub p: f64,
    pub stderr: f64,
    pub trials: u64,
    pub errors: u64,
}

/// Estimates P_s = P(decoded != transmitted) with symbols drawn
/// uniformly from the field.
pub fn symbol_error_rate<R: Rng + ?Sized>(
    cfg: &ChannelConfig,
    c: &Constellation,
    trials: u64,
    rng: &mut R,
) -> Result<SerEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            field: "trials",
            message: "at least one trial is required".into(),
        });
    }
    let mut errors = 0u64;
    for _ in 0..trials {
        let w = FieldElement::from_raw(rng.random_range(0..c.q()));
        let x = c.lift(w).expect("uniform draw below q");
        let obs = transmit(x, cfg, rng);
        if ml_decode(&obs, c) != w {
            errors += 1;
        }
    }
    let p = errors as f64 / trials as f64;
    Ok(SerEstimate {
        p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        trials,
        errors,
    })
}
