//! Closed-form machinery for the subpacket error rate.
//!
//! With r helpers and per-symbol error rate P_s, the subpacket error
//! rate decomposes over the number j of faulty helpers. A single
//! faulty helper can never cancel (its weighted error is nonzero), so
//!
//! ```text
//! r P_s (1 - P_s)^(r-1)  <=  P_sub  <=  1 - (1 - P_s)^r
//! ```
//!
//! and both bounds are asymptotically tight as P_s -> 0. The bounds
//! hold for any channel. Under a synthetic channel whose symbol errors
//! are uniform over the q - 1 nonzero field values, the cancellation
//! probability per j is exactly N_j / (q-1)^j, where N_j counts
//! j-tuples of nonzero elements summing to zero; this module computes
//! that exact value and cross-checks it by simulation, providing an
//! independent oracle for the Monte Carlo pipeline.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Bounds and approximations for P_sub evaluated at one symbol error
/// rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsubEstimates {
    pub ps: f64,
    pub r: u32,
    /// r·ps·(1-ps)^(r-1), exact when only single errors occur.
    pub lower: f64,
    /// 1 - (1-ps)^r, the probability of at least one symbol error.
    pub upper: f64,
    /// The first-order approximation r·ps.
    pub approx_simple: f64,
    /// upper / lower; tends to 1 as ps -> 0.
    pub ratio: f64,
}

fn validate_ps(ps: f64) -> Result<()> {
    if !ps.is_finite() || !(0.0..=1.0).contains(&ps) {
        return Err(Error::InvalidParameter {
            field: "ps",
            message: format!("symbol error rate {ps} outside [0, 1]"),
        });
    }
    Ok(())
}

fn validate_r(r: u32) -> Result<()> {
    if r == 0 {
        return Err(Error::InvalidParameter {
            field: "r",
            message: "repair locality must be at least 1".into(),
        });
    }
    Ok(())
}

/// Evaluates the lower/upper bounds and the r·ps approximation at a
/// given symbol error rate.
pub fn bounds(ps: f64, r: u32) -> Result<PsubEstimates> {
    validate_ps(ps)?;
    validate_r(r)?;
    let rf = r as f64;
    let lower = rf * ps * (1.0 - ps).powi(r as i32 - 1);
    // 1 - (1-p)^r without cancellation at small p; exact for r = 1.
    let upper = if r == 1 {
        ps
    } else {
        -(rf * (-ps).ln_1p()).exp_m1()
    };
    let ratio = if lower == 0.0 {
        if upper == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        upper / lower
    };
    Ok(PsubEstimates {
        ps,
        r,
        lower,
        upper,
        approx_simple: rf * ps,
        ratio,
    })
}

/// upper/lower ratios along a strictly decreasing sequence of symbol
/// error rates in (0, 1).
pub fn ratio_convergence(r: u32, ps_sequence: &[f64]) -> Result<Vec<f64>> {
    validate_r(r)?;
    for &ps in ps_sequence {
        if !ps.is_finite() || ps <= 0.0 || ps >= 1.0 {
            return Err(Error::InvalidParameter {
                field: "ps_sequence",
                message: format!("value {ps} outside (0, 1)"),
            });
        }
    }
    for w in ps_sequence.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::InvalidParameter {
                field: "ps_sequence",
                message: format!(
                    "sequence must be strictly decreasing, got {} then {}",
                    w[0], w[1]
                ),
            });
        }
    }
    ps_sequence
        .iter()
        .map(|&ps| Ok(bounds(ps, r)?.ratio))
        .collect()
}

fn validate_q(q: u32) -> Result<()> {
    if q < 2 || !q.is_power_of_two() {
        return Err(Error::InvalidParameter {
            field: "q",
            message: format!("field size {q} is not a power of two >= 2"),
        });
    }
    Ok(())
}

/// Largest tuple space enumerated exhaustively; beyond it the counting
/// recurrence takes over.
const ENUM_LIMIT: u64 = 10_000_000;

/// Number of ordered j-tuples of nonzero GF(q) elements that XOR to
/// zero, by direct enumeration. Only valid when (q-1)^j fits the
/// enumeration budget.
fn enumerate_zero_sum_tuples(q: u32, j: u32) -> u64 {
    fn count(q: u32, depth: u32, acc: u32) -> u64 {
        if depth == 0 {
            return u64::from(acc == 0);
        }
        (1..q).map(|e| count(q, depth - 1, acc ^ e)).sum()
    }
    count(q, j, 0)
}

/// Probability that j independent errors, each uniform over the q-1
/// nonzero field values, sum to zero.
///
/// Enumerates the tuple space when feasible; otherwise uses the
/// recurrence c_1 = 0, c_j = (1 - c_(j-1)) / (q - 1), which the test
/// suite validates against enumeration on the overlap.
pub fn cancellation_probability(q: u32, j: u32) -> Result<f64> {
    validate_q(q)?;
    if j == 0 {
        return Err(Error::InvalidParameter {
            field: "j",
            message: "at least one error term is required".into(),
        });
    }
    let space = (q as u64 - 1).checked_pow(j);
    if let Some(space) = space.filter(|&s| s <= ENUM_LIMIT) {
        return Ok(enumerate_zero_sum_tuples(q, j) as f64 / space as f64);
    }
    let mut c = 0.0;
    for _ in 2..=j {
        c = (1.0 - c) / (q as f64 - 1.0);
    }
    Ok(c)
}

fn binomial(r: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (r - i) as f64 / (i + 1) as f64)
}

/// Exact P_sub for the uniform-error channel: each of the r symbols is
/// independently wrong with probability ps, and a wrong symbol's error
/// is uniform over the nonzero field values. Nonzero combination
/// coefficients leave that distribution unchanged, so the result does
/// not depend on them.
pub fn exact_psub_uniform(ps: f64, r: u32, q: u32) -> Result<f64> {
    validate_ps(ps)?;
    validate_r(r)?;
    validate_q(q)?;
    let mut total = 0.0;
    for j in 1..=r {
        let weight =
            binomial(r, j) * ps.powi(j as i32) * (1.0 - ps).powi((r - j) as i32);
        total += weight * (1.0 - cancellation_probability(q, j)?);
    }
    Ok(total)
}

/// Outcome of checking the Monte Carlo estimate against the exact
/// uniform-error value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
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

/// Simulates the uniform-error channel and compares the estimated
/// P_sub with [`exact_psub_uniform`] at a 4-standard-error tolerance.
pub fn empirical_psub_matches_oracle<R: Rng + ?Sized>(
    q: u32,
    r: u32,
    ps: f64,
    trials: u64,
    rng: &mut R,
) -> Result<OracleCheck> {
    let exact = exact_psub_uniform(ps, r, q)?;
    if trials == 0 {
        return Err(Error::InvalidParameter {
            field: "trials",
            message: "at least one trial is required".into(),
        });
    }
    let mut errors = 0u64;
    for _ in 0..trials {
        let mut acc = 0u32;
        for _ in 0..r {
            if rng.random::<f64>() < ps {
                acc ^= rng.random_range(1..q);
            }
        }
        if acc != 0 {
            errors += 1;
        }
    }
    let empirical = errors as f64 / trials as f64;
    let stderr = (exact * (1.0 - exact) / trials as f64).sqrt();
    let sigmas = if stderr > 0.0 {
        (empirical - exact).abs() / stderr
    } else if empirical == exact {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(OracleCheck {
        q,
        r,
        ps,
        trials,
        empirical,
        exact,
        stderr,
        sigmas,
        pass: sigmas <= 4.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bounds_vanish_at_zero_error_rate() {
        for r in [1u32, 2, 6] {
            let b = bounds(0.0, r).unwrap();
            assert_eq!(b.lower, 0.0);
            assert_eq!(b.upper, 0.0);
            assert_eq!(b.approx_simple, 0.0);
            assert_eq!(b.ratio, 1.0);
        }
    }

    #[test]
    fn bounds_coincide_for_locality_one() {
        for ps in [1e-9, 1e-3, 0.4, 0.999] {
            let b = bounds(ps, 1).unwrap();
            assert_eq!(b.lower, ps);
            assert_eq!(b.upper, ps);
            assert_eq!(b.ratio, 1.0);
        }
    }

    #[test]
    fn bounds_worked_example() {
        let b = bounds(0.1, 2).unwrap();
        assert!((b.lower - 0.18).abs() < 1e-15);
        assert!((b.upper - 0.19).abs() < 1e-12); // 1 - 0.81
        assert!((b.approx_simple - 0.2).abs() < 1e-15);
    }

    #[test]
    fn bounds_are_ordered_and_within_unit_interval() {
        for r in 1..=8 {
            for k in 0..100 {
                let ps = k as f64 / 100.0;
                let b = bounds(ps, r).unwrap();
                assert!(0.0 <= b.lower && b.lower <= b.upper && b.upper <= 1.0, "ps={ps} r={r}");
            }
        }
    }

    #[test]
    fn lower_over_r_ps_is_the_power_identity() {
        // lower / (r·ps) = (1-ps)^(r-1), the final step of the
        // asymptotic argument.
        for r in [2u32, 3, 6] {
            for ps in [1e-4, 1e-2, 0.3] {
                let b = bounds(ps, r).unwrap();
                let lhs = b.lower / (r as f64 * ps);
                let rhs = (1.0 - ps).powi(r as i32 - 1);
                assert!((lhs - rhs).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bounds_reject_bad_domains() {
        assert!(bounds(-0.1, 2).is_err());
        assert!(bounds(1.5, 2).is_err());
        assert!(bounds(f64::NAN, 2).is_err());
        assert!(bounds(0.1, 0).is_err());
    }

    #[test]
    fn ratio_is_one_for_locality_one() {
        let ratios = ratio_convergence(1, &[0.3, 0.1, 0.01]).unwrap();
        assert!(ratios.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn ratio_decreases_to_one_and_is_small_at_1e3() {
        let ps: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
        let ratios = ratio_convergence(6, &ps).unwrap();
        for w in ratios.windows(2) {
            assert!(w[1] < w[0]);
        }
        // direct evaluation: (1 - 0.999^6) / (6e-3 · 0.999^5)
        assert!((ratios[2] - 1.0).abs() < 5e-3);
        assert!(ratios.last().unwrap() - 1.0 < 1e-5);
    }

    #[test]
    fn higher_order_terms_vanish_term_by_term() {
        // For j >= 2, C(r,j) p^(j-1) (1-p)^(1-j) / r -> 0 as p -> 0.
        let r = 6u32;
        for j in 2..=r {
            let mut prev = f64::INFINITY;
            for k in 1..=6 {
                let p = 10f64.powi(-k);
                let term = binomial(r, j) * p.powi(j as i32 - 1)
                    / ((1.0 - p).powi(j as i32 - 1) * r as f64);
                assert!(term < prev);
                prev = term;
            }
            assert!(prev < 1e-4, "j={j} term {prev}");
        }
    }

    #[test]
    fn ratio_convergence_rejects_bad_sequences() {
        assert!(ratio_convergence(2, &[0.1, 0.1]).is_err());
        assert!(ratio_convergence(2, &[0.1, 0.2]).is_err());
        assert!(ratio_convergence(2, &[0.5, 0.0]).is_err());
        assert!(ratio_convergence(2, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn single_error_never_cancels() {
        for q in [4u32, 16, 64, 256] {
            assert_eq!(cancellation_probability(q, 1).unwrap(), 0.0);
        }
    }

    #[test]
    fn recurrence_matches_enumeration() {
        // Force both paths and compare where enumeration is feasible.
        for (q, max_j) in [(4u32, 10u32), (16, 5), (64, 3)] {
            let mut c_rec = 0.0;
            for j in 1..=max_j {
                if j > 1 {
                    c_rec = (1.0 - c_rec) / (q as f64 - 1.0);
                }
                let space = (q as u64 - 1).pow(j);
                let c_enum = enumerate_zero_sum_tuples(q, j) as f64 / space as f64;
                assert!(
                    (c_rec - c_enum).abs() < 1e-12,
                    "q={q} j={j}: recurrence {c_rec} vs enumeration {c_enum}"
                );
                assert!((cancellation_probability(q, j).unwrap() - c_enum).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gf4_pair_count_is_three() {
        // pairs (a, a) for the three nonzero elements
        assert_eq!(enumerate_zero_sum_tuples(4, 2), 3);
    }

    #[test]
    fn exact_psub_worked_example() {
        let x = exact_psub_uniform(0.1, 2, 4).unwrap();
        let expected = 0.18 + 0.01 * (1.0 - 3.0 / 9.0);
        assert!((x - expected).abs() < 1e-15);
        assert!((x - 0.1866667).abs() < 1e-7);
    }

    #[test]
    fn exact_psub_stays_within_the_bounds() {
        for q in [4u32, 16, 64] {
            for r in [1u32, 2, 3, 6] {
                for ps in [0.0, 0.01, 0.1, 0.3, 0.5, 0.9] {
                    let x = exact_psub_uniform(ps, r, q).unwrap();
                    let b = bounds(ps, r).unwrap();
                    assert!(
                        b.lower - 1e-12 <= x && x <= b.upper + 1e-12,
                        "q={q} r={r} ps={ps}: {x} outside [{}, {}]",
                        b.lower,
                        b.upper
                    );
                }
            }
        }
    }

    #[test]
    fn exact_psub_increases_with_locality() {
        for q in [4u32, 16] {
            for ps in [0.01, 0.1, 0.3, 0.49] {
                let mut prev = 0.0;
                for r in 1..=8 {
                    let x = exact_psub_uniform(ps, r, q).unwrap();
                    assert!(x > prev, "q={q} ps={ps} r={r}");
                    prev = x;
                }
            }
        }
    }

    #[test]
    fn empirical_estimate_matches_the_exact_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let check = empirical_psub_matches_oracle(4, 2, 0.1, 200_000, &mut rng).unwrap();
        assert!(check.pass, "off by {} sigma", check.sigmas);
        assert!((check.exact - 0.1866667).abs() < 1e-7);
    }

    #[test]
    fn empirical_estimate_with_zero_error_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let check = empirical_psub_matches_oracle(4, 3, 0.0, 10_000, &mut rng).unwrap();
        assert_eq!(check.empirical, 0.0);
        assert!(check.pass);
    }

    #[test]
    fn conditional_cancellation_frequency_matches_by_error_count() {
        // Tally trials by the number j of faulty symbols and compare
        // the fraction that still reconstruct correctly with the
        // exact per-j cancellation probability.
        let (q, r, ps, trials) = (4u32, 6u32, 0.3, 200_000u64);
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let mut counts = vec![0u64; r as usize + 1];
        let mut cancels = vec![0u64; r as usize + 1];
        for _ in 0..trials {
            let mut acc = 0u32;
            let mut j = 0usize;
            for _ in 0..r {
                if rng.random::<f64>() < ps {
                    acc ^= rng.random_range(1..q);
                    j += 1;
                }
            }
            counts[j] += 1;
            if j > 0 && acc == 0 {
                cancels[j] += 1;
            }
        }
        for j in 2..=r as usize {
            if counts[j] < 1_000 {
                continue;
            }
            let expected = cancellation_probability(q, j as u32).unwrap();
            let freq = cancels[j] as f64 / counts[j] as f64;
            let sigma = (expected * (1.0 - expected) / counts[j] as f64).sqrt();
            assert!(
                (freq - expected).abs() <= 4.0 * sigma,
                "j={j}: {freq} vs {expected} (4σ = {})",
                4.0 * sigma
            );
        }
    }

    #[test]
    fn oracle_validation_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(empirical_psub_matches_oracle(5, 2, 0.1, 10, &mut rng).is_err());
        assert!(empirical_psub_matches_oracle(4, 0, 0.1, 10, &mut rng).is_err());
        assert!(empirical_psub_matches_oracle(4, 2, 0.1, 0, &mut rng).is_err());
        assert!(exact_psub_uniform(0.1, 2, 3).is_err());
        assert!(cancellation_probability(4, 0).is_err());
    }
}
