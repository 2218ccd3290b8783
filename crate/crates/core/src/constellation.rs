//! Gray-labeled square QAM constellations and the bijective lift
//! between field elements and signal points.
//!
//! Points sit on the unit-spacing grid {±1, ±3, ...}² and may be
//! rotated counter-clockwise by an angle in [0, π/2]. The label of a
//! point splits its m bits per axis: the high m/2 bits select the real
//! (I) coordinate and the low m/2 bits the imaginary (Q) coordinate,
//! each through a reflected binary code, so grid neighbors differ in
//! exactly one bit. SNR is injected through the noise level rather
//! than by rescaling points, which keeps objective profiles comparable
//! across rotation angles.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::gf::FieldElement;
use crate::{Error, Result};

/// Constellation sizes with a square grid and a whole number of bits
/// per axis.
pub const SUPPORTED_SIZES: [u32; 3] = [4, 16, 64];

/// A q-point square QAM constellation with Gray labeling, rotated by
/// `theta` radians.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    q: u32,
    m: u32,
    theta: f64,
    /// Points in grid order (I-major), after rotation.
    points: Vec<Complex64>,
    /// labels[index] = field element value of the point.
    labels: Vec<u32>,
    /// index_of_label[value] = point index.
    index_of_label: Vec<usize>,
    eb: f64,
    es: f64,
}

fn gray(x: u32) -> u32 {
    x ^ (x >> 1)
}

impl Constellation {
    /// Builds the rotated, Gray-labeled q-QAM constellation.
    pub fn build_qam(q: u32, theta: f64) -> Result<Self> {
        if !SUPPORTED_SIZES.contains(&q) {
            return Err(Error::UnsupportedConstellationSize { q });
        }
        if !theta.is_finite() || !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidParameter {
                field: "theta",
                message: format!("rotation angle {theta} outside [0, pi/2]"),
            });
        }
        let m = q.trailing_zeros();
        let half = m / 2;
        let k = 1u32 << half;
        let rot = Complex64::from_polar(1.0, theta);

        let mut points = Vec::with_capacity(q as usize);
        let mut labels = Vec::with_capacity(q as usize);
        for i in 0..k {
            for j in 0..k {
                let re = (2 * i as i32 - (k as i32 - 1)) as f64;
                let im = (2 * j as i32 - (k as i32 - 1)) as f64;
                points.push(Complex64::new(re, im) * rot);
                labels.push((gray(i) << half) | gray(j));
            }
        }
        let mut index_of_label = vec![0usize; q as usize];
        for (idx, &label) in labels.iter().enumerate() {
            index_of_label[label as usize] = idx;
        }
        let es = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / q as f64;
        let eb = es / m as f64;

        Ok(Constellation {
            q,
            m,
            theta,
            points,
            labels,
            index_of_label,
            eb,
            es,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Bits per symbol, log2(q).
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Points in a fixed grid order; indices are the decoder's
    /// tie-break order.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// The signal point carrying field element `w`.
    pub fn lift(&self, w: FieldElement) -> Result<Complex64> {
        let value = w.value();
        if value >= self.q {
            return Err(Error::ElementOutOfRange {
                value,
                q: self.q,
            });
        }
        Ok(self.points[self.index_of_label[value as usize]])
    }

    /// The field element labeling the point at `index`.
    pub fn unlift(&self, index: usize) -> Result<FieldElement> {
        if index >= self.points.len() {
            return Err(Error::IndexOutOfRange {
                what: "point",
                index,
                len: self.points.len(),
            });
        }
        Ok(FieldElement::from_raw(self.labels[index]))
    }

    /// Average energy per bit, Σ ||x||² / (q log2 q). Invariant under
    /// rotation.
    pub fn energy_per_bit(&self) -> f64 {
        self.eb
    }

    /// Average energy per symbol, E_b · log2(q).
    pub fn energy_per_symbol(&self) -> f64 {
        self.es
    }
}
