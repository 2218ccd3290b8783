//! Link-level analysis and Monte Carlo simulation of node repair in
//! distributed storage systems whose nodes communicate over noisy
//! wireless channels.
//!
//! A lost subpacket is rebuilt from `r` helper nodes as an
//! F_q-linear combination of their subpackets. When each helper symbol
//! travels over an AWGN or Rayleigh fading link, the rebuilt subpacket
//! is wrong whenever the transmission errors fail to cancel in the
//! field. This crate provides:
//!
//! - [`gf`]: arithmetic in GF(2^m), the subpacket alphabet;
//! - [`storage_code`]: the single-repair-group XOR storage layout and
//!   the reconstruction rule;
//! - [`constellation`]: Gray-labeled square QAM with rotation and the
//!   bijective lift between field elements and signal points;
//! - [`channel`]: AWGN / per-component Rayleigh links and ML decoding;
//! - [`analysis`]: exact expressions, bounds, and asymptotics for the
//!   subpacket error rate, with an independent uniform-error oracle;
//! - [`rotation_opt`]: rotation design objectives and their
//!   minimization over the rotation angle;
//! - [`simulator`]: the reproducible Monte Carlo sweep harness.

pub mod analysis;
pub mod channel;
pub mod constellation;
mod error;
pub mod gf;
pub mod rotation_opt;
pub mod simulator;
pub mod storage_code;

pub use error::{Error, Result};
