//! Conceptual-space semantic communication, without the standard library.
//!
//! The crate models a semantic link end to end:
//!
//! - [`space`]: conceptual spaces made of domains and quality dimensions, and
//!   the semantic distortion measured between two points;
//! - [`decode`]: concept prototypes, minimum-distance decoding and the safe
//!   decoding radius `tau` around each prototype;
//! - [`bounds`]: upper bounds on the semantic error probability and the
//!   hypoexponential design solver;
//! - [`encoders`]: a prototype-plus-Gaussian-noise semantic encoder;
//! - [`phy`]: quantization, a K=7 convolutional code with Viterbi decoding,
//!   Gray-mapped BPSK/16-QAM/256-QAM and AWGN/Rician channels;
//! - [`sim`]: the Monte Carlo harness tying everything together.
//!
//! Everything is deterministic given a seed. Random substreams are derived
//! with [`rng::substream`], so results do not depend on how work is split.
#![no_std]
#![warn(missing_debug_implementations)]
// validation uses `!(x > lo)` so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// tests compare against decimal literals quoted to seven places
#![cfg_attr(test, allow(clippy::approx_constant))]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod decode;
pub mod encoders;
mod error;
pub mod phy;
pub mod rng;
pub mod sim;
pub mod space;

pub use error::{Error, Result};
