//! The syntactic link: quantization, channel coding, modulation and the
//! channel itself.
//!
//! A packet carries `reps_per_packet` semantic points. Each point is
//! quantized to fixed-point codes, the codes of all points are concatenated
//! (dimension-major within a point, points in order, most significant bit
//! first), protected by the rate-1/2 K=7 convolutional code, mapped onto a
//! Gray-coded constellation and sent through an AWGN or Rician channel with
//! perfect receiver CSI.

mod channel;
mod conv;
mod modulation;
mod packet;
mod quantize;

pub use channel::{channel_apply, ChannelModel, ChannelOutput, Fading};
pub use conv::{conv_encode, viterbi_decode, viterbi_decode_soft, CODE_RATE, GENERATORS, TAIL_BITS};
pub use modulation::{demodulate, demodulate_soft, modulate, Modulation};
pub use packet::{transmit_packet, Decision, PacketOutcome, PhyConfig};
pub use quantize::{dequantize, quantize, QuantizerSpec};

/// `Q(x)`, the standard normal upper tail.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}
