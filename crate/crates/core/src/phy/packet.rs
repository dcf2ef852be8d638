use alloc::vec::Vec;
#[allow(unused_imports)] // redundant whenever std is in the build graph
use num_traits::Float;

use super::channel::{channel_apply, ChannelModel};
use super::conv::{conv_encode, viterbi_decode, viterbi_decode_soft, CODE_RATE, TAIL_BITS};
use super::modulation::{demodulate, demodulate_soft, modulate, Modulation};
use super::quantize::{push_point_bits, read_point_bits, QuantizerSpec};
use crate::rng::SimRng;
use crate::space::{SemanticPoint, SpaceSpec};
use crate::{Error, Result};

/// Input the Viterbi decoder works from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Decision {
    #[default]
    Hard,
    /// Max-log LLRs from the demodulator.
    Soft,
}

/// Everything between the semantic encoder and the semantic decoder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhyConfig {
    pub quantizer: QuantizerSpec,
    pub modulation: Modulation,
    pub channel: ChannelModel,
    pub reps_per_packet: usize,
    pub decision: Decision,
}

impl Default for PhyConfig {
    fn default() -> Self {
        Self {
            quantizer: QuantizerSpec::default(),
            modulation: Modulation::Bpsk,
            channel: ChannelModel::Awgn,
            reps_per_packet: 20,
            decision: Decision::Hard,
        }
    }
}

impl PhyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps_per_packet == 0 {
            return Err(Error::InvalidConfig("reps_per_packet must be positive".into()));
        }
        if let ChannelModel::Rician { k_db, .. } = self.channel {
            if !k_db.is_finite() {
                return Err(Error::InvalidConfig("Rician K must be finite".into()));
            }
        }
        QuantizerSpec::new(self.quantizer.bits_per_dim()).map(|_| ())
    }

    /// Payload bits per packet before coding.
    pub fn payload_bits(&self, space: &SpaceSpec) -> usize {
        self.reps_per_packet * space.dimension_count() * self.quantizer.bits_per_dim() as usize
    }

    /// Coded bits per packet, including the tail.
    pub fn coded_bits(&self, space: &SpaceSpec) -> usize {
        2 * (self.payload_bits(space) + TAIL_BITS)
    }

    /// Es/N0 = Eb/N0 + 10 log10(bits per symbol * code rate).
    pub fn esn0_db(&self, ebn0_db: f64) -> f64 {
        ebn0_db + 10.0 * libm::log10(self.modulation.bits_per_symbol() as f64 * CODE_RATE)
    }
}

/// One packet's trip through the link.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketOutcome {
    pub reps: Vec<SemanticPoint>,
    /// Any decoded payload bit differs from the transmitted one.
    pub packet_error: bool,
    pub bit_errors: usize,
}

/// quantize -> concatenate -> encode -> modulate -> channel -> demodulate ->
/// decode -> split -> dequantize, for exactly `reps_per_packet` points.
///
/// Coded bits are zero-padded to a whole number of symbols; the padding is
/// dropped before decoding.
pub fn transmit_packet(
    space: &SpaceSpec,
    reps: &[SemanticPoint],
    phy: &PhyConfig,
    ebn0_db: f64,
    rng: &mut SimRng,
) -> Result<PacketOutcome> {
    if reps.len() != phy.reps_per_packet {
        return Err(Error::LengthMismatch {
            expected: phy.reps_per_packet,
            got: reps.len(),
        });
    }
    let q = &phy.quantizer;
    let mut payload = Vec::with_capacity(phy.payload_bits(space));
    for z in reps {
        push_point_bits(space, z.as_slice(), q, &mut payload)?;
    }
    let mut coded = conv_encode(&payload);
    let coded_len = coded.len();
    let k = phy.modulation.bits_per_symbol();
    coded.resize(coded_len.div_ceil(k) * k, 0);
    let symbols = modulate(&coded, phy.modulation)?;
    let rx = channel_apply(&symbols, &phy.channel, phy.esn0_db(ebn0_db), rng);
    let decoded = match phy.decision {
        Decision::Hard => {
            let mut bits = demodulate(&rx.symbols, phy.modulation);
            bits.truncate(coded_len);
            viterbi_decode(&bits)?
        }
        Decision::Soft => {
            let mut llr = demodulate_soft(&rx.symbols, &rx.noise_var, phy.modulation);
            llr.truncate(coded_len);
            viterbi_decode_soft(&llr)?
        }
    };
    let bit_errors = decoded.iter().zip(&payload).filter(|(a, b)| a != b).count();
    let per_rep = space.dimension_count() * q.bits_per_dim() as usize;
    let out = decoded
        .chunks_exact(per_rep)
        .map(|c| read_point_bits(space, c, q))
        .collect();
    Ok(PacketOutcome {
        reps: out,
        packet_error: bit_errors > 0,
        bit_errors,
    })
}
