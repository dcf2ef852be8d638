use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // redundant whenever std is in the build graph
use num_traits::Float;
use rand_distr::{Distribution, StandardNormal};

use crate::rng::SimRng;

/// How often the Rician coefficient is redrawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fading {
    /// One coefficient per call (per packet).
    Block,
    /// Independent coefficient per symbol.
    PerSymbol,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel {
    Awgn,
    Rician { k_db: f64, fading: Fading },
}

impl ChannelModel {
    pub fn rician(k_db: f64) -> Self {
        Self::Rician {
            k_db,
            fading: Fading::Block,
        }
    }
}

/// Equalized received symbols, `y / h`, with the complex noise variance
/// each one carries after equalization (`N0 / |h|^2`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelOutput {
    pub symbols: Vec<Complex64>,
    pub noise_var: Vec<f64>,
}

#[inline]
fn complex_normal(rng: &mut SimRng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Rician coefficient with `E|h|^2 = 1`.
fn rician_gain(k: f64, rng: &mut SimRng) -> Complex64 {
    let los = (k / (k + 1.0)).sqrt();
    let scatter = (1.0 / (k + 1.0)).sqrt() * core::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(los, 0.0) + complex_normal(rng) * scatter
}

/// Passes unit-energy symbols through the channel at `esn0_db` and
/// equalizes with perfect CSI. `esn0_db = +inf` is noiseless and draws no
/// randomness.
pub fn channel_apply(symbols: &[Complex64], ch: &ChannelModel, esn0_db: f64, rng: &mut SimRng) -> ChannelOutput {
    if esn0_db == f64::INFINITY {
        return ChannelOutput {
            symbols: symbols.to_vec(),
            noise_var: alloc::vec![0.0; symbols.len()],
        };
    }
    let n0 = libm::pow(10.0, -esn0_db / 10.0);
    let sigma = (n0 / 2.0).sqrt();
    let mut out = Vec::with_capacity(symbols.len());
    let mut noise_var = Vec::with_capacity(symbols.len());
    match *ch {
        ChannelModel::Awgn => {
            for &x in symbols {
                out.push(x + complex_normal(rng) * sigma);
                noise_var.push(n0);
            }
        }
        ChannelModel::Rician { k_db, fading } => {
            let k = libm::pow(10.0, k_db / 10.0);
            let mut h = rician_gain(k, rng);
            for (i, &x) in symbols.iter().enumerate() {
                if fading == Fading::PerSymbol && i > 0 {
                    h = rician_gain(k, rng);
                }
                let y = h * x + complex_normal(rng) * sigma;
                out.push(y / h);
                noise_var.push(n0 / h.norm_sqr());
            }
        }
    }
    ChannelOutput {
        symbols: out,
        noise_var,
    }
}
