//! Seedable random test data with magnitudes bounded so that layer-sized
//! accumulations stay far from the 24-bit saturation range. Used by the
//! validation commands and the test suites.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::fixed::{Fixed16, QFormat};
use crate::model::layer::{ConvLayerConfig, FcLayerConfig};
use crate::model::tensor::{FilterBank, Matrix, Tensor3};

/// Activation raw magnitude bound (+-16.0 in Q13.2).
pub const ACT_RAW_BOUND: i16 = 64;
/// Weight raw magnitude bound (+-1/16 in Q0.15); keeps each aligned
/// product within +-4 accumulator counts.
pub const WEIGHT_RAW_BOUND: i16 = 2048;
/// Bias raw magnitude bound.
pub const BIAS_RAW_BOUND: i16 = 256;

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn random_activation(rng: &mut impl Rng) -> Fixed16 {
    Fixed16::from_raw(
        rng.gen_range(-ACT_RAW_BOUND..=ACT_RAW_BOUND),
        QFormat::Activation,
    )
}

pub fn random_weight(rng: &mut impl Rng) -> Fixed16 {
    Fixed16::from_raw(
        rng.gen_range(-WEIGHT_RAW_BOUND..=WEIGHT_RAW_BOUND),
        QFormat::Weight,
    )
}

pub fn random_bias(rng: &mut impl Rng) -> Fixed16 {
    Fixed16::from_raw(
        rng.gen_range(-BIAS_RAW_BOUND..=BIAS_RAW_BOUND),
        QFormat::Activation,
    )
}

/// Random input tensor and filter bank for a convolutional layer.
pub fn random_conv_data(
    cfg: &ConvLayerConfig,
    rng: &mut impl Rng,
) -> (Tensor3<Fixed16>, FilterBank<Fixed16>) {
    let x = Tensor3::from_fn(cfg.h_in, cfg.w_in, cfg.c_in, |_, _, _| {
        random_activation(rng)
    });
    let biases: Vec<Fixed16> = (0..cfg.c_out).map(|_| random_bias(rng)).collect();
    let w = FilterBank::from_fn(
        cfg.h_f,
        cfg.w_f,
        cfg.c_in,
        cfg.c_out,
        |_, _, _, _| random_weight(rng),
        |q| biases[q],
    );
    (x, w)
}

/// Random input, weights and biases for a fully-connected layer.
pub fn random_fc_data(
    cfg: &FcLayerConfig,
    rng: &mut impl Rng,
) -> (Vec<Fixed16>, Matrix<Fixed16>, Vec<Fixed16>) {
    let x = (0..cfg.n).map(|_| random_activation(rng)).collect();
    let w = Matrix::from_fn(cfg.m, cfg.n, |_, _| random_weight(rng));
    let b = (0..cfg.m).map(|_| random_bias(rng)).collect();
    (x, w, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_are_reproducible_and_distinct() {
        let a: Vec<i16> = {
            let mut rng = rng_for(7, 0);
            (0..8).map(|_| random_activation(&mut rng).raw()).collect()
        };
        let b: Vec<i16> = {
            let mut rng = rng_for(7, 0);
            (0..8).map(|_| random_activation(&mut rng).raw()).collect()
        };
        let c: Vec<i16> = {
            let mut rng = rng_for(7, 1);
            (0..8).map(|_| random_activation(&mut rng).raw()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
