//! Naive reference implementations of the convolutional and
//! fully-connected kernels, in real and fixed-point arithmetic. These are
//! the ground truth every simulator output is checked against, so they
//! stay as direct loop nests with no scheduling cleverness.
//!
//! Fixed-point accumulation follows the canonical order the hardware
//! model uses: input channel major, then filter row, then filter column,
//! with the bias seeding the accumulator. ReLU is applied once, after the
//! final accumulation, followed by requantization to the activation
//! format.

use crate::error::{Error, Result};
use crate::model::fixed::{mac, Acc24, Fixed16, QFormat};
use crate::model::layer::{ConvLayerConfig, FcLayerConfig};
use crate::model::tensor::{FilterBank, Matrix, Tensor3};

fn check_conv_shapes<T>(
    x: &Tensor3<T>,
    w: &FilterBank<T>,
    cfg: &ConvLayerConfig,
) -> Result<(usize, usize)> {
    cfg.validate()?;
    if x.height != cfg.h_in || x.width != cfg.w_in || x.channels != cfg.c_in {
        return Err(Error::ShapeMismatch(format!(
            "input {}x{}x{} does not match layer {}x{}x{}",
            x.height, x.width, x.channels, cfg.h_in, cfg.w_in, cfg.c_in
        )));
    }
    if w.h_f != cfg.h_f || w.w_f != cfg.w_f || w.c_in != cfg.c_in || w.c_out != cfg.c_out {
        return Err(Error::ShapeMismatch(format!(
            "filter bank {}x{}x{}x{} does not match layer {}x{}x{}x{}",
            w.h_f, w.w_f, w.c_in, w.c_out, cfg.h_f, cfg.w_f, cfg.c_in, cfg.c_out
        )));
    }
    Ok(cfg.output_dims())
}

/// Direct five-loop convolution in real arithmetic, followed by ReLU.
pub fn conv_forward_real(
    x: &Tensor3<f64>,
    w: &FilterBank<f64>,
    cfg: &ConvLayerConfig,
) -> Result<Tensor3<f64>> {
    let (h_out, w_out) = check_conv_shapes(x, w, cfg)?;
    let mut out = Tensor3::filled(h_out, w_out, cfg.c_out, 0.0);
    for q in 0..cfg.c_out {
        for z in 0..h_out {
            for t in 0..w_out {
                let mut sum = w.bias(q);
                for k in 0..cfg.c_in {
                    for j in 0..cfg.h_f {
                        for i in 0..cfg.w_f {
                            sum += x.get(z * cfg.s + j, t * cfg.s + i, k) * w.weight(j, i, k, q);
                        }
                    }
                }
                out.set(z, t, q, sum.max(0.0));
            }
        }
    }
    Ok(out)
}

/// Direct convolution on the fixed-point datapath. Saturation events are
/// counted into `saturations`; results are bit-exact against any engine
/// run with zero saturations.
pub fn conv_forward_fixed(
    x: &Tensor3<Fixed16>,
    w: &FilterBank<Fixed16>,
    cfg: &ConvLayerConfig,
    saturations: &mut u64,
) -> Result<Tensor3<Fixed16>> {
    let (h_out, w_out) = check_conv_shapes(x, w, cfg)?;
    let mut out = Tensor3::filled(h_out, w_out, cfg.c_out, Fixed16::zero(QFormat::Activation));
    for q in 0..cfg.c_out {
        for z in 0..h_out {
            for t in 0..w_out {
                let mut acc = Acc24::from_bias(w.bias(q));
                for k in 0..cfg.c_in {
                    for j in 0..cfg.h_f {
                        for i in 0..cfg.w_f {
                            let pixel = x.get(z * cfg.s + j, t * cfg.s + i, k);
                            acc = mac(acc, pixel, w.weight(j, i, k, q), saturations);
                        }
                    }
                }
                out.set(z, t, q, acc.relu().to_activation(saturations));
            }
        }
    }
    Ok(out)
}

fn check_fc_shapes<T>(
    x_len: usize,
    w: &Matrix<T>,
    b_len: usize,
    cfg: &FcLayerConfig,
) -> Result<()> {
    if x_len != cfg.n || w.cols != cfg.n || w.rows != cfg.m || b_len != cfg.m {
        return Err(Error::ShapeMismatch(format!(
            "fc x[{}], w {}x{}, b[{}] vs layer n={} m={}",
            x_len, w.rows, w.cols, b_len, cfg.n, cfg.m
        )));
    }
    Ok(())
}

/// `y_i = ReLU(sum_j w[i][j] x[j] + b[i])` in real arithmetic.
pub fn fc_forward_real(
    x: &[f64],
    w: &Matrix<f64>,
    b: &[f64],
    cfg: &FcLayerConfig,
) -> Result<Vec<f64>> {
    check_fc_shapes(x.len(), w, b.len(), cfg)?;
    Ok((0..cfg.m)
        .map(|i| {
            let sum: f64 = (0..cfg.n).map(|j| w.get(i, j) * x[j]).sum();
            (sum + b[i]).max(0.0)
        })
        .collect())
}

/// Fixed-point fully-connected layer; accumulates j = 0..n-1 in order.
pub fn fc_forward_fixed(
    x: &[Fixed16],
    w: &Matrix<Fixed16>,
    b: &[Fixed16],
    cfg: &FcLayerConfig,
    saturations: &mut u64,
) -> Result<Vec<Fixed16>> {
    check_fc_shapes(x.len(), w, b.len(), cfg)?;
    Ok((0..cfg.m)
        .map(|i| {
            let mut acc = Acc24::from_bias(b[i]);
            for (j, &pixel) in x.iter().enumerate() {
                acc = mac(acc, pixel, w.get(i, j), saturations);
            }
            acc.relu().to_activation(saturations)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn act(raw: i16) -> Fixed16 {
        Fixed16::from_raw(raw, QFormat::Activation)
    }

    fn wgt(raw: i16) -> Fixed16 {
        Fixed16::from_raw(raw, QFormat::Weight)
    }

    #[test]
    fn zero_filters_leave_relu_of_bias() {
        let cfg = ConvLayerConfig::new(4, 4, 2, 3, 3, 1, 2).unwrap();
        let x = Tensor3::from_fn(4, 4, 2, |z, t, k| (z + t + k) as f64);
        let w = FilterBank::from_fn(
            3,
            3,
            2,
            2,
            |_, _, _, _| 0.0,
            |q| if q == 0 { 1.5 } else { -2.0 },
        );
        let y = conv_forward_real(&x, &w, &cfg).unwrap();
        for z in 0..2 {
            for t in 0..2 {
                assert_eq!(y.get(z, t, 0), 1.5);
                assert_eq!(y.get(z, t, 1), 0.0);
            }
        }
    }

    #[test]
    fn identity_filter_is_relu_of_input() {
        let cfg = ConvLayerConfig::new(3, 3, 1, 1, 1, 1, 1).unwrap();
        let x = Tensor3::from_fn(3, 3, 1, |z, t, _| z as f64 - t as f64);
        let w = FilterBank::from_fn(1, 1, 1, 1, |_, _, _, _| 1.0, |_| 0.0);
        let y = conv_forward_real(&x, &w, &cfg).unwrap();
        for z in 0..3 {
            for t in 0..3 {
                assert_eq!(y.get(z, t, 0), (z as f64 - t as f64).max(0.0));
            }
        }
    }

    /// The 8x2 input / 1x3 filter walkthrough: the first output pixel is
    /// X1*W1 + X2*W2 + X3*W3 before the nonlinearity.
    #[test]
    fn worked_1x3_example_first_output() {
        let cfg = ConvLayerConfig::new(2, 8, 1, 1, 3, 1, 1).unwrap();
        let x = Tensor3::from_fn(2, 8, 1, |z, t, _| (z * 8 + t + 1) as f64);
        let w = FilterBank::from_fn(1, 3, 1, 1, |_, i, _, _| [0.5, -0.25, 1.0][i], |_| 0.0);
        let y = conv_forward_real(&x, &w, &cfg).unwrap();
        assert_eq!(y.height, 2);
        assert_eq!(y.width, 6);
        let expected = (1.0f64 * 0.5 + 2.0 * -0.25 + 3.0 * 1.0).max(0.0);
        assert_relative_eq!(y.get(0, 0, 0), expected);
        // second output row starts at X9
        let expected_row2 = (9.0f64 * 0.5 + 10.0 * -0.25 + 11.0 * 1.0).max(0.0);
        assert_relative_eq!(y.get(1, 0, 0), expected_row2);
    }

    #[test]
    fn fc_identity_passes_nonnegative_input() {
        let cfg = FcLayerConfig::new(3, 3).unwrap();
        let w = Matrix::from_fn(3, 3, |r, c| if r == c { 1.0 } else { 0.0 });
        let y = fc_forward_real(&[0.5, 0.0, 2.0], &w, &[0.0; 3], &cfg).unwrap();
        assert_eq!(y, vec![0.5, 0.0, 2.0]);
    }

    #[test]
    fn fc_relu_clips_negative_sum() {
        let cfg = FcLayerConfig::new(2, 1).unwrap();
        let w = Matrix::from_fn(1, 2, |_, c| if c == 0 { 1.0 } else { -1.0 });
        let y = fc_forward_real(&[0.25, 0.75], &w, &[0.0], &cfg).unwrap();
        assert_eq!(y, vec![0.0]);
    }

    #[test]
    fn fc_fixed_tracks_real_within_quantization_bound() {
        let mut rng = StdRng::seed_from_u64(7);
        let cfg = FcLayerConfig::new(64, 64).unwrap();
        let x_real: Vec<f64> = (0..64).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let w_real = Matrix::from_fn(64, 64, |_, _| rng.gen_range(-0.05..0.05));
        let b_real: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();

        let x: Vec<Fixed16> = x_real
            .iter()
            .map(|&v| Fixed16::quantize(v, QFormat::Activation))
            .collect();
        let w = Matrix::from_fn(64, 64, |r, c| {
            Fixed16::quantize(w_real.get(r, c), QFormat::Weight)
        });
        let b: Vec<Fixed16> = b_real
            .iter()
            .map(|&v| Fixed16::quantize(v, QFormat::Activation))
            .collect();

        let mut sat = 0;
        let y_fixed = fc_forward_fixed(&x, &w, &b, &cfg, &mut sat).unwrap();
        assert_eq!(sat, 0);

        // real arithmetic on the quantized operands; the fixed path only
        // adds the per-mac truncation of at most one activation LSB
        let x_q: Vec<f64> = x.iter().map(|f| f.value()).collect();
        let w_q = Matrix::from_fn(64, 64, |r, c| w.get(r, c).value());
        let b_q: Vec<f64> = b.iter().map(|f| f.value()).collect();
        let y_real = fc_forward_real(&x_q, &w_q, &b_q, &cfg).unwrap();
        let bound = 64.0 * QFormat::Activation.lsb() + QFormat::Activation.lsb() / 2.0;
        for (yf, yr) in y_fixed.iter().zip(&y_real) {
            assert!((yf.value() - yr).abs() <= bound, "{} vs {yr}", yf.value());
        }
    }

    /// conv(alpha * x) == alpha * conv(x) for bias 0 and alpha >= 0.
    #[test]
    fn conv_real_is_positively_homogeneous() {
        let mut rng = StdRng::seed_from_u64(11);
        let cfg = ConvLayerConfig::new(6, 5, 2, 3, 2, 1, 3).unwrap();
        let x = Tensor3::from_fn(6, 5, 2, |_, _, _| rng.gen_range(-1.0..1.0));
        let w = FilterBank::from_fn(3, 2, 2, 3, |_, _, _, _| rng.gen_range(-1.0..1.0), |_| 0.0);
        let alpha = 2.75;
        let scaled = x.map(|v| v * alpha);
        let y = conv_forward_real(&x, &w, &cfg).unwrap();
        let y_scaled = conv_forward_real(&scaled, &w, &cfg).unwrap();
        for (a, b) in y.data().iter().zip(y_scaled.data()) {
            assert_relative_eq!(*b, a * alpha, epsilon = 1e-9);
        }
    }

    /// A single-placement convolution (filter covering the whole input)
    /// equals one fully-connected neuron over the flattened input, both in
    /// real arithmetic and bit-exactly in fixed point.
    #[test]
    fn single_placement_conv_equals_fc() {
        let mut rng = StdRng::seed_from_u64(13);
        for (h, w_dim, c) in [(1usize, 1usize, 1usize), (2, 3, 2), (4, 4, 3), (8, 5, 2)] {
            let cfg = ConvLayerConfig::new(h, w_dim, c, h, w_dim, 1, 1).unwrap();
            let x = Tensor3::from_fn(h, w_dim, c, |_, _, _| act(rng.gen_range(-80..80)));
            let bias = act(rng.gen_range(-40..40));
            let bank = FilterBank::from_fn(
                h,
                w_dim,
                c,
                1,
                |_, _, _, _| wgt(rng.gen_range(-3000..3000)),
                |_| bias,
            );
            let mut sat = 0;
            let conv = conv_forward_fixed(&x, &bank, &cfg, &mut sat).unwrap();

            // flatten in the canonical order shared by both kernels
            let fc_cfg = FcLayerConfig::new(h * w_dim * c, 1).unwrap();
            let x_flat: Vec<Fixed16> = x.data().to_vec();
            let w_flat = Matrix::from_vec(1, fc_cfg.n, bank.flatten_filter(0)).unwrap();
            let fc =
                fc_forward_fixed(&x_flat, &w_flat, &[bank.bias(0)], &fc_cfg, &mut sat).unwrap();
            assert_eq!(sat, 0);
            assert_eq!(conv.get(0, 0, 0), fc[0], "{h}x{w_dim}x{c}");
        }
    }

    /// 1x1 stride-1 convolution is a per-pixel matrix multiply across
    /// channels.
    #[test]
    fn pointwise_conv_is_channel_matmul() {
        let mut rng = StdRng::seed_from_u64(17);
        let cfg = ConvLayerConfig::new(3, 4, 3, 1, 1, 1, 2).unwrap();
        let x = Tensor3::from_fn(3, 4, 3, |_, _, _| rng.gen_range(-1.0..1.0));
        let w = FilterBank::from_fn(1, 1, 3, 2, |_, _, _, _| rng.gen_range(-1.0..1.0), |_| 0.1);
        let y = conv_forward_real(&x, &w, &cfg).unwrap();
        for z in 0..3 {
            for t in 0..4 {
                for q in 0..2 {
                    let direct: f64 = (0..3)
                        .map(|k| x.get(z, t, k) * w.weight(0, 0, k, q))
                        .sum::<f64>()
                        + 0.1;
                    assert_relative_eq!(y.get(z, t, q), direct.max(0.0), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let cfg = ConvLayerConfig::new(4, 4, 2, 3, 3, 1, 2).unwrap();
        let x = Tensor3::filled(4, 4, 1, 0.0);
        let bank = FilterBank::from_fn(3, 3, 2, 2, |_, _, _, _| 0.0, |_| 0.0);
        assert!(matches!(
            conv_forward_real(&x, &bank, &cfg),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
