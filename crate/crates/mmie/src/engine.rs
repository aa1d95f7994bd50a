//! The full engine: 32 reconfigurable tiles scheduled over filter rows,
//! input channels, output rows and output channels, with fully-connected
//! support and measured cycle / memory-access counters.
//!
//! The functional path is vectorized per segment pass rather than stepped
//! PE by PE, but the cycle accounting follows the tile law exactly: a
//! segment pass of `n` outputs costs `s*n + w_f - s` cycles, and each of
//! the `h_out - 1` output-row boundaries adds a `w_f - 1` weight-passing
//! stall per filter-row pass. On geometries where the output map divides
//! evenly into segments and channel groups, the measured count equals the
//! closed-form model cycle for cycle.

use crate::error::{Error, Result};
use crate::gfid::TileModeConfig;
use crate::model::fixed::{mac, Acc24, Fixed16, QFormat};
use crate::model::layer::{ConvLayerConfig, FcLayerConfig, LayerConfig};
use crate::model::network::NetworkDescriptor;
use crate::model::tensor::{FilterBank, Matrix, Tensor3};

/// Engine sizing and clocking. Defaults match the baseline implementation:
/// 32 tiles of 6 PEs, 64-entry partial-sum memories, 200 MHz convolutional
/// and 40 MHz fully-connected clocks, one output word written per cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    pub physical_tiles: usize,
    pub pes_per_tile: usize,
    pub acc_depth: usize,
    pub conv_clock_hz: f64,
    pub fc_clock_hz: f64,
    /// Output words the write-back path absorbs per cycle.
    pub write_bandwidth: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            physical_tiles: 32,
            pes_per_tile: 6,
            acc_depth: 64,
            conv_clock_hz: 200e6,
            fc_clock_hz: 40e6,
            write_bandwidth: 1.0,
        }
    }
}

impl EngineConfig {
    pub fn pe_count(&self) -> usize {
        self.physical_tiles * self.pes_per_tile
    }

    pub fn mode(&self, w_f: usize, s: usize) -> Result<TileModeConfig> {
        TileModeConfig::for_engine(w_f, s, self.physical_tiles, self.acc_depth)
    }
}

/// Output data of a simulated layer.
#[derive(Debug, Clone, PartialEq)]
pub enum SimOutput {
    Tensor(Tensor3<Fixed16>),
    Vector(Vec<Fixed16>),
}

impl SimOutput {
    pub fn as_tensor(&self) -> Option<&Tensor3<Fixed16>> {
        match self {
            SimOutput::Tensor(t) => Some(t),
            SimOutput::Vector(_) => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[Fixed16]> {
        match self {
            SimOutput::Vector(v) => Some(v),
            SimOutput::Tensor(_) => None,
        }
    }
}

/// Result of simulating one layer. Memory accesses are counted in 16-bit
/// words; `ma_inputs` equals the cycle count because one shared pixel is
/// streamed per cycle. `cycles` is compute time; any write-back shortfall
/// is reported separately in `write_penalty_cycles`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub output: SimOutput,
    pub cycles: u64,
    pub ma_inputs: u64,
    pub ma_weights: u64,
    pub ma_outputs: u64,
    pub busy_pe_cycles: u64,
    pub saturations: u64,
    pub write_penalty_cycles: u64,
}

impl SimResult {
    pub fn busy_ratio(&self, engine: &EngineConfig) -> f64 {
        if self.cycles == 0 {
            return 0.0;
        }
        self.busy_pe_cycles as f64 / (engine.pe_count() as u64 * self.cycles) as f64
    }

    pub fn ma_total(&self) -> u64 {
        self.ma_inputs + self.ma_weights + self.ma_outputs
    }
}

/// Run one convolutional layer. The output is bit-exact against the
/// fixed-point reference when no saturation occurs.
pub fn run_conv_layer(
    cfg: &ConvLayerConfig,
    x: &Tensor3<Fixed16>,
    w: &FilterBank<Fixed16>,
    engine: &EngineConfig,
) -> Result<SimResult> {
    cfg.validate()?;
    if x.height != cfg.h_in || x.width != cfg.w_in || x.channels != cfg.c_in {
        return Err(Error::ShapeMismatch(format!(
            "input {}x{}x{} does not match layer {}x{}x{}",
            x.height, x.width, x.channels, cfg.h_in, cfg.w_in, cfg.c_in
        )));
    }
    if w.h_f != cfg.h_f || w.w_f != cfg.w_f || w.c_in != cfg.c_in || w.c_out != cfg.c_out {
        return Err(Error::ShapeMismatch(
            "filter bank does not match layer".into(),
        ));
    }
    let mode = engine.mode(cfg.w_f, cfg.s)?;
    let (h_out, w_out) = cfg.output_dims();
    let hw = h_out * w_out;
    let groups = cfg.c_out.div_ceil(mode.p_eff);

    // Raster-order segments of at most n_eff outputs; every logical tile
    // of the group walks the same segment for its own output channel.
    let segments: Vec<(usize, usize)> = (0..hw)
        .step_by(mode.n_eff)
        .map(|start| (start, (start + mode.n_eff).min(hw)))
        .collect();

    let pass_cost: u64 = segments
        .iter()
        .map(|&(a, b)| mode.pass_cycles(b - a))
        .sum::<u64>()
        + ((cfg.w_f - 1) * (h_out - 1)) as u64;
    let sweeps = (cfg.h_f * cfg.c_in) as u64 * groups as u64;
    let cycles = pass_cost * sweeps;

    let mut out = Tensor3::filled(h_out, w_out, cfg.c_out, Fixed16::zero(QFormat::Activation));
    let mut saturations = 0u64;
    let mut ma_weights = 0u64;

    for group in 0..groups {
        let q_first = group * mode.p_eff;
        let q_last = (q_first + mode.p_eff).min(cfg.c_out);
        for &(a, b) in &segments {
            for q in q_first..q_last {
                // bias seeds the accumulator before the first (k=0, j=0) pass
                let mut acc = vec![Acc24::from_bias(w.bias(q)); b - a];
                for k in 0..cfg.c_in {
                    for j in 0..cfg.h_f {
                        ma_weights += cfg.w_f as u64;
                        for (slot, o) in (a..b).enumerate() {
                            let z = o / w_out;
                            let t = o % w_out;
                            let mut sum = acc[slot];
                            for i in 0..cfg.w_f {
                                let pixel = x.get(z * cfg.s + j, t * cfg.s + i, k);
                                sum = mac(sum, pixel, w.weight(j, i, k, q), &mut saturations);
                            }
                            acc[slot] = sum;
                        }
                    }
                }
                for (slot, o) in (a..b).enumerate() {
                    let y = acc[slot].relu().to_activation(&mut saturations);
                    out.set(o / w_out, o % w_out, q, y);
                }
            }
        }
    }

    let ma_outputs = hw as u64 * cfg.c_out as u64;
    let write_cycles = (ma_outputs as f64 / engine.write_bandwidth).ceil() as u64;
    Ok(SimResult {
        output: SimOutput::Tensor(out),
        cycles,
        ma_inputs: cycles,
        ma_weights,
        ma_outputs,
        busy_pe_cycles: cfg.macs(),
        saturations,
        write_penalty_cycles: write_cycles.saturating_sub(cycles),
    })
}

/// Run one fully-connected layer: every PE serves one neuron per round,
/// all sharing the input stream while loading private weights.
pub fn run_fc_layer(
    cfg: &FcLayerConfig,
    x: &[Fixed16],
    w: &Matrix<Fixed16>,
    b: &[Fixed16],
    engine: &EngineConfig,
) -> Result<SimResult> {
    if x.len() != cfg.n || w.rows != cfg.m || w.cols != cfg.n || b.len() != cfg.m {
        return Err(Error::ShapeMismatch(format!(
            "fc x[{}], w {}x{}, b[{}] vs layer n={} m={}",
            x.len(),
            w.rows,
            w.cols,
            b.len(),
            cfg.n,
            cfg.m
        )));
    }
    let p = engine.pe_count();
    let rounds = cfg.m.div_ceil(p) as u64;
    let cycles = rounds * cfg.n as u64;
    let mut saturations = 0u64;
    let output: Vec<Fixed16> = (0..cfg.m)
        .map(|q| {
            let mut acc = Acc24::from_bias(b[q]);
            for (j, &pixel) in x.iter().enumerate() {
                acc = mac(acc, pixel, w.get(q, j), &mut saturations);
            }
            acc.relu().to_activation(&mut saturations)
        })
        .collect();
    Ok(SimResult {
        output: SimOutput::Vector(output),
        cycles,
        ma_inputs: cycles,
        ma_weights: cfg.macs(),
        ma_outputs: cfg.m as u64,
        busy_pe_cycles: cfg.macs(),
        saturations,
        write_penalty_cycles: 0,
    })
}

/// Input data for one layer of a network run.
pub enum LayerData {
    Conv {
        x: Tensor3<Fixed16>,
        w: FilterBank<Fixed16>,
    },
    Fc {
        x: Vec<Fixed16>,
        w: Matrix<Fixed16>,
        b: Vec<Fixed16>,
    },
}

/// Whole-network aggregate of measured counters.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SimAggregate {
    pub conv_cycles: u64,
    pub fc_cycles: u64,
    pub conv_ma_words: u64,
    pub fc_ma_words: u64,
    pub saturations: u64,
    pub write_penalty_cycles: u64,
    pub conv_latency_s: f64,
    pub fc_latency_s: f64,
}

impl SimAggregate {
    pub fn latency_s(&self) -> f64 {
        self.conv_latency_s + self.fc_latency_s
    }

    pub fn throughput_fps(&self) -> f64 {
        1.0 / self.latency_s()
    }

    pub fn ma_mb(&self) -> f64 {
        (self.conv_ma_words + self.fc_ma_words) as f64 * 2.0 / 1e6
    }
}

/// Simulate every layer of a network, pulling per-layer data from the
/// provider. Layers are independent workloads (built-in descriptors leave
/// pooling gaps between stages), so results do not chain.
pub fn run_network(
    net: &NetworkDescriptor,
    engine: &EngineConfig,
    mut data_for: impl FnMut(usize, &LayerConfig) -> Result<LayerData>,
) -> Result<(Vec<SimResult>, SimAggregate)> {
    let mut results = Vec::with_capacity(net.layers.len());
    let mut agg = SimAggregate::default();
    for (index, layer) in net.layers.iter().enumerate() {
        let data = data_for(index, layer)?;
        let result = match (layer, data) {
            (LayerConfig::Conv(cfg), LayerData::Conv { x, w }) => {
                run_conv_layer(cfg, &x, &w, engine)?
            }
            (LayerConfig::Fc(cfg), LayerData::Fc { x, w, b }) => {
                run_fc_layer(cfg, &x, &w, &b, engine)?
            }
            _ => {
                return Err(Error::ShapeMismatch(format!(
                    "layer {index} data does not match its kind"
                )))
            }
        };
        match layer {
            LayerConfig::Conv(_) => {
                agg.conv_cycles += result.cycles;
                agg.conv_ma_words += result.ma_total();
            }
            LayerConfig::Fc(_) => {
                agg.fc_cycles += result.cycles;
                agg.fc_ma_words += result.ma_total();
            }
        }
        agg.saturations += result.saturations;
        agg.write_penalty_cycles += result.write_penalty_cycles;
        results.push(result);
    }
    agg.conv_latency_s = agg.conv_cycles as f64 / engine.conv_clock_hz;
    agg.fc_latency_s = agg.fc_cycles as f64 / engine.fc_clock_hz;
    Ok((results, agg))
}

/// Pipelining plan for a mode: staggering tile weight loads trades peak
/// input bandwidth against a bounded number of stages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelinePlan {
    pub stages: usize,
    /// floor((s*n_eff + w_f - s) / w_f)
    pub stage_bound: usize,
    /// Peak 16-bit words per cycle with no pipelining: 1 + 6p.
    pub unpipelined_words_per_cycle: usize,
    /// Average words per cycle with the planned stages: 1 + 6p/stages.
    pub pipelined_words_per_cycle: f64,
}

pub fn plan_pipeline(
    cfg: &ConvLayerConfig,
    engine: &EngineConfig,
    stages: Option<usize>,
) -> Result<PipelinePlan> {
    let mode = engine.mode(cfg.w_f, cfg.s)?;
    let stage_bound = (mode.s * mode.n_eff + mode.w_f - mode.s) / mode.w_f;
    let stages = stages.unwrap_or(stage_bound).clamp(1, stage_bound);
    let weight_words = engine.pes_per_tile * engine.physical_tiles;
    Ok(PipelinePlan {
        stages,
        stage_bound,
        unpipelined_words_per_cycle: 1 + weight_words,
        pipelined_words_per_cycle: 1.0 + weight_words as f64 / stages as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfid::SUPPORTED_MODES;
    use crate::model::network::vgg16;
    use crate::oracle;
    use crate::perf;
    use crate::tile::Tile;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn act(raw: i16) -> Fixed16 {
        Fixed16::from_raw(raw, QFormat::Activation)
    }

    fn rand_conv_data(
        cfg: &ConvLayerConfig,
        rng: &mut StdRng,
    ) -> (Tensor3<Fixed16>, FilterBank<Fixed16>) {
        crate::datagen::random_conv_data(cfg, rng)
    }

    #[test]
    fn pointwise_identity_layer() {
        let cfg = ConvLayerConfig::new(4, 4, 1, 1, 1, 1, 1).unwrap();
        let x = Tensor3::from_fn(4, 4, 1, |z, t, _| act((z * 4 + t) as i16));
        let w = FilterBank::from_fn(
            1,
            1,
            1,
            1,
            |_, _, _, _| Fixed16::from_raw(16384, QFormat::Weight),
            |_| act(0),
        );
        // weight 0.5: output = relu(x * 0.5)
        let r = run_conv_layer(&cfg, &x, &w, &EngineConfig::default()).unwrap();
        let out = r.output.as_tensor().unwrap();
        for z in 0..4 {
            for t in 0..4 {
                assert_eq!(out.get(z, t, 0).raw(), ((z * 4 + t) as i16) / 2);
            }
        }
        assert_eq!(r.saturations, 0);
    }

    /// Worked small layer: 6x6x2 input, 3x3 filters, 4 output channels.
    /// One 16-output segment, 18-cycle passes, 6 sweeps, plus the
    /// 2*(4-1) = 6-cycle weight-passing total per sweep: 144 cycles.
    #[test]
    fn small_layer_cycle_walkthrough() {
        let mut rng = StdRng::seed_from_u64(40);
        let cfg = ConvLayerConfig::new(6, 6, 2, 3, 3, 1, 4).unwrap();
        let (x, w) = rand_conv_data(&cfg, &mut rng);
        let engine = EngineConfig::default();
        let r = run_conv_layer(&cfg, &x, &w, &engine).unwrap();
        assert_eq!(r.cycles, 144);
        let mut sat = 0;
        let expect = oracle::conv_forward_fixed(&x, &w, &cfg, &mut sat).unwrap();
        assert_eq!(r.output.as_tensor().unwrap(), &expect);
        assert_eq!(r.saturations, 0);
        // ma checks: inputs = cycles; weights = 3*3*2*1*4; outputs = 16*4
        assert_eq!(r.ma_inputs, 144);
        assert_eq!(r.ma_weights, 72);
        assert_eq!(r.ma_outputs, 64);
    }

    #[test]
    fn engine_matches_oracle_across_modes() {
        let mut rng = StdRng::seed_from_u64(41);
        let engine = EngineConfig::default();
        for (w_f, s) in SUPPORTED_MODES {
            for _ in 0..10 {
                let h_extra = rng.gen_range(0..3) * s;
                let w_extra = rng.gen_range(0..3) * s;
                let cfg = ConvLayerConfig::new(
                    w_f + h_extra,
                    w_f + w_extra,
                    rng.gen_range(1..=4),
                    w_f,
                    w_f,
                    s,
                    rng.gen_range(1..=6),
                )
                .unwrap();
                let (x, w) = rand_conv_data(&cfg, &mut rng);
                let r = run_conv_layer(&cfg, &x, &w, &engine).unwrap();
                let mut sat = 0;
                let expect = oracle::conv_forward_fixed(&x, &w, &cfg, &mut sat).unwrap();
                assert_eq!(r.saturations, 0, "({w_f},{s})");
                assert_eq!(r.output.as_tensor().unwrap(), &expect, "({w_f},{s})");
                assert_eq!(r.busy_pe_cycles, cfg.macs());
            }
        }
    }

    /// Measured cycles never undershoot the closed-form model and exceed
    /// it by at most one segment ramp per sweep.
    #[test]
    fn measured_cycles_track_model_within_one_segment() {
        let mut rng = StdRng::seed_from_u64(42);
        let engine = EngineConfig::default();
        for (w_f, s) in SUPPORTED_MODES {
            for _ in 0..5 {
                let cfg = ConvLayerConfig::new(
                    w_f + rng.gen_range(0..4) * s,
                    w_f + rng.gen_range(0..4) * s,
                    rng.gen_range(1..=3),
                    w_f,
                    w_f,
                    s,
                    rng.gen_range(1..=4),
                )
                .unwrap();
                let (x, w) = rand_conv_data(&cfg, &mut rng);
                let r = run_conv_layer(&cfg, &x, &w, &engine).unwrap();
                let mode = engine.mode(w_f, s).unwrap();
                let model = perf::conv_cycles(&cfg, &mode);
                let sweeps = (cfg.h_f * cfg.c_in) as u64 * cfg.c_out.div_ceil(mode.p_eff) as u64;
                let bound = (mode.w_f - mode.s) as u64 * sweeps + 1;
                assert!(
                    r.cycles >= model && r.cycles - model <= bound,
                    "({w_f},{s}): measured {} vs model {model}",
                    r.cycles
                );
            }
        }
    }

    /// For a single-output-row layer the engine cost law is exactly the
    /// tile simulator's cycle loop.
    #[test]
    fn engine_cost_agrees_with_tile_cycle_loop() {
        let mut rng = StdRng::seed_from_u64(43);
        let engine = EngineConfig::default();
        for (w_f, s) in SUPPORTED_MODES {
            let n = rng.gen_range(1..=16);
            let cfg = ConvLayerConfig::new(1, w_f + (n - 1) * s, 1, 1, w_f, s, 1).unwrap();
            let (x, w) = rand_conv_data(&cfg, &mut rng);
            let r = run_conv_layer(&cfg, &x, &w, &engine).unwrap();

            let mode = engine.mode(w_f, s).unwrap();
            let mut tile = Tile::configure(mode).unwrap();
            let pixels: Vec<Fixed16> = (0..cfg.w_in).map(|t| x.get(0, t, 0)).collect();
            let weights: Vec<Fixed16> = (0..w_f).map(|i| w.weight(0, i, 0, 0)).collect();
            let trace = tile.run_row_pass(&pixels, &[&weights], n, false).unwrap();
            assert_eq!(r.cycles, trace.total_cycles, "({w_f},{s}) n={n}");
        }
    }

    #[test]
    fn fc_single_neuron() {
        let cfg = FcLayerConfig::new(8, 1).unwrap();
        let x: Vec<Fixed16> = (0..8).map(|v| act(v * 4)).collect();
        let w = Matrix::from_fn(1, 8, |_, _| Fixed16::from_raw(4096, QFormat::Weight));
        let r = run_fc_layer(&cfg, &x, &w, &[act(0)], &EngineConfig::default()).unwrap();
        assert_eq!(r.cycles, 8);
        assert_eq!(r.ma_weights, 8);
        assert_eq!(r.ma_outputs, 1);
    }

    #[test]
    fn fc_round_count_drives_cycles() {
        let cfg = FcLayerConfig::new(9216, 4096).unwrap();
        // ceil(4096/192) * 9216
        assert_eq!(perf::fc_cycles(&cfg, &EngineConfig::default()), 22 * 9216);
    }

    #[test]
    fn fc_matches_oracle_bit_exactly() {
        let mut rng = StdRng::seed_from_u64(44);
        let cfg = FcLayerConfig::new(37, 250).unwrap();
        let x: Vec<Fixed16> = (0..37).map(|_| act(rng.gen_range(-64..=64))).collect();
        let w = Matrix::from_fn(250, 37, |_, _| {
            Fixed16::from_raw(rng.gen_range(-2048..=2048), QFormat::Weight)
        });
        let b: Vec<Fixed16> = (0..250).map(|_| act(rng.gen_range(-128..=128))).collect();
        let engine = EngineConfig::default();
        let r = run_fc_layer(&cfg, &x, &w, &b, &engine).unwrap();
        let mut sat = 0;
        let expect = oracle::fc_forward_fixed(&x, &w, &b, &cfg, &mut sat).unwrap();
        assert_eq!(r.output.as_vector().unwrap(), expect.as_slice());
        assert_eq!(r.cycles, 2 * 37); // ceil(250/192) = 2 rounds
        assert_eq!(r.ma_weights, 250 * 37);
    }

    /// A 1x1 convolution over a 1x1 spatial map is the same computation
    /// as a fully-connected layer.
    #[test]
    fn pointwise_conv_equals_fc_bit_exactly() {
        let mut rng = StdRng::seed_from_u64(45);
        let (c_in, c_out) = (7, 5);
        let conv_cfg = ConvLayerConfig::new(1, 1, c_in, 1, 1, 1, c_out).unwrap();
        let (x, w) = rand_conv_data(&conv_cfg, &mut rng);
        let engine = EngineConfig::default();
        let conv = run_conv_layer(&conv_cfg, &x, &w, &engine).unwrap();

        let fc_cfg = FcLayerConfig::new(c_in, c_out).unwrap();
        let x_vec: Vec<Fixed16> = (0..c_in).map(|k| x.get(0, 0, k)).collect();
        let w_mat = Matrix::from_fn(c_out, c_in, |q, k| w.weight(0, 0, k, q));
        let b: Vec<Fixed16> = (0..c_out).map(|q| w.bias(q)).collect();
        let fc = run_fc_layer(&fc_cfg, &x_vec, &w_mat, &b, &engine).unwrap();

        let conv_out = conv.output.as_tensor().unwrap();
        let fc_out = fc.output.as_vector().unwrap();
        for (q, fc_val) in fc_out.iter().enumerate() {
            assert_eq!(conv_out.get(0, 0, q), *fc_val);
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let mut rng = StdRng::seed_from_u64(46);
        let cfg = ConvLayerConfig::new(9, 9, 3, 3, 3, 1, 5).unwrap();
        let (x, w) = rand_conv_data(&cfg, &mut rng);
        let engine = EngineConfig::default();
        let a = run_conv_layer(&cfg, &x, &w, &engine).unwrap();
        let b = run_conv_layer(&cfg, &x, &w, &engine).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn write_bound_layer_is_flagged() {
        // 1x1 over a large map with many output channels: writes dominate
        let cfg = ConvLayerConfig::new(16, 16, 1, 1, 1, 1, 8).unwrap();
        let mut rng = StdRng::seed_from_u64(47);
        let (x, w) = rand_conv_data(&cfg, &mut rng);
        let r = run_conv_layer(&cfg, &x, &w, &EngineConfig::default()).unwrap();
        // compute: 256 pixels * 1 channel sweep; writes: 256*8
        assert_eq!(r.cycles, 256);
        assert_eq!(r.write_penalty_cycles, 256 * 8 - 256);
    }

    #[test]
    fn network_aggregate_combines_clock_domains() {
        let net = vgg16().scale_channels(256).unwrap();
        let engine = EngineConfig::default();
        let mut rng = StdRng::seed_from_u64(48);
        let (results, agg) = run_network(&net, &engine, |_, layer| {
            Ok(match layer {
                LayerConfig::Conv(c) => {
                    let (x, w) = rand_conv_data(c, &mut rng);
                    LayerData::Conv { x, w }
                }
                LayerConfig::Fc(f) => {
                    let x = (0..f.n).map(|_| act(rng.gen_range(-64..=64))).collect();
                    let w = Matrix::from_fn(f.m, f.n, |_, _| {
                        Fixed16::from_raw(rng.gen_range(-2048..=2048), QFormat::Weight)
                    });
                    let b = (0..f.m).map(|_| act(0)).collect();
                    LayerData::Fc { x, w, b }
                }
            })
        })
        .unwrap();
        assert_eq!(results.len(), 16);
        let conv_sum: u64 = results[..13].iter().map(|r| r.cycles).sum();
        let fc_sum: u64 = results[13..].iter().map(|r| r.cycles).sum();
        assert_eq!(agg.conv_cycles, conv_sum);
        assert_eq!(agg.fc_cycles, fc_sum);
        let expect = conv_sum as f64 / 200e6 + fc_sum as f64 / 40e6;
        assert!((agg.latency_s() - expect).abs() < 1e-12);
        assert!((agg.throughput_fps() - 1.0 / expect).abs() < 1e-6);
    }

    #[test]
    fn single_layer_network_aggregate_equals_layer() {
        let cfg = ConvLayerConfig::new(6, 6, 1, 3, 3, 1, 2).unwrap();
        let net = NetworkDescriptor::new("one", vec![LayerConfig::Conv(cfg)]).unwrap();
        let engine = EngineConfig::default();
        let mut rng = StdRng::seed_from_u64(49);
        let (x, w) = rand_conv_data(&cfg, &mut rng);
        let (results, agg) = run_network(&net, &engine, |_, _| {
            Ok(LayerData::Conv {
                x: x.clone(),
                w: w.clone(),
            })
        })
        .unwrap();
        assert_eq!(agg.conv_cycles, results[0].cycles);
        assert_eq!(agg.conv_ma_words, results[0].ma_total());
        assert_eq!(agg.fc_cycles, 0);
    }

    #[test]
    fn pipeline_plan_bandwidth_and_bound() {
        let engine = EngineConfig::default();
        let cfg = ConvLayerConfig::new(16, 16, 1, 3, 3, 1, 1).unwrap();
        let unpipelined = plan_pipeline(&cfg, &engine, Some(1)).unwrap();
        assert_eq!(unpipelined.unpipelined_words_per_cycle, 193);
        assert_eq!(unpipelined.pipelined_words_per_cycle, 193.0);
        // (3,1): floor((192 + 2) / 3) = 64 stages
        let full = plan_pipeline(&cfg, &engine, None).unwrap();
        assert_eq!(full.stage_bound, 64);
        assert_eq!(full.stages, 64);
        assert!(full.pipelined_words_per_cycle < 5.0);
    }
}
