//! Simulate one convolutional layer on the engine, check the output
//! against the fixed-point reference, and compare measured cycles with
//! the closed-form model.

use mmie::datagen;
use mmie::engine::{run_conv_layer, EngineConfig};
use mmie::model::ConvLayerConfig;
use mmie::{oracle, perf};

fn main() {
    let engine = EngineConfig::default();
    // 14x14x8 input, 3x3 filters, 16 maps
    let cfg = ConvLayerConfig::new(14, 14, 8, 3, 3, 1, 16).unwrap();
    let mut rng = datagen::rng_for(42, 0);
    let (x, w) = datagen::random_conv_data(&cfg, &mut rng);

    let result = run_conv_layer(&cfg, &x, &w, &engine).unwrap();
    let mut sat = 0;
    let expect = oracle::conv_forward_fixed(&x, &w, &cfg, &mut sat).unwrap();
    let bit_exact = result.output.as_tensor() == Some(&expect);

    let mode = engine.mode(cfg.w_f, cfg.s).unwrap();
    println!("layer: {cfg:?}");
    println!(
        "bit-exact vs reference: {bit_exact}, saturations: {}",
        result.saturations
    );
    println!(
        "measured cycles: {}  model cycles: {}  (fractional-segment gap is bounded)",
        result.cycles,
        perf::conv_cycles(&cfg, &mode)
    );
    println!(
        "memory accesses (words): inputs={} weights={} outputs={}",
        result.ma_inputs, result.ma_weights, result.ma_outputs
    );
    println!("busy ratio: {:.2}%", result.busy_ratio(&engine) * 100.0);
    assert!(bit_exact && result.saturations == 0);
}
