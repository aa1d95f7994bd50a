//! Closed-form model of cycles, memory accesses, latency, throughput and
//! performance efficiency; the fast path for whole-network numbers.
//!
//! Convolution cycles keep the exact fractional segment count
//! `h_out*w_out / n_eff` (the engine rounds real segments up; the
//! difference is bounded by one segment ramp per sweep and the fractional
//! form is what whole-network totals are quoted against). The weight
//! passing term adds `(w_f-1)(h_out-1)` stall cycles per filter-row pass.

use serde::Serialize;

use crate::engine::EngineConfig;
use crate::error::Result;
use crate::gfid::TileModeConfig;
use crate::model::layer::{ConvLayerConfig, FcLayerConfig, LayerConfig};
use crate::model::network::NetworkDescriptor;

/// Convolution cycle count as an exact rational, ceiled to whole cycles:
///
/// ```text
/// (w_out*h_out / N) * (s*N + w_f - s) * h_f * c_in * ceil(c_out / p)
///   + (w_f - 1) * (h_out - 1) * h_f * c_in * ceil(c_out / p)
/// ```
pub fn conv_cycles(cfg: &ConvLayerConfig, mode: &TileModeConfig) -> u64 {
    let (num, den) = conv_cycles_rational(cfg, mode);
    num.div_ceil(den) as u64
}

/// The same quantity as an un-ceiled real number, for fractional views.
pub fn conv_cycles_f64(cfg: &ConvLayerConfig, mode: &TileModeConfig) -> f64 {
    let (num, den) = conv_cycles_rational(cfg, mode);
    num as f64 / den as f64
}

fn conv_cycles_rational(cfg: &ConvLayerConfig, mode: &TileModeConfig) -> (u128, u128) {
    let (h_out, w_out) = cfg.output_dims();
    let hw = (h_out * w_out) as u128;
    let n = mode.n_eff as u128;
    let sweeps = (cfg.h_f * cfg.c_in) as u128 * cfg.c_out.div_ceil(mode.p_eff) as u128;
    let pass = (mode.s * mode.n_eff + mode.w_f - mode.s) as u128;
    let term1 = hw * pass * sweeps; // over n
    let term2 = ((cfg.w_f - 1) * (h_out - 1)) as u128 * sweeps;
    (term1 + term2 * n, n)
}

/// Memory accesses of one convolutional layer, in 16-bit words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConvMemAccesses {
    /// One shared input pixel per cycle.
    pub inputs: u64,
    /// h_f * w_f * c_in * ceil(h_out*w_out / N) * c_out.
    pub filters: u64,
    /// Every output pixel of every map written once.
    pub outputs: u64,
}

impl ConvMemAccesses {
    pub fn total(&self) -> u64 {
        self.inputs + self.filters + self.outputs
    }
}

pub fn conv_mem_accesses(cfg: &ConvLayerConfig, mode: &TileModeConfig) -> ConvMemAccesses {
    let (h_out, w_out) = cfg.output_dims();
    let segments = (h_out * w_out).div_ceil(mode.n_eff) as u64;
    ConvMemAccesses {
        inputs: conv_cycles(cfg, mode),
        filters: (cfg.h_f * cfg.w_f * cfg.c_in) as u64 * segments * cfg.c_out as u64,
        outputs: (h_out * w_out * cfg.c_out) as u64,
    }
}

/// Fully-connected cycles: ceil(m / p) * n with p = all PEs.
pub fn fc_cycles(cfg: &FcLayerConfig, engine: &EngineConfig) -> u64 {
    cfg.m.div_ceil(engine.pe_count()) as u64 * cfg.n as u64
}

/// Fully-connected memory accesses in 16-bit words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FcMemAccesses {
    pub inputs: u64,
    /// m * n: every neuron reads a private weight per cycle.
    pub weights: u64,
    pub outputs: u64,
}

impl FcMemAccesses {
    pub fn total(&self) -> u64 {
        self.inputs + self.weights + self.outputs
    }
}

pub fn fc_mem_accesses(cfg: &FcLayerConfig, engine: &EngineConfig) -> FcMemAccesses {
    FcMemAccesses {
        inputs: fc_cycles(cfg, engine),
        weights: cfg.macs(),
        outputs: cfg.m as u64,
    }
}

/// Peak throughput at a clock: 2 ops per MAC across every PE.
pub fn peak_gops(engine: &EngineConfig, clock_hz: f64) -> f64 {
    2.0 * engine.pe_count() as f64 * clock_hz / 1e9
}

/// Achieved share of peak: ops / (2 * PEs * cycles).
pub fn efficiency(ops: u64, cycles: u64, engine: &EngineConfig) -> f64 {
    if cycles == 0 {
        return 0.0;
    }
    ops as f64 / (2.0 * engine.pe_count() as f64 * cycles as f64)
}

/// Analytical figures for one layer.
#[derive(Debug, Clone, Serialize)]
pub struct LayerPerf {
    /// 1-based position in the network.
    pub index: usize,
    pub kind: String,
    pub cycles: u64,
    pub clock_hz: f64,
    pub latency_s: f64,
    pub ma_inputs: u64,
    pub ma_weights: u64,
    pub ma_outputs: u64,
    pub ma_mb: f64,
    pub ops: u64,
    pub gops: f64,
    /// Fraction of peak, 0..=1.
    pub efficiency: f64,
    /// Output write-back needs more cycles than compute provides.
    pub write_bound: bool,
    pub write_penalty_cycles: u64,
}

/// Aggregate over one clock domain (convolutional or fully-connected).
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct DomainPerf {
    pub cycles: u64,
    pub latency_s: f64,
    pub ma_words: u64,
    pub ma_mb: f64,
    pub ops: u64,
    pub gops: f64,
    pub efficiency: f64,
    pub peak_gops: f64,
}

/// Whole-network analytical report.
#[derive(Debug, Clone, Serialize)]
pub struct PerfReport {
    pub network: String,
    pub layers: Vec<LayerPerf>,
    pub conv: DomainPerf,
    pub fc: DomainPerf,
    pub total_latency_s: f64,
    pub throughput_fps: f64,
}

/// Produce the per-layer and aggregate analytical report for a network.
pub fn network_report(net: &NetworkDescriptor, engine: &EngineConfig) -> Result<PerfReport> {
    let mut layers = Vec::with_capacity(net.layers.len());
    let mut conv = DomainPerf {
        peak_gops: peak_gops(engine, engine.conv_clock_hz),
        ..DomainPerf::default()
    };
    let mut fc = DomainPerf {
        peak_gops: peak_gops(engine, engine.fc_clock_hz),
        ..DomainPerf::default()
    };
    for (i, layer) in net.layers.iter().enumerate() {
        let perf = match layer {
            LayerConfig::Conv(cfg) => {
                let mode = engine.mode(cfg.w_f, cfg.s)?;
                let cycles = conv_cycles(cfg, &mode);
                let ma = conv_mem_accesses(cfg, &mode);
                let write_cycles = (ma.outputs as f64 / engine.write_bandwidth).ceil() as u64;
                let latency_s = cycles as f64 / engine.conv_clock_hz;
                conv.cycles += cycles;
                conv.ma_words += ma.total();
                conv.ops += cfg.ops();
                LayerPerf {
                    index: i + 1,
                    kind: "conv".into(),
                    cycles,
                    clock_hz: engine.conv_clock_hz,
                    latency_s,
                    ma_inputs: ma.inputs,
                    ma_weights: ma.filters,
                    ma_outputs: ma.outputs,
                    ma_mb: ma.total() as f64 * 2.0 / 1e6,
                    ops: cfg.ops(),
                    gops: cfg.ops() as f64 / latency_s / 1e9,
                    efficiency: efficiency(cfg.ops(), cycles, engine),
                    write_bound: write_cycles > cycles,
                    write_penalty_cycles: write_cycles.saturating_sub(cycles),
                }
            }
            LayerConfig::Fc(cfg) => {
                let cycles = fc_cycles(cfg, engine);
                let ma = fc_mem_accesses(cfg, engine);
                let latency_s = cycles as f64 / engine.fc_clock_hz;
                fc.cycles += cycles;
                fc.ma_words += ma.total();
                fc.ops += cfg.ops();
                LayerPerf {
                    index: i + 1,
                    kind: "fc".into(),
                    cycles,
                    clock_hz: engine.fc_clock_hz,
                    latency_s,
                    ma_inputs: ma.inputs,
                    ma_weights: ma.weights,
                    ma_outputs: ma.outputs,
                    ma_mb: ma.total() as f64 * 2.0 / 1e6,
                    ops: cfg.ops(),
                    gops: cfg.ops() as f64 / latency_s / 1e9,
                    efficiency: efficiency(cfg.ops(), cycles, engine),
                    write_bound: false,
                    write_penalty_cycles: 0,
                }
            }
        };
        layers.push(perf);
    }
    conv.latency_s = conv.cycles as f64 / engine.conv_clock_hz;
    fc.latency_s = fc.cycles as f64 / engine.fc_clock_hz;
    conv.ma_mb = conv.ma_words as f64 * 2.0 / 1e6;
    fc.ma_mb = fc.ma_words as f64 * 2.0 / 1e6;
    if conv.cycles > 0 {
        conv.gops = conv.ops as f64 / conv.latency_s / 1e9;
        conv.efficiency = conv.gops / conv.peak_gops;
    }
    if fc.cycles > 0 {
        fc.gops = fc.ops as f64 / fc.latency_s / 1e9;
        fc.efficiency = fc.gops / fc.peak_gops;
    }
    let total_latency_s = conv.latency_s + fc.latency_s;
    Ok(PerfReport {
        network: net.name.clone(),
        layers,
        conv,
        fc,
        total_latency_s,
        throughput_fps: 1.0 / total_latency_s,
    })
}

/// CSV rows for a report: layer,kind,cycles,latency_ms,ma_mb,efficiency_pct.
pub fn report_to_csv(report: &PerfReport) -> String {
    let mut out = String::from("layer,kind,cycles,latency_ms,ma_mb,efficiency_pct\n");
    for l in &report.layers {
        out.push_str(&format!(
            "{},{},{},{:.4},{:.4},{:.2}\n",
            l.index,
            l.kind,
            l.cycles,
            l.latency_s * 1e3,
            l.ma_mb,
            l.efficiency * 100.0
        ));
    }
    out
}

pub fn report_to_json(report: &PerfReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

/// Human-readable report table.
pub fn report_to_text(report: &PerfReport) -> String {
    let mut out = format!("network: {}\n", report.network);
    out.push_str("layer  kind  cycles        latency_ms   ma_mb      eff_pct\n");
    for l in &report.layers {
        out.push_str(&format!(
            "{:<6} {:<5} {:<13} {:<12.4} {:<10.4} {:>6.2}{}\n",
            l.index,
            l.kind,
            l.cycles,
            l.latency_s * 1e3,
            l.ma_mb,
            l.efficiency * 100.0,
            if l.write_bound { "  [write-bound]" } else { "" }
        ));
    }
    for (label, d) in [("conv", &report.conv), ("fc", &report.fc)] {
        if d.cycles == 0 {
            continue;
        }
        out.push_str(&format!(
            "{label}: {} cycles, {:.3} ms, {:.2} MB, {:.1} Gops ({:.1}% of {:.2} peak)\n",
            d.cycles,
            d.latency_s * 1e3,
            d.ma_mb,
            d.gops,
            d.efficiency * 100.0,
            d.peak_gops
        ));
    }
    out.push_str(&format!(
        "total: {:.3} ms ({:.2} fps)\n",
        report.total_latency_s * 1e3,
        report.throughput_fps
    ));
    out
}
