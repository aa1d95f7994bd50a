//! Published reference figures for the baseline implementation, shipped as
//! versioned data files and used by the `--compare` report mode and the
//! acceptance suite. Values are reproduced as published; the comparison
//! logic never feeds them back into the model.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::perf::PerfReport;

/// Totals of one clock domain as published.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
pub struct RefTotals {
    pub latency_ms: f64,
    pub memory_mb: f64,
    pub performance_gops: f64,
    pub efficiency_pct: f64,
    pub peak_gops: f64,
    pub throughput_fps: f64,
}

/// Published per-layer breakdown point.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
pub struct RefLayer {
    pub layer: usize,
    pub efficiency_pct: f64,
    pub memory_mb: f64,
    pub latency_ms: f64,
}

/// Reference record for one network.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct ReferenceData {
    pub network: String,
    pub source: String,
    pub conv: RefTotals,
    pub fc: RefTotals,
    pub per_layer: Vec<RefLayer>,
}

static ALEXNET: OnceLock<ReferenceData> = OnceLock::new();
static VGG16: OnceLock<ReferenceData> = OnceLock::new();
static RESNET50: OnceLock<ReferenceData> = OnceLock::new();

fn parse(raw: &str) -> ReferenceData {
    serde_json::from_str(raw).expect("embedded reference data is valid")
}

/// Reference data for a built-in network name, if available.
pub fn reference_for(network: &str) -> Option<&'static ReferenceData> {
    match network.to_ascii_lowercase().as_str() {
        "alexnet" => {
            Some(ALEXNET.get_or_init(|| parse(include_str!("../data/reference/alexnet.json"))))
        }
        "vgg16" => Some(VGG16.get_or_init(|| parse(include_str!("../data/reference/vgg16.json")))),
        "resnet50" => {
            Some(RESNET50.get_or_init(|| parse(include_str!("../data/reference/resnet50.json"))))
        }
        _ => None,
    }
}

/// One compared quantity.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaRow {
    pub metric: String,
    pub model: f64,
    pub reference: f64,
    /// model - reference, in the metric's own unit.
    pub delta: f64,
    /// (model - reference) / reference, as a percentage.
    pub delta_pct: f64,
}

fn delta_row(metric: impl Into<String>, model: f64, reference: f64) -> DeltaRow {
    DeltaRow {
        metric: metric.into(),
        model,
        reference,
        delta: model - reference,
        delta_pct: if reference != 0.0 {
            (model - reference) / reference * 100.0
        } else {
            0.0
        },
    }
}

/// Model-vs-reference comparison of a report.
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub network: String,
    pub totals: Vec<DeltaRow>,
    /// Per-layer efficiency deltas in percentage points.
    pub layer_efficiency: Vec<DeltaRow>,
}

/// Diff a computed report against the published figures.
pub fn compare_report(report: &PerfReport, reference: &ReferenceData) -> Comparison {
    let totals = vec![
        delta_row(
            "conv latency_ms",
            report.conv.latency_s * 1e3,
            reference.conv.latency_ms,
        ),
        delta_row(
            "conv memory_mb",
            report.conv.ma_mb,
            reference.conv.memory_mb,
        ),
        delta_row(
            "conv efficiency_pct",
            report.conv.efficiency * 100.0,
            reference.conv.efficiency_pct,
        ),
        delta_row(
            "conv peak_gops",
            report.conv.peak_gops,
            reference.conv.peak_gops,
        ),
        delta_row(
            "fc latency_ms",
            report.fc.latency_s * 1e3,
            reference.fc.latency_ms,
        ),
        delta_row("fc memory_mb", report.fc.ma_mb, reference.fc.memory_mb),
        delta_row(
            "fc efficiency_pct",
            report.fc.efficiency * 100.0,
            reference.fc.efficiency_pct,
        ),
    ];
    let layer_efficiency = report
        .layers
        .iter()
        .zip(&reference.per_layer)
        .map(|(l, r)| {
            delta_row(
                format!("layer {}", l.index),
                l.efficiency * 100.0,
                r.efficiency_pct,
            )
        })
        .collect();
    Comparison {
        network: report.network.clone(),
        totals,
        layer_efficiency,
    }
}

/// Render a comparison as a text table.
pub fn comparison_to_text(cmp: &Comparison) -> String {
    let mut out = format!("reference comparison for {}\n", cmp.network);
    out.push_str("metric                     model       reference   delta\n");
    for row in &cmp.totals {
        out.push_str(&format!(
            "{:<26} {:<11.3} {:<11.3} {:+.2} ({:+.1}%)\n",
            row.metric, row.model, row.reference, row.delta, row.delta_pct
        ));
    }
    out.push_str("layer efficiency (points): ");
    let deltas: Vec<String> = cmp
        .layer_efficiency
        .iter()
        .map(|r| format!("{:+.1}", r.delta))
        .collect();
    out.push_str(&deltas.join(" "));
    out.push('\n');
    out
}
