//! Command front end: load network descriptors, run analytical reports and
//! reduced-scale cycle-accurate validations, diff against the embedded
//! reference figures, emit JSON/CSV/text.
//!
//! Every number printed here is produced by the perf or engine modules;
//! this layer only selects, formats and writes.

use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::Serialize;

use crate::datagen;
use crate::engine::{self, EngineConfig, LayerData, SimResult};
use crate::error::{Error, Result};
use crate::gfid::build_schedule;
use crate::model::layer::LayerConfig;
use crate::model::network::{builtin_network, NetworkDescriptor};
use crate::oracle;
use crate::perf;
use crate::reference;

/// Environment variable capping validation worker threads.
pub const THREADS_ENV: &str = "GFID_SIM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

/// Options shared by the report/simulate/validate commands.
#[derive(Debug, Clone)]
pub struct RunSpec {
    /// Built-in name or descriptor path.
    pub network: String,
    /// 1-based layer indices to keep (None = all).
    pub layers: Option<Vec<usize>>,
    pub format: OutputFormat,
    pub compare: bool,
    /// Channel subsampling divisor for reduced-scale simulation.
    pub scale: usize,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            network: String::new(),
            layers: None,
            format: OutputFormat::Text,
            compare: false,
            scale: 1,
            out: None,
            seed: 0,
        }
    }
}

/// Resolve a built-in name or a JSON descriptor path.
pub fn resolve_network(name_or_path: &str) -> Result<NetworkDescriptor> {
    match builtin_network(name_or_path) {
        Ok(net) => Ok(net),
        Err(err) => {
            let path = Path::new(name_or_path);
            if path.exists() {
                NetworkDescriptor::load(path)
            } else {
                Err(err)
            }
        }
    }
}

/// Parse a layer selection like `3`, `1-5` or `1,4,7`.
pub fn parse_layer_range(spec: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once('-') {
            let a: usize = a.trim().parse().map_err(|_| bad_range(spec))?;
            let b: usize = b.trim().parse().map_err(|_| bad_range(spec))?;
            if a == 0 || b < a {
                return Err(bad_range(spec));
            }
            out.extend(a..=b);
        } else {
            let v: usize = part.parse().map_err(|_| bad_range(spec))?;
            if v == 0 {
                return Err(bad_range(spec));
            }
            out.push(v);
        }
    }
    Ok(out)
}

fn bad_range(spec: &str) -> Error {
    Error::InvalidArgument(format!("bad layer range `{spec}` (use N, A-B or A,B,C)"))
}

fn keep_layer(layers: &Option<Vec<usize>>, index1: usize) -> bool {
    layers.as_ref().is_none_or(|keep| keep.contains(&index1))
}

fn write_or_return(spec: &RunSpec, body: String) -> Result<String> {
    if let Some(path) = &spec.out {
        std::fs::write(path, &body)?;
    }
    Ok(body)
}

fn worker_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(1)
}

/// Index-preserving parallel map over layer jobs, capped by the
/// GFID_SIM_THREADS environment variable.
fn parallel_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send + Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let threads = worker_threads().min(items.len().max(1));
    if threads <= 1 {
        return items.iter().map(&f).collect();
    }
    let mut results: Vec<Option<R>> = Vec::new();
    results.resize_with(items.len(), || None);
    let results = Mutex::new(results);
    let next = std::sync::atomic::AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("worker filled every slot"))
        .collect()
}

/// Analytical report, optionally diffed against the embedded reference.
pub fn cmd_report(spec: &RunSpec, engine: &EngineConfig) -> Result<String> {
    let net = resolve_network(&spec.network)?;
    let mut report = perf::network_report(&net, engine)?;
    if spec.layers.is_some() {
        report.layers.retain(|l| keep_layer(&spec.layers, l.index));
    }
    let mut body = match spec.format {
        OutputFormat::Text => perf::report_to_text(&report),
        OutputFormat::Csv => perf::report_to_csv(&report),
        OutputFormat::Json => perf::report_to_json(&report)?,
    };
    if spec.compare {
        match reference::reference_for(&net.name) {
            Some(reference_data) => {
                let cmp = reference::compare_report(&report, reference_data);
                match spec.format {
                    OutputFormat::Json => {
                        body.push('\n');
                        body.push_str(&serde_json::to_string_pretty(&cmp)?);
                    }
                    _ => {
                        body.push('\n');
                        body.push_str(&reference::comparison_to_text(&cmp));
                    }
                }
            }
            None => {
                body.push_str("\n(no embedded reference data for this network)\n");
            }
        }
    }
    write_or_return(spec, body)
}

/// One simulated-layer record, the JSON schema of the simulate command.
#[derive(Debug, Clone, Serialize)]
pub struct SimRecord {
    pub layer: usize,
    pub kind: String,
    pub cycles: u64,
    pub ma_inputs: u64,
    pub ma_weights: u64,
    pub ma_outputs: u64,
    pub busy_ratio: f64,
    pub saturations: u64,
}

fn sim_record(
    index1: usize,
    layer: &LayerConfig,
    r: &SimResult,
    engine: &EngineConfig,
) -> SimRecord {
    SimRecord {
        layer: index1,
        kind: if layer.is_conv() { "conv" } else { "fc" }.into(),
        cycles: r.cycles,
        ma_inputs: r.ma_inputs,
        ma_weights: r.ma_weights,
        ma_outputs: r.ma_outputs,
        busy_ratio: r.busy_ratio(engine),
        saturations: r.saturations,
    }
}

fn layer_data(layer: &LayerConfig, seed: u64, index: usize) -> LayerData {
    let mut rng = datagen::rng_for(seed, index as u64);
    match layer {
        LayerConfig::Conv(cfg) => {
            let (x, w) = datagen::random_conv_data(cfg, &mut rng);
            LayerData::Conv { x, w }
        }
        LayerConfig::Fc(cfg) => {
            let (x, w, b) = datagen::random_fc_data(cfg, &mut rng);
            LayerData::Fc { x, w, b }
        }
    }
}

/// Run the cycle-accurate engine over the (scaled) network on seeded
/// random data and emit the per-layer counter records.
pub fn cmd_simulate(spec: &RunSpec, engine: &EngineConfig) -> Result<String> {
    let net = resolve_network(&spec.network)?.scale_channels(spec.scale)?;
    let selected: Vec<(usize, LayerConfig)> = net
        .layers
        .iter()
        .enumerate()
        .filter(|(i, _)| keep_layer(&spec.layers, i + 1))
        .map(|(i, l)| (i, *l))
        .collect();
    let records: Vec<Result<SimRecord>> = parallel_map(selected, |(i, layer)| {
        let data = layer_data(layer, spec.seed, *i);
        let result = match (layer, data) {
            (LayerConfig::Conv(cfg), LayerData::Conv { x, w }) => {
                engine::run_conv_layer(cfg, &x, &w, engine)?
            }
            (LayerConfig::Fc(cfg), LayerData::Fc { x, w, b }) => {
                engine::run_fc_layer(cfg, &x, &w, &b, engine)?
            }
            _ => unreachable!("data matches layer kind"),
        };
        Ok(sim_record(i + 1, layer, &result, engine))
    });
    let records: Vec<SimRecord> = records.into_iter().collect::<Result<_>>()?;
    let body = match spec.format {
        OutputFormat::Json => serde_json::to_string_pretty(&records)?,
        OutputFormat::Csv => {
            let mut out = String::from(
                "layer,kind,cycles,ma_inputs,ma_weights,ma_outputs,busy_ratio,saturations\n",
            );
            for r in &records {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{:.6},{}\n",
                    r.layer,
                    r.kind,
                    r.cycles,
                    r.ma_inputs,
                    r.ma_weights,
                    r.ma_outputs,
                    r.busy_ratio,
                    r.saturations
                ));
            }
            out
        }
        OutputFormat::Text => {
            let mut out = format!("simulated {} ({} layers)\n", net.name, records.len());
            for r in &records {
                out.push_str(&format!(
                    "layer {:<3} {:<4} cycles={:<12} busy={:.1}% saturations={}\n",
                    r.layer,
                    r.kind,
                    r.cycles,
                    r.busy_ratio * 100.0,
                    r.saturations
                ));
            }
            out
        }
    };
    write_or_return(spec, body)
}

/// Outcome of validating one layer.
#[derive(Debug, Clone, Serialize)]
pub struct LayerValidation {
    pub layer: usize,
    pub kind: String,
    pub bit_exact: bool,
    pub saturations: u64,
    pub measured_cycles: u64,
    pub model_cycles: u64,
    pub cycle_match: bool,
    pub detail: String,
}

impl LayerValidation {
    pub fn passed(&self) -> bool {
        self.bit_exact && self.cycle_match && self.saturations == 0
    }
}

/// Validation summary across the selected layers.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationSummary {
    pub network: String,
    pub scale: usize,
    pub layers: Vec<LayerValidation>,
}

impl ValidationSummary {
    pub fn all_passed(&self) -> bool {
        self.layers.iter().all(|l| l.passed())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "validate {} (scale {}): {} layers\n",
            self.network,
            self.scale,
            self.layers.len()
        );
        for l in &self.layers {
            out.push_str(&format!(
                "layer {:<3} {:<4} {} ({})\n",
                l.layer,
                l.kind,
                if l.passed() { "pass" } else { "FAIL" },
                l.detail
            ));
        }
        out.push_str(if self.all_passed() {
            "result: all layers bit-exact\n"
        } else {
            "result: FAILURES present\n"
        });
        out
    }
}

fn validate_layer(
    index: usize,
    layer: &LayerConfig,
    seed: u64,
    engine: &EngineConfig,
) -> Result<LayerValidation> {
    let data = layer_data(layer, seed, index);
    match (layer, data) {
        (LayerConfig::Conv(cfg), LayerData::Conv { x, w }) => {
            let r = engine::run_conv_layer(cfg, &x, &w, engine)?;
            let mut sat = 0;
            let expect = oracle::conv_forward_fixed(&x, &w, cfg, &mut sat)?;
            let bit_exact = r.output.as_tensor() == Some(&expect);
            let mode = engine.mode(cfg.w_f, cfg.s)?;
            let model_cycles = perf::conv_cycles(cfg, &mode);
            let (h_out, w_out) = cfg.output_dims();
            let divisible = (h_out * w_out) % mode.n_eff == 0 && cfg.c_out % mode.p_eff == 0;
            let sweeps = (cfg.h_f * cfg.c_in) as u64 * cfg.c_out.div_ceil(mode.p_eff) as u64;
            let bound = (mode.w_f - mode.s) as u64 * sweeps + 1;
            let cycle_match = if divisible {
                r.cycles == model_cycles
            } else {
                r.cycles >= model_cycles && r.cycles - model_cycles <= bound
            };
            let detail = format!(
                "cycles {} vs model {}{}",
                r.cycles,
                model_cycles,
                if divisible {
                    ", exact"
                } else {
                    ", fractional segment"
                }
            );
            Ok(LayerValidation {
                layer: index + 1,
                kind: "conv".into(),
                bit_exact,
                saturations: r.saturations,
                measured_cycles: r.cycles,
                model_cycles,
                cycle_match,
                detail,
            })
        }
        (LayerConfig::Fc(cfg), LayerData::Fc { x, w, b }) => {
            let r = engine::run_fc_layer(cfg, &x, &w, &b, engine)?;
            let mut sat = 0;
            let expect = oracle::fc_forward_fixed(&x, &w, &b, cfg, &mut sat)?;
            let bit_exact = r.output.as_vector() == Some(expect.as_slice());
            let model_cycles = perf::fc_cycles(cfg, engine);
            Ok(LayerValidation {
                layer: index + 1,
                kind: "fc".into(),
                bit_exact,
                saturations: r.saturations,
                measured_cycles: r.cycles,
                model_cycles,
                cycle_match: r.cycles == model_cycles,
                detail: format!("cycles {} vs model {}, exact", r.cycles, model_cycles),
            })
        }
        _ => unreachable!("data matches layer kind"),
    }
}

/// Engine-vs-reference validation of the (scaled) network: bit-exact
/// outputs against the fixed-point reference and measured-vs-analytical
/// cycle agreement.
pub fn cmd_validate(spec: &RunSpec, engine: &EngineConfig) -> Result<ValidationSummary> {
    let net = resolve_network(&spec.network)?.scale_channels(spec.scale)?;
    let selected: Vec<(usize, LayerConfig)> = net
        .layers
        .iter()
        .enumerate()
        .filter(|(i, _)| keep_layer(&spec.layers, i + 1))
        .map(|(i, l)| (i, *l))
        .collect();
    let results = parallel_map(selected, |(i, layer)| {
        validate_layer(*i, layer, spec.seed, engine)
    });
    let layers = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ValidationSummary {
        network: net.name,
        scale: spec.scale,
        layers,
    })
}

/// Render the schedule matrix grid for a (w_f, s, n) pass.
pub fn cmd_schedule(w_f: usize, s: usize, n: usize) -> Result<String> {
    let schedule = build_schedule(w_f, s, n)?;
    if schedule.rows() > 10_000 {
        return Err(Error::Capacity(format!(
            "schedule grid of {} rows is too large to print",
            schedule.rows()
        )));
    }
    Ok(schedule.grid_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_range_parsing() {
        assert_eq!(parse_layer_range("3").unwrap(), vec![3]);
        assert_eq!(parse_layer_range("1-4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_layer_range("1,3,5").unwrap(), vec![1, 3, 5]);
        assert_eq!(parse_layer_range("1-2,5").unwrap(), vec![1, 2, 5]);
        assert!(parse_layer_range("0").is_err());
        assert!(parse_layer_range("5-2").is_err());
        assert!(parse_layer_range("x").is_err());
    }

    #[test]
    fn schedule_guard_rejects_oversize() {
        assert!(cmd_schedule(3, 1, 100_000).is_err());
    }

    #[test]
    fn validate_small_custom_network_passes() {
        let spec = RunSpec {
            network: "alexnet".into(),
            layers: Some(vec![6, 8]), // small fc layers only
            scale: 64,
            seed: 3,
            ..RunSpec::default()
        };
        let summary = cmd_validate(&spec, &EngineConfig::default()).unwrap();
        assert_eq!(summary.layers.len(), 2);
        assert!(summary.all_passed(), "{}", summary.to_text());
    }

    #[test]
    fn report_csv_has_rows_for_selected_layers() {
        let spec = RunSpec {
            network: "alexnet".into(),
            layers: Some(vec![1, 2]),
            format: OutputFormat::Csv,
            ..RunSpec::default()
        };
        let csv = cmd_report(&spec, &EngineConfig::default()).unwrap();
        assert_eq!(csv.lines().count(), 3); // header + 2 layers
    }
}
