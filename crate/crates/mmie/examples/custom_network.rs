//! Build a custom network descriptor, save it as JSON, reload it, and
//! run both the analytical report and a bit-exact validation on it.

use mmie::cli::{cmd_validate, RunSpec};
use mmie::engine::EngineConfig;
use mmie::model::layer::{ConvLayerConfig, FcLayerConfig, LayerConfig};
use mmie::model::NetworkDescriptor;
use mmie::perf;

fn main() {
    let net = NetworkDescriptor::new(
        "toy",
        vec![
            LayerConfig::Conv(ConvLayerConfig::new(18, 18, 4, 3, 3, 1, 8).unwrap()),
            LayerConfig::Conv(ConvLayerConfig::new(16, 16, 8, 1, 1, 1, 16).unwrap()),
            LayerConfig::Fc(FcLayerConfig::new(4096, 10).unwrap()),
        ],
    )
    .unwrap();

    let dir = std::env::temp_dir();
    let path = dir.join("toy_net.json");
    net.save(&path).unwrap();
    println!("descriptor written to {}", path.display());

    let engine = EngineConfig::default();
    let reloaded = NetworkDescriptor::load(&path).unwrap();
    let report = perf::network_report(&reloaded, &engine).unwrap();
    print!("{}", perf::report_to_text(&report));

    let spec = RunSpec {
        network: path.to_string_lossy().into_owned(),
        seed: 9,
        ..RunSpec::default()
    };
    let summary = cmd_validate(&spec, &engine).unwrap();
    print!("{}", summary.to_text());
    assert!(summary.all_passed());
}
