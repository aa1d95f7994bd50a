//! Analytical whole-network report for a built-in network.
//!
//! Usage: cargo run --example network_report [alexnet|vgg16|resnet50]

use mmie::engine::EngineConfig;
use mmie::model::builtin_network;
use mmie::perf;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "alexnet".into());
    let net = builtin_network(&name).expect("built-in network name");
    let report = perf::network_report(&net, &EngineConfig::default()).unwrap();
    print!("{}", perf::report_to_text(&report));
}
