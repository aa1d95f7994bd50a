//! Diff the analytical model against the published measurements of the
//! baseline implementation for all three built-in networks.

use mmie::engine::EngineConfig;
use mmie::model::builtin_network;
use mmie::perf;
use mmie::reference::{compare_report, comparison_to_text, reference_for};

fn main() {
    let engine = EngineConfig::default();
    for name in ["alexnet", "vgg16", "resnet50"] {
        let net = builtin_network(name).unwrap();
        let report = perf::network_report(&net, &engine).unwrap();
        let reference = reference_for(name).unwrap();
        let cmp = compare_report(&report, reference);
        println!("{}", comparison_to_text(&cmp));
    }
}
