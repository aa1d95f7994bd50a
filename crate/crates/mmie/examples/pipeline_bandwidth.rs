//! Input-bandwidth planning: staggering tile weight loads across
//! pipeline stages trades the 193-word peak down to a few words per
//! cycle on average.

use mmie::engine::{plan_pipeline, EngineConfig};
use mmie::gfid::SUPPORTED_MODES;
use mmie::model::ConvLayerConfig;

fn main() {
    let engine = EngineConfig::default();
    println!("mode     stage_bound  peak_words  avg_words(max stages)");
    for (w_f, s) in SUPPORTED_MODES {
        let cfg = ConvLayerConfig::new(w_f + 8 * s, w_f + 8 * s, 1, w_f, w_f, s, 1).unwrap();
        let plan = plan_pipeline(&cfg, &engine, None).unwrap();
        println!(
            "{w_f:>2}x{w_f:<2}/{s}  {:>10}  {:>10}  {:>10.2}",
            plan.stage_bound, plan.unpipelined_words_per_cycle, plan.pipelined_words_per_cycle
        );
    }
}
