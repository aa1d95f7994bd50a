//! Cycle trace of one tile running a 3x3/1 filter-row pass over six
//! outputs: the classic 8-cycle walkthrough with 3 active PEs. Emits the
//! trace as CSV (cycle,pe,busy,weight_index,acc_slot).

use mmie::datagen;
use mmie::gfid::TileModeConfig;
use mmie::tile::Tile;

fn main() {
    let mode = TileModeConfig::baseline(3, 1).unwrap();
    let mut tile = Tile::configure(mode).unwrap();
    tile.record_trace(true);

    let mut rng = datagen::rng_for(1, 0);
    let pixels: Vec<_> = (0..8)
        .map(|_| datagen::random_activation(&mut rng))
        .collect();
    let weights: Vec<_> = (0..3).map(|_| datagen::random_weight(&mut rng)).collect();
    let trace = tile.run_row_pass(&pixels, &[&weights], 6, false).unwrap();

    print!("{}", trace.to_csv());
    eprintln!(
        "cycles={} busy={} ratio={:.1}% (one logical tile of {} PEs)",
        trace.total_cycles,
        trace.busy_total(),
        trace.busy_ratio(mode.t_group, 1) * 100.0,
        mode.t_group
    );
}
