//! Print the schedule matrix of a filter-row pass.
//!
//! Usage: cargo run --example print_schedule [w_f s n]

use mmie::gfid::{active_pe_count, build_schedule, mode_utilization, TileModeConfig};

fn main() {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let (w_f, s, n) = match args.as_slice() {
        [w_f, s, n] => (*w_f, *s, *n),
        [] => (3, 1, 6),
        _ => {
            eprintln!("usage: print_schedule [w_f s n]");
            std::process::exit(2);
        }
    };

    let schedule = build_schedule(w_f, s, n).expect("valid parameters");
    println!(
        "schedule for w_f={w_f}, s={s}, n={n}: {} cycles x {} outputs",
        schedule.rows(),
        schedule.cols()
    );
    print!("{}", schedule.grid_string());
    println!("active PEs at peak: {}", active_pe_count(w_f, s));
    if let Ok(mode) = TileModeConfig::baseline(w_f, s) {
        println!(
            "engine grouping: {} PEs per logical tile, n_eff={}, p_eff={}",
            mode.t_group, mode.n_eff, mode.p_eff
        );
        println!(
            "utilization at n={n}: {:.2}%",
            mode_utilization(w_f, s, n).unwrap() * 100.0
        );
    }
}
