//! Utilization factors of the five tile modes: the minimum-PE ceiling,
//! the as-provisioned limit, and the approach to it as segments grow.

use mmie::gfid::{
    active_pe_count, mode_utilization, mode_utilization_limit, utilization_max, SUPPORTED_MODES,
};

fn main() {
    println!("mode      T  group  UF_max(T)  limit(group)  n=group   n=8*group  n=64*group");
    for (w_f, s) in SUPPORTED_MODES {
        let t = active_pe_count(w_f, s);
        let mode = mmie::TileModeConfig::baseline(w_f, s).unwrap();
        let at = |n: usize| mode_utilization(w_f, s, n).unwrap() * 100.0;
        println!(
            "{w_f:>2}x{w_f:<2}/{s}  {t}  {:>5}  {:>8.2}%  {:>11.2}%  {:>7.2}%  {:>8.2}%  {:>9.2}%",
            mode.t_group,
            utilization_max(w_f, s, t) * 100.0,
            mode_utilization_limit(w_f, s).unwrap() * 100.0,
            at(mode.t_group),
            at(8 * mode.t_group),
            at(64 * mode.t_group),
        );
    }
}
