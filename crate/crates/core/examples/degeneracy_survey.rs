//! Prints the leading ED entanglement levels and their relative splittings
//! for a few sizes and cuts.
//!
//! cargo run --release --example degeneracy_survey -- 12 6

use std::time::Instant;

use espec_core::ed::{ed_solution, EdOptions};
use espec_core::{CutSpec, ModelParams};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer")).collect();
    let (l, la) = match args.as_slice() {
        [l, la] => (*l, *la),
        _ => (8, 4),
    };
    for dt in [-0.4, 0.4] {
        for u in [-3.0, 3.0] {
            let start = Instant::now();
            let params = ModelParams::unit_hopping(l, dt, u);
            let sol = ed_solution(&params, CutSpec::new(la), &EdOptions::default()).unwrap();
            let top = sol.spectrum.levels[0].weight;
            print!(
                "L={l} L_A={la} dt={dt:+} U={u:+}  E0={:.10} iters={} res={:.1e} t={:.2}s |",
                sol.ground.energies[0],
                sol.ground.iterations,
                sol.ground.residual,
                start.elapsed().as_secs_f64()
            );
            for lv in sol.spectrum.levels.iter().take(6) {
                print!(" {:.3e}({},{})", (top - lv.weight) / top, lv.n_up, lv.n_down);
            }
            println!();
        }
    }
}
