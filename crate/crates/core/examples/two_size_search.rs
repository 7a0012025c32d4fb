//! The two-size search on generated instances whose big size equals OPT_LP.

use clpsched::configlp::opt_lp;
use clpsched::localsearch::{solve_with_target, SearchOptions, VariantChoice};
use clpsched::toolkit::gen_two_size;

fn main() -> clpsched::Result<()> {
    let (s, b) = (2, 9);
    let mut shown = 0;
    for seed in 0..1000 {
        let inst = gen_two_size(4, (s, b), (3, 4), 0.8, seed)?;
        let t = opt_lp(&inst)?;
        if t != b {
            continue;
        }
        let sol = solve_with_target(&inst, t, VariantChoice::TwoSize, SearchOptions::default())?;
        println!(
            "seed {seed}: makespan {} <= 5T/3 + s = {}: {}",
            sol.makespan,
            (5 * t + 3 * s) as f64 / 3.0,
            3 * sol.makespan <= 5 * t + 3 * s
        );
        shown += 1;
        if shown == 5 {
            break;
        }
    }
    Ok(())
}
