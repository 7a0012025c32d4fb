//! LP bound, exact optimum, greedy and local search side by side.

use clpsched::configlp::opt_lp;
use clpsched::localsearch::{solve_with_target, SearchOptions, VariantChoice};
use clpsched::model::makespan;
use clpsched::toolkit::{brute_force_opt, gen_random, greedy_baseline, GenSpec};

fn main() -> clpsched::Result<()> {
    println!("{:>4} {:>6} {:>4} {:>7} {:>7}", "seed", "OPT_LP", "OPT", "greedy", "search");
    for seed in 0..10 {
        let inst = gen_random(&GenSpec::uniform(3, 9, 1, 15, 0.5, seed))?;
        let t = opt_lp(&inst)?;
        let opt = brute_force_opt(&inst)?;
        let greedy = makespan(&greedy_baseline(&inst))?;
        let search = solve_with_target(&inst, t, VariantChoice::Auto, SearchOptions::default())?.makespan;
        println!("{seed:>4} {t:>6} {opt:>4} {greedy:>7} {search:>7}");
    }
    Ok(())
}
