//! Schedules a random instance at T = OPT_LP with the 33/17 search.

use clpsched::localsearch::{solve, SearchOptions, VariantChoice};
use clpsched::toolkit::{gen_random, GenSpec};

fn main() -> clpsched::Result<()> {
    let inst = gen_random(&GenSpec::uniform(4, 14, 1, 20, 0.6, 2024))?;
    let sol = solve(&inst, VariantChoice::General, SearchOptions::default())?;

    println!("T = {}, makespan = {}, ratio = {}/{}", sol.target, sol.makespan, sol.ratio.0, sol.ratio.1);
    println!("17 * {} <= 33 * {}: {}", sol.makespan, sol.target, 17 * sol.makespan <= 33 * sol.target);
    for i in 0..inst.machine_count() {
        let jobs: Vec<String> = sol.schedule.jobs_on(i).iter().map(|&j| format!("{j}({})", inst.size(j))).collect();
        println!("  machine {i}: load {:>3}  {}", sol.schedule.load(i), jobs.join(" "));
    }
    println!(
        "{} iterations, {} blockers added, largest tree {}",
        sol.stats.iterations, sol.stats.blockers_added, sol.stats.max_tree_size
    );
    Ok(())
}
