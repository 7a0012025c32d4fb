//! A seeded corpus solved in parallel, reporting the worst ratio seen.

use clpsched::cli::{bench_one, BENCH_HEADER};
use clpsched::toolkit::GenSpec;
use rayon::prelude::*;

fn main() {
    let spec = GenSpec::uniform(5, 16, 1, 20, 0.5, 0);
    let rows: Vec<_> = (0..200u64).into_par_iter().map(|seed| bench_one(&spec, seed, true)).collect();

    println!("{BENCH_HEADER}");
    for row in rows.iter().take(5) {
        println!("{}", row.csv());
    }
    println!("...");
    let worst = rows
        .iter()
        .filter_map(|r| r.ratio)
        .max_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)))
        .unwrap();
    let failures = rows.iter().filter(|r| r.failure.is_some()).count();
    println!("worst ratio {}/{} (bound 33/17), failures {failures}", worst.0, worst.1);
}
