//! Records a JSONL trace on the chain family and rebuilds the schedule
//! from its assignment events.

use clpsched::localsearch::{read_jsonl, replay, solve, write_jsonl, SearchOptions, VariantChoice};
use clpsched::model::PartialSchedule;
use clpsched::toolkit::gen_chain;

fn main() -> clpsched::Result<()> {
    let inst = gen_chain(5, 8)?;
    let opts = SearchOptions { record_trace: true, ..SearchOptions::default() };
    let sol = solve(&inst, VariantChoice::General, opts)?;

    let mut buf = Vec::new();
    write_jsonl(&mut buf, &sol.trace)?;
    print!("{}", String::from_utf8_lossy(&buf));

    let records = read_jsonl(&buf[..])?;
    let rebuilt = replay(&inst, &PartialSchedule::empty(&inst), &records)?;
    println!("replayed schedule matches: {}", rebuilt == sol.schedule);
    println!("makespan {} at T = {}", sol.makespan, sol.target);
    Ok(())
}
