//! Below OPT_LP the search can run out of moves. The stuck state then
//! prices jobs and machines into a dual ray of the configuration LP.

use clpsched::localsearch::{ExtendOutcome, LocalSearch, SearchOptions};
use clpsched::model::{Instance, Variant};

fn main() -> clpsched::Result<()> {
    let inst = Instance::new(2, vec![(2, vec![0, 1]), (2, vec![0]), (2, vec![1])])?;
    let mut search = LocalSearch::new(&inst, 3, Variant::General, SearchOptions::debug())?;

    for job in 0..inst.job_count() {
        match search.extend(job)? {
            ExtendOutcome::Extended => println!("job {job} placed, loads {:?}", search.schedule().loads()),
            ExtendOutcome::Stuck(cert) => {
                let check = cert.verify(&inst, 3)?;
                println!("job {job} stuck; prices scaled by {}", cert.scale);
                println!("  y = {:?}", cert.y);
                println!("  z = {:?}", cert.z);
                println!("  knapsack constraints hold: {}", check.constraints_hold());
                println!("  sum y = {} < sum z = {}", check.sum_y, check.sum_z);
            }
        }
    }
    Ok(())
}
