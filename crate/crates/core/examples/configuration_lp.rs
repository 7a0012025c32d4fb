//! OPT_LP by binary search, the columns behind a feasible verdict and the
//! exact dual ray behind an infeasible one.

use clpsched::configlp::{clp_feasible, opt_lp_with_probes, verify_dual, LpVerdict};
use clpsched::model::Instance;

fn main() -> clpsched::Result<()> {
    let inst = Instance::new(2, vec![(2, vec![0, 1]), (2, vec![0]), (2, vec![1])])?;

    let lp = opt_lp_with_probes(&inst)?;
    println!("OPT_LP = {}", lp.value);
    for p in &lp.probes {
        println!("  probe T={} feasible={}", p.t, p.feasible);
    }

    if let LpVerdict::Feasible { columns } = clp_feasible(&inst, lp.value)? {
        for (config, weight) in columns {
            println!("  x[{}, {:?}] = {weight:.3}", config.machine, config.jobs);
        }
    }

    if let LpVerdict::Infeasible { certificate: Some(prices) } = clp_feasible(&inst, lp.value - 1)? {
        let check = verify_dual(&inst, lp.value - 1, &prices)?;
        println!(
            "T={}: y={:?} z={:?} sum y {} < sum z {}: {}",
            lp.value - 1,
            prices.y,
            prices.z,
            check.sum_y,
            check.sum_z,
            check.is_certificate()
        );
    }
    Ok(())
}
