use serde::{Deserialize, Serialize};

use crate::configlp::{verify_dual, DualCheck, DualPrices};
use crate::error::{Error, Result};
use crate::localsearch::moves::{compute_s_i, enumerate_moves};
use crate::localsearch::tree::BlockerTree;
use crate::model::{Instance, PartialSchedule, Rules, SizeClass, Variant};

/// Integer dual ray built from a stuck search state. Prices are scaled by
/// `scale` (3T for two sizes, 17T in general), so `scale` plays the role of
/// one normalized time unit and job prices are rounded-down sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub scale: u64,
    pub y: Vec<u64>,
    pub z: Vec<u64>,
}

impl DualCertificate {
    pub fn prices(&self) -> DualPrices {
        DualPrices { y: self.y.clone(), z: self.z.clone() }
    }

    pub fn verify(&self, inst: &Instance, t: u64) -> Result<DualCheck> {
        verify_dual(inst, t, &self.prices())
    }

    pub fn sum_y(&self) -> u128 {
        self.y.iter().map(|&v| v as u128).sum()
    }

    pub fn sum_z(&self) -> u128 {
        self.z.iter().map(|&v| v as u128).sum()
    }
}

/// Dual prices for a state with no potential move.
///
/// Jobs in the tree are priced by rounded-down size: big jobs at 2/3 (two
/// sizes) or 11/17 (general), medium jobs at 9/17, small jobs at their size;
/// small jobs stuck behind small blockers (the `S` sets) are priced at their
/// size too, everything else at 0. Machines in small blockers get price 1,
/// every other machine the total price of the jobs it holds.
pub fn build_certificate(
    inst: &Instance,
    sched: &PartialSchedule,
    tree: &BlockerTree,
    rules: &Rules,
) -> Result<DualCertificate> {
    let remaining = enumerate_moves(inst, sched, tree, rules);
    if !remaining.is_empty() {
        return Err(Error::Contract(format!(
            "certificate requested while {} potential move(s) remain",
            remaining.len()
        )));
    }
    let t = rules.target;
    let (scale, big_price, medium_price, unit) = match rules.variant {
        Variant::TwoSize { .. } => (3 * t, 2 * t, 0, 3),
        Variant::General => (17 * t, 11 * t, 9 * t, 17),
    };

    let mut z = vec![0u64; inst.job_count()];
    for j in tree.jobs() {
        let size = inst.size(j);
        z[j] = match rules.class(size) {
            SizeClass::Small => unit * size,
            SizeClass::Medium => medium_price,
            SizeClass::Large | SizeClass::Huge => big_price,
        };
    }
    for i in 0..inst.machine_count() {
        for j in compute_s_i(inst, sched, tree, rules, i) {
            z[j] = unit * inst.size(j);
        }
    }

    let y = (0..inst.machine_count())
        .map(|i| {
            if tree.in_small(i) {
                scale
            } else {
                sched.jobs_on(i).iter().map(|&j| z[j]).sum()
            }
        })
        .collect();
    Ok(DualCertificate { scale, y, z })
}
