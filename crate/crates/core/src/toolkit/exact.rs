use std::cmp::Reverse;

use crate::error::{Error, Result};
use crate::model::{Instance, PartialSchedule};

pub const BRUTE_FORCE_MAX_JOBS: usize = 14;
pub const BRUTE_FORCE_MAX_LEAVES: u128 = 10_000_000;

/// Exact optimal makespan by depth-first branch and bound.
pub fn brute_force_opt(inst: &Instance) -> Result<u64> {
    let n = inst.job_count();
    if n > BRUTE_FORCE_MAX_JOBS {
        return Err(Error::GuardExceeded(format!(
            "brute force allows at most {BRUTE_FORCE_MAX_JOBS} jobs, got {n}"
        )));
    }
    let leaves = inst
        .jobs()
        .iter()
        .fold(1u128, |acc, j| acc.saturating_mul(j.eligible.len() as u128));
    if leaves > BRUTE_FORCE_MAX_LEAVES {
        return Err(Error::GuardExceeded(format!(
            "brute force allows at most {BRUTE_FORCE_MAX_LEAVES} assignments, got {leaves}"
        )));
    }
    if n == 0 {
        return Ok(0);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| (Reverse(inst.size(j)), j));
    let m = inst.machine_count() as u64;
    let lower = inst.max_size().max(inst.total_size().div_ceil(m));
    let greedy = greedy_baseline(inst).loads().iter().copied().max().unwrap_or(0);

    let mut search = Search { inst, order: &order, loads: vec![0; inst.machine_count()], best: greedy, lower };
    if search.best > lower {
        search.descend(0, 0);
    }
    Ok(search.best)
}

struct Search<'a> {
    inst: &'a Instance,
    order: &'a [usize],
    loads: Vec<u64>,
    best: u64,
    lower: u64,
}

impl Search<'_> {
    fn descend(&mut self, depth: usize, current: u64) {
        if depth == self.order.len() {
            self.best = current;
            return;
        }
        let job = self.order[depth];
        let size = self.inst.size(job);
        for &i in &self.inst.job(job).eligible {
            let load = self.loads[i] + size;
            if load >= self.best {
                continue;
            }
            self.loads[i] = load;
            self.descend(depth + 1, current.max(load));
            self.loads[i] -= size;
            if self.best <= self.lower {
                return;
            }
        }
    }
}

/// Largest job first onto the least loaded eligible machine (lowest id on
/// ties).
pub fn greedy_baseline(inst: &Instance) -> PartialSchedule {
    let mut sched = PartialSchedule::empty(inst);
    let mut order: Vec<usize> = (0..inst.job_count()).collect();
    order.sort_by_key(|&j| (Reverse(inst.size(j)), j));
    for j in order {
        let target = *inst
            .job(j)
            .eligible
            .iter()
            .min_by_key(|&&i| (sched.load(i), i))
            .expect("jobs have nonempty eligibility");
        sched.assign(inst, j, target);
    }
    sched
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::makespan;
    use proptest::prelude::*;

    fn e1() -> Instance {
        Instance::new(2, vec![(2, vec![0, 1]), (2, vec![0]), (2, vec![1])]).unwrap()
    }

    fn e2() -> Instance {
        Instance::new(2, vec![(6, vec![0, 1]), (2, vec![0]), (2, vec![0]), (2, vec![0])]).unwrap()
    }

    #[test]
    fn worked_examples() {
        assert_eq!(brute_force_opt(&e1()).unwrap(), 4);
        assert_eq!(brute_force_opt(&e2()).unwrap(), 6);
        assert_eq!(brute_force_opt(&Instance::new(3, vec![(7, vec![2])]).unwrap()).unwrap(), 7);
        assert_eq!(brute_force_opt(&Instance::new(3, vec![]).unwrap()).unwrap(), 0);
    }

    #[test]
    fn guards() {
        let many = Instance::new(1, vec![(1, vec![0]); 15]).unwrap();
        assert!(matches!(brute_force_opt(&many), Err(Error::GuardExceeded(_))));
        let wide = Instance::new(4, vec![(1, vec![0, 1, 2, 3]); 12]).unwrap();
        assert!(matches!(brute_force_opt(&wide), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn greedy_examples() {
        let s = greedy_baseline(&e1());
        assert_eq!(makespan(&s).unwrap(), 4);
        assert_eq!((s.machine_of(1), s.machine_of(2)), (Some(0), Some(1)));
        assert_eq!(makespan(&greedy_baseline(&e2())).unwrap(), 12);
        let one = Instance::new(1, vec![(3, vec![0]), (4, vec![0]), (5, vec![0])]).unwrap();
        assert_eq!(makespan(&greedy_baseline(&one)).unwrap(), 12);
    }

    fn exhaustive(inst: &Instance) -> u64 {
        fn rec(inst: &Instance, j: usize, loads: &mut Vec<u64>) -> u64 {
            if j == inst.job_count() {
                return loads.iter().copied().max().unwrap_or(0);
            }
            let mut best = u64::MAX;
            for &i in &inst.job(j).eligible {
                loads[i] += inst.size(j);
                best = best.min(rec(inst, j + 1, loads));
                loads[i] -= inst.size(j);
            }
            best
        }
        rec(inst, 0, &mut vec![0; inst.machine_count()])
    }

    fn small_instance() -> impl Strategy<Value = Instance> {
        (1usize..4).prop_flat_map(|m| {
            prop::collection::vec((1u64..10, prop::collection::btree_set(0..m, 1..=m)), 0..7).prop_map(
                move |jobs| Instance::new(m, jobs.into_iter().map(|(p, e)| (p, e.into_iter().collect())).collect()).unwrap(),
            )
        })
    }

    proptest! {
        #[test]
        fn matches_plain_enumeration(inst in small_instance()) {
            prop_assert_eq!(brute_force_opt(&inst).unwrap(), exhaustive(&inst));
        }

        #[test]
        fn greedy_is_complete_and_eligible(inst in small_instance()) {
            let s = greedy_baseline(&inst);
            prop_assert!(s.is_complete());
            for j in 0..inst.job_count() {
                prop_assert!(inst.job(j).is_eligible(s.machine_of(j).unwrap()));
            }
            prop_assert!(s.cache_is_coherent(&inst));
        }
    }
}
