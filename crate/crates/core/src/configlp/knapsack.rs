use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::model::Instance;

/// A set of jobs assigned together to one machine.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub machine: usize,
    /// Sorted job ids.
    pub jobs: Vec<usize>,
}

impl Configuration {
    pub fn size(&self, inst: &Instance) -> u64 {
        self.jobs.iter().map(|&j| inst.size(j)).sum()
    }
}

/// 0/1 knapsack over integer weights with a profit type that only needs
/// addition and ordering. Returns the chosen item indices (into `items`) and
/// the best profit.
///
/// Among optimal subsets, the one with fewest items wins, then the
/// lexicographically smallest index list. Items with non-positive profit are
/// never taken.
pub(crate) fn solve_knapsack<P>(items: &[(u64, P)], capacity: u64) -> (Vec<usize>, P)
where
    P: Copy + PartialOrd + Add<Output = P> + Default,
{
    let zero = P::default();
    let cap = capacity as usize;
    let n = items.len();
    // best[k][c]: (profit, item count) using items k.. with capacity c
    let mut best = vec![vec![(zero, 0usize); cap + 1]; n + 1];
    for k in (0..n).rev() {
        let (w, p) = items[k];
        for c in 0..=cap {
            let skip = best[k + 1][c];
            best[k][c] = skip;
            if p > zero && (w as usize) <= c {
                let rest = best[k + 1][c - w as usize];
                let take = (p + rest.0, rest.1 + 1);
                if better(take, skip) {
                    best[k][c] = take;
                }
            }
        }
    }

    // walk forward, taking an item whenever the optimum is still reachable
    // with it; this yields the lexicographically smallest optimal list
    let mut chosen = Vec::new();
    let mut c = cap;
    for k in 0..n {
        let (w, p) = items[k];
        if p > zero && (w as usize) <= c {
            let rest = best[k + 1][c - w as usize];
            if (p + rest.0, rest.1 + 1) == best[k][c] {
                chosen.push(k);
                c -= w as usize;
            }
        }
    }
    (chosen, best[0][cap].0)
}

fn better<P: PartialOrd>(a: (P, usize), b: (P, usize)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Max-profit configuration for `machine` at capacity `capacity`. Jobs not
/// eligible on the machine are ignored whatever their profit.
pub fn price_knapsack(
    inst: &Instance,
    machine: usize,
    capacity: u64,
    profit: &[u64],
) -> (Configuration, u64) {
    let ids: Vec<usize> = inst.eligible_jobs(machine).collect();
    let items: Vec<(u64, u64)> = ids.iter().map(|&j| (inst.size(j), profit[j])).collect();
    let (chosen, value) = solve_knapsack(&items, capacity);
    let jobs = chosen.into_iter().map(|k| ids[k]).collect();
    (Configuration { machine, jobs }, value)
}

/// Same as [`price_knapsack`] with real-valued profits, used for pricing
/// against the master LP duals.
pub(crate) fn price_knapsack_f64(
    inst: &Instance,
    machine: usize,
    capacity: u64,
    profit: &[f64],
) -> (Configuration, f64) {
    let ids: Vec<usize> = inst.eligible_jobs(machine).collect();
    let items: Vec<(u64, f64)> = ids.iter().map(|&j| (inst.size(j), profit[j])).collect();
    let (chosen, value) = solve_knapsack(&items, capacity);
    let jobs = chosen.into_iter().map(|k| ids[k]).collect();
    (Configuration { machine, jobs }, value)
}
