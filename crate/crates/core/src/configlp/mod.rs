//! Configuration LP at an integer target `T`.
//!
//! A configuration for machine `i` is a set of jobs eligible on `i` whose
//! sizes sum to at most `T`. The LP asks for at most one (fractional)
//! configuration per machine such that every job is covered at least once.
//! Feasibility is decided by column generation over a phase-1 master whose
//! pricing problem is one knapsack per machine. Both verdicts are checked
//! before they are returned: feasible weights against the constraints,
//! infeasibility through an integer dual certificate whose knapsack bounds
//! are recomputed exactly.
//!
//! With integer sizes the configuration sets only change at integer `T`, so
//! the least feasible integer found by [`opt_lp`] is the LP optimum.

mod knapsack;
mod master;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;

pub use knapsack::{price_knapsack, Configuration};
use knapsack::price_knapsack_f64;
use master::{Master, REDUCED_COST_EPS};

/// Residual tolerance for accepting feasible master weights.
pub const WEIGHT_TOLERANCE: f64 = 1e-7;
const SHORTFALL_EPS: f64 = 1e-9;

/// Dual prices of the configuration LP, scaled to integers. The dual is
/// homogeneous, so any common positive scale describes the same ray.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualPrices {
    pub y: Vec<u64>,
    pub z: Vec<u64>,
}

/// Result of checking `y_i >= max_{C in C(i,T)} sum_{j in C} z_j` for every
/// machine, together with the objective comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCheck {
    /// `(machine, best knapsack value, y_i)` for each violated machine.
    pub violations: Vec<(usize, u64, u64)>,
    pub sum_y: u128,
    pub sum_z: u128,
}

impl DualCheck {
    pub fn constraints_hold(&self) -> bool {
        self.violations.is_empty()
    }

    /// `sum y < sum z`.
    pub fn is_negative(&self) -> bool {
        self.sum_y < self.sum_z
    }

    /// Feasible dual with negative objective: proves the LP infeasible.
    pub fn is_certificate(&self) -> bool {
        self.constraints_hold() && self.is_negative()
    }
}

/// Exact check of integer dual prices at target `t`.
pub fn verify_dual(inst: &Instance, t: u64, prices: &DualPrices) -> Result<DualCheck> {
    if prices.y.len() != inst.machine_count() || prices.z.len() != inst.job_count() {
        return Err(Error::Contract(format!(
            "dual has {} machine and {} job prices for a {}x{} instance",
            prices.y.len(),
            prices.z.len(),
            inst.machine_count(),
            inst.job_count()
        )));
    }
    let mut violations = Vec::new();
    for (i, &y) in prices.y.iter().enumerate() {
        let (_, best) = price_knapsack(inst, i, t, &prices.z);
        if best > y {
            violations.push((i, best, y));
        }
    }
    Ok(DualCheck {
        violations,
        sum_y: prices.y.iter().map(|&v| v as u128).sum(),
        sum_z: prices.z.iter().map(|&v| v as u128).sum(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpVerdict {
    /// Supporting columns and their weights. The support is whatever the
    /// solver produced and is not canonical.
    Feasible { columns: Vec<(Configuration, f64)> },
    /// `certificate` is an exactly verified dual ray when available.
    Infeasible { certificate: Option<DualPrices> },
}

impl LpVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpVerdict::Feasible { .. })
    }

    pub fn report(&self, t: u64, with_columns: bool) -> LpReport {
        let columns = match self {
            LpVerdict::Feasible { columns } if with_columns => Some(
                columns
                    .iter()
                    .map(|(c, w)| ColumnDump { machine: c.machine, jobs: c.jobs.clone(), weight: *w })
                    .collect(),
            ),
            _ => None,
        };
        LpReport { feasible: self.is_feasible(), t, columns }
    }
}

/// Serialized LP verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpReport {
    pub feasible: bool,
    #[serde(rename = "T")]
    pub t: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub columns: Option<Vec<ColumnDump>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnDump {
    pub machine: usize,
    pub jobs: Vec<usize>,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColgenOptions {
    /// Pricing rounds before giving up with [`Error::IterationCap`].
    pub max_rounds: u64,
    /// Simplex pivots per master solve.
    pub max_pivots: usize,
}

impl Default for ColgenOptions {
    fn default() -> Self {
        Self { max_rounds: 10_000, max_pivots: 100_000 }
    }
}

/// Decides configuration-LP feasibility at `t` by column generation.
pub fn clp_feasible(inst: &Instance, t: u64) -> Result<LpVerdict> {
    clp_feasible_with(inst, t, &ColgenOptions::default())
}

pub fn clp_feasible_with(inst: &Instance, t: u64, opts: &ColgenOptions) -> Result<LpVerdict> {
    let n = inst.job_count();
    let m = inst.machine_count();
    if n == 0 {
        return Ok(LpVerdict::Feasible { columns: Vec::new() });
    }
    let mut master = Master::new(n, m);
    let mut seen = std::collections::HashSet::new();
    for _round in 0..opts.max_rounds {
        if master.optimize(opts.max_pivots).is_none() {
            return Err(Error::IterationCap { limit: opts.max_pivots as u64 });
        }
        if master.objective() <= SHORTFALL_EPS {
            let columns = master.config_weights();
            check_weights(inst, t, &columns)?;
            return Ok(LpVerdict::Feasible { columns });
        }

        let (pi, mu) = master.duals();
        let mut added = false;
        for i in 0..m {
            let (config, value) = price_knapsack_f64(inst, i, t, &pi);
            if value - mu[i] > REDUCED_COST_EPS && seen.insert(config.clone()) {
                master.add_column(config);
                added = true;
            }
        }
        if !added {
            let certificate = round_certificate(inst, t, &pi).ok_or_else(|| {
                Error::Numerical(format!(
                    "master shortfall {:.3e} at T={t} but no exact certificate could be rounded",
                    master.objective()
                ))
            })?;
            return Ok(LpVerdict::Infeasible { certificate: Some(certificate) });
        }
    }
    Err(Error::IterationCap { limit: opts.max_rounds })
}

fn check_weights(inst: &Instance, t: u64, columns: &[(Configuration, f64)]) -> Result<()> {
    let mut per_machine = vec![0.0; inst.machine_count()];
    let mut cover = vec![0.0; inst.job_count()];
    for (config, w) in columns {
        if config.size(inst) > t || config.jobs.iter().any(|&j| !inst.job(j).is_eligible(config.machine)) {
            return Err(Error::Numerical(format!("generated column {config:?} is not a configuration")));
        }
        per_machine[config.machine] += w;
        for &j in &config.jobs {
            cover[j] += w;
        }
    }
    if let Some(i) = per_machine.iter().position(|&s| s > 1.0 + WEIGHT_TOLERANCE) {
        return Err(Error::Numerical(format!("machine {i} weight {} exceeds 1", per_machine[i])));
    }
    if let Some(j) = cover.iter().position(|&s| s < 1.0 - WEIGHT_TOLERANCE) {
        return Err(Error::Numerical(format!("job {j} covered only {}", cover[j])));
    }
    Ok(())
}

/// Turns float coverage duals into an integer ray. `z` is rounded down and
/// every `y_i` is set to the exact knapsack bound, so the constraints hold
/// by construction; only the strict objective comparison can fail.
fn round_certificate(inst: &Instance, t: u64, pi: &[f64]) -> Option<DualPrices> {
    for scale in [1e6, 1e9, 1e12] {
        let z: Vec<u64> = pi.iter().map(|&p| (p.max(0.0) * scale).floor() as u64).collect();
        let y: Vec<u64> = (0..inst.machine_count())
            .map(|i| price_knapsack(inst, i, t, &z).1)
            .collect();
        let prices = DualPrices { y, z };
        if verify_dual(inst, t, &prices).ok()?.is_certificate() {
            return Some(prices);
        }
    }
    None
}

/// Every configuration of `machine` at `t`, the empty one included.
/// Guarded to machines with at most 20 eligible jobs.
pub fn enumerate_configurations(inst: &Instance, machine: usize, t: u64) -> Result<Vec<Configuration>> {
    let ids: Vec<usize> = inst.eligible_jobs(machine).collect();
    if ids.len() > 20 {
        return Err(Error::GuardExceeded(format!(
            "machine {machine} has {} eligible jobs (limit 20)",
            ids.len()
        )));
    }
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << ids.len()) {
        let jobs: Vec<usize> = ids
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &j)| j)
            .collect();
        let size: u64 = jobs.iter().map(|&j| inst.size(j)).sum();
        if size <= t {
            out.push(Configuration { machine, jobs });
        }
    }
    Ok(out)
}

/// Upper bound on the total column count accepted by the brute-force oracle.
pub const BRUTEFORCE_COLUMN_LIMIT: usize = 100_000;

/// Solves the full configuration LP with every column enumerated up front.
/// Serves as the test oracle for [`clp_feasible`].
pub fn clp_feasible_bruteforce(inst: &Instance, t: u64) -> Result<LpVerdict> {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};

    let mut columns = Vec::new();
    for i in 0..inst.machine_count() {
        columns.extend(enumerate_configurations(inst, i, t)?.into_iter().filter(|c| !c.jobs.is_empty()));
        if columns.len() > BRUTEFORCE_COLUMN_LIMIT {
            return Err(Error::GuardExceeded(format!(
                "more than {BRUTEFORCE_COLUMN_LIMIT} configurations at T={t}"
            )));
        }
    }
    let mut covered = vec![false; inst.job_count()];
    for c in &columns {
        for &j in &c.jobs {
            covered[j] = true;
        }
    }
    if covered.iter().any(|c| !c) {
        return Ok(LpVerdict::Infeasible { certificate: None });
    }
    if inst.job_count() == 0 {
        return Ok(LpVerdict::Feasible { columns: Vec::new() });
    }

    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = columns.iter().map(|_| problem.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for i in 0..inst.machine_count() {
        let terms: Vec<_> = columns
            .iter()
            .zip(&vars)
            .filter(|(c, _)| c.machine == i)
            .map(|(_, &v)| (v, 1.0))
            .collect();
        if !terms.is_empty() {
            problem.add_constraint(&terms, ComparisonOp::Le, 1.0);
        }
    }
    for j in 0..inst.job_count() {
        let terms: Vec<_> = columns
            .iter()
            .zip(&vars)
            .filter(|(c, _)| c.jobs.contains(&j))
            .map(|(_, &v)| (v, 1.0))
            .collect();
        problem.add_constraint(&terms, ComparisonOp::Ge, 1.0);
    }
    match problem.solve() {
        Ok(solution) => {
            let support = columns
                .into_iter()
                .zip(&vars)
                .map(|(c, &v)| (c, solution[v]))
                .filter(|(_, w)| *w > 1e-9)
                .collect();
            Ok(LpVerdict::Feasible { columns: support })
        }
        Err(minilp::Error::Infeasible) => Ok(LpVerdict::Infeasible { certificate: None }),
        Err(e) => Err(Error::Numerical(format!("oracle LP: {e}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    #[serde(rename = "T")]
    pub t: u64,
    pub feasible: bool,
}

/// The LP optimum together with the binary-search probes that found it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptLp {
    pub value: u64,
    pub probes: Vec<Probe>,
}

/// Least integer `T` at which the configuration LP is feasible.
pub fn opt_lp(inst: &Instance) -> Result<u64> {
    Ok(opt_lp_with_probes(inst)?.value)
}

/// Binary search over `[max p_j, sum p_j]`. The upper end is always
/// feasible (every machine may take all of its jobs) and is not probed.
/// An instance without jobs has optimum 0.
pub fn opt_lp_with_probes(inst: &Instance) -> Result<OptLp> {
    let mut probes = Vec::new();
    if inst.job_count() == 0 {
        return Ok(OptLp { value: 0, probes });
    }
    let (mut lo, mut hi) = (inst.max_size(), inst.total_size());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let feasible = clp_feasible(inst, mid)?.is_feasible();
        probes.push(Probe { t: mid, feasible });
        if feasible {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(OptLp { value: lo, probes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Instance {
        Instance::new(2, vec![(2, vec![0, 1]), (2, vec![0]), (2, vec![1])]).unwrap()
    }

    fn e2() -> Instance {
        Instance::new(2, vec![(6, vec![0, 1]), (2, vec![0]), (2, vec![0]), (2, vec![0])]).unwrap()
    }

    #[test]
    fn e1_verdicts() {
        assert!(!clp_feasible(&e1(), 3).unwrap().is_feasible());
        assert!(clp_feasible(&e1(), 4).unwrap().is_feasible());
        assert!(!clp_feasible_bruteforce(&e1(), 3).unwrap().is_feasible());
        assert!(clp_feasible_bruteforce(&e1(), 4).unwrap().is_feasible());
        assert_eq!(opt_lp(&e1()).unwrap(), 4);
    }

    #[test]
    fn e2_verdicts() {
        assert!(!clp_feasible(&e2(), 5).unwrap().is_feasible());
        assert!(clp_feasible(&e2(), 6).unwrap().is_feasible());
        assert!(clp_feasible_bruteforce(&e2(), 6).unwrap().is_feasible());
        assert_eq!(opt_lp(&e2()).unwrap(), 6);
    }

    #[test]
    fn oversized_job_is_infeasible() {
        let inst = Instance::new(1, vec![(5, vec![0])]).unwrap();
        assert!(!clp_feasible(&inst, 4).unwrap().is_feasible());
        assert!(!clp_feasible_bruteforce(&inst, 4).unwrap().is_feasible());
        assert_eq!(opt_lp(&inst).unwrap(), 5);
    }

    #[test]
    fn total_size_is_always_feasible() {
        let inst = Instance::new(3, vec![(3, vec![0]), (4, vec![0, 2]), (1, vec![1]), (5, vec![2])]).unwrap();
        assert!(clp_feasible(&inst, inst.total_size()).unwrap().is_feasible());
    }

    #[test]
    fn infeasible_verdict_carries_exact_certificate() {
        let LpVerdict::Infeasible { certificate: Some(cert) } = clp_feasible(&e1(), 3).unwrap() else {
            panic!("expected a certificate");
        };
        assert!(verify_dual(&e1(), 3, &cert).unwrap().is_certificate());
    }

    #[test]
    fn feasible_columns_are_configurations() {
        let LpVerdict::Feasible { columns } = clp_feasible(&e2(), 6).unwrap() else {
            panic!("expected feasible");
        };
        for (c, w) in &columns {
            assert!(c.size(&e2()) <= 6);
            assert!(*w > 0.0 && *w <= 1.0 + WEIGHT_TOLERANCE);
        }
    }

    #[test]
    fn enumerate_small_cases() {
        let inst = Instance::new(1, vec![(2, vec![0]), (2, vec![0])]).unwrap();
        let configs = enumerate_configurations(&inst, 0, 3).unwrap();
        assert_eq!(configs.len(), 3);
        assert!(configs.iter().any(|c| c.jobs.is_empty()));
        assert_eq!(enumerate_configurations(&inst, 0, 0).unwrap().len(), 1);
        let single = Instance::new(1, vec![(1, vec![0])]).unwrap();
        assert_eq!(enumerate_configurations(&single, 0, 1).unwrap().len(), 2);
    }

    #[test]
    fn enumerate_guard() {
        let inst = Instance::new(1, (0..21).map(|_| (1, vec![0])).collect()).unwrap();
        assert!(matches!(enumerate_configurations(&inst, 0, 5), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn verify_dual_cases() {
        let zero = DualPrices { y: vec![0, 0], z: vec![0, 0, 0] };
        let check = verify_dual(&e1(), 4, &zero).unwrap();
        assert!(check.constraints_hold());
        assert!(!check.is_negative());

        let stuck = DualPrices { y: vec![33, 33], z: vec![33, 33, 33] };
        let check = verify_dual(&e1(), 3, &stuck).unwrap();
        assert!(check.constraints_hold());
        assert_eq!((check.sum_y, check.sum_z), (66, 99));
        assert!(check.is_certificate());

        let bad = DualPrices { y: vec![0, 0], z: vec![1, 0, 0] };
        let check = verify_dual(&e1(), 4, &bad).unwrap();
        assert_eq!(check.violations, vec![(0, 1, 0), (1, 1, 0)]);
    }

    #[test]
    fn report_serializes_with_t_field() {
        let report = clp_feasible(&e1(), 4).unwrap().report(4, false);
        let text = serde_json::to_string(&report).unwrap();
        assert_eq!(text, r#"{"feasible":true,"T":4}"#);
        assert_eq!(serde_json::from_str::<LpReport>(&text).unwrap(), report);
    }
}
