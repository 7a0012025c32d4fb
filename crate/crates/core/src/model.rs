//! Instances, partial schedules and the integer threshold rules.
//!
//! Sizes and targets are integers. Every fractional threshold of the
//! algorithms (9/17, 11/17, 14/17, the load bound 33/17 and the two-size
//! bound 5/3 + s/T) is evaluated after clearing denominators, so boundary
//! cases are decided exactly.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub size: u64,
    /// Sorted, duplicate free.
    pub eligible: Vec<usize>,
}

impl Job {
    pub fn is_eligible(&self, machine: usize) -> bool {
        self.eligible.binary_search(&machine).is_ok()
    }
}

/// A restricted assignment instance: job `j` takes `size` time units on the
/// machines in its eligibility set and cannot run anywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    machine_count: usize,
    jobs: Vec<Job>,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    machines: usize,
    jobs: Vec<JobFile>,
}

#[derive(Serialize, Deserialize)]
struct JobFile {
    p: u64,
    eligible: Vec<usize>,
}

impl Instance {
    /// Builds an instance from `(size, eligible machines)` pairs. Eligibility
    /// lists are sorted; duplicates are rejected.
    pub fn new(machine_count: usize, jobs: Vec<(u64, Vec<usize>)>) -> Result<Self> {
        if machine_count == 0 {
            return Err(Error::InvalidInstance("machine count must be positive".into()));
        }
        let mut out = Vec::with_capacity(jobs.len());
        for (id, (size, mut eligible)) in jobs.into_iter().enumerate() {
            if size == 0 {
                return Err(Error::InvalidInstance(format!("job {id} has size 0")));
            }
            if eligible.is_empty() {
                return Err(Error::InvalidInstance(format!("job {id} has no eligible machine")));
            }
            eligible.sort_unstable();
            if eligible.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInstance(format!(
                    "job {id} lists a machine twice"
                )));
            }
            if let Some(&bad) = eligible.iter().find(|&&i| i >= machine_count) {
                return Err(Error::InvalidInstance(format!(
                    "job {id} names machine {bad}, but there are only {machine_count}"
                )));
            }
            out.push(Job { size, eligible });
        }
        Ok(Self { machine_count, jobs: out })
    }

    pub fn machine_count(&self) -> usize {
        self.machine_count
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, id: usize) -> &Job {
        &self.jobs[id]
    }

    pub fn size(&self, id: usize) -> u64 {
        self.jobs[id].size
    }

    pub fn total_size(&self) -> u64 {
        self.jobs.iter().map(|j| j.size).sum()
    }

    pub fn max_size(&self) -> u64 {
        self.jobs.iter().map(|j| j.size).max().unwrap_or(0)
    }

    /// Distinct job sizes in increasing order.
    pub fn distinct_sizes(&self) -> Vec<u64> {
        let set: BTreeSet<u64> = self.jobs.iter().map(|j| j.size).collect();
        set.into_iter().collect()
    }

    /// Jobs that may run on `machine`, in id order.
    pub fn eligible_jobs(&self, machine: usize) -> impl Iterator<Item = usize> + '_ {
        self.jobs
            .iter()
            .enumerate()
            .filter(move |(_, j)| j.is_eligible(machine))
            .map(|(id, _)| id)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: InstanceFile = serde_json::from_str(s)?;
        Self::new(raw.machines, raw.jobs.into_iter().map(|j| (j.p, j.eligible)).collect())
    }

    pub fn to_json_string(&self) -> String {
        let raw = InstanceFile {
            machines: self.machine_count,
            jobs: self
                .jobs
                .iter()
                .map(|j| JobFile { p: j.size, eligible: j.eligible.clone() })
                .collect(),
        };
        serde_json::to_string(&raw).expect("instance serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeClass {
    Small,
    Medium,
    Large,
    Huge,
}

impl SizeClass {
    pub fn is_big(self) -> bool {
        matches!(self, SizeClass::Large | SizeClass::Huge)
    }
}

/// Job class relative to target `t`: small `<= 9/17`, medium strictly
/// between 9/17 and 11/17, large in `[11/17, 14/17)`, huge `>= 14/17`.
pub fn classify_general(size: u64, t: u64) -> SizeClass {
    let s = 17 * size as u128;
    let t = t as u128;
    if s <= 9 * t {
        SizeClass::Small
    } else if s < 11 * t {
        SizeClass::Medium
    } else if s < 14 * t {
        SizeClass::Large
    } else {
        SizeClass::Huge
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "variant")]
pub enum Variant {
    /// Instances with exactly two sizes `small < big`; the big size must
    /// equal the target when the search runs.
    TwoSize { small: u64 },
    General,
}

impl Variant {
    /// Checks that `inst` has exactly two distinct sizes with the smaller
    /// one equal to `small`.
    pub fn check_two_size(inst: &Instance, small: u64) -> Result<u64> {
        match inst.distinct_sizes().as_slice() {
            [s, b] if *s == small => Ok(*b),
            sizes => Err(Error::VariantPrecondition(format!(
                "two-size variant with small size {small} needs exactly two distinct sizes, found {sizes:?}"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Variant::TwoSize { .. } => "two-size",
            Variant::General => "general",
        }
    }
}

/// The integer form of the validity rules at a fixed target and variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rules {
    pub target: u64,
    pub variant: Variant,
}

impl Rules {
    pub fn new(target: u64, variant: Variant) -> Self {
        Self { target, variant }
    }

    /// Machine load bound: `17 load <= 33 T` in general, `3 load <= 5 T + 3 s`
    /// for two sizes.
    pub fn load_fits(&self, load: u64) -> bool {
        let load = load as u128;
        let t = self.target as u128;
        match self.variant {
            Variant::General => 17 * load <= 33 * t,
            Variant::TwoSize { small } => 3 * load <= 5 * t + 3 * small as u128,
        }
    }

    pub fn is_big(&self, size: u64) -> bool {
        match self.variant {
            Variant::General => classify_general(size, self.target).is_big(),
            Variant::TwoSize { small } => size != small,
        }
    }

    pub fn is_small(&self, size: u64) -> bool {
        match self.variant {
            Variant::General => classify_general(size, self.target) == SizeClass::Small,
            Variant::TwoSize { small } => size == small,
        }
    }

    /// Class under the general thresholds; two-size jobs map to `Small` or `Huge`.
    pub fn class(&self, size: u64) -> SizeClass {
        match self.variant {
            Variant::General => classify_general(size, self.target),
            Variant::TwoSize { small } if size == small => SizeClass::Small,
            Variant::TwoSize { .. } => SizeClass::Huge,
        }
    }
}

/// Assignment of jobs to machines, with `None` standing for "not yet
/// assigned". Loads and per-machine job sets are cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSchedule {
    assignment: Vec<Option<usize>>,
    loads: Vec<u64>,
    members: Vec<BTreeSet<usize>>,
}

impl PartialSchedule {
    pub fn empty(inst: &Instance) -> Self {
        Self {
            assignment: vec![None; inst.job_count()],
            loads: vec![0; inst.machine_count()],
            members: vec![BTreeSet::new(); inst.machine_count()],
        }
    }

    /// Complete schedule from a machine index per job.
    pub fn from_assignment(inst: &Instance, assignment: &[usize]) -> Result<Self> {
        if assignment.len() != inst.job_count() {
            return Err(Error::InvalidSchedule(format!(
                "assignment has {} entries for {} jobs",
                assignment.len(),
                inst.job_count()
            )));
        }
        let mut sched = Self::empty(inst);
        for (job, &machine) in assignment.iter().enumerate() {
            if machine >= inst.machine_count() {
                return Err(Error::InvalidSchedule(format!(
                    "job {job} assigned to unknown machine {machine}"
                )));
            }
            if !inst.job(job).is_eligible(machine) {
                return Err(Error::InvalidSchedule(format!(
                    "job {job} is not eligible on machine {machine}"
                )));
            }
            sched.assign(inst, job, machine);
        }
        Ok(sched)
    }

    pub fn machine_of(&self, job: usize) -> Option<usize> {
        self.assignment[job]
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn load(&self, machine: usize) -> u64 {
        self.loads[machine]
    }

    pub fn loads(&self) -> &[u64] {
        &self.loads
    }

    /// Jobs currently on `machine`, in id order.
    pub fn jobs_on(&self, machine: usize) -> &BTreeSet<usize> {
        &self.members[machine]
    }

    pub fn unassigned(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_none())
            .map(|(j, _)| j)
    }

    pub fn is_complete(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    /// Moves (or places) `job` onto `machine`. Eligibility is the caller's
    /// responsibility.
    pub fn assign(&mut self, inst: &Instance, job: usize, machine: usize) {
        let size = inst.size(job);
        if let Some(old) = self.assignment[job] {
            self.loads[old] -= size;
            self.members[old].remove(&job);
        }
        self.assignment[job] = Some(machine);
        self.loads[machine] += size;
        self.members[machine].insert(job);
    }

    pub fn unassign(&mut self, inst: &Instance, job: usize) {
        if let Some(old) = self.assignment[job].take() {
            self.loads[old] -= inst.size(job);
            self.members[old].remove(&job);
        }
    }

    /// Recomputes loads from the assignment and compares with the cache.
    pub fn cache_is_coherent(&self, inst: &Instance) -> bool {
        let mut loads = vec![0u64; self.loads.len()];
        for (job, a) in self.assignment.iter().enumerate() {
            if let Some(m) = *a {
                loads[m] += inst.size(job);
                if !self.members[m].contains(&job) {
                    return false;
                }
            }
        }
        let member_count: usize = self.members.iter().map(BTreeSet::len).sum();
        loads == self.loads && member_count == self.assignment.iter().flatten().count()
    }

    /// Complete assignment as plain machine indices.
    pub fn to_vec(&self) -> Result<Vec<usize>> {
        let missing: Vec<usize> = self.unassigned().collect();
        if let Some(&first) = missing.first() {
            return Err(Error::UnassignedJobs { count: missing.len(), first });
        }
        Ok(self.assignment.iter().map(|a| a.unwrap()).collect())
    }
}

/// `Γ(j)` without the machine `j` currently sits on.
pub fn movable_machines(inst: &Instance, sched: &PartialSchedule, job: usize) -> Vec<usize> {
    let current = sched.machine_of(job);
    inst.job(job)
        .eligible
        .iter()
        .copied()
        .filter(|&i| Some(i) != current)
        .collect()
}

/// Number of big jobs (per `rules`) on `machine`.
pub fn big_jobs_on(inst: &Instance, sched: &PartialSchedule, rules: &Rules, machine: usize) -> usize {
    sched
        .jobs_on(machine)
        .iter()
        .filter(|&&j| rules.is_big(inst.size(j)))
        .count()
}

/// Every machine within the load bound and carrying at most one big job.
pub fn is_valid_schedule(inst: &Instance, sched: &PartialSchedule, rules: &Rules) -> bool {
    (0..inst.machine_count()).all(|i| {
        rules.load_fits(sched.load(i)) && big_jobs_on(inst, sched, rules, i) <= 1
    })
}

/// Maximum machine load of a complete schedule.
pub fn makespan(sched: &PartialSchedule) -> Result<u64> {
    let missing: Vec<usize> = sched.unassigned().collect();
    if let Some(&first) = missing.first() {
        return Err(Error::UnassignedJobs { count: missing.len(), first });
    }
    Ok(sched.loads().iter().copied().max().unwrap_or(0))
}

/// `num/den` in lowest terms. `0/0` reduces to `0/1`.
pub fn reduced_ratio(num: u64, den: u64) -> (u64, u64) {
    if den == 0 {
        return (num.min(1), 1);
    }
    let g = num_integer::gcd(num, den).max(1);
    (num / g, den / g)
}

/// On-disk schedule format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub assignment: Vec<usize>,
    pub makespan: u64,
}

impl ScheduleFile {
    pub fn from_schedule(sched: &PartialSchedule) -> Result<Self> {
        Ok(Self { assignment: sched.to_vec()?, makespan: makespan(sched)? })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e1() -> Instance {
        Instance::new(2, vec![(2, vec![0, 1]), (2, vec![0]), (2, vec![1])]).unwrap()
    }

    #[test]
    fn classify_boundaries() {
        assert_eq!(classify_general(9, 17), SizeClass::Small);
        assert_eq!(classify_general(10, 17), SizeClass::Medium);
        assert_eq!(classify_general(11, 17), SizeClass::Large);
        assert_eq!(classify_general(13, 17), SizeClass::Large);
        assert_eq!(classify_general(14, 17), SizeClass::Huge);
        assert_eq!(classify_general(1, 1), SizeClass::Huge);
    }

    #[test]
    fn general_validity_boundary_and_big_rule() {
        let inst = Instance::new(1, vec![(17, vec![0]), (16, vec![0])]).unwrap();
        let rules = Rules::new(17, Variant::General);
        // one huge + one large job, load 33: load bound holds, big rule fails
        let sched = PartialSchedule::from_assignment(&inst, &[0, 0]).unwrap();
        assert!(rules.load_fits(33));
        assert!(!is_valid_schedule(&inst, &sched, &rules));

        let inst = Instance::new(1, vec![(14, vec![0]), (9, vec![0]), (9, vec![0]), (1, vec![0])]).unwrap();
        let sched = PartialSchedule::from_assignment(&inst, &[0, 0, 0, 0]).unwrap();
        assert_eq!(sched.load(0), 33);
        assert!(is_valid_schedule(&inst, &sched, &rules));

        let inst = Instance::new(1, vec![(11, vec![0]), (11, vec![0])]).unwrap();
        let sched = PartialSchedule::from_assignment(&inst, &[0, 0]).unwrap();
        assert!(!is_valid_schedule(&inst, &sched, &rules));
    }

    #[test]
    fn two_size_validity_boundary() {
        let rules = Rules::new(6, Variant::TwoSize { small: 2 });
        assert!(rules.load_fits(12));
        assert!(!rules.load_fits(13));
    }

    #[test]
    fn movable_machines_cases() {
        let inst = Instance::new(3, vec![(1, vec![0, 1]), (1, vec![0]), (1, vec![0, 1, 2])]).unwrap();
        let mut sched = PartialSchedule::empty(&inst);
        sched.assign(&inst, 0, 0);
        sched.assign(&inst, 1, 0);
        assert_eq!(movable_machines(&inst, &sched, 0), vec![1]);
        assert!(movable_machines(&inst, &sched, 1).is_empty());
        assert_eq!(movable_machines(&inst, &sched, 2), vec![0, 1, 2]);
    }

    #[test]
    fn makespan_cases() {
        let inst = Instance::new(2, vec![(4, vec![0]), (2, vec![1])]).unwrap();
        let sched = PartialSchedule::from_assignment(&inst, &[0, 1]).unwrap();
        assert_eq!(makespan(&sched).unwrap(), 4);

        let empty = Instance::new(3, vec![]).unwrap();
        assert_eq!(makespan(&PartialSchedule::empty(&empty)).unwrap(), 0);

        let sched = PartialSchedule::from_assignment(&e1(), &[0, 0, 1]).unwrap();
        assert_eq!(makespan(&sched).unwrap(), 4);

        let partial = PartialSchedule::empty(&e1());
        assert!(matches!(makespan(&partial), Err(Error::UnassignedJobs { count: 3, first: 0 })));
    }

    #[test]
    fn instance_validation() {
        assert!(Instance::new(0, vec![]).is_err());
        assert!(Instance::new(2, vec![(0, vec![0])]).is_err());
        assert!(Instance::new(2, vec![(1, vec![])]).is_err());
        assert!(Instance::new(2, vec![(1, vec![2])]).is_err());
        assert!(Instance::new(2, vec![(1, vec![1, 1])]).is_err());
        let inst = Instance::new(2, vec![(1, vec![1, 0])]).unwrap();
        assert_eq!(inst.job(0).eligible, vec![0, 1]);
    }

    #[test]
    fn instance_json_round_trip() {
        let text = r#"{"machines": 2, "jobs": [{"p": 2, "eligible": [0, 1]}, {"p": 2, "eligible": [0]}, {"p": 2, "eligible": [1]}]}"#;
        let inst = Instance::from_json_str(text).unwrap();
        assert_eq!(inst, e1());
        assert_eq!(Instance::from_json_str(&inst.to_json_string()).unwrap(), inst);
        assert!(Instance::from_json_str("{\"machines\": 2").is_err());
    }

    #[test]
    fn two_size_check() {
        let inst = Instance::new(2, vec![(6, vec![0, 1]), (2, vec![0]), (2, vec![0])]).unwrap();
        assert_eq!(Variant::check_two_size(&inst, 2).unwrap(), 6);
        assert!(Variant::check_two_size(&inst, 6).is_err());
        assert!(Variant::check_two_size(&e1(), 2).is_err());
    }

    proptest! {
        #[test]
        fn classification_partitions(size in 1u64..=200, t in 1u64..=200) {
            let class = classify_general(size, t);
            prop_assert_eq!(class.is_big(), 17 * size >= 11 * t);
            let hits = [
                17 * size <= 9 * t,
                9 * t < 17 * size && 17 * size < 11 * t,
                11 * t <= 17 * size && 17 * size < 14 * t,
                17 * size >= 14 * t,
            ];
            prop_assert_eq!(hits.iter().filter(|&&h| h).count(), 1);
        }

        #[test]
        fn validity_is_monotone_in_target(
            sizes in proptest::collection::vec(1u64..12, 1..8),
            machines in 1usize..4,
            seed in any::<u64>(),
            t in 1u64..20,
            two_size in any::<bool>(),
        ) {
            let jobs: Vec<(u64, Vec<usize>)> = sizes
                .iter()
                .map(|&s| (s, (0..machines).collect()))
                .collect();
            let inst = Instance::new(machines, jobs).unwrap();
            let assignment: Vec<usize> = (0..sizes.len())
                .map(|j| ((seed >> (j % 60)) as usize + j) % machines)
                .collect();
            let sched = PartialSchedule::from_assignment(&inst, &assignment).unwrap();
            let variant = if two_size { Variant::TwoSize { small: 1 } } else { Variant::General };
            if is_valid_schedule(&inst, &sched, &Rules::new(t, variant)) {
                prop_assert!(is_valid_schedule(&inst, &sched, &Rules::new(t + 1, variant)));
            }
        }

        #[test]
        fn load_cache_stays_coherent(ops in proptest::collection::vec((0usize..6, 0usize..3, any::<bool>()), 0..60)) {
            let inst = Instance::new(3, (0..6).map(|j| (j as u64 + 1, vec![0, 1, 2])).collect()).unwrap();
            let mut sched = PartialSchedule::empty(&inst);
            for (job, machine, drop) in ops {
                if drop {
                    sched.unassign(&inst, job);
                } else {
                    sched.assign(&inst, job, machine);
                }
                prop_assert!(sched.cache_is_coherent(&inst));
            }
        }
    }
}
