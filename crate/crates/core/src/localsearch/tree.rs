use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, PartialSchedule, Rules, SizeClass};

/// Lexicographically compared move value `(rank, k1, k2)`.
///
/// Two-size: valid `(0,0,0)`, small `(1, load, 0)`, big-to-small
/// `(2, load, 0)`, big-to-big `(3,0,0)`. General: valid `(0,0,0)`, small
/// `(1, p_j, load)`, medium/large-to-big `(2,0,0)`, huge-to-small
/// `(3, load, 0)`, huge-to-big `(4,0,0)`, huge-to-medium
/// `(5, #medium on target, 0)`.
///
/// The general small-move value is `(p_j, load)` in normalized units and
/// every such `p_j` is below 1 < 2, so prefixing rank 1 keeps the order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[u64; 3]", into = "[u64; 3]")]
pub struct MoveValue {
    pub rank: u64,
    pub k1: u64,
    pub k2: u64,
}

impl MoveValue {
    pub const VALID: MoveValue = MoveValue { rank: 0, k1: 0, k2: 0 };
    /// Terminates every termination-measure vector; also the root's value.
    pub const INFINITY: MoveValue = MoveValue { rank: u64::MAX, k1: u64::MAX, k2: u64::MAX };

    pub const fn new(rank: u64, k1: u64, k2: u64) -> Self {
        Self { rank, k1, k2 }
    }
}

impl From<[u64; 3]> for MoveValue {
    fn from(v: [u64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<MoveValue> for [u64; 3] {
    fn from(v: MoveValue) -> Self {
        [v.rank, v.k1, v.k2]
    }
}

impl fmt::Display for MoveValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::INFINITY {
            write!(f, "inf")
        } else {
            write!(f, "({}, {}, {})", self.rank, self.k1, self.k2)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockerKind {
    Small,
    Big,
    Medium,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blocker {
    pub kind: BlockerKind,
    /// `None` only for the root.
    pub machine: Option<usize>,
    /// Sorted job ids.
    pub jobs: Vec<usize>,
    /// Position of the parent in the tree's linear order.
    pub parent: Option<usize>,
    pub seq: u64,
    pub value: MoveValue,
}

/// Blockers in insertion order. Removal always cuts a suffix, so a
/// blocker's position doubles as its id while it lives.
#[derive(Debug, Clone)]
pub struct BlockerTree {
    blockers: Vec<Blocker>,
    next_seq: u64,
    job_blocker: Vec<Option<usize>>,
    small_machines: Vec<bool>,
    big_machines: Vec<bool>,
    medium_machines: Vec<bool>,
}

impl BlockerTree {
    /// Tree holding only the root blocker `{new_job}`.
    pub fn new(inst: &Instance, new_job: usize) -> Self {
        let mut tree = Self {
            blockers: Vec::new(),
            next_seq: 0,
            job_blocker: vec![None; inst.job_count()],
            small_machines: vec![false; inst.machine_count()],
            big_machines: vec![false; inst.machine_count()],
            medium_machines: vec![false; inst.machine_count()],
        };
        tree.blockers.push(Blocker {
            kind: BlockerKind::Small,
            machine: None,
            jobs: vec![new_job],
            parent: None,
            seq: 0,
            value: MoveValue::INFINITY,
        });
        tree.next_seq = 1;
        tree.job_blocker[new_job] = Some(0);
        tree
    }

    pub fn blockers(&self) -> &[Blocker] {
        &self.blockers
    }

    pub fn len(&self) -> usize {
        self.blockers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blockers.is_empty()
    }

    /// Position of the blocker holding `job`.
    pub fn blocker_of(&self, job: usize) -> Option<usize> {
        self.job_blocker[job]
    }

    pub fn contains_job(&self, job: usize) -> bool {
        self.job_blocker[job].is_some()
    }

    /// Jobs of all blockers, in id order.
    pub fn jobs(&self) -> impl Iterator<Item = usize> + '_ {
        self.job_blocker
            .iter()
            .enumerate()
            .filter(|(_, b)| b.is_some())
            .map(|(j, _)| j)
    }

    pub fn in_small(&self, machine: usize) -> bool {
        self.small_machines[machine]
    }

    pub fn in_big(&self, machine: usize) -> bool {
        self.big_machines[machine]
    }

    pub fn in_medium(&self, machine: usize) -> bool {
        self.medium_machines[machine]
    }

    /// Machine appears in any blocker.
    pub fn contains_machine(&self, machine: usize) -> bool {
        self.in_small(machine) || self.in_big(machine) || self.in_medium(machine)
    }

    pub fn small_machine_set(&self) -> BTreeSet<usize> {
        flagged(&self.small_machines)
    }

    pub fn big_machine_set(&self) -> BTreeSet<usize> {
        flagged(&self.big_machines)
    }

    pub fn medium_machine_set(&self) -> BTreeSet<usize> {
        flagged(&self.medium_machines)
    }

    fn flags_mut(&mut self, kind: BlockerKind) -> &mut Vec<bool> {
        match kind {
            BlockerKind::Small => &mut self.small_machines,
            BlockerKind::Big => &mut self.big_machines,
            BlockerKind::Medium => &mut self.medium_machines,
        }
    }

    /// Appends a child of `parent`; returns its position.
    pub fn push(
        &mut self,
        kind: BlockerKind,
        machine: usize,
        mut jobs: Vec<usize>,
        parent: usize,
        value: MoveValue,
    ) -> usize {
        jobs.sort_unstable();
        let pos = self.blockers.len();
        for &j in &jobs {
            self.job_blocker[j] = Some(pos);
        }
        self.flags_mut(kind)[machine] = true;
        self.blockers.push(Blocker {
            kind,
            machine: Some(machine),
            jobs,
            parent: Some(parent),
            seq: self.next_seq,
            value,
        });
        self.next_seq += 1;
        pos
    }

    /// Removes the blocker at `pos` and everything added after it. Returns
    /// the removed blockers in order.
    pub fn truncate(&mut self, pos: usize) -> Vec<Blocker> {
        let removed: Vec<Blocker> = self.blockers.drain(pos..).collect();
        for b in &removed {
            for &j in &b.jobs {
                self.job_blocker[j] = None;
            }
            if let Some(m) = b.machine {
                self.flags_mut(b.kind)[m] = false;
            }
        }
        removed
    }

    /// `(val(B_1), ..., val(B_l), inf)`: the values of the moves that
    /// created each non-root blocker, in insertion order, closed by the
    /// sentinel.
    pub fn termination_measure(&self) -> Vec<MoveValue> {
        self.blockers
            .iter()
            .skip(1)
            .map(|b| b.value)
            .chain(std::iter::once(MoveValue::INFINITY))
            .collect()
    }

    /// Structural invariants against the current schedule. Returns a
    /// description of the first violation.
    pub fn check_invariants(
        &self,
        inst: &Instance,
        sched: &PartialSchedule,
        rules: &Rules,
        max_per_machine: usize,
    ) -> Result<(), String> {
        let mut owner = vec![None; inst.job_count()];
        let mut per_machine = vec![0usize; inst.machine_count()];
        let mut per_kind = std::collections::HashSet::new();
        for (pos, b) in self.blockers.iter().enumerate() {
            match (pos, b.machine, b.parent) {
                (0, None, None) => {}
                (0, _, _) => return Err("root has a machine or parent".into()),
                (_, None, _) | (_, _, None) => {
                    return Err(format!("non-root blocker {pos} lacks machine or parent"))
                }
                (_, Some(_), Some(p)) if p >= pos => {
                    return Err(format!("blocker {pos} has parent {p} that does not precede it"))
                }
                _ => {}
            }
            if pos > 0 && b.seq <= self.blockers[pos - 1].seq {
                return Err(format!("blocker {pos} seq out of order"));
            }
            for &j in &b.jobs {
                if let Some(other) = owner[j].replace(pos) {
                    return Err(format!("job {j} in blockers {other} and {pos}"));
                }
                if self.job_blocker[j] != Some(pos) {
                    return Err(format!("job index stale for job {j}"));
                }
                // blocked jobs never move while their blocker lives
                if let Some(m) = b.machine {
                    if sched.machine_of(j) != Some(m) {
                        return Err(format!(
                            "job {j} of blocker {pos} left machine {m} (now {:?})",
                            sched.machine_of(j)
                        ));
                    }
                }
            }
            if let Some(m) = b.machine {
                per_machine[m] += 1;
                if !per_kind.insert((m, b.kind)) {
                    return Err(format!("machine {m} in two {:?} blockers", b.kind));
                }
                if per_machine[m] > max_per_machine {
                    return Err(format!("machine {m} in {} blockers", per_machine[m]));
                }
            }
            match b.kind {
                BlockerKind::Big => {
                    if b.jobs.len() != 1 || !rules.is_big(inst.size(b.jobs[0])) {
                        return Err(format!("big blocker {pos} must hold exactly one big job"));
                    }
                }
                BlockerKind::Medium => {
                    if b.jobs.is_empty()
                        || b.jobs.iter().any(|&j| rules.class(inst.size(j)) != SizeClass::Medium)
                    {
                        return Err(format!("medium blocker {pos} must hold medium jobs only"));
                    }
                }
                BlockerKind::Small => {}
            }
        }
        if owner != self.job_blocker {
            return Err("job index has entries for removed blockers".into());
        }
        for i in 0..inst.machine_count() {
            let expect = |kind| self.blockers.iter().any(|b| b.machine == Some(i) && b.kind == kind);
            if expect(BlockerKind::Small) != self.small_machines[i]
                || expect(BlockerKind::Big) != self.big_machines[i]
                || expect(BlockerKind::Medium) != self.medium_machines[i]
            {
                return Err(format!("machine flags stale for machine {i}"));
            }
        }
        Ok(())
    }
}

fn flagged(flags: &[bool]) -> BTreeSet<usize> {
    flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i).collect()
}
