use serde::{Deserialize, Serialize};

use crate::localsearch::tree::{BlockerTree, MoveValue};
use crate::model::{big_jobs_on, movable_machines, Instance, PartialSchedule, Rules, SizeClass, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveCategory {
    Valid,
    SmallMove,
    BigToSmall,
    BigToBig,
    MediumLargeToBig,
    HugeToSmall,
    HugeToBig,
    HugeToMedium,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub job: usize,
    pub machine: usize,
    pub category: MoveCategory,
    pub value: MoveValue,
}

/// Small jobs on `machine` whose every alternative machine is in a small
/// blocker, i.e. small jobs with no potential move left.
pub fn compute_s_i(
    inst: &Instance,
    sched: &PartialSchedule,
    tree: &BlockerTree,
    rules: &Rules,
    machine: usize,
) -> Vec<usize> {
    sched
        .jobs_on(machine)
        .iter()
        .copied()
        .filter(|&j| rules.is_small(inst.size(j)))
        .filter(|&j| movable_machines(inst, sched, j).iter().all(|&i| tree.in_small(i)))
        .collect()
}

fn medium_on(inst: &Instance, sched: &PartialSchedule, rules: &Rules, machine: usize) -> Vec<usize> {
    sched
        .jobs_on(machine)
        .iter()
        .copied()
        .filter(|&j| rules.class(inst.size(j)) == SizeClass::Medium)
        .collect()
}

/// Whether `sigma(job) <- machine` keeps the schedule valid. Only the target
/// machine gains load, so only it needs checking.
pub fn is_valid_move(inst: &Instance, sched: &PartialSchedule, rules: &Rules, job: usize, machine: usize) -> bool {
    let size = inst.size(job);
    rules.load_fits(sched.load(machine) + size)
        && (!rules.is_big(size) || big_jobs_on(inst, sched, rules, machine) == 0)
}

/// Value of a potential move in the current schedule.
pub fn move_value(
    inst: &Instance,
    sched: &PartialSchedule,
    rules: &Rules,
    job: usize,
    machine: usize,
    category: MoveCategory,
) -> MoveValue {
    let load = sched.load(machine);
    match (rules.variant, category) {
        (_, MoveCategory::Valid) => MoveValue::VALID,
        (Variant::TwoSize { .. }, MoveCategory::SmallMove) => MoveValue::new(1, load, 0),
        (Variant::TwoSize { .. }, MoveCategory::BigToSmall) => MoveValue::new(2, load, 0),
        (Variant::TwoSize { .. }, MoveCategory::BigToBig) => MoveValue::new(3, 0, 0),
        (Variant::General, MoveCategory::SmallMove) => MoveValue::new(1, inst.size(job), load),
        (Variant::General, MoveCategory::MediumLargeToBig) => MoveValue::new(2, 0, 0),
        (Variant::General, MoveCategory::HugeToSmall) => MoveValue::new(3, load, 0),
        (Variant::General, MoveCategory::HugeToBig) => MoveValue::new(4, 0, 0),
        (Variant::General, MoveCategory::HugeToMedium) => {
            MoveValue::new(5, medium_on(inst, sched, rules, machine).len() as u64, 0)
        }
        (v, c) => panic!("category {c:?} does not exist in the {} variant", v.name()),
    }
}

/// Potential category of `(job, machine)` ignoring validity, or `None` if
/// the move is not a potential move. `s_load` is `p(S_i)` for the target.
fn potential_category(
    inst: &Instance,
    sched: &PartialSchedule,
    tree: &BlockerTree,
    rules: &Rules,
    job: usize,
    machine: usize,
    s_load: &mut dyn FnMut(usize) -> u64,
) -> Option<MoveCategory> {
    let size = inst.size(job);
    let t = rules.target as u128;
    let has_big = big_jobs_on(inst, sched, rules, machine) > 0;
    match rules.variant {
        Variant::TwoSize { small } => {
            if size == small {
                (!tree.in_small(machine)).then_some(MoveCategory::SmallMove)
            } else {
                if tree.contains_machine(machine) {
                    return None;
                }
                // p(S_i) <= R with R = 2/3 + s/T
                if 3 * s_load(machine) as u128 > 2 * t + 3 * small as u128 {
                    return None;
                }
                Some(if has_big { MoveCategory::BigToBig } else { MoveCategory::BigToSmall })
            }
        }
        Variant::General => match rules.class(size) {
            SizeClass::Small => (!tree.in_small(machine)).then_some(MoveCategory::SmallMove),
            class @ (SizeClass::Medium | SizeClass::Large) => {
                let allowed = if class == SizeClass::Medium {
                    !tree.contains_machine(machine)
                } else {
                    !tree.in_big(machine) && !tree.in_small(machine)
                };
                allowed.then_some(if has_big {
                    MoveCategory::MediumLargeToBig
                } else {
                    MoveCategory::SmallMove
                })
            }
            SizeClass::Huge => {
                if tree.contains_machine(machine) {
                    return None;
                }
                let s = s_load(machine) as u128;
                let medium: u128 = medium_on(inst, sched, rules, machine)
                    .iter()
                    .map(|&j| inst.size(j) as u128)
                    .sum();
                let p = size as u128;
                if 17 * (p + s + medium) <= 33 * t {
                    Some(if has_big { MoveCategory::HugeToBig } else { MoveCategory::HugeToSmall })
                } else if 17 * (p + s) <= 33 * t {
                    Some(MoveCategory::HugeToMedium)
                } else {
                    None
                }
            }
        },
    }
}

/// All potential moves of jobs in the tree, in (job, machine) order. A
/// potential move whose application keeps the schedule valid is reported
/// with category `Valid`.
pub fn enumerate_moves(
    inst: &Instance,
    sched: &PartialSchedule,
    tree: &BlockerTree,
    rules: &Rules,
) -> Vec<Move> {
    let mut s_cache: Vec<Option<u64>> = vec![None; inst.machine_count()];
    let mut s_load = |i: usize| {
        *s_cache[i].get_or_insert_with(|| {
            compute_s_i(inst, sched, tree, rules, i).iter().map(|&j| inst.size(j)).sum()
        })
    };
    let mut out = Vec::new();
    for job in tree.jobs() {
        for machine in movable_machines(inst, sched, job) {
            let Some(potential) =
                potential_category(inst, sched, tree, rules, job, machine, &mut s_load)
            else {
                continue;
            };
            let category = if is_valid_move(inst, sched, rules, job, machine) {
                MoveCategory::Valid
            } else {
                potential
            };
            let value = move_value(inst, sched, rules, job, machine, category);
            out.push(Move { job, machine, category, value });
        }
    }
    out
}

/// Minimum-value move; ties go to the smaller job id, then machine id.
pub fn choose_move(moves: &[Move]) -> Option<Move> {
    moves.iter().copied().min_by_key(|m| (m.value, m.job, m.machine))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localsearch::tree::BlockerKind;

    #[test]
    fn s_i_cases() {
        let inst = Instance::new(2, vec![(1, vec![0, 1]), (1, vec![0]), (17, vec![0, 1])]).unwrap();
        let rules = Rules::new(17, Variant::General);
        let mut sched = PartialSchedule::empty(&inst);
        sched.assign(&inst, 0, 0);
        sched.assign(&inst, 1, 0);
        let mut tree = BlockerTree::new(&inst, 2);
        // empty M_S: only the job without alternatives is in S_0
        assert_eq!(compute_s_i(&inst, &sched, &tree, &rules, 0), vec![1]);
        tree.push(BlockerKind::Small, 1, vec![], 0, MoveValue::new(3, 0, 0));
        assert_eq!(compute_s_i(&inst, &sched, &tree, &rules, 0), vec![0, 1]);
        assert!(compute_s_i(&inst, &sched, &tree, &rules, 1).is_empty());
    }

    #[test]
    fn two_size_small_move_excluded_from_small_blocker_machine() {
        // job 0 small on machine 0, job 1 big TBD
        let inst = Instance::new(2, vec![(1, vec![0, 1]), (3, vec![0])]).unwrap();
        let rules = Rules::new(3, Variant::TwoSize { small: 1 });
        let mut sched = PartialSchedule::empty(&inst);
        sched.assign(&inst, 0, 0);
        let mut tree = BlockerTree::new(&inst, 1);
        tree.push(BlockerKind::Small, 1, vec![], 0, MoveValue::new(2, 0, 0));
        tree.push(BlockerKind::Small, 0, vec![0], 0, MoveValue::new(2, 1, 0));
        let moves = enumerate_moves(&inst, &sched, &tree, &rules);
        assert!(moves.iter().all(|m| !(m.job == 0 && m.machine == 1)));
    }

    #[test]
    fn huge_to_small_threshold() {
        // huge job 14 (T=17) to a machine carrying one medium job of size 10
        let inst = Instance::new(2, vec![(14, vec![0, 1]), (10, vec![1]), (10, vec![0])]).unwrap();
        let rules = Rules::new(17, Variant::General);
        let mut sched = PartialSchedule::empty(&inst);
        sched.assign(&inst, 1, 1);
        sched.assign(&inst, 2, 0);
        let tree = BlockerTree::new(&inst, 0);
        let moves = enumerate_moves(&inst, &sched, &tree, &rules);
        // 17 * 24 = 408 <= 561: huge-to-small branch, and load 24 fits so valid
        let m = moves.iter().find(|m| m.machine == 1).unwrap();
        assert_eq!(m.category, MoveCategory::Valid);

        // fill machine 1 with small jobs not in S_1 so the move is invalid
        let inst = Instance::new(2, vec![(14, vec![0, 1]), (10, vec![1]), (9, vec![0, 1]), (9, vec![0, 1])]).unwrap();
        let mut sched = PartialSchedule::empty(&inst);
        sched.assign(&inst, 1, 1);
        sched.assign(&inst, 2, 1);
        sched.assign(&inst, 3, 1);
        let tree = BlockerTree::new(&inst, 0);
        let moves = enumerate_moves(&inst, &sched, &tree, &rules);
        let m = moves.iter().find(|m| m.job == 0 && m.machine == 1).unwrap();
        assert_eq!(m.category, MoveCategory::HugeToSmall);
        assert_eq!(m.value, MoveValue::new(3, 28, 0));
    }

    #[test]
    fn huge_to_medium_when_mediums_block() {
        // T = 17: huge 17, mediums 10 + 10 on machine 1 pinned there
        let inst = Instance::new(2, vec![(17, vec![1]), (10, vec![1]), (10, vec![1])]).unwrap();
        let rules = Rules::new(17, Variant::General);
        let mut sched = PartialSchedule::empty(&inst);
        sched.assign(&inst, 1, 1);
        sched.assign(&inst, 2, 1);
        let tree = BlockerTree::new(&inst, 0);
        let moves = enumerate_moves(&inst, &sched, &tree, &rules);
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0].category, MoveCategory::HugeToMedium);
        assert_eq!(moves[0].value, MoveValue::new(5, 2, 0));
    }

    #[test]
    fn large_job_skips_big_blocker_machine() {
        // E1 at T=3: all jobs large
        let inst = Instance::new(2, vec![(2, vec![0, 1]), (2, vec![0]), (2, vec![1])]).unwrap();
        let rules = Rules::new(3, Variant::General);
        let mut sched = PartialSchedule::empty(&inst);
        sched.assign(&inst, 0, 1);
        sched.assign(&inst, 1, 0);
        let mut tree = BlockerTree::new(&inst, 2);
        tree.push(BlockerKind::Big, 1, vec![0], 0, MoveValue::new(2, 0, 0));
        tree.push(BlockerKind::Big, 0, vec![1], 1, MoveValue::new(2, 0, 0));
        assert!(enumerate_moves(&inst, &sched, &tree, &rules).is_empty());
    }

    #[test]
    fn general_small_move_value() {
        let inst = Instance::new(2, vec![(3, vec![0, 1]), (7, vec![1])]).unwrap();
        let rules = Rules::new(17, Variant::General);
        let mut sched = PartialSchedule::empty(&inst);
        sched.assign(&inst, 1, 1);
        assert_eq!(
            move_value(&inst, &sched, &rules, 0, 1, MoveCategory::SmallMove),
            MoveValue::new(1, 3, 7)
        );
        assert_eq!(move_value(&inst, &sched, &rules, 0, 1, MoveCategory::Valid), MoveValue::VALID);
    }

    #[test]
    fn choose_breaks_ties_by_job_then_machine() {
        let v = MoveValue::new(1, 2, 3);
        let moves = [
            Move { job: 2, machine: 0, category: MoveCategory::SmallMove, value: v },
            Move { job: 1, machine: 3, category: MoveCategory::SmallMove, value: v },
            Move { job: 1, machine: 2, category: MoveCategory::SmallMove, value: v },
        ];
        let m = choose_move(&moves).unwrap();
        assert_eq!((m.job, m.machine), (1, 2));
    }
}
