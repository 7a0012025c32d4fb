use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::configlp::opt_lp;
use crate::error::{Error, Result};
use crate::localsearch::certificate::{build_certificate, DualCertificate};
use crate::localsearch::moves::{choose_move, enumerate_moves, MoveCategory};
use crate::localsearch::trace::{TraceEvent, TraceRecord};
use crate::localsearch::tree::{BlockerKind, BlockerTree, MoveValue};
use crate::model::{is_valid_schedule, makespan, reduced_ratio, Instance, PartialSchedule, Rules, SizeClass, Variant};

pub const DEFAULT_MAX_ITERATIONS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Iterations allowed per inserted job.
    pub max_iterations: u64,
    /// Re-check tree and schedule invariants after every iteration.
    pub check_invariants: bool,
    /// Assert that the termination measure strictly decreases between
    /// consecutive blocker insertions.
    pub monitor_termination: bool,
    pub record_trace: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            check_invariants: false,
            monitor_termination: true,
            record_trace: false,
        }
    }
}

impl SearchOptions {
    /// Everything on: invariants, measure monitor and trace.
    pub fn debug() -> Self {
        Self { check_invariants: true, monitor_termination: true, record_trace: true, ..Self::default() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub iterations: u64,
    pub valid_moves: u64,
    pub blockers_added: u64,
    pub blockers_removed: u64,
    pub measure_checks: u64,
    pub invariant_checks: u64,
    pub max_tree_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtendOutcome {
    Extended,
    Stuck(DualCertificate),
}

/// Tracks the termination measure at each blocker insertion. Between two
/// insertions (with any burst of valid moves and removals in between) the
/// measure must strictly decrease.
#[derive(Debug, Clone, Default)]
pub struct TerminationMonitor {
    last: Vec<MoveValue>,
    checks: u64,
}

impl TerminationMonitor {
    pub fn start(&mut self, tree: &BlockerTree) {
        self.last = tree.termination_measure();
    }

    pub fn checkpoint(&mut self, tree: &BlockerTree) -> Result<()> {
        let now = tree.termination_measure();
        self.checks += 1;
        if now >= self.last {
            return Err(Error::Invariant(format!(
                "termination measure did not decrease: {} -> {}",
                fmt_measure(&self.last),
                fmt_measure(&now)
            )));
        }
        self.last = now;
        Ok(())
    }

    pub fn checks(&self) -> u64 {
        self.checks
    }
}

fn fmt_measure(m: &[MoveValue]) -> String {
    let parts: Vec<String> = m.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

/// A schedule under construction together with the run's bookkeeping.
#[derive(Debug, Clone)]
pub struct LocalSearch<'a> {
    inst: &'a Instance,
    rules: Rules,
    sched: PartialSchedule,
    opts: SearchOptions,
    stats: SearchStats,
    trace: Vec<TraceRecord>,
    monitor: TerminationMonitor,
}

impl<'a> LocalSearch<'a> {
    pub fn new(inst: &'a Instance, target: u64, variant: Variant, opts: SearchOptions) -> Result<Self> {
        Self::with_schedule(inst, PartialSchedule::empty(inst), target, variant, opts)
    }

    /// Continues from an existing valid partial schedule.
    pub fn with_schedule(
        inst: &'a Instance,
        sched: PartialSchedule,
        target: u64,
        variant: Variant,
        opts: SearchOptions,
    ) -> Result<Self> {
        if target == 0 && inst.job_count() > 0 {
            return Err(Error::Contract("target must be positive".into()));
        }
        if let Variant::TwoSize { small } = variant {
            let big = Variant::check_two_size(inst, small)?;
            if big != target {
                return Err(Error::VariantPrecondition(format!(
                    "two-size search needs the big size ({big}) to equal the target ({target})"
                )));
            }
        }
        let rules = Rules::new(target, variant);
        if !is_valid_schedule(inst, &sched, &rules) {
            return Err(Error::InvalidSchedule("starting schedule is not valid at this target".into()));
        }
        Ok(Self {
            inst,
            rules,
            sched,
            opts,
            stats: SearchStats::default(),
            trace: Vec::new(),
            monitor: TerminationMonitor::default(),
        })
    }

    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    pub fn schedule(&self) -> &PartialSchedule {
        &self.sched
    }

    pub fn stats(&self) -> &SearchStats {
        &self.stats
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    pub fn into_parts(self) -> (PartialSchedule, SearchStats, Vec<TraceRecord>) {
        (self.sched, self.stats, self.trace)
    }

    fn emit(&mut self, event: TraceEvent) {
        if self.opts.record_trace {
            self.trace.push(TraceRecord { it: self.stats.iterations, event });
        }
    }

    /// Assigns `new_job`, relocating already assigned jobs as needed, or
    /// stops with a dual certificate when no potential move is left.
    pub fn extend(&mut self, new_job: usize) -> Result<ExtendOutcome> {
        let inst = self.inst;
        let rules = self.rules;
        if self.sched.machine_of(new_job).is_some() {
            return Err(Error::Contract(format!("job {new_job} is already assigned")));
        }
        let max_per_machine = match rules.variant {
            Variant::TwoSize { .. } => 2,
            Variant::General => 3,
        };
        let mut tree = BlockerTree::new(inst, new_job);
        self.monitor.start(&tree);
        let mut iterations = 0u64;

        while self.sched.machine_of(new_job).is_none() {
            if iterations >= self.opts.max_iterations {
                return Err(Error::IterationCap { limit: self.opts.max_iterations });
            }
            iterations += 1;
            self.stats.iterations += 1;

            let moves = enumerate_moves(inst, &self.sched, &tree, &rules);
            let Some(mv) = choose_move(&moves) else {
                let cert = build_certificate(inst, &self.sched, &tree, &rules)?;
                self.emit(TraceEvent::Stuck {
                    job: new_job,
                    scale: cert.scale,
                    y: cert.y.clone(),
                    z: cert.z.clone(),
                });
                return Ok(ExtendOutcome::Stuck(cert));
            };
            self.emit(TraceEvent::MoveChosen {
                job: mv.job,
                machine: mv.machine,
                category: mv.category,
                value: mv.value,
            });
            let owner = tree
                .blocker_of(mv.job)
                .ok_or_else(|| Error::Invariant(format!("moved job {} is in no blocker", mv.job)))?;

            if mv.category == MoveCategory::Valid {
                self.sched.assign(inst, mv.job, mv.machine);
                self.stats.valid_moves += 1;
                self.emit(TraceEvent::JobAssigned { job: mv.job, machine: mv.machine });
                let removed = tree.truncate(owner);
                self.stats.blockers_removed += removed.len() as u64;
                self.emit(TraceEvent::BlockersRemoved { from_seq: removed[0].seq, count: removed.len() });
            } else {
                let (kind, jobs) = self.blocking_jobs(&tree, mv.machine, mv.category)?;
                let parent_seq = tree.blockers()[owner].seq;
                let pos = tree.push(kind, mv.machine, jobs, owner, mv.value);
                self.stats.blockers_added += 1;
                self.stats.max_tree_size = self.stats.max_tree_size.max(tree.len());
                let b = &tree.blockers()[pos];
                let event = TraceEvent::BlockerAdded {
                    seq: b.seq,
                    kind,
                    machine: mv.machine,
                    jobs: b.jobs.clone(),
                    parent_seq,
                    value: mv.value,
                };
                self.emit(event);
                if self.opts.monitor_termination {
                    self.monitor.checkpoint(&tree)?;
                    self.stats.measure_checks += 1;
                }
            }

            if self.opts.check_invariants {
                self.stats.invariant_checks += 1;
                tree.check_invariants(inst, &self.sched, &rules, max_per_machine)
                    .map_err(Error::Invariant)?;
                if !is_valid_schedule(inst, &self.sched, &rules) {
                    return Err(Error::Invariant("schedule became invalid".into()));
                }
                if !self.sched.cache_is_coherent(inst) {
                    return Err(Error::Invariant("load cache out of sync".into()));
                }
            }
        }
        Ok(ExtendOutcome::Extended)
    }

    /// Blocker contents for a non-valid potential move to `machine`.
    fn blocking_jobs(
        &self,
        tree: &BlockerTree,
        machine: usize,
        category: MoveCategory,
    ) -> Result<(BlockerKind, Vec<usize>)> {
        let inst = self.inst;
        let on_machine = self.sched.jobs_on(machine).iter().copied();
        match category {
            MoveCategory::SmallMove | MoveCategory::BigToSmall | MoveCategory::HugeToSmall => {
                Ok((BlockerKind::Small, on_machine.filter(|&j| !tree.contains_job(j)).collect()))
            }
            MoveCategory::BigToBig | MoveCategory::MediumLargeToBig | MoveCategory::HugeToBig => {
                let big: Vec<usize> = on_machine.filter(|&j| self.rules.is_big(inst.size(j))).collect();
                match big.as_slice() {
                    [j] if !tree.contains_job(*j) => Ok((BlockerKind::Big, vec![*j])),
                    _ => Err(Error::Invariant(format!(
                        "machine {machine} should carry exactly one unblocked big job, found {big:?}"
                    ))),
                }
            }
            MoveCategory::HugeToMedium => {
                let medium: Vec<usize> = on_machine
                    .filter(|&j| self.rules.class(inst.size(j)) == SizeClass::Medium)
                    .filter(|&j| !tree.contains_job(j))
                    .collect();
                if medium.is_empty() {
                    return Err(Error::Invariant(format!("huge-to-medium move to {machine} without medium jobs")));
                }
                Ok((BlockerKind::Medium, medium))
            }
            MoveCategory::Valid => unreachable!("valid moves do not add blockers"),
        }
    }
}

/// Result of one [`extend_schedule`] call.
#[derive(Debug, Clone)]
pub struct ExtendReport {
    pub schedule: PartialSchedule,
    pub outcome: ExtendOutcome,
    pub stats: SearchStats,
    pub trace: Vec<TraceRecord>,
}

/// Inserts `new_job` into a copy of `sched` at target `t`.
pub fn extend_schedule(
    inst: &Instance,
    sched: &PartialSchedule,
    new_job: usize,
    t: u64,
    variant: Variant,
    opts: SearchOptions,
) -> Result<ExtendReport> {
    let mut search = LocalSearch::with_schedule(inst, sched.clone(), t, variant, opts)?;
    let outcome = search.extend(new_job)?;
    let (schedule, stats, trace) = search.into_parts();
    Ok(ExtendReport { schedule, outcome, stats, trace })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantChoice {
    Auto,
    TwoSize,
    General,
}

/// Resolves the variant for target `t`. `Auto` takes the two-size search
/// exactly when the instance has two sizes and the larger equals `t`.
pub fn select_variant(inst: &Instance, t: u64, choice: VariantChoice) -> Result<Variant> {
    let sizes = inst.distinct_sizes();
    match choice {
        VariantChoice::General => Ok(Variant::General),
        VariantChoice::Auto => Ok(match sizes.as_slice() {
            [s, b] if *b == t => Variant::TwoSize { small: *s },
            _ => Variant::General,
        }),
        VariantChoice::TwoSize => match sizes.as_slice() {
            [s, b] if *b == t => Ok(Variant::TwoSize { small: *s }),
            [_, b] => Err(Error::VariantPrecondition(format!(
                "two-size search needs the big size ({b}) to equal OPT_LP ({t})"
            ))),
            _ => Err(Error::VariantPrecondition(format!(
                "two-size search needs exactly two job sizes, found {}",
                sizes.len()
            ))),
        },
    }
}

/// Jobs by decreasing size, ties by id.
pub fn insertion_order(inst: &Instance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.job_count()).collect();
    order.sort_by_key(|&j| (Reverse(inst.size(j)), j));
    order
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StuckState {
    pub job: usize,
    pub certificate: DualCertificate,
}

/// Outcome of inserting every job at a fixed target.
#[derive(Debug, Clone)]
pub struct RunAt {
    pub schedule: PartialSchedule,
    pub stuck: Option<StuckState>,
    pub stats: SearchStats,
    pub trace: Vec<TraceRecord>,
}

/// Inserts all jobs in [`insertion_order`] at target `t`, stopping at the
/// first stuck insertion.
pub fn solve_at(inst: &Instance, t: u64, variant: Variant, opts: SearchOptions) -> Result<RunAt> {
    let mut search = LocalSearch::new(inst, t, variant, opts)?;
    let mut stuck = None;
    for job in insertion_order(inst) {
        if let ExtendOutcome::Stuck(certificate) = search.extend(job)? {
            stuck = Some(StuckState { job, certificate });
            break;
        }
    }
    let (schedule, stats, trace) = search.into_parts();
    Ok(RunAt { schedule, stuck, stats, trace })
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub schedule: PartialSchedule,
    /// The LP optimum the search ran at.
    pub target: u64,
    pub variant: Variant,
    pub makespan: u64,
    /// `makespan / target` in lowest terms.
    pub ratio: (u64, u64),
    pub stats: SearchStats,
    pub trace: Vec<TraceRecord>,
}

/// Complete schedule at `T = OPT_LP`. On success the makespan satisfies
/// `17 C <= 33 T` (general) or `3 C <= 5 T + 3 s` (two sizes).
pub fn solve(inst: &Instance, choice: VariantChoice, opts: SearchOptions) -> Result<Solution> {
    let target = opt_lp(inst)?;
    solve_with_target(inst, target, choice, opts)
}

/// As [`solve`] with a precomputed LP optimum.
pub fn solve_with_target(inst: &Instance, target: u64, choice: VariantChoice, opts: SearchOptions) -> Result<Solution> {
    let variant = select_variant(inst, target, choice)?;
    let run = solve_at(inst, target, variant, opts)?;
    if let Some(stuck) = run.stuck {
        let certificate_verified = stuck.certificate.verify(inst, target)?.is_certificate();
        return Err(Error::StuckAtFeasible {
            target,
            certificate: Box::new(stuck.certificate),
            certificate_verified,
        });
    }
    let ms = makespan(&run.schedule)?;
    if !Rules::new(target, variant).load_fits(ms) {
        return Err(Error::Invariant(format!(
            "makespan {ms} breaks the {} guarantee at T={target}",
            variant.name()
        )));
    }
    Ok(Solution {
        schedule: run.schedule,
        target,
        variant,
        makespan: ms,
        ratio: reduced_ratio(ms, target),
        stats: run.stats,
        trace: run.trace,
    })
}
