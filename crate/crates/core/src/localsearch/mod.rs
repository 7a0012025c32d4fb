//! Blocker-tree local search for restricted assignment.
//!
//! Jobs are inserted one at a time. To place a new job the search keeps a
//! tree of blockers: sets of jobs sitting on a machine that stand in the way
//! of a move it would like to make. Each iteration picks the potential move
//! of least lexicographic value among jobs in the tree. A valid move is
//! applied and prunes the blocker it came from together with everything
//! added after it; any other potential move adds a new blocker. When no
//! potential move exists the state yields an integer dual ray proving the
//! configuration LP infeasible at the target.
//!
//! Two variants are provided: one for instances with two job sizes, whose
//! schedules stay within `5/3 + s/T` of the target, and one for arbitrary
//! sizes with a `33/17` bound.

mod certificate;
mod moves;
mod search;
mod trace;
mod tree;

pub use certificate::{build_certificate, DualCertificate};
pub use moves::{choose_move, compute_s_i, enumerate_moves, is_valid_move, move_value, Move, MoveCategory};
pub use search::{
    extend_schedule, insertion_order, select_variant, solve, solve_at, solve_with_target, ExtendOutcome,
    ExtendReport, LocalSearch, RunAt, SearchOptions, SearchStats, Solution, StuckState, TerminationMonitor,
    VariantChoice, DEFAULT_MAX_ITERATIONS,
};
pub use trace::{read_jsonl, replay, write_jsonl, TraceEvent, TraceRecord};
pub use tree::{Blocker, BlockerKind, BlockerTree, MoveValue};
