use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;

/// How job sizes are drawn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mix", rename_all = "kebab-case")]
pub enum JobMix {
    /// `count` jobs with sizes uniform in `min..=max`.
    Uniform { count: usize, min: u64, max: u64 },
    /// `big_count` jobs of size `big` followed by `small_count` of size `small`.
    TwoSize { small: u64, big: u64, small_count: usize, big_count: usize },
}

/// Parameters for a seeded random instance. The same spec always yields
/// the same instance within one build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub machines: usize,
    #[serde(flatten)]
    pub jobs: JobMix,
    /// Probability that a machine is eligible for a job.
    pub density: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn uniform(machines: usize, count: usize, min: u64, max: u64, density: f64, seed: u64) -> Self {
        Self { machines, jobs: JobMix::Uniform { count, min, max }, density, seed }
    }

    pub fn two_size(
        machines: usize,
        (small, big): (u64, u64),
        (big_count, small_count): (usize, usize),
        density: f64,
        seed: u64,
    ) -> Self {
        Self { machines, jobs: JobMix::TwoSize { small, big, small_count, big_count }, density, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        if self.machines == 0 {
            return bad("generator needs at least one machine".into());
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return bad(format!("density must lie in (0, 1], got {}", self.density));
        }
        match self.jobs {
            JobMix::Uniform { min, max, .. } if min == 0 || min > max => {
                bad(format!("size range {min}..={max} must be nonempty and positive"))
            }
            JobMix::TwoSize { small, big, .. } if small == 0 || small >= big => {
                bad(format!("two-size generator needs 0 < s < b, got s={small} b={big}"))
            }
            _ => Ok(()),
        }
    }
}

fn eligibility(rng: &mut ChaCha8Rng, machines: usize, density: f64) -> Vec<usize> {
    loop {
        let set: Vec<usize> = (0..machines).filter(|_| rng.gen_bool(density)).collect();
        if !set.is_empty() {
            return set;
        }
    }
}

pub fn gen_random(spec: &GenSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sizes: Vec<u64> = match spec.jobs {
        JobMix::Uniform { count, min, max } => (0..count).map(|_| rng.gen_range(min..=max)).collect(),
        JobMix::TwoSize { small, big, small_count, big_count } => {
            std::iter::repeat_n(big, big_count).chain(std::iter::repeat_n(small, small_count)).collect()
        }
    };
    let jobs = sizes
        .into_iter()
        .map(|p| (p, eligibility(&mut rng, spec.machines, spec.density)))
        .collect();
    Instance::new(spec.machines, jobs)
}

/// Instance with sizes exactly `{s, b}` (only `b` if there are no small
/// jobs). Pair with the two-size search when `opt_lp == b`.
pub fn gen_two_size(
    machines: usize,
    sizes: (u64, u64),
    counts: (usize, usize),
    density: f64,
    seed: u64,
) -> Result<Instance> {
    gen_random(&GenSpec::two_size(machines, sizes, counts, density, seed))
}

/// A ladder of `machines - 1` big jobs, job `i` eligible on `{i, i + 1}`,
/// plus small filler of total `big_size` pinned to machine 0. The filler
/// only fits once every big job has shifted one machine up.
pub fn gen_chain(machines: usize, big_size: u64) -> Result<Instance> {
    if machines < 2 || big_size == 0 {
        return Err(Error::InvalidInstance(format!(
            "chain needs at least two machines and a positive size, got m={machines} b={big_size}"
        )));
    }
    let mut jobs: Vec<(u64, Vec<usize>)> = (0..machines - 1).map(|i| (big_size, vec![i, i + 1])).collect();
    let filler = (big_size / 4).max(1);
    jobs.extend(std::iter::repeat_n((filler, vec![0]), (big_size / filler) as usize));
    let rest = big_size % filler;
    if rest > 0 {
        jobs.push((rest, vec![0]));
    }
    Instance::new(machines, jobs)
}
