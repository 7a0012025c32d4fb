//! Command-line front end: `lp`, `solve`, `verify`, `oracle`, `gen`, `bench`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::configlp::opt_lp_with_probes;
use crate::error::{Error, Result};
use crate::localsearch::{solve_with_target, write_jsonl, DualCertificate, SearchOptions, VariantChoice};
use crate::model::{reduced_ratio, Instance, Rules, ScheduleFile, Variant};
use crate::toolkit::{brute_force_opt, gen_chain, gen_random, GenSpec, JobMix, BRUTE_FORCE_MAX_JOBS};

#[derive(Debug, Parser)]
#[command(name = "clpsched", version, about = "Configuration-LP bounds and local search for restricted assignment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute OPT_LP by binary search and print every probe.
    Lp {
        instance: PathBuf,
    },
    /// Schedule all jobs at T = OPT_LP.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Auto)]
        variant: VariantArg,
        /// Write a JSONL trace of the search.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Iteration cap per inserted job.
        #[arg(long)]
        cap: Option<u64>,
        /// Schedule output (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run report output (stderr if absent).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check a schedule against the validity rules at a target.
    Verify {
        instance: PathBuf,
        schedule: PathBuf,
        #[arg(long = "T")]
        t: u64,
        #[arg(long, value_enum, default_value_t = VerifyVariant::General)]
        variant: VerifyVariant,
    },
    /// Exact OPT, OPT_LP and their ratio for small instances.
    Oracle {
        instance: PathBuf,
    },
    /// Generate an instance.
    Gen {
        #[command(flatten)]
        spec: GenArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the chain family with this big size instead of a random instance.
        #[arg(long)]
        chain: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate, solve and check a seeded corpus.
    Bench {
        #[command(flatten)]
        spec: GenArgs,
        #[arg(long, default_value_t = 100)]
        count: u64,
        /// Seed of the first instance; instance k uses seed + k.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV output (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write 0 in the time_ms column so reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Auto,
    TwoSize,
    General,
}

impl From<VariantArg> for VariantChoice {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Auto => VariantChoice::Auto,
            VariantArg::TwoSize => VariantChoice::TwoSize,
            VariantArg::General => VariantChoice::General,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyVariant {
    TwoSize,
    General,
}

/// Generator flags shared by `gen` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// JSON generator block; overrides the flags below except the seed.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub machines: usize,
    #[arg(long, default_value_t = 10)]
    pub jobs: usize,
    #[arg(long, default_value_t = 1)]
    pub min_size: u64,
    #[arg(long, default_value_t = 20)]
    pub max_size: u64,
    #[arg(long, default_value_t = 0.6)]
    pub density: f64,
    /// Two-size mode: small size.
    #[arg(long, requires = "big")]
    pub small: Option<u64>,
    /// Two-size mode: big size.
    #[arg(long, requires = "small")]
    pub big: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub small_count: usize,
    #[arg(long, default_value_t = 0)]
    pub big_count: usize,
}

impl GenArgs {
    pub fn to_spec(&self, seed: u64) -> Result<GenSpec> {
        if let Some(path) = &self.spec {
            let text = read_text(path)?;
            let spec: GenSpec = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidInstance(format!("{}: {e}", path.display())))?;
            return Ok(GenSpec { seed, ..spec });
        }
        let jobs = match (self.small, self.big) {
            (Some(small), Some(big)) => {
                JobMix::TwoSize { small, big, small_count: self.small_count, big_count: self.big_count }
            }
            _ => JobMix::Uniform { count: self.jobs, min: self.min_size, max: self.max_size },
        };
        let spec = GenSpec { machines: self.machines, jobs, density: self.density, seed };
        spec.validate()?;
        Ok(spec)
    }
}

/// Summary of one `solve` run. The ratio is an exact reduced fraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance_sha256: String,
    #[serde(rename = "T")]
    pub t: u64,
    pub variant: String,
    pub makespan: Option<u64>,
    pub ratio_num: Option<u64>,
    pub ratio_den: Option<u64>,
    pub iterations: u64,
    pub blockers_added: u64,
    pub valid_moves: u64,
    pub wall_ms: u64,
    pub stuck: bool,
    pub certificate: Option<DualCertificate>,
}

pub fn instance_digest(inst: &Instance) -> String {
    format!("{:x}", Sha256::digest(inst.to_json_string().as_bytes()))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInstance(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = read_text(path)?;
    Instance::from_json_str(&text).map_err(|e| match e {
        Error::Json(e) => Error::InvalidInstance(format!("{}: {e}", path.display())),
        other => other,
    })
}

fn emit(path: Option<&Path>, text: &str, fallback: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => fallback.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    match execute(cli.command, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command against the given streams.
pub fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Lp { instance } => cmd_lp(&instance, out),
        Command::Solve { instance, variant, trace, cap, out: sched_out, report } => cmd_solve(
            &instance,
            variant.into(),
            trace.as_deref(),
            cap,
            sched_out.as_deref(),
            report.as_deref(),
            out,
            err,
        ),
        Command::Verify { instance, schedule, t, variant } => cmd_verify(&instance, &schedule, t, variant, out),
        Command::Oracle { instance } => cmd_oracle(&instance, out),
        Command::Gen { spec, seed, chain, out: path } => {
            let inst = match chain {
                Some(b) => gen_chain(spec.machines, b)?,
                None => gen_random(&spec.to_spec(seed)?)?,
            };
            emit(path.as_deref(), &(inst.to_json_string() + "\n"), out)?;
            Ok(0)
        }
        Command::Bench { spec, count, seed, out: path, no_timing } => {
            cmd_bench(&spec, count, seed, path.as_deref(), no_timing, out)
        }
    }
}

pub fn cmd_lp(path: &Path, out: &mut dyn Write) -> Result<i32> {
    let inst = read_instance(path)?;
    let lp = opt_lp_with_probes(&inst)?;
    writeln!(out, "OPT_LP {}", lp.value)?;
    for p in &lp.probes {
        writeln!(out, "T={} {}", p.t, if p.feasible { "feasible" } else { "infeasible" })?;
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_solve(
    path: &Path,
    choice: VariantChoice,
    trace: Option<&Path>,
    cap: Option<u64>,
    sched_out: Option<&Path>,
    report_out: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let inst = read_instance(path)?;
    let mut opts = SearchOptions { record_trace: trace.is_some(), ..SearchOptions::default() };
    if let Some(cap) = cap {
        opts.max_iterations = cap;
    }
    let started = Instant::now();
    let lp = opt_lp_with_probes(&inst)?;
    let mut report = RunReport {
        instance_sha256: instance_digest(&inst),
        t: lp.value,
        variant: String::new(),
        makespan: None,
        ratio_num: None,
        ratio_den: None,
        iterations: 0,
        blockers_added: 0,
        valid_moves: 0,
        wall_ms: 0,
        stuck: false,
        certificate: None,
    };
    let code = match solve_with_target(&inst, lp.value, choice, opts) {
        Ok(sol) => {
            if let Some(p) = trace {
                write_jsonl(io::BufWriter::new(fs::File::create(p)?), &sol.trace)?;
            }
            let file = ScheduleFile::from_schedule(&sol.schedule)?;
            emit(sched_out, &(serde_json::to_string(&file)? + "\n"), out)?;
            report.variant = sol.variant.name().to_string();
            report.makespan = Some(sol.makespan);
            (report.ratio_num, report.ratio_den) = (Some(sol.ratio.0), Some(sol.ratio.1));
            report.iterations = sol.stats.iterations;
            report.blockers_added = sol.stats.blockers_added;
            report.valid_moves = sol.stats.valid_moves;
            0
        }
        Err(Error::StuckAtFeasible { target, certificate, certificate_verified }) => {
            writeln!(
                err,
                "error: local search stuck at feasible T={target} (certificate verified: {certificate_verified})"
            )?;
            report.stuck = true;
            report.certificate = Some(*certificate);
            4
        }
        Err(e) => return Err(e),
    };
    report.wall_ms = started.elapsed().as_millis() as u64;
    emit(report_out, &(serde_json::to_string(&report)? + "\n"), err)?;
    Ok(code)
}

/// Reasons `assignment` is not a valid complete schedule at `rules`.
pub fn schedule_violations(inst: &Instance, assignment: &[usize], rules: &Rules) -> Vec<String> {
    let mut problems = Vec::new();
    if assignment.len() != inst.job_count() {
        problems.push(format!("assignment has {} entries for {} jobs", assignment.len(), inst.job_count()));
        return problems;
    }
    let mut loads = vec![0u64; inst.machine_count()];
    let mut bigs = vec![0usize; inst.machine_count()];
    for (j, &i) in assignment.iter().enumerate() {
        if i >= inst.machine_count() {
            problems.push(format!("job {j} on machine {i}, which does not exist"));
            continue;
        }
        if !inst.job(j).is_eligible(i) {
            problems.push(format!("job {j} is not eligible on machine {i}"));
        }
        loads[i] += inst.size(j);
        if rules.is_big(inst.size(j)) {
            bigs[i] += 1;
        }
    }
    for i in 0..inst.machine_count() {
        if !rules.load_fits(loads[i]) {
            problems.push(format!("machine {i} load {} exceeds the bound at T={}", loads[i], rules.target));
        }
        if bigs[i] > 1 {
            problems.push(format!("machine {i} holds {} big jobs", bigs[i]));
        }
    }
    problems
}

pub fn cmd_verify(
    inst_path: &Path,
    sched_path: &Path,
    t: u64,
    variant: VerifyVariant,
    out: &mut dyn Write,
) -> Result<i32> {
    let inst = read_instance(inst_path)?;
    let text = read_text(sched_path)?;
    let file: ScheduleFile = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidSchedule(format!("{}: {e}", sched_path.display())))?;
    let variant = match variant {
        VerifyVariant::General => Variant::General,
        VerifyVariant::TwoSize => {
            let sizes = inst.distinct_sizes();
            let small = *sizes.first().unwrap_or(&0);
            Variant::check_two_size(&inst, small)?;
            Variant::TwoSize { small }
        }
    };
    let problems = schedule_violations(&inst, &file.assignment, &Rules::new(t, variant));
    if problems.is_empty() {
        writeln!(out, "valid")?;
        Ok(0)
    } else {
        writeln!(out, "invalid")?;
        for p in problems {
            writeln!(out, "  {p}")?;
        }
        Ok(1)
    }
}

pub fn cmd_oracle(path: &Path, out: &mut dyn Write) -> Result<i32> {
    let inst = read_instance(path)?;
    let opt = brute_force_opt(&inst)?;
    let lp = opt_lp_with_probes(&inst)?.value;
    let (num, den) = reduced_ratio(opt, lp);
    writeln!(out, "OPT {opt}\nOPT_LP {lp}\ngap {num}/{den}")?;
    Ok(if lp > opt { 4 } else { 0 })
}

/// One row of the bench CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub t: Option<u64>,
    pub makespan: Option<u64>,
    pub ratio: Option<(u64, u64)>,
    pub events: u64,
    pub time_ms: u64,
    /// Brute-force optimum when the instance is small enough.
    pub opt: Option<u64>,
    pub failure: Option<(i32, String)>,
}

pub const BENCH_HEADER: &str = "seed,n,m,T,makespan,ratio_num,ratio_den,events,time_ms";

impl BenchRow {
    pub fn csv(&self) -> String {
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.n,
            self.m,
            opt(self.t),
            opt(self.makespan),
            opt(self.ratio.map(|r| r.0)),
            opt(self.ratio.map(|r| r.1)),
            self.events,
            self.time_ms
        )
    }
}

/// Generates and solves the instance for `seed`. Failures are recorded in
/// the row rather than returned.
pub fn bench_one(spec: &GenSpec, seed: u64, timing: bool) -> BenchRow {
    let started = Instant::now();
    let mut row = BenchRow {
        seed,
        n: 0,
        m: spec.machines,
        t: None,
        makespan: None,
        ratio: None,
        events: 0,
        time_ms: 0,
        opt: None,
        failure: None,
    };
    let attempt = (|| -> Result<()> {
        let inst = gen_random(&GenSpec { seed, ..spec.clone() })?;
        row.n = inst.job_count();
        let t = opt_lp_with_probes(&inst)?.value;
        row.t = Some(t);
        let sol = solve_with_target(&inst, t, VariantChoice::Auto, SearchOptions::default())?;
        row.makespan = Some(sol.makespan);
        row.ratio = Some(sol.ratio);
        row.events = sol.stats.iterations;
        if inst.job_count() <= BRUTE_FORCE_MAX_JOBS.min(10) {
            if let Ok(opt) = brute_force_opt(&inst) {
                row.opt = Some(opt);
                if t > opt || sol.makespan < opt {
                    return Err(Error::Invariant(format!("oracle mismatch: OPT {opt}, T {t}, makespan {}", sol.makespan)));
                }
            }
        }
        Ok(())
    })();
    if let Err(e) = attempt {
        row.failure = Some((e.exit_code(), e.to_string()));
    }
    if timing {
        row.time_ms = started.elapsed().as_millis() as u64;
    }
    row
}

pub fn cmd_bench(
    args: &GenArgs,
    count: u64,
    seed: u64,
    path: Option<&Path>,
    no_timing: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let spec = args.to_spec(seed)?;
    let rows: Vec<BenchRow> = (0..count)
        .into_par_iter()
        .map(|k| bench_one(&spec, seed.wrapping_add(k), !no_timing))
        .collect();

    let mut csv = String::from(BENCH_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.csv());
        csv.push('\n');
    }
    if let Some(p) = path {
        fs::write(p, &csv)?;
    } else {
        out.write_all(csv.as_bytes())?;
    }

    let max = rows
        .iter()
        .filter_map(|r| r.ratio)
        .max_by(|a, b| (a.0 as u128 * b.1 as u128).cmp(&(b.0 as u128 * a.1 as u128)));
    let checked = rows.iter().filter(|r| r.opt.is_some()).count();
    let failures: Vec<&BenchRow> = rows.iter().filter(|r| r.failure.is_some()).collect();
    let max = match max {
        Some((a, b)) => format!("{a}/{b}"),
        None => "-".to_string(),
    };
    let line = format!(
        "instances {count} max_ratio {max} oracle_checked {checked} failures {}",
        failures.len()
    );
    if path.is_some() {
        writeln!(out, "{line}")?;
    } else {
        eprintln!("{line}");
    }
    for r in &failures {
        let (_, msg) = r.failure.as_ref().unwrap();
        eprintln!("seed {}: {msg}", r.seed);
    }
    Ok(failures.iter().map(|r| r.failure.as_ref().unwrap().0).max().unwrap_or(0))
}
