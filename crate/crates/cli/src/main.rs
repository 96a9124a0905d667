// SPDX-License-Identifier: Apache-2.0

mod config;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ucobf_core::attacks::{
    appsat_attack, guess_attack, key_to_string, sat_attack, scope_attack, verify_key_with, AppSatOptions, AttackError,
    AttackId, AttackRecord, AttackStatus, GuessMode, Oracle, SatAttackOptions, ScopeOptions,
};
use ucobf_core::cnf::tseitin_size;
use ucobf_core::fabric::Obfuscated;
use ucobf_core::metrics::{self, ReportFormat};
use ucobf_core::netlist::{parse_bench, write_bench};
use ucobf_core::sat::{Backend, Budget, SatError};
use ucobf_core::transform::unroll;
use ucobf_core::{obfuscate, Bitstream, LockedNetlist, Netlist};

use config::{parse_attacks, FileConfig, RunConfig, SolverChoice};

#[derive(Parser)]
#[command(
    name = "ucobf",
    version,
    about = "Universal-circuit obfuscation and attack evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a .bench netlist.
    Parse { file: PathBuf },
    /// Unroll a sequential netlist into a combinational one.
    Unroll {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        frames: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lock a netlist: writes locked.bench, key.txt and fabric.json.
    Obfuscate {
        file: PathBuf,
        #[command(flatten)]
        fabric: FabricArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a key against the original circuit.
    Verify {
        #[arg(long)]
        locked: PathBuf,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long, default_value_t = 600.0)]
        budget_sec: f64,
        #[arg(long, value_enum, default_value_t = SolverChoice::Embedded)]
        solver: SolverChoice,
    },
    /// Run attacks on a locked netlist and emit one record per attack.
    Attack {
        #[arg(long)]
        locked: PathBuf,
        /// Unlocked circuit used as the oracle.
        #[arg(long)]
        oracle: Option<PathBuf>,
        /// Correct key, used only to score the outcome.
        #[arg(long)]
        key: Option<PathBuf>,
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long = "attack", required = true)]
        attacks: Vec<String>,
        #[arg(long, default_value_t = 60.0)]
        budget_sec: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = SolverChoice::Embedded)]
        solver: SolverChoice,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute metrics from attack records and transcribed tables.
    Metrics {
        /// Directory of attack record JSON files.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Transcribed attack table CSV.
        #[arg(long)]
        ingest_paper: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the obfuscate and attack pipeline over a set of circuits.
    Bench {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "circuit")]
        circuits: Vec<PathBuf>,
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        slack: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "attack")]
        attacks: Vec<String>,
        #[arg(long)]
        budget_sec: Option<f64>,
        #[arg(long, value_enum)]
        solver: Option<SolverChoice>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct FabricArgs {
    /// Unroll this many frames; sequential inputs default to 1.
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    slack: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Exit status for a finished command.
enum Outcome {
    Success,
    Negative,
}

/// Reads a `.bench` file. The netlist is named after a leading `# name`
/// comment, else after the file stem.
fn load_bench(path: &Path) -> Result<Netlist> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let net = parse_bench(&text).with_context(|| format!("parse {}", path.display()))?;
    let header = text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("# "))
        .map(str::trim)
        .filter(|n| !n.is_empty() && !n.contains(char::is_whitespace));
    let name = match header {
        Some(n) => n.to_string(),
        None => path
            .file_stem()
            .map_or("circuit".into(), |s| s.to_string_lossy().into_owned()),
    };
    Ok(net.with_name(name))
}

/// Unrolls when asked to, or when the netlist is sequential.
fn prepare(net: Netlist, frames: Option<usize>) -> Result<Netlist> {
    match frames {
        Some(t) => Ok(unroll(&net, t).context("unroll")?),
        None if !net.is_combinational() => Ok(unroll(&net, 1).context("unroll")?),
        None => Ok(net),
    }
}

fn load_locked(path: &Path) -> Result<LockedNetlist> {
    let net = load_bench(path)?;
    LockedNetlist::from_netlist(net).with_context(|| format!("{} is not a locked netlist", path.display()))
}

fn load_key(path: &Path) -> Result<Bitstream> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Bitstream::from_text(&text).with_context(|| format!("bad key file {}", path.display()))
}

fn backend(choice: SolverChoice) -> Result<Backend> {
    match choice {
        SolverChoice::Embedded => Ok(Backend::Embedded),
        SolverChoice::External => Backend::external_from_env().context(
            "no external solver: set UCOBF_SAT_SOLVER or put kissat, cadical, cryptominisat5 or glucose-syrup on PATH",
        ),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_parse(file: &Path) -> Result<Outcome> {
    let net = load_bench(file)?;
    println!("name: {}", net.name());
    println!("inputs: {}", net.inputs().len());
    println!("outputs: {}", net.outputs().len());
    println!("flops: {}", net.flops().len());
    println!("gates: {}", net.gates().len());
    if net.is_combinational() {
        let (v, c) = tseitin_size(&net);
        println!("cnf: {v} variables, {c} clauses");
    }
    Ok(Outcome::Success)
}

fn cmd_unroll(file: &Path, frames: usize, out: Option<&Path>) -> Result<Outcome> {
    let net = load_bench(file)?;
    let u = unroll(&net, frames).context("unroll")?;
    let text = write_bench(&u);
    match out {
        Some(p) => write_file(p, &text)?,
        None => print!("{text}"),
    }
    Ok(Outcome::Success)
}

fn lock(net: &Netlist, args: FabricArgs) -> Result<(Netlist, Obfuscated)> {
    let prepared = prepare(net.clone(), args.frames)?;
    let o = obfuscate(&prepared, args.k, args.slack, args.seed).context("obfuscate")?;
    Ok((prepared, o))
}

fn write_locked(dir: &Path, o: &Obfuscated) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    write_file(&dir.join("locked.bench"), &o.locked.to_bench())?;
    write_file(&dir.join("key.txt"), &o.key.to_text())?;
    write_file(&dir.join("fabric.json"), &(o.fabric.to_json() + "\n"))
}

fn cmd_obfuscate(file: &Path, args: FabricArgs, out: &Path) -> Result<Outcome> {
    let net = load_bench(file)?;
    let (prepared, o) = lock(&net, args)?;
    write_locked(out, &o)?;
    println!("circuit: {}", o.locked.netlist().name());
    println!("key length: {}", o.key.len());
    println!("original gates: {}", prepared.gates().len());
    println!("locked gates: {}", o.locked.netlist().gates().len());
    println!("poles: {}", o.fabric.n_poles());
    Ok(Outcome::Success)
}

fn cmd_verify(
    locked: &Path,
    key: &Path,
    original: &Path,
    frames: Option<usize>,
    budget_sec: f64,
    solver: SolverChoice,
) -> Result<Outcome> {
    if !(budget_sec > 0.0 && budget_sec.is_finite()) {
        bail!("budget must be positive");
    }
    let locked = load_locked(locked)?;
    let key = load_key(key)?;
    let original = prepare(load_bench(original)?, frames)?;
    let backend = backend(solver)?;
    let budget = Budget::time(Duration::from_secs_f64(budget_sec));
    let v = verify_key_with(&backend, &locked, key.bits(), &original, &budget).context("verify")?;
    let method = serde_json::to_string(&v.method)?;
    if v.equivalent {
        println!("equivalent ({})", method.trim_matches('"'));
        Ok(Outcome::Success)
    } else {
        let w = v.witness.as_deref().map(key_to_string).unwrap_or_default();
        println!("NOT equivalent ({}), differing input {w}", method.trim_matches('"'));
        Ok(Outcome::Negative)
    }
}

struct AttackJob<'a> {
    locked: &'a LockedNetlist,
    original: Option<&'a Netlist>,
    true_key: Option<&'a [bool]>,
    budget: Duration,
    seed: u64,
    trials: usize,
}

fn run_attack(id: AttackId, job: &AttackJob) -> Result<AttackRecord> {
    let oracle = || -> Result<Oracle> {
        let net = job
            .original
            .with_context(|| format!("attack {id} needs an oracle circuit (--oracle)"))?;
        Ok(Oracle::new(net)?)
    };
    let needs_key = || {
        job.true_key
            .with_context(|| format!("attack {id} needs the correct key (--key) to score guesses"))
    };
    let sat_opts = SatAttackOptions {
        time_limit: Some(job.budget),
        seed: job.seed,
        true_key: job.true_key.map(<[bool]>::to_vec),
        ..SatAttackOptions::default()
    };
    let mut record = match id {
        AttackId::Sat => sat_attack(job.locked, &mut oracle()?, &sat_opts)?.record,
        AttackId::AppSat => {
            let opts = AppSatOptions {
                base: sat_opts,
                ..AppSatOptions::default()
            };
            appsat_attack(job.locked, &mut oracle()?, &opts)?.record
        }
        AttackId::Scope => scope_attack(job.locked, job.true_key, &ScopeOptions::default()).record,
        AttackId::Random => {
            guess_attack(job.locked, needs_key()?, job.trials, job.seed, GuessMode::Random, None)?.record
        }
        AttackId::HillClimb => {
            let mut o = oracle()?;
            guess_attack(
                job.locked,
                needs_key()?,
                job.trials,
                job.seed,
                GuessMode::HillClimb,
                Some(&mut o),
            )?
            .record
        }
        other => bail!("attack {other} has no engine in this tool"),
    };
    if let Some(net) = job.original {
        record.baseline_clauses = Some(tseitin_size(net).1);
    }
    Ok(record)
}

fn record_file(r: &AttackRecord) -> String {
    let safe: String = r
        .circuit
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{safe}_{}.json", r.attack.as_str().to_ascii_lowercase())
}

fn all_negative(records: &[AttackRecord]) -> bool {
    !records.is_empty() && records.iter().all(|r| r.status == AttackStatus::Timeout)
}

#[allow(clippy::too_many_arguments)]
fn cmd_attack(
    locked: &Path,
    oracle: Option<&Path>,
    key: Option<&Path>,
    frames: Option<usize>,
    attacks: &[String],
    budget_sec: f64,
    seed: u64,
    trials: usize,
    solver: SolverChoice,
    out: Option<&Path>,
) -> Result<Outcome> {
    let ids = parse_attacks(attacks)?;
    if !(budget_sec > 0.0 && budget_sec.is_finite()) {
        bail!("budget must be positive");
    }
    if solver == SolverChoice::External {
        eprintln!("note: attacks run on the embedded incremental solver; --solver only affects key verification");
    }
    let locked = load_locked(locked)?;
    let original = oracle
        .map(|p| load_bench(p).and_then(|n| prepare(n, frames)))
        .transpose()?;
    let key = key.map(load_key).transpose()?;
    let job = AttackJob {
        locked: &locked,
        original: original.as_ref(),
        true_key: key.as_ref().map(Bitstream::bits),
        budget: Duration::from_secs_f64(budget_sec),
        seed,
        trials,
    };
    let mut records = Vec::new();
    for id in ids {
        let r = run_attack(id, &job).with_context(|| format!("attack {id}"))?;
        println!("{}", serde_json::to_string(&r)?);
        if let Some(dir) = out {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            write_file(&dir.join(record_file(&r)), &(r.to_json() + "\n"))?;
        }
        records.push(r);
    }
    Ok(if all_negative(&records) {
        Outcome::Negative
    } else {
        Outcome::Success
    })
}

fn read_records(dir: &Path) -> Result<Vec<AttackRecord>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            AttackRecord::from_json(&text).with_context(|| format!("bad record {}", p.display()))
        })
        .collect()
}

fn write_report(out: &Path, records: &[AttackRecord]) -> Result<()> {
    let report = metrics::compute(records, &HashMap::new()).context("metrics")?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    for (name, format) in [("metrics.csv", ReportFormat::Csv), ("metrics.json", ReportFormat::Json)] {
        write_file(&out.join(name), &metrics::report_string(&report.rows, format)?)?;
    }
    Ok(())
}

fn cmd_metrics(records: Option<&Path>, table: Option<&Path>, out: &Path) -> Result<Outcome> {
    if records.is_none() && table.is_none() {
        bail!("give --records, --ingest-paper or both");
    }
    let mut all = Vec::new();
    if let Some(dir) = records {
        all.extend(read_records(dir)?);
    }
    if let Some(p) = table {
        let f = fs::File::open(p).with_context(|| format!("cannot read {}", p.display()))?;
        all.extend(metrics::ingest_table(f).with_context(|| format!("ingest {}", p.display()))?);
    }
    write_report(out, &all)?;
    println!("{} rows written to {}", all.len(), out.display());
    Ok(Outcome::Success)
}

fn bench_circuit(cfg: &RunConfig, path: &Path) -> Result<Vec<AttackRecord>> {
    let net = load_bench(path)?;
    let args = FabricArgs {
        frames: Some(cfg.frames),
        k: cfg.k,
        slack: cfg.slack,
        seed: cfg.seed,
    };
    let (prepared, o) = lock(&net, args)?;
    write_locked(&cfg.out.join(o.locked.netlist().name()), &o)?;
    let job = AttackJob {
        locked: &o.locked,
        original: Some(&prepared),
        true_key: Some(o.key.bits()),
        budget: Duration::from_secs_f64(cfg.budget_sec),
        seed: cfg.seed,
        trials: cfg.trials,
    };
    let mut records = Vec::new();
    for &id in &cfg.attacks {
        let r = run_attack(id, &job).with_context(|| format!("{}: attack {id}", path.display()))?;
        // A broken key is re-checked independently of the attack's own check.
        if let (AttackStatus::Broken, Some(v)) = (r.status, &r.recovered_key) {
            let key: Vec<bool> = v.chars().map(|c| c == '1').collect();
            let backend = backend(cfg.solver)?;
            let budget = Budget::time(Duration::from_secs_f64(cfg.budget_sec));
            let check = verify_key_with(&backend, &o.locked, &key, &prepared, &budget)?;
            if !check.equivalent {
                return Err(AttackError::Unverified(format!("{id} key on {}", path.display())).into());
            }
        }
        records.push(r);
    }
    Ok(records)
}

fn cmd_bench(cfg: RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out).with_context(|| format!("cannot create {}", cfg.out.display()))?;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<Vec<AttackRecord>>>>> =
        Mutex::new((0..cfg.circuits.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..cfg.jobs.min(cfg.circuits.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = cfg.circuits.get(i) else { break };
                let r = bench_circuit(&cfg, path);
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });
    let mut records = Vec::new();
    for r in results.into_inner().unwrap() {
        records.extend(r.expect("every circuit ran")?);
    }
    let dir = cfg.out.join("records");
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    for r in &records {
        write_file(&dir.join(record_file(r)), &(r.to_json() + "\n"))?;
    }
    write_report(&cfg.out, &records)?;
    for r in &records {
        println!("{} {} {} {:.3}s", r.circuit, r.attack, r.status, r.time_s);
    }
    Ok(if all_negative(&records) {
        Outcome::Negative
    } else {
        Outcome::Success
    })
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Parse { file } => cmd_parse(&file),
        Command::Unroll { file, frames, out } => cmd_unroll(&file, frames, out.as_deref()),
        Command::Obfuscate { file, fabric, out } => cmd_obfuscate(&file, fabric, &out),
        Command::Verify {
            locked,
            key,
            original,
            frames,
            budget_sec,
            solver,
        } => cmd_verify(&locked, &key, &original, frames, budget_sec, solver),
        Command::Attack {
            locked,
            oracle,
            key,
            frames,
            attacks,
            budget_sec,
            seed,
            trials,
            solver,
            out,
        } => cmd_attack(
            &locked,
            oracle.as_deref(),
            key.as_deref(),
            frames,
            &attacks,
            budget_sec,
            seed,
            trials,
            solver,
            out.as_deref(),
        ),
        Command::Metrics {
            records,
            ingest_paper,
            out,
        } => cmd_metrics(records.as_deref(), ingest_paper.as_deref(), &out),
        Command::Bench {
            config,
            circuits,
            frames,
            k,
            slack,
            seed,
            attacks,
            budget_sec,
            solver,
            trials,
            jobs,
            out,
        } => {
            let file = config.as_deref().map(FileConfig::load).transpose()?.unwrap_or_default();
            let attacks = if attacks.is_empty() {
                file.attacks
                    .unwrap_or_else(|| vec!["SAT".into(), "SCOPE".into(), "RANDOM".into()])
            } else {
                attacks
            };
            let cfg = RunConfig {
                circuits: if circuits.is_empty() {
                    file.circuits.unwrap_or_default()
                } else {
                    circuits
                },
                frames: frames.or(file.frames).unwrap_or(1),
                k: k.or(file.k).unwrap_or(2),
                slack: slack.or(file.slack).unwrap_or(0),
                seed: seed.or(file.seed).unwrap_or(0),
                attacks: parse_attacks(&attacks)?,
                budget_sec: budget_sec.or(file.budget_sec).unwrap_or(60.0),
                solver: solver.or(file.solver).unwrap_or_default(),
                trials: trials.or(file.trials).unwrap_or(1000),
                jobs: jobs.or(file.jobs).unwrap_or(1),
                out: out.or(file.out).unwrap_or_else(|| PathBuf::from("results")),
            };
            cmd_bench(cfg)
        }
    }
}

/// 3 for errors that indicate a bug, 2 for bad input or usage.
fn error_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause
            .downcast_ref::<AttackError>()
            .is_some_and(AttackError::is_soundness_violation)
        {
            return 3;
        }
        if let Some(SatError::InvalidModel { .. }) = cause.downcast_ref::<SatError>() {
            return 3;
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
