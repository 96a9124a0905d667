// SPDX-License-Identifier: Apache-2.0

//! Adapter for competition-style solvers: the formula is written to a DIMACS
//! file passed as the only argument, and the answer is read back from the
//! `s`/`v` lines on stdout.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use super::{Budget, SatError, SolveResult, Stats, Status};
use crate::cnf::{read_model, write_dimacs, CnfFormula};

/// Environment variable naming the external solver binary.
pub const SOLVER_ENV: &str = "UCOBF_SAT_SOLVER";

const KNOWN: [&str; 4] = ["kissat", "cadical", "cryptominisat5", "glucose-syrup"];

/// Solver from `UCOBF_SAT_SOLVER`, else the first known solver on `PATH`.
pub fn locate() -> Option<PathBuf> {
    if let Some(p) = std::env::var_os(SOLVER_ENV) {
        let p = PathBuf::from(p);
        return (!p.as_os_str().is_empty()).then_some(p);
    }
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path)
        .flat_map(|dir| KNOWN.iter().map(move |name| dir.join(name)))
        .find(|p| p.is_file())
}

fn scratch_path() -> PathBuf {
    static NEXT: AtomicU64 = AtomicU64::new(0);
    let n = NEXT.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!("ucobf-{}-{n}.cnf", std::process::id()))
}

struct Scratch(PathBuf);

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

pub fn run(solver: &Path, f: &CnfFormula, budget: &Budget) -> Result<SolveResult, SatError> {
    let started = Instant::now();
    let file = Scratch(scratch_path());
    {
        let mut w = std::io::BufWriter::new(std::fs::File::create(&file.0)?);
        write_dimacs(f, &mut w)?;
    }
    let mut child = Command::new(solver)
        .arg(&file.0)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => SatError::SolverNotFound(solver.display().to_string()),
            _ => SatError::Io(e),
        })?;
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        stdout.read_to_string(&mut s).map(|_| s)
    });
    loop {
        if child.try_wait()?.is_some() {
            break;
        }
        if budget.expired() {
            let _ = child.kill();
            let _ = child.wait();
            let _ = reader.join();
            return Ok(SolveResult {
                status: Status::Timeout,
                model: None,
                stats: Stats {
                    solve_time: started.elapsed(),
                    ..Stats::default()
                },
            });
        }
        std::thread::sleep(Duration::from_millis(2));
    }
    let text = reader
        .join()
        .map_err(|_| SatError::Protocol("stdout reader panicked".into()))??;
    let mut r = read_model(&text, f.num_vars())?;
    r.stats.solve_time = started.elapsed();
    Ok(r)
}
