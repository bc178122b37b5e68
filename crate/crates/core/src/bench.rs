//! Benchmark harness: runs both methods over a problem list, compares final
//! values and builds performance profiles on gradient-evaluation counts.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baseline::{run_gs, GsParams};
use crate::error::{Error, Result};
use crate::solver::{run_descent, RunRecord, SolverParams, Termination};
use crate::testbed::get_problem;

/// Default convergence threshold of the profiles.
pub const DEFAULT_THRESHOLD: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Sojet,
    Gs,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Sojet => "sojet",
            Method::Gs => "gs",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sojet" => Ok(Method::Sojet),
            "gs" => Ok(Method::Gs),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

/// Benchmark configuration, read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub problems: Vec<String>,
    pub n: usize,
    pub methods: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    /// Per-method parameter objects; missing fields keep their defaults.
    #[serde(default)]
    pub overrides: BTreeMap<String, serde_json::Value>,
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// One finished cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub problem: String,
    pub n: usize,
    pub method: String,
    pub n_f: u64,
    pub n_grad: u64,
    pub n_hess: u64,
    pub final_f: f64,
    /// `final_f` minus the best `final_f` over all methods on this problem.
    pub accuracy: f64,
    pub wall_time_s: f64,
    pub termination: Termination,
}

/// A cell that could not be run.
#[derive(Clone, Debug, PartialEq)]
pub struct CellError {
    pub problem: String,
    pub method: String,
    pub message: String,
}

impl fmt::Display for CellError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}: {}", self.problem, self.method, self.message)
    }
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub results: Vec<BenchResult>,
    pub errors: Vec<CellError>,
}

/// Seed of one cell, derived from the global seed, problem and method so that
/// cells are reproducible independently of each other.
pub fn cell_seed(global: u64, problem: &str, method: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(global.to_le_bytes());
    h.update(problem.as_bytes());
    h.update([0u8]);
    h.update(method.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Runs one method on one registered problem from its standard start.
pub fn run_cell(config: &BenchConfig, problem: &str, method: &str) -> Result<(RunRecord, f64)> {
    let m: Method = method.parse()?;
    let spec = get_problem(problem, config.n)?;
    let seed = cell_seed(config.seed, problem, method);
    let overrides = config.overrides.get(method).cloned().unwrap_or(serde_json::json!({}));
    let start = Instant::now();
    let record = match m {
        Method::Sojet => {
            let mut params: SolverParams = serde_json::from_value(overrides)?;
            params.seed = seed;
            run_descent(&spec, spec.x0(), &params)?
        }
        Method::Gs => {
            let mut params: GsParams = serde_json::from_value(overrides)?;
            params.seed = seed;
            run_gs(&spec, spec.x0(), &params)?
        }
    };
    Ok((record, start.elapsed().as_secs_f64()))
}

/// Runs every (problem, method) cell of `config`, concurrently, and fills in
/// accuracies. Failing cells are reported in [`BenchReport::errors`].
pub fn run_benchmark(config: &BenchConfig) -> BenchReport {
    let cells: Vec<(&str, &str)> = config
        .problems
        .iter()
        .flat_map(|p| config.methods.iter().map(move |m| (p.as_str(), m.as_str())))
        .collect();

    let outcomes: Vec<Result<(RunRecord, f64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .iter()
            .map(|&(p, m)| scope.spawn(move || run_cell(config, p, m)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("benchmark cell panicked")).collect()
    });

    let mut report = BenchReport::default();
    for (&(problem, method), outcome) in cells.iter().zip(outcomes) {
        match outcome {
            Ok((record, wall)) => report.results.push(BenchResult {
                problem: problem.to_string(),
                n: config.n,
                method: method.to_string(),
                n_f: record.counters.n_f,
                n_grad: record.counters.n_grad,
                n_hess: record.counters.n_hess,
                final_f: record.final_f,
                accuracy: 0.0,
                wall_time_s: wall,
                termination: record.termination,
            }),
            Err(e) => report.errors.push(CellError {
                problem: problem.to_string(),
                method: method.to_string(),
                message: e.to_string(),
            }),
        }
    }
    fill_accuracies(&mut report.results);
    report
}

/// Sets `accuracy = final_f - min final_f` over the results of each problem.
pub fn fill_accuracies(results: &mut [BenchResult]) {
    let mut best: BTreeMap<(String, usize), f64> = BTreeMap::new();
    for r in results.iter() {
        let e = best.entry((r.problem.clone(), r.n)).or_insert(f64::INFINITY);
        *e = e.min(r.final_f);
    }
    for r in results.iter_mut() {
        r.accuracy = r.final_f - best[&(r.problem.clone(), r.n)];
    }
}

/// One step of a performance profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub ratio_log10: f64,
    pub method: String,
    /// Fraction of problems solved within `10^ratio_log10` times the cost of
    /// the cheapest solving method.
    pub fraction_solved: f64,
}

/// Performance profile on gradient-evaluation counts.
///
/// A method solves a problem iff its accuracy is below `threshold`. The curve
/// of every method is sampled at every distinct finite log-ratio (and at 0),
/// in increasing order; methods appear in order of first occurrence.
pub fn performance_profile(results: &[BenchResult], threshold: f64) -> Result<Vec<ProfilePoint>> {
    if results.is_empty() {
        return Err(Error::EmptyResults);
    }
    if !(threshold > 0.0) {
        return Err(Error::InvalidParameter("threshold must be positive".into()));
    }
    let mut methods: Vec<&str> = Vec::new();
    let mut problems: Vec<(&str, usize)> = Vec::new();
    for r in results {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
        if !problems.contains(&(r.problem.as_str(), r.n)) {
            problems.push((&r.problem, r.n));
        }
    }

    // log10 cost ratio per (method, problem); +inf when unsolved
    let mut log_ratios: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for &(problem, n) in &problems {
        let cell = |m: &str| results.iter().find(|r| r.problem == problem && r.n == n && r.method == m);
        let min_cost = methods
            .iter()
            .filter_map(|&m| cell(m))
            .filter(|r| r.accuracy < threshold)
            .map(|r| r.n_grad)
            .min();
        for &m in &methods {
            let value = match (cell(m), min_cost) {
                (Some(r), Some(best)) if r.accuracy < threshold => {
                    if r.n_grad == best {
                        0.0
                    } else {
                        (r.n_grad as f64 / best as f64).log10()
                    }
                }
                _ => f64::INFINITY,
            };
            log_ratios.entry(m).or_default().push(value);
        }
    }

    let mut breaks: Vec<f64> = log_ratios.values().flatten().copied().filter(|v| v.is_finite()).collect();
    breaks.push(0.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let total = problems.len() as f64;
    let mut points = Vec::with_capacity(breaks.len() * methods.len());
    for &r in &breaks {
        for &m in &methods {
            let solved = log_ratios[m].iter().filter(|&&v| v <= r).count();
            points.push(ProfilePoint {
                ratio_log10: r,
                method: m.to_string(),
                fraction_solved: solved as f64 / total,
            });
        }
    }
    Ok(points)
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_results_csv<W: Write>(out: W, results: &[BenchResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "problem",
        "n",
        "method",
        "n_f",
        "n_grad",
        "n_hess",
        "final_f",
        "accuracy",
        "wall_time_s",
        "termination",
    ])?;
    for r in results {
        w.write_record([
            r.problem.clone(),
            r.n.to_string(),
            r.method.clone(),
            r.n_f.to_string(),
            r.n_grad.to_string(),
            r.n_hess.to_string(),
            fmt_f64(r.final_f),
            fmt_f64(r.accuracy),
            fmt_f64(r.wall_time_s),
            r.termination.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results_csv<R: Read>(input: R) -> Result<Vec<BenchResult>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn write_profile_csv<W: Write>(out: W, points: &[ProfilePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ratio_log10", "method", "fraction_solved"])?;
    for p in points {
        w.write_record([fmt_f64(p.ratio_log10), p.method.clone(), fmt_f64(p.fraction_solved)])?;
    }
    w.flush()?;
    Ok(())
}
