use std::fs;
use std::io::Write as _;

use clap::Parser;
use fmd_core::{
    build_predictive, compare_to_limit, concurrency_check, extend_assertion, fm_line_system, fm_window,
    forced_extension, incomplete_beta_density, incomplete_beta_mixture_mass, interior_mass, invert_to_mass,
    mass_to_predictive, reduce_mass_to, theorem1_bound, theorem1_mass, theorem2_sum_bound_check, verify_theorem3,
    CompletionKind, Concurrency, ExtensionScenario, IncompleteBetaParams, PanAssertion,
};
use num_rational::Ratio;
use rayon::prelude::*;

use crate::args::{Cli, Command, Common, Theorem};
use crate::error::{CliError, Result};
use crate::presets::preset_jobs;
use crate::table::{mass_table, predictive_table, render, write, Cell, Table};

/// One unit of work that yields one table.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Predict(PanAssertion, CompletionKind),
    Mass(PanAssertion, CompletionKind),
    Reduce(PanAssertion, CompletionKind, usize),
    Extend(ExtensionScenario, CompletionKind),
    ExtendPredict(ExtensionScenario, CompletionKind),
    Limit { n: usize, theta1: f64, theta2: f64, p_lower: Option<f64>, p_upper: Option<f64>, kind: CompletionKind },
    Geometry(PanAssertion),
}

#[derive(Debug, Default)]
pub struct Report {
    pub tables: Vec<(String, Table)>,
    pub notes: Vec<String>,
    pub failure: Option<String>,
}

fn limit_assertion(
    n: usize,
    theta1: f64,
    theta2: f64,
    p_lower: Option<f64>,
    p_upper: Option<f64>,
) -> Result<PanAssertion> {
    let (a1, a2) = fm_window(n, theta1, theta2)?;
    let pl = p_lower.unwrap_or(theta1 / 2.0);
    let pu = p_upper.unwrap_or(1.0 - theta2 / 2.0);
    Ok(PanAssertion::new(n, a1, a2, pl, pu)?)
}

impl Job {
    pub fn run(&self, log: bool) -> Result<(Table, Vec<String>)> {
        let mut notes = Vec::new();
        let table = match self {
            Job::Predict(s, kind) => predictive_table(&build_predictive(s, *kind)?),
            Job::Mass(s, kind) => {
                let p = build_predictive(s, *kind)?;
                mass_table(&invert_to_mass(&p), Some(&p), log)
            }
            Job::Reduce(s, kind, m) => {
                if *m == 0 || *m > s.n() {
                    return Err(CliError::Validation(format!("--M must lie in 1..={}", s.n())));
                }
                let q = reduce_mass_to(&invert_to_mass(&build_predictive(s, *kind)?), m + 1)?;
                let p = mass_to_predictive(&q)?;
                mass_table(&q, Some(&p), log)
            }
            Job::Extend(scenario, kind) => {
                let p = build_predictive(&extend_assertion(scenario)?, *kind)?;
                let q = invert_to_mass(&p);
                notes.push(format!("local maxima of q: {:?}", q.local_maxima()));
                let interior = interior_mass(scenario, *kind)?;
                notes.push(format!(
                    "mass on [a1, a2 + K]: {:.6e} (closed form {:.6e})",
                    interior.direct_sum, interior.closed_form
                ));
                mass_table(&q, Some(&p), log)
            }
            Job::ExtendPredict(scenario, kind) => predictive_table(&build_predictive(&extend_assertion(scenario)?, *kind)?),
            Job::Limit { n, theta1, theta2, p_lower, p_upper, kind } => {
                let s = limit_assertion(*n, *theta1, *theta2, *p_lower, *p_upper)?;
                let params = IncompleteBetaParams::new(*theta1, *theta2)?;
                let p = build_predictive(&s, *kind)?;
                let q = invert_to_mass(&p);
                let mixture = incomplete_beta_mixture_mass(q.nplus1(), &params)?;
                notes.push(format!("{s}: sup distance to the limit density {:.6e}", compare_to_limit(&q, &params, None)?));
                let mut table = mass_table(&q, Some(&p), log);
                table.columns.extend(["limit_density".to_string(), "mixture_density".to_string()]);
                let bins = (q.nplus1() + 1) as f64;
                for (a, row) in table.rows.iter_mut().enumerate() {
                    let x = a as f64 / q.nplus1() as f64;
                    let limit = if x > *theta1 && x < *theta2 {
                        incomplete_beta_density(x, &params)?
                    } else {
                        0.0
                    };
                    let ln_mix = mixture.ln(a) + bins.ln();
                    row.push(Cell::Num(limit));
                    row.push(Cell::Num(if log { ln_mix } else { ln_mix.exp() }));
                }
                table
            }
            Job::Geometry(s) => {
                let mut table = Table::new(&[
                    "n", "a", "p_lower", "p_upper", "p_reduced", "slope_lower", "slope_upper", "slope_reduced", "alpha",
                    "beta",
                ]);
                for t in fm_line_system(s) {
                    let (alpha, beta) = match concurrency_check(&t.lower, &t.upper, &t.reduced)? {
                        Concurrency::Intersection { alpha, beta } => (Cell::Num(alpha), Cell::Num(beta)),
                        Concurrency::Parallel => (Cell::Missing, Cell::Missing),
                    };
                    table.push(vec![
                        Cell::Int(t.lower.n as u64),
                        Cell::Int(t.lower.a as u64),
                        Cell::Num(t.lower.p),
                        Cell::Num(t.upper.p),
                        Cell::Num(t.reduced.p),
                        Cell::Num(t.lower.slope()),
                        Cell::Num(t.upper.slope()),
                        Cell::Num(t.reduced.slope()),
                        alpha,
                        beta,
                    ]);
                }
                table
            }
        };
        Ok((table, notes))
    }
}

/// Runs named jobs on the worker pool, keeping their order.
pub fn run_jobs(jobs: &[(String, Job)], log: bool) -> Result<Report> {
    let results: Vec<Result<(Table, Vec<String>)>> = jobs.par_iter().map(|(_, job)| job.run(log)).collect();
    let mut report = Report::default();
    for ((name, _), result) in jobs.iter().zip(results) {
        let (table, notes) = result?;
        report.notes.extend(notes.into_iter().map(|n| format!("{name}: {n}")));
        report.tables.push((name.clone(), table));
    }
    Ok(report)
}

struct Checks {
    table: Table,
    failed: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks { table: Table::new(&["check", "value", "threshold", "pass"]), failed: Vec::new() }
    }

    /// Records `value <= threshold`.
    fn at_most(&mut self, name: &str, value: f64, threshold: f64) {
        self.record(name, value, threshold, value <= threshold);
    }

    fn record(&mut self, name: &str, value: f64, threshold: f64, pass: bool) {
        if !pass {
            self.failed.push(format!("{name} = {value:e} (threshold {threshold:e})"));
        }
        self.table.push(vec![
            Cell::Text(name.to_string()),
            Cell::Num(value),
            Cell::Num(threshold),
            Cell::Text(pass.to_string()),
        ]);
    }

    fn into_report(self, name: &str) -> Report {
        let failure = (!self.failed.is_empty()).then(|| self.failed.join("; "));
        Report { tables: vec![(name.to_string(), self.table)], notes: Vec::new(), failure }
    }
}

#[allow(clippy::too_many_arguments)]
fn verify(
    theorem: Theorem,
    common: &Common,
    q0: f64,
    m: Option<usize>,
    k: usize,
    a_star: Option<usize>,
    theta1: f64,
    theta2: f64,
) -> Result<Report> {
    let mut checks = Checks::new();
    match theorem {
        Theorem::Theorem1 => {
            let n = common.require_n()?;
            let bound = theorem1_bound(n, q0);
            let q = theorem1_mass(n, q0, 0.5 * bound)?;
            let mut worst: f64 = 0.0;
            for a in 2..=n {
                let expect = n as f64 / (a * (n - a + 1)) as f64;
                worst = worst.max(((q.ln(a) - q.ln(1)).exp() - expect).abs() / expect);
            }
            checks.at_most("relative error of q[a]/q[1] = N/(a(N-a+1))", worst, 1e-12);
            let over = theorem1_mass(n, q0, bound * (1.0 + 1e-6));
            checks.record("q1 above the bound rejected", bound, bound, over.is_err());
        }
        Theorem::Theorem2 => {
            let n = common.require_n()?;
            let m = m.unwrap_or(n.min(10));
            let (lhs, rhs) = theorem2_sum_bound_check(n, m, q0, 0.5 * theorem1_bound(n, q0))?;
            checks.at_most("sum of q[1..=M]", lhs, rhs);
        }
        Theorem::Theorem3 => {
            let s = common.assertion()?;
            for kind in CompletionKind::ALL {
                checks.at_most(&format!("{kind}: max deviation from a/n on the implied windows"), verify_theorem3(&s, kind)?, 1e-12);
            }
        }
        Theorem::Theorem4 => {
            let s = common.assertion()?;
            let (n, a1) = (s.n() as u128, s.a1() as u128);
            let a_star = a_star.unwrap_or(((a1 * (n + 1)).div_ceil(n)) as usize);
            let forced = forced_extension(&s, a_star)?;
            let level = s.n() as i64 + 1;
            let off = forced.iter().filter(|(a, p)| *p != Ratio::new(*a as i64, level)).count();
            checks.at_most(&format!("entries of the forced window at a* = {a_star} differing from a/(N+1)"), off as f64, 0.0);
            checks.record("forced window length", forced.len() as f64, (s.a2() - s.a1() + 2) as f64, forced.len() == s.a2() - s.a1() + 2);
        }
        Theorem::Theorem5 => {
            let s = common.assertion()?;
            let interior = interior_mass(&ExtensionScenario::with_midpoint_bounds(s, k), CompletionKind::Strict)?;
            checks.record("strict: mass on [a1, a2 + K]", interior.direct_sum, 1.0, interior.direct_sum <= 1.0);
            checks.at_most("strict: relative gap to the harmonic closed form", interior.relative_gap(), 1e-10);
        }
        Theorem::Theorem6 => {
            let n = common.require_n()?;
            let params = IncompleteBetaParams::new(theta1, theta2)?;
            let distance = |n: usize| -> Result<f64> {
                let s = limit_assertion(n, theta1, theta2, common.p_lower, common.p_upper)?;
                let q = invert_to_mass(&build_predictive(&s, common.completion)?);
                Ok(compare_to_limit(&q, &params, None)?)
            };
            let here = distance(n)?;
            if n >= 100 {
                let coarse = distance(n / 10)?;
                checks.at_most(&format!("sup distance at N = {n} against N = {}", n / 10), here, coarse);
            } else {
                checks.record(&format!("sup distance at N = {n}"), here, f64::INFINITY, here.is_finite());
            }
            let single = incomplete_beta_mixture_mass(1, &params)?;
            let expect = ((1.0 - theta1) / (1.0 - theta2)).ln() / params.normalizer();
            let err = (single.get(1) - expect).abs();
            checks.at_most("one-trial mixture against the closed form", err, 1e-12);
        }
    }
    Ok(checks.into_report(&format!("{theorem:?}").to_lowercase()))
}

/// Computes the tables for one command without writing anything.
pub fn run_command(command: &Command) -> Result<Report> {
    let solo = |name: &str, job: Job, common: &Common| run_jobs(&[(name.to_string(), job)], common.log_output);
    match command {
        Command::Predict(c) => solo("predict", Job::Predict(c.assertion()?, c.completion), c),
        Command::Mass(c) => solo("mass", Job::Mass(c.assertion()?, c.completion), c),
        Command::Reduce { common: c, m } => solo("reduce", Job::Reduce(c.assertion()?, c.completion, *m), c),
        Command::Extend { common: c, k, p_lower_ext, p_upper_ext } => {
            let mut scenario = ExtensionScenario::with_midpoint_bounds(c.assertion()?, *k);
            if let Some(v) = p_lower_ext {
                scenario.p_lower_ext = *v;
            }
            if let Some(v) = p_upper_ext {
                scenario.p_upper_ext = *v;
            }
            solo("extend", Job::Extend(scenario, c.completion), c)
        }
        Command::Limit { common: c, theta1, theta2 } => {
            let job = Job::Limit {
                n: c.require_n()?,
                theta1: *theta1,
                theta2: *theta2,
                p_lower: c.p_lower,
                p_upper: c.p_upper,
                kind: c.completion,
            };
            solo("limit", job, c)
        }
        Command::Sensitivity { common: c, p_upper_list } => {
            let base = c.assertion()?;
            let mut jobs = Vec::new();
            for &pu in p_upper_list {
                let s = PanAssertion::new(base.n(), base.a1(), base.a2(), base.p_lower(), pu)?;
                jobs.push((format!("pU_{pu}"), Job::Mass(s, c.completion)));
            }
            run_jobs(&jobs, c.log_output)
        }
        Command::Geometry(c) => solo("geometry", Job::Geometry(c.assertion()?), c),
        Command::Verify { theorem, common, q0, m, k, a_star, theta1, theta2 } => {
            verify(*theorem, common, *q0, *m, *k, *a_star, *theta1, *theta2)
        }
        Command::Preset { name, common } => run_jobs(&preset_jobs(*name)?, common.log_output),
        Command::Batch { .. } => Err(CliError::Validation("batch files cannot nest".into())),
    }
}

fn emit(report: &Report, common: &Common) -> Result<()> {
    match &common.out {
        Some(path) => write(&report.tables, common.format, path)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(render(&report.tables, common.format).as_bytes())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
        }
    }
    for note in &report.notes {
        eprintln!("{note}");
    }
    match &report.failure {
        Some(why) => Err(CliError::Verification(why.clone())),
        None => Ok(()),
    }
}

fn parse_batch(text: &str) -> Result<Vec<(usize, Cli)>> {
    let mut commands = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let argv = std::iter::once("fmd").chain(line.split_whitespace());
        let cli = Cli::try_parse_from(argv).map_err(|e| {
            let first = e.to_string().lines().next().unwrap_or_default().to_string();
            CliError::Validation(format!("line {}: {first}", i + 1))
        })?;
        if matches!(cli.command, Command::Batch { .. }) {
            return Err(CliError::Validation(format!("line {}: batch files cannot nest", i + 1)));
        }
        commands.push((i + 1, cli));
    }
    Ok(commands)
}

/// Runs a parsed command and writes its output.
pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Batch { file } => {
            let text = fs::read_to_string(file).map_err(|source| CliError::Io { path: file.clone(), source })?;
            for (line, cli) in parse_batch(&text)? {
                let tag = |e: CliError| match e {
                    CliError::Validation(m) => CliError::Validation(format!("line {line}: {m}")),
                    CliError::Precision(m) => CliError::Precision(format!("line {line}: {m}")),
                    CliError::Verification(m) => CliError::Verification(format!("line {line}: {m}")),
                    io => io,
                };
                execute(&cli.command).map_err(tag)?;
            }
            Ok(())
        }
        _ => {
            let common = command.common().expect("non-batch commands carry common flags");
            emit(&run_command(command)?, common)
        }
    }
}
