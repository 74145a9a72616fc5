//! The `tsconv` command line: scenario-driven commands that print one JSON
//! report on stdout.
//!
//! Exit codes: 0 for a positive verdict or a successful value command, 1 for
//! a negative verdict (or a failed self-test or property suite), 2 for an
//! inconclusive verdict, 3 for errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::convergence::{
    bap_transfer, cluster_points, default_level_grid, i_cauchy, i_converges, i_star_converges, statistical_converges, Outcome,
};
use crate::density::{default_grid, density, density_trace, DensityOutcome, TracePoint};
use crate::error::{Error, Result};
use crate::func::MeasurableFn;
use crate::ideal::{check_ideal_axioms, Ideal};
use crate::measure::{measure_interval, measure_point, measure_set_window_with, IntervalKind};
use crate::oracle::{statistical_limit_bruteforce, SequenceView, BRUTEFORCE_TOL};
use crate::props::{run_props, suite_settings};
use crate::real::{parse_q, q, Real};
use crate::scenario::{Num, Scenario};
use crate::set::{IndexPattern, TsSet};
use crate::settings::Settings;
use crate::timescale::TimeScale;

#[derive(Debug, Parser)]
#[command(name = "tsconv", version, about = "Measure, density and ideal convergence on time scales")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// TOML scenario file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Comma-separated tolerances, e.g. `1,0.5,1/4`.
    #[arg(long, value_delimiter = ',')]
    pub eps_grid: Option<Vec<String>>,
    /// Horizon of every window examined.
    #[arg(long)]
    pub t_max: Option<String>,
    /// Density tolerance.
    #[arg(long)]
    pub tol_density: Option<f64>,
    /// CSV trace output (`t,ratio`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    I,
    Istar,
    Stat,
    Cauchy,
    Cluster,
    Bap,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Δ-measure of an interval, a point, or a set inside `[t0, t]`.
    Measure {
        #[command(flatten)]
        common: Common,
        /// Interval such as `[2,5]` or `(2,5]`.
        #[arg(long)]
        interval: Option<String>,
        /// Overrides the brackets: open, half_open_lr, half_open_rl or closed.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        t: Option<String>,
    },
    /// Density of a named set.
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        set: Option<String>,
    },
    /// Density ratios along a grid, as CSV.
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        set: Option<String>,
        /// Uniform spacing of the trace grid; the default grid otherwise.
        #[arg(long)]
        every: Option<String>,
    },
    /// A convergence verdict for a named function.
    Converge {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        function: Option<String>,
        #[arg(long)]
        limit: Option<String>,
        /// Filter set tried first by `istar`.
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Cluster points of a named function over a level grid.
    Cluster {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        function: Option<String>,
        /// Comma-separated levels; spans the observed range otherwise.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<String>>,
    },
    /// Built-in reference checks.
    Selftest,
    /// The property suite over the built-in corpus.
    Props {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args`, runs the command, writes the report and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok((report, code)) => {
            let mut out = std::io::stdout().lock();
            match report {
                Report::Json(v) => {
                    let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"));
                }
                Report::Text(s) => {
                    let _ = out.write_all(s.as_bytes());
                }
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            3
        }
    }
}

pub enum Report {
    Json(Value),
    Text(String),
}

fn num(s: &str, field: &str) -> Result<Real> {
    parse_q(s).map(Real::Exact).map_err(|e| Error::config(field, e.to_string()))
}

fn float(s: &str, field: &str) -> Result<f64> {
    num(s, field).map(|r| r.to_f64())
}

fn need<T>(v: Option<T>, field: &str) -> Result<T> {
    v.ok_or_else(|| Error::config(field, "missing; give it on the command line or in the scenario"))
}

struct Loaded {
    scenario: Scenario,
    settings: Settings,
    path: String,
}

fn load(common: &Common) -> Result<Loaded> {
    let path = need(common.scenario.as_ref(), "--scenario")?;
    let scenario = Scenario::load(path)?;
    let mut settings = scenario.settings()?;
    if let Some(grid) = &common.eps_grid {
        settings.eps_grid = grid.iter().map(|e| float(e, "--eps-grid")).collect::<Result<_>>()?;
    }
    if let Some(t) = &common.t_max {
        settings = settings.with_t_max(num(t, "--t-max")?);
    }
    if let Some(tol) = common.tol_density {
        settings.density.tol = tol;
    }
    Ok(Loaded {
        scenario,
        settings,
        path: path.display().to_string(),
    })
}

impl Loaded {
    fn header(&self, command: &str) -> Value {
        json!({
            "command": command,
            "scenario": self.path,
            "timescale": self.scenario.ts,
            "params": {
                "eps_grid": self.settings.eps_grid,
                "horizon": self.settings.horizon(&self.scenario.ts),
                "tol_density": self.settings.density.tol,
            },
        })
    }

    fn ideal(&self) -> Result<Ideal> {
        self.scenario.ideal(&self.settings)
    }
}

fn with(mut header: Value, key: &str, value: impl Serialize) -> Value {
    header[key] = serde_json::to_value(value).expect("serializable");
    header
}

/// Parses `[a,b]`, `[a,b)`, `(a,b]` or `(a,b)`.
fn parse_interval(s: &str) -> Result<(IntervalKind, Real, Real)> {
    let bad = || Error::config("--interval", format!("expected something like `[2,5]`, got `{s}`"));
    let s = s.trim();
    let (open, rest) = s.split_at(s.chars().next().ok_or_else(bad)?.len_utf8());
    let (body, close) = rest.split_at(rest.len().checked_sub(1).ok_or_else(bad)?);
    let (a, b) = body.split_once(',').ok_or_else(bad)?;
    let kind = match (open, close) {
        ("[", "]") => IntervalKind::Closed,
        ("[", ")") => IntervalKind::HalfOpenLr,
        ("(", "]") => IntervalKind::HalfOpenRl,
        ("(", ")") => IntervalKind::Open,
        _ => return Err(bad()),
    };
    Ok((kind, num(a, "--interval")?, num(b, "--interval")?))
}

fn write_csv(path: &Path, trace: &[TracePoint]) -> Result<()> {
    std::fs::write(path, trace_csv(trace))?;
    Ok(())
}

fn trace_csv(trace: &[TracePoint]) -> String {
    let mut s = String::from("t,ratio\n");
    for p in trace {
        s.push_str(&format!("{},{}\n", p.t.to_f64(), p.ratio.to_f64()));
    }
    s
}

pub fn execute(command: Command) -> Result<(Report, i32)> {
    match command {
        Command::Measure {
            common,
            interval,
            kind,
            point,
            set,
            t,
        } => {
            let l = load(&common)?;
            let m = &l.scenario.file.measure;
            let ts = &l.scenario.ts;
            let interval = interval.or_else(|| m.interval.clone());
            let kind = kind.or_else(|| m.kind.clone());
            let set = set.or_else(|| m.set.clone());
            let header = l.header("measure");
            let value = if let Some(iv) = interval {
                let (bracket_kind, a, b) = parse_interval(&iv)?;
                let kind = match kind {
                    Some(k) => k.parse()?,
                    None => bracket_kind,
                };
                let v = measure_interval(ts, kind, &a, &b)?;
                json!({ "interval": iv, "kind": kind, "measure": v })
            } else if let Some(p) = point.or_else(|| m.point.as_ref().map(num_text)) {
                let p = num(&p, "--point")?;
                json!({ "point": p, "measure": measure_point(ts, &p)? })
            } else {
                let name = need(set, "--set")?;
                let t = match t.or_else(|| m.t.as_ref().map(num_text)) {
                    Some(t) => num(&t, "--t")?,
                    None => l.settings.horizon(ts),
                };
                let s = l.scenario.set(&name)?;
                json!({ "set": name, "t": t, "measure": measure_set_window_with(ts, &s, &t, &l.settings.resolve)? })
            };
            Ok((Report::Json(with(header, "result", value)), 0))
        }
        Command::Density { common, set } => {
            let l = load(&common)?;
            let name = need(set.or_else(|| l.scenario.file.density.set.clone()), "--set")?;
            let s = l.scenario.set(&name)?;
            let r = density(&l.scenario.ts, &s, &l.settings)?;
            let out = common.out.clone().or_else(|| l.scenario.file.density.out.clone().map(PathBuf::from));
            let mut value = json!({ "set": name, "outcome": r.outcome, "trace_points": r.trace.len() });
            if let Some(path) = out {
                write_csv(&path, &r.trace)?;
                value["trace_file"] = json!(path.display().to_string());
            }
            let code = match r.outcome {
                DensityOutcome::Inconclusive { .. } => 2,
                _ => 0,
            };
            Ok((Report::Json(with(l.header("density"), "result", value)), code))
        }
        Command::Trace { common, set, every } => {
            let l = load(&common)?;
            let ts = &l.scenario.ts;
            let name = need(set.or_else(|| l.scenario.file.density.set.clone()), "--set")?;
            let s = l.scenario.set(&name)?;
            let every = every
                .or_else(|| l.scenario.file.density.every.as_ref().map(num_text))
                .map(|e| num(&e, "--every"))
                .transpose()?;
            let grid: Vec<Real> = match every {
                Some(step) if step > Real::zero() => {
                    let h = l.settings.horizon(ts);
                    let mut g = Vec::new();
                    let mut t = ts.t0() + step;
                    while t <= h {
                        if let Some(x) = ts.floor_in(&t) {
                            if g.last().is_none_or(|p| *p < x) && x > ts.t0() {
                                g.push(x);
                            }
                        }
                        t = t + step;
                    }
                    g
                }
                Some(_) => return Err(Error::config("--every", "must be positive")),
                None => default_grid(ts, &l.settings).into_iter().map(|(_, t)| t).collect(),
            };
            let trace = density_trace(ts, &s, &grid, &l.settings.resolve)?;
            let out = common.out.clone().or_else(|| l.scenario.file.density.out.clone().map(PathBuf::from));
            match out {
                Some(path) => {
                    write_csv(&path, &trace)?;
                    let value = json!({ "set": name, "points": trace.len(), "trace_file": path.display().to_string() });
                    Ok((Report::Json(with(l.header("trace"), "result", value)), 0))
                }
                None => Ok((Report::Text(trace_csv(&trace)), 0)),
            }
        }
        Command::Converge {
            common,
            mode,
            function,
            limit,
            set,
            n_max,
        } => {
            let l = load(&common)?;
            let c = &l.scenario.file.converge;
            let mode = match mode {
                Some(m) => m,
                None => match c.mode.as_deref() {
                    Some(m) => Mode::from_str(m, true).map_err(|_| Error::config("converge.mode", format!("unknown mode `{m}`")))?,
                    None => Mode::I,
                },
            };
            let fname = need(function.or_else(|| c.function.clone()), "--function")?;
            let f = l.scenario.function(&fname)?;
            let limit = match limit {
                Some(x) => Some(float(&x, "--limit")?),
                None => c.limit.as_ref().map(|n| float(&num_text(n), "converge.limit")).transpose()?,
            };
            let header = with(l.header("converge"), "function", &fname);
            let ts = &l.scenario.ts;
            let (value, code) = match mode {
                Mode::I => {
                    let v = i_converges(&f, need(limit, "--limit")?, &l.ideal()?, &l.settings)?;
                    (serde_json::to_value(&v).expect("serializable"), v.outcome.exit_code())
                }
                Mode::Stat => {
                    let v = statistical_converges(&f, need(limit, "--limit")?, ts, &l.settings)?;
                    (serde_json::to_value(&v).expect("serializable"), v.outcome.exit_code())
                }
                Mode::Istar => {
                    let m = set.or_else(|| c.set.clone()).map(|n| l.scenario.set(&n)).transpose()?;
                    let v = i_star_converges(&f, need(limit, "--limit")?, &l.ideal()?, m.as_ref(), &l.settings)?;
                    (serde_json::to_value(&v).expect("serializable"), v.outcome.exit_code())
                }
                Mode::Cauchy => {
                    let v = i_cauchy(&f, &l.ideal()?, &l.settings)?;
                    (serde_json::to_value(&v).expect("serializable"), v.outcome.exit_code())
                }
                Mode::Cluster => {
                    let levels = match &c.levels {
                        Some(ls) => ls.iter().map(|n| float(&num_text(n), "converge.levels")).collect::<Result<_>>()?,
                        None => default_level_grid(&f, ts, &l.settings)?,
                    };
                    let r = cluster_points(&f, &l.ideal()?, &levels, &l.settings)?;
                    (serde_json::to_value(&r).expect("serializable"), 0)
                }
                Mode::Bap => {
                    let n = n_max.or(c.n_max).unwrap_or(10);
                    let b = bap_transfer(&f, need(limit, "--limit")?, &l.ideal()?, n, &l.settings)?;
                    let code = b.verdict.outcome.exit_code();
                    (serde_json::to_value(&b).expect("serializable"), code)
                }
            };
            let header = with(header, "mode", format!("{mode:?}").to_lowercase());
            Ok((Report::Json(with(header, "result", value)), code))
        }
        Command::Cluster {
            common,
            function,
            levels,
        } => {
            let l = load(&common)?;
            let c = &l.scenario.file.converge;
            let fname = need(function.or_else(|| c.function.clone()), "--function")?;
            let f = l.scenario.function(&fname)?;
            let levels = match levels {
                Some(ls) => ls.iter().map(|x| float(x, "--levels")).collect::<Result<_>>()?,
                None => match &c.levels {
                    Some(ls) => ls.iter().map(|n| float(&num_text(n), "converge.levels")).collect::<Result<_>>()?,
                    None => default_level_grid(&f, &l.scenario.ts, &l.settings)?,
                },
            };
            let r = cluster_points(&f, &l.ideal()?, &levels, &l.settings)?;
            let header = with(l.header("cluster"), "function", &fname);
            Ok((Report::Json(with(header, "result", r)), 0))
        }
        Command::Selftest => {
            let checks = selftest()?;
            let passed = checks.iter().all(|c| c.pass);
            let report = json!({ "command": "selftest", "passed": passed, "checks": checks });
            Ok((Report::Json(report), if passed { 0 } else { 1 }))
        }
        Command::Props { seed, out } => {
            let report = run_props(seed, &suite_settings())?;
            let code = if report.passed() { 0 } else { 1 };
            let value = json!({ "command": "props", "report": report });
            match out {
                Some(path) => {
                    std::fs::write(&path, serde_json::to_string_pretty(&value).expect("serializable") + "\n")?;
                    let summary = json!({
                        "command": "props",
                        "report_file": path.display().to_string(),
                        "overall": report.overall,
                        "inconclusive_rate": report.inconclusive_rate,
                    });
                    Ok((Report::Json(summary), code))
                }
                None => Ok((Report::Json(value), code)),
            }
        }
    }
}

fn num_text(n: &Num) -> String {
    match n {
        Num::Int(i) => i.to_string(),
        Num::Float(x) => format!("{x:e}"),
        Num::Text(s) => s.clone(),
    }
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

fn check(name: &'static str, expected: impl ToString, got: impl ToString, pass: bool) -> Check {
    Check {
        name,
        expected: expected.to_string(),
        got: got.to_string(),
        pass,
    }
}

/// Reference values every build must reproduce.
pub fn selftest() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let grid = TimeScale::uniform(q(1, 1), q(1, 1))?;
    let doubling = TimeScale::geometric(q(1, 1), q(2, 1))?;
    let ray = TimeScale::continuous(q(1, 1))?;
    let r = Real::int;

    let closed = measure_interval(&grid, IntervalKind::Closed, &r(2), &r(5))?.value;
    out.push(check("grid closed [2,5]", 4, closed, closed == r(4)));
    let lr = measure_interval(&doubling, IntervalKind::HalfOpenLr, &r(2), &r(8))?.value;
    out.push(check("doubling [2,8)", 6, lr, lr == r(6)));
    let rl = measure_interval(&doubling, IntervalKind::HalfOpenRl, &r(2), &r(8))?.value;
    out.push(check("doubling (2,8]", 12, rl, rl == r(12)));
    let pt = measure_point(&doubling, &r(4))?.value;
    out.push(check("doubling point 4", 4, pt, pt == r(4)));

    let settings = Settings::default().with_t_max(r(1_000_000));
    let evens = TsSet::indices(IndexPattern::evens());
    let squares = TsSet::indices(IndexPattern::Squares);
    let d = density(&grid, &evens, &settings)?.outcome;
    let near_half = match &d {
        DensityOutcome::Exact { value } => value.to_f64() == 0.5,
        DensityOutcome::Estimated { value, halfwidth } => (value - 0.5).abs() <= halfwidth.max(1e-3),
        _ => false,
    };
    out.push(check("density of evens", "0.5", format!("{d:?}"), near_half));
    let d = density(&grid, &squares, &settings)?.outcome;
    let zero = match &d {
        DensityOutcome::Exact { value } => value.is_zero(),
        DensityOutcome::Estimated { value, halfwidth } => value + halfwidth < settings.density.tol,
        _ => false,
    };
    out.push(check("density of squares", "0", format!("{d:?}"), zero));

    let odd_powers = TsSet::indices(IndexPattern::Arithmetic { first: 1, step: 2 });
    let d = density(&doubling, &odd_powers, &Settings::default())?.outcome;
    let split = matches!(d, DensityOutcome::DoesNotExist { liminf, limsup }
        if (liminf - 1.0 / 3.0).abs() < 0.02 && (limsup - 2.0 / 3.0).abs() < 0.02);
    out.push(check("even powers on the doubling grid", "no density, 1/3 and 2/3", format!("{d:?}"), split));

    let n = 100_000u64;
    let stat = Settings::default().with_t_max(r(n as i128));
    for (s, converges) in [(&squares, true), (&evens, false)] {
        let f = MeasurableFn::indicator(s.clone());
        let v = statistical_converges(&f, 0.0, &grid, &stat)?.outcome;
        let seq = SequenceView::from_fn(&f, &grid, n)?;
        let brute = statistical_limit_bruteforce(&seq.values, 0.0, 0.5, n, BRUTEFORCE_TOL)?.holds;
        let pass = (v == Outcome::Converges { limit: 0.0 }) == converges && brute == converges;
        let label = if converges { "Converges(0)" } else { "Diverges" };
        out.push(check(
            if converges { "statistical limit of squares" } else { "statistical limit of evens" },
            label,
            format!("{v:?}, brute force holds = {brute}"),
            pass,
        ));
    }

    let inv = MeasurableFn::reciprocal();
    let b = bap_transfer(&inv, 0.0, &Ideal::bounded(&ray), 10, &Settings::default())?;
    out.push(check(
        "transfer of 1/t along the bounded ideal",
        "Converges(0)",
        format!("{:?}", b.verdict.outcome),
        b.verdict.outcome == Outcome::Converges { limit: 0.0 },
    ));

    let family = vec![
        TsSet::empty(),
        TsSet::interval(r(1), r(5)),
        squares.clone(),
        evens.clone(),
        TsSet::ray(r(100)),
        TsSet::points([r(3), r(7)]),
    ];
    for ideal in [Ideal::bounded(&grid), Ideal::density_zero(&grid), Ideal::measure_zero(&grid)] {
        let rep = check_ideal_axioms(&ideal, &family, &stat)?;
        let name = match ideal.name() {
            "bounded" => "axioms of the bounded ideal",
            "density_zero" => "axioms of the density-zero ideal",
            _ => "axioms of the measure-zero ideal",
        };
        out.push(check(name, "no violations", format!("{} violations", rep.violations.len()), rep.passed()));
    }
    Ok(out)
}
