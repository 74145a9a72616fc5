//! TOML scenario files: a time scale, named sets and functions, an ideal and
//! parameters for the commands.
//!
//! ```toml
//! [timescale]
//! kind = "uniform"
//! t0 = 1
//! step = 1
//!
//! [sets.sq]
//! pattern = "squares"
//!
//! [functions]
//! f = "ind(sq) + 1/t"
//!
//! [ideal]
//! type = "density_zero"
//!
//! [params]
//! eps_grid = [1, 0.5, 0.25]
//!
//! [converge]
//! function = "f"
//! limit = 0
//! ```
//!
//! Set and function names resolve lazily, so declaration order is free;
//! cycles are reported as configuration errors.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::func::MeasurableFn;
use crate::ideal::Ideal;
use crate::parse::parse_function;
use crate::real::{parse_q, Real, Q};
use crate::set::{IndexPattern, TsSet};
use crate::settings::Settings;
use crate::timescale::{Component, Piece, TimeScale};

/// A number written as an integer, a float or a string such as `"1/3"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    fn exact(&self, field: &str) -> Result<Q> {
        let text = match self {
            Num::Int(n) => return Ok(Q::from_integer(*n as i128)),
            Num::Float(x) => format!("{x:e}"),
            Num::Text(s) => s.clone(),
        };
        parse_q(&text).map_err(|e| Error::config(field, e.to_string()))
    }

    fn float(&self, field: &str) -> Result<f64> {
        Ok(match self {
            Num::Int(n) => *n as f64,
            Num::Float(x) => *x,
            Num::Text(_) => crate::real::q_to_f64(&self.exact(field)?),
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeScaleSpec {
    pub kind: String,
    pub t0: Option<Num>,
    pub step: Option<Num>,
    pub ratio: Option<Num>,
    pub on: Option<Num>,
    pub gap: Option<Num>,
    /// Bounded pieces `[lo, hi]` of a hybrid scale.
    #[serde(default)]
    pub pieces: Vec<[Num; 2]>,
    pub tail: Option<Box<TimeScaleSpec>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    pub pattern: String,
    pub first: Option<u64>,
    pub step: Option<u64>,
    pub base: Option<u64>,
    pub indices: Option<Vec<u64>>,
    pub start: Option<Num>,
    pub period: Option<Num>,
    pub on: Option<Num>,
    pub from: Option<Num>,
    pub lo: Option<Num>,
    pub hi: Option<Num>,
    pub points: Option<Vec<Num>>,
    pub function: Option<String>,
    pub level: Option<Num>,
    pub eps: Option<Num>,
    /// Operand set names for the algebraic patterns.
    pub of: Option<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub eps_grid: Option<Vec<Num>>,
    pub t_max: Option<Num>,
    pub tol_density: Option<f64>,
    pub budget: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub interval: Option<String>,
    pub kind: Option<String>,
    pub set: Option<String>,
    pub t: Option<Num>,
    pub point: Option<Num>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySpec {
    pub set: Option<String>,
    pub out: Option<String>,
    /// Trace on `t0, t0 + every, ...` up to the horizon instead of the default grid.
    pub every: Option<Num>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeSpec {
    pub function: Option<String>,
    pub limit: Option<Num>,
    pub mode: Option<String>,
    /// Restriction set for `istar`.
    pub set: Option<String>,
    pub n_max: Option<usize>,
    pub levels: Option<Vec<Num>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub timescale: TimeScaleSpec,
    #[serde(default)]
    pub sets: BTreeMap<String, SetSpec>,
    #[serde(default)]
    pub functions: BTreeMap<String, String>,
    pub ideal: Option<IdealSpec>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub measure: MeasureSpec,
    #[serde(default)]
    pub density: DensitySpec,
    #[serde(default)]
    pub converge: ConvergeSpec,
}

/// A parsed scenario with its time scale built and names resolvable.
#[derive(Debug)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub ts: TimeScale,
    src: String,
    sets: RefCell<HashMap<String, TsSet>>,
    functions: RefCell<HashMap<String, MeasurableFn>>,
    /// Names under resolution, for cycle detection.
    stack: RefCell<Vec<String>>,
}

/// 1-based line of the section header `[name]`.
fn section_line(src: &str, name: &str) -> Option<usize> {
    let header = format!("[{name}]");
    src.lines().position(|l| l.trim() == header).map(|i| i + 1)
}

/// 1-based line of the first assignment to `key`.
fn key_line(src: &str, key: &str) -> Option<usize> {
    src.lines()
        .position(|l| {
            l.trim_start()
                .strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}

impl Scenario {
    pub fn from_toml(src: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(src).map_err(|e| {
            let line = e.span().map(|s| src[..s.start].matches('\n').count() + 1);
            Error::config(
                line.map_or("scenario".into(), |l| format!("line {l}")),
                e.message().to_owned(),
            )
        })?;
        let ts = build_timescale(&file.timescale, "timescale").map_err(|e| locate(section_line(src, "timescale"), e))?;
        let sc = Scenario {
            file,
            ts,
            src: src.to_owned(),
            sets: RefCell::default(),
            functions: RefCell::default(),
            stack: RefCell::default(),
        };
        for name in sc.file.sets.keys() {
            sc.set(name)?;
        }
        for name in sc.file.functions.keys() {
            sc.function(name)?;
        }
        Ok(sc)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)?;
        Self::from_toml(&src)
    }

    /// Settings with the `[params]` section applied.
    pub fn settings(&self) -> Result<Settings> {
        let p = &self.file.params;
        let mut s = Settings::default();
        if let Some(grid) = &p.eps_grid {
            s.eps_grid = grid
                .iter()
                .map(|e| e.float("params.eps_grid"))
                .collect::<Result<_>>()?;
        }
        if let Some(t) = &p.t_max {
            s = s.with_t_max(Real::Exact(t.exact("params.t_max")?));
        }
        if let Some(tol) = p.tol_density {
            s.density.tol = tol;
        }
        if let Some(b) = p.budget {
            s = s.with_budget(b);
        }
        Ok(s)
    }

    pub fn ideal(&self, settings: &Settings) -> Result<Ideal> {
        let Some(spec) = &self.file.ideal else {
            return Err(Error::config("ideal", "no [ideal] section"));
        };
        let ts = &self.ts;
        let ideal = match spec.kind.as_str() {
            "measure_zero" => Ideal::measure_zero(ts),
            "density_zero" => Ideal::density_zero(ts),
            "bounded" => Ideal::bounded(ts),
            "generated" => {
                let gens = spec.generators.iter().map(|g| self.set(g)).collect::<Result<_>>()?;
                Ideal::generated(ts, gens, settings)?
            }
            other => {
                return Err(locate(
                    section_line(&self.src, "ideal"),
                    Error::config("ideal.type", format!("unknown ideal `{other}`")),
                ))
            }
        };
        Ok(ideal)
    }

    fn enter(&self, name: &str, field: &str) -> Result<()> {
        let mut stack = self.stack.borrow_mut();
        if stack.iter().any(|n| n == name) {
            let mut cycle = stack.clone();
            cycle.push(name.to_owned());
            return Err(Error::config(field, format!("cyclic definition: {}", cycle.join(" -> "))));
        }
        stack.push(name.to_owned());
        Ok(())
    }

    fn leave(&self) {
        self.stack.borrow_mut().pop();
    }

    pub fn set(&self, name: &str) -> Result<TsSet> {
        if let Some(s) = self.sets.borrow().get(name) {
            return Ok(s.clone());
        }
        let field = format!("sets.{name}");
        let Some(spec) = self.file.sets.get(name) else {
            return Err(Error::config(field, "no such set"));
        };
        self.enter(name, &field)?;
        let built = self.build_set(spec, &field);
        self.leave();
        let s = built
            .and_then(|s| {
                s.validate(&self.ts).map_err(|e| Error::config(&field, e.to_string()))?;
                Ok(s.named(name))
            })
            .map_err(|e| locate(section_line(&self.src, &field), e))?;
        self.sets.borrow_mut().insert(name.to_owned(), s.clone());
        Ok(s)
    }

    pub fn function(&self, name: &str) -> Result<MeasurableFn> {
        if let Some(f) = self.functions.borrow().get(name) {
            return Ok(f.clone());
        }
        let field = format!("functions.{name}");
        let Some(src) = self.file.functions.get(name) else {
            return Err(Error::config(field, "no such function"));
        };
        self.enter(name, &field)?;
        let parsed = parse_function(src, &|s| self.set(s));
        self.leave();
        let f = parsed
            .map(|f| f.named(name))
            .map_err(|e| match e {
                Error::Config { .. } => e,
                other => Error::config(&field, other.to_string()),
            })
            .map_err(|e| locate(key_line(&self.src, name), e))?;
        self.functions.borrow_mut().insert(name.to_owned(), f.clone());
        Ok(f)
    }

    fn build_set(&self, spec: &SetSpec, field: &str) -> Result<TsSet> {
        let need = |v: &Option<Num>, key: &str| -> Result<Q> {
            v.as_ref()
                .ok_or_else(|| Error::config(format!("{field}.{key}"), format!("pattern `{}` needs `{key}`", spec.pattern)))?
                .exact(&format!("{field}.{key}"))
        };
        let operands = || -> Result<Vec<TsSet>> {
            let names = spec
                .of
                .as_ref()
                .ok_or_else(|| Error::config(format!("{field}.of"), format!("pattern `{}` needs `of`", spec.pattern)))?;
            names.iter().map(|n| self.set(n)).collect()
        };
        let binary = |what: &str| -> Result<(TsSet, TsSet)> {
            let mut xs = operands()?;
            if xs.len() != 2 {
                return Err(Error::config(format!("{field}.of"), format!("`{what}` takes exactly two sets")));
            }
            let b = xs.pop().expect("two");
            Ok((xs.pop().expect("two"), b))
        };
        Ok(match spec.pattern.as_str() {
            "arithmetic" => TsSet::indices(IndexPattern::Arithmetic {
                first: spec.first.unwrap_or(1),
                step: spec.step.unwrap_or(1).max(1),
            }),
            "evens" => TsSet::indices(IndexPattern::evens()),
            "squares" => TsSet::indices(IndexPattern::Squares),
            "cubes" => TsSet::indices(IndexPattern::Cubes),
            "primes" => TsSet::indices(IndexPattern::Primes),
            "powers" => TsSet::indices(IndexPattern::Powers {
                base: spec.base.unwrap_or(2),
            }),
            "indices" => TsSet::indices(IndexPattern::explicit(
                spec.indices
                    .clone()
                    .ok_or_else(|| Error::config(format!("{field}.indices"), "pattern `indices` needs `indices`"))?,
            )),
            "blocks" => TsSet::blocks(need(&spec.start, "start")?, need(&spec.period, "period")?, need(&spec.on, "on")?)
                .map_err(|e| Error::config(field, e.to_string()))?,
            "points" | "explicit" => {
                let pts = spec
                    .points
                    .as_ref()
                    .ok_or_else(|| Error::config(format!("{field}.points"), "pattern needs `points`"))?;
                let xs = pts
                    .iter()
                    .map(|p| p.exact(&format!("{field}.points")).map(Real::Exact))
                    .collect::<Result<Vec<_>>>()?;
                TsSet::points(xs)
            }
            "ray" => TsSet::ray(Real::Exact(need(&spec.from, "from")?)),
            "interval" => {
                let (lo, hi) = (need(&spec.lo, "lo")?, need(&spec.hi, "hi")?);
                if lo > hi {
                    return Err(Error::config(format!("{field}.lo"), format!("lo = {lo} exceeds hi = {hi}")));
                }
                TsSet::explicit(vec![Component::closed(Real::Exact(lo), Real::Exact(hi))])
            }
            "exceed" => {
                let name = spec
                    .function
                    .as_ref()
                    .ok_or_else(|| Error::config(format!("{field}.function"), "pattern `exceed` needs `function`"))?;
                let f = self.function(name)?;
                let level = spec.level.as_ref().map_or(Ok(0.0), |l| l.float(&format!("{field}.level")))?;
                let eps = spec
                    .eps
                    .as_ref()
                    .ok_or_else(|| Error::config(format!("{field}.eps"), "pattern `exceed` needs `eps`"))?
                    .float(&format!("{field}.eps"))?;
                TsSet::exceedance(f, level, eps).map_err(|e| Error::config(format!("{field}.eps"), e.to_string()))?
            }
            "union" => TsSet::union_all(operands()?),
            "intersection" => operands()?
                .into_iter()
                .reduce(|a, b| a.intersection(&b))
                .unwrap_or_else(TsSet::full),
            "complement" => {
                let xs = operands()?;
                if xs.len() != 1 {
                    return Err(Error::config(format!("{field}.of"), "`complement` takes exactly one set"));
                }
                xs[0].complement()
            }
            "difference" => {
                let (a, b) = binary("difference")?;
                a.difference(&b)
            }
            other => return Err(Error::config(format!("{field}.pattern"), format!("unknown pattern `{other}`"))),
        })
    }
}

/// Prefixes a line number to a configuration error that has none yet.
fn locate(line: Option<usize>, e: Error) -> Error {
    match (line, e) {
        (Some(l), Error::Config { field, msg }) if !field.starts_with("line ") => Error::Config {
            field: format!("line {l}: {field}"),
            msg,
        },
        (_, e) => e,
    }
}

fn build_timescale(spec: &TimeScaleSpec, field: &str) -> Result<TimeScale> {
    let get = |v: &Option<Num>, key: &str| -> Result<Q> {
        v.as_ref()
            .ok_or_else(|| Error::config(format!("{field}.{key}"), format!("kind `{}` needs `{key}`", spec.kind)))?
            .exact(&format!("{field}.{key}"))
    };
    let t0 = || get(&spec.t0, "t0");
    let wrap = |r: Result<TimeScale>| r.map_err(|e| Error::config(field, e.to_string()));
    match spec.kind.as_str() {
        "continuous" | "ray" => wrap(TimeScale::continuous(t0()?)),
        "uniform" | "grid" => wrap(TimeScale::uniform(t0()?, get(&spec.step, "step")?)),
        "geometric" => wrap(TimeScale::geometric(t0()?, get(&spec.ratio, "ratio")?)),
        "periodic" => wrap(TimeScale::periodic(t0()?, get(&spec.on, "on")?, get(&spec.gap, "gap")?)),
        "hybrid" => {
            let pieces = spec
                .pieces
                .iter()
                .map(|[lo, hi]| {
                    Ok(Piece {
                        lo: lo.exact(&format!("{field}.pieces"))?,
                        hi: hi.exact(&format!("{field}.pieces"))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let tail = spec
                .tail
                .as_ref()
                .ok_or_else(|| Error::config(format!("{field}.tail"), "kind `hybrid` needs `tail`"))?;
            let tail = build_timescale(tail, &format!("{field}.tail"))?;
            wrap(TimeScale::hybrid(pieces, tail))
        }
        other => Err(Error::config(format!("{field}.kind"), format!("unknown time scale `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
[timescale]
kind = "uniform"
t0 = 1
step = 1

[sets.sq]
pattern = "squares"

[sets.rest]
pattern = "complement"
of = ["sq"]

[sets.far]
pattern = "exceed"
function = "g"
eps = "1/4"

[functions]
f = "ind(sq) + 1/t"
g = "1/t"

[ideal]
type = "density_zero"

[params]
eps_grid = [1, 0.5, "1/4"]
t_max = 1000
"#;

    #[test]
    fn resolves_names_in_any_order() {
        let sc = Scenario::from_toml(BASIC).unwrap();
        let f = sc.function("f").unwrap();
        assert_eq!(f.eval(&sc.ts, &Real::int(9)).unwrap(), 1.0 + 1.0 / 9.0);
        assert!(!sc.set("rest").unwrap().contains(&sc.ts, &Real::int(4)).unwrap());
        assert!(sc.set("far").unwrap().contains(&sc.ts, &Real::int(4)).unwrap());
        let s = sc.settings().unwrap();
        assert_eq!(s.eps_grid, vec![1.0, 0.5, 0.25]);
        assert_eq!(s.horizon(&sc.ts), Real::int(1000));
        assert_eq!(sc.ideal(&s).unwrap().name(), "density_zero");
    }

    #[test]
    fn reports_bad_references_with_lines() {
        let src = BASIC.replace(r#"of = ["sq"]"#, r#"of = ["nope"]"#);
        let err = Scenario::from_toml(&src).unwrap_err().to_string();
        assert!(err.contains("line 10"), "{err}");
        assert!(err.contains("nope"), "{err}");

        let err = Scenario::from_toml(&BASIC.replace("step = 1", "step = 0")).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");

        let err = Scenario::from_toml(&BASIC.replace("kind = \"uniform\"", "knd = \"uniform\"")).unwrap_err();
        assert!(matches!(err, Error::Config { .. }), "{err}");
    }

    #[test]
    fn detects_cycles() {
        let src = r#"
[timescale]
kind = "continuous"
t0 = 1

[sets.a]
pattern = "exceed"
function = "f"
eps = 0.5

[functions]
f = "ind(a)"
"#;
        let err = Scenario::from_toml(src).unwrap_err().to_string();
        assert!(err.contains("cyclic"), "{err}");
    }

    #[test]
    fn builds_every_time_scale_kind() {
        for (kind, extra) in [
            ("continuous", ""),
            ("uniform", "step = \"1/2\""),
            ("geometric", "ratio = 2"),
            ("periodic", "on = 1\ngap = 1"),
        ] {
            let src = format!("[timescale]\nkind = \"{kind}\"\nt0 = 1\n{extra}\n");
            Scenario::from_toml(&src).unwrap();
        }
        let src = "[timescale]\nkind = \"hybrid\"\npieces = [[1, 2], [3, 3]]\n[timescale.tail]\nkind = \"uniform\"\nt0 = 5\nstep = 1\n";
        let sc = Scenario::from_toml(src).unwrap();
        assert!(sc.ts.contains(&Real::int(3)));
        assert!(!sc.ts.contains(&Real::int(4)));
    }
}
