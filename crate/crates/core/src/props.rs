//! Property suite: the structural laws of ideal convergence checked over a
//! built-in corpus of functions, time scales and ideals.
//!
//! Every case ends as `held`, `violated`, `inconclusive` (some verdict it
//! depends on was undecided) or `vacuous` (its hypothesis is decisively
//! false). The report is a pure function of the seed.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::convergence::{bap_transfer, cluster_points, i_cauchy, i_converges, i_star_converges, Outcome};
use crate::error::{Error, Result};
use crate::func::MeasurableFn;
use crate::ideal::Ideal;
use crate::real::q;
use crate::set::{IndexPattern, TsSet};
use crate::settings::Settings;
use crate::timescale::TimeScale;

pub const PROPERTIES: [&str; 8] = [
    "uniqueness",
    "linearity",
    "istar_implies_i",
    "continuity",
    "squeeze",
    "i_implies_cauchy",
    "cauchy_cluster_implies_convergent",
    "bap_round_trip",
];

/// Settings used by the suite: tolerances `1..2^-10`, horizons of roughly
/// `2^15` on the ray, `2^17` on the unit grid and `2^40` on the doubling grid.
pub fn suite_settings() -> Settings {
    Settings::default()
        .with_eps_grid((0..=10).map(|k| 0.5f64.powi(k)).collect())
        .with_budget((1u64 << 17) as f64)
}

/// A corpus function with the limits probed for it.
#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub f: MeasurableFn,
    pub limits: Vec<f64>,
}

/// The three time scales of the suite.
pub fn scales() -> Vec<(&'static str, TimeScale)> {
    vec![
        ("ray", TimeScale::continuous(q(1, 1)).expect("valid")),
        ("grid", TimeScale::uniform(q(1, 1), q(1, 1)).expect("valid")),
        ("doubling", TimeScale::geometric(q(1, 1), q(2, 1)).expect("valid")),
    ]
}

pub fn ideals(ts: &TimeScale) -> Vec<Ideal> {
    vec![Ideal::measure_zero(ts), Ideal::density_zero(ts), Ideal::bounded(ts)]
}

/// A set of density one half and a sparse set, adapted to `ts`.
fn half_and_sparse(ts: &TimeScale) -> (TsSet, TsSet) {
    if ts.is_discrete() {
        let half = if matches!(ts.kind(), crate::timescale::Kind::GeometricGrid { .. }) {
            IndexPattern::Arithmetic { first: 1, step: 2 }
        } else {
            IndexPattern::evens()
        };
        (TsSet::indices(half).named("half"), TsSet::indices(IndexPattern::Squares).named("sparse"))
    } else {
        (
            TsSet::blocks(q(2, 1), q(2, 1), q(1, 1)).expect("valid").named("half"),
            TsSet::blocks(q(3, 1), q(16, 1), q(1, 1)).expect("valid").named("sparse"),
        )
    }
}

/// At least twenty functions, each with its candidate limits.
pub fn corpus(ts: &TimeScale) -> Vec<Entry> {
    let t = MeasurableFn::identity;
    let c = MeasurableFn::constant;
    let inv = MeasurableFn::reciprocal;
    let (half, sparse) = half_and_sparse(ts);
    let ind = MeasurableFn::indicator;
    let window = TsSet::interval(1.into(), 10.into());
    let tail = TsSet::ray(16.into());
    let list: Vec<(&str, MeasurableFn, Vec<f64>)> = vec![
        ("0.5", c(0.5), vec![0.5]),
        ("1/t", inv(), vec![0.0]),
        ("2+1/t", c(2.0) + inv(), vec![2.0]),
        ("1/t^2", inv() * inv(), vec![0.0]),
        ("exp(-t)", (-t()).exp(), vec![0.0]),
        ("sin(t)/t", t().sin() * inv(), vec![0.0]),
        ("1+cos(t)/t", c(1.0) + t().cos() * inv(), vec![1.0]),
        ("t/(t+1)", t().div(&(t() + c(1.0))).expect("static"), vec![1.0]),
        ("-1/t", -inv(), vec![0.0]),
        ("1-2/t", c(1.0) - inv().scale(2.0), vec![1.0]),
        ("sin(t)", t().sin(), vec![0.0]),
        ("cos(t)", t().cos(), vec![0.0]),
        ("sin(t)^2", t().sin() * t().sin(), vec![0.5]),
        ("ind([1,10])", ind(window), vec![0.0]),
        ("ind([16,inf))", ind(tail), vec![1.0]),
        ("ind(half)", ind(half.clone()), vec![0.0, 1.0]),
        ("1/t+ind(half)", inv() + ind(half.clone()), vec![0.0]),
        ("ind(half)/t", ind(half) * inv(), vec![0.0]),
        ("(1+sin(t))/t", (c(1.0) + t().sin()) * inv(), vec![0.0]),
        ("1/t+ind(sparse)", inv() + ind(sparse.clone()), vec![0.0]),
        ("ind(sparse)", ind(sparse), vec![0.0]),
        ("3-exp(-t)sin(t)", c(3.0) - (-t()).exp() * t().sin(), vec![3.0]),
        ("|sin(t)|/t", t().sin().abs() * inv(), vec![0.0]),
    ];
    list.into_iter()
        .map(|(name, f, mut limits)| {
            limits.push(limits[0] + 0.5);
            Entry {
                name: name.into(),
                f: f.named(name),
                limits,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Held,
    Violated,
    Inconclusive,
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Case {
    pub property: &'static str,
    pub scale: &'static str,
    pub ideal: String,
    pub subject: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub held: usize,
    pub violated: usize,
    pub inconclusive: usize,
    pub vacuous: usize,
}

impl Tally {
    fn add(&mut self, s: Status) {
        match s {
            Status::Held => self.held += 1,
            Status::Violated => self.violated += 1,
            Status::Inconclusive => self.inconclusive += 1,
            Status::Vacuous => self.vacuous += 1,
        }
    }

    /// Cases whose verdict was decided either way or left undecided.
    pub fn tested(&self) -> usize {
        self.held + self.violated + self.inconclusive
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub property: &'static str,
    pub scale: &'static str,
    pub ideal: String,
    #[serde(flatten)]
    pub tally: Tally,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropsReport {
    pub seed: u64,
    pub eps_grid: Vec<f64>,
    pub corpus_size: usize,
    pub rows: Vec<Row>,
    pub totals: BTreeMap<&'static str, Tally>,
    pub overall: Tally,
    /// Inconclusive cases over all non-vacuous cases.
    pub inconclusive_rate: f64,
    pub violations: Vec<Case>,
    pub inconclusive: Vec<Case>,
}

impl PropsReport {
    pub fn passed(&self) -> bool {
        self.overall.violated == 0
    }
}

/// Verdicts shared by several properties for one (scale, ideal, function).
struct Table {
    /// `(limit, outcome)` for every probed limit.
    probes: Vec<(f64, Outcome)>,
    cauchy: Outcome,
}

impl Table {
    fn limit(&self) -> Option<f64> {
        self.probes.iter().find_map(|(_, o)| o.limit())
    }

    fn undecided(&self) -> bool {
        self.probes.iter().any(|(_, o)| *o == Outcome::Inconclusive)
    }
}

/// Outcome of `i_converges`, with resolution failures mapped to `Inconclusive`.
fn converge(f: &MeasurableFn, limit: f64, ideal: &Ideal, settings: &Settings) -> Result<Outcome> {
    match i_converges(f, limit, ideal, settings) {
        Ok(v) => Ok(v.outcome),
        Err(Error::ResolutionFailure { .. }) => Ok(Outcome::Inconclusive),
        Err(e) => Err(e),
    }
}

fn consequent(o: &Outcome, want: f64) -> (Status, String) {
    match o {
        Outcome::Converges { limit } if (limit - want).abs() <= 1e-9 * (1.0 + want.abs()) => (Status::Held, String::new()),
        Outcome::Inconclusive => (Status::Inconclusive, format!("undecided at {want}")),
        other => (Status::Violated, format!("expected convergence to {want}, got {other:?}")),
    }
}

struct Ctx<'a> {
    scale: &'static str,
    ideal: &'a Ideal,
    entries: &'a [Entry],
    tables: &'a [Table],
    settings: &'a Settings,
}

impl Ctx<'_> {
    fn case(&self, property: &'static str, subject: String, (status, detail): (Status, String)) -> Case {
        Case {
            property,
            scale: self.scale,
            ideal: self.ideal.name().to_owned(),
            subject,
            status,
            detail,
        }
    }
}

/// A task producing one case. Boxed so every property can share one parallel pass.
type Job<'a> = Box<dyn Fn(&Ctx<'_>) -> Result<Vec<Case>> + Send + Sync + 'a>;

fn uniqueness(ctx: &Ctx<'_>, i: usize) -> Result<Case> {
    let tab = &ctx.tables[i];
    let tol = 2.0 * ctx.settings.eps_min();
    let conv: Vec<f64> = tab.probes.iter().filter_map(|(_, o)| o.limit()).collect();
    let spread = conv.iter().any(|a| conv.iter().any(|b| (a - b).abs() > tol));
    let r = if spread {
        (Status::Violated, format!("converges to each of {conv:?}"))
    } else if tab.undecided() {
        (Status::Inconclusive, "some probed limit undecided".into())
    } else {
        (Status::Held, String::new())
    };
    Ok(ctx.case("uniqueness", ctx.entries[i].name.clone(), r))
}

fn linearity(ctx: &Ctx<'_>, i: usize, j: usize, alpha: f64) -> Result<Vec<Case>> {
    let (Some(l), Some(m)) = (ctx.tables[i].limit(), ctx.tables[j].limit()) else {
        return Ok(Vec::new());
    };
    let (f, g) = (&ctx.entries[i].f, &ctx.entries[j].f);
    let subject = |op: &str| format!("{} {op} {}", ctx.entries[i].name, ctx.entries[j].name);
    let sum = converge(&(f.clone() + g.clone()), l + m, ctx.ideal, ctx.settings)?;
    let prod = converge(&(f.clone() * g.clone()), l * m, ctx.ideal, ctx.settings)?;
    let scaled = converge(&f.scale(alpha), alpha * l, ctx.ideal, ctx.settings)?;
    Ok(vec![
        ctx.case("linearity", subject("+"), consequent(&sum, l + m)),
        ctx.case("linearity", subject("*"), consequent(&prod, l * m)),
        ctx.case(
            "linearity",
            format!("{alpha} * {}", ctx.entries[i].name),
            consequent(&scaled, alpha * l),
        ),
    ])
}

fn istar_implies_i(ctx: &Ctx<'_>, i: usize) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (l, direct) in &ctx.tables[i].probes {
        let subject = format!("{} -> {l}", ctx.entries[i].name);
        let star = match i_star_converges(&ctx.entries[i].f, *l, ctx.ideal, None, ctx.settings) {
            Ok(v) => v.outcome,
            Err(Error::ResolutionFailure { .. }) => Outcome::Inconclusive,
            Err(e) => return Err(e),
        };
        let r = match star {
            Outcome::Converges { .. } => consequent(direct, *l),
            Outcome::Inconclusive => (Status::Inconclusive, "starred verdict undecided".into()),
            _ => (Status::Vacuous, String::new()),
        };
        out.push(ctx.case("istar_implies_i", subject, r));
    }
    Ok(out)
}

fn outer_maps() -> Vec<(&'static str, MeasurableFn, fn(f64) -> f64)> {
    let x = MeasurableFn::identity;
    vec![
        ("x^2", x() * x(), |v| v * v),
        ("sin(x)", x().sin(), f64::sin),
        ("|x|", x().abs(), f64::abs),
        ("2x+1", x().scale(2.0) + MeasurableFn::constant(1.0), |v| 2.0 * v + 1.0),
        ("exp(x)", x().exp(), f64::exp),
    ]
}

fn continuity(ctx: &Ctx<'_>, i: usize) -> Result<Vec<Case>> {
    let Some(l) = ctx.tables[i].limit() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for (name, h, g) in outer_maps() {
        let composed = ctx.entries[i].f.compose_outer(&h)?;
        let o = converge(&composed, g(l), ctx.ideal, ctx.settings)?;
        out.push(ctx.case(
            "continuity",
            format!("{name} of {}", ctx.entries[i].name),
            consequent(&o, g(l)),
        ));
    }
    Ok(out)
}

fn squeeze(ctx: &Ctx<'_>, i: usize) -> Result<Vec<Case>> {
    let Some(l) = ctx.tables[i].limit() else {
        return Ok(Vec::new());
    };
    let t = MeasurableFn::identity;
    let f = &ctx.entries[i].f;
    let mut out = Vec::new();
    for (wname, w) in [("1/t", MeasurableFn::reciprocal()), ("exp(-t)", (-t()).exp())] {
        let lower = converge(&(f.clone() - w.clone()), l, ctx.ideal, ctx.settings)?;
        let upper = converge(&(f.clone() + w.clone()), l, ctx.ideal, ctx.settings)?;
        let subject = format!("{} +- {wname}", ctx.entries[i].name);
        let r = match (lower.limit(), upper.limit()) {
            (Some(_), Some(_)) => {
                let middle = f.clone() + w * t().sin();
                consequent(&converge(&middle, l, ctx.ideal, ctx.settings)?, l)
            }
            _ if lower == Outcome::Inconclusive || upper == Outcome::Inconclusive => {
                (Status::Inconclusive, "outer verdict undecided".into())
            }
            _ => (Status::Vacuous, String::new()),
        };
        out.push(ctx.case("squeeze", subject, r));
    }
    Ok(out)
}

fn cauchy_status(o: &Outcome) -> (Status, String) {
    match o {
        Outcome::Cauchy => (Status::Held, String::new()),
        Outcome::Inconclusive => (Status::Inconclusive, "Cauchy search undecided".into()),
        other => (Status::Violated, format!("expected Cauchy, got {other:?}")),
    }
}

fn i_implies_cauchy(ctx: &Ctx<'_>, i: usize) -> Result<Vec<Case>> {
    let tab = &ctx.tables[i];
    if tab.limit().is_none() {
        return Ok(Vec::new());
    }
    Ok(vec![ctx.case("i_implies_cauchy", ctx.entries[i].name.clone(), cauchy_status(&tab.cauchy))])
}

fn cauchy_cluster(ctx: &Ctx<'_>, i: usize) -> Result<Case> {
    let tab = &ctx.tables[i];
    let subject = ctx.entries[i].name.clone();
    let r = match tab.cauchy {
        Outcome::Cauchy => {
            let levels: Vec<f64> = tab.probes.iter().map(|(l, _)| *l).collect();
            let report = match cluster_points(&ctx.entries[i].f, ctx.ideal, &levels, ctx.settings) {
                Ok(r) => Some(r),
                Err(Error::ResolutionFailure { .. }) => None,
                Err(e) => return Err(e),
            };
            match report {
                None => (Status::Inconclusive, "cluster search failed to resolve".into()),
                Some(r) if r.points.is_empty() && !r.inconclusive.is_empty() => {
                    (Status::Inconclusive, "cluster levels undecided".into())
                }
                Some(r) if r.points.is_empty() => (Status::Vacuous, String::new()),
                Some(r) => {
                    let at = |l: f64| tab.probes.iter().find(|(p, _)| *p == l).map(|(_, o)| o.clone());
                    let outs: Vec<(f64, Outcome)> = r
                        .points
                        .iter()
                        .map(|p| (p.level, at(p.level).expect("levels are probes")))
                        .collect();
                    if outs.iter().any(|(_, o)| o.limit().is_some()) {
                        (Status::Held, String::new())
                    } else if outs.iter().any(|(_, o)| *o == Outcome::Inconclusive) {
                        (Status::Inconclusive, "convergence at cluster point undecided".into())
                    } else {
                        (Status::Violated, format!("cluster points {outs:?} but no convergence"))
                    }
                }
            }
        }
        Outcome::Inconclusive => (Status::Inconclusive, "Cauchy search undecided".into()),
        _ => (Status::Vacuous, String::new()),
    };
    Ok(ctx.case("cauchy_cluster_implies_convergent", subject, r))
}

fn bap_round_trip(ctx: &Ctx<'_>, i: usize) -> Result<Vec<Case>> {
    let Some(l) = ctx.tables[i].limit() else {
        return Ok(Vec::new());
    };
    let r = match bap_transfer(&ctx.entries[i].f, l, ctx.ideal, 8, ctx.settings) {
        Ok(b) => consequent(&b.verdict.outcome, l),
        Err(Error::ResolutionFailure { .. }) => (Status::Inconclusive, "transfer failed to resolve".into()),
        Err(e) => (Status::Violated, e.to_string()),
    };
    Ok(vec![ctx.case("bap_round_trip", ctx.entries[i].name.clone(), r)])
}

fn table(entry: &Entry, ideal: &Ideal, settings: &Settings) -> Result<Table> {
    let probes = entry
        .limits
        .iter()
        .map(|&l| Ok((l, converge(&entry.f, l, ideal, settings)?)))
        .collect::<Result<_>>()?;
    let cauchy = match i_cauchy(&entry.f, ideal, settings) {
        Ok(v) => v.outcome,
        Err(Error::ResolutionFailure { .. }) => Outcome::Inconclusive,
        Err(e) => return Err(e),
    };
    Ok(Table { probes, cauchy })
}

/// Linearity pairs: `count` seeded picks of `(i, j, α)` among converging entries.
fn pairs(rng: &mut ChaCha8Rng, tables: &[Table], count: usize) -> Vec<(usize, usize, f64)> {
    const ALPHAS: [f64; 4] = [-2.0, -0.5, 0.5, 3.0];
    let conv: Vec<usize> = (0..tables.len()).filter(|&i| tables[i].limit().is_some()).collect();
    if conv.is_empty() {
        return Vec::new();
    }
    (0..count)
        .map(|_| {
            let i = conv[rng.gen_range(0..conv.len())];
            let j = conv[rng.gen_range(0..conv.len())];
            (i, j, ALPHAS[rng.gen_range(0..ALPHAS.len())])
        })
        .collect()
}

/// Linearity pairs drawn per (scale, ideal).
const PAIRS: usize = 6;

pub fn run_props(seed: u64, settings: &Settings) -> Result<PropsReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    let mut corpus_size = usize::MAX;
    for (scale, ts) in scales() {
        let entries = corpus(&ts);
        corpus_size = corpus_size.min(entries.len());
        for ideal in ideals(&ts) {
            let tables = entries
                .par_iter()
                .map(|e| table(e, &ideal, settings))
                .collect::<Result<Vec<_>>>()?;
            let ctx = Ctx {
                scale,
                ideal: &ideal,
                entries: &entries,
                tables: &tables,
                settings,
            };
            let mut jobs: Vec<Job<'_>> = Vec::new();
            for i in 0..entries.len() {
                jobs.push(Box::new(move |c| Ok(vec![uniqueness(c, i)?, cauchy_cluster(c, i)?])));
                jobs.push(Box::new(move |c| continuity(c, i)));
                jobs.push(Box::new(move |c| squeeze(c, i)));
                jobs.push(Box::new(move |c| i_implies_cauchy(c, i)));
                if ideal.flags().b_admissible {
                    jobs.push(Box::new(move |c| istar_implies_i(c, i)));
                }
                if ideal.bap_witness().is_some() {
                    jobs.push(Box::new(move |c| bap_round_trip(c, i)));
                }
            }
            for (i, j, alpha) in pairs(&mut rng, &tables, PAIRS) {
                jobs.push(Box::new(move |c| linearity(c, i, j, alpha)));
            }
            let found = jobs
                .par_iter()
                .map(|job| job(&ctx))
                .collect::<Result<Vec<Vec<Case>>>>()?;
            cases.extend(found.into_iter().flatten());
        }
    }
    Ok(summarize(seed, settings, corpus_size, cases))
}

fn summarize(seed: u64, settings: &Settings, corpus_size: usize, cases: Vec<Case>) -> PropsReport {
    let mut rows: BTreeMap<(usize, &'static str, String), Tally> = BTreeMap::new();
    let mut totals: BTreeMap<&'static str, Tally> = BTreeMap::new();
    let mut overall = Tally::default();
    let rank = |p: &str| PROPERTIES.iter().position(|x| *x == p).expect("known property");
    for c in &cases {
        rows.entry((rank(c.property), c.scale, c.ideal.clone()))
            .or_default()
            .add(c.status);
        totals.entry(c.property).or_default().add(c.status);
        overall.add(c.status);
    }
    let pick = |s: Status| -> Vec<Case> { cases.iter().filter(|c| c.status == s).cloned().collect() };
    let tested = overall.tested();
    PropsReport {
        seed,
        eps_grid: settings.eps_grid.clone(),
        corpus_size,
        rows: rows
            .into_iter()
            .map(|((p, scale, ideal), tally)| Row {
                property: PROPERTIES[p],
                scale,
                ideal,
                tally,
            })
            .collect(),
        totals,
        inconclusive_rate: if tested == 0 {
            0.0
        } else {
            overall.inconclusive as f64 / tested as f64
        },
        overall,
        violations: pick(Status::Violated),
        inconclusive: pick(Status::Inconclusive),
    }
}
