//! Decision procedures for ideal convergence and its relatives.
//!
//! Tolerances are tested over a finite grid, so `Converges` means "every
//! tested tolerance passed". Any `NotIn` answer is decisive for divergence;
//! `Unknown` answers and resolution failures lead to `Inconclusive`.

use serde::Serialize;

use crate::density::default_grid;
use crate::error::{Error, Result};
use crate::func::MeasurableFn;
use crate::ideal::{in_filter, Ideal, Membership};
use crate::real::Real;
use crate::set::{Bound, TsSet};
use crate::settings::Settings;
use crate::timescale::TimeScale;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Converges { limit: f64 },
    Diverges,
    Cauchy,
    NotCauchy,
    Inconclusive,
}

impl Outcome {
    /// 0 for a positive verdict, 1 for a negative one, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Converges { .. } | Outcome::Cauchy => 0,
            Outcome::Diverges | Outcome::NotCauchy => 1,
            Outcome::Inconclusive => 2,
        }
    }

    pub fn limit(&self) -> Option<f64> {
        match self {
            Outcome::Converges { limit } => Some(*limit),
            _ => None,
        }
    }
}

/// One ideal query made while reaching a verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsCheck {
    pub eps: f64,
    /// Centre of the tested set: the candidate limit or the Cauchy anchor value.
    pub level: f64,
    pub set: String,
    pub membership: Membership,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub procedure: String,
    pub outcome: Outcome,
    pub eps_grid: Vec<f64>,
    pub checks: Vec<EpsCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Verdict {
    fn new(procedure: &str, eps_grid: &[f64]) -> Self {
        Verdict {
            procedure: procedure.into(),
            outcome: Outcome::Inconclusive,
            eps_grid: eps_grid.to_vec(),
            checks: Vec::new(),
            witness: None,
            notes: Vec::new(),
        }
    }
}

/// Decreasing, deduplicated copy of the grid.
fn eps_grid(settings: &Settings) -> Result<Vec<f64>> {
    if settings.eps_grid.is_empty() {
        return Err(Error::PreconditionFailed("epsilon grid is empty".into()));
    }
    for &e in &settings.eps_grid {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::InvalidEpsilon(e));
        }
    }
    let mut g = settings.eps_grid.clone();
    g.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    g.dedup();
    Ok(g)
}

/// Ideal membership with resolution failures turned into `Unknown`.
fn query(ideal: &Ideal, s: &TsSet, settings: &Settings) -> Result<(Membership, Option<String>)> {
    match ideal.membership(s, settings) {
        Ok(m) => Ok((m, None)),
        Err(e @ Error::ResolutionFailure { .. }) => Ok((Membership::Unknown, Some(e.to_string()))),
        Err(e) => Err(e),
    }
}

pub fn i_converges(f: &MeasurableFn, limit: f64, ideal: &Ideal, settings: &Settings) -> Result<Verdict> {
    let grid = eps_grid(settings)?;
    let mut v = Verdict::new("i", &grid);
    let mut all_in = true;
    for &eps in &grid {
        let a = TsSet::exceedance(f.clone(), limit, eps)?;
        let (m, error) = query(ideal, &a, settings)?;
        v.checks.push(EpsCheck {
            eps,
            level: limit,
            set: a.to_string(),
            membership: m,
            error,
        });
        match m {
            Membership::In => {}
            Membership::NotIn => {
                v.outcome = Outcome::Diverges;
                return Ok(v);
            }
            Membership::Unknown => all_in = false,
        }
    }
    if all_in {
        v.outcome = Outcome::Converges { limit };
    }
    Ok(v)
}

/// I-convergence for the density-zero ideal of `ts`.
pub fn statistical_converges(f: &MeasurableFn, limit: f64, ts: &TimeScale, settings: &Settings) -> Result<Verdict> {
    let mut v = i_converges(f, limit, &Ideal::density_zero(ts), settings)?;
    v.procedure = "stat".into();
    Ok(v)
}

/// Ordinary limit of `f` along `m`: every exceedance set restricted to `m`
/// must be bounded.
pub fn classical_limit_on(f: &MeasurableFn, m: &TsSet, limit: f64, ts: &TimeScale, settings: &Settings) -> Result<Verdict> {
    let grid = eps_grid(settings)?;
    let bounded = Ideal::bounded(ts);
    if matches!(m.bound(ts, &settings.resolve)?, Bound::Empty | Bound::Known(_))
        || bounded.membership(m, settings)? == Membership::In
    {
        return Err(Error::BoundedRestriction);
    }
    let mut v = Verdict::new("classical", &grid);
    let mut all_in = true;
    for &eps in &grid {
        let a = TsSet::exceedance(f.clone(), limit, eps)?.intersection(m);
        let (mm, error) = query(&bounded, &a, settings)?;
        v.checks.push(EpsCheck {
            eps,
            level: limit,
            set: a.to_string(),
            membership: mm,
            error,
        });
        match mm {
            Membership::In => {}
            Membership::NotIn => {
                v.outcome = Outcome::Diverges;
                return Ok(v);
            }
            Membership::Unknown => all_in = false,
        }
    }
    if all_in {
        v.outcome = Outcome::Converges { limit };
    }
    Ok(v)
}

/// I*-convergence: an ordinary limit along some member of the filter.
///
/// A supplied `m` is tried first. Otherwise, or if it fails, the candidate
/// `T ∖ A(ε_min)` is used.
pub fn i_star_converges(
    f: &MeasurableFn,
    limit: f64,
    ideal: &Ideal,
    m: Option<&TsSet>,
    settings: &Settings,
) -> Result<Verdict> {
    let ts = ideal.timescale();
    let grid = eps_grid(settings)?;
    let mut v = Verdict::new("istar", &grid);

    let try_set = |cand: &TsSet, v: &mut Verdict| -> Result<Option<Membership>> {
        let fm = in_filter(&ideal.filter(), cand, settings)?;
        v.checks.push(EpsCheck {
            eps: *grid.last().expect("nonempty"),
            level: limit,
            set: format!("filter ∋ {cand}"),
            membership: fm,
            error: None,
        });
        if fm != Membership::In {
            return Ok(Some(fm));
        }
        let cl = match classical_limit_on(f, cand, limit, ts, settings) {
            Ok(cl) => cl,
            Err(Error::BoundedRestriction) => {
                v.notes.push(format!("{cand} is bounded"));
                return Ok(Some(Membership::NotIn));
            }
            Err(e) => return Err(e),
        };
        let res = match cl.outcome {
            Outcome::Converges { .. } => None,
            Outcome::Diverges => Some(Membership::NotIn),
            _ => Some(Membership::Unknown),
        };
        v.checks.extend(cl.checks);
        Ok(res)
    };

    if let Some(m) = m {
        match try_set(m, &mut v)? {
            None => {
                v.outcome = Outcome::Converges { limit };
                v.witness = Some(m.to_string());
                return Ok(v);
            }
            Some(_) => v.notes.push(format!("supplied set {m} failed; trying the constructed candidate")),
        }
    }

    let eps_min = *grid.last().expect("nonempty");
    let cand = TsSet::exceedance(f.clone(), limit, eps_min)?.complement();
    match try_set(&cand, &mut v)? {
        None => {
            v.outcome = Outcome::Converges { limit };
            v.witness = Some(cand.to_string());
        }
        Some(Membership::NotIn) if ideal.flags().b_admissible => {
            // Over a B-admissible ideal I*-convergence forces I-convergence,
            // which fails at the smallest tolerance.
            v.outcome = Outcome::Diverges;
        }
        Some(_) => v.outcome = Outcome::Inconclusive,
    }
    Ok(v)
}

/// Anchor candidates `t1 > t0` along the default grid, closest to the
/// apparent limit first, one per distinct value of `f`.
fn cauchy_anchors(f: &MeasurableFn, ts: &TimeScale, settings: &Settings) -> Result<Vec<(Real, f64)>> {
    let t0 = ts.t0();
    let grid = default_grid(ts, settings);
    let mut pts: Vec<(u32, Real, f64)> = Vec::new();
    for (q, t) in grid {
        if t > t0 {
            pts.push((q, t, f.eval_unchecked(ts, &t)?));
        }
    }
    let mut last: Vec<f64> = pts.iter().filter(|p| p.0 == 0).map(|p| p.2).collect();
    last.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let centre = last.get(last.len() / 2).copied().unwrap_or(0.0);
    pts.sort_by(|a, b| {
        let (da, db) = ((a.2 - centre).abs(), (b.2 - centre).abs());
        da.partial_cmp(&db).expect("finite").then(b.1.partial_cmp(&a.1).expect("finite"))
    });
    let mut out: Vec<(Real, f64)> = Vec::new();
    for (_, t, y) in pts {
        if !out.iter().any(|(_, z)| *z == y) {
            out.push((t, y));
        }
        if out.len() >= settings.cauchy_candidates {
            break;
        }
    }
    Ok(out)
}

/// Consecutive failing anchors after which the search reports `NotCauchy`.
const NOT_CAUCHY_AFTER: usize = 8;

pub fn i_cauchy(f: &MeasurableFn, ideal: &Ideal, settings: &Settings) -> Result<Verdict> {
    let ts = ideal.timescale();
    let grid = eps_grid(settings)?;
    let mut v = Verdict::new("cauchy", &grid);
    let anchors = cauchy_anchors(f, ts, settings)?;
    let mut witnesses = Vec::new();
    let mut unknown = false;
    for &eps in &grid {
        let mut found = false;
        let mut misses = 0;
        for (t1, y) in &anchors {
            let d = TsSet::exceedance(f.clone(), *y, eps)?;
            let (m, error) = query(ideal, &d, settings)?;
            v.checks.push(EpsCheck {
                eps,
                level: *y,
                set: d.to_string(),
                membership: m,
                error,
            });
            match m {
                Membership::In => {
                    witnesses.push(format!("eps={eps}: t1={t1}"));
                    found = true;
                    break;
                }
                Membership::NotIn => {
                    misses += 1;
                    if misses >= NOT_CAUCHY_AFTER.min(anchors.len()) {
                        break;
                    }
                }
                Membership::Unknown => {
                    misses = 0;
                    unknown = true;
                }
            }
        }
        if !found {
            if misses >= NOT_CAUCHY_AFTER.min(anchors.len()) && !anchors.is_empty() {
                v.outcome = Outcome::NotCauchy;
            } else {
                v.notes.push(format!("no anchor found for eps={eps}"));
            }
            v.witness = Some(witnesses.join("; "));
            return Ok(v);
        }
    }
    v.outcome = if unknown && witnesses.len() < grid.len() {
        Outcome::Inconclusive
    } else {
        Outcome::Cauchy
    };
    v.witness = Some(witnesses.join("; "));
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterPoint {
    pub level: f64,
    /// `(ε, membership of {|f - level| < ε})` for every tested ε.
    pub evidence: Vec<(f64, Membership)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterReport {
    pub points: Vec<ClusterPoint>,
    /// Levels excluded only because some membership was undecided.
    pub inconclusive: Vec<f64>,
}

/// Levels spanning the values of `f` at the default grid points.
pub fn default_level_grid(f: &MeasurableFn, ts: &TimeScale, settings: &Settings) -> Result<Vec<f64>> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, t) in default_grid(ts, settings) {
        let y = f.eval_unchecked(ts, &t)?;
        lo = lo.min(y);
        hi = hi.max(y);
    }
    if !(lo < hi) {
        return Ok(vec![lo]);
    }
    let n = settings.cluster_steps.max(1);
    Ok((0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect())
}

/// Levels `L` whose near-sets `{|f - L| < ε}` are outside the ideal for every ε.
pub fn cluster_points(f: &MeasurableFn, ideal: &Ideal, levels: &[f64], settings: &Settings) -> Result<ClusterReport> {
    if levels.is_empty() {
        return Err(Error::PreconditionFailed("level grid is empty".into()));
    }
    let mut grid = eps_grid(settings)?;
    grid.reverse();
    let mut report = ClusterReport {
        points: Vec::new(),
        inconclusive: Vec::new(),
    };
    'levels: for &l in levels {
        let mut evidence = Vec::new();
        for &eps in &grid {
            let near = TsSet::near(f.clone(), l, eps)?;
            let (m, _) = query(ideal, &near, settings)?;
            evidence.push((eps, m));
            match m {
                Membership::NotIn => {}
                Membership::In => continue 'levels,
                Membership::Unknown => {
                    report.inconclusive.push(l);
                    continue 'levels;
                }
            }
        }
        report.points.push(ClusterPoint { level: l, evidence });
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct BapTransfer {
    /// The filter set along which the ordinary limit is checked.
    pub m: String,
    pub annuli: Vec<String>,
    pub verdict: Verdict,
    #[serde(skip)]
    pub set: TsSet,
}

/// Builds the annuli `A_1 = {|f-L| ≥ 1}`, `A_n = {1/n ≤ |f-L| < 1/(n-1)}`,
/// replaces them by the ideal's witness family `B_j`, and checks the
/// ordinary limit along `M = T ∖ ∪ B_j`.
pub fn bap_transfer(f: &MeasurableFn, limit: f64, ideal: &Ideal, n_max: usize, settings: &Settings) -> Result<BapTransfer> {
    let ts = ideal.timescale();
    if n_max < 2 {
        return Err(Error::PreconditionFailed(format!("n_max must be at least 2, got {n_max}")));
    }
    let witness = ideal
        .bap_witness()
        .ok_or_else(|| Error::PreconditionFailed(format!("ideal {} has no BAP witness", ideal.name())))?;
    let pre = i_converges(f, limit, ideal, settings)?;
    if pre.outcome != (Outcome::Converges { limit }) {
        return Err(Error::PreconditionFailed(format!(
            "f is not I-convergent to {limit}: {:?}",
            pre.outcome
        )));
    }
    let shell = |n: usize| TsSet::exceedance(f.clone(), limit, 1.0 / n as f64);
    let mut annuli = vec![shell(1)?];
    for n in 2..=n_max {
        annuli.push(shell(n)?.difference(&shell(n - 1)?));
    }
    let family = witness(&annuli);
    if family.len() != annuli.len() {
        return Err(Error::WitnessFailure(format!(
            "witness returned {} sets for {} annuli",
            family.len(),
            annuli.len()
        )));
    }
    let bounded = Ideal::bounded(ts);
    for (j, (a, b)) in annuli.iter().zip(&family).enumerate() {
        if bounded.membership(&a.symmetric_difference(b), settings)? != Membership::In {
            return Err(Error::WitnessFailure(format!("A_{} Δ B_{} is not bounded", j + 1, j + 1)));
        }
    }
    let m = TsSet::union_all(family).complement();
    if in_filter(&ideal.filter(), &m, settings)? != Membership::In {
        return Err(Error::WitnessFailure(format!("{m} is not in the filter")));
    }
    let floor = 1.0 / n_max as f64;
    let mut fine: Vec<f64> = settings.eps_grid.iter().copied().filter(|e| *e >= floor).collect();
    if fine.is_empty() {
        fine.push(floor);
    }
    let verdict = classical_limit_on(f, &m, limit, ts, &settings.clone().with_eps_grid(fine))?;
    Ok(BapTransfer {
        m: m.to_string(),
        annuli: annuli.iter().map(|a| a.to_string()).collect(),
        verdict,
        set: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::q;
    use crate::set::IndexPattern;

    fn grid() -> TimeScale {
        TimeScale::uniform(q(1, 1), q(1, 1)).unwrap()
    }

    fn ray() -> TimeScale {
        TimeScale::continuous(q(1, 1)).unwrap()
    }

    fn st() -> Settings {
        Settings::default().with_t_max(Real::int(100_000))
    }

    fn ind(p: IndexPattern) -> MeasurableFn {
        MeasurableFn::indicator(TsSet::indices(p))
    }

    #[test]
    fn i_convergence_examples() {
        let v = i_converges(&MeasurableFn::reciprocal(), 0.0, &Ideal::bounded(&ray()), &st()).unwrap();
        assert_eq!(v.outcome, Outcome::Converges { limit: 0.0 });
        let d = Ideal::density_zero(&grid());
        assert_eq!(i_converges(&ind(IndexPattern::Squares), 0.0, &d, &st()).unwrap().outcome, Outcome::Converges { limit: 0.0 });
        assert_eq!(i_converges(&ind(IndexPattern::evens()), 0.0, &d, &st()).unwrap().outcome, Outcome::Diverges);
    }

    #[test]
    fn statistical_examples() {
        let s = MeasurableFn::identity().sin();
        assert_eq!(statistical_converges(&s, 0.0, &ray(), &st()).unwrap().outcome, Outcome::Diverges);
        let c = MeasurableFn::constant(3.0);
        assert_eq!(statistical_converges(&c, 3.0, &ray(), &st()).unwrap().outcome, Outcome::Converges { limit: 3.0 });
    }

    #[test]
    fn classical_examples() {
        let r = ray();
        assert_eq!(
            classical_limit_on(&MeasurableFn::reciprocal(), &TsSet::full(), 0.0, &r, &st()).unwrap().outcome,
            Outcome::Converges { limit: 0.0 }
        );
        let s = MeasurableFn::identity().sin();
        assert_eq!(classical_limit_on(&s, &TsSet::full(), 0.0, &r, &st()).unwrap().outcome, Outcome::Diverges);
        let non_sq = TsSet::indices(IndexPattern::Squares).complement();
        assert_eq!(
            classical_limit_on(&ind(IndexPattern::Squares), &non_sq, 0.0, &grid(), &st()).unwrap().outcome,
            Outcome::Converges { limit: 0.0 }
        );
        let bounded = TsSet::interval(Real::int(1), Real::int(9));
        assert_eq!(
            classical_limit_on(&MeasurableFn::reciprocal(), &bounded, 0.0, &r, &st()),
            Err(Error::BoundedRestriction)
        );
    }

    #[test]
    fn i_star_examples() {
        let d = Ideal::density_zero(&grid());
        let non_sq = TsSet::indices(IndexPattern::Squares).complement();
        let v = i_star_converges(&ind(IndexPattern::Squares), 0.0, &d, Some(&non_sq), &st()).unwrap();
        assert_eq!(v.outcome, Outcome::Converges { limit: 0.0 });
        let b = Ideal::bounded(&ray());
        let v = i_star_converges(&MeasurableFn::reciprocal(), 0.0, &b, Some(&TsSet::full()), &st()).unwrap();
        assert_eq!(v.outcome, Outcome::Converges { limit: 0.0 });
        let v = i_star_converges(&ind(IndexPattern::evens()), 0.0, &Ideal::bounded(&grid()), None, &st()).unwrap();
        assert_eq!(v.outcome, Outcome::Diverges);
    }

    #[test]
    fn cauchy_examples() {
        let v = i_cauchy(&MeasurableFn::reciprocal(), &Ideal::bounded(&ray()), &st()).unwrap();
        assert_eq!(v.outcome, Outcome::Cauchy);
        let v = i_cauchy(&ind(IndexPattern::evens()), &Ideal::density_zero(&grid()), &st()).unwrap();
        assert_eq!(v.outcome, Outcome::NotCauchy);
        let v = i_cauchy(&MeasurableFn::constant(2.0), &Ideal::bounded(&grid()), &st()).unwrap();
        assert_eq!(v.outcome, Outcome::Cauchy);
    }

    #[test]
    fn cluster_examples() {
        let d = Ideal::density_zero(&grid());
        let r = cluster_points(&ind(IndexPattern::evens()), &d, &[0.0, 0.5, 1.0], &st()).unwrap();
        let got: Vec<f64> = r.points.iter().map(|p| p.level).collect();
        assert_eq!(got, vec![0.0, 1.0]);
        let r = cluster_points(&MeasurableFn::reciprocal(), &Ideal::bounded(&ray()), &[0.0, 1.0], &st()).unwrap();
        let got: Vec<f64> = r.points.iter().map(|p| p.level).collect();
        assert_eq!(got, vec![0.0]);
        let c = MeasurableFn::constant(0.25);
        let levels = default_level_grid(&c, &grid(), &st()).unwrap();
        let r = cluster_points(&c, &Ideal::bounded(&grid()), &levels, &st()).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.points[0].level, 0.25);
    }

    #[test]
    fn bap_examples() {
        let b = Ideal::bounded(&ray());
        let t = bap_transfer(&MeasurableFn::reciprocal(), 0.0, &b, 10, &st()).unwrap();
        assert_eq!(t.verdict.outcome, Outcome::Converges { limit: 0.0 });
        let c = bap_transfer(&MeasurableFn::constant(1.5), 1.5, &b, 10, &st()).unwrap();
        assert_eq!(c.verdict.outcome, Outcome::Converges { limit: 1.5 });
        let bg = Ideal::bounded(&grid());
        assert!(matches!(
            bap_transfer(&ind(IndexPattern::Squares), 0.0, &bg, 10, &st()),
            Err(Error::PreconditionFailed(_))
        ));
        let bad = Ideal::bounded(&grid()).with_bap_witness(std::sync::Arc::new(|fam: &[TsSet]| {
            fam.iter().map(|_| TsSet::indices(IndexPattern::evens())).collect()
        }));
        assert!(matches!(
            bap_transfer(&MeasurableFn::reciprocal(), 0.0, &bad, 4, &st()),
            Err(Error::WitnessFailure(_))
        ));
    }
}
