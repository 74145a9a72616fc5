//! Lebesgue Δ-measure of points, time-scale intervals and resolved sets.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::{Real, RealSum};
use crate::set::TsSet;
use crate::settings::ResolveConfig;
use crate::timescale::{Component, TimeScale};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasureValue {
    pub value: Real,
    pub exact: bool,
}

impl MeasureValue {
    fn new(value: Real) -> Self {
        MeasureValue {
            value,
            exact: value.is_exact(),
        }
    }
}

/// Which endpoints a time-scale interval includes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    Open,
    /// `[a, b)`
    HalfOpenLr,
    /// `(a, b]`
    HalfOpenRl,
    Closed,
}

impl std::str::FromStr for IntervalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "open" => IntervalKind::Open,
            "half_open_lr" => IntervalKind::HalfOpenLr,
            "half_open_rl" => IntervalKind::HalfOpenRl,
            "closed" => IntervalKind::Closed,
            other => return Err(Error::config("kind", format!("unknown interval kind `{other}`"))),
        })
    }
}

/// Point mass `σ(a) - a`.
pub fn measure_point(ts: &TimeScale, a: &Real) -> Result<MeasureValue> {
    Ok(MeasureValue::new(ts.graininess(a)?))
}

pub fn measure_interval(ts: &TimeScale, kind: IntervalKind, a: &Real, b: &Real) -> Result<MeasureValue> {
    if a > b {
        return Err(Error::InvalidInterval {
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    let (sa, sb) = (ts.sigma(a)?, ts.sigma(b)?);
    let v = match kind {
        IntervalKind::HalfOpenLr => *b - *a,
        IntervalKind::Open => *b - sa,
        IntervalKind::HalfOpenRl => sb - sa,
        IntervalKind::Closed => sb - *a,
    };
    Ok(MeasureValue::new(v.max(Real::zero())))
}

/// Measure of one component whose endpoints lie in `ts`.
pub(crate) fn component_measure(ts: &TimeScale, c: &Component) -> Real {
    let right = if c.hi_closed { ts.sigma_unchecked(&c.hi) } else { c.hi };
    let left = if c.lo_closed { c.lo } else { ts.sigma_unchecked(&c.lo) };
    (right - left).max(Real::zero())
}

pub(crate) fn components_measure(ts: &TimeScale, cs: &[Component]) -> Real {
    let mut sum = RealSum::new();
    for c in cs {
        sum.add(component_measure(ts, c));
    }
    sum.value()
}

/// `μ_Δ(S ∩ [t0, t]_T)`.
pub fn measure_set_window(ts: &TimeScale, s: &TsSet, t: &Real) -> Result<MeasureValue> {
    measure_set_window_with(ts, s, t, &ResolveConfig::default())
}

pub fn measure_set_window_with(ts: &TimeScale, s: &TsSet, t: &Real, cfg: &ResolveConfig) -> Result<MeasureValue> {
    if *t < ts.t0() {
        return Err(Error::InvalidWindow {
            a: ts.t0().to_string(),
            b: t.to_string(),
        });
    }
    s.validate(ts)?;
    let cs = s.resolve(ts, t, cfg)?;
    Ok(MeasureValue::new(components_measure(ts, &cs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::q;
    use crate::set::IndexPattern;

    fn r(n: i128) -> Real {
        Real::int(n)
    }

    #[test]
    fn point_examples() {
        let ray = TimeScale::continuous(q(1, 1)).unwrap();
        let grid = TimeScale::uniform(q(1, 1), q(1, 1)).unwrap();
        let geo = TimeScale::geometric(q(1, 1), q(2, 1)).unwrap();
        assert_eq!(measure_point(&ray, &r(3)).unwrap().value, r(0));
        assert_eq!(measure_point(&grid, &r(5)).unwrap().value, r(1));
        let m = measure_point(&geo, &r(4)).unwrap();
        assert_eq!(m.value, r(4));
        assert!(m.exact);
        assert!(matches!(measure_point(&grid, &Real::Exact(q(5, 2))), Err(Error::NotInTimeScale(_))));
    }

    #[test]
    fn interval_examples() {
        let ray = TimeScale::continuous(q(1, 1)).unwrap();
        let grid = TimeScale::uniform(q(1, 1), q(1, 1)).unwrap();
        assert_eq!(measure_interval(&ray, IntervalKind::HalfOpenLr, &r(2), &r(5)).unwrap().value, r(3));
        assert_eq!(measure_interval(&grid, IntervalKind::Closed, &r(2), &r(5)).unwrap().value, r(4));
        assert_eq!(measure_interval(&grid, IntervalKind::Open, &r(2), &r(5)).unwrap().value, r(2));
        assert_eq!(measure_interval(&grid, IntervalKind::HalfOpenRl, &r(2), &r(5)).unwrap().value, r(3));
        assert!(matches!(
            measure_interval(&grid, IntervalKind::Closed, &r(5), &r(2)),
            Err(Error::InvalidInterval { .. })
        ));
    }

    #[test]
    fn set_window_examples() {
        let ray = TimeScale::continuous(q(1, 1)).unwrap();
        let blocks = TsSet::blocks(q(2, 1), q(2, 1), q(1, 1)).unwrap();
        assert_eq!(measure_set_window(&ray, &blocks, &r(9)).unwrap().value, r(4));

        let grid = TimeScale::uniform(q(1, 1), q(1, 1)).unwrap();
        let squares = TsSet::indices(IndexPattern::Squares);
        assert_eq!(measure_set_window(&grid, &squares, &r(100)).unwrap().value, r(10));
        assert_eq!(measure_set_window(&grid, &TsSet::empty(), &r(100)).unwrap().value, r(0));
        assert!(matches!(
            measure_set_window(&grid, &squares, &Real::Exact(q(1, 2))),
            Err(Error::InvalidWindow { .. })
        ));
    }

    #[test]
    fn split_at_point_is_additive() {
        let ray = TimeScale::continuous(q(1, 1)).unwrap();
        let s = TsSet::full().difference(&TsSet::points([r(5)]));
        assert_eq!(measure_set_window(&ray, &s, &r(10)).unwrap().value, r(9));
        let hyb = TimeScale::periodic(q(1, 1), q(1, 1), q(1, 1)).unwrap();
        let whole = measure_set_window(&hyb, &TsSet::full(), &r(6)).unwrap().value;
        let part = measure_set_window(&hyb, &TsSet::interval(r(1), r(3)), &r(6)).unwrap().value;
        let rest = measure_set_window(&hyb, &TsSet::interval(r(1), r(3)).complement(), &r(6)).unwrap().value;
        assert_eq!(part + rest, whole);
    }
}
