//! Time scales: closed, unbounded subsets of the positive reals built from a
//! handful of generator kinds, with exact membership, forward jump and
//! graininess.

use std::fmt;

use num_traits::{CheckedAdd, CheckedMul, One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::{q_to_f64, Real, Q};

/// A maximal piece of a subset of the reals: a point, or an interval whose
/// endpoints may be open or closed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Component {
    pub lo: Real,
    pub hi: Real,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Component {
    pub fn point(p: Real) -> Self {
        Component {
            lo: p,
            hi: p,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn closed(lo: Real, hi: Real) -> Self {
        debug_assert!(lo <= hi);
        Component {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
        }
    }

    /// Builds an interval; `None` when it contains no real number.
    pub fn new(lo: Real, hi: Real, lo_closed: bool, hi_closed: bool) -> Option<Self> {
        if lo < hi || (lo == hi && lo_closed && hi_closed) {
            Some(Component {
                lo,
                hi,
                lo_closed,
                hi_closed,
            })
        } else {
            None
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_closed(&self) -> bool {
        self.lo_closed && self.hi_closed
    }

    pub fn contains(&self, x: &Real) -> bool {
        let above = if self.lo_closed { *x >= self.lo } else { *x > self.lo };
        let below = if self.hi_closed { *x <= self.hi } else { *x < self.hi };
        above && below
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", self.lo);
        }
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// A bounded piece of a hybrid time scale: a point when `lo == hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub lo: Q,
    pub hi: Q,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    ContinuousRay,
    UniformGrid { step: Q },
    GeometricGrid { ratio: Q },
    PeriodicPattern { on: Q, gap: Q },
    HybridUnion { pieces: Vec<Piece>, tail: Box<TimeScale> },
}

/// Whether the scale repeats itself under a shift.
#[derive(Clone, Debug, PartialEq)]
pub enum Periodicity {
    /// Every positive shift maps the scale (past `base`) onto itself.
    Any { base: Q },
    Period { period: Q, base: Q },
    Aperiodic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeScale {
    t0: Q,
    kind: Kind,
}

impl TimeScale {
    pub fn continuous(t0: Q) -> Result<Self> {
        Self::check_t0(&t0)?;
        Ok(TimeScale {
            t0,
            kind: Kind::ContinuousRay,
        })
    }

    pub fn uniform(t0: Q, step: Q) -> Result<Self> {
        Self::check_t0(&t0)?;
        if !step.is_positive() {
            return Err(Error::InvalidTimeScale(format!("grid step must be positive, got {step}")));
        }
        Ok(TimeScale {
            t0,
            kind: Kind::UniformGrid { step },
        })
    }

    pub fn geometric(t0: Q, ratio: Q) -> Result<Self> {
        Self::check_t0(&t0)?;
        if ratio <= Q::one() {
            return Err(Error::InvalidTimeScale(format!("geometric ratio must exceed 1, got {ratio}")));
        }
        Ok(TimeScale {
            t0,
            kind: Kind::GeometricGrid { ratio },
        })
    }

    /// Blocks `[t0 + k(on+gap), t0 + k(on+gap) + on]`; a zero gap is the
    /// continuous ray.
    pub fn periodic(t0: Q, on: Q, gap: Q) -> Result<Self> {
        Self::check_t0(&t0)?;
        if !on.is_positive() || gap.is_negative() {
            return Err(Error::InvalidTimeScale(format!(
                "periodic pattern needs on > 0 and gap >= 0, got on={on}, gap={gap}"
            )));
        }
        if gap.is_zero() {
            return Self::continuous(t0);
        }
        Ok(TimeScale {
            t0,
            kind: Kind::PeriodicPattern { on, gap },
        })
    }

    /// Finitely many bounded pieces followed by an unbounded tail scale.
    pub fn hybrid(pieces: Vec<Piece>, tail: TimeScale) -> Result<Self> {
        if matches!(tail.kind, Kind::HybridUnion { .. }) {
            return Err(Error::InvalidTimeScale("hybrid tail must not itself be hybrid".into()));
        }
        for p in &pieces {
            if p.lo > p.hi {
                return Err(Error::InvalidTimeScale(format!("piece [{}, {}] is reversed", p.lo, p.hi)));
            }
        }
        for w in pieces.windows(2) {
            if w[0].hi >= w[1].lo {
                return Err(Error::InvalidTimeScale("hybrid pieces must be ordered and disjoint".into()));
            }
        }
        if let Some(last) = pieces.last() {
            if last.hi >= tail.t0 {
                return Err(Error::InvalidTimeScale("hybrid tail must start after the last piece".into()));
            }
        }
        let t0 = pieces.first().map(|p| p.lo).unwrap_or(tail.t0);
        Self::check_t0(&t0)?;
        if pieces.is_empty() {
            return Ok(tail);
        }
        Ok(TimeScale {
            t0,
            kind: Kind::HybridUnion {
                pieces,
                tail: Box::new(tail),
            },
        })
    }

    fn check_t0(t0: &Q) -> Result<()> {
        if t0.is_positive() {
            Ok(())
        } else {
            Err(Error::InvalidTimeScale(format!("t0 must be positive, got {t0}")))
        }
    }

    pub fn t0(&self) -> Real {
        Real::Exact(self.t0)
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// Uniform and geometric grids consist of isolated points only.
    pub fn is_discrete(&self) -> bool {
        matches!(self.kind, Kind::UniformGrid { .. } | Kind::GeometricGrid { .. })
    }

    pub fn contains(&self, x: &Real) -> bool {
        if *x < self.t0() {
            return false;
        }
        match &self.kind {
            Kind::ContinuousRay => true,
            Kind::UniformGrid { .. } | Kind::GeometricGrid { .. } => self.index_of(x).is_some(),
            Kind::PeriodicPattern { on, .. } => {
                let k = self.block_of(x);
                *x <= self.block_start(k) + Real::Exact(*on)
            }
            Kind::HybridUnion { pieces, tail } => {
                pieces.iter().any(|p| *x >= Real::Exact(p.lo) && *x <= Real::Exact(p.hi))
                    || tail.contains(x)
            }
        }
    }

    fn require(&self, t: &Real) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::NotInTimeScale(t.to_string()))
        }
    }

    /// Forward jump: the infimum of the points of the scale strictly above `t`.
    pub fn sigma(&self, t: &Real) -> Result<Real> {
        self.require(t)?;
        Ok(self.sigma_unchecked(t))
    }

    /// `sigma` for a `t` already known to lie in the scale.
    pub(crate) fn sigma_unchecked(&self, t: &Real) -> Real {
        match &self.kind {
            Kind::ContinuousRay => *t,
            Kind::UniformGrid { step } => *t + Real::Exact(*step),
            Kind::GeometricGrid { ratio } => *t * Real::Exact(*ratio),
            Kind::PeriodicPattern { on, .. } => {
                let k = self.block_of(t);
                if *t < self.block_start(k) + Real::Exact(*on) {
                    *t
                } else {
                    self.block_start(k + 1)
                }
            }
            Kind::HybridUnion { pieces, tail } => {
                for (i, p) in pieces.iter().enumerate() {
                    let (lo, hi) = (Real::Exact(p.lo), Real::Exact(p.hi));
                    if *t >= lo && *t <= hi {
                        if *t < hi {
                            return *t;
                        }
                        return pieces.get(i + 1).map(|n| Real::Exact(n.lo)).unwrap_or(tail.t0());
                    }
                }
                tail.sigma_unchecked(t)
            }
        }
    }

    /// Graininess `sigma(t) - t`.
    pub fn graininess(&self, t: &Real) -> Result<Real> {
        Ok(self.sigma(t)? - *t)
    }

    /// `t` is right-dense when the forward jump does not move it.
    pub fn is_right_dense(&self, t: &Real) -> Result<bool> {
        Ok(self.graininess(t)?.is_zero())
    }

    /// Largest point of the scale not above `x`; `None` below `t0`.
    pub fn floor_in(&self, x: &Real) -> Option<Real> {
        if *x < self.t0() {
            return None;
        }
        Some(match &self.kind {
            Kind::ContinuousRay => *x,
            Kind::UniformGrid { .. } | Kind::GeometricGrid { .. } => {
                let n = self.floor_count(x)?;
                self.nth(n - 1)
            }
            Kind::PeriodicPattern { on, .. } => {
                let k = self.block_of(x);
                let end = self.block_start(k) + Real::Exact(*on);
                x.min(end)
            }
            Kind::HybridUnion { pieces, tail } => {
                if *x >= tail.t0() {
                    return tail.floor_in(x);
                }
                let mut best = None;
                for p in pieces {
                    if Real::Exact(p.lo) <= *x {
                        best = Some(x.min(Real::Exact(p.hi)));
                    }
                }
                return best;
            }
        })
    }

    /// Smallest point of the scale not below `x`.
    pub fn ceil_in(&self, x: &Real) -> Real {
        if *x <= self.t0() {
            return self.t0();
        }
        match &self.kind {
            Kind::ContinuousRay => *x,
            Kind::UniformGrid { .. } | Kind::GeometricGrid { .. } => {
                let n = self.floor_count(x).unwrap_or(0);
                let below = self.nth(n - 1);
                if below == *x {
                    below
                } else {
                    self.nth(n)
                }
            }
            Kind::PeriodicPattern { on, .. } => {
                let k = self.block_of(x);
                if *x <= self.block_start(k) + Real::Exact(*on) {
                    *x
                } else {
                    self.block_start(k + 1)
                }
            }
            Kind::HybridUnion { pieces, tail } => {
                for p in pieces {
                    if *x <= Real::Exact(p.hi) {
                        return x.max(Real::Exact(p.lo));
                    }
                }
                tail.ceil_in(x)
            }
        }
    }

    /// Maximal components of `T ∩ [a, b]`, in increasing order.
    pub fn decompose_window(&self, a: &Real, b: &Real) -> Result<Vec<Component>> {
        if a > b {
            return Err(Error::InvalidWindow {
                a: a.to_string(),
                b: b.to_string(),
            });
        }
        let mut out = Vec::new();
        self.decompose_into(a, b, &mut out);
        Ok(out)
    }

    fn decompose_into(&self, a: &Real, b: &Real, out: &mut Vec<Component>) {
        let a = a.max(self.t0());
        if a > *b {
            return;
        }
        match &self.kind {
            Kind::ContinuousRay => out.push(Component::closed(a, *b)),
            Kind::UniformGrid { .. } | Kind::GeometricGrid { .. } => {
                let first = self.ceil_in(&a);
                let Some(mut n) = self.floor_count(&first) else { return };
                let mut p = first;
                while p <= *b {
                    out.push(Component::point(p));
                    p = match &self.kind {
                        Kind::UniformGrid { step } => p + Real::Exact(*step),
                        _ => self.nth(n),
                    };
                    n += 1;
                }
            }
            Kind::PeriodicPattern { on, .. } => {
                let on = Real::Exact(*on);
                let mut k = self.block_of(&a);
                loop {
                    let s = self.block_start(k);
                    if s > *b {
                        break;
                    }
                    let lo = s.max(a);
                    let hi = (s + on).min(*b);
                    if lo <= hi {
                        out.push(if lo == hi { Component::point(lo) } else { Component::closed(lo, hi) });
                    }
                    k += 1;
                }
            }
            Kind::HybridUnion { pieces, tail } => {
                for p in pieces {
                    let lo = Real::Exact(p.lo).max(a);
                    let hi = Real::Exact(p.hi).min(*b);
                    if lo <= hi {
                        out.push(if lo == hi { Component::point(lo) } else { Component::closed(lo, hi) });
                    }
                }
                tail.decompose_into(&a, b, out);
            }
        }
    }

    /// Point number `n` (0-based) of a discrete scale.
    pub(crate) fn nth(&self, n: u64) -> Real {
        match &self.kind {
            Kind::UniformGrid { step } => Real::int(n as i128) * Real::Exact(*step) + Real::Exact(self.t0),
            Kind::GeometricGrid { ratio } => {
                let exact = u32::try_from(n)
                    .ok()
                    .and_then(|e| num_traits::checked_pow(*ratio, e as usize))
                    .and_then(|p| p.checked_mul(&self.t0));
                match exact {
                    Some(v) => Real::Exact(v),
                    None => Real::approx(q_to_f64(&self.t0) * q_to_f64(ratio).powf(n as f64)),
                }
            }
            _ => unreachable!("nth on a non-discrete scale"),
        }
    }

    /// Number of points of a discrete scale in `[t0, x]`; `None` below `t0`.
    pub(crate) fn floor_count(&self, x: &Real) -> Option<u64> {
        if *x < self.t0() {
            return None;
        }
        let guess = match &self.kind {
            Kind::UniformGrid { step } => ((*x - self.t0()) / Real::Exact(*step)).floor_int()?,
            Kind::GeometricGrid { ratio } => {
                // Float estimate of the exponent, corrected by exact comparisons.
                ((x.to_f64() / q_to_f64(&self.t0)).ln() / q_to_f64(ratio).ln()).floor() as i128
            }
            _ => unreachable!("floor_count on a non-discrete scale"),
        };
        let mut n = guess.max(0) as u64;
        while n > 0 && self.nth(n) > *x {
            n -= 1;
        }
        while self.nth(n + 1) <= *x {
            n += 1;
        }
        Some(n + 1)
    }

    /// 1-based index of `x` among the points of a discrete scale.
    pub fn index_of(&self, x: &Real) -> Option<u64> {
        if !self.is_discrete() {
            return None;
        }
        let n = self.floor_count(x)?;
        (self.nth(n - 1) == *x).then_some(n)
    }

    /// The point with 1-based index `k` of a discrete scale.
    pub fn point_at(&self, k: u64) -> Option<Real> {
        (self.is_discrete() && k >= 1).then(|| self.nth(k - 1))
    }

    fn period_len(&self) -> Q {
        match &self.kind {
            Kind::PeriodicPattern { on, gap } => on + gap,
            _ => unreachable!(),
        }
    }

    fn block_start(&self, k: i128) -> Real {
        let p = self.period_len();
        Q::from_integer(k)
            .checked_mul(&p)
            .and_then(|x| x.checked_add(&self.t0))
            .map(Real::Exact)
            .unwrap_or_else(|| Real::approx(q_to_f64(&self.t0) + k as f64 * q_to_f64(&p)))
    }

    fn block_of(&self, x: &Real) -> i128 {
        let p = Real::Exact(self.period_len());
        let mut k = ((*x - self.t0()) / p).floor_int().unwrap_or(0).max(0);
        while k > 0 && self.block_start(k) > *x {
            k -= 1;
        }
        while self.block_start(k + 1) <= *x {
            k += 1;
        }
        k
    }

    pub fn periodicity(&self) -> Periodicity {
        match &self.kind {
            Kind::ContinuousRay => Periodicity::Any { base: self.t0 },
            Kind::UniformGrid { step } => Periodicity::Period {
                period: *step,
                base: self.t0,
            },
            Kind::PeriodicPattern { on, gap } => Periodicity::Period {
                period: on + gap,
                base: self.t0,
            },
            Kind::GeometricGrid { .. } => Periodicity::Aperiodic,
            Kind::HybridUnion { tail, .. } => tail.periodicity(),
        }
    }

    /// Rough count of evaluation sites needed to resolve a function over
    /// `[t0, t]`: isolated points plus sub-samples along interval components.
    pub fn resolution_cost(&self, t: f64, scan_step: f64, min_subsamples: usize) -> f64 {
        let t0 = q_to_f64(&self.t0);
        if t < t0 {
            return 0.0;
        }
        let interval_cost = |len: f64| (len / scan_step).max(min_subsamples as f64);
        match &self.kind {
            Kind::ContinuousRay => interval_cost(t - t0),
            Kind::UniformGrid { step } => (t - t0) / q_to_f64(step) + 1.0,
            Kind::GeometricGrid { ratio } => (t / t0).ln() / q_to_f64(ratio).ln() + 1.0,
            Kind::PeriodicPattern { on, gap } => {
                let blocks = ((t - t0) / q_to_f64(&(on + gap))).floor() + 1.0;
                blocks * (1.0 + interval_cost(q_to_f64(on)))
            }
            Kind::HybridUnion { pieces, tail } => {
                let head: f64 = pieces
                    .iter()
                    .map(|p| if p.lo == p.hi { 1.0 } else { interval_cost(q_to_f64(&(p.hi - p.lo))) })
                    .sum();
                head + tail.resolution_cost(t, scan_step, min_subsamples)
            }
        }
    }
}

impl fmt::Display for TimeScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t0 = Real::Exact(self.t0);
        match &self.kind {
            Kind::ContinuousRay => write!(f, "ContinuousRay(t0={t0})"),
            Kind::UniformGrid { step } => write!(f, "UniformGrid(t0={t0}, h={})", Real::Exact(*step)),
            Kind::GeometricGrid { ratio } => write!(f, "GeometricGrid(t0={t0}, q={})", Real::Exact(*ratio)),
            Kind::PeriodicPattern { on, gap } => {
                write!(f, "PeriodicPattern(t0={t0}, on={}, gap={})", Real::Exact(*on), Real::Exact(*gap))
            }
            Kind::HybridUnion { pieces, tail } => {
                write!(f, "HybridUnion(")?;
                for p in pieces {
                    write!(f, "[{}, {}] ∪ ", Real::Exact(p.lo), Real::Exact(p.hi))?;
                }
                write!(f, "{tail})")
            }
        }
    }
}

impl Serialize for TimeScale {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::q;

    fn r(n: i128) -> Real {
        Real::int(n)
    }

    #[test]
    fn sigma_examples() {
        let grid = TimeScale::uniform(q(1, 1), q(1, 1)).unwrap();
        assert_eq!(grid.sigma(&r(3)).unwrap(), r(4));
        let ray = TimeScale::continuous(q(1, 1)).unwrap();
        assert_eq!(ray.sigma(&r(5)).unwrap(), r(5));
        let geo = TimeScale::geometric(q(1, 1), q(2, 1)).unwrap();
        assert_eq!(geo.sigma(&r(8)).unwrap(), r(16));
    }

    #[test]
    fn graininess_examples() {
        let ray = TimeScale::continuous(q(1, 1)).unwrap();
        assert_eq!(ray.graininess(&r(7)).unwrap(), r(0));
        let half = TimeScale::uniform(q(1, 1), q(1, 2)).unwrap();
        assert_eq!(half.graininess(&r(2)).unwrap(), Real::from(q(1, 2)));
        let pat = TimeScale::periodic(q(1, 1), q(1, 1), q(2, 1)).unwrap();
        assert_eq!(pat.graininess(&r(2)).unwrap(), r(2));
        assert_eq!(pat.sigma(&r(2)).unwrap(), r(4));
    }

    #[test]
    fn membership_examples() {
        let grid = TimeScale::uniform(q(1, 1), q(1, 1)).unwrap();
        assert!(!grid.contains(&Real::from(q(5, 2))));
        let pat = TimeScale::periodic(q(1, 1), q(1, 1), q(2, 1)).unwrap();
        assert!(pat.contains(&Real::from(q(3, 2))));
        assert!(!pat.contains(&Real::from(q(5, 2))));
        let geo = TimeScale::geometric(q(1, 1), q(3, 1)).unwrap();
        assert!(geo.contains(&r(27)));
        assert!(!geo.contains(&r(28)));
        assert!(!geo.contains(&Real::from(q(1, 2))));
    }

    #[test]
    fn sigma_outside_scale_is_an_error() {
        let grid = TimeScale::uniform(q(1, 1), q(1, 1)).unwrap();
        assert!(matches!(grid.sigma(&Real::from(q(5, 2))), Err(Error::NotInTimeScale(_))));
    }

    #[test]
    fn decompose_examples() {
        let ray = TimeScale::continuous(q(1, 1)).unwrap();
        assert_eq!(ray.decompose_window(&r(2), &r(5)).unwrap(), vec![Component::closed(r(2), r(5))]);

        let grid = TimeScale::uniform(q(1, 1), q(1, 1)).unwrap();
        let got = grid.decompose_window(&Real::from(q(3, 2)), &Real::from(q(21, 5))).unwrap();
        assert_eq!(got, vec![Component::point(r(2)), Component::point(r(3)), Component::point(r(4))]);

        let pat = TimeScale::periodic(q(1, 1), q(1, 1), q(2, 1)).unwrap();
        let got = pat.decompose_window(&r(1), &r(7)).unwrap();
        assert_eq!(
            got,
            vec![Component::closed(r(1), r(2)), Component::closed(r(4), r(5)), Component::point(r(7))]
        );

        assert!(matches!(ray.decompose_window(&r(5), &r(2)), Err(Error::InvalidWindow { .. })));
    }

    #[test]
    fn zero_gap_pattern_is_a_ray() {
        let pat = TimeScale::periodic(q(1, 1), q(1, 1), q(0, 1)).unwrap();
        assert_eq!(pat.kind(), &Kind::ContinuousRay);
    }

    #[test]
    fn invalid_generators_rejected() {
        assert!(TimeScale::continuous(q(0, 1)).is_err());
        assert!(TimeScale::uniform(q(1, 1), q(0, 1)).is_err());
        assert!(TimeScale::geometric(q(1, 1), q(1, 1)).is_err());
        assert!(TimeScale::periodic(q(1, 1), q(0, 1), q(1, 1)).is_err());
    }

    #[test]
    fn hybrid_scale_jumps_between_pieces() {
        let tail = TimeScale::uniform(q(10, 1), q(1, 1)).unwrap();
        let t = TimeScale::hybrid(
            vec![Piece { lo: q(1, 1), hi: q(2, 1) }, Piece { lo: q(5, 1), hi: q(5, 1) }],
            tail,
        )
        .unwrap();
        assert_eq!(t.t0(), r(1));
        assert_eq!(t.sigma(&Real::from(q(3, 2))).unwrap(), Real::from(q(3, 2)));
        assert_eq!(t.sigma(&r(2)).unwrap(), r(5));
        assert_eq!(t.sigma(&r(5)).unwrap(), r(10));
        assert_eq!(t.sigma(&r(12)).unwrap(), r(13));
        assert!(!t.contains(&r(3)));
        let parts = t.decompose_window(&r(1), &r(11)).unwrap();
        assert_eq!(parts.len(), 4);
    }

    #[test]
    fn floor_and_ceil_snap_into_scale() {
        let geo = TimeScale::geometric(q(1, 1), q(2, 1)).unwrap();
        assert_eq!(geo.floor_in(&r(100)).unwrap(), r(64));
        assert_eq!(geo.ceil_in(&r(100)), r(128));
        assert_eq!(geo.floor_in(&r(64)).unwrap(), r(64));
        assert!(geo.floor_in(&Real::from(q(1, 2))).is_none());
        let pat = TimeScale::periodic(q(1, 1), q(1, 1), q(2, 1)).unwrap();
        assert_eq!(pat.floor_in(&r(3)).unwrap(), r(2));
        assert_eq!(pat.ceil_in(&r(3)), r(4));
    }

    #[test]
    fn geometric_exponent_search_is_exact_at_large_powers() {
        let geo = TimeScale::geometric(q(1, 1), q(3, 1)).unwrap();
        let p = Real::Exact(Q::from_integer(3i128.pow(40)));
        assert!(geo.contains(&p));
        assert!(!geo.contains(&(p - Real::int(1))));
        assert_eq!(geo.sigma(&p).unwrap(), p * Real::int(3));
        assert_eq!(geo.index_of(&p), Some(41));
    }
}
