//! Representable Δ-measurable subsets of a time scale.
//!
//! A [`TsSet`] is a small expression over primitive sets. Resolving it on a
//! window `[t0, t]` yields a sorted list of disjoint [`Component`]s, each a
//! subset of the scale with endpoints in the scale.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::func::MeasurableFn;
use crate::real::{lcm_q, Real, Q};
use crate::settings::ResolveConfig;
use crate::timescale::{Component, Kind, Periodicity, TimeScale};

/// Index sets of sequence positions (1-based) on discrete scales.
#[derive(Clone, Debug, PartialEq)]
pub enum IndexPattern {
    /// `first, first + step, first + 2 step, ...`
    Arithmetic { first: u64, step: u64 },
    Squares,
    Cubes,
    Primes,
    /// `1, b, b^2, ...`
    Powers { base: u64 },
    /// Sorted, deduplicated explicit indices.
    Explicit(Arc<Vec<u64>>),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn primes_upto(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, &p)| p).map(|(i, _)| i as u64).collect()
}

fn exact_root(k: u64, power: u32) -> Option<u64> {
    let guess = (k as f64).powf(1.0 / power as f64).round() as u64;
    (guess.saturating_sub(1)..=guess + 1).find(|r| r.checked_pow(power) == Some(k))
}

impl IndexPattern {
    pub fn evens() -> Self {
        IndexPattern::Arithmetic { first: 2, step: 2 }
    }

    pub fn explicit(mut indices: Vec<u64>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        IndexPattern::Explicit(Arc::new(indices))
    }

    pub fn contains(&self, k: u64) -> bool {
        if k == 0 {
            return false;
        }
        match self {
            IndexPattern::Arithmetic { first, step } => k >= *first && (k - first) % step == 0,
            IndexPattern::Squares => exact_root(k, 2).is_some(),
            IndexPattern::Cubes => exact_root(k, 3).is_some(),
            IndexPattern::Primes => is_prime(k),
            IndexPattern::Powers { base } => {
                let mut p = 1u64;
                while p < k {
                    match p.checked_mul(*base) {
                        Some(n) => p = n,
                        None => return false,
                    }
                }
                p == k
            }
            IndexPattern::Explicit(v) => v.binary_search(&k).is_ok(),
        }
    }

    /// Members not exceeding `n`, increasing.
    pub fn upto(&self, n: u64) -> Vec<u64> {
        match self {
            IndexPattern::Arithmetic { first, step } => {
                if *first > n {
                    Vec::new()
                } else {
                    (*first..=n).step_by(*step as usize).collect()
                }
            }
            IndexPattern::Squares => (1u64..).map(|i| i * i).take_while(|&v| v <= n).collect(),
            IndexPattern::Cubes => (1u64..).map(|i| i * i * i).take_while(|&v| v <= n).collect(),
            IndexPattern::Primes => primes_upto(n),
            IndexPattern::Powers { base } => {
                let mut out = Vec::new();
                let mut p = 1u64;
                while p <= n {
                    out.push(p);
                    match p.checked_mul(*base) {
                        Some(next) if *base > 1 => p = next,
                        _ => break,
                    }
                }
                out
            }
            IndexPattern::Explicit(v) => v.iter().copied().take_while(|&k| k <= n).collect(),
        }
    }

    pub fn max_index(&self) -> Option<u64> {
        match self {
            IndexPattern::Explicit(v) => Some(v.last().copied().unwrap_or(0)),
            _ => None,
        }
    }
}

impl fmt::Display for IndexPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexPattern::Arithmetic { first, step } => write!(f, "idx({first} + {step}k)"),
            IndexPattern::Squares => write!(f, "squares"),
            IndexPattern::Cubes => write!(f, "cubes"),
            IndexPattern::Primes => write!(f, "primes"),
            IndexPattern::Powers { base } => write!(f, "powers({base})"),
            IndexPattern::Explicit(v) => write!(f, "idx{{{} indices}}", v.len()),
        }
    }
}

/// Eventual behaviour of a set far out on the scale.
#[derive(Clone, Debug, PartialEq)]
pub enum Tail {
    /// Empty beyond `from`.
    Empty { from: Q },
    /// Equal to the whole scale beyond `from`.
    Full { from: Q },
    /// Invariant under shifts by `period` beyond `base`, relative to the scale.
    Periodic { period: Q, base: Q },
    Unknown,
}

impl Tail {
    fn base(&self) -> Option<Q> {
        match self {
            Tail::Empty { from } | Tail::Full { from } => Some(*from),
            Tail::Periodic { base, .. } => Some(*base),
            Tail::Unknown => None,
        }
    }

    fn with_base(self, b: Q) -> Tail {
        match self {
            Tail::Empty { from } => Tail::Empty { from: from.max(b) },
            Tail::Full { from } => Tail::Full { from: from.max(b) },
            Tail::Periodic { period, base } => Tail::Periodic { period, base: base.max(b) },
            Tail::Unknown => Tail::Unknown,
        }
    }

    fn complement(self) -> Tail {
        match self {
            Tail::Empty { from } => Tail::Full { from },
            Tail::Full { from } => Tail::Empty { from },
            other => other,
        }
    }

    fn union(self, other: Tail) -> Tail {
        let base = match (self.base(), other.base()) {
            (Some(a), Some(b)) => a.max(b),
            _ => {
                return match (self, other) {
                    (f @ Tail::Full { .. }, _) | (_, f @ Tail::Full { .. }) => f,
                    _ => Tail::Unknown,
                }
            }
        };
        match (self, other) {
            (Tail::Full { .. }, _) | (_, Tail::Full { .. }) => Tail::Full { from: base },
            (Tail::Empty { .. }, t) | (t, Tail::Empty { .. }) => t.with_base(base),
            (Tail::Periodic { period: p, .. }, Tail::Periodic { period: r, .. }) => match lcm_q(&p, &r) {
                Some(period) => Tail::Periodic { period, base },
                None => Tail::Unknown,
            },
            _ => Tail::Unknown,
        }
    }

    fn intersection(self, other: Tail) -> Tail {
        self.complement().union(other.complement()).complement()
    }
}

/// Upper-bound information available without numerics.
#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    Empty,
    Known(Real),
    Unbounded,
    Unknown,
}

pub(crate) enum Node {
    Empty,
    Full,
    Explicit(Vec<Component>),
    Ray(Real),
    Indices(IndexPattern),
    Blocks { start: Q, period: Q, on: Q },
    Exceed { f: MeasurableFn, level: f64, eps: f64 },
    Union(Vec<TsSet>),
    Intersection(Vec<TsSet>),
    Complement(TsSet),
}

/// A representable subset of a time scale.
#[derive(Clone)]
pub struct TsSet {
    node: Arc<Node>,
    label: Option<Arc<str>>,
}

impl TsSet {
    fn from_node(node: Node) -> Self {
        TsSet {
            node: Arc::new(node),
            label: None,
        }
    }

    pub fn empty() -> Self {
        Self::from_node(Node::Empty)
    }

    pub fn full() -> Self {
        Self::from_node(Node::Full)
    }

    /// Finite union of real intervals and points, intersected with the scale.
    pub fn explicit(components: Vec<Component>) -> Self {
        Self::from_node(Node::Explicit(normalize(components)))
    }

    pub fn interval(lo: Real, hi: Real) -> Self {
        Self::explicit(vec![Component::closed(lo, hi)])
    }

    pub fn points(points: impl IntoIterator<Item = Real>) -> Self {
        Self::explicit(points.into_iter().map(Component::point).collect())
    }

    /// `[from, ∞)` within the scale.
    pub fn ray(from: Real) -> Self {
        Self::from_node(Node::Ray(from))
    }

    /// Points of a discrete scale whose 1-based index lies in `pattern`.
    pub fn indices(pattern: IndexPattern) -> Self {
        Self::from_node(Node::Indices(pattern))
    }

    /// `∪_k [start + k·period, start + k·period + on]` within the scale.
    pub fn blocks(start: Q, period: Q, on: Q) -> Result<Self> {
        if period <= Q::zero() || on < Q::zero() || on > period {
            return Err(Error::InvalidSet(format!(
                "blocks need 0 <= on <= period and period > 0, got on={on}, period={period}"
            )));
        }
        Ok(Self::from_node(Node::Blocks { start, period, on }))
    }

    /// `{t : |f(t) - level| >= eps}`.
    pub fn exceedance(f: MeasurableFn, level: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidEpsilon(eps));
        }
        if !level.is_finite() {
            return Err(Error::DomainError(format!("non-finite level {level}")));
        }
        Ok(Self::from_node(Node::Exceed { f, level, eps }))
    }

    /// `{t : |f(t) - level| < eps}`.
    pub fn near(f: MeasurableFn, level: f64, eps: f64) -> Result<Self> {
        Ok(Self::exceedance(f, level, eps)?.complement())
    }

    pub fn union(&self, other: &TsSet) -> Self {
        Self::from_node(Node::Union(vec![self.clone(), other.clone()]))
    }

    pub fn union_all(sets: Vec<TsSet>) -> Self {
        match sets.len() {
            0 => Self::empty(),
            1 => sets.into_iter().next().unwrap(),
            _ => Self::from_node(Node::Union(sets)),
        }
    }

    pub fn intersection(&self, other: &TsSet) -> Self {
        Self::from_node(Node::Intersection(vec![self.clone(), other.clone()]))
    }

    /// Complement within the time scale.
    pub fn complement(&self) -> Self {
        if let Node::Complement(inner) = &*self.node {
            return inner.clone();
        }
        Self::from_node(Node::Complement(self.clone()))
    }

    pub fn difference(&self, other: &TsSet) -> Self {
        self.intersection(&other.complement())
    }

    pub fn symmetric_difference(&self, other: &TsSet) -> Self {
        self.difference(other).union(&other.difference(self))
    }

    pub fn named(mut self, label: impl Into<String>) -> Self {
        self.label = Some(Arc::from(label.into()));
        self
    }

    /// Checks that the set is meaningful on `ts`.
    pub fn validate(&self, ts: &TimeScale) -> Result<()> {
        match &*self.node {
            Node::Indices(_) if !ts.is_discrete() => Err(Error::InvalidSet(format!(
                "index pattern {self} needs a discrete scale, got {ts}"
            ))),
            Node::Indices(IndexPattern::Arithmetic { step: 0, .. }) => {
                Err(Error::InvalidSet(format!("index pattern {self} has step 0")))
            }
            Node::Union(xs) | Node::Intersection(xs) => xs.iter().try_for_each(|s| s.validate(ts)),
            Node::Complement(s) => s.validate(ts),
            _ => Ok(()),
        }
    }

    /// Exact membership of a point of the scale.
    pub fn contains(&self, ts: &TimeScale, x: &Real) -> Result<bool> {
        if !ts.contains(x) {
            return Ok(false);
        }
        Ok(match &*self.node {
            Node::Empty => false,
            Node::Full => true,
            Node::Explicit(cs) => cs.iter().any(|c| c.contains(x)),
            Node::Ray(from) => x >= from,
            Node::Indices(p) => {
                self.validate(ts)?;
                ts.index_of(x).is_some_and(|k| p.contains(k))
            }
            Node::Blocks { start, period, on } => {
                let start = Real::Exact(*start);
                if *x < start {
                    false
                } else {
                    let k = ((*x - start) / Real::Exact(*period)).floor_int().unwrap_or(0);
                    let lo = start + Real::Exact(Q::from_integer(k) * period);
                    *x <= lo + Real::Exact(*on)
                }
            }
            Node::Exceed { f, level, eps } => (f.eval(ts, x)? - level).abs() >= *eps,
            Node::Union(xs) => {
                for s in xs {
                    if s.contains(ts, x)? {
                        return Ok(true);
                    }
                }
                false
            }
            Node::Intersection(xs) => {
                for s in xs {
                    if !s.contains(ts, x)? {
                        return Ok(false);
                    }
                }
                true
            }
            Node::Complement(s) => !s.contains(ts, x)?,
        })
    }

    /// Components of `S ∩ [t0, end]`.
    pub fn resolve(&self, ts: &TimeScale, end: &Real, cfg: &ResolveConfig) -> Result<Vec<Component>> {
        let Some(end) = ts.floor_in(end) else {
            return Ok(Vec::new());
        };
        let window = || ts.decompose_window(&ts.t0(), &end);
        Ok(match &*self.node {
            Node::Empty => Vec::new(),
            Node::Full => window()?,
            Node::Explicit(cs) => intersect(&window()?, cs),
            Node::Ray(from) => {
                if *from > end {
                    Vec::new()
                } else {
                    ts.decompose_window(from, &end)?
                }
            }
            Node::Indices(p) => {
                self.validate(ts)?;
                let n = ts.index_of(&end).expect("window end lies in the scale");
                p.upto(n)
                    .into_iter()
                    .filter_map(|k| ts.point_at(k))
                    .map(Component::point)
                    .collect()
            }
            Node::Blocks { start, period, on } => {
                let mut blocks = Vec::new();
                let mut lo = Real::Exact(*start);
                let step = Real::Exact(*period);
                let on = Real::Exact(*on);
                while lo <= end {
                    blocks.push(Component::closed(lo, lo + on));
                    lo = lo + step;
                }
                intersect(&window()?, &blocks)
            }
            Node::Exceed { f, level, eps } => crate::exceed::resolve_exceedance(f, *level, *eps, ts, &end, cfg)?,
            Node::Union(xs) => {
                let mut all = Vec::new();
                for s in xs {
                    all.extend(s.resolve(ts, &end, cfg)?);
                }
                normalize(all)
            }
            Node::Intersection(xs) => {
                let mut acc: Option<Vec<Component>> = None;
                for s in xs {
                    // The result lies inside what is already resolved.
                    let upto = match acc.as_ref().and_then(|a| a.last()) {
                        Some(c) if c.hi < end => c.hi,
                        _ => end,
                    };
                    let r = s.resolve(ts, &upto, cfg)?;
                    acc = Some(match acc {
                        None => r,
                        Some(a) => intersect(&a, &r),
                    });
                    if acc.as_ref().is_some_and(|a| a.is_empty()) {
                        break;
                    }
                }
                acc.unwrap_or_default()
            }
            Node::Complement(s) => difference(&window()?, &s.resolve(ts, &end, cfg)?),
        })
    }

    /// Eventual behaviour, decided structurally.
    pub fn tail(&self, ts: &TimeScale) -> Tail {
        let t0 = ts.t0().exact().expect("t0 is exact");
        match &*self.node {
            Node::Empty => Tail::Empty { from: t0 },
            Node::Full => Tail::Full { from: t0 },
            Node::Explicit(cs) => match cs.last() {
                None => Tail::Empty { from: t0 },
                Some(c) => Tail::Empty {
                    from: c.hi.exact().unwrap_or_else(|| Q::from_integer(c.hi.to_f64().ceil() as i128)).max(t0),
                },
            },
            Node::Ray(from) => Tail::Full {
                from: from.exact().unwrap_or_else(|| Q::from_integer(from.to_f64().ceil() as i128)).max(t0),
            },
            Node::Indices(p) => match (p.max_index(), p, ts.kind()) {
                (Some(k), _, _) => Tail::Empty {
                    from: ts.point_at(k.max(1)).and_then(|r| r.exact()).unwrap_or(t0),
                },
                // An arithmetic progression of grid points repeats every `step` points.
                (None, IndexPattern::Arithmetic { first, step }, Kind::UniformGrid { step: h }) if *step > 0 => Tail::Periodic {
                    period: h * Q::from_integer(*step as i128),
                    base: t0 + h * Q::from_integer(*first as i128 - 1),
                },
                (None, _, _) => Tail::Unknown,
            },
            Node::Blocks { start, period, .. } => Tail::Periodic {
                period: *period,
                base: (*start).max(t0),
            },
            Node::Exceed { .. } => Tail::Unknown,
            Node::Union(xs) => xs.iter().map(|s| s.tail(ts)).fold(Tail::Empty { from: t0 }, Tail::union),
            Node::Intersection(xs) => xs.iter().map(|s| s.tail(ts)).fold(Tail::Full { from: t0 }, Tail::intersection),
            Node::Complement(s) => s.tail(ts).complement(),
        }
    }

    /// A common period of the set and the scale, with the shift-invariance
    /// base, when the set's tail is periodic with the scale's own pattern.
    pub fn scale_period(&self, ts: &TimeScale) -> Option<(Q, Q)> {
        let (period, base) = match self.tail(ts) {
            Tail::Periodic { period, base } => (period, base),
            Tail::Empty { from } | Tail::Full { from } => match ts.periodicity() {
                Periodicity::Any { .. } => (Q::from_integer(1), from),
                Periodicity::Period { period, .. } => (period, from),
                Periodicity::Aperiodic => return None,
            },
            Tail::Unknown => return None,
        };
        match ts.periodicity() {
            Periodicity::Any { base: b } => Some((period, base.max(b))),
            Periodicity::Period { period: p, base: b } => Some((lcm_q(&period, &p)?, base.max(b))),
            Periodicity::Aperiodic => None,
        }
    }

    /// The union without its parts of known bound. Removing a bounded part
    /// changes neither boundedness nor density.
    pub fn without_bounded_parts(&self, ts: &TimeScale, cfg: &ResolveConfig) -> Result<TsSet> {
        let Node::Union(xs) = &*self.node else {
            return Ok(self.clone());
        };
        let mut rest = Vec::with_capacity(xs.len());
        for s in xs {
            if !matches!(s.bound(ts, cfg)?, Bound::Empty | Bound::Known(_)) {
                rest.push(s.without_bounded_parts(ts, cfg)?);
            }
        }
        Ok(TsSet::union_all(rest))
    }

    /// Structural upper bound.
    pub fn bound(&self, ts: &TimeScale, cfg: &ResolveConfig) -> Result<Bound> {
        match &*self.node {
            Node::Union(xs) => {
                let mut hi: Option<Real> = None;
                let mut unknown = false;
                for s in xs {
                    match s.bound(ts, cfg)? {
                        Bound::Unbounded => return Ok(Bound::Unbounded),
                        Bound::Unknown => unknown = true,
                        Bound::Empty => {}
                        Bound::Known(h) => hi = Some(hi.map_or(h, |x| if h > x { h } else { x })),
                    }
                }
                if !unknown {
                    return Ok(hi.map_or(Bound::Empty, Bound::Known));
                }
            }
            Node::Intersection(xs) => {
                // One bounded operand bounds the whole intersection.
                let mut cap: Option<Real> = None;
                for s in xs {
                    match s.bound(ts, cfg)? {
                        Bound::Empty => return Ok(Bound::Empty),
                        Bound::Known(h) => cap = Some(cap.map_or(h, |x| if h < x { h } else { x })),
                        Bound::Unbounded | Bound::Unknown => {}
                    }
                }
                if let Some(cap) = cap {
                    return Ok(match self.resolve(ts, &cap, cfg)?.last() {
                        None => Bound::Empty,
                        Some(c) => Bound::Known(c.hi),
                    });
                }
            }
            _ => {}
        }
        Ok(match self.tail(ts) {
            Tail::Empty { from } => {
                let r = self.resolve(ts, &Real::Exact(from), cfg)?;
                match r.last() {
                    None => Bound::Empty,
                    Some(c) => Bound::Known(c.hi),
                }
            }
            Tail::Full { .. } => Bound::Unbounded,
            Tail::Periodic { .. } => match self.scale_period(ts) {
                Some((period, base)) => {
                    let start = ts.ceil_in(&Real::Exact(base));
                    let end = start + Real::Exact(period) + Real::Exact(period);
                    let r = self.resolve(ts, &end, cfg)?;
                    if r.iter().any(|c| c.hi >= start) {
                        Bound::Unbounded
                    } else {
                        match r.last() {
                            None => Bound::Empty,
                            Some(c) => Bound::Known(c.hi),
                        }
                    }
                }
                None => Bound::Unknown,
            },
            Tail::Unknown => Bound::Unknown,
        })
    }
}

impl fmt::Display for TsSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.label {
            return write!(f, "{l}");
        }
        match &*self.node {
            Node::Empty => write!(f, "∅"),
            Node::Full => write!(f, "T"),
            Node::Explicit(cs) => {
                let parts: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
                write!(f, "{}", parts.join(" ∪ "))
            }
            Node::Ray(from) => write!(f, "[{from}, ∞)"),
            Node::Indices(p) => write!(f, "{p}"),
            Node::Blocks { start, period, on } => write!(
                f,
                "blocks(start={}, period={}, on={})",
                Real::Exact(*start),
                Real::Exact(*period),
                Real::Exact(*on)
            ),
            Node::Exceed { f: func, level, eps } => write!(f, "{{|{func} - {level}| >= {eps}}}"),
            Node::Union(xs) => {
                let parts: Vec<String> = xs.iter().map(|s| s.to_string()).collect();
                write!(f, "({})", parts.join(" ∪ "))
            }
            Node::Intersection(xs) => {
                let parts: Vec<String> = xs.iter().map(|s| s.to_string()).collect();
                write!(f, "({})", parts.join(" ∩ "))
            }
            Node::Complement(s) => write!(f, "T∖{s}"),
        }
    }
}

impl fmt::Debug for TsSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TsSet({self})")
    }
}

// ---------------------------------------------------------------------------
// Component-list algebra. Lists are sorted and pairwise disjoint, with no two
// members touching in a way that would let them merge.

fn cmp_real(a: &Real, b: &Real) -> std::cmp::Ordering {
    a.partial_cmp(b).expect("finite reals")
}

/// Sorts and merges overlapping or touching components.
pub fn normalize(mut cs: Vec<Component>) -> Vec<Component> {
    cs.sort_by(|a, b| cmp_real(&a.lo, &b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
    let mut out: Vec<Component> = Vec::with_capacity(cs.len());
    for c in cs {
        if let Some(cur) = out.last_mut() {
            let touches = c.lo < cur.hi || (c.lo == cur.hi && (cur.hi_closed || c.lo_closed));
            if touches {
                if c.hi > cur.hi {
                    cur.hi = c.hi;
                    cur.hi_closed = c.hi_closed;
                } else if c.hi == cur.hi {
                    cur.hi_closed |= c.hi_closed;
                }
                continue;
            }
        }
        out.push(c);
    }
    out
}

pub fn union(a: &[Component], b: &[Component]) -> Vec<Component> {
    normalize(a.iter().chain(b).copied().collect())
}

pub fn intersect(a: &[Component], b: &[Component]) -> Vec<Component> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (x, y) = (&a[i], &b[j]);
        let (lo, lo_closed) = if x.lo > y.lo {
            (x.lo, x.lo_closed)
        } else if y.lo > x.lo {
            (y.lo, y.lo_closed)
        } else {
            (x.lo, x.lo_closed && y.lo_closed)
        };
        let (hi, hi_closed) = if x.hi < y.hi {
            (x.hi, x.hi_closed)
        } else if y.hi < x.hi {
            (y.hi, y.hi_closed)
        } else {
            (x.hi, x.hi_closed && y.hi_closed)
        };
        if let Some(c) = Component::new(lo, hi, lo_closed, hi_closed) {
            out.push(c);
        }
        if x.hi < y.hi {
            i += 1;
        } else if y.hi < x.hi {
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out
}

/// `a` strictly precedes `b` with no common point.
fn precedes(a: &Component, b: &Component) -> bool {
    a.hi < b.lo || (a.hi == b.lo && !(a.hi_closed && b.lo_closed))
}

pub fn difference(a: &[Component], b: &[Component]) -> Vec<Component> {
    let mut out = Vec::new();
    let mut j = 0;
    for c in a {
        while j < b.len() && precedes(&b[j], c) {
            j += 1;
        }
        let (mut lo, mut lo_closed) = (c.lo, c.lo_closed);
        let mut covered = false;
        let mut k = j;
        while k < b.len() && !precedes(c, &b[k]) {
            let d = &b[k];
            if d.lo >= lo {
                if let Some(p) = Component::new(lo, d.lo, lo_closed, !d.lo_closed) {
                    out.push(p);
                }
            }
            if d.hi > c.hi || (d.hi == c.hi && (d.hi_closed || !c.hi_closed)) {
                covered = true;
                break;
            }
            if d.hi >= lo {
                lo = d.hi;
                lo_closed = !d.hi_closed;
            }
            k += 1;
        }
        if !covered {
            if let Some(p) = Component::new(lo, c.hi, lo_closed, c.hi_closed) {
                out.push(p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::q;

    fn r(n: i128) -> Real {
        Real::int(n)
    }

    fn cfg() -> ResolveConfig {
        ResolveConfig::default()
    }

    #[test]
    fn algebra_on_real_line() {
        let a = vec![Component::closed(r(0), r(4))];
        let b = vec![Component::closed(r(1), r(2)), Component::point(r(3))];
        let d = difference(&a, &b);
        assert_eq!(
            d,
            vec![
                Component::new(r(0), r(1), true, false).unwrap(),
                Component::new(r(2), r(3), false, false).unwrap(),
                Component::new(r(3), r(4), false, true).unwrap(),
            ]
        );
        assert_eq!(union(&d, &b), a);
        assert!(intersect(&d, &b).is_empty());
    }

    #[test]
    fn normalize_merges_touching() {
        let cs = vec![
            Component::new(r(2), r(3), false, true).unwrap(),
            Component::new(r(0), r(2), true, false).unwrap(),
        ];
        assert_eq!(normalize(cs.clone()).len(), 2);
        let mut with_point = cs;
        with_point.push(Component::point(r(2)));
        assert_eq!(normalize(with_point), vec![Component::closed(r(0), r(3))]);
    }

    #[test]
    fn blocks_on_continuous_ray() {
        let t = TimeScale::continuous(q(1, 1)).unwrap();
        let s = TsSet::blocks(q(2, 1), q(2, 1), q(1, 1)).unwrap();
        let got = s.resolve(&t, &r(9), &cfg()).unwrap();
        assert_eq!(
            got,
            vec![
                Component::closed(r(2), r(3)),
                Component::closed(r(4), r(5)),
                Component::closed(r(6), r(7)),
                Component::closed(r(8), r(9)),
            ]
        );
        assert!(s.contains(&t, &Real::from(q(5, 2))).unwrap());
        assert!(!s.contains(&t, &Real::from(q(7, 2))).unwrap());
    }

    #[test]
    fn indices_need_discrete_scale() {
        let t = TimeScale::continuous(q(1, 1)).unwrap();
        let s = TsSet::indices(IndexPattern::Squares);
        assert!(s.resolve(&t, &r(10), &cfg()).is_err());
        let g = TimeScale::uniform(q(1, 1), q(1, 1)).unwrap();
        let got = s.resolve(&g, &r(30), &cfg()).unwrap();
        let pts: Vec<Real> = got.iter().map(|c| c.lo).collect();
        assert_eq!(pts, vec![r(1), r(4), r(9), r(16), r(25)]);
    }

    #[test]
    fn complement_within_pattern_scale() {
        let t = TimeScale::periodic(q(1, 1), q(1, 1), q(2, 1)).unwrap();
        let s = TsSet::interval(Real::from(q(3, 2)), r(4));
        let c = s.complement().resolve(&t, &r(5), &cfg()).unwrap();
        assert_eq!(
            c,
            vec![
                Component::new(r(1), Real::from(q(3, 2)), true, false).unwrap(),
                Component::new(r(4), r(5), false, true).unwrap(),
            ]
        );
    }

    #[test]
    fn tails_and_bounds() {
        let g = TimeScale::uniform(q(1, 1), q(1, 1)).unwrap();
        let c = cfg();
        assert_eq!(TsSet::interval(r(1), r(100)).bound(&g, &c).unwrap(), Bound::Known(r(100)));
        assert_eq!(TsSet::full().bound(&g, &c).unwrap(), Bound::Unbounded);
        assert_eq!(TsSet::ray(r(7)).complement().bound(&g, &c).unwrap(), Bound::Known(r(6)));
        assert_eq!(TsSet::indices(IndexPattern::evens()).bound(&g, &c).unwrap(), Bound::Unbounded);
        assert_eq!(TsSet::indices(IndexPattern::Squares).bound(&g, &c).unwrap(), Bound::Unknown);
        let gaps = TsSet::blocks(Q::new(3, 2), q(2, 1), q(1, 4)).unwrap();
        assert_eq!(gaps.bound(&g, &c).unwrap(), Bound::Empty);
        let odd = TsSet::blocks(q(1, 1), q(2, 1), q(0, 1)).unwrap();
        assert_eq!(odd.bound(&g, &c).unwrap(), Bound::Unbounded);
        assert_eq!(odd.scale_period(&g), Some((q(2, 1), q(1, 1))));
    }

    #[test]
    fn index_patterns() {
        assert!(IndexPattern::Squares.contains(49));
        assert!(!IndexPattern::Squares.contains(50));
        assert!(IndexPattern::Cubes.contains(27));
        assert!(IndexPattern::Primes.contains(97));
        assert!(!IndexPattern::Primes.contains(91));
        assert!(IndexPattern::Powers { base: 2 }.contains(64));
        assert_eq!(IndexPattern::Primes.upto(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(IndexPattern::evens().upto(7), vec![2, 4, 6]);
        assert_eq!(IndexPattern::explicit(vec![5, 1, 5]).upto(10), vec![1, 5]);
    }
}
