//! Resolution of exceedance sets `A(ε) = {t : |f(t) - L| ≥ ε}` into components.
//!
//! Isolated points are tested directly. Interval components are sampled on a
//! fixed step anchored at the component's left end; every sign change of
//! `|f - L| - ε` between neighbouring samples is refined by bisection.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::func::MeasurableFn;
use crate::real::Real;
use crate::set::{normalize, TsSet};
use crate::settings::ResolveConfig;
use crate::timescale::{Component, TimeScale};

/// The pair `(L, ε)` defining an exceedance set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExceedanceQuery {
    pub level: f64,
    pub eps: f64,
}

impl ExceedanceQuery {
    pub fn new(level: f64, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidEpsilon(eps));
        }
        Ok(ExceedanceQuery { level, eps })
    }

    pub fn set(&self, f: &MeasurableFn) -> Result<TsSet> {
        TsSet::exceedance(f.clone(), self.level, self.eps)
    }
}

/// `A(ε) ∩ [t0, window_end]` as an explicit set.
pub fn exceed_set(
    f: &MeasurableFn,
    query: ExceedanceQuery,
    ts: &TimeScale,
    window_end: &Real,
    cfg: &ResolveConfig,
) -> Result<TsSet> {
    ExceedanceQuery::new(query.level, query.eps)?;
    let Some(end) = ts.floor_in(window_end) else {
        return Ok(TsSet::empty());
    };
    Ok(TsSet::explicit(resolve_exceedance(f, query.level, query.eps, ts, &end, cfg)?))
}

pub(crate) enum Sampled {
    /// A run of consecutive isolated points.
    Points { at: Vec<Real>, values: Vec<f64> },
    Interval { lo: Real, hi: Real, xs: Vec<f64>, values: Vec<f64> },
}

/// Values of one function over the components of a window.
pub struct Samples {
    end: Real,
    parts: Vec<Sampled>,
}

fn sample_interval(f: &MeasurableFn, ts: &TimeScale, lo: Real, hi: Real, cfg: &ResolveConfig) -> Result<Sampled> {
    let (a, b) = (lo.to_f64(), hi.to_f64());
    let len = b - a;
    let step = cfg.scan_step.min(len / cfg.min_subsamples as f64);
    let n = ((len / step).ceil() as usize).max(1);
    let mut xs = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    xs.push(a);
    values.push(f.eval_unchecked(ts, &lo)?);
    for i in 1..n {
        let x = a + i as f64 * step;
        if x >= b {
            break;
        }
        xs.push(x);
        values.push(f.eval_unchecked(ts, &Real::approx(x))?);
    }
    xs.push(b);
    values.push(f.eval_unchecked(ts, &hi)?);
    Ok(Sampled::Interval { lo, hi, xs, values })
}

/// Samples covering at least `[t0, end]`.
///
/// On discrete scales every part is a point, so a longer cached window is
/// reused and callers stop at `end`.
fn samples(f: &MeasurableFn, ts: &TimeScale, end: &Real, cfg: &ResolveConfig) -> Result<Arc<Samples>> {
    let discrete = ts.is_discrete();
    let key = if discrete {
        format!("{ts}|points")
    } else {
        format!("{ts}|{end}|{}|{}", cfg.scan_step, cfg.min_subsamples)
    };
    if let Some(s) = f.cached_samples(&key) {
        if s.end == *end || (discrete && s.end > *end) {
            return Ok(s);
        }
    }
    let mut parts = Vec::new();
    for c in ts.decompose_window(&ts.t0(), end)? {
        if c.is_point() {
            let value = f.eval_unchecked(ts, &c.lo)?;
            if let Some(Sampled::Points { at, values }) = parts.last_mut() {
                at.push(c.lo);
                values.push(value);
            } else {
                parts.push(Sampled::Points {
                    at: vec![c.lo],
                    values: vec![value],
                });
            }
        } else {
            parts.push(sample_interval(f, ts, c.lo, c.hi, cfg)?);
        }
    }
    let s = Arc::new(Samples { end: *end, parts });
    f.store_samples(key, s.clone());
    Ok(s)
}

/// Components of `{t ≤ end : |f(t) - level| ≥ eps}`; `end` must lie in `ts`.
pub(crate) fn resolve_exceedance(
    f: &MeasurableFn,
    level: f64,
    eps: f64,
    ts: &TimeScale,
    end: &Real,
    cfg: &ResolveConfig,
) -> Result<Vec<Component>> {
    let inside = |v: f64| (v - level).abs() >= eps;
    let samples = samples(f, ts, end, cfg)?;
    let mut out = Vec::new();
    for part in &samples.parts {
        match part {
            Sampled::Points { at, values } => {
                let n = at.partition_point(|a| a <= end);
                for (a, v) in at[..n].iter().zip(values) {
                    if inside(*v) {
                        out.push(Component::point(*a));
                    }
                }
                if n < at.len() {
                    break;
                }
            }
            Sampled::Interval { lo, hi, xs, values } => {
                let flags: Vec<bool> = values.iter().map(|v| inside(*v)).collect();
                let gaps = flags.len() - 1;
                let crossings = flags.windows(2).filter(|w| w[0] != w[1]).count();
                if gaps >= 16 && crossings as f64 > cfg.max_crossing_fraction * gaps as f64 {
                    return Err(Error::ResolutionFailure {
                        lo: lo.to_f64(),
                        hi: hi.to_f64(),
                        reason: format!("{crossings} boundary crossings in {gaps} sample intervals"),
                    });
                }
                let boundary = |out_x: f64, in_x: f64| -> Result<Real> {
                    let x = bisect(f, ts, &inside, out_x, in_x, cfg.tol_root)?;
                    let scale = 1f64.max(x.abs());
                    Ok(if (x - lo.to_f64()).abs() <= cfg.snap_tol * scale {
                        *lo
                    } else if (x - hi.to_f64()).abs() <= cfg.snap_tol * scale {
                        *hi
                    } else {
                        Real::approx(x)
                    })
                };
                let mut i = 0;
                while i < flags.len() {
                    if !flags[i] {
                        i += 1;
                        continue;
                    }
                    let start = i;
                    while i + 1 < flags.len() && flags[i + 1] {
                        i += 1;
                    }
                    let left = if start == 0 { *lo } else { boundary(xs[start - 1], xs[start])? };
                    let right = if i == flags.len() - 1 { *hi } else { boundary(xs[i + 1], xs[i])? };
                    out.push(if left == right {
                        Component::point(left)
                    } else {
                        Component::closed(left, right)
                    });
                    i += 1;
                }
            }
        }
    }
    Ok(normalize(out))
}

/// Narrows `(out_x, in_x)` until shorter than `tol`; returns the inside end.
fn bisect(
    f: &MeasurableFn,
    ts: &TimeScale,
    inside: &impl Fn(f64) -> bool,
    mut out_x: f64,
    mut in_x: f64,
    tol: f64,
) -> Result<f64> {
    while (in_x - out_x).abs() > tol {
        let m = 0.5 * (in_x + out_x);
        if m == in_x || m == out_x {
            break;
        }
        if inside(f.eval_unchecked(ts, &Real::approx(m))?) {
            in_x = m;
        } else {
            out_x = m;
        }
    }
    Ok(in_x)
}
