//! Density of a set along the windows `[t0, t]_T`.
//!
//! Sets whose tail repeats with the scale's own period get an exact value.
//! Everything else is sampled on a geometric grid anchored at the horizon and
//! classified from the behaviour of the ratios within and across epochs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{component_measure, components_measure};
use crate::real::{Real, RealSum};
use crate::set::{Tail, TsSet};
use crate::settings::{ResolveConfig, Settings};
use crate::timescale::{Component, TimeScale};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityOutcome {
    Exact { value: Real },
    Estimated { value: f64, halfwidth: f64 },
    DoesNotExist { liminf: f64, limsup: f64 },
    Inconclusive { reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub t: Real,
    pub ratio: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityResult {
    pub outcome: DensityOutcome,
    pub trace: Vec<TracePoint>,
}

/// `μ_Δ(S(t)) / μ_Δ([t0, t]_T)` at every grid point, each snapped down into `ts`.
pub fn density_trace(ts: &TimeScale, s: &TsSet, grid: &[Real], cfg: &ResolveConfig) -> Result<Vec<TracePoint>> {
    s.validate(ts)?;
    if grid.is_empty() {
        return Err(Error::PreconditionFailed("density grid is empty".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::PreconditionFailed("density grid must be strictly increasing".into()));
    }
    let t0 = ts.t0();
    let mut snapped = Vec::with_capacity(grid.len());
    for t in grid {
        let tt = ts.floor_in(t).ok_or_else(|| Error::InvalidWindow {
            a: t0.to_string(),
            b: t.to_string(),
        })?;
        if (ts.sigma_unchecked(&tt) - t0).is_zero() {
            return Err(Error::ZeroDenominator(tt.to_string()));
        }
        snapped.push(tt);
    }
    let cs = s.resolve(ts, snapped.last().expect("nonempty"), cfg)?;
    let mut full = RealSum::new();
    let mut i = 0;
    let mut out = Vec::with_capacity(snapped.len());
    for tt in snapped {
        while i < cs.len() && cs[i].hi <= tt {
            full.add(component_measure(ts, &cs[i]));
            i += 1;
        }
        let mut m = full.clone();
        if let Some(c) = cs.get(i) {
            if c.lo < tt || (c.lo == tt && c.lo_closed) {
                let clip = Component {
                    lo: c.lo,
                    hi: tt,
                    lo_closed: c.lo_closed,
                    hi_closed: true,
                };
                m.add(component_measure(ts, &clip));
            }
        }
        let w = ts.sigma_unchecked(&tt) - t0;
        let mut ratio = m.value() / w;
        if !ratio.is_exact() {
            ratio = Real::approx(ratio.to_f64().clamp(0.0, 1.0));
        }
        out.push(TracePoint { t: tt, ratio });
    }
    Ok(out)
}

/// Geometric grid ending at the horizon: `horizon / 2^(j/sub)` snapped into
/// `ts`, ascending, each tagged with its epoch counted back from the horizon.
/// Epoch `q` ends at `horizon / 2^q`.
pub fn default_grid(ts: &TimeScale, settings: &Settings) -> Vec<(u32, Real)> {
    let horizon = settings.horizon(ts);
    let t0 = ts.t0();
    let sub = settings.density.subsamples.max(1);
    let h = horizon.to_f64();
    let mut pts: Vec<(u32, Real)> = Vec::new();
    let max_j = settings.density.epochs * sub;
    for j in 0..=max_j {
        let t = if j == 0 {
            horizon
        } else if j % sub == 0 {
            horizon / Real::Exact(num_rational::Ratio::from_integer(1i128 << (j / sub).min(120)))
        } else {
            Real::approx(h / 2f64.powf(j as f64 / sub as f64))
        };
        if t < t0 {
            break;
        }
        let Some(tt) = ts.floor_in(&t) else { break };
        if (ts.sigma_unchecked(&tt) - t0).is_zero() {
            break;
        }
        pts.push((j / sub, tt));
    }
    pts.reverse();
    pts.dedup_by(|b, a| a.1 == b.1);
    pts
}

fn exact_density(ts: &TimeScale, s: &TsSet, cfg: &ResolveConfig) -> Result<Option<Real>> {
    match s.tail(ts) {
        Tail::Empty { .. } => return Ok(Some(Real::zero())),
        Tail::Full { .. } => return Ok(Some(Real::int(1))),
        _ => {}
    }
    let Some((period, base)) = s.scale_period(ts) else {
        return Ok(None);
    };
    let t1 = ts.ceil_in(&Real::Exact(base));
    let t2 = t1 + Real::Exact(period);
    if !ts.contains(&t2) {
        return Ok(None);
    }
    let cs = s.resolve(ts, &t2, cfg)?;
    let upto = |t: &Real| -> Real {
        let clipped: Vec<Component> = cs
            .iter()
            .filter_map(|c| {
                if c.lo > *t || (c.lo == *t && !c.lo_closed) {
                    None
                } else if c.hi <= *t {
                    Some(*c)
                } else {
                    Some(Component {
                        lo: c.lo,
                        hi: *t,
                        lo_closed: c.lo_closed,
                        hi_closed: true,
                    })
                }
            })
            .collect();
        components_measure(ts, &clipped)
    };
    let m = upto(&t2) - upto(&t1);
    let w = ts.sigma_unchecked(&t2) - ts.sigma_unchecked(&t1);
    Ok(Some(m / w))
}

pub fn density(ts: &TimeScale, s: &TsSet, settings: &Settings) -> Result<DensityResult> {
    s.validate(ts)?;
    if let Some(v) = exact_density(ts, s, &settings.resolve)? {
        return Ok(DensityResult {
            outcome: DensityOutcome::Exact { value: v },
            trace: Vec::new(),
        });
    }
    let grid = default_grid(ts, settings);
    let ts_only: Vec<Real> = grid.iter().map(|(_, t)| *t).collect();
    let trace = density_trace(ts, s, &ts_only, &settings.resolve)?;
    let t0 = ts.t0();
    let tagged: Vec<(u32, f64, f64)> = grid
        .iter()
        .zip(&trace)
        .map(|((q, t), p)| (*q, p.ratio.to_f64(), (ts.sigma_unchecked(t) - t0).to_f64()))
        .collect();
    Ok(DensityResult {
        outcome: classify(&tagged, settings.density.tol),
        trace,
    })
}

const TREND_SAFETY: f64 = 4.0;

/// Full epochs used by the trend fit.
const FIT_EPOCHS: usize = 8;

/// Weighted least-squares fit of `c + a ρ^q` to per-epoch densities `(d_q, w_q)`
/// with `q` counted back from the horizon, scanning `ρ` over (1, 4]. Returns
/// `c` and a halfwidth covering both its standard error and its spread over
/// every `ρ` the data cannot rule out.
fn trend_fit(series: &[(f64, f64)]) -> Option<(f64, f64)> {
    let k = series.len();
    if k < 4 {
        return None;
    }
    let fits: Vec<(f64, f64, f64)> = (1..=300)
        .filter_map(|i| {
            let rho = 1.0 + i as f64 / 100.0;
            let (mut sw, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (q, &(d, w)) in series.iter().enumerate() {
                let (w2, x) = (w * w, rho.powi(q as i32));
                sw += w2;
                sx += w2 * x;
                sxx += w2 * x * x;
                sy += w2 * d;
                sxy += w2 * x * d;
            }
            let det = sw * sxx - sx * sx;
            if det <= 1e-12 * sw * sxx {
                return None;
            }
            let c = (sxx * sy - sx * sxy) / det;
            let a = (sw * sxy - sx * sy) / det;
            let sse: f64 = series
                .iter()
                .enumerate()
                .map(|(q, &(d, w))| (w * (d - c - a * rho.powi(q as i32))).powi(2))
                .sum();
            Some((c, sse, sxx / det))
        })
        .collect();
    let &(c, sse, var_factor) = fits.iter().min_by(|a, b| a.1.total_cmp(&b.1))?;
    let sigma2 = sse / (k - 2) as f64;
    let spread = fits
        .iter()
        .filter(|f| f.1 <= sse + 4.0 * sigma2)
        .map(|f| (f.0 - c).abs())
        .fold(0.0, f64::max);
    Some((c, spread + 2.0 * (sigma2 * var_factor).sqrt()))
}

/// Classifies a trace of `(epoch, ratio, window measure)` with epochs
/// counted back from the horizon.
///
/// Trends are fitted to the density inside each epoch rather than the
/// cumulative ratio, which cancels any finite head of the set exactly.
pub(crate) fn classify(points: &[(u32, f64, f64)], tol: f64) -> DensityOutcome {
    // epochs[q] holds the ratios of epoch q, ascending in t.
    let mut epochs: Vec<Vec<f64>> = Vec::new();
    let mut mass: Vec<(f64, f64)> = Vec::new();
    for &(q, r, w) in points {
        let q = q as usize;
        if epochs.len() <= q {
            epochs.resize(q + 1, Vec::new());
            mass.resize(q + 1, (0.0, 0.0));
        }
        epochs[q].push(r);
        mass[q] = (r * w, w);
    }
    // Drop the partial epoch next to t0 and any empty tail.
    while epochs.last().is_some_and(|e| e.is_empty()) {
        epochs.pop();
    }
    if epochs.len() > 4 {
        epochs.pop();
    }
    if epochs.len() < 4 || epochs.iter().any(|e| e.is_empty()) {
        return DensityOutcome::Inconclusive {
            reason: format!("only {} full epochs before the horizon", epochs.len()),
        };
    }
    let end = |q: usize| *epochs[q].last().expect("nonempty");
    let window = |q: usize| -> (f64, f64) {
        let mut lo = end(q + 1);
        let mut hi = lo;
        for &r in &epochs[q] {
            lo = lo.min(r);
            hi = hi.max(r);
        }
        (lo, hi)
    };
    let (lo0, hi0) = window(0);
    let osc = hi0 - lo0;
    // Density inside each full epoch, newest first, with the epoch's width.
    let per_epoch: Vec<(f64, f64)> = (0..epochs.len() - 1)
        .map(|q| {
            let w = mass[q].1 - mass[q + 1].1;
            ((mass[q].0 - mass[q + 1].0) / w, w)
        })
        .take_while(|(_, w)| *w > 0.0)
        .take(FIT_EPOCHS)
        .collect();
    // A trend the model captures gives the same limit from older epochs.
    let fit = trend_fit(&per_epoch).map(|(v, hw)| match per_epoch.get(2..).and_then(trend_fit) {
        Some((older, _)) => (v, hw + (v - older).abs()),
        None => (v, hw),
    });
    if let Some((v, hw)) = fit {
        if hw < osc.max(tol) {
            return DensityOutcome::Estimated {
                value: v.clamp(0.0, 1.0),
                halfwidth: hw,
            };
        }
    }
    // Sets that only start a few epochs before the horizon defeat the fit;
    // their cumulative ratios still approach the limit geometrically.
    let (d0, d1, d2) = (end(2) - end(3), end(1) - end(2), end(0) - end(1));
    let ratio = |a: f64, b: f64| (a != 0.0 && a * b > 0.0).then(|| b / a).filter(|r| *r <= 0.9);
    if let (Some(r1), Some(r2)) = (ratio(d0, d1), ratio(d1, d2)) {
        if (r1 - r2).abs() <= 0.25 {
            let v = end(0) + d2 * r2 / (1.0 - r2);
            let v_prev = end(1) + d1 * r1 / (1.0 - r1);
            let spread = (v - v_prev).abs();
            if spread < osc.max(tol) {
                // Mixed decay rates bias this extrapolation by several
                // times the spread of consecutive estimates.
                return DensityOutcome::Estimated {
                    value: v.clamp(0.0, 1.0),
                    halfwidth: TREND_SAFETY * spread,
                };
            }
        }
    }
    if osc < tol {
        // The limit lies between the last ratio and the fitted trend.
        let (lo, hi) = match fit {
            Some((v, hw)) => (end(0).min(v - hw), end(0).max(v + hw)),
            None => {
                let d = (end(0) - end(1)).abs();
                (end(0) - d, end(0) + d)
            }
        };
        let (lo, hi) = (lo - osc, hi + osc);
        return DensityOutcome::Estimated {
            value: (lo + hi) / 2.0,
            halfwidth: (hi - lo) / 2.0,
        };
    }
    const STABLE_EPOCHS: usize = 5;
    if epochs.len() > STABLE_EPOCHS {
        let wins: Vec<(f64, f64)> = (0..STABLE_EPOCHS).map(window).collect();
        let spread = |xs: &mut dyn Iterator<Item = f64>| {
            let v: Vec<f64> = xs.collect();
            let (mn, mx) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            (mn, mx, mean)
        };
        let (lo_min, lo_max, lo_mean) = spread(&mut wins.iter().map(|w| w.0));
        let (hi_min, hi_max, hi_mean) = spread(&mut wins.iter().map(|w| w.1));
        let stable = lo_max - lo_min <= 0.1 * lo_mean.max(tol) && hi_max - hi_min <= 0.1 * hi_mean.max(tol);
        if stable && hi_mean - lo_mean > 3.0 * tol {
            return DensityOutcome::DoesNotExist {
                liminf: lo_min,
                limsup: hi_max,
            };
        }
    }
    DensityOutcome::Inconclusive {
        reason: format!("last epoch oscillates by {osc:.3e} without a stable pattern"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::MeasurableFn;
    use crate::real::q;
    use crate::set::IndexPattern;

    fn grid() -> TimeScale {
        TimeScale::uniform(q(1, 1), q(1, 1)).unwrap()
    }

    #[test]
    fn full_set_ratios_are_one() {
        let ray = TimeScale::continuous(q(1, 1)).unwrap();
        let g: Vec<Real> = (2..20).map(Real::int).collect();
        for p in density_trace(&ray, &TsSet::full(), &g, &ResolveConfig::default()).unwrap() {
            assert_eq!(p.ratio, Real::int(1));
        }
    }

    #[test]
    fn evens_trace_is_exact_counting() {
        let g: Vec<Real> = (1..200).map(Real::int).collect();
        let tr = density_trace(&grid(), &TsSet::indices(IndexPattern::evens()), &g, &ResolveConfig::default()).unwrap();
        for (n, p) in (1..200i128).zip(&tr) {
            assert_eq!(p.ratio, Real::Exact(q(n / 2, n)));
        }
    }

    #[test]
    fn trace_rejects_bad_grids() {
        let s = TsSet::full();
        let cfg = ResolveConfig::default();
        assert!(density_trace(&grid(), &s, &[], &cfg).is_err());
        assert!(density_trace(&grid(), &s, &[Real::int(3), Real::int(2)], &cfg).is_err());
        let ray = TimeScale::continuous(q(1, 1)).unwrap();
        assert!(matches!(density_trace(&ray, &s, &[Real::int(1)], &cfg), Err(Error::ZeroDenominator(_))));
    }

    #[test]
    fn periodic_blocks_exact() {
        let ray = TimeScale::continuous(q(1, 1)).unwrap();
        let b = TsSet::blocks(q(2, 1), q(2, 1), q(1, 1)).unwrap();
        let d = density(&ray, &b, &Settings::default()).unwrap();
        assert_eq!(d.outcome, DensityOutcome::Exact { value: Real::Exact(q(1, 2)) });
        let c = density(&ray, &b.complement(), &Settings::default()).unwrap();
        assert_eq!(c.outcome, DensityOutcome::Exact { value: Real::Exact(q(1, 2)) });
        assert_eq!(
            density(&grid(), &TsSet::empty(), &Settings::default()).unwrap().outcome,
            DensityOutcome::Exact { value: Real::zero() }
        );
    }

    #[test]
    fn squares_estimate_zero() {
        let s = Settings::default().with_t_max(Real::int(1_000_000));
        let d = density(&grid(), &TsSet::indices(IndexPattern::Squares), &s).unwrap();
        match d.outcome {
            DensityOutcome::Estimated { value, halfwidth } => {
                assert!(value <= 1e-2);
                assert!(value + halfwidth < 1e-3, "{value} {halfwidth}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn finite_head_does_not_bias_the_limit() {
        let s = Settings::default().with_t_max(Real::int(100_000));
        let sq = TsSet::indices(IndexPattern::Squares);
        for k in [1, 34, 500] {
            let x = sq.union(&TsSet::interval(Real::int(1), Real::int(k)));
            match density(&grid(), &x, &s).unwrap().outcome {
                DensityOutcome::Estimated { value, halfwidth } if k < 100 => {
                    assert!(value + halfwidth < 1e-3, "{k}: {value} {halfwidth}")
                }
                // A head reaching into the fitted epochs may leave zero undecided, never excluded.
                DensityOutcome::Estimated { value, halfwidth } => assert!(value - halfwidth < 1e-3, "{k}: {value} {halfwidth}"),
                other => panic!("{k}: {other:?}"),
            }
        }
    }

    #[test]
    fn late_starting_set_has_density_one() {
        let ray = TimeScale::continuous(q(1, 1)).unwrap();
        let s = Settings::default().with_t_max(Real::int(1 << 15));
        let d = density(&ray, &TsSet::near(MeasurableFn::reciprocal(), 0.0, 1.0 / 512.0).unwrap(), &s).unwrap();
        match d.outcome {
            DensityOutcome::Estimated { value, halfwidth } => assert!(value - halfwidth > 0.99, "{value} {halfwidth}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn evens_are_exactly_half() {
        let evens = TsSet::indices(IndexPattern::evens());
        let d = density(&grid(), &evens, &Settings::default()).unwrap();
        assert_eq!(d.outcome, DensityOutcome::Exact { value: Real::from(q(1, 2)) });
        let sq = TsSet::indices(IndexPattern::Squares);
        let d = density(&grid(), &evens.union(&sq), &Settings::default()).unwrap();
        match d.outcome {
            DensityOutcome::Estimated { value, .. } => assert!((value - 0.5).abs() < 1e-3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn geometric_even_powers_oscillate() {
        let geo = TimeScale::geometric(q(1, 1), q(2, 1)).unwrap();
        let s = TsSet::indices(IndexPattern::Arithmetic { first: 1, step: 2 });
        let d = density(&geo, &s, &Settings::default()).unwrap();
        match d.outcome {
            DensityOutcome::DoesNotExist { liminf, limsup } => {
                assert!((liminf - 1.0 / 3.0).abs() < 0.02, "{liminf}");
                assert!((limsup - 2.0 / 3.0).abs() < 0.02, "{limsup}");
            }
            other => panic!("{other:?}"),
        }
    }
}
