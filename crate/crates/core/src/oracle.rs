//! Brute-force counting on uniform grids, used as ground truth.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::func::MeasurableFn;
use crate::real::{Real, Q};
use crate::timescale::{Kind, TimeScale};

/// The values `x_k = f(t0 + (k-1) h)` for `k = 1..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceView {
    pub values: Vec<f64>,
}

impl SequenceView {
    pub fn from_fn(f: &MeasurableFn, ts: &TimeScale, n: u64) -> Result<Self> {
        let Kind::UniformGrid { step } = ts.kind() else {
            return Err(Error::PreconditionFailed(format!("sequence view needs a uniform grid, got {ts}")));
        };
        let t0 = ts.t0().exact().expect("t0 is exact");
        let values = (0..n)
            .map(|k| f.eval_unchecked(ts, &Real::Exact(t0 + step * Q::from_integer(k as i128))))
            .collect::<Result<_>>()?;
        Ok(SequenceView { values })
    }

    /// 1-based indices `k` with `|x_k - level| ≥ eps`.
    pub fn exceed_indices(&self, level: f64, eps: f64) -> Vec<u64> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, x)| (*x - level).abs() >= eps)
            .map(|(i, _)| i as u64 + 1)
            .collect()
    }
}

/// `|indices ∩ [1, n]| / n`.
pub fn partial_density(indices: &[u64], n: u64) -> Result<Q> {
    if n == 0 {
        return Err(Error::PreconditionFailed("n must be at least 1".into()));
    }
    let count = indices.iter().filter(|&&k| k >= 1 && k <= n).count();
    Ok(Q::new(count as i128, n as i128))
}

/// `partial_density(indices, m)` for every `m = 1..=n`, from prefix counts.
pub fn counting_ratios(indices: &[u64], n: u64) -> Vec<Q> {
    let mut hit = vec![false; n as usize + 1];
    for &k in indices {
        if k >= 1 && k <= n {
            hit[k as usize] = true;
        }
    }
    let mut count = 0i128;
    (1..=n)
        .map(|m| {
            count += hit[m as usize] as i128;
            Q::new(count, m as i128)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatisticalTrace {
    pub holds: bool,
    /// `(N', ratio)` at powers of two up to `N`, then `N` itself.
    pub checkpoints: Vec<(u64, Real)>,
    pub final_ratio: Real,
}

pub const BRUTEFORCE_TOL: f64 = 1e-2;

/// Whether the exceedance ratio of the sequence falls below `tol` along the
/// tail of checkpoints: the final ratio is below `tol` and the last three
/// ratios are non-increasing or all below `tol`.
pub fn statistical_limit_bruteforce(values: &[f64], level: f64, eps: f64, n: u64, tol: f64) -> Result<StatisticalTrace> {
    if n == 0 || n as usize > values.len() {
        return Err(Error::PreconditionFailed(format!("need 1 ≤ n ≤ {}, got {n}", values.len())));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    let mut marks: Vec<u64> = (0..64).map(|k| 1u64 << k).take_while(|&m| m < n).collect();
    marks.push(n);
    let mut checkpoints = Vec::with_capacity(marks.len());
    let mut count = 0i128;
    let mut next = 0;
    for (i, x) in values.iter().take(n as usize).enumerate() {
        if (x - level).abs() >= eps {
            count += 1;
        }
        let k = i as u64 + 1;
        if k == marks[next] {
            checkpoints.push((k, Real::Exact(Q::new(count, k as i128))));
            next += 1;
        }
    }
    let final_ratio = checkpoints.last().expect("n is a checkpoint").1;
    let tail: Vec<f64> = checkpoints.iter().rev().take(3).map(|(_, r)| r.to_f64()).collect();
    let settling = tail.windows(2).all(|w| w[0] <= w[1]) || tail.iter().all(|r| *r < tol);
    Ok(StatisticalTrace {
        holds: final_ratio.to_f64() < tol && settling,
        checkpoints,
        final_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::q;
    use crate::set::{IndexPattern, TsSet};

    #[test]
    fn partial_density_examples() {
        assert_eq!(partial_density(&IndexPattern::evens().upto(10), 10).unwrap(), q(1, 2));
        assert_eq!(partial_density(&IndexPattern::Squares.upto(100), 100).unwrap(), q(10, 100));
        assert_eq!(partial_density(&[], 7).unwrap(), q(0, 1));
        assert!(partial_density(&[1], 0).is_err());
    }

    #[test]
    fn counting_ratios_match_pointwise() {
        let idx = IndexPattern::Primes.upto(500);
        let all = counting_ratios(&idx, 500);
        for n in [1u64, 2, 17, 100, 500] {
            assert_eq!(all[n as usize - 1], partial_density(&idx, n).unwrap());
        }
    }

    #[test]
    fn bruteforce_examples() {
        let g = TimeScale::uniform(q(1, 1), q(1, 1)).unwrap();
        let n = 1_000_000;
        let sq = SequenceView::from_fn(&MeasurableFn::indicator(TsSet::indices(IndexPattern::Squares)), &g, n).unwrap();
        let r = statistical_limit_bruteforce(&sq.values, 0.0, 0.5, n, BRUTEFORCE_TOL).unwrap();
        assert!(r.holds);
        assert_eq!(r.final_ratio, Real::Exact(q(1, 1000)));

        let ev = SequenceView::from_fn(&MeasurableFn::indicator(TsSet::indices(IndexPattern::evens())), &g, n).unwrap();
        let r = statistical_limit_bruteforce(&ev.values, 0.0, 0.5, n, BRUTEFORCE_TOL).unwrap();
        assert!(!r.holds);
        assert_eq!(r.final_ratio, Real::Exact(q(1, 2)));

        let c = vec![4.0; 1000];
        let r = statistical_limit_bruteforce(&c, 4.0, 0.1, 1000, BRUTEFORCE_TOL).unwrap();
        assert!(r.holds);
        assert!(r.checkpoints.iter().all(|(_, x)| x.is_zero()));
    }
}
