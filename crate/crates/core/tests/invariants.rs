use proptest::prelude::*;

use tsconv::ideal::{Ideal, Membership};
use tsconv::measure::{measure_interval, measure_set_window, IntervalKind};
use tsconv::real::q;
use tsconv::set::{IndexPattern, TsSet};
use tsconv::settings::Settings;
use tsconv::{Real, TimeScale};

fn scales() -> Vec<TimeScale> {
    vec![
        TimeScale::continuous(q(1, 1)).unwrap(),
        TimeScale::uniform(q(1, 1), q(1, 2)).unwrap(),
        TimeScale::geometric(q(1, 1), q(3, 2)).unwrap(),
        TimeScale::periodic(q(1, 1), q(1, 1), q(2, 1)).unwrap(),
    ]
}

/// Some point of `ts` near `x`.
fn snap(ts: &TimeScale, x: i128) -> Real {
    ts.floor_in(&Real::int(x)).unwrap_or_else(|| ts.t0())
}

fn pattern() -> impl Strategy<Value = IndexPattern> {
    prop_oneof![
        Just(IndexPattern::Squares),
        Just(IndexPattern::Cubes),
        Just(IndexPattern::Primes),
        (1u64..5, 1u64..6).prop_map(|(first, step)| IndexPattern::Arithmetic { first, step }),
        prop::collection::vec(1u64..200, 0..12).prop_map(IndexPattern::explicit),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma_is_never_below_t(s in 0usize..4, x in 1i128..500) {
        let ts = &scales()[s];
        let t = snap(ts, x);
        let sigma = ts.sigma(&t).unwrap();
        prop_assert!(sigma >= t);
        prop_assert!(ts.contains(&sigma));
        prop_assert_eq!(ts.graininess(&t).unwrap(), sigma - t);
    }

    #[test]
    fn decomposition_is_sorted_and_inside(s in 0usize..4, x in 1i128..300, len in 0i128..300) {
        let ts = &scales()[s];
        let (a, b) = (snap(ts, x), snap(ts, x + len));
        let cs = ts.decompose_window(&a, &b).unwrap();
        for c in &cs {
            prop_assert!(c.lo >= a && c.hi <= b);
            prop_assert!(ts.contains(&c.lo) && ts.contains(&c.hi));
        }
        for w in cs.windows(2) {
            prop_assert!(w[0].hi < w[1].lo);
        }
    }

    #[test]
    fn half_open_measure_is_additive(s in 0usize..4, x in 1i128..200, l1 in 0i128..200, l2 in 0i128..200) {
        let ts = &scales()[s];
        let (a, b, c) = (snap(ts, x), snap(ts, x + l1), snap(ts, x + l1 + l2));
        let m = |u: &Real, v: &Real| measure_interval(ts, IntervalKind::HalfOpenLr, u, v).unwrap().value;
        prop_assert_eq!(m(&a, &b) + m(&b, &c), m(&a, &c));
    }

    #[test]
    fn closed_measure_dominates_open(s in 0usize..4, x in 1i128..200, len in 0i128..200) {
        let ts = &scales()[s];
        let (a, b) = (snap(ts, x), snap(ts, x + len));
        let m = |k| measure_interval(ts, k, &a, &b).unwrap().value;
        prop_assert!(m(IntervalKind::Closed) >= m(IntervalKind::HalfOpenLr));
        prop_assert!(m(IntervalKind::Closed) >= m(IntervalKind::HalfOpenRl));
        prop_assert!(m(IntervalKind::HalfOpenLr) >= m(IntervalKind::Open));
    }

    #[test]
    fn window_measure_is_monotone_and_subadditive(p1 in pattern(), p2 in pattern(), t in 1i128..400) {
        let ts = TimeScale::uniform(q(1, 1), q(1, 1)).unwrap();
        let (a, b) = (TsSet::indices(p1), TsSet::indices(p2));
        let t = Real::int(t);
        let m = |s: &TsSet| measure_set_window(&ts, s, &t).unwrap().value;
        let (ma, mb, mu, mi) = (m(&a), m(&b), m(&a.union(&b)), m(&a.intersection(&b)));
        prop_assert!(mi <= ma && ma <= mu);
        prop_assert_eq!(mu + mi, ma + mb);
    }

    #[test]
    fn set_algebra_matches_pointwise_logic(p1 in pattern(), p2 in pattern(), x in 1i128..300) {
        let ts = TimeScale::uniform(q(1, 1), q(1, 1)).unwrap();
        let (a, b) = (TsSet::indices(p1), TsSet::indices(p2));
        let x = Real::int(x);
        let has = |s: &TsSet| s.contains(&ts, &x).unwrap();
        prop_assert_eq!(has(&a.union(&b)), has(&a) || has(&b));
        prop_assert_eq!(has(&a.intersection(&b)), has(&a) && has(&b));
        prop_assert_eq!(has(&a.difference(&b)), has(&a) && !has(&b));
        prop_assert_eq!(has(&a.complement()), !has(&a));
        prop_assert_eq!(has(&a.symmetric_difference(&b)), has(&a) != has(&b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn filter_is_dual_to_ideal(lo in 1i128..50, len in 0i128..100, from in 1i128..100, pick in 0usize..3) {
        let ts = TimeScale::uniform(q(1, 1), q(1, 1)).unwrap();
        let settings = Settings::default().with_t_max(Real::int(1 << 12));
        let s = match pick {
            0 => TsSet::interval(Real::int(lo), Real::int(lo + len)),
            1 => TsSet::ray(Real::int(from)),
            _ => TsSet::interval(Real::int(lo), Real::int(lo + len)).union(&TsSet::ray(Real::int(from + 200))),
        };
        for ideal in [Ideal::bounded(&ts), Ideal::density_zero(&ts)] {
            let via_filter = ideal.filter().contains(&s, &settings).unwrap();
            prop_assert_eq!(via_filter, ideal.membership(&s.complement(), &settings).unwrap());
        }
        let bounded = Ideal::bounded(&ts);
        let want = if pick == 0 { Membership::In } else { Membership::NotIn };
        prop_assert_eq!(bounded.membership(&s, &settings).unwrap(), want);
    }

    #[test]
    fn subsets_of_members_are_members(p in pattern(), k in 1i128..200) {
        let ts = TimeScale::uniform(q(1, 1), q(1, 1)).unwrap();
        let settings = Settings::default().with_t_max(Real::int(1 << 14));
        let ideal = Ideal::density_zero(&ts);
        let sparse = TsSet::indices(IndexPattern::Squares);
        let sub = sparse.intersection(&TsSet::indices(p)).union(&TsSet::interval(Real::int(1), Real::int(k)));
        prop_assert_ne!(ideal.membership(&sub, &settings).unwrap(), Membership::NotIn);
    }
}
