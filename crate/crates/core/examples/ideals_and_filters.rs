//! Membership queries against the built-in ideals, their dual filters,
//! and an axiom check that catches a rule which is not an ideal.

use std::sync::Arc;

use tsconv::ideal::{check_ideal_axioms, Ideal, IdealFlags, Membership};
use tsconv::real::q;
use tsconv::set::{IndexPattern, TsSet};
use tsconv::settings::Settings;
use tsconv::{Real, TimeScale};

fn main() -> tsconv::Result<()> {
    let ts = TimeScale::uniform(q(1, 1), q(1, 1))?;
    let settings = Settings::default().with_t_max(Real::int(1 << 16));

    let sets = [
        ("[1, 50]", TsSet::interval(Real::int(1), Real::int(50))),
        ("squares", TsSet::indices(IndexPattern::Squares)),
        ("evens", TsSet::indices(IndexPattern::evens())),
        ("[100, ∞)", TsSet::ray(Real::int(100))),
    ];
    let ideals = [Ideal::bounded(&ts), Ideal::density_zero(&ts), Ideal::measure_zero(&ts)];

    print!("{:<10}", "");
    for i in &ideals {
        print!("{:>16}", i.name());
    }
    println!();
    for (name, s) in &sets {
        print!("{name:<10}");
        for i in &ideals {
            print!("{:>16}", i.membership(s, &settings)?.to_string());
        }
        println!();
    }

    let dz = &ideals[1];
    let co_squares = TsSet::indices(IndexPattern::Squares).complement();
    println!("non-squares in the density filter: {}", dz.filter().contains(&co_squares, &settings)?);

    // Generated by the squares: their subsets are in, the evens are not.
    let gen = Ideal::generated(&ts, vec![TsSet::indices(IndexPattern::Squares)], &settings)?;
    let fourth_powers = TsSet::indices(IndexPattern::explicit((1..=16u64).map(|k| k.pow(4)).collect()));
    println!(
        "generated by squares: fourth powers {}, evens {}",
        gen.membership(&fourth_powers, &settings)?,
        gen.membership(&TsSet::indices(IndexPattern::evens()), &settings)?
    );

    let samples: Vec<TsSet> = sets.iter().map(|(_, s)| s.clone()).collect();
    for i in &ideals {
        let report = check_ideal_axioms(i, &samples, &settings)?;
        println!("{}: {} checks, {} violations", i.name(), report.checks, report.violations.len());
    }

    // "At most 40 points" is closed under subsets but not under unions.
    let small = Ideal::custom(
        &ts,
        "at_most_40_points",
        IdealFlags { nontrivial: true, b_admissible: false, bap: false },
        Arc::new(|ts: &TimeScale, s: &TsSet, settings: &Settings| {
            let horizon = settings.horizon(ts);
            let count: usize = s
                .resolve(ts, &horizon, &settings.resolve)?
                .iter()
                .map(|c| ts.decompose_window(&c.lo, &c.hi).map(|v| v.len()).unwrap_or(0))
                .sum();
            Ok(if count <= 40 { Membership::In } else { Membership::NotIn })
        }),
    );
    let halves = [TsSet::interval(Real::int(1), Real::int(30)), TsSet::interval(Real::int(31), Real::int(60))];
    let report = check_ideal_axioms(&small, &halves, &settings)?;
    for v in &report.violations {
        println!("{}: {:?} fails on {:?}: {}", small.name(), v.axiom, v.witnesses, v.detail);
    }
    Ok(())
}
