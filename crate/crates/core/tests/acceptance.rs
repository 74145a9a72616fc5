//! Acceptance gate: every criterion runs at its stated tolerance and time
//! budget and prints one PASS/FAIL line. Criteria run one after another so
//! their timings do not contend.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tsconv::convergence::{bap_transfer, statistical_converges, Outcome};
use tsconv::density::{density, density_trace, DensityOutcome};
use tsconv::func::MeasurableFn;
use tsconv::ideal::{check_ideal_axioms, Axiom, Ideal, IdealFlags, Membership};
use tsconv::measure::{measure_interval, IntervalKind};
use tsconv::oracle::{counting_ratios, statistical_limit_bruteforce, SequenceView, BRUTEFORCE_TOL};
use tsconv::props::{run_props, suite_settings, PROPERTIES};
use tsconv::real::q;
use tsconv::set::{IndexPattern, TsSet};
use tsconv::settings::Settings;
use tsconv::{Real, TimeScale, Q};

type Checked = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn grid() -> TimeScale {
    TimeScale::uniform(q(1, 1), q(1, 1)).unwrap()
}

fn doubling() -> TimeScale {
    TimeScale::geometric(q(1, 1), q(2, 1)).unwrap()
}

/// Interval measures against `σ(b) - a`, `b - a`, `b - σ(a)`, `σ(b) - σ(a)`
/// with `σ` written out per scale.
fn measure_formulas() -> Checked {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let scales: [(TimeScale, fn(&mut ChaCha8Rng) -> Q, fn(Q) -> Q); 2] = [
        (grid(), |r| Q::from_integer(r.gen_range(1..=10_000)), |t| t + Q::from_integer(1)),
        (doubling(), |r| Q::from_integer(1i128 << r.gen_range(0..100)), |t| t * Q::from_integer(2)),
    ];
    let mut compared = 0;
    for (ts, draw, sigma) in &scales {
        for _ in 0..1000 {
            let (x, y) = (draw(&mut rng), draw(&mut rng));
            let (a, b) = if x <= y { (x, y) } else { (y, x) };
            let expect = [
                (IntervalKind::Closed, sigma(b) - a),
                (IntervalKind::HalfOpenLr, b - a),
                // `(a, a)` is empty.
                (IntervalKind::Open, if a == b { Q::from_integer(0) } else { b - sigma(a) }),
                (IntervalKind::HalfOpenRl, sigma(b) - sigma(a)),
            ];
            for (kind, want) in expect {
                let got = measure_interval(ts, kind, &Real::Exact(a), &Real::Exact(b)).map_err(|e| e.to_string())?;
                ensure(
                    got.exact && got.value.exact() == Some(want),
                    format!("{ts} {kind:?} [{a}, {b}]: got {}, want {want}", got.value),
                )?;
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} exact comparisons"))
}

fn sieve(n: u64) -> Vec<u64> {
    let mut composite = vec![false; n as usize + 1];
    let mut out = Vec::new();
    for k in 2..=n as usize {
        if !composite[k] {
            out.push(k as u64);
            let mut m = k * k;
            while m <= n as usize {
                composite[m] = true;
                m += k;
            }
        }
    }
    out
}

/// Density trace at every integer up to `10^6` against prefix counts.
fn density_oracle() -> Checked {
    const N: u64 = 1_000_000;
    let ts = grid();
    let points: Vec<Real> = (1..=N as i128).map(Real::int).collect();
    let blocks = TsSet::blocks(q(1, 1), q(5, 1), q(1, 1)).unwrap();
    let cases: Vec<(&str, TsSet, Vec<u64>)> = vec![
        ("evens", TsSet::indices(IndexPattern::evens()), (2..=N).step_by(2).collect()),
        (
            "squares",
            TsSet::indices(IndexPattern::Squares),
            (1..).map(|k: u64| k * k).take_while(|&k| k <= N).collect(),
        ),
        ("primes", TsSet::indices(IndexPattern::Primes), sieve(N)),
        ("blocks", blocks, (1..=N).filter(|k| (k - 1) % 5 <= 1).collect()),
    ];
    for (name, set, indices) in cases {
        let trace = density_trace(&ts, &set, &points, &Default::default()).map_err(|e| e.to_string())?;
        let oracle = counting_ratios(&indices, N);
        ensure(trace.len() == oracle.len(), format!("{name}: trace has {} points", trace.len()))?;
        for (p, want) in trace.iter().zip(&oracle) {
            ensure(
                p.ratio.exact() == Some(*want),
                format!("{name} at t = {}: got {}, want {want}", p.t, p.ratio),
            )?;
        }
    }
    Ok(format!("4 sets x {N} checkpoints"))
}

/// Even powers of two on the doubling grid oscillate between 1/3 and 2/3.
fn nonexistent_density() -> Checked {
    let even_powers = TsSet::indices(IndexPattern::Arithmetic { first: 1, step: 2 });
    let r = density(&doubling(), &even_powers, &Settings::default()).map_err(|e| e.to_string())?;
    match r.outcome {
        DensityOutcome::DoesNotExist { liminf, limsup } => {
            ensure(
                (liminf - 1.0 / 3.0).abs() < 0.02 && (limsup - 2.0 / 3.0).abs() < 0.02,
                format!("liminf {liminf}, limsup {limsup}"),
            )?;
            Ok(format!("liminf {liminf:.4}, limsup {limsup:.4}"))
        }
        other => Err(format!("expected DoesNotExist, got {other:?}")),
    }
}

fn statistical_desk_check() -> Checked {
    const N: u64 = 1_000_000;
    let ts = grid();
    let settings = Settings::default().with_t_max(Real::int(N as i128));
    let mut notes = Vec::new();
    for (name, pattern, converges) in [
        ("squares", IndexPattern::Squares, true),
        ("evens", IndexPattern::evens(), false),
    ] {
        let f = MeasurableFn::indicator(TsSet::indices(pattern));
        let v = statistical_converges(&f, 0.0, &ts, &settings).map_err(|e| e.to_string())?;
        let want = if converges {
            Outcome::Converges { limit: 0.0 }
        } else {
            Outcome::Diverges
        };
        ensure(v.outcome == want, format!("{name}: got {:?}, want {want:?}", v.outcome))?;
        let seq = SequenceView::from_fn(&f, &ts, N).map_err(|e| e.to_string())?;
        let brute = statistical_limit_bruteforce(&seq.values, 0.0, 0.5, N, BRUTEFORCE_TOL).map_err(|e| e.to_string())?;
        ensure(
            brute.holds == converges,
            format!("{name}: brute force says {} at ratio {}", brute.holds, brute.final_ratio),
        )?;
        notes.push(format!("{name} {:?} (oracle ratio {})", v.outcome, brute.final_ratio));
    }
    Ok(notes.join("; "))
}

fn theorem_suite() -> Checked {
    let report = run_props(42, &suite_settings()).map_err(|e| e.to_string())?;
    ensure(report.corpus_size >= 20, format!("corpus has {} functions", report.corpus_size))?;
    for p in PROPERTIES {
        ensure(report.totals.get(p).is_some_and(|t| t.held > 0), format!("{p} never exercised"))?;
    }
    let combos: std::collections::BTreeSet<(&str, &str)> =
        report.rows.iter().map(|r| (r.scale, r.ideal.as_str())).collect();
    ensure(combos.len() == 9, format!("{} scale/ideal combinations", combos.len()))?;
    if let Some(v) = report.violations.first() {
        return Err(format!(
            "{} violations, first: {} on {} / {} / {}: {}",
            report.violations.len(),
            v.property,
            v.scale,
            v.ideal,
            v.subject,
            v.detail
        ));
    }
    ensure(
        report.inconclusive_rate < 0.10,
        format!("inconclusive rate {:.3}", report.inconclusive_rate),
    )?;
    Ok(format!(
        "{} held, 0 violated, {} inconclusive ({:.2}%), {} vacuous",
        report.overall.held,
        report.overall.inconclusive,
        100.0 * report.inconclusive_rate,
        report.overall.vacuous
    ))
}

fn bap_constructive() -> Checked {
    let settings = Settings::default();
    let mut notes = Vec::new();
    for ts in [TimeScale::continuous(q(1, 1)).unwrap(), grid()] {
        let ideal = Ideal::bounded(&ts);
        let f = MeasurableFn::reciprocal();
        let b = bap_transfer(&f, 0.0, &ideal, 10, &settings).map_err(|e| format!("{ts}: {e}"))?;
        ensure(
            b.verdict.outcome == Outcome::Converges { limit: 0.0 },
            format!("{ts}: verdict {:?}", b.verdict.outcome),
        )?;
        let complement = b.set.complement();
        ensure(
            ideal.membership(&complement, &settings).map_err(|e| e.to_string())? == Membership::In,
            format!("{ts}: complement of M is not bounded"),
        )?;
        let shell = |n: usize| TsSet::exceedance(f.clone(), 0.0, 1.0 / n as f64).unwrap();
        let mut annuli = vec![shell(1)];
        for n in 2..=10 {
            annuli.push(shell(n).difference(&shell(n - 1)));
        }
        let family = ideal.bap_witness().expect("bounded ideal has a witness")(&annuli);
        for (j, (a, bj)) in annuli.iter().zip(&family).enumerate() {
            let m = Ideal::bounded(&ts)
                .membership(&a.symmetric_difference(bj), &settings)
                .map_err(|e| e.to_string())?;
            ensure(m == Membership::In, format!("{ts}: A_{} symmetric difference B_{} is {m}", j + 1, j + 1))?;
        }
        notes.push(format!("{ts}: {} annuli, limit 0 on M", family.len()));
    }
    Ok(notes.join("; "))
}

/// Fifty sets on the unit grid with known structure: bounded, sparse,
/// positive-density, and mixtures of them.
fn sample_family() -> Vec<TsSet> {
    let r = Real::int;
    let mut out = vec![TsSet::empty()];
    for k in [1, 2, 5, 10, 50, 100, 500] {
        out.push(TsSet::interval(r(1), r(k)));
    }
    for k in [3, 250] {
        out.push(TsSet::interval(r(k), r(k + 20)));
    }
    out.push(TsSet::points([r(2), r(3), r(5), r(7)]));
    let sparse = [
        IndexPattern::Squares,
        IndexPattern::Cubes,
        IndexPattern::Powers { base: 2 },
        IndexPattern::Powers { base: 3 },
        IndexPattern::explicit((1..=30).map(|k| k * k * k * 7).collect()),
    ];
    for p in sparse {
        out.push(TsSet::indices(p));
    }
    for (first, step) in [(2, 2), (1, 2), (1, 3), (2, 3), (1, 5), (4, 7), (1, 10)] {
        out.push(TsSet::indices(IndexPattern::Arithmetic { first, step }));
    }
    for (start, period, on) in [(1, 4, 1), (2, 6, 2), (1, 10, 0)] {
        out.push(TsSet::blocks(q(start, 1), q(period, 1), q(on, 1)).unwrap());
    }
    for k in [1, 10, 1000] {
        out.push(TsSet::ray(r(k)));
    }
    out.push(TsSet::full());
    let sq = TsSet::indices(IndexPattern::Squares);
    let cubes = TsSet::indices(IndexPattern::Cubes);
    let evens = TsSet::indices(IndexPattern::evens());
    let odds = TsSet::indices(IndexPattern::Arithmetic { first: 1, step: 2 });
    let head = TsSet::interval(r(1), r(40));
    out.extend([
        sq.union(&head),
        sq.union(&cubes),
        sq.intersection(&evens),
        sq.difference(&head),
        evens.union(&head),
        evens.difference(&head),
        evens.intersection(&head),
        odds.union(&sq),
        evens.complement(),
        sq.complement(),
        head.complement(),
        TsSet::ray(r(100)).intersection(&sq),
        TsSet::ray(r(100)).difference(&evens),
        TsSet::indices(IndexPattern::Powers { base: 2 }).union(&head),
        cubes.union(&TsSet::points([r(2), r(4)])),
        TsSet::exceedance(MeasurableFn::reciprocal(), 0.0, 0.01).unwrap(),
        TsSet::exceedance(MeasurableFn::indicator(sq.clone()), 0.0, 0.5).unwrap(),
        TsSet::exceedance(MeasurableFn::indicator(evens.clone()), 1.0, 0.5).unwrap(),
        TsSet::near(MeasurableFn::reciprocal(), 0.0, 0.1).unwrap(),
        head.union(&TsSet::interval(r(60), r(80))),
    ]);
    out
}

fn ideal_axioms() -> Checked {
    let ts = grid();
    let family = sample_family();
    ensure(family.len() == 50, format!("family has {} sets", family.len()))?;
    let settings = Settings::default().with_t_max(Real::int(1 << 16));
    let mut notes = Vec::new();
    for ideal in [Ideal::measure_zero(&ts), Ideal::density_zero(&ts), Ideal::bounded(&ts)] {
        let rep = check_ideal_axioms(&ideal, &family, &settings).map_err(|e| e.to_string())?;
        if let Some(v) = rep.violations.first() {
            return Err(format!("{}: {:?} {:?} {}", ideal.name(), v.axiom, v.witnesses, v.detail));
        }
        notes.push(format!("{} {} checks ({} unknown)", ideal.name(), rep.checks, rep.unknown));
    }
    // Sets of at most five points: not closed under unions.
    let fake = Ideal::custom(
        &ts,
        "at_most_five_points",
        IdealFlags {
            nontrivial: true,
            b_admissible: false,
            bap: false,
        },
        std::sync::Arc::new(|ts: &TimeScale, s: &TsSet, settings: &Settings| {
            let cs = s.resolve(ts, &settings.horizon(ts), &settings.resolve)?;
            let n: usize = cs.iter().map(|c| if c.is_point() { 1 } else { 6 }).sum();
            Ok(if n <= 5 { Membership::In } else { Membership::NotIn })
        }),
    );
    let rep = check_ideal_axioms(&fake, &family, &settings).map_err(|e| e.to_string())?;
    ensure(
        rep.violations.iter().any(|v| v.axiom == Axiom::UnionClosure),
        "the five-point family was not flagged",
    )?;
    notes.push(format!("fake ideal flagged with {} violations", rep.violations.len()));
    Ok(notes.join("; "))
}

fn determinism() -> Checked {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_tsconv"))
            .args(["props", "--seed", "42"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success(), format!("first run exited with {}", a.status))?;
    ensure(b.status.success(), format!("second run exited with {}", b.status))?;
    ensure(a.stdout == b.stdout, "reports differ")?;
    ensure(!a.stdout.is_empty(), "empty report")?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() {
    let criteria: [(&str, Option<Duration>, fn() -> Checked); 8] = [
        ("measure_formulas", Some(Duration::from_secs(1)), measure_formulas),
        ("density_oracle_agreement", Some(Duration::from_secs(10)), density_oracle),
        ("nonexistent_density", Some(Duration::from_secs(5)), nonexistent_density),
        ("statistical_desk_check", Some(Duration::from_secs(10)), statistical_desk_check),
        ("theorem_suite", Some(Duration::from_secs(120)), theorem_suite),
        ("bap_constructive_transfer", Some(Duration::from_secs(1)), bap_constructive),
        ("ideal_axioms", Some(Duration::from_secs(30)), ideal_axioms),
        ("determinism", None, determinism),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let verdict = match (&result, budget) {
            (Err(e), _) => Err(e.clone()),
            (Ok(_), Some(b)) if took > b => Err(format!("took {took:.2?}, budget {b:?}")),
            (Ok(msg), _) => Ok(msg.clone()),
        };
        match verdict {
            Ok(msg) => println!("PASS {name} [{took:.2?}] {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name} [{took:.2?}] {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
