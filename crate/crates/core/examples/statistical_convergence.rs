//! Statistical convergence on the integer grid, cross-checked against a
//! brute-force count over the first N terms.

use tsconv::convergence::{classical_limit_on, statistical_converges};
use tsconv::func::MeasurableFn;
use tsconv::oracle::{statistical_limit_bruteforce, SequenceView, BRUTEFORCE_TOL};
use tsconv::real::q;
use tsconv::set::{IndexPattern, TsSet};
use tsconv::settings::Settings;
use tsconv::{Real, TimeScale};

fn main() -> tsconv::Result<()> {
    let ts = TimeScale::uniform(q(1, 1), q(1, 1))?;
    let settings = Settings::default().with_t_max(Real::int(1 << 20));
    let squares = TsSet::indices(IndexPattern::Squares);

    let cases = [
        ("1 on squares, 0 elsewhere", MeasurableFn::indicator(squares.clone()), 0.0),
        ("1 on evens, 0 elsewhere", MeasurableFn::indicator(TsSet::indices(IndexPattern::evens())), 0.0),
        ("1/t plus the square spikes", MeasurableFn::reciprocal() + MeasurableFn::indicator(squares.clone()), 0.0),
    ];

    let n = 1 << 16;
    for (name, f, limit) in &cases {
        let v = statistical_converges(f, *limit, &ts, &settings)?;
        println!("{name}: {:?}", v.outcome);

        let seq = SequenceView::from_fn(f, &ts, n)?;
        let eps = 0.5;
        let brute = statistical_limit_bruteforce(&seq.values, *limit, eps, n, BRUTEFORCE_TOL)?;
        println!(
            "  brute force over {n} terms at ε = {eps}: ratio {:.5}, holds = {}",
            brute.final_ratio.to_f64(),
            brute.holds
        );
    }

    // The spikes rule out an ordinary limit, but off the squares it exists.
    let f = &cases[0].1;
    let off = classical_limit_on(f, &squares.complement(), 0.0, &ts, &settings)?;
    let on_all = classical_limit_on(f, &TsSet::full(), 0.0, &ts, &settings)?;
    println!("ordinary limit off the squares: {:?}", off.outcome);
    println!("ordinary limit on the whole grid: {:?}", on_all.outcome);
    Ok(())
}
