//! Forward jumps and Δ-measures on a few time scales.
//!
//! Continuous stretches contribute length, isolated points contribute their
//! graininess `σ(t) - t`.

use tsconv::measure::{measure_interval, measure_point, measure_set_window, IntervalKind};
use tsconv::real::q;
use tsconv::set::{IndexPattern, TsSet};
use tsconv::timescale::Piece;
use tsconv::{Real, TimeScale};

fn main() -> tsconv::Result<()> {
    let r = Real::int;
    let scales = [
        TimeScale::continuous(q(1, 1))?,
        TimeScale::uniform(q(1, 1), q(1, 2))?,
        TimeScale::geometric(q(1, 1), q(2, 1))?,
        TimeScale::periodic(q(1, 1), q(1, 1), q(1, 1))?,
    ];
    let kinds = [
        ("[a,b]", IntervalKind::Closed),
        ("[a,b)", IntervalKind::HalfOpenLr),
        ("(a,b]", IntervalKind::HalfOpenRl),
        ("(a,b)", IntervalKind::Open),
    ];
    for ts in &scales {
        let (a, b) = (ts.floor_in(&r(2)).unwrap(), ts.floor_in(&r(8)).unwrap());
        println!("{ts}: a = {a}, b = {b}, σ(a) = {}, σ(b) = {}", ts.sigma(&a)?, ts.sigma(&b)?);
        for (label, kind) in kinds {
            println!("  μ{label} = {}", measure_interval(ts, kind, &a, &b)?.value);
        }
        println!("  μ{{a}} = {}", measure_point(ts, &a)?.value);
    }

    // Points 1..=4, the segment [5, 6], then the unit grid from 8.
    let mut pieces: Vec<Piece> = (1..=4).map(|k| Piece { lo: q(k, 1), hi: q(k, 1) }).collect();
    pieces.push(Piece { lo: q(5, 1), hi: q(6, 1) });
    let hybrid = TimeScale::hybrid(pieces, TimeScale::uniform(q(8, 1), q(1, 1))?)?;
    println!("{hybrid}: μ[3,8] = {}", measure_interval(&hybrid, IntervalKind::Closed, &r(3), &r(8))?.value);

    let grid = TimeScale::uniform(q(1, 1), q(1, 1))?;
    let squares = TsSet::indices(IndexPattern::Squares);
    println!("squares inside [1, 100] on the unit grid: μ = {}", measure_set_window(&grid, &squares, &r(100))?.value);
    Ok(())
}
