//! Densities of a few sets, from exact periodic answers to sets whose
//! counting ratio never settles.

use tsconv::density::{density, DensityOutcome};
use tsconv::real::q;
use tsconv::set::{IndexPattern, TsSet};
use tsconv::settings::Settings;
use tsconv::{Real, TimeScale};

fn show(ts: &TimeScale, name: &str, s: &TsSet, settings: &Settings) -> tsconv::Result<()> {
    let r = density(ts, s, settings)?;
    let text = match &r.outcome {
        DensityOutcome::Exact { value } => format!("exactly {value}"),
        DensityOutcome::Estimated { value, halfwidth } => format!("{value:.5} ± {halfwidth:.1e}"),
        DensityOutcome::DoesNotExist { liminf, limsup } => format!("no limit, ratio swings in [{liminf:.3}, {limsup:.3}]"),
        DensityOutcome::Inconclusive { reason } => format!("inconclusive: {reason}"),
    };
    println!("{name:<28} {text}");
    Ok(())
}

fn main() -> tsconv::Result<()> {
    let settings = Settings::default().with_t_max(Real::int(1 << 20));

    let grid = TimeScale::uniform(q(1, 1), q(1, 1))?;
    println!("on {grid}");
    show(&grid, "evens", &TsSet::indices(IndexPattern::evens()), &settings)?;
    show(&grid, "squares", &TsSet::indices(IndexPattern::Squares), &settings)?;
    // The prime ratio decays like 1/ln t, too slowly to certify at this horizon.
    show(&grid, "primes", &TsSet::indices(IndexPattern::Primes), &settings)?;
    show(&grid, "everything past 1000", &TsSet::ray(Real::int(1000)), &settings)?;

    let ray = TimeScale::continuous(q(1, 1))?;
    println!("on {ray}");
    let pulse = TsSet::blocks(q(1, 1), q(4, 1), q(1, 1))?;
    show(&ray, "[1,2) every 4", &pulse, &settings)?;

    let geo = TimeScale::geometric(q(1, 1), q(2, 1))?;
    println!("on {geo}");
    // Each point weighs as much as all earlier ones together, so odd indices
    // alternate between holding half and two thirds of the mass.
    show(&geo, "odd indices", &TsSet::indices(IndexPattern::Arithmetic { first: 1, step: 2 }), &settings)?;

    let r = density(&grid, &TsSet::indices(IndexPattern::Squares), &settings)?;
    println!("trace for squares:");
    for p in r.trace.iter().step_by(8) {
        println!("  t = {:>8}  ratio = {:.6}", p.t, p.ratio.to_f64());
    }
    Ok(())
}
