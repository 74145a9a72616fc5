//! I-Cauchy checks and cluster points of oscillating functions.

use tsconv::convergence::{cluster_points, default_level_grid, i_cauchy};
use tsconv::func::MeasurableFn;
use tsconv::ideal::Ideal;
use tsconv::real::q;
use tsconv::set::{IndexPattern, TsSet};
use tsconv::settings::Settings;
use tsconv::{Real, TimeScale};

fn main() -> tsconv::Result<()> {
    let ray = TimeScale::continuous(q(1, 1))?;
    let settings = Settings::default().with_eps_grid(vec![1.0, 0.5, 0.25, 0.125, 0.0625]);
    let bounded = Ideal::bounded(&ray);

    let t = MeasurableFn::identity();
    let decay = t.sin().div(&t)?;
    println!("sin(t)/t: {:?}", i_cauchy(&decay, &bounded, &settings)?.outcome);
    println!("sin(t): {:?}", i_cauchy(&t.sin(), &bounded, &settings)?.outcome);

    let pulse = MeasurableFn::indicator(TsSet::blocks(q(1, 1), q(4, 1), q(1, 1))?);
    // A level within the smallest ε of a cluster point counts as one too,
    // so a fine level grid reports two bands around 0 and 1.
    let levels = default_level_grid(&pulse, &ray, &settings)?;
    let report = cluster_points(&pulse, &bounded, &levels, &settings)?;
    let found: Vec<f64> = report.points.iter().map(|p| p.level).collect();
    let (lower, upper): (Vec<f64>, Vec<f64>) = found.iter().partition(|&&l| l < 0.5);
    println!(
        "pulse on [1,2) every 4: {} of {} levels cluster, in [{}, {}] and [{}, {}]",
        found.len(),
        levels.len(),
        lower[0],
        lower[lower.len() - 1],
        upper[0],
        upper[upper.len() - 1]
    );

    // On the grid the spikes at the squares are too rare to matter for the
    // density ideal, so 0 is the only statistical cluster point.
    let grid = TimeScale::uniform(q(1, 1), q(1, 1))?;
    let settings = Settings::default().with_t_max(Real::int(1 << 18));
    let spikes = MeasurableFn::indicator(TsSet::indices(IndexPattern::Squares));
    let report = cluster_points(&spikes, &Ideal::density_zero(&grid), &[0.0, 0.5, 1.0], &settings)?;
    let found: Vec<f64> = report.points.iter().map(|p| p.level).collect();
    println!("square spikes under density zero: cluster points {found:?}");
    Ok(())
}
