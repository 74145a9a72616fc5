//! I*-convergence through an explicit filter set, and the transfer from
//! I-convergence to an ordinary limit along a large set for ideals with
//! the additive property.

use tsconv::convergence::{bap_transfer, i_converges, i_star_converges};
use tsconv::func::MeasurableFn;
use tsconv::ideal::Ideal;
use tsconv::real::q;
use tsconv::set::{IndexPattern, TsSet};
use tsconv::settings::Settings;
use tsconv::{Real, TimeScale};

fn main() -> tsconv::Result<()> {
    let grid = TimeScale::uniform(q(1, 1), q(1, 1))?;
    let settings = Settings::default().with_t_max(Real::int(1 << 20));
    let dz = Ideal::density_zero(&grid);

    // 1 on the squares, 1/t elsewhere.
    let squares = TsSet::indices(IndexPattern::Squares);
    let f = MeasurableFn::piecewise(vec![(squares.clone(), MeasurableFn::constant(1.0))], MeasurableFn::reciprocal());
    println!("I-convergence to 0: {:?}", i_converges(&f, 0.0, &dz, &settings)?.outcome);

    let given = i_star_converges(&f, 0.0, &dz, Some(&squares.complement()), &settings)?;
    println!("I*-convergence along the non-squares: {:?}", given.outcome);
    let found = i_star_converges(&f, 0.0, &dz, None, &settings)?;
    println!("I*-convergence with a derived set: {:?} via {:?}", found.outcome, found.witness);

    let ray = TimeScale::continuous(q(1, 1))?;
    let bounded = Ideal::bounded(&ray);
    let g = MeasurableFn::identity().sin().div(&MeasurableFn::identity())?;
    let settings = Settings::default();
    let t = bap_transfer(&g, 0.0, &bounded, 8, &settings)?;
    println!("sin(t)/t on the ray, ordinary limit off {} annuli: {:?}", t.annuli.len(), t.verdict.outcome);
    for a in t.annuli.iter().take(2) {
        println!("  {a}");
    }
    Ok(())
}
