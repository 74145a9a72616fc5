//! Runs the built-in property suite and prints the per-property tallies.

use tsconv::props::{run_props, suite_settings};

fn main() -> tsconv::Result<()> {
    let report = run_props(42, &suite_settings())?;
    for (property, tally) in &report.totals {
        println!(
            "{property:<36} held {:>4}  violated {:>3}  inconclusive {:>3}  vacuous {:>3}",
            tally.held, tally.violated, tally.inconclusive, tally.vacuous
        );
    }
    println!("inconclusive rate {:.3}", report.inconclusive_rate);
    for c in report.violations.iter().chain(&report.inconclusive) {
        println!("{:?} {} {} {} {}: {}", c.status, c.property, c.scale, c.ideal, c.subject, c.detail);
    }
    Ok(())
}
