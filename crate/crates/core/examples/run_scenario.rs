//! Loads a scenario file and answers its questions through the library,
//! the same way the `tsconv` binary does.
//!
//! ```text
//! cargo run --example run_scenario -- examples/scenarios/ray_oscillation.toml
//! ```

use std::path::PathBuf;

use tsconv::convergence::i_converges;
use tsconv::density::density;
use tsconv::scenario::Scenario;

fn main() -> tsconv::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/scenarios/grid_sparse.toml"));
    let sc = Scenario::load(&path)?;
    let settings = sc.settings()?;
    let ideal = sc.ideal(&settings)?;
    println!("{} on {} with the {} ideal", path.display(), sc.ts, ideal.name());

    if let Some(name) = &sc.file.density.set {
        let d = density(&sc.ts, &sc.set(name)?, &settings)?;
        println!("density of {name}: {}", serde_json::to_string(&d.outcome).expect("serializable"));
    }
    for name in sc.file.functions.keys() {
        let v = i_converges(&sc.function(name)?, 0.0, &ideal, &settings)?;
        println!("{name} → 0: {:?}", v.outcome);
    }
    Ok(())
}
