//! Δ-measure, density and ideal convergence for real functions on time scales.

pub mod cli;
pub mod convergence;
pub mod density;
pub mod error;
pub mod exceed;
pub mod func;
pub mod ideal;
pub mod measure;
pub mod oracle;
pub mod parse;
pub mod props;
pub mod real;
pub mod scenario;
pub mod set;
pub mod settings;
pub mod timescale;

pub use error::{Error, Result};
pub use real::{Real, Q};
pub use timescale::{Component, TimeScale};
