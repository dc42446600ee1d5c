pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod exact_dist;
pub mod exactnum;
pub mod intermediate;
pub mod montecarlo;

pub use error::{Error, Result};
