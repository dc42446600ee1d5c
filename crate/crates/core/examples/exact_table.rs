//! Exact distribution of the real-eigenvalue count for one N.
//!
//! `cargo run --example exact_table -- 12`

use spherical_reals::exact_dist::{exact_moments, probability_table, DEFAULT_PRECISION_BITS};
use spherical_reals::exactnum::PiPolynomial;

fn main() -> spherical_reals::Result<()> {
    let n: u32 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(12);
    let table = probability_table(n, DEFAULT_PRECISION_BITS)?;
    println!("N = {n}");
    for e in &table.entries {
        println!(
            "M = {:>3}  p = {}  ({})",
            e.m,
            e.p_numeric.to_scientific(20),
            e.p_symbolic
        );
    }
    println!(
        "sum of p is exactly 1: {}",
        table.total() == PiPolynomial::one()
    );

    let moments = exact_moments(n, DEFAULT_PRECISION_BITS)?;
    println!(
        "mean     = {}  ({})",
        moments.mean.to_scientific(20),
        moments.mean_symbolic
    );
    println!("variance = {}", moments.variance.to_scientific(20));
    println!(
        "moments agree with the table: {}",
        moments.matches_table(&table)
    );
    Ok(())
}
