//! Monte Carlo estimate compared with the exact table.
//!
//! `cargo run --release --example monte_carlo -- 10 100000 1`

use spherical_reals::montecarlo::compare_exact_empirical;

fn main() -> spherical_reals::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let trials: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let r = compare_exact_empirical(n, trials, seed, 128)?;
    println!(
        "N = {n}, trials = {}, discarded = {}, seed = {seed}",
        r.empirical.trials, r.empirical.discarded
    );
    for row in &r.rows {
        println!(
            "M = {:>3}  exact = {:.6}  phat = {:.6} +/- {:.6}  z = {:+.2}",
            row.m, row.p_exact, row.phat, row.stderr, row.z
        );
    }
    println!(
        "TV distance = {:.5}, mean z = {:+.2}, Fano ratio = {:.4}",
        r.tv_distance, r.mean_z, r.fano_ratio
    );
    Ok(())
}
