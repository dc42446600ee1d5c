//! Exponent of p_{N,M} for M = x sqrt(N), found by minimising x mu + chi(mu).

use spherical_reals::intermediate::{chi, intermediate_rate, tail_exponents, DEFAULT_TOL};

fn main() -> spherical_reals::Result<()> {
    for mu in [-4.0, -1.0, 0.0, 1.0, 4.0] {
        println!("chi({mu:>4}) = {:.12}", chi(mu, DEFAULT_TOL)?.value);
    }
    println!();
    println!(
        "{:>6} {:>12} {:>14} {:>14} {:>14}",
        "x", "mu*", "exponent", "left tail", "gaussian"
    );
    for x in [0.01, 0.25, 0.5, 1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0] {
        let r = intermediate_rate(x, DEFAULT_TOL)?;
        let (left, right) = tail_exponents(x);
        println!(
            "{x:>6.2} {:>12.6} {:>14.8} {:>14.8} {:>14.8}",
            r.mu_star, r.exponent, left, right
        );
    }
    Ok(())
}
