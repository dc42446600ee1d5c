//! Large-deviation rate for M = alpha N and its electrostatic pieces.

use spherical_reals::asymptotics::{energy_breakdown, ld_rate, small_alpha_rate};

fn main() -> spherical_reals::Result<()> {
    println!(
        "{:>6} {:>14} {:>14} {:>14} {:>14} {:>14}",
        "alpha", "rate", "small alpha", "annulus", "equator", "cross"
    );
    for k in 1..=10 {
        let alpha = f64::from(k) / 10.0;
        let b = energy_breakdown(alpha)?;
        println!(
            "{alpha:>6.2} {:>14.8e} {:>14.8e} {:>14.8e} {:>14.8e} {:>14.8e}",
            ld_rate(alpha)?,
            small_alpha_rate(alpha),
            b.e_annulus,
            b.e_equator,
            b.e_cross
        );
    }
    let n = 60.0;
    println!("log p(N=60, M=30) ~ {:.6}", -n * n * ld_rate(0.5)?);
    Ok(())
}
