//! All-real and no-real asymptotes against exact values.

use spherical_reals::asymptotics::{all_real_log_asymptotic, no_real_log_asymptotic};
use spherical_reals::exact_dist::factor_weights;

fn main() -> spherical_reals::Result<()> {
    println!(
        "{:>5} {:>16} {:>16} {:>16} {:>16}",
        "N", "log p_NN", "asymptote", "log p_N0", "asymptote"
    );
    for n in [10, 20, 40, 80, 160, 320] {
        let w = factor_weights(n)?;
        println!(
            "{n:>5} {:>16.8} {:>16.8} {:>16.8} {:>16.8}",
            w.log_p_all_real(256),
            all_real_log_asymptotic(n),
            w.log_p_no_real(256),
            no_real_log_asymptotic(n)
        );
    }
    Ok(())
}
