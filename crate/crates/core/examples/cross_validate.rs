//! Agreement of the two exact routes, and convergence of the scaled log
//! generating function to its limit.

use spherical_reals::exact_dist::{crosscheck_gamma_form, gamma_factors};
use spherical_reals::intermediate::{scaled_log_z, DEFAULT_TOL};

fn main() -> spherical_reals::Result<()> {
    for n in [2, 4, 20, 60] {
        let g = gamma_factors(n)?;
        println!(
            "N = {n:>3}: prefactor * prod beta' = {}, max |difference| between routes = {:e}",
            g.normalization(),
            crosscheck_gamma_form(n, 256)?
        );
    }
    for n in [40, 80, 160, 320] {
        let s = scaled_log_z(n, 0.5, 256, DEFAULT_TOL)?;
        println!(
            "N = {n:>3}: log Z_N(1/2) / sqrt(N/2) = {:.10}, limit = {:.10}",
            s.finite_n, s.limit
        );
    }
    Ok(())
}
