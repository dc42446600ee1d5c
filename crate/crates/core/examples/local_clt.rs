//! Local CLT against the exact table near the mean.

use spherical_reals::asymptotics::{clt_log_density, clt_parameters};
use spherical_reals::exact_dist::probability_table;

fn main() -> spherical_reals::Result<()> {
    let n = 200;
    let params = clt_parameters(n, true)?;
    let table = probability_table(n, 256)?;
    println!(
        "N = {n}, mean = {:.6}, variance = {:.6}, c = {:.10}",
        params.mu_n, params.sigma2, params.c
    );
    let centre = params.mu_n.round() as u32 & !1;
    let half = params.window_half_width().ceil() as u32 & !1;
    for m in (centre.saturating_sub(half)..=(centre + half).min(n)).step_by(2) {
        let exact = table.get(m).unwrap().p_numeric.to_f64();
        // density per unit M, lattice spacing 2
        let clt = 2.0 * clt_log_density(n, m, true)?.exp();
        println!(
            "M = {m:>3}  exact = {exact:.6e}  clt = {clt:.6e}  ratio = {:.4}",
            clt / exact
        );
    }
    Ok(())
}
