//! Adaptive Gauss-Kronrod quadrature on `[0, t_max]` standing in for `[0, ∞)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Number of geometric breakpoints `2^-1, ..., 2^-GEOMETRIC_LEVELS` placed
/// in `[0, 1]` so that integrable log singularities and narrow peaks at the
/// origin are resolved before any adaptive refinement.
pub const GEOMETRIC_LEVELS: i32 = 60;

/// Upper bound on the number of interval bisections.
pub const MAX_SUBDIVISIONS: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum over subintervals of |K15 - G7|.
    pub error_estimate: f64,
    pub evals: usize,
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = fc * WG[3];
    let mut kronrod = fc * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Piece { a, b, value, error }
}

/// Truncation point for integrands bounded by a Gaussian envelope
/// `exp(shift - t^2)`: `sqrt(max(0, shift) + ln(1/tol)) + 2`.
pub fn gaussian_truncation(shift: f64, tol: f64) -> f64 {
    (shift.max(0.0) + (1.0 / tol).ln().max(0.0)).sqrt() + 2.0
}

/// Integrate `f` over `[0, t_max]`, where the caller guarantees that the
/// integral over `[t_max, ∞)` is negligible against `tol`.
///
/// `[0, min(1, t_max)]` is split geometrically toward 0, the rest into unit
/// pieces; then the piece with the largest error estimate is bisected until
/// the summed estimate is at most `tol`.
pub fn integrate_semiaxis<F: Fn(f64) -> f64>(f: F, t_max: f64, tol: f64) -> Result<Quadrature> {
    assert!(tol > 0.0 && t_max > 0.0, "need tol > 0 and t_max > 0");
    let mut breaks = vec![0.0];
    let first = t_max.min(1.0);
    for k in (1..=GEOMETRIC_LEVELS).rev() {
        breaks.push(first * 2f64.powi(-k));
    }
    breaks.push(first);
    let mut t = first;
    while t < t_max {
        t = (t + 1.0).min(t_max);
        breaks.push(t);
    }

    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for w in breaks.windows(2) {
        heap.push(kronrod15(&f, w[0], w[1]));
        evals += 15;
    }
    let total_error = |h: &BinaryHeap<Piece>| h.iter().map(|p| p.error).sum::<f64>();

    let mut subdivisions = 0;
    loop {
        let estimate = total_error(&heap);
        if estimate <= tol {
            // sum smallest first for a reproducible, accurate total
            let mut parts: Vec<Piece> = heap.into_vec();
            parts.sort_by(|x, y| x.value.abs().total_cmp(&y.value.abs()));
            let value = parts.iter().map(|p| p.value).sum();
            return Ok(Quadrature {
                value,
                error_estimate: estimate,
                evals,
            });
        }
        if subdivisions >= MAX_SUBDIVISIONS {
            return Err(Error::NonConvergence {
                tol,
                estimate,
                evals,
            });
        }
        let worst = heap.pop().expect("at least one piece");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::NonConvergence {
                tol,
                estimate,
                evals,
            });
        }
        heap.push(kronrod15(&f, worst.a, mid));
        heap.push(kronrod15(&f, mid, worst.b));
        evals += 30;
        subdivisions += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_integral() {
        let tol = 1e-12;
        let q = integrate_semiaxis(|t| (-t * t).exp(), gaussian_truncation(0.0, tol), tol).unwrap();
        let exact = std::f64::consts::PI.sqrt() / 2.0;
        assert!((q.value - exact).abs() < tol, "{}", q.value);
    }

    #[test]
    fn zero_function() {
        let q = integrate_semiaxis(|_| 0.0, 5.0, 1e-10).unwrap();
        assert_eq!(q.value, 0.0);
    }

    #[test]
    fn log_singularity_at_origin() {
        // ∫_0^1 ln t dt = -1
        let q =
            integrate_semiaxis(|t: f64| if t < 1.0 { t.ln() } else { 0.0 }, 1.0, 1e-12).unwrap();
        assert!((q.value + 1.0).abs() < 1e-12, "{}", q.value);
    }

    #[test]
    fn budget_exhaustion_reports_nonconvergence() {
        let oscillating = |t: f64| (1e6 * t).sin() / (t + 1e-3).sqrt();
        let err = integrate_semiaxis(oscillating, 40.0, 1e-15).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }
}
