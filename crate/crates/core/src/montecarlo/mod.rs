//! Monte Carlo oracle: sample pencils `(A, B)` of independent standard real
//! Gaussian matrices and count the real eigenvalues of `A B^{-1}`.
//!
//! Trial `i` of a run with seed `s` draws from `ChaCha12Rng` seeded with `s`
//! on stream `i`, and Gaussians come from the ziggurat sampler in
//! `rand_distr::StandardNormal`. Trials are therefore independent of the
//! order and thread in which they run.

mod qz;

use std::collections::BTreeMap;
use std::ops::{Index, IndexMut};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact_dist::{exact_moments, probability_table};

/// Dense square matrix, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Matrix { n, data }
    }

    /// Panics unless all rows have the same length as the row count.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Matrix::from_fn(n, |i, j| rows[i][j])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pencil {
    pub a: Matrix,
    pub b: Matrix,
}

impl Pencil {
    pub fn n(&self) -> usize {
        self.a.n()
    }

    /// The pencil `(B, A)`, whose eigenvalues are the reciprocals.
    pub fn swapped(&self) -> Pencil {
        Pencil {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draw `A` then `B`, each row by row, from `rng`.
pub fn sample_pencil<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Pencil {
    let mut draw = || {
        let data = (0..n * n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        Matrix { n, data }
    };
    let a = draw();
    let b = draw();
    Pencil { a, b }
}

/// Real generalized eigenvalues of the pencil, from its real generalized
/// Schur form. No threshold on imaginary parts is involved.
pub fn count_real_generalized_eigenvalues(p: &Pencil) -> Result<u32> {
    qz::count_real(&p.a, &p.b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    pub n: u32,
    /// Trials that produced a count; `sum(counts) == trials`.
    pub trials: u64,
    /// Trials whose reduction failed. They are reported, not resampled.
    pub discarded: u64,
    pub seed: u64,
    /// Every `M` of the parity of `N`, including those never observed.
    pub counts: BTreeMap<u32, u64>,
    pub phat: BTreeMap<u32, f64>,
    /// `sqrt(phat (1 - phat) / trials)`.
    pub stderr: BTreeMap<u32, f64>,
    pub mean_hat: f64,
    /// Unbiased sample variance.
    pub var_hat: f64,
}

impl EmpiricalDistribution {
    fn from_counts(n: u32, seed: u64, raw: &[u64], discarded: u64) -> Self {
        let trials: u64 = raw.iter().sum();
        let tf = trials as f64;
        let mut counts = BTreeMap::new();
        let mut phat = BTreeMap::new();
        let mut stderr = BTreeMap::new();
        let (mut s1, mut s2) = (0.0, 0.0);
        for m in (n % 2..=n).step_by(2) {
            let c = raw[m as usize];
            let p = if trials > 0 { c as f64 / tf } else { 0.0 };
            counts.insert(m, c);
            phat.insert(m, p);
            stderr.insert(
                m,
                if trials > 0 {
                    (p * (1.0 - p) / tf).sqrt()
                } else {
                    0.0
                },
            );
            s1 += c as f64 * f64::from(m);
            s2 += c as f64 * f64::from(m) * f64::from(m);
        }
        let mean_hat = s1 / tf;
        let var_hat = if trials > 1 {
            (s2 - tf * mean_hat * mean_hat) / (tf - 1.0)
        } else {
            0.0
        };
        EmpiricalDistribution {
            n,
            trials,
            discarded,
            seed,
            counts,
            phat,
            stderr,
            mean_hat,
            var_hat,
        }
    }
}

/// Count for trial `trial`, or `None` if the reduction failed.
pub fn run_trial(n: u32, seed: u64, trial: u64) -> Option<u32> {
    let mut rng = trial_rng(seed, trial);
    let pencil = sample_pencil(n as usize, &mut rng);
    count_real_generalized_eigenvalues(&pencil).ok()
}

pub fn estimate_distribution(n: u32, trials: u64, seed: u64) -> Result<EmpiricalDistribution> {
    if n == 0 {
        return Err(Error::TooSmall(n, 1));
    }
    if trials == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let width = n as usize + 2;
    let (raw, discarded) = (0..trials)
        .into_par_iter()
        .fold(
            || (vec![0u64; width], 0u64),
            |(mut counts, mut bad), i| {
                match run_trial(n, seed, i) {
                    Some(m) => counts[m as usize] += 1,
                    None => bad += 1,
                }
                (counts, bad)
            },
        )
        .reduce(
            || (vec![0u64; width], 0u64),
            |(mut a, x), (b, y)| {
                a.iter_mut().zip(&b).for_each(|(p, q)| *p += q);
                (a, x + y)
            },
        );
    debug_assert!(
        raw.iter()
            .enumerate()
            .all(|(m, &c)| c == 0 || (m as u32 + n).is_multiple_of(2)),
        "a trial produced a count of the wrong parity"
    );
    Ok(EmpiricalDistribution::from_counts(n, seed, &raw, discarded))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub m: u32,
    pub p_exact: f64,
    pub phat: f64,
    pub stderr: f64,
    /// `(phat - p) / stderr`. When no trial landed on `M`, the empirical
    /// stderr is 0 and the binomial stderr of the exact `p` is used instead.
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub empirical: EmpiricalDistribution,
    pub rows: Vec<ComparisonRow>,
    pub tv_distance: f64,
    pub mean_exact: f64,
    pub var_exact: f64,
    /// `(mean_hat - mean) / (sigma / sqrt(trials))`.
    pub mean_z: f64,
    /// `(var_hat / mean_hat) / (var / mean)`.
    pub fano_ratio: f64,
}

impl ComparisonReport {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.z.abs()))
    }
}

pub fn compare_exact_empirical(
    n: u32,
    trials: u64,
    seed: u64,
    precision_bits: u32,
) -> Result<ComparisonReport> {
    let table = probability_table(n, precision_bits)?;
    let moments = exact_moments(n, precision_bits)?;
    let empirical = estimate_distribution(n, trials, seed)?;
    let tf = empirical.trials as f64;
    let rows: Vec<ComparisonRow> = table
        .entries
        .iter()
        .map(|e| {
            let p = e.p_numeric.to_f64();
            let phat = empirical.phat[&e.m];
            let stderr = empirical.stderr[&e.m];
            let scale = if stderr > 0.0 {
                stderr
            } else {
                (p * (1.0 - p) / tf).sqrt()
            };
            let z = if phat == p { 0.0 } else { (phat - p) / scale };
            ComparisonRow {
                m: e.m,
                p_exact: p,
                phat,
                stderr,
                z,
            }
        })
        .collect();
    let tv_distance = 0.5 * rows.iter().map(|r| (r.phat - r.p_exact).abs()).sum::<f64>();
    let mean_exact = moments.mean.to_f64();
    let var_exact = moments.variance.to_f64();
    Ok(ComparisonReport {
        mean_z: (empirical.mean_hat - mean_exact) / (var_exact / tf).sqrt(),
        fano_ratio: (empirical.var_hat / empirical.mean_hat) / (var_exact / mean_exact),
        empirical,
        rows,
        tv_distance,
        mean_exact,
        var_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        let p1 = sample_pencil(5, &mut trial_rng(7, 3));
        let p2 = sample_pencil(5, &mut trial_rng(7, 3));
        let p3 = sample_pencil(5, &mut trial_rng(7, 4));
        assert_eq!(p1, p2);
        assert_ne!(p1, p3);
    }

    #[test]
    fn entry_moments() {
        let mut rng = trial_rng(11, 0);
        let draws: Vec<f64> = (0..1_000_000).map(|_| rng.sample(StandardNormal)).collect();
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        assert!(mean.abs() < 4.0 / n.sqrt());
        assert!((var - 1.0).abs() < 4.0 * (2.0 / n).sqrt());
    }

    #[test]
    fn parity_of_every_trial() {
        for n in 1..=12u32 {
            for i in 0..50 {
                let m = run_trial(n, 99, i).expect("reduction failed");
                assert_eq!((n - m) % 2, 0, "N={n} trial={i} M={m}");
            }
        }
    }

    #[test]
    fn swapping_a_and_b_keeps_the_count() {
        for i in 0..300 {
            let p = sample_pencil(10, &mut trial_rng(5, i));
            let c = count_real_generalized_eigenvalues(&p).unwrap();
            assert_eq!(
                c,
                count_real_generalized_eigenvalues(&p.swapped()).unwrap(),
                "trial {i}"
            );
        }
    }

    #[test]
    fn small_run_bookkeeping() {
        let d = estimate_distribution(6, 500, 1).unwrap();
        assert_eq!(d.counts.values().sum::<u64>(), d.trials);
        assert_eq!(d.trials + d.discarded, 500);
        assert_eq!(
            d.counts.keys().copied().collect::<Vec<_>>(),
            vec![0, 2, 4, 6]
        );
        assert!((d.phat.values().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(estimate_distribution(6, 0, 1).is_err());
    }
}
