//! Real generalized Schur reduction of a pencil `(A, B)`, eigenvalues only.
//!
//! Householder QR of `B`, Givens reduction to Hessenberg-triangular form,
//! then implicit double-shift QZ sweeps on the active window. Only the
//! block structure of the final quasi-triangular `A` is needed, so the
//! orthogonal factors are not accumulated and the updates are restricted
//! to the rows and columns of the window being iterated.

use super::Matrix;
use crate::error::{Error, Result};

/// Sweeps per unit of `N` before giving up.
const SWEEPS_PER_ROW: usize = 30;

/// Sweep count without deflation after which an exceptional shift is used.
const EXCEPTIONAL_EVERY: usize = 10;

#[derive(Clone, Copy)]
struct Rotation {
    c: f64,
    s: f64,
}

impl Rotation {
    /// Rotation taking `(a, b)` to `(r, 0)`.
    fn zeroing(a: f64, b: f64) -> Self {
        if b == 0.0 {
            return Rotation { c: 1.0, s: 0.0 };
        }
        let r = a.hypot(b);
        Rotation { c: a / r, s: b / r }
    }

    /// Rows `i, j` become `c x_i + s x_j` and `-s x_i + c x_j`.
    fn rows(self, m: &mut Matrix, i: usize, j: usize, cols: std::ops::Range<usize>) {
        for k in cols {
            let (x, y) = (m[(i, k)], m[(j, k)]);
            m[(i, k)] = self.c * x + self.s * y;
            m[(j, k)] = -self.s * x + self.c * y;
        }
    }

    /// Columns `i, j` become `c x_i - s x_j` and `s x_i + c x_j`.
    fn cols(self, m: &mut Matrix, i: usize, j: usize, rows: std::ops::Range<usize>) {
        for k in rows {
            let (x, y) = (m[(k, i)], m[(k, j)]);
            m[(k, i)] = self.c * x - self.s * y;
            m[(k, j)] = self.s * x + self.c * y;
        }
    }

    /// Column rotation of `(i, j)` that zeroes `m[(row, i)]`.
    fn zeroing_col(m: &Matrix, row: usize, i: usize, j: usize) -> Self {
        let (u, v) = (m[(row, i)], m[(row, j)]);
        if u == 0.0 {
            return Rotation { c: 1.0, s: 0.0 };
        }
        let r = u.hypot(v);
        Rotation { c: v / r, s: u / r }
    }
}

/// Upper triangularize `b` with Householder reflections applied to both.
fn triangularize(a: &mut Matrix, b: &mut Matrix) {
    let n = a.n();
    let mut v = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let norm = (k..n).map(|i| b[(i, k)] * b[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if b[(k, k)] > 0.0 { -norm } else { norm };
        for i in k..n {
            v[i] = b[(i, k)];
        }
        v[k] -= alpha;
        let vv: f64 = (k..n).map(|i| v[i] * v[i]).sum();
        if vv == 0.0 {
            continue;
        }
        for m in [&mut *a, &mut *b] {
            for j in 0..n {
                let dot: f64 = (k..n).map(|i| v[i] * m[(i, j)]).sum();
                let f = 2.0 * dot / vv;
                for i in k..n {
                    m[(i, j)] -= f * v[i];
                }
            }
        }
        for i in k + 1..n {
            b[(i, k)] = 0.0;
        }
    }
}

/// Reduce to `A` upper Hessenberg, `B` upper triangular.
fn hessenberg_triangular(a: &mut Matrix, b: &mut Matrix) {
    let n = a.n();
    for j in 0..n.saturating_sub(2) {
        for i in (j + 2..n).rev() {
            let g = Rotation::zeroing(a[(i - 1, j)], a[(i, j)]);
            g.rows(a, i - 1, i, j..n);
            g.rows(b, i - 1, i, i - 1..n);
            a[(i, j)] = 0.0;
            let z = Rotation::zeroing_col(b, i, i - 1, i);
            z.cols(b, i - 1, i, 0..i + 1);
            z.cols(a, i - 1, i, 0..n);
            b[(i, i - 1)] = 0.0;
        }
    }
}

/// Inverse of the upper triangular 3x3 block of `t` starting at `s`.
fn inv_upper3(t: &Matrix, s: usize) -> [[f64; 3]; 3] {
    let d = [
        1.0 / t[(s, s)],
        1.0 / t[(s + 1, s + 1)],
        1.0 / t[(s + 2, s + 2)],
    ];
    let mut r = [[0.0; 3]; 3];
    r[0][0] = d[0];
    r[1][1] = d[1];
    r[2][2] = d[2];
    r[0][1] = -t[(s, s + 1)] * d[0] * d[1];
    r[1][2] = -t[(s + 1, s + 2)] * d[1] * d[2];
    r[0][2] = -(t[(s, s + 1)] * r[1][2] + t[(s, s + 2)] * d[2]) * d[0];
    r
}

/// Whether the 2x2 block at `(k, k)` has real eigenvalues, from the sign of
/// the discriminant of `A_2 B_2^{-1}`.
fn block_is_real(h: &Matrix, t: &Matrix, k: usize) -> bool {
    let (t00, t01, t11) = (t[(k, k)], t[(k, k + 1)], t[(k + 1, k + 1)]);
    let (i00, i01, i11) = (1.0 / t00, -t01 / (t00 * t11), 1.0 / t11);
    let w00 = h[(k, k)] * i00;
    let w01 = h[(k, k)] * i01 + h[(k, k + 1)] * i11;
    let w10 = h[(k + 1, k)] * i00;
    let w11 = h[(k + 1, k)] * i01 + h[(k + 1, k + 1)] * i11;
    let p = 0.5 * (w00 - w11);
    p * p + w01 * w10 >= 0.0
}

/// One implicit double-shift sweep over rows and columns `lo..=hi`.
fn qz_sweep(h: &mut Matrix, t: &mut Matrix, lo: usize, hi: usize, exceptional: bool) {
    // trailing 2x2 of W = H T^{-1}
    let r = inv_upper3(t, hi - 2);
    let wmm = h[(hi - 1, hi - 2)] * r[0][1] + h[(hi - 1, hi - 1)] * r[1][1];
    let wmn =
        h[(hi - 1, hi - 2)] * r[0][2] + h[(hi - 1, hi - 1)] * r[1][2] + h[(hi - 1, hi)] * r[2][2];
    let wnm = h[(hi, hi - 1)] * r[1][1];
    let wnn = h[(hi, hi - 1)] * r[1][2] + h[(hi, hi)] * r[2][2];
    let (s, p) = if exceptional {
        let e = (h[(hi, hi - 1)] * r[1][1]).abs() + (h[(hi - 1, hi - 2)] * r[0][0]).abs();
        (1.5 * e, e * e)
    } else {
        (wmm + wnn, wmm * wnn - wmn * wnm)
    };

    // first column of (W^2 - s W + p I)
    let q = inv_upper3(t, lo);
    let w11 = h[(lo, lo)] * q[0][0];
    let w21 = h[(lo + 1, lo)] * q[0][0];
    let w12 = h[(lo, lo)] * q[0][1] + h[(lo, lo + 1)] * q[1][1];
    let w22 = h[(lo + 1, lo)] * q[0][1] + h[(lo + 1, lo + 1)] * q[1][1];
    let w32 = h[(lo + 2, lo + 1)] * q[1][1];
    let mut x = w11 * w11 + w12 * w21 - s * w11 + p;
    let mut y = w21 * (w11 + w22 - s);
    let mut z = w21 * w32;

    let end = hi + 1;
    for k in lo..hi - 1 {
        let col_start = if k > lo { k - 1 } else { lo };
        // left: zero z then y in rows k..k+2
        let g = Rotation::zeroing(y, z);
        g.rows(h, k + 1, k + 2, col_start..end);
        g.rows(t, k + 1, k + 2, k + 1..end);
        let g = Rotation::zeroing(x, g.c * y + g.s * z);
        g.rows(h, k, k + 1, col_start..end);
        g.rows(t, k, k + 1, k..end);
        if k > lo {
            h[(k + 1, k - 1)] = 0.0;
            h[(k + 2, k - 1)] = 0.0;
        }
        // right: restore T to triangular in columns k..k+2
        let row_end = (k + 4).min(end);
        let zr = Rotation::zeroing_col(t, k + 2, k + 1, k + 2);
        zr.cols(t, k + 1, k + 2, lo..k + 3);
        zr.cols(h, k + 1, k + 2, lo..row_end);
        let zr = Rotation::zeroing_col(t, k + 2, k, k + 2);
        zr.cols(t, k, k + 2, lo..k + 3);
        zr.cols(h, k, k + 2, lo..row_end);
        let zr = Rotation::zeroing_col(t, k + 1, k, k + 1);
        zr.cols(t, k, k + 1, lo..k + 2);
        zr.cols(h, k, k + 1, lo..row_end);
        t[(k + 1, k)] = 0.0;
        t[(k + 2, k)] = 0.0;
        t[(k + 2, k + 1)] = 0.0;

        x = h[(k + 1, k)];
        y = h[(k + 2, k)];
        if k + 3 <= hi {
            z = h[(k + 3, k)];
        }
    }
    // final 2-row step
    let k = hi - 1;
    let g = Rotation::zeroing(x, y);
    g.rows(h, k, k + 1, k - 1..end);
    g.rows(t, k, k + 1, k..end);
    h[(k + 1, k - 1)] = 0.0;
    let zr = Rotation::zeroing_col(t, k + 1, k, k + 1);
    zr.cols(t, k, k + 1, lo..k + 2);
    zr.cols(h, k, k + 1, lo..end);
    t[(k + 1, k)] = 0.0;
}

/// Number of real generalized eigenvalues of `(a, b)`, i.e. the number of
/// 1x1 blocks of the real generalized Schur form. 2x2 blocks are classified
/// by their discriminant.
pub fn count_real(a: &Matrix, b: &Matrix) -> Result<u32> {
    let n = a.n();
    let mut h = a.clone();
    let mut t = b.clone();
    triangularize(&mut h, &mut t);
    hessenberg_triangular(&mut h, &mut t);

    let t_norm = t.max_abs();
    for i in 0..n {
        if t[(i, i)].abs() <= f64::EPSILON * t_norm {
            return Err(Error::DecompositionFailure(format!(
                "B is numerically singular (|T[{i},{i}]| = {:e})",
                t[(i, i)].abs()
            )));
        }
    }

    let mut count = 0;
    let mut since_deflation = 0;
    let mut sweeps = 0;
    let budget = SWEEPS_PER_ROW * n.max(1);
    let mut hi = n as isize - 1;
    while hi >= 0 {
        let top = hi as usize;
        let mut lo = top;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].abs();
            if sub <= f64::EPSILON * (h[(lo - 1, lo - 1)].abs() + h[(lo, lo)].abs()) {
                h[(lo, lo - 1)] = 0.0;
                break;
            }
            lo -= 1;
        }
        if lo == top {
            count += 1;
            hi -= 1;
            since_deflation = 0;
        } else if lo + 1 == top {
            if block_is_real(&h, &t, lo) {
                count += 2;
            }
            hi -= 2;
            since_deflation = 0;
        } else {
            sweeps += 1;
            since_deflation += 1;
            if sweeps > budget {
                return Err(Error::DecompositionFailure(format!(
                    "QZ did not converge within {budget} sweeps"
                )));
            }
            qz_sweep(
                &mut h,
                &mut t,
                lo,
                top,
                since_deflation % EXCEPTIONAL_EVERY == 0,
            );
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_hessenberg_triangular(h: &Matrix, t: &Matrix) -> bool {
        let n = h.n();
        (0..n).all(|i| {
            (0..n).all(|j| (i <= j + 1 || h[(i, j)] == 0.0) && (i <= j || t[(i, j)] == 0.0))
        })
    }

    #[test]
    fn reduction_shape() {
        let mut a = Matrix::from_fn(5, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let mut b = Matrix::from_fn(5, |i, j| {
            ((i * 5 + j * 2) % 7) as f64 + if i == j { 4.0 } else { 0.0 }
        });
        triangularize(&mut a, &mut b);
        hessenberg_triangular(&mut a, &mut b);
        assert!(is_hessenberg_triangular(&a, &b));
    }

    #[test]
    fn identity_and_rotation() {
        let i4 = Matrix::identity(4);
        assert_eq!(count_real(&i4, &i4).unwrap(), 4);
        let rot = Matrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert_eq!(count_real(&rot, &Matrix::identity(2)).unwrap(), 0);
    }

    #[test]
    fn diagonal_and_companion() {
        // eigenvalues 1, 2, 3 and the pair +-i
        let a = Matrix::from_rows(&[
            &[1.0, 2.0, 0.0, 0.0, 1.0],
            &[0.0, 2.0, 5.0, 0.0, 0.0],
            &[0.0, 0.0, 3.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, -1.0],
            &[0.0, 0.0, 0.0, 1.0, 0.0],
        ]);
        assert_eq!(count_real(&a, &Matrix::identity(5)).unwrap(), 3);
    }

    #[test]
    fn singular_b_is_reported() {
        let a = Matrix::identity(3);
        let mut b = Matrix::identity(3);
        b[(2, 2)] = 0.0;
        assert!(matches!(
            count_real(&a, &b),
            Err(Error::DecompositionFailure(_))
        ));
    }
}
