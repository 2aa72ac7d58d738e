//! Dense complex eigensolver and weighted operator norms.
//!
//! The eigensolver reduces to upper Hessenberg form with Householder
//! reflections and then runs a shifted QR iteration with complex Givens
//! rotations. It is meant for finite sections of a few hundred (up to 2048)
//! rows, not for production linear algebra at scale.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::matrix::ComplexMatrix;

/// Hard cap on dense eigenproblem dimensions.
pub const DENSE_DIM_CAP: usize = 2048;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// All eigenvalues of a square matrix, with multiplicity, in no particular
/// order.
///
/// Exactly triangular inputs (this includes diagonal ones, and the assembled
/// lower-triangular grid operators) are read off the diagonal without
/// iteration.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::NonSquareMatrix {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n > DENSE_DIM_CAP {
        return Err(Error::DimensionCap {
            dim: n,
            cap: DENSE_DIM_CAP,
        });
    }
    if n == 0 {
        return Ok(vec![]);
    }
    if m.is_upper_triangular() || m.is_lower_triangular() {
        return Ok(m.diagonal_entries());
    }
    let mut h = m.clone();
    hessenberg_in_place(&mut h);
    hessenberg_eigenvalues(h)
}

/// In-place unitary reduction to upper Hessenberg form.
fn hessenberg_in_place(a: &mut ComplexMatrix) {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k, rows k+1..n.
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let norm_x = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm_x;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // Left: rows k+1..n of columns k..n.
        for j in k..n {
            let mut s = ZERO;
            for (idx, i) in (k + 1..n).enumerate() {
                s += v[idx].conj() * a[(i, j)];
            }
            s *= tau;
            for (idx, i) in (k + 1..n).enumerate() {
                let upd = v[idx] * s;
                a[(i, j)] -= upd;
            }
        }
        // Right: columns k+1..n of all rows.
        for i in 0..n {
            let mut s = ZERO;
            for (idx, j) in (k + 1..n).enumerate() {
                s += a[(i, j)] * v[idx];
            }
            s *= tau;
            for (idx, j) in (k + 1..n).enumerate() {
                let upd = s * v[idx].conj();
                a[(i, j)] -= upd;
            }
        }
        // Zero the annihilated part explicitly so triangular checks stay exact.
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Eigenvalues of the two-by-two block [[a, b], [c, d]].
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mean = (a + d) * 0.5;
    let m = (a - d) * 0.5;
    let disc = (m * m + b * c).sqrt();
    // Take the larger root first; recover the other from the determinant to
    // dodge cancellation.
    let l_big = if (mean + disc).norm() >= (mean - disc).norm() {
        mean + disc
    } else {
        mean - disc
    };
    if l_big.norm() == 0.0 {
        return (ZERO, ZERO);
    }
    let det = a * d - b * c;
    (l_big, det / l_big)
}

/// Shifted QR iteration on an upper Hessenberg matrix; consumes the matrix.
fn hessenberg_eigenvalues(mut h: ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let mut eigs = vec![ZERO; n];
    let scale = h.max_abs().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n;
    let mut block_iters = 0usize;
    let mut total_iters = 0usize;
    let cap = 80 * n + 200;

    while hi > 0 {
        // Deflation scan: find the start of the active block.
        let mut lo = hi - 1;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut small = eps * (h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm());
            if small == 0.0 {
                small = eps * scale;
            }
            if sub <= small {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }

        if lo == hi - 1 {
            eigs[hi - 1] = h[(hi - 1, hi - 1)];
            hi -= 1;
            block_iters = 0;
            continue;
        }
        if lo == hi - 2 {
            let (l1, l2) = eig2(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            );
            eigs[hi - 2] = l1;
            eigs[hi - 1] = l2;
            hi -= 2;
            block_iters = 0;
            continue;
        }

        total_iters += 1;
        block_iters += 1;
        if total_iters > cap {
            return Err(Error::EigenNonConvergence { iterations: total_iters });
        }

        // Wilkinson shift from the trailing 2x2, with an occasional
        // exceptional shift to break symmetry-induced stalls.
        let sigma = if block_iters.is_multiple_of(13) {
            h[(hi - 1, hi - 1)] + Complex64::new(0.75 * h[(hi - 1, hi - 2)].norm(), 0.0)
        } else {
            let (l1, l2) = eig2(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            );
            let d = h[(hi - 1, hi - 1)];
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };

        qr_step(&mut h, lo, hi, sigma);
    }
    Ok(eigs)
}

/// One explicit shifted QR sweep on the active block [lo, hi).
fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, sigma: Complex64) {
    for i in lo..hi {
        let d = h[(i, i)];
        h[(i, i)] = d - sigma;
    }
    // Factor with Givens rotations; remember them for the RQ product.
    let mut rot = Vec::with_capacity(hi - lo - 1);
    for k in lo..hi - 1 {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (Complex64::new(1.0, 0.0), ZERO)
        } else {
            (a / r, b / r)
        };
        rot.push((c, s));
        // Rows k, k+1 over columns k..hi.
        for j in k..hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = c.conj() * x + s.conj() * y;
            h[(k + 1, j)] = -s * x + c * y;
        }
    }
    // Right multiplication by the adjoint rotations: columns k, k+1.
    for (idx, &(c, s)) in rot.iter().enumerate() {
        let k = lo + idx;
        for i in lo..(k + 2).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s;
            h[(i, k + 1)] = -x * s.conj() + y * c.conj();
        }
    }
    for i in lo..hi {
        let d = h[(i, i)];
        h[(i, i)] = d + sigma;
    }
}

/// Deterministic start vector for power iterations.
pub(crate) struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [-1, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 * 2.0 - 1.0
    }
}

/// Largest singular value of the linear map given by `apply` / `apply_adj`,
/// via power iteration on the normal operator. Deterministic.
pub(crate) fn largest_singular_value(
    n: usize,
    apply: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    apply_adj: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut rng = SplitMix64(0x5eed_cafe_f00d_0001);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.next_f64(), rng.next_f64()))
        .collect();
    let nv = l2(&v);
    if nv == 0.0 {
        return 0.0;
    }
    for z in &mut v {
        *z /= nv;
    }
    let mut sigma = 0.0f64;
    let mut stable = 0;
    for _ in 0..20_000 {
        let av = apply(&v);
        let s = l2(&av);
        if s == 0.0 {
            return 0.0;
        }
        let mut w = apply_adj(&av);
        let nw = l2(&w);
        if nw == 0.0 {
            return s;
        }
        for z in &mut w {
            *z /= nw;
        }
        v = w;
        if (s - sigma).abs() <= 1e-13 * s {
            stable += 1;
            if stable >= 3 {
                return s;
            }
        } else {
            stable = 0;
        }
        sigma = s;
    }
    sigma
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Operator norm of `m` with respect to the weighted inner product
/// `<x, y> = sum_j w_j x_j conj(y_j)`, i.e. the largest singular value of
/// `W^{1/2} M W^{-1/2}`.
pub fn operator_norm(m: &ComplexMatrix, ip_weights: &[f64]) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::NonSquareMatrix {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if ip_weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: ip_weights.len(),
        });
    }
    if ip_weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::Domain("inner-product weights must be positive".into()));
    }
    let sw: Vec<f64> = ip_weights.iter().map(|w| w.sqrt()).collect();
    let apply = |x: &[Complex64]| -> Vec<Complex64> {
        let scaled: Vec<Complex64> = x.iter().zip(&sw).map(|(z, s)| z / s).collect();
        let mut y = m.matvec(&scaled).expect("dimension checked");
        for (z, s) in y.iter_mut().zip(&sw) {
            *z *= *s;
        }
        y
    };
    let apply_adj = |x: &[Complex64]| -> Vec<Complex64> {
        let scaled: Vec<Complex64> = x.iter().zip(&sw).map(|(z, s)| z * s).collect();
        let mut y = m.matvec_adj(&scaled).expect("dimension checked");
        for (z, s) in y.iter_mut().zip(&sw) {
            *z /= *s;
        }
        y
    };
    Ok(largest_singular_value(n, &apply, &apply_adj))
}

/// Symmetric tridiagonal eigenproblem (implicit-shift QL), returning the
/// eigenvalues in ascending order together with the first component of each
/// normalized eigenvector. This is exactly what Golub-Welsch quadrature
/// construction needs.
///
/// `d` holds the diagonal (length n), `e` the off-diagonal (length n-1);
/// both are consumed as scratch (a sentinel is appended to `e`).
#[allow(clippy::ptr_arg)]
pub(crate) fn sym_tridiag_eig_first_components(
    d: &mut Vec<f64>,
    e: &mut Vec<f64>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = d.len();
    if n == 0 {
        return Ok((vec![], vec![]));
    }
    e.push(0.0); // sentinel, JAMA-style
    let mut z = vec![0.0f64; n];
    z[0] = 1.0;
    let eps = f64::EPSILON;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::EigenNonConvergence { iterations: iter });
            }
            // Implicit shift from the 2x2 at l.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                // Accumulate the first row of the eigenvector matrix.
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let vals = order.iter().map(|&i| d[i]).collect();
    let firsts = order.iter().map(|&i| z[i]).collect();
    Ok((vals, firsts))
}
