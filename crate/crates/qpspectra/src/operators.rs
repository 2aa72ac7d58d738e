//! Finite matrix representations of the operator zoo: diagonal multipliers,
//! node shifts, analytic Toeplitz operators on the transform side, dilations,
//! and composition/Toeplitz operators on the disk monomial basis.
//!
//! Transform-side operators act on grid value vectors; the weighted inner
//! product lives in the grid, never in the matrices, and adjoints always go
//! through [`weighted_adjoint`].

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::gamma::ln_gamma;
use crate::numerics::matrix::ComplexMatrix;
use crate::numerics::poly::Poly;
use crate::numerics::eig::operator_norm;
use crate::spaces::HalfPlaneGrid;
use crate::symbols::ExpPolySymbol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Cap on disk finite sections.
pub const DISK_DEGREE_CAP: usize = 512;

/// Matrix acting on grid value vectors of a half-plane grid.
#[derive(Debug, Clone)]
pub struct FourierOperator {
    grid: Arc<HalfPlaneGrid>,
    matrix: ComplexMatrix,
    /// False when the construction involved interpolation (dilations with
    /// p != 1); exact grid representations otherwise.
    exact: bool,
}

impl FourierOperator {
    pub fn new(grid: Arc<HalfPlaneGrid>, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != grid.len() || matrix.cols() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: matrix.rows().max(matrix.cols()),
            });
        }
        Ok(Self {
            grid,
            matrix,
            exact: true,
        })
    }

    pub fn grid(&self) -> &Arc<HalfPlaneGrid> {
        &self.grid
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    /// Applies the operator to grid values.
    pub fn apply(&self, values: &[Complex64]) -> Result<Vec<Complex64>> {
        self.matrix.matvec(values)
    }

    /// Operator norm in the grid's weighted inner product.
    pub fn weighted_norm(&self) -> Result<f64> {
        operator_norm(&self.matrix, &self.grid.metric_weights())
    }

    /// Similarity transform `W^(1/2) A W^(-1/2)` that turns the weighted
    /// metric into the flat one (used before dense eigensolves).
    pub fn symmetrized_matrix(&self) -> ComplexMatrix {
        let w = self.grid.metric_weights();
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let scale = (w[i] / w[j]).sqrt();
                out[(i, j)] = self.matrix[(i, j)] * scale;
            }
        }
        out
    }

    pub(crate) fn with_exactness(mut self, exact: bool) -> Self {
        self.exact = exact;
        self
    }
}

/// Matrix on the orthonormalized monomial basis `e_n = z^n / ||z^n||` of the
/// weighted disk space, degree 0..=degree.
#[derive(Debug, Clone)]
pub struct DiskOperator {
    alpha: f64,
    degree: usize,
    matrix: ComplexMatrix,
}

impl DiskOperator {
    pub fn new(alpha: f64, degree: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != degree + 1 || matrix.cols() != degree + 1 {
            return Err(Error::DimensionMismatch {
                expected: degree + 1,
                got: matrix.rows().max(matrix.cols()),
            });
        }
        Ok(Self {
            alpha,
            degree,
            matrix,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Norm of the monomial: `||z^n|| = sqrt(pi n! Gamma(alpha+1) / Gamma(n+alpha+2))`.
pub fn onb_norm(n: usize, alpha: f64) -> f64 {
    let ln = std::f64::consts::PI.ln() + ln_gamma(n as f64 + 1.0) + ln_gamma(alpha + 1.0)
        - ln_gamma(n as f64 + alpha + 2.0);
    (0.5 * ln).exp()
}

/// Diagonal multiplier `diag(theta(t_j))`.
pub fn multiplier_op(
    theta: impl Fn(f64) -> Complex64,
    grid: Arc<HalfPlaneGrid>,
) -> Result<FourierOperator> {
    let entries: Vec<Complex64> = grid.nodes().iter().map(|&t| theta(t)).collect();
    FourierOperator::new(grid, ComplexMatrix::diagonal(&entries))
}

/// The multiplier profile of the n-fold derivative-kernel operator:
/// `phi_n(t) = (2 pi i t)^n exp(-2 pi beta t) / ((alpha+2)...(alpha+n+1))`,
/// with the empty product for n = 0. Evaluated in log space so large n and t
/// do not overflow.
pub fn phi_n_symbol(n: usize, beta: f64, alpha: f64) -> impl Fn(f64) -> Complex64 {
    // log of (alpha+2)...(alpha+n+1) = lnGamma(alpha+n+2) - lnGamma(alpha+2)
    let ln_denom = ln_gamma(alpha + n as f64 + 2.0) - ln_gamma(alpha + 2.0);
    move |t: f64| {
        if t <= 0.0 {
            return if n == 0 { ONE } else { ZERO };
        }
        let magnitude = n as f64 * (TWO_PI * t).ln() - TWO_PI * beta * t - ln_denom;
        // phase of i^n
        let phase = std::f64::consts::FRAC_PI_2 * n as f64;
        Complex64::from_polar(magnitude.exp(), phase)
    }
}

/// Number of grid steps of a shift length, if commensurable.
pub(crate) fn shift_steps(t0: f64, grid: &HalfPlaneGrid) -> Result<usize> {
    let dt = grid.spacing().ok_or(Error::NonUniformGrid)?;
    if t0 < 0.0 {
        return Err(Error::Domain("shift length must be nonnegative".into()));
    }
    let ratio = t0 / dt;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > 1e-12 * ratio.max(1.0) {
        return Err(Error::IncommensurableShift {
            t0,
            dt,
            suggestion: rounded * dt,
        });
    }
    Ok(rounded as usize)
}

/// Node shift `f(t) -> f(t - t0)` (zero below the shift), as a 0/1
/// sub-diagonal matrix. Requires a uniform grid with `t0` on it.
pub fn shift_op(t0: f64, grid: Arc<HalfPlaneGrid>) -> Result<FourierOperator> {
    let k = shift_steps(t0, &grid)?;
    let n = grid.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for j in k..n {
        m[(j, j - k)] = ONE;
    }
    FourierOperator::new(grid, m)
}

/// Analytic Toeplitz operator for the symbol
/// `tau(z) = c0 + sum c_k exp(i gamma_k z)` in its transform-side
/// representation `c0 I + sum c_k S_(gamma_k / 2 pi)` (multiplication by an
/// analytic symbol is a sum of node shifts).
pub fn toeplitz_exppoly(
    c0: Complex64,
    terms: &[(Complex64, f64)],
    grid: Arc<HalfPlaneGrid>,
) -> Result<FourierOperator> {
    let n = grid.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = c0;
    }
    for &(c, gamma) in terms {
        let k = shift_steps(gamma / TWO_PI, &grid)?;
        for j in k..n {
            let cur = m[(j, j - k)];
            m[(j, j - k)] = cur + c;
        }
    }
    FourierOperator::new(grid, m)
}

/// Dilation `V_p: g(z) -> g(pz)`, acting on transform-side samples as
/// `f(s) -> f(s/p)/p`. Identity for p = 1; otherwise a cubic-interpolation
/// resampling matrix, flagged approximate. Samples are extended by the value
/// 0 at t = 0 and beyond the last node.
pub fn dilation_op(p: f64, grid: Arc<HalfPlaneGrid>) -> Result<FourierOperator> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("dilation parameter must be positive, got {p}")));
    }
    let n = grid.len();
    if p == 1.0 {
        return FourierOperator::new(grid, ComplexMatrix::identity(n));
    }
    if n < 4 {
        return Err(Error::Domain("dilation resampling needs at least 4 nodes".into()));
    }
    let nodes = grid.nodes();
    let mut m = ComplexMatrix::zeros(n, n);
    for (row, &t) in nodes.iter().enumerate() {
        let s = t / p;
        if s > nodes[n - 1] {
            continue; // beyond the grid: decayed to 0
        }
        // Bracketing index: nodes[i] <= s < nodes[i+1]; below the first node
        // the stencil extrapolates from the leading nodes (half a step at
        // most, same interpolation order).
        let i = match nodes.binary_search_by(|x| x.partial_cmp(&s).expect("finite")) {
            Ok(j) => j,
            Err(j) => j.saturating_sub(1),
        };
        let i = i.clamp(1, n - 3);
        let stencil = [i - 1, i, i + 1, i + 2];
        for (a, &ia) in stencil.iter().enumerate() {
            // Lagrange weight for node ia over the stencil.
            let mut w = 1.0;
            for (b, &ib) in stencil.iter().enumerate() {
                if a != b {
                    w *= (s - nodes[ib]) / (nodes[ia] - nodes[ib]);
                }
            }
            let cur = m[(row, ia)];
            m[(row, ia)] = cur + Complex64::new(w / p, 0.0);
        }
    }
    Ok(FourierOperator::new(grid, m)?.with_exactness(false))
}

/// Finite section of the composition operator `f -> f(phi)` on the
/// orthonormal monomial basis, assembled from exact truncated polynomial
/// powers of `phi` (quadrature stays available as the independent check).
pub fn composition_disk(phi: &Poly, alpha: f64, degree: usize) -> Result<DiskOperator> {
    if degree > DISK_DEGREE_CAP {
        return Err(Error::DimensionCap {
            dim: degree,
            cap: DISK_DEGREE_CAP,
        });
    }
    // Boundary check by sampling: a polynomial self-map of the disk attains
    // its maximum modulus on the circle.
    let samples = 4096;
    let mut max = 0.0f64;
    for k in 0..samples {
        let z = Complex64::from_polar(1.0, TWO_PI * k as f64 / samples as f64);
        max = max.max(phi.eval(z).norm());
    }
    if max > 1.0 + 1e-9 {
        return Err(Error::NotASelfMap { max });
    }
    let n = degree + 1;
    let norms: Vec<f64> = (0..n).map(|k| onb_norm(k, alpha)).collect();
    let mut m = ComplexMatrix::zeros(n, n);
    // power = phi^col truncated to the retained degree
    let mut power = Poly::constant(ONE, degree);
    for col in 0..n {
        for row in 0..n {
            let a = power.coeff(row);
            if a.norm_sqr() != 0.0 {
                m[(row, col)] = a * (norms[row] / norms[col]);
            }
        }
        if col + 1 < n {
            power = power.mul_trunc(phi, degree);
        }
    }
    DiskOperator::new(alpha, degree, m)
}

/// Toeplitz operator on the disk basis for a harmonic polynomial symbol
/// `sum_j a_j z^j + sum_(j>=1) b_j conj(z)^j`; entries are the inner
/// products `<f e_n, e_m>` (the projection is implicit in expanding against
/// the basis).
pub fn toeplitz_disk(
    analytic: &[Complex64],
    conjugate: &[Complex64],
    alpha: f64,
    degree: usize,
) -> Result<DiskOperator> {
    if degree > DISK_DEGREE_CAP {
        return Err(Error::DimensionCap {
            dim: degree,
            cap: DISK_DEGREE_CAP,
        });
    }
    let n = degree + 1;
    let norms: Vec<f64> = (0..n).map(|k| onb_norm(k, alpha)).collect();
    let mut m = ComplexMatrix::zeros(n, n);
    for (j, &a) in analytic.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        // z^j e_col has degree col + j: contributes at row col + j.
        for col in 0..n.saturating_sub(j) {
            let row = col + j;
            let cur = m[(row, col)];
            m[(row, col)] = cur + a * (norms[row] / norms[col]);
        }
    }
    for (j, &b) in conjugate.iter().enumerate() {
        if j == 0 {
            // Constant part of the conjugate sum belongs in `analytic`.
            if b.norm_sqr() != 0.0 {
                for d in 0..n {
                    let cur = m[(d, d)];
                    m[(d, d)] = cur + b;
                }
            }
            continue;
        }
        if b.norm_sqr() == 0.0 {
            continue;
        }
        // conj(z)^j z^col projects onto degree col - j.
        for col in j..n {
            let row = col - j;
            let cur = m[(row, col)];
            m[(row, col)] = cur + b * (norms[col] / norms[row]);
        }
    }
    DiskOperator::new(alpha, degree, m)
}

/// Adjoint with respect to the grid's weighted inner product:
/// `A* = W^-1 A^H W` with `W = diag(w_j t_j^-(alpha+1))` (up to the shared
/// constant, which cancels).
pub fn weighted_adjoint(op: &FourierOperator) -> FourierOperator {
    let w = op.grid().metric_weights();
    let n = op.dim();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = op.matrix()[(j, i)].conj() * (w[j] / w[i]);
        }
    }
    FourierOperator {
        grid: op.grid().clone(),
        matrix: m,
        exact: op.is_exact(),
    }
}

/// Builds a uniform grid commensurable with every term frequency of the
/// symbol: the spacing divides each shift length `gamma_k / 2 pi`. The grid
/// has `n` nodes and reaches at least `t_max` when the shift structure
/// permits (a constant symbol grid is free to match `t_max` exactly).
pub fn grid_for_symbol(
    psi: &ExpPolySymbol,
    alpha: f64,
    n: usize,
    t_max: f64,
) -> Result<Arc<HalfPlaneGrid>> {
    if !(t_max > 0.0) || n == 0 {
        return Err(Error::Domain("grid needs t_max > 0 and nodes".into()));
    }
    if psi.is_constant() {
        return Ok(Arc::new(HalfPlaneGrid::uniform(alpha, t_max / n as f64, n)?));
    }
    // Common divisor of the shift lengths via rational frequency ratios.
    let shifts: Vec<f64> = psi.terms().iter().map(|&(_, g)| g / TWO_PI).collect();
    let mut d = shifts[0];
    for &s in &shifts[1..] {
        let ratio = s / d;
        let (p, q) = crate::symbols::rational_ratio(ratio).ok_or(
            Error::IncommensurableFrequencies {
                ratio,
                cap: 1_000_000,
                tol: 1e-9,
            },
        )?;
        let _ = p;
        d /= q as f64;
    }
    let m = ((n as f64) * d / t_max).floor().max(1.0);
    let dt = d / m;
    Ok(Arc::new(HalfPlaneGrid::uniform(alpha, dt, n)?))
}
