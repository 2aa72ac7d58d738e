//! Essential-spectrum evaluation and the validation diagnostics: the
//! closed-form spectrum set, finite-section eigenvalues, approximate
//! eigenvalue residuals, essential-normality decay, and mean-oscillation
//! profiles.
//!
//! Parametrization convention: the spectrum is the set
//! `{exp(izt) : t in [0, inf], z in range} union {0}`; internally the curves
//! are sampled as `lambda(z, t) = exp(2 pi i z t)`, matching the transform
//! convention of [`crate::spaces`], which re-scales the `t` parameter by
//! `2 pi` without changing the set. Reports carry that note.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::eig::eigenvalues;
use crate::numerics::quad::gauss_legendre_on;
use crate::operators::{weighted_adjoint, DiskOperator, FourierOperator};
use crate::symbols::RangeCloud;

const I: Complex64 = Complex64::new(0.0, 1.0);
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Spectrum point cloud with its generating curves.
#[derive(Debug, Clone)]
pub struct SpectrumSet {
    pub source_range: RangeCloud,
    /// Extent of the internal t grid (in the 2-pi-rescaled parameter).
    pub t_max: f64,
    pub t_count: usize,
    /// All curve samples plus the limit point 0.
    pub points: Vec<Complex64>,
    /// Per range point: the sampled curve `t -> exp(2 pi i z t)`.
    pub parametric: Vec<(Complex64, Vec<Complex64>)>,
}

/// Required decay of the curve tails: `exp(-2 pi t_max min Im z)` must be
/// below 1e-13, i.e. `2 pi t_max min Im z >= 30`.
const CURVE_TAIL_EXPONENT: f64 = 30.0;

/// Evaluates the essential-spectrum formula over a range cloud: the curves
/// `exp(2 pi i z t)` over a uniform t grid from 0 to `t_max`, together with
/// the limit point 0. Every range point must have positive imaginary part,
/// and the grid must run far enough that the curve tails reach 0 at working
/// precision.
pub fn essential_spectrum_formula(
    range: &RangeCloud,
    t_max: f64,
    t_count: usize,
) -> Result<SpectrumSet> {
    if range.points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if t_count < 2 {
        return Err(Error::Domain("spectrum t grid needs at least two points".into()));
    }
    let min_im = range
        .points
        .iter()
        .map(|z| z.im)
        .fold(f64::INFINITY, f64::min);
    if !(min_im > 0.0) {
        let bad = range
            .points
            .iter()
            .find(|z| !(z.im > 0.0))
            .expect("witness exists");
        return Err(Error::RangePointNotInUpperHalfPlane {
            point: format!("{bad}"),
        });
    }
    let product = TWO_PI * t_max * min_im;
    if product < CURVE_TAIL_EXPONENT {
        return Err(Error::SpectrumGridTooShort {
            product,
            required: CURVE_TAIL_EXPONENT,
        });
    }
    let curve_cap = 2001usize.min(t_count);
    let mut points = Vec::with_capacity(range.points.len() * t_count + 1);
    let mut parametric = Vec::with_capacity(range.points.len());
    for &z in &range.points {
        let mut curve = Vec::with_capacity(curve_cap);
        let stride = (t_count / curve_cap).max(1);
        for k in 0..t_count {
            let t = t_max * k as f64 / (t_count - 1) as f64;
            let lambda = (I * TWO_PI * z * t).exp();
            points.push(lambda);
            if k % stride == 0 {
                curve.push(lambda);
            }
        }
        parametric.push((z, curve));
    }
    points.push(Complex64::new(0.0, 0.0));
    Ok(SpectrumSet {
        source_range: range.clone(),
        t_max,
        t_count,
        points,
        parametric,
    })
}

/// Finite-section eigenvalues of an operator's matrix representation.
pub trait FiniteSection {
    /// Eigenvalues of the finite section, with multiplicity.
    fn finite_section_eigs(&self) -> Result<Vec<Complex64>>;
}

impl FiniteSection for FourierOperator {
    fn finite_section_eigs(&self) -> Result<Vec<Complex64>> {
        // Symmetrize the metric first so the flat-metric solver applies.
        eigenvalues(&self.symmetrized_matrix())
    }
}

impl FiniteSection for DiskOperator {
    fn finite_section_eigs(&self) -> Result<Vec<Complex64>> {
        eigenvalues(self.matrix())
    }
}

/// Tests `lambda = exp(2 pi i z t0)` as an approximate eigenvalue: builds a
/// Gaussian bump of the given width at `t0` and returns
/// `||(A - lambda) u|| / ||u||` in the grid's weighted norm.
pub fn residual_check(
    op: &FourierOperator,
    z: Complex64,
    t0: f64,
    width: f64,
) -> Result<f64> {
    let grid = op.grid();
    let nodes = grid.nodes();
    let mean_dt = grid.t_max() / grid.len() as f64;
    if !(width >= 3.0 * mean_dt) {
        return Err(Error::Domain(format!(
            "bump width {width} below three grid steps {:.3e}",
            3.0 * mean_dt
        )));
    }
    let (lo, hi) = (t0 - 3.0 * width, t0 + 3.0 * width);
    let slack = 1e-9 * grid.t_max().max(1.0);
    if lo < -slack || hi > grid.t_max() + slack {
        return Err(Error::BumpExceedsGrid {
            lo,
            hi,
            t_first: nodes[0],
            t_last: grid.t_max(),
        });
    }
    let bump: Vec<Complex64> = nodes
        .iter()
        .map(|&t| Complex64::new((-(t - t0) * (t - t0) / (2.0 * width * width)).exp(), 0.0))
        .collect();
    let lambda = (I * TWO_PI * z * t0).exp();
    let image = op.apply(&bump)?;
    let w = grid.metric_weights();
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for ((&b, &a), &wj) in bump.iter().zip(&image).zip(&w) {
        num += (a - lambda * b).norm_sqr() * wj;
        den += b.norm_sqr() * wj;
    }
    Ok((num / den).sqrt())
}

/// Column-norm decay profile of the self-commutator `A*A - AA*`.
#[derive(Debug, Clone)]
pub struct DecayProfile {
    /// Weighted column norms of the commutator.
    pub column_norms: Vec<f64>,
    pub head_max: f64,
    pub tail_max: f64,
    /// `head_max / tail_max`; 0 when the commutator vanishes identically,
    /// infinite when only the tail does.
    pub ratio: f64,
}

/// Essential-normality diagnostic: the self-commutator built with the
/// weighted adjoint, reported as per-column weighted norms with the
/// head-third / tail-third maximum ratio.
pub fn essential_normality_diag(op: &FourierOperator) -> Result<DecayProfile> {
    let astar = weighted_adjoint(op);
    let lhs = astar.matrix().mul(op.matrix())?;
    let rhs = op.matrix().mul(astar.matrix())?;
    let comm = lhs.sub(&rhs)?;
    let w = op.grid().metric_weights();
    let n = op.dim();
    let scale = op.matrix().max_abs().powi(2).max(f64::MIN_POSITIVE);
    let column_norms: Vec<f64> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| comm[(i, j)].norm_sqr() * w[i] / w[j])
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let head_max = column_norms[..n / 3].iter().cloned().fold(0.0, f64::max);
    let tail_max = column_norms[2 * n / 3..]
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    // An identically vanishing commutator (diagonal sections) reports 0.
    let ratio = if column_norms.iter().all(|&c| c <= 1e-13 * scale) {
        0.0
    } else if tail_max == 0.0 {
        f64::INFINITY
    } else {
        head_max / tail_max
    };
    Ok(DecayProfile {
        column_norms,
        head_max,
        tail_max,
        ratio,
    })
}

/// Mean-oscillation profile over boundary boxes.
#[derive(Debug, Clone)]
pub struct MOProfile {
    pub r_levels: Vec<f64>,
    /// Per level: the worst mean oscillation over the sampled base points.
    pub values: Vec<f64>,
}

/// Mean oscillation of `f` over the boundary boxes
/// `Q_z = { w : |w| >= |z|, |arg w - arg z| <= 1 - |z| }`, normalized by the
/// box measure `(1 + |z|)(1 - |z|)^2`, maximized over `theta_count` base
/// points per radius level. Each box is integrated with a 16 x 16 polar
/// Gauss sub-rule (mean first, oscillation second, same rule).
pub fn vmo_profile(
    f: impl Fn(Complex64) -> Complex64,
    r_levels: &[f64],
    theta_count: usize,
) -> Result<MOProfile> {
    if r_levels.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::Domain("radius levels must lie in (0, 1)".into()));
    }
    if theta_count == 0 {
        return Err(Error::Domain("need at least one base point per level".into()));
    }
    let mut values = Vec::with_capacity(r_levels.len());
    for &r in r_levels {
        let (rho_nodes, rho_weights) = gauss_legendre_on(r, 1.0, 16)?;
        let half_angle = 1.0 - r;
        let box_measure = (1.0 + r) * (1.0 - r) * (1.0 - r);
        let mut worst = 0.0f64;
        for k in 0..theta_count {
            let theta = TWO_PI * k as f64 / theta_count as f64;
            let (phi_nodes, phi_weights) =
                gauss_legendre_on(theta - half_angle, theta + half_angle, 16)?;
            // Mean over the box.
            let mut mass = 0.0;
            let mut mean = Complex64::new(0.0, 0.0);
            let mut samples = Vec::with_capacity(256);
            for (&rho, &wr) in rho_nodes.iter().zip(&rho_weights) {
                for (&phi, &wp) in phi_nodes.iter().zip(&phi_weights) {
                    let wgt = wr * wp * rho;
                    let v = f(Complex64::from_polar(rho, phi));
                    samples.push((v, wgt));
                    mean += v * wgt;
                    mass += wgt;
                }
            }
            if mass <= 0.0 {
                continue;
            }
            mean /= mass;
            let osc: f64 = samples.iter().map(|&(v, wgt)| (v - mean).norm() * wgt).sum();
            worst = worst.max(osc / box_measure);
        }
        values.push(worst);
    }
    Ok(MOProfile {
        r_levels: r_levels.to_vec(),
        values,
    })
}

/// Symmetric Hausdorff distance between two nonempty point clouds.
pub fn hausdorff_distance(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let directed = |from: &[Complex64], to: &[Complex64]| {
        from.iter()
            .map(|&p| {
                to.iter()
                    .map(|&q| (p - q).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approximation::{assemble_series, plan_series};
    use crate::numerics::matrix::ComplexMatrix;
    use crate::numerics::poly::Poly;
    use crate::operators::{composition_disk, grid_for_symbol, multiplier_op};
    use crate::spaces::HalfPlaneGrid;
    use crate::symbols::ExpPolySymbol;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cloud(points: Vec<Complex64>) -> RangeCloud {
        RangeCloud {
            points,
            epsilon: 0.02,
            n_max: f64::INFINITY,
        }
    }

    #[test]
    fn formula_for_a_point_range_is_a_segment() {
        // range {i}: points exp(2 pi i (i) t) = exp(-2 pi t), a subset of
        // [0, 1] containing 1 (at t = 0) and 0 (limit point).
        let set = essential_spectrum_formula(&cloud(vec![c(0.0, 1.0)]), 5.0, 500).unwrap();
        assert!(set.points.iter().any(|p| (p - c(1.0, 0.0)).norm() < 1e-14));
        assert!(set.points.iter().any(|p| p.norm() == 0.0));
        for p in &set.points {
            assert!(p.im.abs() < 1e-13);
            assert!(p.re >= -1e-13 && p.re <= 1.0 + 1e-13);
        }
    }

    #[test]
    fn formula_for_offaxis_point_is_a_spiral() {
        // range {1+i}: the curve exp(2 pi i (1+i) t) spirals from 1 to 0 with
        // modulus exp(-2 pi t) and argument 2 pi t.
        let set = essential_spectrum_formula(&cloud(vec![c(1.0, 1.0)]), 5.0, 2000).unwrap();
        for (z, curve) in &set.parametric {
            assert_eq!(*z, c(1.0, 1.0));
            for (k, lambda) in curve.iter().enumerate() {
                if lambda.norm() < 1e-12 {
                    continue;
                }
                let t = -lambda.norm().ln() / TWO_PI;
                let want = (I * TWO_PI * c(1.0, 1.0) * t).exp();
                assert!(
                    (lambda - want).norm() < 1e-10,
                    "curve point {k} off spiral"
                );
            }
        }
    }

    #[test]
    fn formula_points_stay_in_the_unit_disk() {
        let range = cloud(vec![c(0.5, 1.5), c(-0.3, 2.0), c(0.0, 1.0)]);
        let set = essential_spectrum_formula(&range, 6.0, 800).unwrap();
        for p in &set.points {
            assert!(p.norm() <= 1.0 + 1e-13);
        }
    }

    #[test]
    fn formula_rejects_bad_ranges() {
        assert!(matches!(
            essential_spectrum_formula(&cloud(vec![c(1.0, -0.2)]), 5.0, 100),
            Err(Error::RangePointNotInUpperHalfPlane { .. })
        ));
        assert!(matches!(
            essential_spectrum_formula(&cloud(vec![c(0.0, 1.0)]), 0.5, 100),
            Err(Error::SpectrumGridTooShort { .. })
        ));
    }

    #[test]
    fn finite_sections_of_diagonal_operators_are_exact() {
        let grid = Arc::new(HalfPlaneGrid::uniform(0.0, 0.01, 120).unwrap());
        let op = multiplier_op(|t| c((-TWO_PI * t).exp(), 0.0), grid.clone()).unwrap();
        let eigs = op.finite_section_eigs().unwrap();
        let mut got: Vec<f64> = eigs.iter().map(|z| z.re).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut want: Vec<f64> = grid.nodes().iter().map(|&t| (-TWO_PI * t).exp()).collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert_relative_eq!(g, w, max_relative = 1e-13);
        }

        // Disk side: composition with sz has eigenvalues s^n.
        let s = c(0.3, 0.4);
        let phi = Poly::new(vec![c(0.0, 0.0), s], 16);
        let op = composition_disk(&phi, 0.0, 16).unwrap();
        let eigs = op.finite_section_eigs().unwrap();
        for n in 0..=16usize {
            let target = s.powu(n as u32);
            assert!(
                eigs.iter().any(|e| (e - target).norm() < 1e-10),
                "missing eigenvalue s^{n}"
            );
        }
    }

    #[test]
    fn residual_small_on_diagonal_constant_symbol() {
        // Constant symbol: the assembled operator is exactly diagonal, so the
        // residual at lambda = exp(2 pi i z t0) is pure bump discretization.
        let psi = ExpPolySymbol::constant(c(0.0, 2.0)).unwrap();
        let plan = plan_series(&psi, 1.0, 0.0, 1e-8).unwrap();
        let grid = grid_for_symbol(&psi, 0.0, 400, 2.2).unwrap();
        let op = assemble_series(&plan, &psi, grid.clone()).unwrap();
        let dt = grid.spacing().unwrap();
        let res = residual_check(&op, c(0.0, 2.0), 1.0, 10.0 * dt).unwrap();
        assert!(res < 1e-3, "diagonal residual {res}");
    }

    #[test]
    fn residual_large_for_lambda_off_spectrum() {
        // lambda = 3 against a contraction: reverse triangle inequality keeps
        // the residual above 1.
        let psi = ExpPolySymbol::constant(c(0.0, 2.0)).unwrap();
        let plan = plan_series(&psi, 1.0, 0.0, 1e-8).unwrap();
        let grid = grid_for_symbol(&psi, 0.0, 400, 2.2).unwrap();
        let op = assemble_series(&plan, &psi, grid.clone()).unwrap();
        // z chosen so exp(2 pi i z t0) = 3 at t0 = 1: z = -i ln 3 / (2 pi)
        let z = c(0.0, -(3f64.ln()) / TWO_PI);
        let dt = grid.spacing().unwrap();
        let res = residual_check(&op, z, 1.0, 10.0 * dt).unwrap();
        assert!(res >= 1.0, "off-spectrum residual {res}");
    }

    #[test]
    fn residual_width_tradeoff_is_monotone() {
        // In the weighted metric the t^-(alpha+1) factor amplifies the
        // small-t side of the bump, so widening the probe always picks up
        // more of the operator's large-entry region: residuals grow
        // monotonically with width down to the three-step resolution floor.
        // (Measured across phase-aligned and anti-aligned range points; the
        // oscillation-averaging gain of wide probes never wins here.)
        let psi = ExpPolySymbol::new(c(0.0, 2.0), vec![(c(0.5, 0.0), 1.0)]).unwrap();
        let plan = plan_series(&psi, 1.0, 0.0, 1e-6).unwrap();
        let grid = grid_for_symbol(&psi, 0.0, 800, 3.0).unwrap();
        let op = assemble_series(&plan, &psi, grid.clone()).unwrap();
        for z in [c(0.5, 2.0), c(-0.5, 2.0)] {
            let r1 = residual_check(&op, z, 0.5, 0.02).unwrap();
            let r2 = residual_check(&op, z, 0.5, 0.05).unwrap();
            let r3 = residual_check(&op, z, 0.5, 0.1).unwrap();
            assert!(r1 < r2 && r2 < r3, "widths not monotone: {r1} {r2} {r3}");
            // And the sharpest admissible probe certifies the point well.
            assert!(r1 < 0.05, "sharp-probe residual {r1}");
        }
    }

    #[test]
    fn residual_rejects_out_of_range_bumps() {
        let psi = ExpPolySymbol::constant(c(0.0, 2.0)).unwrap();
        let plan = plan_series(&psi, 1.0, 0.0, 1e-8).unwrap();
        let grid = grid_for_symbol(&psi, 0.0, 200, 2.2).unwrap();
        let op = assemble_series(&plan, &psi, grid.clone()).unwrap();
        // Support sticking out on the left...
        assert!(matches!(
            residual_check(&op, c(0.0, 2.0), 0.05, 0.1),
            Err(crate::error::Error::BumpExceedsGrid { .. })
        ));
        // ... or past the far end.
        assert!(matches!(
            residual_check(&op, c(0.0, 2.0), grid.t_max(), 0.1),
            Err(crate::error::Error::BumpExceedsGrid { .. })
        ));
        // Width floor: three grid steps.
        let dt = grid.spacing().unwrap();
        assert!(residual_check(&op, c(0.0, 2.0), 1.0, 2.0 * dt).is_err());
    }

    #[test]
    fn commutator_vanishes_for_constant_symbols() {
        let psi = ExpPolySymbol::constant(c(0.0, 2.0)).unwrap();
        let plan = plan_series(&psi, 1.0, 0.0, 1e-8).unwrap();
        let grid = grid_for_symbol(&psi, 0.0, 300, 2.2).unwrap();
        let op = assemble_series(&plan, &psi, grid).unwrap();
        let profile = essential_normality_diag(&op).unwrap();
        assert_eq!(profile.ratio, 0.0);
        assert!(profile.column_norms.iter().all(|&v| v < 1e-16));
    }

    #[test]
    fn shift_control_has_flat_commutator_profile() {
        // Unilateral shift on a flat-metric grid: the self-commutator is a
        // pair of unit corner entries, so head and tail maxima agree.
        let n = 300usize;
        let nodes: Vec<f64> = (1..=n).map(|j| j as f64).collect();
        let weights: Vec<f64> = nodes.to_vec(); // w t^-1 = 1
        let grid = Arc::new(HalfPlaneGrid::from_parts(0.0, nodes, weights).unwrap());
        let mut m = ComplexMatrix::zeros(n, n);
        for j in 1..n {
            m[(j, j - 1)] = c(1.0, 0.0);
        }
        let op = FourierOperator::new(grid, m).unwrap();
        let profile = essential_normality_diag(&op).unwrap();
        assert!(profile.ratio >= 0.5 && profile.ratio <= 2.0, "ratio {}", profile.ratio);
        assert_relative_eq!(profile.head_max, 1.0, max_relative = 1e-12);
        assert_relative_eq!(profile.tail_max, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn quasi_parabolic_commutator_decays() {
        let psi = ExpPolySymbol::new(c(0.0, 2.0), vec![(c(0.5, 0.0), 1.0)]).unwrap();
        let plan = plan_series(&psi, 1.0, 0.0, 1e-6).unwrap();
        let grid = grid_for_symbol(&psi, 0.0, 400, 2.2).unwrap();
        let op = assemble_series(&plan, &psi, grid).unwrap();
        let profile = essential_normality_diag(&op).unwrap();
        assert!(
            profile.ratio >= 10.0,
            "expected decaying commutator, ratio {}",
            profile.ratio
        );
    }

    #[test]
    fn vmo_profile_examples() {
        // Constants have zero oscillation.
        let flat = vmo_profile(|_| c(3.0, -1.0), &[0.5, 0.9, 0.99], 8).unwrap();
        assert!(flat.values.iter().all(|&v| v < 1e-14));

        // f(z) = z is Lipschitz: the profile decays like the box diameter
        // and is below 0.01 at r = 0.999.
        let idp = vmo_profile(|z| z, &[0.9, 0.99, 0.999], 16).unwrap();
        assert!(idp.values[2] < 0.01, "identity profile {:?}", idp.values);
        assert!(idp.values[0] > idp.values[2]);

        // Radially oscillating unit-modulus function stays bounded away
        // from zero oscillation near the boundary.
        let osc = vmo_profile(
            |z| (I / (1.0 - z.norm())).exp(),
            &[0.99, 0.999, 0.9999],
            8,
        )
        .unwrap();
        assert!(
            osc.values.iter().all(|&v| v >= 0.1),
            "oscillatory profile {:?}",
            osc.values
        );
    }

    #[test]
    fn vmo_profile_of_polynomials_decays_linearly() {
        // Log-log slope of the profile of a polynomial in z and conj(z)
        // should sit near 1 (box diameter scaling).
        let f = |z: Complex64| z * z + z.conj() * c(0.3, 0.1);
        let rs = [0.9, 0.99, 0.999, 0.9999];
        let prof = vmo_profile(f, &rs, 12).unwrap();
        let xs: Vec<f64> = rs.iter().map(|&r| (1.0 - r).ln()).collect();
        let ys: Vec<f64> = prof.values.iter().map(|&v| v.ln()).collect();
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!(
            (0.7..=1.3).contains(&slope),
            "log-log slope {slope}, profile {:?}",
            prof.values
        );
    }

    #[test]
    fn hausdorff_examples() {
        let a = vec![c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(
            hausdorff_distance(&[c(0.0, 0.0)], &[c(1.0, 0.0)]).unwrap(),
            1.0
        );
        // Grid vs half-step-shifted grid on a segment: distance h/2.
        let h = 0.01;
        let grid1: Vec<Complex64> = (0..=100).map(|k| c(k as f64 * h, 0.0)).collect();
        let grid2: Vec<Complex64> = (0..100).map(|k| c(k as f64 * h + h / 2.0, 0.0)).collect();
        assert_relative_eq!(
            hausdorff_distance(&grid1, &grid2).unwrap(),
            h / 2.0,
            max_relative = 1e-12
        );
        assert!(hausdorff_distance(&[], &a).is_err());
    }
}
