//! Translation symbols, the contraction parameter selection, and local
//! essential ranges at the boundary point at infinity (half-plane) and at 1
//! (disk).
//!
//! A symbol is an exponential polynomial
//! `psi(z) = c0 + sum_k c_k exp(i gamma_k z)` with positive frequencies.
//! Each term is bounded on the closed upper half-plane, and
//! `Im c0 - sum |c_k| > 0` certifies that `Im psi` stays above a positive
//! constant, which is the standing hypothesis for everything downstream.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Exponential-polynomial translation symbol with certified positive
/// imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPolySymbol {
    c0: Complex64,
    terms: Vec<(Complex64, f64)>,
}

impl ExpPolySymbol {
    /// Validates frequencies and the imaginary-part certificate
    /// `Im c0 - sum |c_k| > 0`.
    pub fn new(c0: Complex64, terms: Vec<(Complex64, f64)>) -> Result<Self> {
        for &(_, gamma) in &terms {
            if !(gamma > 0.0) {
                return Err(Error::InvalidFrequency { gamma });
            }
        }
        let eps = c0.im - terms.iter().map(|(c, _)| c.norm()).sum::<f64>();
        if !(eps > 0.0) {
            return Err(Error::InvalidSymbol { epsilon: eps });
        }
        Ok(Self { c0, terms })
    }

    /// Constant symbol.
    pub fn constant(c0: Complex64) -> Result<Self> {
        Self::new(c0, vec![])
    }

    pub fn c0(&self) -> Complex64 {
        self.c0
    }

    pub fn terms(&self) -> &[(Complex64, f64)] {
        &self.terms
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value `c0 + sum c_k exp(i gamma_k z)`; defined on the closed upper
    /// half-plane.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = self.c0;
        for &(c, gamma) in &self.terms {
            acc += c * (I * gamma * z).exp();
        }
        acc
    }

    /// Boundary value at a real point.
    pub fn boundary_value(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0))
    }

    /// The certified lower bound `Im c0 - sum |c_k|` for `Im psi` on the
    /// upper half-plane. Positive by construction.
    pub fn im_lower_bound(&self) -> f64 {
        self.c0.im - self.terms.iter().map(|(c, _)| c.norm()).sum::<f64>()
    }

    /// Disk enclosure of the image: center c0, radius `sum |c_k|`.
    pub fn image_enclosure(&self) -> Enclosure {
        Enclosure {
            center: self.c0,
            radius: self.terms.iter().map(|(c, _)| c.norm()).sum(),
        }
    }
}

/// Closed disk `|z - center| <= radius` compactly contained in the upper
/// half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enclosure {
    pub center: Complex64,
    pub radius: f64,
}

impl Enclosure {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !(center.im > radius) {
            return Err(Error::InfeasibleEnclosure {
                im_center: center.im,
                radius: radius.max(0.0),
            });
        }
        Ok(Self { center, radius })
    }
}

/// Result of the contraction-parameter search.
#[derive(Debug, Clone, Copy)]
pub struct BetaSelection {
    pub beta: f64,
    /// Minimized value of `(|i beta - center| + radius) / beta`, always < 1.
    pub delta: f64,
    /// `delta` enlarged by the caller's safety margin:
    /// `delta + margin (1 - delta)`.
    pub delta_used: f64,
}

fn delta_of(k: &Enclosure, beta: f64) -> f64 {
    ((I * beta - k.center).norm() + k.radius) / beta
}

/// Picks `beta > 0` minimizing `(|i beta - center| + radius)/beta` over the
/// feasible ray where that quantity is below 1. For a center on the
/// imaginary axis the minimum is `beta = Im center` with value
/// `radius / Im center`; otherwise a bracketed golden-section search is run.
///
/// `margin` in [0, 1) enlarges the reported `delta_used` toward 1, leaving
/// room for quadrature error when the value feeds a certified bound.
pub fn select_beta(k: &Enclosure, margin: f64) -> Result<BetaSelection> {
    let (a, b, r) = (k.center.re, k.center.im, k.radius);
    if !(b > r) {
        return Err(Error::InfeasibleEnclosure {
            im_center: b,
            radius: r,
        });
    }
    if !(0.0..1.0).contains(&margin) {
        return Err(Error::Domain(format!("margin {margin} outside [0, 1)")));
    }
    let beta = if a == 0.0 {
        b
    } else {
        // Feasibility threshold for delta < 1.
        let beta_min = (a * a + b * b - r * r) / (2.0 * (b - r));
        let lo = beta_min.max(1e-12);
        let hi = 1e4 * (k.center.norm() + r + 1.0);
        // Coarse log-scan to bracket the minimum, then golden section.
        let mut best = (f64::INFINITY, lo);
        let scans = 400;
        for i in 0..=scans {
            let beta = lo * (hi / lo).powf(i as f64 / scans as f64);
            let d = delta_of(k, beta);
            if d < best.0 {
                best = (d, beta);
            }
        }
        let (mut x1, mut x4) = (best.1 / 1.5, best.1 * 1.5);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let x2 = x4 - phi * (x4 - x1);
            let x3 = x1 + phi * (x4 - x1);
            if delta_of(k, x2) <= delta_of(k, x3) {
                x4 = x3;
            } else {
                x1 = x2;
            }
            if (x4 - x1) <= 1e-13 * x4 {
                break;
            }
        }
        0.5 * (x1 + x4)
    };
    let delta = delta_of(k, beta);
    if !(delta < 1.0) {
        return Err(Error::InfeasibleEnclosure {
            im_center: b,
            radius: r,
        });
    }
    Ok(BetaSelection {
        beta,
        delta,
        delta_used: delta + margin * (1.0 - delta),
    })
}

/// Boundary samples of a half-plane symbol on [-X, X], with density growing
/// toward infinity so that every window (n, infinity) keeps at least a
/// thousand samples per side.
#[derive(Debug, Clone)]
pub struct SampledBoundarySymbol {
    xs: Vec<f64>,
    values: Vec<Complex64>,
    x_max: f64,
}

/// Minimum admitted sample count.
pub const MIN_BOUNDARY_SAMPLES: usize = 10_000;

impl SampledBoundarySymbol {
    /// Samples `f` on dyadic blocks `[X/2^(k+1), X/2^k]` of both signs plus
    /// a central block, `per_block` uniform samples per block per sign.
    pub fn from_fn(f: impl Fn(f64) -> Complex64, x_max: f64, per_block: usize) -> Result<Self> {
        if !(x_max > 2.0) {
            return Err(Error::Domain("boundary sampler needs x_max > 2".into()));
        }
        let per_block = per_block.max(1250);
        let mut xs = Vec::new();
        // Central block [-1, 1].
        let mut hi = x_max;
        while hi > 1.0 {
            let lo = (hi / 2.0).max(1.0);
            for s in 0..per_block {
                let frac = (s as f64 + 0.5) / per_block as f64;
                let x = lo + frac * (hi - lo);
                xs.push(x);
                xs.push(-x);
            }
            hi = lo;
        }
        for s in 0..per_block {
            xs.push(-1.0 + 2.0 * (s as f64 + 0.5) / per_block as f64);
        }
        xs.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
        let values = xs.iter().map(|&x| f(x)).collect();
        Self::from_samples(xs, values)
    }

    /// Wraps existing samples. Requires at least
    /// [`MIN_BOUNDARY_SAMPLES`] of them with bounded values.
    pub fn from_samples(xs: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                got: values.len(),
            });
        }
        if xs.len() < MIN_BOUNDARY_SAMPLES {
            return Err(Error::Domain(format!(
                "boundary symbol needs at least {MIN_BOUNDARY_SAMPLES} samples, got {}",
                xs.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("boundary values must be bounded".into()));
        }
        let x_max = xs.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        Ok(Self { xs, values, x_max })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }
}

/// Boundary samples of a disk symbol parameterized by arc position
/// `phi in (0, 2 pi)` of the point `exp(i phi)`; the boundary point 1
/// corresponds to the ends of the interval.
#[derive(Debug, Clone)]
pub struct BoundaryArcSamples {
    phis: Vec<f64>,
    values: Vec<Complex64>,
}

impl BoundaryArcSamples {
    /// Samples `f(phi)` at the arc positions corresponding to the standard
    /// half-plane boundary profile through `x = -cot(phi/2)`.
    pub fn from_fn(f: impl Fn(f64) -> Complex64, x_equiv: f64, per_block: usize) -> Result<Self> {
        if !(x_equiv > 2.0) {
            return Err(Error::Domain("arc sampler needs x_equiv > 2".into()));
        }
        let per_block = per_block.max(1250);
        let mut phis = Vec::new();
        let mut hi = x_equiv;
        while hi > 1.0 {
            let lo = (hi / 2.0).max(1.0);
            for s in 0..per_block {
                let frac = (s as f64 + 0.5) / per_block as f64;
                let x = lo + frac * (hi - lo);
                phis.push(arc_from_boundary_coordinate(x));
                phis.push(arc_from_boundary_coordinate(-x));
            }
            hi = lo;
        }
        for s in 0..per_block {
            let x = -1.0 + 2.0 * (s as f64 + 0.5) / per_block as f64;
            phis.push(arc_from_boundary_coordinate(x));
        }
        phis.sort_by(|a, b| a.partial_cmp(b).expect("finite arcs"));
        let values = phis.iter().map(|&p| f(p)).collect();
        Ok(Self { phis, values })
    }

    pub fn from_samples(phis: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if phis.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: phis.len(),
                got: values.len(),
            });
        }
        if phis.iter().any(|&p| !(p > 0.0 && p < 2.0 * std::f64::consts::PI)) {
            return Err(Error::Domain(
                "arc positions must lie strictly inside (0, 2 pi)".into(),
            ));
        }
        Ok(Self { phis, values })
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Boundary coordinate of the Cayley transform: the arc point `exp(i phi)`
/// corresponds to the real number `x = -cot(phi/2)`.
pub fn boundary_coordinate_from_arc(phi: f64) -> f64 {
    -(0.5 * phi).cos() / (0.5 * phi).sin()
}

/// Inverse of [`boundary_coordinate_from_arc`], with values in (0, 2 pi).
pub fn arc_from_boundary_coordinate(x: f64) -> f64 {
    let phi = 2.0 * (-1.0 / x).atan();
    if x < 0.0 {
        phi
    } else {
        phi + 2.0 * std::f64::consts::PI
    }
}

/// Planar point cloud representing a local essential range, stored as
/// occupancy-cell centers at resolution `epsilon`.
#[derive(Debug, Clone)]
pub struct RangeCloud {
    pub points: Vec<Complex64>,
    pub epsilon: f64,
    /// Window depth that certified the cloud (infinite for closed forms).
    pub n_max: f64,
}

fn cell_of(z: Complex64, eps: f64) -> (i64, i64) {
    ((z.re / eps).floor() as i64, (z.im / eps).floor() as i64)
}

fn cell_center(c: (i64, i64), eps: f64) -> Complex64 {
    Complex64::new((c.0 as f64 + 0.5) * eps, (c.1 as f64 + 0.5) * eps)
}

/// Occupancy-grid estimate of the local essential range at infinity: a cell
/// of side `eps` survives iff for every `n` in the schedule some sample with
/// `|x| > n` lands within `eps` of the cell center. Surviving centers are
/// therefore within `eps` of attained values, and every persistent value has
/// its own cell center within `eps` of it.
pub fn essential_range_sampled(
    sym: &SampledBoundarySymbol,
    eps: f64,
    n_schedule: &[f64],
) -> Result<RangeCloud> {
    if !(eps > 0.0) {
        return Err(Error::Domain("occupancy resolution must be positive".into()));
    }
    if n_schedule.is_empty() {
        return Err(Error::Domain("window schedule must be nonempty".into()));
    }
    let n_max = n_schedule.iter().cloned().fold(0.0, f64::max);
    if !(n_max < sym.x_max()) {
        return Err(Error::Domain(format!(
            "window depth {n_max} reaches beyond the sampled extent {}",
            sym.x_max()
        )));
    }
    let mut survivors: Option<BTreeSet<(i64, i64)>> = None;
    for &n in n_schedule {
        let mut layer = BTreeSet::new();
        for (&x, &v) in sym.xs().iter().zip(sym.values()) {
            if x.abs() <= n {
                continue;
            }
            let (ci, cj) = cell_of(v, eps);
            for di in -1..=1 {
                for dj in -1..=1 {
                    let cand = (ci + di, cj + dj);
                    if (v - cell_center(cand, eps)).norm() <= eps {
                        layer.insert(cand);
                    }
                }
            }
        }
        survivors = Some(match survivors {
            None => layer,
            Some(s) => s.intersection(&layer).cloned().collect(),
        });
    }
    let cells = survivors.expect("schedule nonempty");
    if cells.is_empty() {
        return Err(Error::EmptyRange);
    }
    Ok(RangeCloud {
        points: cells.into_iter().map(|c| cell_center(c, eps)).collect(),
        epsilon: eps,
        n_max,
    })
}

/// Transports disk-boundary samples near the point 1 to the real line
/// through the Cayley parametrization and delegates to
/// [`essential_range_sampled`]: the local essential range at 1 equals the
/// local essential range at infinity of the composed symbol.
pub fn pullback_range_disk(
    arc: &BoundaryArcSamples,
    eps: f64,
    n_schedule: &[f64],
) -> Result<RangeCloud> {
    let xs: Vec<f64> = arc
        .phis()
        .iter()
        .map(|&p| boundary_coordinate_from_arc(p))
        .collect();
    let sym = SampledBoundarySymbol::from_samples(xs, arc.values().to_vec())?;
    essential_range_sampled(&sym, eps, n_schedule)
}

/// Largest denominator considered when testing frequency ratios for
/// rationality.
const RATIO_DENOMINATOR_CAP: u64 = 1_000_000;
const RATIO_TOLERANCE: f64 = 1e-9;

/// Continued-fraction rational detection: returns (p, q) with `q <= max_den`
/// when `x` is a genuine ratio of small integers.
///
/// The acceptance threshold scales with 1/q: every irrational has
/// convergents with error below 1/q^2, which beats any fixed absolute
/// tolerance long before the denominator cap, so a flat cutoff would declare
/// everything rational. Requiring `|x - p/q| <= tol x / q` admits exact
/// ratios (hit to rounding error) and rejects generic irrationals, whose
/// convergent error sits near 1/(c q^2) >> tol/q for q below the cap.
fn rational_approx(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    let mut a = x.floor();
    let (mut h0, mut k0, mut h1, mut k1) = (1i64, 0u64, a as i64, 1u64);
    let mut frac = x - a;
    for _ in 0..64 {
        if (x - h1 as f64 / k1 as f64).abs() <= tol * x.abs().max(1.0) / k1 as f64 {
            return Some((h1, k1));
        }
        if frac.abs() < 1e-300 {
            break;
        }
        let y = 1.0 / frac;
        a = y.floor();
        frac = y - a;
        let h2 = a as i64 * h1 + h0;
        let k2 = a as u64 * k1 + k0;
        if k2 > max_den {
            break;
        }
        h0 = h1;
        k0 = k1;
        h1 = h2;
        k1 = k2;
    }
    None
}

/// Frequency-ratio rational detection with the module's standard cap and
/// tolerance.
pub(crate) fn rational_ratio(x: f64) -> Option<(i64, u64)> {
    rational_approx(x, RATIO_DENOMINATOR_CAP, RATIO_TOLERANCE)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// One rationally-dependent frequency class: the joint orbit closure of its
/// terms is the closed curve `phi -> sum c_k exp(i n_k phi)`.
struct FrequencyClass {
    coeffs: Vec<(Complex64, u64)>,
}

/// Groups terms into rational-dependence classes (ratio test by continued
/// fractions with a denominator cap; above the cap frequencies are treated
/// as independent).
fn frequency_classes(terms: &[(Complex64, f64)]) -> Vec<FrequencyClass> {
    let mut classes: Vec<(f64, Vec<(Complex64, f64)>)> = Vec::new();
    for &(c, gamma) in terms {
        let mut placed = false;
        for (rep, members) in classes.iter_mut() {
            if rational_approx(gamma / *rep, RATIO_DENOMINATOR_CAP, RATIO_TOLERANCE).is_some() {
                members.push((c, gamma));
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push((gamma, vec![(c, gamma)]));
        }
    }
    classes
        .into_iter()
        .map(|(rep, members)| {
            // Common base frequency rep / lcm(q_k); member multiplier p_k lcm / q_k.
            let ratios: Vec<(i64, u64)> = members
                .iter()
                .map(|&(_, g)| {
                    rational_approx(g / rep, RATIO_DENOMINATOR_CAP, RATIO_TOLERANCE)
                        .expect("class membership established above")
                })
                .collect();
            let l = ratios.iter().fold(1u64, |acc, &(_, q)| lcm(acc, q));
            let coeffs = members
                .iter()
                .zip(&ratios)
                .map(|(&(c, _), &(p, q))| (c, p as u64 * (l / q)))
                .collect();
            FrequencyClass { coeffs }
        })
        .collect()
}

/// Closed-form local essential range at infinity of an exponential
/// polynomial: the constant alone gives a point; each rational-dependence
/// class of frequencies contributes its periodic orbit curve; independent
/// classes combine as a Minkowski sum (the joint phases fill the torus).
pub fn essential_range_exppoly(psi: &ExpPolySymbol, resolution: f64) -> Result<RangeCloud> {
    if !(resolution > 0.0) {
        return Err(Error::Domain("range resolution must be positive".into()));
    }
    let mut points = vec![psi.c0()];
    for class in frequency_classes(psi.terms()) {
        let speed: f64 = class
            .coeffs
            .iter()
            .map(|&(c, n)| c.norm() * n as f64)
            .sum();
        let samples = ((speed * 2.0 * std::f64::consts::PI / (0.25 * resolution)).ceil() as usize)
            .clamp(256, 400_000);
        let curve: Vec<Complex64> = (0..samples)
            .map(|s| {
                let phi = 2.0 * std::f64::consts::PI * s as f64 / samples as f64;
                class
                    .coeffs
                    .iter()
                    .map(|&(c, n)| c * (I * (n as f64) * phi).exp())
                    .sum()
            })
            .collect();
        // Minkowski sum with occupancy dedup keeps the point count bounded.
        let dedup_eps = 0.25 * resolution;
        let mut cells = BTreeSet::new();
        let mut next = Vec::new();
        for &p in &points {
            for &q in &curve {
                let z = p + q;
                if cells.insert(cell_of(z, dedup_eps)) {
                    next.push(z);
                }
            }
        }
        points = next;
    }
    Ok(RangeCloud {
        points,
        epsilon: resolution,
        n_max: f64::INFINITY,
    })
}

/// Serialization schema for symbols, shared with the command-line tool:
/// `c0` as `[re, im]`, terms as `{ "c": [re, im], "gamma": g }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub c0: [f64; 2],
    #[serde(default)]
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub c: [f64; 2],
    pub gamma: f64,
}

impl TryFrom<&SymbolSpec> for ExpPolySymbol {
    type Error = Error;

    fn try_from(spec: &SymbolSpec) -> Result<Self> {
        ExpPolySymbol::new(
            Complex64::new(spec.c0[0], spec.c0[1]),
            spec.terms
                .iter()
                .map(|t| (Complex64::new(t.c[0], t.c[1]), t.gamma))
                .collect(),
        )
    }
}

impl From<&ExpPolySymbol> for SymbolSpec {
    fn from(sym: &ExpPolySymbol) -> Self {
        SymbolSpec {
            c0: [sym.c0().re, sym.c0().im],
            terms: sym
                .terms()
                .iter()
                .map(|&(c, gamma)| TermSpec {
                    c: [c.re, c.im],
                    gamma,
                })
                .collect(),
        }
    }
}
