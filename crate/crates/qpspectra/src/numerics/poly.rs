//! Truncated complex polynomial arithmetic.
//!
//! Coefficient index equals degree. Products and compositions are exact on
//! the retained coefficients: coefficients of degree at most n of p(q(z))
//! depend only on coefficients of degree at most n of p and q, so Horner
//! evaluation with degree-capped products reproduces the exact composition
//! up to the cap.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Polynomial with a degree cap.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
    max_degree: usize,
}

impl Poly {
    /// Builds a polynomial, truncating anything above `max_degree`.
    pub fn new(mut coeffs: Vec<Complex64>, max_degree: usize) -> Self {
        coeffs.truncate(max_degree + 1);
        Self { coeffs, max_degree }
    }

    /// The zero polynomial.
    pub fn zero(max_degree: usize) -> Self {
        Self {
            coeffs: vec![],
            max_degree,
        }
    }

    /// A constant.
    pub fn constant(c: Complex64, max_degree: usize) -> Self {
        Self::new(vec![c], max_degree)
    }

    /// The monomial z.
    pub fn identity(max_degree: usize) -> Self {
        Self::new(vec![ZERO, Complex64::new(1.0, 0.0)], max_degree)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of z^k (zero beyond the stored length).
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Degree of the stored coefficients, ignoring trailing zeros.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.norm_sqr() != 0.0)
            .unwrap_or(0)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Sum, truncated to `cap`.
    pub fn add_trunc(&self, rhs: &Poly, cap: usize) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len()).min(cap + 1);
        let coeffs = (0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        Poly::new(coeffs, cap)
    }

    /// Product, truncated to degree `cap`.
    pub fn mul_trunc(&self, rhs: &Poly, cap: usize) -> Poly {
        let mut out = vec![ZERO; (self.coeffs.len() + rhs.coeffs.len()).saturating_sub(1).min(cap + 1)];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.norm_sqr() == 0.0 || i > cap {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                if i + j > cap {
                    break;
                }
                out[i + j] += a * b;
            }
        }
        Poly::new(out, cap)
    }

    /// Scalar multiple.
    pub fn scale(&self, s: Complex64) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
            max_degree: self.max_degree,
        }
    }
}

/// Coefficients of p(q(z)) truncated to degree n (exact composition before
/// truncation).
pub fn poly_compose(p: &Poly, q: &Poly, n: usize) -> Poly {
    let mut acc = Poly::zero(n);
    for &c in p.coeffs.iter().rev() {
        acc = acc.mul_trunc(q, n);
        if c.norm_sqr() != 0.0 {
            acc = acc.add_trunc(&Poly::constant(c, n), n);
        }
    }
    acc
}
