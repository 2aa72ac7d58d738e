//! Self-contained dense complex linear algebra, quadrature, and truncated
//! polynomial arithmetic.
//!
//! Everything here is pure and deterministic: matrices are immutable after
//! construction, the power iteration uses a fixed seed, and no operation
//! keeps internal state. All complex powers `w^s` take the principal branch
//! with argument in (-pi, pi]; every base the higher modules feed in has
//! nonzero imaginary part, so the branch is continuous where it is used.

pub mod eig;
pub mod gamma;
pub mod matrix;
pub mod poly;
pub mod quad;

pub use eig::{eigenvalues, operator_norm, DENSE_DIM_CAP};
pub use matrix::ComplexMatrix;
pub use poly::{poly_compose, Poly};
pub use quad::{disk_quadrature, gauss_jacobi, gauss_legendre, gauss_legendre_on, interval_rule, DomainTag, QuadratureRule};

#[cfg(test)]
mod property_tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn small_complex() -> impl Strategy<Value = Complex64> {
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
    }

    fn small_poly(max_len: usize, cap: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec(small_complex(), 1..max_len).prop_map(move |c| Poly::new(c, cap))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Composition is associative when the exact degrees fit under the cap.
        #[test]
        fn compose_associative(p in small_poly(4, 32), q in small_poly(4, 32), r in small_poly(4, 32)) {
            let n = 32; // (3*3*3 = 27) <= 32, so truncation never bites
            let left = poly_compose(&poly_compose(&p, &q, n), &r, n);
            let right = poly_compose(&p, &poly_compose(&q, &r, n), n);
            for k in 0..=n {
                prop_assert!((left.coeff(k) - right.coeff(k)).norm() < 1e-9);
            }
        }

        /// Weighted operator norm of a diagonal matrix is its largest modulus,
        /// whatever the weights (diagonals are normal in diagonal metrics).
        #[test]
        fn diagonal_norm_is_max_modulus(
            entries in prop::collection::vec(small_complex(), 1..6),
            wseed in prop::collection::vec(0.1f64..4.0, 6),
        ) {
            let m = ComplexMatrix::diagonal(&entries);
            let w = &wseed[..entries.len()];
            let want = entries.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
            let got = operator_norm(&m, w).unwrap();
            prop_assert!((got - want).abs() <= 1e-8 * want.max(1.0));
        }
    }
}
