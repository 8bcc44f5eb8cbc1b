//! Laurent polynomials in `u = e^λ` with complex coefficients.
//!
//! Every spectral-parameter dependence in the model (`e^{±λ}`, `sinh(λ + c)`,
//! `cosh(λ + c)`, `sinh 2λ`, ...) is a finite Laurent polynomial in `u`, so
//! λ-derivatives, λ → ±∞ asymptotics and pointwise evaluation are exact
//! coefficient operations.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients smaller than this fraction of the largest one are dropped.
pub const PRUNE_RELATIVE: f64 = 1e-14;

/// Which end of the support to read asymptotics from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// λ → +∞, highest degree.
    PlusInfinity,
    /// λ → −∞, lowest degree.
    MinusInfinity,
}

/// Finite-support Laurent polynomial `Σ c_n u^n` with `u = e^λ`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i32, Complex64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(degree: i32, c: Complex64) -> Self {
        Self::from_terms([(degree, c)])
    }

    /// Builds a polynomial from `(degree, coefficient)` pairs; repeated
    /// degrees are summed.
    pub fn from_terms(terms: impl IntoIterator<Item = (i32, Complex64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (n, c) in terms {
            *coeffs.entry(n).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        let mut p = Self { coeffs };
        p.prune();
        p
    }

    /// `e^{kλ + c}`.
    pub fn exp_affine(k: i32, c: Complex64) -> Self {
        Self::monomial(k, c.exp())
    }

    /// `sinh(kλ + c) = (e^c u^k − e^{−c} u^{−k}) / 2`.
    pub fn sinh_affine(k: i32, c: Complex64) -> Self {
        Self::from_terms([(k, c.exp() * 0.5), (-k, -(-c).exp() * 0.5)])
    }

    /// `cosh(kλ + c) = (e^c u^k + e^{−c} u^{−k}) / 2`.
    pub fn cosh_affine(k: i32, c: Complex64) -> Self {
        Self::from_terms([(k, c.exp() * 0.5), (-k, (-c).exp() * 0.5)])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, degree: i32) -> Complex64 {
        self.coeffs.get(&degree).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    /// Lowest and highest degree carrying a non-zero coefficient.
    pub fn degree_range(&self) -> Option<(i32, i32)> {
        let lo = *self.coeffs.keys().next()?;
        let hi = *self.coeffs.keys().next_back()?;
        Some((lo, hi))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ c_n e^{nλ}`.
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&n, &c)| c * (lambda * f64::from(n)).exp())
            .sum()
    }

    /// Exact term-wise `d/dλ`: `c_n ↦ n c_n`.
    pub fn d_lambda(&self) -> Self {
        Self::from_terms(self.terms().map(|(n, c)| (n, c * f64::from(n))))
    }

    /// Leading degree and coefficient in the given direction.
    pub fn leading(&self, direction: Direction) -> Result<(i32, Complex64)> {
        let entry = match direction {
            Direction::PlusInfinity => self.coeffs.iter().next_back(),
            Direction::MinusInfinity => self.coeffs.iter().next(),
        };
        entry.map(|(&n, &c)| (n, c)).ok_or(Error::ZeroPolynomial)
    }

    /// `p(λ + s)`.
    pub fn shift(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms().map(|(n, c)| (n, c * (s * f64::from(n)).exp())))
    }

    /// `p(−λ)`.
    pub fn reflect(&self) -> Self {
        Self::from_terms(self.terms().map(|(n, c)| (-n, c)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms().map(|(n, c)| (n, c * s)))
    }

    /// Largest coefficient-wise absolute difference.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let mut degrees: Vec<i32> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        degrees.sort_unstable();
        degrees.dedup();
        degrees
            .into_iter()
            .map(|n| (self.coeff(n) - other.coeff(n)).norm())
            .fold(0.0, f64::max)
    }

    fn prune(&mut self) {
        let max = self.max_abs_coeff();
        let cut = max * PRUNE_RELATIVE;
        self.coeffs
            .retain(|_, c| c.norm() > cut && *c != Complex64::new(0.0, 0.0));
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .rev()
            .map(|(n, c)| format!("({:.6}{:+.6}i)u^{}", c.re, c.im, n))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms().chain(rhs.terms()))
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        *self = &*self + rhs;
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms().map(|(n, c)| (n, -c)))
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms().chain(rhs.terms().map(|(n, c)| (n, -c))))
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.terms()
                .flat_map(|(n, a)| rhs.terms().map(move |(k, b)| (n + k, a * b))),
        )
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl Mul<Complex64> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: Complex64) -> LaurentPoly {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn u() -> LaurentPoly {
        LaurentPoly::monomial(1, c(1.0, 0.0))
    }

    fn u_inv() -> LaurentPoly {
        LaurentPoly::monomial(-1, c(1.0, 0.0))
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&u() + &u_inv()) * &(&u() - &u_inv());
        let expected = LaurentPoly::from_terms([(2, c(1.0, 0.0)), (-2, c(-1.0, 0.0))]);
        assert_eq!(p, expected);
    }

    #[test]
    fn one_is_identity() {
        let p = LaurentPoly::from_terms([(3, c(1.0, 2.0)), (-1, c(0.5, 0.0))]);
        assert_eq!(&p * &LaurentPoly::one(), p);
    }

    #[test]
    fn sinh_times_two_cosh_is_sinh_double() {
        // Hand expansion at a = 0.3:
        // (u e^a − u⁻¹ e^{−a})/2 · (u e^a + u⁻¹ e^{−a}) = (u² e^{2a} − u⁻² e^{−2a})/2.
        let a = c(0.3, 0.0);
        let lhs = &LaurentPoly::sinh_affine(1, a) * &LaurentPoly::cosh_affine(1, a).scale(c(2.0, 0.0));
        let e2a = (2.0f64 * 0.3).exp();
        let expected = LaurentPoly::from_terms([(2, c(e2a / 2.0, 0.0)), (-2, c(-1.0 / (2.0 * e2a), 0.0))]);
        assert!(lhs.max_coeff_diff(&expected) < 1e-15);
        assert!(lhs.max_coeff_diff(&LaurentPoly::sinh_affine(2, a * 2.0)) < 1e-15);
    }

    #[test]
    fn eval_of_u_minus_u_inverse_is_two_sinh() {
        let p = &u() - &u_inv();
        let lam = c(0.7, -0.2);
        assert!((p.eval(lam) - lam.sinh() * 2.0).norm() < 1e-14);
        assert_eq!(LaurentPoly::zero().eval(lam), c(0.0, 0.0));
    }

    #[test]
    fn derivative_rules() {
        let u2 = LaurentPoly::monomial(2, c(1.0, 0.0));
        assert_eq!(u2.d_lambda(), LaurentPoly::monomial(2, c(2.0, 0.0)));
        assert!(LaurentPoly::constant(c(4.0, 1.0)).d_lambda().is_zero());
    }

    #[test]
    fn derivative_of_sinh_double_at_zero_matches_finite_difference() {
        let p = LaurentPoly::sinh_affine(2, c(0.0, 0.0));
        let exact = p.d_lambda().eval(c(0.0, 0.0));
        let h = 1e-6;
        let fd = (p.eval(c(h, 0.0)) - p.eval(c(-h, 0.0))) / (2.0 * h);
        assert!((exact - c(2.0, 0.0)).norm() < 1e-14);
        assert!((exact - fd).norm() < 1e-8);
    }

    #[test]
    fn leading_terms() {
        let p = LaurentPoly::from_terms([(2, c(1.0, 0.0)), (-1, c(3.0, 0.0))]);
        assert_eq!(p.leading(Direction::PlusInfinity).unwrap(), (2, c(1.0, 0.0)));
        assert_eq!(p.leading(Direction::MinusInfinity).unwrap(), (-1, c(3.0, 0.0)));
        assert!(matches!(
            LaurentPoly::zero().leading(Direction::PlusInfinity),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn cancellation_leaves_zero() {
        let p = LaurentPoly::sinh_affine(1, c(0.1, 0.2));
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn shift_and_reflect_agree_with_evaluation() {
        let p = LaurentPoly::from_terms([(2, c(1.0, -1.0)), (0, c(0.3, 0.0)), (-1, c(0.0, 2.0))]);
        let lam = c(0.4, 0.3);
        let s = c(-0.2, 0.5);
        assert!((p.shift(s).eval(lam) - p.eval(lam + s)).norm() < 1e-13);
        assert!((p.reflect().eval(lam) - p.eval(-lam)).norm() < 1e-13);
    }
}
