//! Operator-valued Laurent polynomials.
//!
//! A matrix whose entries are Laurent polynomials in `u = e^λ` is stored the
//! other way round, as a Laurent polynomial with matrix coefficients
//! `Σ_n u^n A_n`. This keeps products, evaluation and asymptotics as
//! coefficient-level operations on dense matrices.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::Gradation;
use crate::error::{Error, Result};
use crate::laurent::{Direction, LaurentPoly, PRUNE_RELATIVE};
use crate::tensor::{CMatrix, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentOp {
    dim: usize,
    terms: BTreeMap<i32, CMatrix>,
}

impl LaurentOp {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(m: CMatrix) -> Self {
        Self::from_terms(m.dim(), [(0, m)])
    }

    pub fn identity(dim: usize) -> Self {
        Self::constant(CMatrix::identity(dim))
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (i32, CMatrix)>) -> Self {
        let mut out = Self::zero(dim);
        for (n, m) in terms {
            assert_eq!(m.dim(), dim, "Laurent coefficient dimension");
            match out.terms.get_mut(&n) {
                Some(acc) => *acc += &m,
                None => {
                    out.terms.insert(n, m);
                }
            }
        }
        out.prune();
        out
    }

    /// Builds the operator from a square grid of scalar Laurent entries.
    pub fn from_entries(entries: &[Vec<LaurentPoly>]) -> Self {
        let dim = entries.len();
        let mut terms: BTreeMap<i32, CMatrix> = BTreeMap::new();
        for (r, row) in entries.iter().enumerate() {
            assert_eq!(row.len(), dim, "entry grid must be square");
            for (c, p) in row.iter().enumerate() {
                for (n, z) in p.terms() {
                    terms.entry(n).or_insert_with(|| CMatrix::zeros(dim))[(r, c)] += z;
                }
            }
        }
        Self::from_terms(dim, terms)
    }

    /// `p(λ) · m` for a scalar Laurent polynomial and a constant matrix.
    pub fn from_poly(p: &LaurentPoly, m: &CMatrix) -> Self {
        Self::from_terms(m.dim(), p.terms().map(|(n, z)| (n, m.scale(z))))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &CMatrix)> + '_ {
        self.terms.iter().map(|(&n, m)| (n, m))
    }

    pub fn coeff(&self, degree: i32) -> CMatrix {
        self.terms
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| CMatrix::zeros(self.dim))
    }

    pub fn degree_range(&self) -> Option<(i32, i32)> {
        Some((*self.terms.keys().next()?, *self.terms.keys().next_back()?))
    }

    /// Scalar Laurent polynomial sitting at entry `(r, c)`.
    pub fn entry(&self, r: usize, c: usize) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms.iter().map(|(&n, m)| (n, m[(r, c)])))
    }

    pub fn eval(&self, lambda: Complex64) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim);
        for (&n, m) in &self.terms {
            out += &m.scale((lambda * f64::from(n)).exp());
        }
        out
    }

    /// `Σₙ ‖cₙ‖ |e^{nλ}|`: the size of the terms summed by [`eval`](Self::eval),
    /// and so the scale of its rounding error.
    pub fn eval_magnitude(&self, lambda: Complex64) -> f64 {
        self.terms
            .iter()
            .map(|(&n, m)| m.frobenius_norm() * (lambda.re * f64::from(n)).exp())
            .sum()
    }

    /// Exact `d/dλ`.
    pub fn d_lambda(&self) -> Self {
        Self::from_terms(
            self.dim,
            self.terms
                .iter()
                .filter(|(&n, _)| n != 0)
                .map(|(&n, m)| (n, m.scale(Complex64::new(f64::from(n), 0.0)))),
        )
    }

    pub fn leading(&self, direction: Direction) -> Result<(i32, &CMatrix)> {
        let entry = match direction {
            Direction::PlusInfinity => self.terms.iter().next_back(),
            Direction::MinusInfinity => self.terms.iter().next(),
        };
        entry.map(|(&n, m)| (n, m)).ok_or(Error::ZeroPolynomial)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|(&n, m)| (n, m.scale(s))))
    }

    /// Multiplication by a scalar Laurent polynomial.
    pub fn scale_poly(&self, p: &LaurentPoly) -> Self {
        Self::from_terms(
            self.dim,
            self.terms
                .iter()
                .flat_map(|(&n, m)| p.terms().map(move |(k, z)| (n + k, m.scale(z)))),
        )
    }

    /// `p(λ + s)`.
    pub fn shift(&self, s: Complex64) -> Self {
        Self::from_terms(
            self.dim,
            self.terms.iter().map(|(&n, m)| (n, m.scale((s * f64::from(n)).exp()))),
        )
    }

    /// `p(−λ)`.
    pub fn reflect(&self) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|(&n, m)| (-n, m.clone())))
    }

    pub fn transpose(&self) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|(&n, m)| (n, m.transpose())))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self::from_terms(
            self.dim,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(&n, m)| (n, m.clone())),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Product of two operator polynomials (coefficient convolution).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self::from_terms(
            self.dim,
            self.terms
                .iter()
                .flat_map(|(&n, a)| other.terms.iter().map(move |(&k, b)| (n + k, a.matmul(b)))),
        )
    }

    /// Product with a constant matrix on the right.
    pub fn mul_const_right(&self, m: &CMatrix) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|(&n, a)| (n, a.matmul(m))))
    }

    /// Product with a constant matrix on the left.
    pub fn mul_const_left(&self, m: &CMatrix) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|(&n, a)| (n, m.matmul(a))))
    }

    /// `(local ⊗ I) · self` where `local` acts on the given qubit factors.
    pub fn apply_local_left(&self, local: &LaurentOp, factors: &[usize]) -> Self {
        Self::from_terms(
            self.dim,
            self.terms.iter().flat_map(|(&n, a)| {
                local
                    .terms
                    .iter()
                    .map(move |(&k, l)| (n + k, a.apply_local_left(l, factors)))
            }),
        )
    }

    /// `self · (local ⊗ I)`.
    pub fn apply_local_right(&self, local: &LaurentOp, factors: &[usize]) -> Self {
        Self::from_terms(
            self.dim,
            self.terms.iter().flat_map(|(&n, a)| {
                local
                    .terms
                    .iter()
                    .map(move |(&k, l)| (n + k, a.apply_local_right(l, factors)))
            }),
        )
    }

    /// Block `(br, bc)` of the 2×2 partition with the auxiliary space leading.
    pub fn block(&self, br: usize, bc: usize) -> Self {
        Self::from_terms(self.dim / 2, self.terms.iter().map(|(&n, m)| (n, m.block(br, bc))))
    }

    /// Coefficient-wise residual: `‖A − B‖ / max(1, ‖A‖, ‖B‖)` with the
    /// Frobenius norm summed over all degrees.
    pub fn coeff_residual(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let norm = |p: &Self| p.terms.values().map(|m| m.frobenius_norm().powi(2)).sum::<f64>().sqrt();
        let diff = norm(&self.sub(other));
        let scale = norm(self).max(norm(other));
        if scale == 0.0 {
            0.0
        } else {
            diff / scale
        }
    }

    /// Fails unless every stored degree lies in `[min, max]`.
    pub fn check_degrees(&self, object: &str, min: i32, max: i32) -> Result<()> {
        match self.terms.keys().find(|&&n| n < min || n > max) {
            Some(&degree) => Err(Error::DegreeBound {
                object: object.to_owned(),
                degree,
                min,
                max,
            }),
            None => Ok(()),
        }
    }

    fn prune(&mut self) {
        let norms: Vec<f64> = self.terms.values().map(CMatrix::frobenius_norm).collect();
        let max = norms.iter().copied().fold(0.0, f64::max);
        let cut = max * PRUNE_RELATIVE;
        self.terms.retain(|_, m| {
            let n = m.frobenius_norm();
            n > cut && m.data().iter().any(|&z| z != ZERO)
        });
    }
}

/// A 2×2 auxiliary-space matrix of chain operators with Laurent entries,
/// stored as one operator polynomial on `aux ⊗ chain`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    sites: usize,
    gradation: Gradation,
    op: LaurentOp,
}

impl OperatorMatrix {
    pub fn new(sites: usize, gradation: Gradation, op: LaurentOp) -> Result<Self> {
        let expected = 2usize << sites;
        if op.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: op.dim(),
            });
        }
        Ok(Self { sites, gradation, op })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn gradation(&self) -> Gradation {
        self.gradation
    }

    pub fn op(&self) -> &LaurentOp {
        &self.op
    }

    pub fn into_op(self) -> LaurentOp {
        self.op
    }

    /// Auxiliary entry `(i, j)` as a chain-operator polynomial.
    pub fn block(&self, i: usize, j: usize) -> LaurentOp {
        self.op.block(i, j)
    }

    pub fn eval(&self, lambda: Complex64) -> CMatrix {
        self.op.eval(lambda)
    }

    /// Product in the auxiliary and chain spaces.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.sites != other.sites {
            return Err(Error::DimensionMismatch {
                expected: self.sites,
                found: other.sites,
            });
        }
        Self::new(self.sites, self.gradation, self.op.mul(&other.op))
    }
}
