//! Dense complex matrices on tensor products of qubit factors.
//!
//! Tensor factors are numbered from the left of the Kronecker product: in a
//! chain of `N` sites, site `1` is the leftmost factor. Operators that also
//! carry auxiliary spaces put those in front, so on `aux ⊗ chain` the
//! auxiliary space is factor `0` and site `a` is factor `a`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

/// A matrix acting on `(ℂ²)^{⊗N}`; the dimension is always a power of two.
pub type ChainOperator = CMatrix;

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim.min(8) {
            let row: Vec<String> = (0..self.dim.min(8))
                .map(|c| {
                    let z = self[(r, c)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Row-major data; the length must be a perfect square.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<const D: usize>(rows: [[Complex64; D]; D]) -> Self {
        Self {
            dim: D,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Chain operator constructor that enforces a power-of-two dimension.
    pub fn chain(sites: usize, data: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << sites;
        Self::from_vec(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Number of qubit factors, if the dimension is a power of two.
    pub fn num_factors(&self) -> Option<usize> {
        self.dim.is_power_of_two().then(|| self.dim.trailing_zeros() as usize)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `self · other`, row-parallel.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        exec::for_each_row(&mut out.data, n, |r, row| {
            let lhs = &self.data[r * n..(r + 1) * n];
            for (k, &a) in lhs.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let rhs = &other.data[k * n..(k + 1) * n];
                for (o, &b) in row.iter_mut().zip(rhs) {
                    *o += a * b;
                }
            }
        });
        out
    }

    /// Serial reference product, used by benches and as a cross-check.
    pub fn matmul_serial(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// `q X Y − q⁻¹ Y X`.
    pub fn q_commutator(&self, other: &Self, qfac: Complex64) -> Result<Self> {
        if qfac == ZERO {
            return Err(Error::ZeroQFactor);
        }
        self.check_same_dim(other)?;
        Ok(&self.matmul(other).scale(qfac) - &other.matmul(self).scale(qfac.inv()))
    }

    /// Inverse through LU; `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        let m = nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.data);
        let inv = m.try_inverse()?;
        Some(Self::from_fn(self.dim, |r, c| inv[(r, c)]))
    }

    /// Returns `c` if the matrix equals `c·I` up to `tol` relative to its norm.
    pub fn scalar_multiple_of_identity(&self, tol: f64) -> Option<Complex64> {
        if self.dim == 0 {
            return None;
        }
        let c = self.trace() / self.dim as f64;
        let resid = (self - &Self::identity(self.dim).scale(c)).frobenius_norm();
        (resid <= tol * self.frobenius_norm().max(1e-300)).then_some(c)
    }

    /// Block `(br, bc)` of a 2×2 block partition (auxiliary space leading).
    pub fn block(&self, br: usize, bc: usize) -> Self {
        let h = self.dim / 2;
        Self::from_fn(h, |r, c| self[(br * h + r, bc * h + c)])
    }

    /// Assembles a matrix from its 2×2 block partition `[[a, b], [c, d]]`.
    pub fn from_blocks(blocks: [[&Self; 2]; 2]) -> Self {
        let h = blocks[0][0].dim;
        let mut m = Self::zeros(2 * h);
        for (br, row) in blocks.iter().enumerate() {
            for (bc, blk) in row.iter().enumerate() {
                assert_eq!(blk.dim, h, "block dimension mismatch");
                for r in 0..h {
                    for c in 0..h {
                        m[(br * h + r, bc * h + c)] = blk[(r, c)];
                    }
                }
            }
        }
        m
    }

    /// `(local ⊗ I) · self`, with `local` acting on the listed factors
    /// (first listed factor is the most significant local index).
    pub fn apply_local_left(&self, local: &Self, factors: &[usize]) -> Self {
        let layout = LocalLayout::new(self, local, factors);
        let n = self.dim;
        let mut out = Self::zeros(n);
        exec::for_each_row(&mut out.data, n, |r, row| {
            let s = layout.gather(r);
            let base = r & !layout.mask;
            for t in 0..local.dim {
                let w = local[(s, t)];
                if w == ZERO {
                    continue;
                }
                let src = layout.scatter(base, t);
                for (o, &z) in row.iter_mut().zip(&self.data[src * n..(src + 1) * n]) {
                    *o += w * z;
                }
            }
        });
        out
    }

    /// `self · (local ⊗ I)`.
    pub fn apply_local_right(&self, local: &Self, factors: &[usize]) -> Self {
        let layout = LocalLayout::new(self, local, factors);
        let n = self.dim;
        let mut out = Self::zeros(n);
        exec::for_each_row(&mut out.data, n, |r, row| {
            let src = &self.data[r * n..(r + 1) * n];
            for (c, o) in row.iter_mut().enumerate() {
                let t = layout.gather(c);
                let base = c & !layout.mask;
                let mut acc = ZERO;
                for s in 0..local.dim {
                    let w = local[(s, t)];
                    if w != ZERO {
                        acc += src[layout.scatter(base, s)] * w;
                    }
                }
                *o = acc;
            }
        });
        out
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

/// Bit bookkeeping for operators restricted to a subset of qubit factors.
struct LocalLayout {
    bits: Vec<usize>,
    mask: usize,
}

impl LocalLayout {
    fn new(full: &CMatrix, local: &CMatrix, factors: &[usize]) -> Self {
        let n = full
            .num_factors()
            .expect("local application needs a qubit-register dimension");
        assert_eq!(local.dim, 1 << factors.len(), "local operator size");
        let bits: Vec<usize> = factors
            .iter()
            .map(|&f| {
                assert!(f < n, "factor {f} out of range for {n} factors");
                1usize << (n - 1 - f)
            })
            .collect();
        let mask = bits.iter().fold(0, |m, b| m | b);
        Self { bits, mask }
    }

    fn gather(&self, index: usize) -> usize {
        self.bits.iter().fold(0, |s, &b| (s << 1) | usize::from(index & b != 0))
    }

    fn scatter(&self, base: usize, local: usize) -> usize {
        let k = self.bits.len();
        self.bits.iter().enumerate().fold(
            base,
            |acc, (j, &b)| {
                if local >> (k - 1 - j) & 1 == 1 {
                    acc | b
                } else {
                    acc
                }
            },
        )
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.dim * b.dim;
    let mut out = CMatrix::zeros(n);
    let bd = b.dim;
    exec::for_each_row(&mut out.data, n, |r, row| {
        let (ar, br) = (r / bd, r % bd);
        for ac in 0..a.dim {
            let x = a[(ar, ac)];
            if x == ZERO {
                continue;
            }
            for bc in 0..bd {
                row[ac * bd + bc] = x * b[(br, bc)];
            }
        }
    });
    out
}

/// Kronecker product of a sequence, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    factors.into_iter().fold(CMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// `I^{⊗(first_site−1)} ⊗ op ⊗ I^{⊗(N−first_site−k+1)}` for `op` on `k`
/// adjacent sites. Sites are 1-based.
pub fn embed(op: &CMatrix, first_site: usize, sites: usize) -> Result<ChainOperator> {
    let width = op.num_factors().ok_or(Error::DimensionMismatch {
        expected: op.dim.next_power_of_two(),
        found: op.dim,
    })?;
    if first_site == 0 || first_site + width - 1 > sites {
        return Err(Error::SiteOutOfRange {
            site: first_site,
            width,
            sites,
        });
    }
    let left = CMatrix::identity(1 << (first_site - 1));
    let right = CMatrix::identity(1 << (sites + 1 - first_site - width));
    Ok(kron(&kron(&left, op), &right))
}

/// `‖lhs − rhs‖_F / max(1, ‖lhs‖_F, ‖rhs‖_F)`.
pub fn rel_residual(lhs: &CMatrix, rhs: &CMatrix) -> f64 {
    assert_eq!(lhs.dim, rhs.dim, "residual of operators with different dimension");
    let diff = lhs
        .data
        .iter()
        .zip(&rhs.data)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let scale = lhs.frobenius_norm().max(rhs.frobenius_norm());
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Like [`rel_residual`] but normalized by at least `scale`; for identities
/// whose sides may legitimately vanish, `scale` should be the size of the
/// terms that cancel.
pub fn scaled_residual(lhs: &CMatrix, rhs: &CMatrix, scale: f64) -> f64 {
    let denom = scale.max(lhs.frobenius_norm()).max(rhs.frobenius_norm());
    if denom == 0.0 {
        0.0
    } else {
        (lhs - rhs).frobenius_norm() / denom
    }
}

/// Single-qubit Pauli and ladder matrices.
pub mod pauli {
    use super::{CMatrix, I, ONE, ZERO};

    pub fn identity() -> CMatrix {
        CMatrix::identity(2)
    }

    pub fn x() -> CMatrix {
        CMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn y() -> CMatrix {
        CMatrix::from_rows([[ZERO, -I], [I, ZERO]])
    }

    pub fn z() -> CMatrix {
        CMatrix::from_rows([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `σ⁺ = |↑⟩⟨↓|`.
    pub fn plus() -> CMatrix {
        CMatrix::from_rows([[ZERO, ONE], [ZERO, ZERO]])
    }

    /// `σ⁻ = |↓⟩⟨↑|`.
    pub fn minus() -> CMatrix {
        CMatrix::from_rows([[ZERO, ZERO], [ONE, ZERO]])
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr<&CMatrix> for &CMatrix {
            type Output = CMatrix;
            fn $f(self, rhs: &CMatrix) -> CMatrix {
                assert_eq!(self.dim, rhs.dim, "dimension mismatch");
                CMatrix {
                    dim: self.dim,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a $op b).collect(),
                }
            }
        }
        impl $tr for CMatrix {
            type Output = CMatrix;
            fn $f(self, rhs: CMatrix) -> CMatrix {
                &self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.data.iter_mut().zip(&rhs.data).for_each(|(a, b)| *a += b);
    }
}

impl Mul<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Mul for CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: CMatrix) -> CMatrix {
        self.matmul(&rhs)
    }
}

impl Mul<Complex64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: Complex64) -> CMatrix {
        self.scale(rhs)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale(-ONE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::pauli;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_of_identities() {
        assert_eq!(kron(&pauli::identity(), &pauli::identity()), CMatrix::identity(4));
    }

    #[test]
    fn kron_z_identity() {
        let expected = CMatrix::diag(&[ONE, ONE, -ONE, -ONE]);
        assert_eq!(kron(&pauli::z(), &pauli::identity()), expected);
    }

    #[test]
    fn embed_cases() {
        assert_eq!(embed(&pauli::z(), 1, 1).unwrap(), pauli::z());
        assert_eq!(embed(&pauli::x(), 2, 2).unwrap(), kron(&pauli::identity(), &pauli::x()));
        assert!(matches!(embed(&pauli::x(), 3, 2), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(embed(&pauli::x(), 0, 2), Err(Error::SiteOutOfRange { .. })));
    }

    #[test]
    fn disjoint_embeds_commute() {
        let a = embed(&pauli::x(), 1, 3).unwrap();
        let b = embed(&pauli::y(), 3, 3).unwrap();
        assert_eq!(a.commutator(&b).frobenius_norm(), 0.0);
    }

    #[test]
    fn q_commutator_rules() {
        let q = c(0.3, 0.0).scale(1.0) * I;
        let q = q.exp();
        let x = CMatrix::from_rows([[c(1.0, 0.5), c(0.2, 0.0)], [c(-0.3, 1.0), c(0.0, 2.0)]]);
        let lhs = x.q_commutator(&x, q).unwrap();
        let rhs = x.matmul(&x).scale(q - q.inv());
        assert!(rel_residual(&lhs, &rhs) < 1e-15);

        let plain = pauli::z().q_commutator(&pauli::plus(), ONE).unwrap();
        assert_eq!(plain, pauli::plus().scale(c(2.0, 0.0)));

        assert!(matches!(x.q_commutator(&x, ZERO), Err(Error::ZeroQFactor)));
    }

    #[test]
    fn residual_formula() {
        let a = pauli::x();
        assert_eq!(rel_residual(&a, &a), 0.0);
        let id = CMatrix::identity(2);
        let r = rel_residual(&id, &id.scale(c(2.0, 0.0)));
        assert!((r - 0.5).abs() < 1e-15);
    }

    #[test]
    fn local_application_matches_embedding() {
        // random-ish 4×4 local operator on factors (0, 2) of a 4-factor register
        let local = CMatrix::from_fn(4, |r, col| c(r as f64 + 0.5, col as f64 - 1.0));
        let m = CMatrix::from_fn(16, |r, col| c((r * 3 + col) as f64 % 7.0, (r + 2 * col) as f64 % 5.0));
        // build the embedded operator by permuting factors 1 and 2
        let swap12 = CMatrix::from_fn(16, |r, col| {
            let b = |x: usize, k: usize| (x >> (3 - k)) & 1;
            let perm = |x: usize| (b(x, 0) << 3) | (b(x, 2) << 2) | (b(x, 1) << 1) | b(x, 3);
            if perm(col) == r {
                ONE
            } else {
                ZERO
            }
        });
        let on01 = kron(&local, &CMatrix::identity(4));
        let full = swap12.matmul(&on01).matmul(&swap12);
        assert!(rel_residual(&m.apply_local_left(&local, &[0, 2]), &full.matmul(&m)) < 1e-14);
        assert!(rel_residual(&m.apply_local_right(&local, &[0, 2]), &m.matmul(&full)) < 1e-14);
    }

    #[test]
    fn parallel_and_serial_products_agree() {
        let a = CMatrix::from_fn(128, |r, col| c(((r * 7 + col) % 11) as f64, ((r + col * 5) % 3) as f64));
        let b = CMatrix::from_fn(128, |r, col| c(((r + col) % 5) as f64 - 2.0, 0.5));
        assert!(rel_residual(&a.matmul(&b), &a.matmul_serial(&b)) < 1e-15);
    }

    #[test]
    fn blocks_roundtrip() {
        let m = CMatrix::from_fn(8, |r, col| c(r as f64, col as f64));
        let (a, b, cc, d) = (m.block(0, 0), m.block(0, 1), m.block(1, 0), m.block(1, 1));
        assert_eq!(CMatrix::from_blocks([[&a, &b], [&cc, &d]]), m);
    }
}
