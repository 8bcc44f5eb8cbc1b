//! General complex eigensolver for spectrum reports.
//!
//! Backed by nalgebra's complex Schur decomposition; eigenvectors are
//! recovered by back substitution on the triangular factor.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::CMatrix;

pub const DEFAULT_DIM_CAP: usize = 1 << 10;
pub const MAX_ITERATIONS: usize = 10_000;

#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Sorted by `(re, im)`.
    pub values: Vec<Complex64>,
    /// Unit-norm right eigenvectors, aligned with `values`, when requested.
    pub vectors: Option<Vec<Vec<Complex64>>>,
}

pub fn eig_general(a: &CMatrix, with_vectors: bool) -> Result<Spectrum> {
    eig_general_capped(a, with_vectors, DEFAULT_DIM_CAP)
}

pub fn eig_general_capped(a: &CMatrix, with_vectors: bool, cap: usize) -> Result<Spectrum> {
    let n = a.dim();
    if n > cap {
        return Err(Error::DimensionCap { dim: n, cap });
    }
    let m = DMatrix::from_row_slice(n, n, a.data());
    let schur = Schur::try_new(m, f64::EPSILON, MAX_ITERATIONS).ok_or(Error::EigenNoConvergence {
        iterations: MAX_ITERATIONS,
    })?;
    let (q, t) = schur.unpack();

    let mut pairs: Vec<(Complex64, Option<Vec<Complex64>>)> = (0..n)
        .map(|k| {
            let v = with_vectors.then(|| triangular_eigenvector(&q, &t, k));
            (t[(k, k)], v)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.re.total_cmp(&y.0.re).then_with(|| x.0.im.total_cmp(&y.0.im)));
    let values = pairs.iter().map(|p| p.0).collect();
    let vectors = with_vectors.then(|| pairs.into_iter().filter_map(|p| p.1).collect());
    Ok(Spectrum { values, vectors })
}

fn triangular_eigenvector(q: &DMatrix<Complex64>, t: &DMatrix<Complex64>, k: usize) -> Vec<Complex64> {
    let n = t.nrows();
    let lambda = t[(k, k)];
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    y[k] = Complex64::new(1.0, 0.0);
    for j in (0..k).rev() {
        let s: Complex64 = (j + 1..=k).map(|l| t[(j, l)] * y[l]).sum();
        let mut d = t[(j, j)] - lambda;
        if d.norm() < f64::EPSILON * scale {
            // repeated eigenvalue: perturb to keep the solve finite
            d = Complex64::new(f64::EPSILON * scale, 0.0);
        }
        y[j] = -s / d;
    }
    let mut v: Vec<Complex64> = (0..n).map(|r| (0..=k).map(|l| q[(r, l)] * y[l]).sum()).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Clusters sorted eigenvalues whose consecutive gap is below `tol`.
pub fn cluster_degeneracies(values: &[Complex64], tol: f64) -> Vec<Vec<Complex64>> {
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for &v in values {
        let joined = clusters.iter_mut().find(|cl| cl.iter().any(|&w| (w - v).norm() < tol));
        match joined {
            Some(cl) => cl.push(v),
            None => clusters.push(vec![v]),
        }
    }
    clusters
}
