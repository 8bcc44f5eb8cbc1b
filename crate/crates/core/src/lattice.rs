//! Spectral-parameter dependent lattice objects: R and L operators, the
//! right and left boundary matrices, closed and doubled monodromies, open
//! transfer matrices, and the open-chain Hamiltonian.
//!
//! Every object that depends on λ is stored exactly as a Laurent polynomial
//! in `u = e^λ`. Tensor layout: the auxiliary space is the leading factor,
//! chain site `a` is factor `a` (site 1 leftmost after the auxiliary space).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{blob_generators, blob_u0_local, tl_local, Gradation, ModelParams};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::operator::{LaurentOp, OperatorMatrix};
use crate::tensor::{embed, pauli, CMatrix, ChainOperator, I, ONE, ZERO};

/// Largest chain for which Laurent-form (exact in λ) objects are built.
pub const LAURENT_SITE_CAP: usize = 8;
/// Largest chain for which pointwise-evaluated objects are built.
pub const NUMERIC_SITE_CAP: usize = 10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn check_cap(sites: usize, cap: usize) -> Result<()> {
    if sites > cap {
        Err(Error::TooManySites { sites, cap })
    } else {
        Ok(())
    }
}

/// The 4×4 permutation `𝒫(a ⊗ b) = b ⊗ a`.
pub fn permutation() -> CMatrix {
    CMatrix::from_fn(4, |r, col| {
        if (r >> 1) == (col & 1) && (r & 1) == (col >> 1) {
            ONE
        } else {
            ZERO
        }
    })
}

/// Multiplies entry `(r, c)` by `u^{left·a(r) + right·a(c)}`, where `a(·)` is
/// the auxiliary (leading-factor) bit. `(1, 1)` is `𝒱 X 𝒱`, `(1, −1)` is
/// `𝒱 X 𝒱⁻¹` and `(−1, 1)` is `𝒱⁻¹ X 𝒱`, with `𝒱(λ) = diag(1, e^λ)`.
pub fn gauge_aux(op: &LaurentOp, left: i32, right: i32) -> LaurentOp {
    let dim = op.dim();
    let half = dim / 2;
    let mut terms = Vec::new();
    for (n, m) in op.terms() {
        for ar in 0..2usize {
            for ac in 0..2usize {
                let part = CMatrix::from_fn(dim, |r, col| {
                    if r / half == ar && col / half == ac {
                        m[(r, col)]
                    } else {
                        ZERO
                    }
                });
                terms.push((n + left * ar as i32 + right * ac as i32, part));
            }
        }
    }
    LaurentOp::from_terms(dim, terms)
}

/// The R matrix from its explicit entries, basis `|aux, site⟩`.
pub fn r_matrix(params: &ModelParams, gradation: Gradation) -> OperatorMatrix {
    let s = params.sinh_i_mu();
    let im = I * params.mu;
    let z = LaurentPoly::zero;
    let a = LaurentPoly::sinh_affine(1, im);
    let b = LaurentPoly::sinh_affine(1, ZERO);
    let up = LaurentPoly::monomial(1, s);
    let down = LaurentPoly::monomial(-1, s);
    let homogeneous = LaurentOp::from_entries(&[
        vec![a.clone(), z(), z(), z()],
        vec![z(), b.clone(), up, z()],
        vec![z(), down, b, z()],
        vec![z(), z(), z(), a],
    ]);
    let op = match gradation {
        Gradation::Homogeneous => homogeneous,
        Gradation::Principal => gauge_aux(&homogeneous, 1, -1),
    };
    OperatorMatrix::new(1, gradation, op).expect("4x4 is one site")
}

/// Homogeneous R matrix written through the Temperley–Lieb generator:
/// `𝒫(sinh(λ + iμ)·I + sinh λ·h(𝒰₁))`.
pub fn r_matrix_tl_form(params: &ModelParams) -> OperatorMatrix {
    let p = permutation();
    let lhs = LaurentOp::from_poly(&LaurentPoly::sinh_affine(1, I * params.mu), &CMatrix::identity(4)).add(
        &LaurentOp::from_poly(&LaurentPoly::sinh_affine(1, ZERO), &tl_local(params)),
    );
    OperatorMatrix::new(1, Gradation::Homogeneous, lhs.mul_const_left(&p)).expect("4x4 is one site")
}

/// `ℒ` (or `ℒ̂` when `hat`) in block form, with `h₁`, `e₁`, `f₁` replaced by
/// the supplied single-site matrices (`h` given by its diagonal):
/// diagonal blocks `sinh(λ + iμ/2 ± iμh)`, off-diagonal `e^{±λ} f sinh iμ`
/// and `e^{∓λ} e sinh iμ`.
fn l_from_generators(mu: f64, h: [f64; 2], e: &CMatrix, f: &CMatrix, hat: bool) -> LaurentOp {
    let s = (I * mu).sinh();
    let diag_block = |sign: f64| {
        let entries: Vec<Vec<LaurentPoly>> = (0..2)
            .map(|r| {
                (0..2)
                    .map(|col| {
                        if r == col {
                            LaurentPoly::sinh_affine(1, I * (mu / 2.0 + sign * mu * h[r]))
                        } else {
                            LaurentPoly::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        LaurentOp::from_entries(&entries)
    };
    let off = if hat { -1 } else { 1 };
    let b12 = LaurentOp::from_poly(&LaurentPoly::monomial(off, s), f);
    let b21 = LaurentOp::from_poly(&LaurentPoly::monomial(-off, s), e);
    let d1 = diag_block(1.0);
    let d2 = diag_block(-1.0);
    let mut terms = Vec::new();
    for (blk, (br, bc)) in [(&d1, (0, 0)), (&b12, (0, 1)), (&b21, (1, 0)), (&d2, (1, 1))] {
        for (n, m) in blk.terms() {
            let placed = CMatrix::from_fn(4, |r, col| {
                if r / 2 == br && col / 2 == bc {
                    m[(r % 2, col % 2)]
                } else {
                    ZERO
                }
            });
            terms.push((n, placed));
        }
    }
    LaurentOp::from_terms(4, terms)
}

/// `(ℒ, ℒ̂)` with the fundamental representation `ρ₀` on the quantum space.
pub fn l_operators(params: &ModelParams) -> (OperatorMatrix, OperatorMatrix) {
    let (e, f) = (pauli::plus(), pauli::minus());
    let l = l_from_generators(params.mu, [0.5, -0.5], &e, &f, false);
    let l_hat = l_from_generators(params.mu, [0.5, -0.5], &e, &f, true);
    let (l, l_hat) = match params.gradation {
        Gradation::Homogeneous => (l, l_hat),
        Gradation::Principal => (gauge_aux(&l, 1, -1), gauge_aux(&l_hat, -1, 1)),
    };
    (
        OperatorMatrix::new(1, params.gradation, l).expect("4x4 is one site"),
        OperatorMatrix::new(1, params.gradation, l_hat).expect("4x4 is one site"),
    )
}

/// Which side of the chain a boundary matrix sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

/// How a right boundary matrix is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KForm {
    /// `x(λ)·I + y(λ)·h(𝒰₀)`.
    Blob,
    /// Entry by entry.
    Explicit,
}

impl FromStr for KForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "blob" => Ok(KForm::Blob),
            "explicit" => Ok(KForm::Explicit),
            _ => Err(Error::Unknown {
                kind: "K-matrix form",
                value: s.to_owned(),
            }),
        }
    }
}

/// Diagonal left boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LeftCase {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II")]
    II,
    #[serde(rename = "III")]
    III,
}

impl LeftCase {
    pub const ALL: [LeftCase; 3] = [LeftCase::I, LeftCase::II, LeftCase::III];
}

impl fmt::Display for LeftCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LeftCase::I => "I",
            LeftCase::II => "II",
            LeftCase::III => "III",
        })
    }
}

impl FromStr for LeftCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(LeftCase::I),
            "II" | "2" => Ok(LeftCase::II),
            "III" | "3" => Ok(LeftCase::III),
            _ => Err(Error::Unknown {
                kind: "left boundary case",
                value: s.to_owned(),
            }),
        }
    }
}

/// Tag recording where a boundary matrix came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KKind {
    Right(KForm),
    Left(LeftCase),
}

/// A 2×2 boundary matrix with Laurent entries.
#[derive(Clone, Debug, PartialEq)]
pub struct KMatrix {
    pub side: Side,
    pub gradation: Gradation,
    pub kind: KKind,
    pub op: LaurentOp,
}

impl KMatrix {
    pub fn entry(&self, r: usize, col: usize) -> LaurentPoly {
        self.op.entry(r, col)
    }

    pub fn eval(&self, lambda: Complex64) -> CMatrix {
        self.op.eval(lambda)
    }
}

/// Scalar functions of the blob form:
/// `x(λ) = 2 sinh(λ − imμ/2 − iμζ) cosh(λ − imμ/2 + iμζ)`, `y(λ) = sinh 2λ`.
pub fn boundary_scalars(params: &ModelParams) -> (LaurentPoly, LaurentPoly) {
    let (mu, m, zeta) = (params.mu, params.m, params.zeta);
    let x = &LaurentPoly::sinh_affine(1, I * (-m * mu / 2.0 - mu * zeta))
        * &LaurentPoly::cosh_affine(1, I * (-m * mu / 2.0 + mu * zeta));
    (x.scale(c(2.0)), LaurentPoly::sinh_affine(2, ZERO))
}

fn k_right_homogeneous(params: &ModelParams, form: KForm) -> LaurentOp {
    match form {
        KForm::Blob => {
            let (x, y) = boundary_scalars(params);
            LaurentOp::from_poly(&x, &CMatrix::identity(2)).add(&LaurentOp::from_poly(&y, &blob_u0_local(params)))
        }
        KForm::Explicit => {
            let (a, b) = (params.boundary_a(), params.boundary_b());
            let sinh2 = LaurentPoly::sinh_affine(2, ZERO);
            LaurentOp::from_entries(&[
                vec![LaurentPoly::from_terms([(2, a), (0, -b)]), sinh2.clone()],
                vec![sinh2, LaurentPoly::from_terms([(-2, a), (0, -b)])],
            ])
        }
    }
}

/// Right boundary matrix.
///
/// In the principal gradation the explicit form is the κ-normalized display
/// `[[A e^λ − B e^{−λ}, sinh 2λ], [sinh 2λ, A e^{−λ} − B e^λ]]`, while the blob
/// form is obtained from the homogeneous one by the gauge `e^{−λ} 𝒱𝒦𝒱`; the
/// two agree identically. The factor `e^{−λ}` makes the principal transfer
/// matrix coincide with the homogeneous one rather than differ by `e^λ`.
pub fn k_right(params: &ModelParams, form: KForm, gradation: Gradation) -> KMatrix {
    let op = match (gradation, form) {
        (Gradation::Homogeneous, f) => k_right_homogeneous(params, f),
        (Gradation::Principal, KForm::Blob) => {
            gauge_aux(&k_right_homogeneous(params, KForm::Blob), 1, 1).scale_poly(&LaurentPoly::monomial(-1, ONE))
        }
        (Gradation::Principal, KForm::Explicit) => {
            let (a, b) = (params.boundary_a(), params.boundary_b());
            let sinh2 = LaurentPoly::sinh_affine(2, ZERO);
            LaurentOp::from_entries(&[
                vec![LaurentPoly::from_terms([(1, a), (-1, -b)]), sinh2.clone()],
                vec![sinh2, LaurentPoly::from_terms([(-1, a), (1, -b)])],
            ])
        }
    };
    KMatrix {
        side: Side::Right,
        gradation,
        kind: KKind::Right(form),
        op,
    }
}

/// Diagonal left boundary for cases I/II/III.
pub fn k_left(case: LeftCase, gradation: Gradation, params: &ModelParams) -> KMatrix {
    let im = I * params.mu;
    let diag = |p: LaurentPoly, q: LaurentPoly| {
        LaurentOp::from_entries(&[vec![p, LaurentPoly::zero()], vec![LaurentPoly::zero(), q]])
    };
    let e = LaurentPoly::exp_affine;
    let op = match (gradation, case) {
        (Gradation::Homogeneous, LeftCase::I) => LaurentOp::identity(2),
        (Gradation::Homogeneous, LeftCase::II) => diag(e(-2, -im * 2.0), e(2, im * 2.0)),
        (Gradation::Homogeneous, LeftCase::III) => diag(e(-1, -im), e(1, im)),
        (Gradation::Principal, LeftCase::I) => diag(e(1, im), e(-1, -im)),
        (Gradation::Principal, LeftCase::II) => diag(e(-1, -im), e(1, im)),
        (Gradation::Principal, LeftCase::III) => LaurentOp::identity(2),
    };
    KMatrix {
        side: Side::Left,
        gradation,
        kind: KKind::Left(case),
        op,
    }
}

/// General left-boundary rule `𝒦^{(l)}(λ) = 𝒦(−λ − iμ)ᵗ`.
pub fn k_left_from_rule(k: &LaurentOp, mu: f64) -> LaurentOp {
    k.reflect().shift(I * mu).transpose()
}

/// `M` of the open transfer matrix: `diag(q, q⁻¹)` homogeneous, `I` principal.
pub fn twist(params: &ModelParams, gradation: Gradation) -> CMatrix {
    match gradation {
        Gradation::Homogeneous => CMatrix::diag(&[params.q, params.q.inv()]),
        Gradation::Principal => CMatrix::identity(2),
    }
}

/// Applies `X_{0N} … X_{01}` (descending) or `X_{01} … X_{0N}` (ascending) on
/// the right of `acc`.
fn apply_sites(acc: LaurentOp, local: &LaurentOp, sites: usize, descending: bool) -> LaurentOp {
    let order: Vec<usize> = if descending {
        (1..=sites).rev().collect()
    } else {
        (1..=sites).collect()
    };
    order
        .into_iter()
        .fold(acc, |acc, a| acc.apply_local_right(local, &[0, a]))
}

/// `T = ℒ_{0N}…ℒ_{01}`.
pub fn monodromy(params: &ModelParams) -> Result<OperatorMatrix> {
    check_cap(params.sites, LAURENT_SITE_CAP)?;
    let (l, _) = l_operators(params);
    let n = params.sites;
    let op = apply_sites(LaurentOp::identity(2 << n), l.op(), n, true);
    OperatorMatrix::new(n, params.gradation, op)
}

/// `T̂ = ℒ̂_{01}…ℒ̂_{0N}`.
pub fn monodromy_hat(params: &ModelParams) -> Result<OperatorMatrix> {
    check_cap(params.sites, LAURENT_SITE_CAP)?;
    let (_, l_hat) = l_operators(params);
    let n = params.sites;
    let op = apply_sites(LaurentOp::identity(2 << n), l_hat.op(), n, false);
    OperatorMatrix::new(n, params.gradation, op)
}

/// `T · (𝒦 ⊗ I) · T̂` for explicit pieces; `sites = 0` returns `𝒦`.
pub fn doubled_from_parts(sites: usize, l: &LaurentOp, k: &LaurentOp, l_hat: &LaurentOp) -> LaurentOp {
    let t = apply_sites(LaurentOp::identity(2 << sites), l, sites, true);
    let tk = t.apply_local_right(k, &[0]);
    apply_sites(tk, l_hat, sites, false)
}

/// `𝒯 = T 𝒦^{(r)} T̂` with the blob-form right boundary of the params' gradation.
pub fn doubled_monodromy(params: &ModelParams) -> Result<OperatorMatrix> {
    let k = k_right(params, KForm::Blob, params.gradation);
    doubled_monodromy_with(params, &k.op)
}

/// `𝒯` with a caller-supplied right boundary (used by sensitivity controls).
pub fn doubled_monodromy_with(params: &ModelParams, k: &LaurentOp) -> Result<OperatorMatrix> {
    check_cap(params.sites, LAURENT_SITE_CAP)?;
    let (l, l_hat) = l_operators(params);
    let op = doubled_from_parts(params.sites, l.op(), k, l_hat.op());
    let n = params.sites;
    op.check_degrees("doubled monodromy", -(2 * n as i32) - 3, 2 * n as i32 + 3)?;
    OperatorMatrix::new(n, params.gradation, op)
}

/// `𝒯(λ)` evaluated pointwise, without Laurent bookkeeping.
pub fn doubled_monodromy_at(params: &ModelParams, lambda: Complex64) -> Result<CMatrix> {
    check_cap(params.sites, NUMERIC_SITE_CAP)?;
    let (l, l_hat) = l_operators(params);
    let (l, l_hat) = (l.eval(lambda), l_hat.eval(lambda));
    let k = k_right(params, KForm::Blob, params.gradation).eval(lambda);
    let n = params.sites;
    let mut acc = CMatrix::identity(2 << n);
    for a in (1..=n).rev() {
        acc = acc.apply_local_right(&l, &[0, a]);
    }
    acc = acc.apply_local_right(&k, &[0]);
    for a in 1..=n {
        acc = acc.apply_local_right(&l_hat, &[0, a]);
    }
    Ok(acc)
}

/// `(𝒯(λ), 𝒯′(λ))` evaluated pointwise.
///
/// The derivative is accumulated factor by factor with the product rule, each
/// local factor differentiated exactly through its Laurent entries. Unlike
/// differentiating the assembled Laurent form this avoids the cancellation
/// between large coefficients at small μ.
pub fn doubled_monodromy_jet_at(params: &ModelParams, lambda: Complex64) -> Result<(CMatrix, CMatrix)> {
    check_cap(params.sites, NUMERIC_SITE_CAP)?;
    let (l, l_hat) = l_operators(params);
    let k = k_right(params, KForm::Blob, params.gradation).op;
    let jet = |op: &LaurentOp| (op.eval(lambda), op.d_lambda().eval(lambda));
    let (l, l_hat, k) = (jet(l.op()), jet(l_hat.op()), jet(&k));
    let n = params.sites;
    let mut value = CMatrix::identity(2 << n);
    let mut deriv = CMatrix::zeros(2 << n);
    let mut step = |(v, d): &(CMatrix, CMatrix), factors: &[usize]| {
        deriv = &deriv.apply_local_right(v, factors) + &value.apply_local_right(d, factors);
        value = value.apply_local_right(v, factors);
    };
    for a in (1..=n).rev() {
        step(&l, &[0, a]);
    }
    step(&k, &[0]);
    for a in 1..=n {
        step(&l_hat, &[0, a]);
    }
    Ok((value, deriv))
}

/// `t′(λ)` evaluated pointwise via [`doubled_monodromy_jet_at`].
pub fn transfer_derivative_at(params: &ModelParams, case: LeftCase, lambda: Complex64) -> Result<ChainOperator> {
    let (big, dbig) = doubled_monodromy_jet_at(params, lambda)?;
    let kl = k_left(case, params.gradation, params).op;
    let m = twist(params, params.gradation);
    Ok(&weighted_trace_aux(&dbig, &m, &kl.eval(lambda)) + &weighted_trace_aux(&big, &m, &kl.d_lambda().eval(lambda)))
}

/// `T(λ)` evaluated pointwise.
pub fn monodromy_at(params: &ModelParams, lambda: Complex64) -> Result<CMatrix> {
    check_cap(params.sites, NUMERIC_SITE_CAP)?;
    let l = l_operators(params).0.eval(lambda);
    let n = params.sites;
    let mut acc = CMatrix::identity(2 << n);
    for a in (1..=n).rev() {
        acc = acc.apply_local_right(&l, &[0, a]);
    }
    Ok(acc)
}

/// `Σ_{ij} W_{ij} 𝒯_{ji}` for a 2×2 Laurent weight `W` and an aux ⊗ chain `𝒯`.
pub fn weighted_trace(big: &LaurentOp, weight: &LaurentOp) -> LaurentOp {
    let mut out = LaurentOp::zero(big.dim() / 2);
    for i in 0..2 {
        for j in 0..2 {
            let w = weight.entry(i, j);
            if !w.is_zero() {
                out = out.add(&big.block(j, i).scale_poly(&w));
            }
        }
    }
    out
}

/// Pointwise weighted auxiliary trace `Tr₀{M 𝒦^{(l)} 𝒯}`.
pub fn weighted_trace_aux(big: &CMatrix, m: &CMatrix, k_left: &CMatrix) -> CMatrix {
    let w = m.matmul(k_left);
    let mut out = CMatrix::zeros(big.dim() / 2);
    for i in 0..2 {
        for j in 0..2 {
            if w[(i, j)] != ZERO {
                out += &big.block(j, i).scale(w[(i, j)]);
            }
        }
    }
    out
}

/// An open-chain transfer matrix with Laurent entries.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    pub case: LeftCase,
    pub gradation: Gradation,
    pub sites: usize,
    pub op: LaurentOp,
}

impl TransferMatrix {
    pub fn eval(&self, lambda: Complex64) -> ChainOperator {
        self.op.eval(lambda)
    }
}

/// `M 𝒦^{(l)}` as a Laurent 2×2 weight.
pub fn transfer_weight(params: &ModelParams, case: LeftCase) -> LaurentOp {
    k_left(case, params.gradation, params)
        .op
        .mul_const_left(&twist(params, params.gradation))
}

/// `t(λ) = Tr₀{M₀ 𝒦₀^{(l)}(λ) 𝒯₀(λ)}`.
pub fn transfer_matrix(params: &ModelParams, case: LeftCase) -> Result<TransferMatrix> {
    let big = doubled_monodromy(params)?;
    transfer_from_doubled(params, case, big.op())
}

/// The open transfer matrix for an already built `𝒯`.
pub fn transfer_from_doubled(params: &ModelParams, case: LeftCase, big: &LaurentOp) -> Result<TransferMatrix> {
    let op = weighted_trace(big, &transfer_weight(params, case));
    let bound = 2 * params.sites as i32 + 4;
    op.check_degrees("transfer matrix", -bound, bound)?;
    Ok(TransferMatrix {
        case,
        gradation: params.gradation,
        sites: params.sites,
        op,
    })
}

/// `t(λ)` evaluated pointwise.
pub fn transfer_at(params: &ModelParams, case: LeftCase, lambda: Complex64) -> Result<ChainOperator> {
    let big = doubled_monodromy_at(params, lambda)?;
    let kl = k_left(case, params.gradation, params).eval(lambda);
    Ok(weighted_trace_aux(&big, &twist(params, params.gradation), &kl))
}

/// Closed-chain transfer matrix `Tr₀ T₀(λ)`.
pub fn closed_transfer(params: &ModelParams) -> Result<LaurentOp> {
    let t = monodromy(params)?;
    Ok(weighted_trace(t.op(), &LaurentOp::identity(2)))
}

/// Route by which the Hamiltonian is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianRoute {
    /// `−(sinh iμ)^{−2N+1}/(4x(0)) · (tr M)⁻¹ · t′(0)` for case I, homogeneous,
    /// with `t′` differentiated exactly.
    Derivative,
    /// `−½Σ h(𝒰_l) − sinh(iμ)y′(0)/(4x(0)) h(𝒰₀) + w`.
    Blob,
    /// XXZ form in Pauli matrices with `c₁ = 1/(2(q+q⁻¹))`, `c₂ = 0`.
    Pauli,
}

impl HamiltonianRoute {
    pub const ALL: [HamiltonianRoute; 3] = [
        HamiltonianRoute::Derivative,
        HamiltonianRoute::Blob,
        HamiltonianRoute::Pauli,
    ];
}

impl FromStr for HamiltonianRoute {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "derivative" => Ok(HamiltonianRoute::Derivative),
            "blob" => Ok(HamiltonianRoute::Blob),
            "pauli" => Ok(HamiltonianRoute::Pauli),
            _ => Err(Error::Unknown {
                kind: "hamiltonian route",
                value: s.to_owned(),
            }),
        }
    }
}

const SINGULAR_TOL: f64 = 1e-12;

fn check_hamiltonian_normalization(params: &ModelParams) -> Result<()> {
    if params.x0_vanishes() {
        return Err(Error::SingularNormalization {
            parameter: "zeta".into(),
            detail: format!(
                "x(0) = 0 at zeta = {}, m = {}: the right boundary is proportional to the identity",
                params.zeta, params.m
            ),
        });
    }
    if (params.q + params.q.inv()).norm() < SINGULAR_TOL {
        return Err(Error::SingularNormalization {
            parameter: "mu".into(),
            detail: format!("q + 1/q = 0 at mu = {}", params.mu),
        });
    }
    Ok(())
}

/// Open-chain Hamiltonian with left boundary case I.
pub fn hamiltonian(params: &ModelParams, route: HamiltonianRoute) -> Result<ChainOperator> {
    check_hamiltonian_normalization(params)?;
    let n = params.sites;
    let (q, s) = (params.q, params.sinh_i_mu());
    let (x, y) = boundary_scalars(params);
    let zero = ZERO;
    let x0 = x.eval(zero);
    let c1 = (c(2.0) * (q + q.inv())).inv();
    match route {
        HamiltonianRoute::Derivative => {
            let hom = params.with_gradation(Gradation::Homogeneous);
            let dt = transfer_derivative_at(&hom, LeftCase::I, zero)?;
            let pref = -s.powi(1 - 2 * n as i32) / (c(4.0) * x0) / (q + q.inv());
            Ok(dt.scale(pref))
        }
        HamiltonianRoute::Blob => {
            check_cap(n, NUMERIC_SITE_CAP)?;
            let u = blob_generators(params);
            let mut h = CMatrix::zeros(1 << n);
            for ul in &u[1..] {
                h += &ul.scale(c(-0.5));
            }
            let yp = y.d_lambda().eval(zero);
            let xp = x.d_lambda().eval(zero);
            h += &u[0].scale(-s * yp / (c(4.0) * x0));
            let w = -s * xp / (c(4.0) * x0) - (I * params.mu).cosh() * (n as f64 / 2.0) + c1;
            h += &CMatrix::identity(1 << n).scale(w);
            Ok(h)
        }
        HamiltonianRoute::Pauli => {
            check_cap(n, NUMERIC_SITE_CAP)?;
            let on = |op: &CMatrix, site: usize| embed(op, site, n).expect("site in range");
            let (sx, sy, sz) = (pauli::x(), pauli::y(), pauli::z());
            let ch = (I * params.mu).cosh();
            let (m, zeta, mu) = (params.m, params.zeta, params.mu);
            let den = (I * (mu * (m / 2.0 + zeta))).sinh() * (I * (mu * (m / 2.0 - zeta))).cosh() * 4.0;
            let mut h = CMatrix::zeros(1 << n);
            for i in 1..n {
                let bond = &(&on(&sx, i).matmul(&on(&sx, i + 1)) + &on(&sy, i).matmul(&on(&sy, i + 1)))
                    + &on(&sz, i).matmul(&on(&sz, i + 1)).scale(ch);
                h += &bond.scale(c(-0.25));
            }
            h += &(&on(&sz, n) - &on(&sz, 1)).scale(s * -0.25);
            h += &on(&sz, 1).scale(-s * (I * (m * mu)).sinh() / den);
            h += &on(&sx, 1).scale(s / den);
            h += &CMatrix::identity(1 << n).scale(-ch * ((n as f64 + 1.0) / 4.0) + c1);
            Ok(h)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{kron, rel_residual};

    fn params(n: usize, g: Gradation) -> ModelParams {
        ModelParams::new(0.3, 0.7, 0.2, n, g).unwrap()
    }

    fn lam() -> Complex64 {
        Complex64::new(0.37, 0.21)
    }

    #[test]
    fn r_at_zero_is_scaled_permutation() {
        let p = params(1, Gradation::Homogeneous);
        let r0 = r_matrix(&p, Gradation::Homogeneous).eval(ZERO);
        assert!(rel_residual(&r0, &permutation().scale(p.sinh_i_mu())) < 1e-15);
        let rp0 = r_matrix(&p, Gradation::Principal).eval(ZERO);
        assert!(rel_residual(&rp0, &r0) < 1e-15);
    }

    #[test]
    fn r_first_entry_and_tl_form() {
        let p = params(1, Gradation::Homogeneous);
        let r = r_matrix(&p, Gradation::Homogeneous);
        let e11 = r.op().entry(0, 0);
        assert!(e11.max_coeff_diff(&LaurentPoly::sinh_affine(1, I * 0.3)) < 1e-15);
        assert!(r.op().coeff_residual(r_matrix_tl_form(&p).op()) < 1e-12);
    }

    #[test]
    fn principal_r_has_constant_off_diagonal() {
        let p = params(1, Gradation::Principal);
        let r = r_matrix(&p, Gradation::Principal);
        assert!(r.op().entry(1, 2).max_coeff_diff(&LaurentPoly::constant(p.sinh_i_mu())) < 1e-15);
        assert!(r.op().entry(2, 1).max_coeff_diff(&LaurentPoly::constant(p.sinh_i_mu())) < 1e-15);
    }

    #[test]
    fn l_reduces_to_r_and_hat_swaps_exponentials() {
        for g in [Gradation::Homogeneous, Gradation::Principal] {
            let p = params(1, g);
            let (l, l_hat) = l_operators(&p);
            assert!(l.op().coeff_residual(r_matrix(&p, g).op()) < 1e-12);
            if g == Gradation::Homogeneous {
                assert!(l_hat.op().entry(1, 2).max_coeff_diff(&l.op().entry(1, 2).reflect()) < 1e-15);
                assert!(l_hat.op().entry(0, 0).max_coeff_diff(&l.op().entry(0, 0)) < 1e-15);
            }
        }
    }

    #[test]
    fn l_hat_inverts_l_at_negative_argument() {
        let p = params(1, Gradation::Homogeneous);
        let (l, l_hat) = l_operators(&p);
        let prod = l.eval(-lam()).matmul(&l_hat.eval(lam()));
        let s = prod.scalar_multiple_of_identity(1e-12);
        assert!(s.is_some(), "{prod:?}");
    }

    #[test]
    fn right_boundary_forms() {
        let p = params(1, Gradation::Homogeneous);
        for g in [Gradation::Homogeneous, Gradation::Principal] {
            let blob = k_right(&p, KForm::Blob, g);
            let explicit = k_right(&p, KForm::Explicit, g);
            assert!(blob.op.coeff_residual(&explicit.op) < 1e-12, "{g}");
        }
        let k = k_right(&p, KForm::Blob, Gradation::Homogeneous);
        let k0 = k.eval(ZERO);
        assert!(rel_residual(&k0, &CMatrix::identity(2).scale(p.x0)) < 1e-14);
        assert!(k.entry(0, 1).max_coeff_diff(&LaurentPoly::sinh_affine(2, ZERO)) < 1e-15);
        let (_, y) = boundary_scalars(&p);
        assert!((y.d_lambda().eval(ZERO) - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn left_boundaries() {
        let p = params(1, Gradation::Homogeneous);
        assert_eq!(
            k_left(LeftCase::I, Gradation::Homogeneous, &p).op,
            LaurentOp::identity(2)
        );
        assert_eq!(
            k_left(LeftCase::III, Gradation::Principal, &p).op,
            LaurentOp::identity(2)
        );
        let k2 = k_left(LeftCase::II, Gradation::Homogeneous, &p).eval(ZERO);
        let expected = CMatrix::diag(&[(I * -0.6).exp(), (I * 0.6).exp()]);
        assert!(rel_residual(&k2, &expected) < 1e-15);
        assert!("IV".parse::<LeftCase>().is_err());
    }

    #[test]
    fn rule_reproduces_case_two_from_dominant_limit() {
        let p = params(1, Gradation::Homogeneous);
        let dominant = LaurentOp::from_entries(&[
            vec![LaurentPoly::monomial(2, ONE), LaurentPoly::zero()],
            vec![LaurentPoly::zero(), LaurentPoly::monomial(-2, ONE)],
        ]);
        let rule = k_left_from_rule(&dominant, p.mu);
        assert!(rule.coeff_residual(&k_left(LeftCase::II, Gradation::Homogeneous, &p).op) < 1e-15);
    }

    #[test]
    fn empty_chain_doubled_monodromy_is_k() {
        let p = params(1, Gradation::Homogeneous);
        let (l, l_hat) = l_operators(&p);
        let k = k_right(&p, KForm::Blob, Gradation::Homogeneous).op;
        assert_eq!(doubled_from_parts(0, l.op(), &k, l_hat.op()), k);
    }

    #[test]
    fn single_site_monodromy_is_l() {
        let p = params(1, Gradation::Homogeneous);
        assert!(monodromy(&p).unwrap().op().coeff_residual(l_operators(&p).0.op()) < 1e-15);
    }

    #[test]
    fn monodromy_matches_dense_product() {
        let p = params(3, Gradation::Homogeneous);
        let l = l_operators(&p).0.eval(lam());
        // L_{0a} as a dense operator on aux ⊗ (C²)^⊗3 via explicit block embedding
        let l0a = |a: usize| {
            let mut out = CMatrix::zeros(16);
            for br in 0..2 {
                for bc in 0..2 {
                    let blk = l.block(br, bc);
                    let mut e = CMatrix::zeros(2);
                    e[(br, bc)] = ONE;
                    out += &kron(&e, &embed(&blk, a, 3).unwrap());
                }
            }
            out
        };
        let dense = l0a(3).matmul(&l0a(2)).matmul(&l0a(1));
        let t = monodromy(&p).unwrap();
        assert!(rel_residual(&t.eval(lam()), &dense) < 1e-12);
        assert!(rel_residual(&monodromy_at(&p, lam()).unwrap(), &dense) < 1e-12);
    }

    #[test]
    fn doubled_numeric_and_laurent_agree() {
        for g in [Gradation::Homogeneous, Gradation::Principal] {
            let p = params(2, g);
            let t = doubled_monodromy(&p).unwrap();
            assert!(rel_residual(&t.eval(lam()), &doubled_monodromy_at(&p, lam()).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn case_one_transfer_is_weighted_diagonal() {
        let p = params(2, Gradation::Homogeneous);
        let big = doubled_monodromy(&p).unwrap();
        let t = transfer_matrix(&p, LeftCase::I).unwrap();
        let expected = big.block(0, 0).scale(p.q).add(&big.block(1, 1).scale(p.q.inv()));
        assert!(t.op.coeff_residual(&expected) < 1e-12);
    }

    #[test]
    fn gradations_give_the_same_transfer_matrix() {
        for case in LeftCase::ALL {
            let th = transfer_matrix(&params(2, Gradation::Homogeneous), case).unwrap();
            let tp = transfer_matrix(&params(2, Gradation::Principal), case).unwrap();
            assert!(th.op.coeff_residual(&tp.op) < 1e-12, "case {case}");
        }
    }

    #[test]
    fn laurent_cap_enforced() {
        let p = params(LAURENT_SITE_CAP + 1, Gradation::Homogeneous);
        assert!(matches!(monodromy(&p), Err(Error::TooManySites { .. })));
    }

    #[test]
    fn hamiltonian_routes_agree() {
        let p = params(3, Gradation::Homogeneous);
        let hd = hamiltonian(&p, HamiltonianRoute::Derivative).unwrap();
        let hb = hamiltonian(&p, HamiltonianRoute::Blob).unwrap();
        let hp = hamiltonian(&p, HamiltonianRoute::Pauli).unwrap();
        assert!(rel_residual(&hd, &hb) < 1e-9);
        assert!(rel_residual(&hb, &hp) < 1e-9);
    }

    #[test]
    fn product_rule_derivative_matches_laurent_derivative() {
        let p = params(3, Gradation::Homogeneous);
        for case in LeftCase::ALL {
            let laurent = transfer_matrix(&p, case).unwrap().op.d_lambda().eval(lam());
            let jet = transfer_derivative_at(&p, case, lam()).unwrap();
            assert!(rel_residual(&laurent, &jet) < 1e-12, "{case}");
        }
    }

    #[test]
    fn hamiltonian_singular_loci() {
        let p = ModelParams::new(0.3, 0.7, -0.35, 2, Gradation::Homogeneous).unwrap();
        match hamiltonian(&p, HamiltonianRoute::Blob) {
            Err(Error::SingularNormalization { parameter, .. }) => assert_eq!(parameter, "zeta"),
            other => panic!("expected singular normalization, got {other:?}"),
        }
        let p = ModelParams::new(std::f64::consts::FRAC_PI_2, 0.7, 0.2, 2, Gradation::Homogeneous).unwrap();
        match hamiltonian(&p, HamiltonianRoute::Pauli) {
            Err(Error::SingularNormalization { parameter, .. }) => assert_eq!(parameter, "mu"),
            other => panic!("expected singular normalization, got {other:?}"),
        }
    }
}
