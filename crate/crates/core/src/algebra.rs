//! Model parameters, the spin-1/2 evaluation representation of `U_q(ŝl₂)`,
//! coproduct towers of its Chevalley generators, and the blob algebra in the
//! XXZ representation.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{
    embed, kron, kron_all, pauli, rel_residual, scaled_residual, CMatrix, ChainOperator, I, ONE, ZERO,
};

/// Gauge convention for the spectral-parameter dependence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gradation {
    Homogeneous,
    Principal,
}

impl fmt::Display for Gradation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gradation::Homogeneous => "homogeneous",
            Gradation::Principal => "principal",
        })
    }
}

impl FromStr for Gradation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "homogeneous" | "h" => Ok(Gradation::Homogeneous),
            "principal" | "p" => Ok(Gradation::Principal),
            _ => Err(Error::Unknown {
                kind: "gradation",
                value: s.to_owned(),
            }),
        }
    }
}

/// Anisotropy, boundary parameters and chain length, with derived constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mu: f64,
    pub m: f64,
    pub zeta: f64,
    pub sites: usize,
    pub gradation: Gradation,
    /// `q = e^{iμ}`.
    pub q: Complex64,
    /// Blob parameter `Q = e^{imμ}`.
    pub q_blob: Complex64,
    /// `x₁ = −sinh(imμ)/sinh(iμ)`.
    pub x1: Complex64,
    /// `x₂ = −sinh(2iμζ)/sinh(iμ)`.
    pub x2: Complex64,
    /// Scalar part of the right boundary matrix at λ = 0.
    pub x0: Complex64,
}

/// `|sin μ|` below this is treated as degenerate.
const DEGENERATE_SIN: f64 = 1e-12;

impl ModelParams {
    pub fn new(mu: f64, m: f64, zeta: f64, sites: usize, gradation: Gradation) -> Result<Self> {
        if mu.sin().abs() < DEGENERATE_SIN || !mu.is_finite() {
            return Err(Error::DegenerateAnisotropy { mu });
        }
        if sites == 0 {
            return Err(Error::EmptyChain);
        }
        let sinh_i_mu = (I * mu).sinh();
        let x1 = -(I * (m * mu)).sinh() / sinh_i_mu;
        let x2 = -(I * (2.0 * mu * zeta)).sinh() / sinh_i_mu;
        let x0 = (I * (-m * mu / 2.0 - mu * zeta)).sinh() * (I * (-m * mu / 2.0 + mu * zeta)).cosh() * 2.0;
        Ok(Self {
            mu,
            m,
            zeta,
            sites,
            gradation,
            q: (I * mu).exp(),
            q_blob: (I * (m * mu)).exp(),
            x1,
            x2,
            x0,
        })
    }

    pub fn with_sites(&self, sites: usize) -> Result<Self> {
        Self::new(self.mu, self.m, self.zeta, sites, self.gradation)
    }

    pub fn with_gradation(&self, gradation: Gradation) -> Self {
        Self { gradation, ..*self }
    }

    pub fn with_boundary(&self, m: f64, zeta: f64) -> Result<Self> {
        Self::new(self.mu, m, zeta, self.sites, self.gradation)
    }

    /// `sinh(iμ) = i sin μ`.
    pub fn sinh_i_mu(&self) -> Complex64 {
        (I * self.mu).sinh()
    }

    /// `q^{1/2} = e^{iμ/2}`.
    pub fn q_half(&self) -> Complex64 {
        (I * (self.mu / 2.0)).exp()
    }

    /// Coefficient of `e^{±2λ}` on the right boundary diagonal, `−sinh(imμ)`.
    pub fn boundary_a(&self) -> Complex64 {
        -(I * (self.m * self.mu)).sinh()
    }

    /// Constant part of the right boundary diagonal, `sinh(2iμζ)` (enters with a minus sign).
    pub fn boundary_b(&self) -> Complex64 {
        (I * (2.0 * self.mu * self.zeta)).sinh()
    }

    /// `x_i` for charge index 1 or 2.
    pub fn x(&self, i: ChargeIndex) -> Complex64 {
        match i {
            ChargeIndex::One => self.x1,
            ChargeIndex::Two => self.x2,
        }
    }

    /// True where the Hamiltonian normalization `1/x(0)` blows up.
    pub fn x0_vanishes(&self) -> bool {
        self.x0.norm() < 1e-12
    }
}

/// Index of a boundary charge or of a Chevalley generator family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChargeIndex {
    One,
    Two,
}

impl ChargeIndex {
    pub const BOTH: [ChargeIndex; 2] = [ChargeIndex::One, ChargeIndex::Two];

    /// `η_i = (−1)^{i+1}`.
    pub fn eta(self) -> f64 {
        match self {
            ChargeIndex::One => 1.0,
            ChargeIndex::Two => -1.0,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            ChargeIndex::One => 1,
            ChargeIndex::Two => 2,
        }
    }

    pub fn k(self) -> GeneratorId {
        match self {
            ChargeIndex::One => GeneratorId::K1,
            ChargeIndex::Two => GeneratorId::K2,
        }
    }

    pub fn e(self) -> GeneratorId {
        match self {
            ChargeIndex::One => GeneratorId::E1,
            ChargeIndex::Two => GeneratorId::E2,
        }
    }

    pub fn f(self) -> GeneratorId {
        match self {
            ChargeIndex::One => GeneratorId::F1,
            ChargeIndex::Two => GeneratorId::F2,
        }
    }
}

impl fmt::Display for ChargeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Chevalley generators of `U_q(ŝl₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorId {
    K1,
    K2,
    E1,
    E2,
    F1,
    F2,
}

impl GeneratorId {
    pub const ALL: [GeneratorId; 6] = [
        GeneratorId::K1,
        GeneratorId::K2,
        GeneratorId::E1,
        GeneratorId::E2,
        GeneratorId::F1,
        GeneratorId::F2,
    ];

    pub fn index(self) -> ChargeIndex {
        match self {
            GeneratorId::K1 | GeneratorId::E1 | GeneratorId::F1 => ChargeIndex::One,
            _ => ChargeIndex::Two,
        }
    }

    pub fn is_cartan(self) -> bool {
        matches!(self, GeneratorId::K1 | GeneratorId::K2)
    }
}

impl FromStr for GeneratorId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "k1" => GeneratorId::K1,
            "k2" => GeneratorId::K2,
            "e1" => GeneratorId::E1,
            "e2" => GeneratorId::E2,
            "f1" => GeneratorId::F1,
            "f2" => GeneratorId::F2,
            _ => {
                return Err(Error::Unknown {
                    kind: "generator",
                    value: s.to_owned(),
                })
            }
        })
    }
}

/// `q^{s σᶻ}` as a 2×2 diagonal matrix.
pub fn q_power_sz(mu: f64, s: f64) -> CMatrix {
    CMatrix::diag(&[(I * (mu * s)).exp(), (I * (-mu * s)).exp()])
}

/// Evaluation representation `ρ_λ` on `ℂ²`:
/// `k₁ ↦ q^{σᶻ/2}`, `e₁ ↦ σ⁺`, `f₁ ↦ σ⁻`,
/// `k₂ ↦ q^{−σᶻ/2}`, `e₂ ↦ e^{−2λ}σ⁻`, `f₂ ↦ e^{2λ}σ⁺`.
pub fn eval_rep(g: GeneratorId, lambda: Complex64, params: &ModelParams) -> CMatrix {
    match g {
        GeneratorId::K1 => q_power_sz(params.mu, 0.5),
        GeneratorId::E1 => pauli::plus(),
        GeneratorId::F1 => pauli::minus(),
        GeneratorId::K2 => q_power_sz(params.mu, -0.5),
        GeneratorId::E2 => pauli::minus().scale((-2.0 * lambda).exp()),
        GeneratorId::F2 => pauli::plus().scale((2.0 * lambda).exp()),
    }
}

/// `ρ_λ(k_i^{-1})`.
pub fn eval_rep_k_inverse(i: ChargeIndex, params: &ModelParams) -> CMatrix {
    match i {
        ChargeIndex::One => q_power_sz(params.mu, -0.5),
        ChargeIndex::Two => q_power_sz(params.mu, 0.5),
    }
}

/// One named relation and how far the two sides are apart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationCheck {
    pub name: String,
    pub residual: f64,
}

impl RelationCheck {
    pub fn new(name: impl Into<String>, residual: f64) -> Self {
        Self {
            name: name.into(),
            residual,
        }
    }
}

pub fn max_residual(checks: &[RelationCheck]) -> f64 {
    checks.iter().map(|c| c.residual).fold(0.0, f64::max)
}

/// `[x]_q = (q^x − q^{−x})/(q − q^{−1})`.
pub fn q_number(x: f64, q: Complex64) -> Complex64 {
    (q.powf(x) - q.powf(-x)) / (q - q.inv())
}

/// Defining relations and q-Serre relations in `ρ_λ`.
pub fn verify_uq_relations(lambda: Complex64, params: &ModelParams) -> Vec<RelationCheck> {
    let rho = |g| eval_rep(g, lambda, params);
    let q = params.q;
    let cartan = |i: ChargeIndex, j: ChargeIndex| if i == j { 2.0 } else { -2.0 };
    let mut out = Vec::new();

    for i in ChargeIndex::BOTH {
        let ki = rho(i.k());
        let ki_inv = eval_rep_k_inverse(i, params);
        for j in ChargeIndex::BOTH {
            let kj = rho(j.k());
            let (ej, fj) = (rho(j.e()), rho(j.f()));
            let half = q.powf(cartan(i, j) / 2.0);
            out.push(RelationCheck::new(
                format!("k{i} k{j} = k{j} k{i}"),
                rel_residual(&ki.matmul(&kj), &kj.matmul(&ki)),
            ));
            out.push(RelationCheck::new(
                format!("k{i} e{j} = q^(a/2) e{j} k{i}"),
                rel_residual(&ki.matmul(&ej), &ej.matmul(&ki).scale(half)),
            ));
            out.push(RelationCheck::new(
                format!("k{i} f{j} = q^(-a/2) f{j} k{i}"),
                rel_residual(&ki.matmul(&fj), &fj.matmul(&ki).scale(half.inv())),
            ));
            let ei = rho(i.e());
            let rhs = if i == j {
                (&ki.matmul(&ki) - &ki_inv.matmul(&ki_inv)).scale((q - q.inv()).inv())
            } else {
                CMatrix::zeros(2)
            };
            out.push(RelationCheck::new(
                format!("[e{i}, f{j}]"),
                rel_residual(&ei.matmul(&fj), &(&fj.matmul(&ei) + &rhs)),
            ));
        }
    }

    let three = q_number(3.0, q);
    for (i, j) in [
        (ChargeIndex::One, ChargeIndex::Two),
        (ChargeIndex::Two, ChargeIndex::One),
    ] {
        for (label, xi, xj) in [("e", rho(i.e()), rho(j.e())), ("f", rho(i.f()), rho(j.f()))] {
            let x2 = xi.matmul(&xi);
            let x3 = x2.matmul(&xi);
            let terms = [
                x3.matmul(&xj),
                x2.matmul(&xj).matmul(&xi).scale(-three),
                xi.matmul(&xj).matmul(&x2).scale(three),
                xj.matmul(&x3).scale(-ONE),
            ];
            let scale: f64 = terms.iter().map(CMatrix::frobenius_norm).sum::<f64>()
                + xi.frobenius_norm().powi(3) * xj.frobenius_norm();
            let lhs = terms.iter().fold(CMatrix::zeros(2), |acc, t| &acc + t);
            out.push(RelationCheck::new(
                format!("serre {label}{i}{label}{j}"),
                scaled_residual(&lhs, &CMatrix::zeros(2), scale),
            ));
        }
    }

    // evaluation homomorphism with c = 1
    out.push(RelationCheck::new(
        "k2 = k1^-1",
        rel_residual(&rho(GeneratorId::K2), &eval_rep_k_inverse(ChargeIndex::One, params)),
    ));
    out.push(RelationCheck::new(
        "e2 = e^(-2 lambda) f1",
        rel_residual(
            &rho(GeneratorId::E2),
            &rho(GeneratorId::F1).scale((-2.0 * lambda).exp()),
        ),
    ));
    out.push(RelationCheck::new(
        "f2 = e^(2 lambda) e1",
        rel_residual(&rho(GeneratorId::F2), &rho(GeneratorId::E1).scale((2.0 * lambda).exp())),
    ));
    out
}

/// `Δ^{(N)}(g)` with `ρ₀` on every site, by the closed-form sum
/// `Δ^{(N)}(y) = Σ_a k⁻¹ ⊗ … ⊗ k⁻¹ ⊗ y_a ⊗ k ⊗ … ⊗ k`, site 1 leftmost.
pub fn coproduct_tower(g: GeneratorId, params: &ModelParams) -> ChainOperator {
    let n = params.sites;
    let zero = Complex64::new(0.0, 0.0);
    let k = eval_rep(g.index().k(), zero, params);
    if g.is_cartan() {
        return kron_all(std::iter::repeat_n(&k, n));
    }
    let k_inv = eval_rep_k_inverse(g.index(), params);
    let y = eval_rep(g, zero, params);
    let mut out = CMatrix::zeros(1 << n);
    for a in 1..=n {
        let factors: Vec<&CMatrix> = (1..=n)
            .map(|s| match s.cmp(&a) {
                std::cmp::Ordering::Less => &k_inv,
                std::cmp::Ordering::Equal => &y,
                std::cmp::Ordering::Greater => &k,
            })
            .collect();
        out += &kron_all(factors);
    }
    out
}

/// Which leg of the coproduct is expanded first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recursion {
    /// `Δ^{(N)} = (id ⊗ Δ^{(N−1)}) Δ`.
    Left,
    /// `Δ^{(N)} = (Δ^{(N−1)} ⊗ id) Δ`.
    Right,
}

/// `Δ^{(N)}(g)` built recursively from `Δ(y) = k⁻¹ ⊗ y + y ⊗ k`,
/// `Δ(k^{±1}) = k^{±1} ⊗ k^{±1}`.
pub fn coproduct_recursive(g: GeneratorId, params: &ModelParams, order: Recursion) -> ChainOperator {
    let zero = Complex64::new(0.0, 0.0);
    let k1 = eval_rep(g.index().k(), zero, params);
    let k1_inv = eval_rep_k_inverse(g.index(), params);
    let y1 = eval_rep(g, zero, params);
    let (mut k, mut k_inv, mut y) = (k1.clone(), k1_inv.clone(), y1.clone());
    for _ in 1..params.sites {
        let (nk, nk_inv, ny) = match order {
            Recursion::Left => (
                kron(&k1, &k),
                kron(&k1_inv, &k_inv),
                &kron(&k1_inv, &y) + &kron(&y1, &k),
            ),
            Recursion::Right => (
                kron(&k, &k1),
                kron(&k_inv, &k1_inv),
                &kron(&k_inv, &y1) + &kron(&y, &k1),
            ),
        };
        k = nk;
        k_inv = nk_inv;
        y = ny;
    }
    if g.is_cartan() {
        k
    } else {
        y
    }
}

/// `h(𝒰₀)` as a 2×2 matrix.
pub fn blob_u0_local(params: &ModelParams) -> CMatrix {
    let qb = params.q_blob;
    CMatrix::from_rows([[-qb, ONE], [ONE, -qb.inv()]])
}

/// `h(𝒰_l)`, `l ≥ 1`, as a 4×4 matrix on two adjacent sites.
pub fn tl_local(params: &ModelParams) -> CMatrix {
    let q = params.q;
    CMatrix::from_rows([
        [ZERO, ZERO, ZERO, ZERO],
        [ZERO, -q, ONE, ZERO],
        [ZERO, ONE, -q.inv(), ZERO],
        [ZERO, ZERO, ZERO, ZERO],
    ])
}

/// `[h(𝒰₀), h(𝒰₁), …, h(𝒰_{N−1})]` on the full chain.
pub fn blob_generators(params: &ModelParams) -> Vec<ChainOperator> {
    let n = params.sites;
    let mut out = vec![embed(&blob_u0_local(params), 1, n).expect("site 1 always fits")];
    let tl = tl_local(params);
    out.extend((1..n).map(|l| embed(&tl, l, n).expect("l + 1 <= N")));
    out
}

/// Blob algebra structure constants `(δ, δ₀, γ)`.
pub fn blob_constants(params: &ModelParams) -> (Complex64, Complex64, Complex64) {
    let (q, qb) = (params.q, params.q_blob);
    (-(q + q.inv()), -(qb + qb.inv()), q * qb + (q * qb).inv())
}

/// Defining relations of `b_N(q, Q)` in the XXZ representation.
pub fn verify_blob_relations(params: &ModelParams) -> Vec<RelationCheck> {
    let u = blob_generators(params);
    let (delta, delta0, gamma) = blob_constants(params);
    let n = u.len();
    let mut out = vec![RelationCheck::new(
        "U0 U0 = delta0 U0",
        rel_residual(&u[0].matmul(&u[0]), &u[0].scale(delta0)),
    )];
    for l in 1..n {
        out.push(RelationCheck::new(
            format!("U{l} U{l} = delta U{l}"),
            rel_residual(&u[l].matmul(&u[l]), &u[l].scale(delta)),
        ));
        if l + 1 < n {
            let (a, b) = (&u[l], &u[l + 1]);
            out.push(RelationCheck::new(
                format!("U{} U{l} U{} = U{}", l + 1, l + 1, l + 1),
                rel_residual(&b.matmul(a).matmul(b), b),
            ));
            out.push(RelationCheck::new(
                format!("U{l} U{} U{l} = U{l}", l + 1),
                rel_residual(&a.matmul(b).matmul(a), a),
            ));
        }
    }
    if n >= 2 {
        out.push(RelationCheck::new(
            "U1 U0 U1 = gamma U1",
            rel_residual(&u[1].matmul(&u[0]).matmul(&u[1]), &u[1].scale(gamma)),
        ));
    }
    for l in 0..n {
        for k in l + 2..n {
            out.push(RelationCheck::new(
                format!("[U{l}, U{k}] = 0"),
                rel_residual(&u[l].matmul(&u[k]), &u[k].matmul(&u[l])),
            ));
        }
    }
    out
}
