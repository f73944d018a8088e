//! SU(2): irreducible representations on homogeneous polynomials, the torus path s_φ,
//! the operators F_π, Haar quadrature in Euler angles, ∂_φ and the derivation D♭ on
//! trigonometric polynomials.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::factorial;
use crate::linalg::{nuclear_norm, operator_norm};
use crate::quadrature::{gauss_legendre, IntegralResult};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Largest block size supported by the polynomial realization.
pub const MAX_IRREP: usize = 16;

/// A unit quaternion w + xi + yj + zk, acting as [[w+ix, y+iz], [−y+iz, w−ix]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SU2Element {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SU2Element {
    /// Normalizes (w, x, y, z); the zero quaternion is rejected.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let r = (w * w + x * x + y * y + z * z).sqrt();
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain("quaternion must be non-zero and finite".into()));
        }
        Ok(SU2Element { w: w / r, x: x / r, y: y / r, z: z / r })
    }

    pub fn identity() -> Self {
        SU2Element { w: 1.0, x: 0.0, y: 0.0, z: 0.0 }
    }

    /// s_φ = diag(e^{iφ/2}, e^{−iφ/2}).
    pub fn torus(phi: f64) -> Self {
        SU2Element { w: (0.5 * phi).cos(), x: (0.5 * phi).sin(), y: 0.0, z: 0.0 }
    }

    pub fn matrix(&self) -> Matrix2<C64> {
        Matrix2::new(
            C64::new(self.w, self.x),
            C64::new(self.y, self.z),
            C64::new(-self.y, self.z),
            C64::new(self.w, -self.x),
        )
    }

    /// Reads the quaternion off the first row of an SU(2) matrix.
    pub fn from_matrix(m: &Matrix2<C64>) -> Self {
        SU2Element { w: m[(0, 0)].re, x: m[(0, 0)].im, y: m[(0, 1)].re, z: m[(0, 1)].im }
    }

    pub fn mul(&self, o: &SU2Element) -> SU2Element {
        SU2Element::from_matrix(&(self.matrix() * o.matrix()))
    }

    pub fn inverse(&self) -> SU2Element {
        SU2Element { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// R_z(α)R_y(β)R_z(γ) with R_z(φ) = diag(e^{−iφ/2}, e^{iφ/2}) and
    /// R_y(β) = [[cos β/2, −sin β/2], [sin β/2, cos β/2]].
    pub fn from_euler(alpha: f64, beta: f64, gamma: f64) -> Self {
        let (c, s) = ((0.5 * beta).cos(), (0.5 * beta).sin());
        let m = Matrix2::new(
            C64::from_polar(c, -0.5 * (alpha + gamma)),
            C64::from_polar(-s, -0.5 * (alpha - gamma)),
            C64::from_polar(s, 0.5 * (alpha - gamma)),
            C64::from_polar(c, 0.5 * (alpha + gamma)),
        );
        SU2Element::from_matrix(&m)
    }

    /// Euler angles with α ∈ [0, 2π), β ∈ [0, π], γ ∈ [0, 4π).
    pub fn to_euler(&self) -> (f64, f64, f64) {
        let m = self.matrix();
        let c = m[(0, 0)].norm();
        let s = m[(1, 0)].norm();
        let beta = 2.0 * s.atan2(c);
        let sum = if c > 0.0 { -2.0 * m[(0, 0)].arg() } else { 0.0 };
        let diff = if s > 0.0 { 2.0 * m[(1, 0)].arg() } else { 0.0 };
        let mut alpha = 0.5 * (sum + diff);
        let mut gamma = 0.5 * (sum - diff);
        // (α, γ) and (α + 2π, γ + 2π) give the same element.
        let k = (alpha / (2.0 * PI)).floor();
        alpha -= 2.0 * PI * k;
        gamma -= 2.0 * PI * k;
        (alpha, beta, gamma.rem_euclid(4.0 * PI))
    }
}

/// D_n(g) on homogeneous polynomials of degree n with orthonormal basis
/// e_i = x^{n−i}y^i/√((n−i)! i!), acting by (π(U)P)(v) = P(vU). The basis has
/// weights k = n − 2i under s_φ.
pub fn wigner_d(n: usize, g: &SU2Element) -> DMatrix<C64> {
    assert!(n <= MAX_IRREP, "irreps above {MAX_IRREP} are not supported");
    let u = g.matrix();
    // x ↦ u00·x + u10·y, y ↦ u01·x + u11·y.
    let (a, b, c, d) = (u[(0, 0)], u[(1, 0)], u[(0, 1)], u[(1, 1)]);
    let fact: Vec<f64> = (0..=n).map(factorial).collect();
    let binom = |m: usize, k: usize| fact[m] / (fact[k] * fact[m - k]);
    let mut out = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        let p = n - i;
        // (a x + b y)^p (c x + d y)^i = Σ_{r,t} C(p,r)C(i,t) a^r b^{p−r} c^t d^{i−t} x^{r+t} y^{n−r−t}.
        for r in 0..=p {
            for t in 0..=i {
                let coef = binom(p, r) * binom(i, t);
                let v = coef * a.powu(r as u32) * b.powu((p - r) as u32) * c.powu(t as u32) * d.powu((i - t) as u32);
                let row = n - (r + t);
                out[(row, i)] += v;
            }
        }
        for row in 0..=n {
            let scale = (fact[n - row] * fact[row]).sqrt() / (fact[p] * fact[i]).sqrt();
            out[(row, i)] *= scale;
        }
    }
    out
}

/// F_π = d/dφ π(s_φ)|_{φ=0} = diag(ik/2), k = n, n−2, …, −n.
pub fn f_pi(n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n + 1, n + 1, |i, j| {
        if i == j {
            C64::new(0.0, 0.5 * (n as f64 - 2.0 * i as f64))
        } else {
            ZERO
        }
    })
}

/// ‖F_π‖/dim π by singular values, and the closed form n/(2n+2).
pub fn f_pi_ratio(n: usize) -> (f64, f64) {
    (operator_norm(&f_pi(n)) / (n + 1) as f64, n as f64 / (2.0 * n as f64 + 2.0))
}

/// Normalized Haar integral in Euler angles: trapezoid in α ∈ [0,2π) and γ ∈ [0,4π),
/// Gauss–Legendre in cos β. Exact for polynomials of total degree ≤ `degree` in the
/// matrix entries and their conjugates. The error estimate compares with the rule
/// for degree + 2.
pub fn haar_integrate_su2<F: Fn(&SU2Element) -> C64>(f: F, degree: usize) -> IntegralResult {
    let rule = |deg: usize| -> C64 {
        let periodic = deg + 1;
        let gl = gauss_legendre(deg / 4 + 2);
        let mut total = ZERO;
        for (t, wt) in gl.nodes.iter().zip(&gl.weights) {
            let beta = t.clamp(-1.0, 1.0).acos();
            let mut inner = ZERO;
            for ia in 0..periodic {
                let alpha = 2.0 * PI * ia as f64 / periodic as f64;
                for ig in 0..periodic {
                    let gamma = 4.0 * PI * ig as f64 / periodic as f64;
                    inner += f(&SU2Element::from_euler(alpha, beta, gamma));
                }
            }
            total += inner * (0.5 * wt);
        }
        total / (periodic * periodic) as f64
    };
    let value = rule(degree);
    let check = rule(degree + 2);
    IntegralResult {
        value,
        error_estimate: (value - check).norm(),
        tail_bound: 0.0,
        panels_used: 1,
    }
}

/// weight·⟨D_n(g)ξ, η⟩.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub n: usize,
    pub xi: Vec<C64>,
    pub eta: Vec<C64>,
    pub weight: C64,
}

impl TrigTerm {
    pub fn new(n: usize, xi: Vec<C64>, eta: Vec<C64>, weight: C64) -> Result<Self> {
        if n > MAX_IRREP {
            return Err(Error::Domain(format!("irrep {n} exceeds the supported maximum {MAX_IRREP}")));
        }
        if xi.len() != n + 1 || eta.len() != n + 1 {
            return Err(Error::Domain(format!("vectors for D_{n} need length {}", n + 1)));
        }
        Ok(TrigTerm { n, xi, eta, weight })
    }

    pub fn eval_matrix(&self, d: &DMatrix<C64>) -> C64 {
        let xi = DVector::from_column_slice(&self.xi);
        let eta = DVector::from_column_slice(&self.eta);
        self.weight * eta.dotc(&(d * xi))
    }

    pub fn eval(&self, g: &SU2Element) -> C64 {
        self.eval_matrix(&wigner_d(self.n, g))
    }

    /// conj⟨D(g)ξ, η⟩ = ⟨D(g)J^Hξ̄, J^Hη̄⟩ with J = D(σ), σ = [[0,1],[−1,0]], since
    /// conj(D(g)) = J·D(g)·J^H.
    pub fn conj(&self) -> TrigTerm {
        let j = wigner_d(self.n, &SU2Element { w: 0.0, x: 0.0, y: 1.0, z: 0.0 });
        let jh = j.adjoint();
        let map = |v: &[C64]| -> Vec<C64> {
            let v = DVector::from_iterator(v.len(), v.iter().map(|z| z.conj()));
            (&jh * v).iter().copied().collect()
        };
        TrigTerm { n: self.n, xi: map(&self.xi), eta: map(&self.eta), weight: self.weight.conj() }
    }
}

/// A finite sum of matrix coefficients of irreducible representations.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrigPoly {
    pub terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        TrigPoly { terms }
    }

    pub fn max_n(&self) -> usize {
        self.terms.iter().map(|t| t.n).max().unwrap_or(0)
    }

    pub fn eval(&self, g: &SU2Element) -> C64 {
        let mut cache: BTreeMap<usize, DMatrix<C64>> = BTreeMap::new();
        self.terms
            .iter()
            .map(|t| t.eval_matrix(cache.entry(t.n).or_insert_with(|| wigner_d(t.n, g))))
            .sum()
    }

    pub fn conj(&self) -> TrigPoly {
        TrigPoly { terms: self.terms.iter().map(TrigTerm::conj).collect() }
    }

    /// The operator Σ wᵢ|ξᵢ⟩⟨ηᵢ| of each block.
    pub fn blocks(&self) -> BTreeMap<usize, DMatrix<C64>> {
        let mut out: BTreeMap<usize, DMatrix<C64>> = BTreeMap::new();
        for t in &self.terms {
            let xi = DVector::from_column_slice(&t.xi);
            let eta = DVector::from_column_slice(&t.eta);
            let m = out.entry(t.n).or_insert_with(|| DMatrix::zeros(t.n + 1, t.n + 1));
            *m += xi * eta.adjoint() * t.weight;
        }
        out
    }
}

/// ∂_φ f(g) = d/dφ f(g·s_φ)|_{φ=0}: replaces each ξ by F_π ξ.
pub fn partial_phi(f: &TrigPoly) -> TrigPoly {
    TrigPoly {
        terms: f
            .terms
            .iter()
            .map(|t| {
                let xi = &f_pi(t.n) * DVector::from_column_slice(&t.xi);
                TrigTerm { n: t.n, xi: xi.iter().copied().collect(), eta: t.eta.clone(), weight: t.weight }
            })
            .collect(),
    }
}

/// ‖f‖_A = Σ_n ‖Σ wᵢ|ξᵢ⟩⟨ηᵢ|‖₁ over the blocks.
pub fn a_norm_su2(f: &TrigPoly) -> f64 {
    f.blocks().values().map(nuclear_norm).sum()
}

/// D♭(f, g) = ∫ (∂_φ f)·g dμ by Haar quadrature.
pub fn d_flat_su2(f: &TrigPoly, g: &TrigPoly) -> IntegralResult {
    let df = partial_phi(f);
    haar_integrate_su2(|x| df.eval(x) * g.eval(x), f.max_n() + g.max_n())
}

/// ∫ ⟨D_n ξ₁,η₁⟩·conj⟨D_m ξ₂,η₂⟩ dμ by quadrature, and the value
/// δ_{nm}·⟨ξ₁,ξ₂⟩⟨η₂,η₁⟩/(n+1) predicted by Schur orthogonality.
pub fn schur_check(a: &TrigTerm, b: &TrigTerm) -> (IntegralResult, C64) {
    let q = haar_integrate_su2(|g| a.eval(g) * b.eval(g).conj(), a.n + b.n);
    let want = if a.n == b.n {
        let dot = |u: &[C64], v: &[C64]| -> C64 { u.iter().zip(v).map(|(x, y)| x * y.conj()).sum() };
        a.weight * b.weight.conj() * dot(&a.xi, &b.xi) * dot(&b.eta, &a.eta) / (a.n + 1) as f64
    } else {
        ZERO
    };
    (q, want)
}

/// A random complex vector with entries of modulus ≤ 1.
pub fn random_vector<R: rand::Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<C64> {
    (0..len)
        .map(|_| C64::from_polar(rng.gen_range(0.0..=1.0), rng.gen_range(0.0..2.0 * PI)))
        .collect()
}

/// 1–3 random terms with n ≤ max_n.
pub fn random_trig_poly<R: rand::Rng + ?Sized>(rng: &mut R, max_n: usize) -> TrigPoly {
    let count = rng.gen_range(1..=3);
    let terms = (0..count)
        .map(|_| {
            let n = rng.gen_range(0..=max_n);
            let w = C64::from_polar(rng.gen_range(0.5..=1.5), rng.gen_range(0.0..2.0 * PI));
            TrigTerm { n, xi: random_vector(rng, n + 1), eta: random_vector(rng, n + 1), weight: w }
        })
        .collect();
    TrigPoly { terms }
}
