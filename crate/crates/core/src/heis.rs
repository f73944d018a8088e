//! The reduced Heisenberg group ℍ_r = ℝ² × 𝕋: Schrödinger representations σₙ, the
//! representation λ₀ = λ_{ℝ²}∘Q, L² inner products, ∂_θ, the derivation D♭ and the
//! ℓ¹ norm over n.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::axb::DerivationResiduals;
use crate::error::{Error, Result};
use crate::funcexpr::{inner_product_with, DomainTag, FuncExpr, Measure, PlaneFunc, TensorTerm};
use crate::interval::{self, Interval};
use crate::jet::Jet;
use crate::linalg::trace_norm;
use crate::quadrature::{
    integrate_heis_haar, integrate_interval, integrate_slice, theta_character_sum, HeisIntegrand,
    IntegralResult, Kernel, Monomial, QuadConfig, SliceFactor, SliceIntegral,
};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

/// (p, q, e^{2πiθ}) with θ taken mod 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeisElement {
    pub p: f64,
    pub q: f64,
    pub theta: f64,
}

impl HeisElement {
    pub fn new(p: f64, q: f64, theta: f64) -> Self {
        HeisElement {
            p,
            q,
            theta: theta.rem_euclid(1.0),
        }
    }

    pub fn identity() -> Self {
        HeisElement {
            p: 0.0,
            q: 0.0,
            theta: 0.0,
        }
    }

    pub fn mul(&self, o: &HeisElement) -> HeisElement {
        HeisElement::new(
            self.p + o.p,
            self.q + o.q,
            self.theta + o.theta + 0.5 * (self.p * o.q - self.q * o.p),
        )
    }

    pub fn inverse(&self) -> HeisElement {
        HeisElement::new(-self.p, -self.q, -self.theta)
    }

    /// Distance to `o` with θ compared on the circle.
    pub fn dist(&self, o: &HeisElement) -> f64 {
        let dt = (self.theta - o.theta).rem_euclid(1.0);
        (self.p - o.p)
            .abs()
            .max((self.q - o.q).abs())
            .max(dt.min(1.0 - dt))
    }
}

/// σₙ(p,q,θ)ξ(x) = e^{2πinq(−x+p/2)} e^{2πinθ} ξ(x − p).
pub fn sch_apply(n: i64, g: &HeisElement, xi: &FuncExpr) -> Result<FuncExpr> {
    if n == 0 {
        return Err(Error::Domain(
            "σ₀ is not a Schrödinger representation".into(),
        ));
    }
    let nf = n as f64;
    Ok(xi
        .clone()
        .shift(g.p)
        .modulate(-nf * g.q)
        .scale(cis(2.0 * PI * nf * (0.5 * g.q * g.p + g.theta))))
}

/// weight·(ξ ∗_{σₙ} η).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchCoeffTerm {
    pub n: i64,
    pub xi: FuncExpr,
    pub eta: FuncExpr,
    pub weight: C64,
}

fn line(f: FuncExpr) -> Result<FuncExpr> {
    match f.domain() {
        DomainTag::Line => Ok(f),
        _ => f.with_domain(DomainTag::Line),
    }
}

impl SchCoeffTerm {
    pub fn new(n: i64, xi: FuncExpr, eta: FuncExpr, weight: C64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("Schrödinger terms need n ≠ 0".into()));
        }
        Ok(SchCoeffTerm {
            n,
            xi: line(xi)?,
            eta: line(eta)?,
            weight,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.weight == ZERO || self.xi.is_zero() || self.eta.is_zero()
    }

    /// conj(ξ∗_{σₙ}η) = ξ̄ ∗_{σ₋ₙ} η̄.
    pub fn conj(&self) -> SchCoeffTerm {
        SchCoeffTerm {
            n: -self.n,
            xi: self.xi.clone().conj(),
            eta: self.eta.clone().conj(),
            weight: self.weight.conj(),
        }
    }

    pub fn scaled(&self, c: C64) -> SchCoeffTerm {
        SchCoeffTerm {
            weight: self.weight * c,
            ..self.clone()
        }
    }

    /// {p : the coefficient does not vanish identically at p} = supp η − supp ξ.
    pub fn p_support(&self) -> Vec<Interval> {
        if self.is_zero() {
            return Vec::new();
        }
        minkowski(&self.eta.support(), &self.xi.support())
    }

    fn kernel(&self, p: f64) -> SchKernel<'_> {
        SchKernel { term: self, p }
    }
}

fn minkowski(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            out.push(x.minus(y));
        }
    }
    interval::normalize(out)
}

/// t ↦ weight·ξ(t − p/2)·conj(η(t + p/2)); the coefficient is e^{2πinθ}·ℱ(h_p)(nq).
struct SchKernel<'a> {
    term: &'a SchCoeffTerm,
    p: f64,
}

impl Kernel for SchKernel<'_> {
    fn support(&self) -> Vec<Interval> {
        if self.term.weight == ZERO {
            return Vec::new();
        }
        let h = 0.5 * self.p;
        let xs: Vec<Interval> = self
            .term
            .xi
            .support()
            .iter()
            .map(|iv| iv.shift(h))
            .collect();
        let es: Vec<Interval> = self
            .term
            .eta
            .support()
            .iter()
            .map(|iv| iv.shift(-h))
            .collect();
        interval::intersect(&xs, &es)
    }

    fn feature(&self) -> f64 {
        self.term
            .xi
            .feature_scale()
            .min(self.term.eta.feature_scale())
    }

    fn eval(&self, t: f64) -> C64 {
        let h = 0.5 * self.p;
        let x = self.term.xi.eval(t - h);
        if x == ZERO {
            return ZERO;
        }
        self.term.weight * x * self.term.eta.eval(t + h).conj()
    }

    fn jet(&self, t: f64, len: usize) -> Jet {
        let h = 0.5 * self.p;
        let x = self.term.xi.eval_jet(t - h, len);
        if x.is_zero() {
            return x;
        }
        x.mul(&self.term.eta.eval_jet(t + h, len).conj())
            .scale(self.term.weight)
    }
}

/// Value of weight·(ξ∗_{σₙ}η)(g) = weight·e^{2πinθ}·ℱ(₋_{p/2}ξ · _{p/2}η̄)(nq).
pub fn sch_coeff_eval_with(
    term: &SchCoeffTerm,
    g: &HeisElement,
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    let mut out = IntegralResult::zero();
    if term.is_zero() {
        return Ok(out);
    }
    let k = term.kernel(g.p);
    let y = term.n as f64 * g.q;
    let osc = y.abs() + term.xi.max_frequency() + term.eta.max_frequency();
    for iv in k.support() {
        let r = integrate_interval(|t| k.eval(t) * cis(-2.0 * PI * y * t), iv, cfg, osc)?;
        out.value += r.value;
        out.error_estimate += r.error_estimate;
        out.panels_used += r.panels_used;
    }
    let phase = cis(2.0 * PI * term.n as f64 * g.theta);
    out.value *= phase;
    Ok(out)
}

pub fn sch_coeff_eval(term: &SchCoeffTerm, g: &HeisElement) -> Result<C64> {
    Ok(sch_coeff_eval_with(term, g, &QuadConfig::precise())?.value)
}

/// Second path: weight·⟨σₙ(g)ξ, η⟩_{L²(ℝ)}.
pub fn sch_coeff_eval_inner(term: &SchCoeffTerm, g: &HeisElement) -> Result<C64> {
    if term.is_zero() {
        return Ok(ZERO);
    }
    let v = sch_apply(term.n, g, &term.xi)?;
    Ok(term.weight
        * inner_product_with(&v, &term.eta, Measure::LebesgueLine, &QuadConfig::precise())?)
}

/// ∫ f(x − s)·conj(g(x)) dx.
fn correlate(f: &FuncExpr, g: &FuncExpr, s: f64) -> Result<C64> {
    inner_product_with(
        &f.clone().shift(s),
        g,
        Measure::LebesgueLine,
        &QuadConfig::precise(),
    )
}

/// weight·(ξ ∗_{λ₀} η) for ξ, η in L²(ℝ²); constant in θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lambda0CoeffTerm {
    pub xi: PlaneFunc,
    pub eta: PlaneFunc,
    pub weight: C64,
}

impl Lambda0CoeffTerm {
    pub fn new(xi: PlaneFunc, eta: PlaneFunc, weight: C64) -> Self {
        Lambda0CoeffTerm { xi, eta, weight }
    }

    pub fn is_zero(&self) -> bool {
        self.weight == ZERO || self.xi.is_zero() || self.eta.is_zero()
    }

    pub fn conj(&self) -> Lambda0CoeffTerm {
        Lambda0CoeffTerm {
            xi: self.xi.conj(),
            eta: self.eta.conj(),
            weight: self.weight.conj(),
        }
    }

    pub fn scaled(&self, c: C64) -> Lambda0CoeffTerm {
        Lambda0CoeffTerm {
            weight: self.weight * c,
            ..self.clone()
        }
    }

    pub fn p_support(&self) -> Vec<Interval> {
        if self.is_zero() {
            return Vec::new();
        }
        minkowski(&self.eta.support_x(), &self.xi.support_x())
    }

    pub fn q_support(&self) -> Vec<Interval> {
        if self.is_zero() {
            return Vec::new();
        }
        minkowski(&self.eta.support_y(), &self.xi.support_y())
    }

    fn pairs(&self) -> impl Iterator<Item = (C64, &TensorTerm, &TensorTerm)> {
        self.xi.terms.iter().flat_map(move |s| {
            self.eta
                .terms
                .iter()
                .map(move |e| (self.weight * s.weight * e.weight.conj(), s, e))
                .filter(|(w, _, _)| *w != ZERO)
        })
    }
}

/// weight·⟨λ_{ℝ²}(p,q)ξ, η⟩ = weight·∫∫ ξ(x−p, y−q)·conj(η(x,y)) dx dy.
pub fn lambda0_coeff_eval(term: &Lambda0CoeffTerm, g: &HeisElement) -> Result<C64> {
    if term.is_zero() {
        return Ok(ZERO);
    }
    Ok(term.weight * term.xi.translate(g.p, g.q).inner_product(&term.eta)?)
}

/// An element of V: a finite sum of σₙ and λ₀ coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HrElem {
    pub sch_terms: Vec<SchCoeffTerm>,
    pub zero_terms: Vec<Lambda0CoeffTerm>,
}

impl HrElem {
    pub fn new(sch_terms: Vec<SchCoeffTerm>, zero_terms: Vec<Lambda0CoeffTerm>) -> Self {
        HrElem {
            sch_terms,
            zero_terms,
        }
    }

    pub fn sch(term: SchCoeffTerm) -> Self {
        HrElem {
            sch_terms: vec![term],
            zero_terms: Vec::new(),
        }
    }

    pub fn lambda0(term: Lambda0CoeffTerm) -> Self {
        HrElem {
            sch_terms: Vec::new(),
            zero_terms: vec![term],
        }
    }

    pub fn conj(&self) -> HrElem {
        HrElem {
            sch_terms: self.sch_terms.iter().map(SchCoeffTerm::conj).collect(),
            zero_terms: self.zero_terms.iter().map(Lambda0CoeffTerm::conj).collect(),
        }
    }

    pub fn eval(&self, g: &HeisElement) -> Result<C64> {
        let mut v = ZERO;
        for t in &self.sch_terms {
            v += sch_coeff_eval(t, g)?;
        }
        for t in &self.zero_terms {
            v += lambda0_coeff_eval(t, g)?;
        }
        Ok(v)
    }

    fn vterms(&self) -> Vec<VTerm> {
        self.sch_terms
            .iter()
            .cloned()
            .map(VTerm::Sch)
            .chain(self.zero_terms.iter().cloned().map(VTerm::Zero))
            .collect()
    }
}

/// ∂_θ: multiplies σₙ terms by n and kills λ₀ terms.
pub fn dtheta(x: &HrElem) -> HrElem {
    HrElem {
        sch_terms: x
            .sch_terms
            .iter()
            .map(|t| t.scaled(C64::new(t.n as f64, 0.0)))
            .collect(),
        zero_terms: Vec::new(),
    }
}

/// A single coefficient term of V.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VTerm {
    Sch(SchCoeffTerm),
    Zero(Lambda0CoeffTerm),
}

impl VTerm {
    pub fn conj(&self) -> VTerm {
        match self {
            VTerm::Sch(t) => VTerm::Sch(t.conj()),
            VTerm::Zero(t) => VTerm::Zero(t.conj()),
        }
    }

    pub fn eval(&self, g: &HeisElement) -> Result<C64> {
        match self {
            VTerm::Sch(t) => sch_coeff_eval(t, g),
            VTerm::Zero(t) => lambda0_coeff_eval(t, g),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            VTerm::Sch(t) => t.is_zero(),
            VTerm::Zero(t) => t.is_zero(),
        }
    }

    /// Central character: the coefficient transforms by e^{2πi·n·θ}.
    pub fn character(&self) -> i64 {
        match self {
            VTerm::Sch(t) => t.n,
            VTerm::Zero(_) => 0,
        }
    }

    fn p_support(&self) -> Vec<Interval> {
        match self {
            VTerm::Sch(t) => t.p_support(),
            VTerm::Zero(t) => t.p_support(),
        }
    }
}

/// weight·Π factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisAlgebraTerm {
    pub weight: C64,
    pub factors: Vec<VTerm>,
}

/// Finite sums of products of V-terms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HeisAlgebra {
    pub terms: Vec<HeisAlgebraTerm>,
}

impl From<&HrElem> for HeisAlgebra {
    fn from(x: &HrElem) -> Self {
        HeisAlgebra {
            terms: x
                .vterms()
                .into_iter()
                .map(|t| HeisAlgebraTerm {
                    weight: ONE,
                    factors: vec![t],
                })
                .collect(),
        }
    }
}

impl From<HrElem> for HeisAlgebra {
    fn from(x: HrElem) -> Self {
        HeisAlgebra::from(&x)
    }
}

impl HeisAlgebra {
    pub fn mul(&self, o: &HeisAlgebra) -> HeisAlgebra {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for s in &self.terms {
            for t in &o.terms {
                let mut factors = s.factors.clone();
                factors.extend(t.factors.iter().cloned());
                terms.push(HeisAlgebraTerm {
                    weight: s.weight * t.weight,
                    factors,
                });
            }
        }
        HeisAlgebra { terms }
    }

    pub fn conj(&self) -> HeisAlgebra {
        HeisAlgebra {
            terms: self
                .terms
                .iter()
                .map(|t| HeisAlgebraTerm {
                    weight: t.weight.conj(),
                    factors: t.factors.iter().map(VTerm::conj).collect(),
                })
                .collect(),
        }
    }

    pub fn eval(&self, g: &HeisElement) -> Result<C64> {
        let mut total = ZERO;
        for t in &self.terms {
            let mut p = t.weight;
            for f in &t.factors {
                p *= f.eval(g)?;
            }
            total += p;
        }
        Ok(total)
    }

    /// The single-factor terms as an element of V, if every term is one.
    pub fn as_hr_elem(&self) -> Option<HrElem> {
        let mut out = HrElem::default();
        for t in &self.terms {
            if t.factors.len() != 1 {
                return None;
            }
            match &t.factors[0] {
                VTerm::Sch(s) => out.sch_terms.push(s.scaled(t.weight)),
                VTerm::Zero(z) => out.zero_terms.push(z.scaled(t.weight)),
            }
        }
        Some(out)
    }

    /// ∂_θ by the product rule. Every factor is a θ-character, so a product of
    /// characters n₁…n_k picks up the factor n₁ + … + n_k.
    pub fn dtheta(&self) -> HeisAlgebra {
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                let n: i64 = t.factors.iter().map(VTerm::character).sum();
                (n != 0).then(|| HeisAlgebraTerm {
                    weight: t.weight * n as f64,
                    factors: t.factors.clone(),
                })
            })
            .collect();
        HeisAlgebra { terms }
    }
}

/// A V-term entering a Haar integrand, possibly conjugated.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisFactor {
    pub term: VTerm,
    pub conj: bool,
}

impl HeisFactor {
    fn character(&self) -> i64 {
        let n = self.term.character();
        if self.conj {
            -n
        } else {
            n
        }
    }
}

/// Σ_m w_m Π_{j∈m} factors[j] on ℍ_r.
#[derive(Debug, Clone, Default)]
pub struct HeisIntegrandSum {
    factors: Vec<HeisFactor>,
    monomials: Vec<Monomial>,
}

/// λ₀ factor prepared at fixed p: q ↦ Σ c_k·∫ ξ_k(y − q)·conj(η_k(y)) dy.
struct ZeroSlice<'a> {
    parts: Vec<(C64, &'a FuncExpr, &'a FuncExpr)>,
    conj: bool,
}

impl ZeroSlice<'_> {
    /// Values at q = k·dx. Each correlation is the trapezoid rule on the same grid, so
    /// it reduces to a discrete correlation of samples.
    fn sample(&self, k_lo: i64, k_hi: i64, dx: f64) -> Vec<C64> {
        let mut out = vec![ZERO; (k_hi - k_lo + 1) as usize];
        for (c, f, g) in &self.parts {
            let (Some(sf), Some(sg)) = (interval::hull(&f.support()), interval::hull(&g.support()))
            else {
                continue;
            };
            let grid = |iv: Interval, h: &FuncExpr| -> (i64, Vec<C64>) {
                let lo = (iv.lo / dx).ceil() as i64;
                let hi = (iv.hi / dx).floor() as i64;
                (lo, (lo..=hi).map(|m| h.eval(m as f64 * dx)).collect())
            };
            let (f0, fv) = grid(sf, f);
            let (g0, gv) = grid(sg, g);
            let gv: Vec<C64> = gv.iter().map(|v| v.conj()).collect();
            for (i, slot) in out.iter_mut().enumerate() {
                let k = k_lo + i as i64;
                // Σ_m f((m − k)dx)·ḡ(m dx) with m − k ∈ [f0, f0 + |fv|) and m ∈ [g0, g0 + |gv|).
                let m_lo = (f0 + k).max(g0);
                let m_hi = (f0 + k + fv.len() as i64).min(g0 + gv.len() as i64);
                if m_lo >= m_hi {
                    continue;
                }
                let mut acc = ZERO;
                for m in m_lo..m_hi {
                    acc += fv[(m - k - f0) as usize] * gv[(m - g0) as usize];
                }
                *slot += c * acc * dx;
            }
        }
        if self.conj {
            out.iter_mut().for_each(|v| *v = v.conj());
        }
        out
    }
}

impl HeisIntegrandSum {
    pub fn new() -> Self {
        Self::default()
    }

    fn factor(&mut self, f: HeisFactor) -> usize {
        if let Some(i) = self.factors.iter().position(|g| *g == f) {
            return i;
        }
        self.factors.push(f);
        self.factors.len() - 1
    }

    /// Adds weight·Π factors. Monomials whose total central character is non-zero
    /// integrate to zero over θ and are dropped.
    pub fn push(&mut self, weight: C64, factors: Vec<HeisFactor>) {
        if weight == ZERO || factors.is_empty() || factors.iter().any(|f| f.term.is_zero()) {
            return;
        }
        let nu: i64 = factors.iter().map(HeisFactor::character).sum();
        let nodes = factors
            .iter()
            .map(|f| f.character().unsigned_abs() as usize)
            .sum::<usize>()
            + 1;
        let c = theta_character_sum(nu, nodes);
        if c.norm() < 0.5 {
            return;
        }
        let idx = factors.into_iter().map(|f| self.factor(f)).collect();
        self.monomials.push(Monomial {
            weight: weight * c,
            factors: idx,
        });
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn p_support(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        for m in &self.monomials {
            let mut acc = self.factors[m.factors[0]].term.p_support();
            for &j in &m.factors[1..] {
                acc = interval::intersect(&acc, &self.factors[j].term.p_support());
            }
            out.extend(acc);
        }
        interval::normalize(out)
    }

    pub fn integrate(&self, cfg: &QuadConfig) -> Result<IntegralResult> {
        if self.monomials.is_empty() {
            return Ok(IntegralResult::zero());
        }
        integrate_heis_haar(self, &self.p_support(), cfg)
    }
}

impl HeisIntegrand for HeisIntegrandSum {
    fn slice(&self, p: f64, big_b: f64, _cfg: &QuadConfig) -> Result<SliceIntegral> {
        let kernels: Vec<Option<SchKernel>> = self
            .factors
            .iter()
            .map(|f| match &f.term {
                VTerm::Sch(t) => Some(t.kernel(p)),
                VTerm::Zero(_) => None,
            })
            .collect();
        let zeros: Vec<Option<(ZeroSlice, Interval, f64)>> = self
            .factors
            .iter()
            .map(|f| -> Result<_> {
                Ok(match &f.term {
                    VTerm::Sch(_) => None,
                    VTerm::Zero(t) => {
                        let mut parts: Vec<(C64, &FuncExpr, &FuncExpr)> = Vec::new();
                        for (w, s, e) in t.pairs() {
                            let c = w * correlate(&s.x, &e.x, p)?;
                            if c != ZERO {
                                parts.push((c, &s.y, &e.y));
                            }
                        }
                        let supp =
                            interval::hull(&t.q_support()).unwrap_or(Interval::new(0.0, 0.0));
                        let feature =
                            t.xi.terms
                                .iter()
                                .chain(&t.eta.terms)
                                .map(|s| s.y.feature_scale())
                                .fold(f64::INFINITY, f64::min);
                        let supp = if parts.is_empty() {
                            Interval::new(0.0, 0.0)
                        } else {
                            supp
                        };
                        Some((
                            ZeroSlice {
                                parts,
                                conj: f.conj,
                            },
                            supp,
                            feature,
                        ))
                    }
                })
            })
            .collect::<Result<_>>()?;
        type Sampler<'s> = Box<dyn Fn(i64, i64, f64) -> Vec<C64> + Sync + 's>;
        let samplers: Vec<Option<Sampler>> = zeros
            .iter()
            .map(|z| {
                z.as_ref()
                    .map(|(zs, _, _)| Box::new(move |a, b, h| zs.sample(a, b, h)) as Sampler)
            })
            .collect();
        let factors: Vec<SliceFactor> = self
            .factors
            .iter()
            .enumerate()
            .map(|(j, f)| match (&kernels[j], &zeros[j]) {
                (Some(k), _) => SliceFactor::Spectral {
                    kernel: k,
                    n: f.term.character() as f64,
                    center: 0.0,
                    dilation: 1.0,
                    conj: f.conj,
                },
                (None, Some((_, supp, feature))) => SliceFactor::Compact {
                    support: *supp,
                    feature: *feature,
                    sample: samplers[j].as_deref().expect("λ₀ factor has a sampler"),
                },
                (None, None) => unreachable!("every factor is σₙ or λ₀"),
            })
            .collect();
        Ok(integrate_slice(&factors, &self.monomials, big_b))
    }
}

/// ⟨u, w⟩_{L²(ℍ_r)} = ∫ u·conj(w) dp dq dθ.
pub fn heis_l2_inner(u: &HrElem, w: &HrElem, cfg: &QuadConfig) -> Result<IntegralResult> {
    let mut f = HeisIntegrandSum::new();
    for s in u.vterms() {
        for t in w.vterms() {
            f.push(
                ONE,
                vec![
                    HeisFactor {
                        term: s.clone(),
                        conj: false,
                    },
                    HeisFactor {
                        term: t,
                        conj: true,
                    },
                ],
            );
        }
    }
    f.integrate(cfg)
}

/// The integrand (∂_θ f)·g.
pub fn d_flat_heis_integrand(f: &HeisAlgebra, g: &HeisAlgebra) -> HeisIntegrandSum {
    let mut out = HeisIntegrandSum::new();
    for s in f.dtheta().terms {
        for t in &g.terms {
            let factors = s
                .factors
                .iter()
                .chain(&t.factors)
                .cloned()
                .map(|term| HeisFactor { term, conj: false })
                .collect();
            out.push(s.weight * t.weight, factors);
        }
    }
    out
}

/// D♭(f, g) = ∫∫∫ ∂_θ f · g dp dq dθ.
pub fn d_flat_heis(f: &HeisAlgebra, g: &HeisAlgebra, cfg: &QuadConfig) -> Result<IntegralResult> {
    d_flat_heis_integrand(f, g).integrate(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Exact,
    UpperBound,
}

/// ‖u‖_A as Σₙ (trace norm of the σₙ block) + Σ ‖λ₀ term‖. Exact without λ₀ terms.
pub fn a_norm_heis(u: &HrElem) -> Result<(f64, NormKind)> {
    let cfg = QuadConfig::precise();
    let mut blocks: BTreeMap<i64, Vec<&SchCoeffTerm>> = BTreeMap::new();
    for t in u.sch_terms.iter().filter(|t| !t.is_zero()) {
        blocks.entry(t.n).or_default().push(t);
    }
    let mut total = 0.0;
    for terms in blocks.values() {
        let n = terms.len();
        let gram = |pick: &dyn Fn(&SchCoeffTerm) -> &FuncExpr| -> Result<DMatrix<C64>> {
            let mut g = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = inner_product_with(
                        pick(terms[j]),
                        pick(terms[i]),
                        Measure::LebesgueLine,
                        &cfg,
                    )?;
                    g[(i, j)] = v;
                    g[(j, i)] = v.conj();
                }
            }
            Ok(g)
        };
        let gx = gram(&|t| &t.xi)?;
        let ge = gram(&|t| &t.eta)?;
        let w: Vec<C64> = terms.iter().map(|t| t.weight).collect();
        total += trace_norm(&w, &gx, &ge)?;
    }
    let live_zero: Vec<&Lambda0CoeffTerm> = u.zero_terms.iter().filter(|t| !t.is_zero()).collect();
    for t in &live_zero {
        total += t.weight.norm() * t.xi.norm()? * t.eta.norm()?;
    }
    let kind = if live_zero.is_empty() {
        NormKind::Exact
    } else {
        NormKind::UpperBound
    };
    Ok((total, kind))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyEstimate {
    /// ‖v‖_A‖w‖_A − |D♭(v,w)|.
    pub margin: f64,
    pub product: f64,
    pub d_flat: IntegralResult,
    pub kind: NormKind,
}

pub fn key_estimate_heis(v: &HrElem, w: &HrElem, cfg: &QuadConfig) -> Result<KeyEstimate> {
    let d = d_flat_heis(&v.into(), &w.into(), cfg)?;
    let (nv, kv) = a_norm_heis(v)?;
    let (nw, kw) = a_norm_heis(w)?;
    let kind = if kv == NormKind::Exact && kw == NormKind::Exact {
        NormKind::Exact
    } else {
        NormKind::UpperBound
    };
    Ok(KeyEstimate {
        margin: nv * nw - d.value.norm(),
        product: nv * nw,
        d_flat: d,
        kind,
    })
}

pub fn heis_derivation_residuals(
    f: &HeisAlgebra,
    g: &HeisAlgebra,
    h: &HeisAlgebra,
    cfg: &QuadConfig,
) -> Result<DerivationResiduals> {
    let fg_h = d_flat_heis(&f.mul(g), h, cfg)?;
    let g_hf = d_flat_heis(g, &h.mul(f), cfg)?;
    let f_gh = d_flat_heis(f, &g.mul(h), cfg)?;
    let d_fg = d_flat_heis(f, g, cfg)?;
    let d_gf = d_flat_heis(g, f, cfg)?;
    let all = [fg_h, g_hf, f_gh, d_fg, d_gf];
    let key_margin = match (f.as_hr_elem(), g.as_hr_elem()) {
        (Some(fs), Some(gs)) => Some(a_norm_heis(&fs)?.0 * a_norm_heis(&gs)?.0 - d_fg.value.norm()),
        _ => None,
    };
    Ok(DerivationResiduals {
        leibniz: (fg_h.value - g_hf.value - f_gh.value).norm(),
        antisym: (d_fg.value + d_gf.value).norm(),
        key_margin,
        scale: all.iter().map(|r| r.value.norm()).fold(0.0, f64::max),
        uncertainty: all.iter().map(IntegralResult::uncertainty).sum(),
    })
}

/// Random σₙ term with bump-sum vectors on the line.
pub fn random_sch_term<R: rand::Rng + ?Sized>(rng: &mut R, n: i64) -> SchCoeffTerm {
    use crate::funcexpr::random_bump_sum;
    let xi = random_bump_sum(rng, DomainTag::Line);
    let eta = random_bump_sum(rng, DomainTag::Line);
    let w = C64::from_polar(rng.gen_range(0.5..=1.5), rng.gen_range(0.0..2.0 * PI));
    SchCoeffTerm::new(n, xi, eta, w).expect("n is non-zero")
}

/// Random λ₀ term with tensor-product bump vectors.
pub fn random_lambda0_term<R: rand::Rng + ?Sized>(rng: &mut R) -> Lambda0CoeffTerm {
    use crate::funcexpr::random_bump_sum;
    let plane = |rng: &mut R| {
        PlaneFunc::tensor(
            random_bump_sum(rng, DomainTag::Line),
            random_bump_sum(rng, DomainTag::Line),
        )
    };
    let xi = plane(rng);
    let eta = plane(rng);
    let w = C64::from_polar(rng.gen_range(0.5..=1.5), rng.gen_range(0.0..2.0 * PI));
    Lambda0CoeffTerm::new(xi, eta, w)
}
