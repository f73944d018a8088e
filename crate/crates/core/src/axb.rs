//! The real ax+b group: representations π±, coefficient functions, the operator
//! M_a∂_b, L²(G) inner products, the derivation D♭ and A(G)-norms of finite sums.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcexpr::{
    fourier_transform, inner_product, inner_product_with, DomainTag, FuncExpr, Measure,
};
use crate::interval::{self, Interval};
use crate::jet::Jet;
use crate::linalg::trace_norm;
use crate::quadrature::{
    integrate_axb_haar, integrate_interval, integrate_slice, AxbIntegrand, IntegralResult, Kernel,
    Monomial, QuadConfig, SliceFactor, SliceIntegral,
};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// The affine map t ↦ a·t + b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxbElement {
    pub b: f64,
    pub a: f64,
}

impl AxbElement {
    pub fn new(b: f64, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Domain(format!(
                "({b}, {a}) is not in the ax+b group"
            )));
        }
        Ok(AxbElement { b, a })
    }

    pub fn identity() -> Self {
        AxbElement { b: 0.0, a: 1.0 }
    }

    /// (b,a)·(b',a') = (b + a·b', a·a').
    pub fn mul(&self, o: &AxbElement) -> AxbElement {
        AxbElement {
            b: self.b + self.a * o.b,
            a: self.a * o.a,
        }
    }

    pub fn inverse(&self) -> AxbElement {
        AxbElement {
            b: -self.b / self.a,
            a: 1.0 / self.a,
        }
    }

    /// Action on the line as an affine map.
    pub fn apply(&self, t: f64) -> f64 {
        self.a * t + self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxbRep {
    Plus,
    Minus,
}

impl AxbRep {
    /// Frequency sign: π±(b,a)ξ(t) = e^{∓2πibt}ξ(at) gives ξ∗η(b,a) = ℱg_a(±b).
    pub fn sign(self) -> f64 {
        match self {
            AxbRep::Plus => 1.0,
            AxbRep::Minus => -1.0,
        }
    }

    pub fn conj(self) -> AxbRep {
        match self {
            AxbRep::Plus => AxbRep::Minus,
            AxbRep::Minus => AxbRep::Plus,
        }
    }
}

/// π±(b,a)ξ = Modulate(∓b, Dilate(a, ξ)).
pub fn rep_apply(rep: AxbRep, g: &AxbElement, xi: &FuncExpr) -> FuncExpr {
    xi.clone().dilate(g.a).modulate(-rep.sign() * g.b)
}

/// weight·(ξ ∗_π η) for convenient ξ, η.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffTerm {
    pub rep: AxbRep,
    pub xi: FuncExpr,
    pub eta: FuncExpr,
    pub weight: C64,
}

fn half_line(f: FuncExpr, name: &str) -> Result<FuncExpr> {
    f.with_domain(DomainTag::HalfLine)
        .map_err(|e| Error::Domain(format!("{name} is not a convenient vector: {e}")))
}

impl CoeffTerm {
    /// Checks that ξ and η are supported in [δ, ∞) for some δ > 0.
    pub fn new(rep: AxbRep, xi: FuncExpr, eta: FuncExpr, weight: C64) -> Result<Self> {
        Ok(CoeffTerm {
            rep,
            xi: half_line(xi, "xi")?,
            eta: half_line(eta, "eta")?,
            weight,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.weight == ZERO || self.xi.is_zero() || self.eta.is_zero()
    }

    /// {a : supp(ξ)/a ∩ supp(η) ≠ ∅}.
    pub fn a_support(&self) -> Vec<Interval> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for x in self.xi.support() {
            for e in self.eta.support() {
                out.push(Interval::new(x.lo / e.hi, x.hi / e.lo));
            }
        }
        interval::normalize(out)
    }

    /// conj(ξ∗_{π±}η) = ξ̄ ∗_{π∓} η̄.
    pub fn conj(&self) -> CoeffTerm {
        CoeffTerm {
            rep: self.rep.conj(),
            xi: self.xi.clone().conj(),
            eta: self.eta.clone().conj(),
            weight: self.weight.conj(),
        }
    }

    pub fn scaled(&self, c: C64) -> CoeffTerm {
        CoeffTerm {
            weight: self.weight * c,
            ..self.clone()
        }
    }

    fn kernel(&self, a: f64) -> AxbKernel<'_> {
        AxbKernel { term: self, a }
    }

    fn oscillation(&self, g: &AxbElement) -> f64 {
        g.b.abs() + g.a * self.xi.max_frequency() + self.eta.max_frequency()
    }
}

/// s ↦ weight·ξ(a·s)·conj(η(s))/s, whose Fourier transform at ±b is the coefficient.
struct AxbKernel<'a> {
    term: &'a CoeffTerm,
    a: f64,
}

impl Kernel for AxbKernel<'_> {
    fn support(&self) -> Vec<Interval> {
        if self.term.weight == ZERO {
            return Vec::new();
        }
        let scaled: Vec<Interval> = self
            .term
            .xi
            .support()
            .iter()
            .map(|iv| iv.scale(1.0 / self.a))
            .collect();
        interval::intersect(&scaled, &self.term.eta.support())
    }

    fn feature(&self) -> f64 {
        (self.term.xi.feature_scale() / self.a).min(self.term.eta.feature_scale())
    }

    fn eval(&self, s: f64) -> C64 {
        let x = self.term.xi.eval(self.a * s);
        if x == ZERO {
            return ZERO;
        }
        self.term.weight * x * self.term.eta.eval(s).conj() / s
    }

    fn jet(&self, s: f64, len: usize) -> Jet {
        let x = self.term.xi.eval_jet(self.a * s, len).dilate(self.a);
        if x.is_zero() {
            return x;
        }
        x.mul(&self.term.eta.eval_jet(s, len).conj())
            .mul(&Jet::power(s, -1.0, len))
            .scale(self.term.weight)
    }
}

/// Value of weight·(ξ∗_π η)(g) by oscillatory quadrature of the explicit integral.
pub fn coeff_eval_with(
    term: &CoeffTerm,
    g: &AxbElement,
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    let k = term.kernel(g.a);
    let y = term.rep.sign() * g.b;
    let mut out = IntegralResult::zero();
    for iv in k.support() {
        let r = integrate_interval(
            |s| k.eval(s) * C64::from_polar(1.0, -2.0 * PI * y * s),
            iv,
            cfg,
            term.oscillation(g),
        )?;
        out.value += r.value;
        out.error_estimate += r.error_estimate;
        out.panels_used += r.panels_used;
    }
    Ok(out)
}

pub fn coeff_eval(term: &CoeffTerm, g: &AxbElement) -> Result<C64> {
    Ok(coeff_eval_with(term, g, &QuadConfig::precise())?.value)
}

/// Second path: weight·⟨π(g)ξ, η⟩_ℋ.
pub fn coeff_eval_inner(term: &CoeffTerm, g: &AxbElement) -> Result<C64> {
    if term.is_zero() {
        return Ok(ZERO);
    }
    Ok(term.weight
        * inner_product(
            &rep_apply(term.rep, g, &term.xi),
            &term.eta,
            Measure::HaarHalfLine,
        )?)
}

/// Third path: weight·ℱ(K⁻¹(ξ(a·)·η̄))(±b) assembled as an expression tree.
pub fn coeff_eval_fourier(term: &CoeffTerm, g: &AxbElement) -> Result<C64> {
    if term.is_zero() {
        return Ok(ZERO);
    }
    let ga = FuncExpr::product(vec![term.xi.clone().dilate(g.a), term.eta.clone().conj()])
        .power_weight(-1.0)?;
    Ok(term.weight * fourier_transform(&ga, term.rep.sign() * g.b, &QuadConfig::precise())?)
}

/// M_a∂_b(ξ∗_{π±}η) = ±(Kξ)∗_{π±}η with M_a∂_b = −(1/2πi)·a·∂_b.
pub fn madb(term: &CoeffTerm) -> CoeffTerm {
    CoeffTerm {
        rep: term.rep,
        xi: term
            .xi
            .clone()
            .power_weight(1.0)
            .expect("integer powers are always defined"),
        eta: term.eta.clone(),
        weight: term.weight * term.rep.sign(),
    }
}

/// A finite sum of coefficient terms (an element of 𝒞 = 𝒞₊ + 𝒞₋).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CoeffSum {
    pub terms: Vec<CoeffTerm>,
}

impl CoeffSum {
    pub fn new(terms: Vec<CoeffTerm>) -> Self {
        CoeffSum { terms }
    }

    pub fn part(&self, rep: AxbRep) -> CoeffSum {
        CoeffSum {
            terms: self
                .terms
                .iter()
                .filter(|t| t.rep == rep)
                .cloned()
                .collect(),
        }
    }

    pub fn conj(&self) -> CoeffSum {
        CoeffSum {
            terms: self.terms.iter().map(CoeffTerm::conj).collect(),
        }
    }

    pub fn eval(&self, g: &AxbElement) -> Result<C64> {
        self.terms.iter().map(|t| coeff_eval(t, g)).sum()
    }

    pub fn a_support(&self) -> Vec<Interval> {
        interval::normalize(self.terms.iter().flat_map(CoeffTerm::a_support).collect())
    }
}

/// weight·Π factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraTerm {
    pub weight: C64,
    pub factors: Vec<CoeffTerm>,
}

/// A finite sum of products of coefficient terms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AlgebraElem {
    pub terms: Vec<AlgebraTerm>,
}

impl From<&CoeffSum> for AlgebraElem {
    fn from(s: &CoeffSum) -> Self {
        AlgebraElem {
            terms: s
                .terms
                .iter()
                .map(|t| AlgebraTerm {
                    weight: ONE,
                    factors: vec![t.clone()],
                })
                .collect(),
        }
    }
}

impl From<CoeffSum> for AlgebraElem {
    fn from(s: CoeffSum) -> Self {
        AlgebraElem::from(&s)
    }
}

impl AlgebraElem {
    pub fn new(terms: Vec<AlgebraTerm>) -> Result<Self> {
        if terms.iter().any(|t| t.factors.is_empty()) {
            return Err(Error::Domain(
                "algebra terms need at least one factor".into(),
            ));
        }
        Ok(AlgebraElem { terms })
    }

    /// Pointwise product, distributed over the terms.
    pub fn mul(&self, o: &AlgebraElem) -> AlgebraElem {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for s in &self.terms {
            for t in &o.terms {
                let mut factors = s.factors.clone();
                factors.extend(t.factors.iter().cloned());
                terms.push(AlgebraTerm {
                    weight: s.weight * t.weight,
                    factors,
                });
            }
        }
        AlgebraElem { terms }
    }

    pub fn conj(&self) -> AlgebraElem {
        AlgebraElem {
            terms: self
                .terms
                .iter()
                .map(|t| AlgebraTerm {
                    weight: t.weight.conj(),
                    factors: t.factors.iter().map(CoeffTerm::conj).collect(),
                })
                .collect(),
        }
    }

    pub fn eval(&self, g: &AxbElement) -> Result<C64> {
        let mut total = ZERO;
        for t in &self.terms {
            let mut p = t.weight;
            for f in &t.factors {
                p *= coeff_eval(f, g)?;
            }
            total += p;
        }
        Ok(total)
    }

    /// Returns the sum when every term is a single weighted factor.
    pub fn as_coeff_sum(&self) -> Option<CoeffSum> {
        self.terms
            .iter()
            .map(|t| (t.factors.len() == 1).then(|| t.factors[0].scaled(t.weight)))
            .collect::<Option<Vec<_>>>()
            .map(CoeffSum::new)
    }

    /// The terms of M_a∂_b f by the Leibniz rule.
    fn madb_terms(&self) -> Vec<AlgebraTerm> {
        let mut out = Vec::new();
        for t in &self.terms {
            for i in 0..t.factors.len() {
                let mut factors = t.factors.clone();
                factors[i] = madb(&t.factors[i]);
                out.push(AlgebraTerm {
                    weight: t.weight,
                    factors,
                });
            }
        }
        out
    }
}

/// Pointwise evaluator of M_a∂_b f.
#[derive(Debug, Clone)]
pub struct MadbEvaluator {
    terms: Vec<AlgebraTerm>,
}

impl MadbEvaluator {
    pub fn eval(&self, g: &AxbElement) -> Result<C64> {
        AlgebraElem {
            terms: self.terms.clone(),
        }
        .eval(g)
    }
}

pub fn madb_algebra(f: &AlgebraElem) -> MadbEvaluator {
    MadbEvaluator {
        terms: f.madb_terms(),
    }
}

/// A coefficient term entering a Haar integrand, possibly left-translated and conjugated:
/// y ↦ [conj] c(x⁻¹y).
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffFactor {
    pub term: CoeffTerm,
    pub conj: bool,
    pub translate: Option<AxbElement>,
}

impl CoeffFactor {
    pub fn plain(term: CoeffTerm) -> Self {
        CoeffFactor {
            term,
            conj: false,
            translate: None,
        }
    }

    fn a_support(&self) -> Vec<Interval> {
        let s = self.term.a_support();
        match self.translate {
            None => s,
            Some(x) => s.iter().map(|iv| iv.scale(x.a)).collect(),
        }
    }
}

/// Σ_m w_m Π_{j∈m} factors[j] on the ax+b group.
#[derive(Debug, Clone, Default)]
pub struct CoeffIntegrand {
    factors: Vec<CoeffFactor>,
    monomials: Vec<Monomial>,
}

impl CoeffIntegrand {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of `f`, reusing an identical factor.
    pub fn factor(&mut self, f: CoeffFactor) -> usize {
        if let Some(i) = self.factors.iter().position(|g| *g == f) {
            return i;
        }
        self.factors.push(f);
        self.factors.len() - 1
    }

    pub fn push(&mut self, weight: C64, factors: Vec<CoeffFactor>) {
        if weight == ZERO || factors.iter().any(|f| f.term.is_zero()) {
            return;
        }
        let idx = factors.into_iter().map(|f| self.factor(f)).collect();
        self.monomials.push(Monomial {
            weight,
            factors: idx,
        });
    }

    pub fn a_support(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        for m in &self.monomials {
            let mut acc = self.factors[m.factors[0]].a_support();
            for &j in &m.factors[1..] {
                acc = interval::intersect(&acc, &self.factors[j].a_support());
            }
            out.extend(acc);
        }
        interval::normalize(out)
    }

    pub fn integrate(&self, cfg: &QuadConfig) -> Result<IntegralResult> {
        integrate_axb_haar(self, &self.a_support(), cfg)
    }
}

impl AxbIntegrand for CoeffIntegrand {
    fn slice(&self, a: f64, big_b: f64, _cfg: &QuadConfig) -> Result<SliceIntegral> {
        let kernels: Vec<AxbKernel> = self
            .factors
            .iter()
            .map(|f| f.term.kernel(a / f.translate.map_or(1.0, |x| x.a)))
            .collect();
        let factors: Vec<SliceFactor> = self
            .factors
            .iter()
            .zip(&kernels)
            .map(|(f, k)| SliceFactor::Spectral {
                kernel: k,
                n: f.term.rep.sign(),
                center: f.translate.map_or(0.0, |x| x.b),
                dilation: f.translate.map_or(1.0, |x| x.a),
                conj: f.conj,
            })
            .collect();
        Ok(integrate_slice(&factors, &self.monomials, big_b))
    }
}

/// ⟨u, w⟩_{L²(G)} = ∫ u·conj(w) a⁻² da db.
pub fn l2g_inner(u: &CoeffSum, w: &CoeffSum, cfg: &QuadConfig) -> Result<IntegralResult> {
    let mut f = CoeffIntegrand::new();
    for s in &u.terms {
        for t in &w.terms {
            f.push(
                ONE,
                vec![
                    CoeffFactor::plain(s.clone()),
                    CoeffFactor {
                        term: t.clone(),
                        conj: true,
                        translate: None,
                    },
                ],
            );
        }
    }
    f.integrate(cfg)
}

/// The integrand (M_a∂_b f)·g as a sum of products of coefficient terms.
pub fn d_flat_integrand(f: &AlgebraElem, g: &AlgebraElem) -> CoeffIntegrand {
    let mut out = CoeffIntegrand::new();
    for s in f.madb_terms() {
        for t in &g.terms {
            let factors = s
                .factors
                .iter()
                .chain(&t.factors)
                .cloned()
                .map(CoeffFactor::plain)
                .collect();
            out.push(s.weight * t.weight, factors);
        }
    }
    out
}

/// D♭(f, g) = ∫_G (M_a∂_b f)·g dμ.
pub fn d_flat(f: &AlgebraElem, g: &AlgebraElem, cfg: &QuadConfig) -> Result<IntegralResult> {
    d_flat_integrand(f, g).integrate(cfg)
}

fn sign_part_norm(terms: &[&CoeffTerm], cfg: &QuadConfig) -> Result<f64> {
    let terms: Vec<&CoeffTerm> = terms.iter().copied().filter(|t| !t.is_zero()).collect();
    let n = terms.len();
    if n == 0 {
        return Ok(0.0);
    }
    let gram = |pick: &dyn Fn(&CoeffTerm) -> &FuncExpr| -> Result<DMatrix<C64>> {
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v =
                    inner_product_with(pick(terms[j]), pick(terms[i]), Measure::HaarHalfLine, cfg)?;
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
        Ok(g)
    };
    let gx = gram(&|t| &t.xi)?;
    let ge = gram(&|t| &t.eta)?;
    let w: Vec<C64> = terms.iter().map(|t| t.weight).collect();
    trace_norm(&w, &gx, &ge)
}

/// ‖u‖_{A(G)} = ‖u₊‖ + ‖u₋‖, each the trace norm of Σ wᵢ|ξᵢ⟩⟨ηᵢ| on ℋ.
pub fn a_norm(u: &CoeffSum) -> Result<f64> {
    let cfg = QuadConfig::precise();
    let plus: Vec<&CoeffTerm> = u.terms.iter().filter(|t| t.rep == AxbRep::Plus).collect();
    let minus: Vec<&CoeffTerm> = u.terms.iter().filter(|t| t.rep == AxbRep::Minus).collect();
    Ok(sign_part_norm(&plus, &cfg)? + sign_part_norm(&minus, &cfg)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivationResiduals {
    /// |D♭(fg,h) − D♭(g,hf) − D♭(f,gh)|.
    pub leibniz: f64,
    /// |D♭(f,g) + D♭(g,f)|.
    pub antisym: f64,
    /// ‖f‖_A‖g‖_A − |D♭(f,g)| when f and g are coefficient sums.
    pub key_margin: Option<f64>,
    /// Largest |D♭| among the integrals involved, for relative comparisons.
    pub scale: f64,
    /// Sum of quadrature uncertainties of the integrals involved.
    pub uncertainty: f64,
}

pub fn derivation_residuals(
    f: &AlgebraElem,
    g: &AlgebraElem,
    h: &AlgebraElem,
    cfg: &QuadConfig,
) -> Result<DerivationResiduals> {
    let fg_h = d_flat(&f.mul(g), h, cfg)?;
    let g_hf = d_flat(g, &h.mul(f), cfg)?;
    let f_gh = d_flat(f, &g.mul(h), cfg)?;
    let d_fg = d_flat(f, g, cfg)?;
    let d_gf = d_flat(g, f, cfg)?;
    let all = [fg_h, g_hf, f_gh, d_fg, d_gf];
    let key_margin = match (f.as_coeff_sum(), g.as_coeff_sum()) {
        (Some(fs), Some(gs)) => Some(a_norm(&fs)? * a_norm(&gs)? - d_fg.value.norm()),
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

/// Random convenient term with bump-sum vectors.
pub fn random_term<R: rand::Rng + ?Sized>(rng: &mut R, rep: AxbRep) -> CoeffTerm {
    use crate::funcexpr::random_bump_sum;
    let xi = random_bump_sum(rng, DomainTag::HalfLine);
    let eta = random_bump_sum(rng, DomainTag::HalfLine);
    let w = C64::from_polar(rng.gen_range(0.5..=1.5), rng.gen_range(0.0..2.0 * PI));
    CoeffTerm::new(rep, xi, eta, w).expect("generator keeps supports in [0.1, ∞)")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(c: f64, r: f64) -> FuncExpr {
        FuncExpr::bump(c, r)
            .with_domain(DomainTag::HalfLine)
            .unwrap()
    }

    #[test]
    fn group_law_matches_affine_maps() {
        let x = AxbElement::new(0.3, 1.7).unwrap();
        let y = AxbElement::new(-1.2, 0.4).unwrap();
        let t = 0.77;
        assert!((x.mul(&y).apply(t) - x.apply(y.apply(t))).abs() < 1e-15);
        let e = x.mul(&x.inverse());
        assert!((e.b).abs() < 1e-15 && (e.a - 1.0).abs() < 1e-15);
        assert!(AxbElement::new(0.0, 0.0).is_err());
    }

    #[test]
    fn coefficient_at_identity_is_inner_product() {
        let xi = bump(1.5, 0.5);
        let eta = bump(1.7, 0.6).modulate(0.3);
        let t = CoeffTerm::new(AxbRep::Plus, xi.clone(), eta.clone(), ONE).unwrap();
        let v = coeff_eval(&t, &AxbElement::identity()).unwrap();
        let w = inner_product(&xi, &eta, Measure::HaarHalfLine).unwrap();
        assert!((v - w).norm() < 1e-13);
    }

    #[test]
    fn madb_signs() {
        let t = CoeffTerm::new(AxbRep::Minus, bump(1.5, 0.5), bump(2.0, 0.5), ONE).unwrap();
        let m = madb(&t);
        assert_eq!(m.weight, -ONE);
        assert_eq!(m.rep, AxbRep::Minus);
        assert!((m.xi.eval(1.5) - 1.5 * bump(1.5, 0.5).eval(1.5)).norm() < 1e-15);
    }

    #[test]
    fn non_convenient_vectors_are_rejected() {
        let r = CoeffTerm::new(AxbRep::Plus, FuncExpr::bump(0.2, 0.5), bump(1.0, 0.5), ONE);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn a_support_of_term() {
        let t = CoeffTerm::new(AxbRep::Plus, bump(2.0, 1.0), bump(2.0, 0.5), ONE).unwrap();
        assert_eq!(t.a_support(), vec![Interval::new(1.0 / 2.5, 3.0 / 1.5)]);
    }

    #[test]
    fn zero_vectors_give_exact_zeros() {
        let z = FuncExpr::bump(1.0, 0.5)
            .scale(ZERO)
            .with_domain(DomainTag::HalfLine)
            .unwrap();
        let t = CoeffTerm::new(AxbRep::Plus, z, bump(1.0, 0.5), ONE).unwrap();
        let g = AxbElement::new(0.4, 1.3).unwrap();
        assert_eq!(coeff_eval(&t, &g).unwrap(), ZERO);
        let s = CoeffSum::new(vec![t]);
        assert_eq!(
            l2g_inner(&s, &s, &QuadConfig::default()).unwrap().value,
            ZERO
        );
        assert_eq!(a_norm(&s).unwrap(), 0.0);
    }
}
