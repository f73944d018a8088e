//! Pointwise and integral checks of the identities behind the ℓ¹-decompositions of
//! A(G) for the ax+b group and A(ℍ_r).

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::axb::{coeff_eval, AxbElement, AxbRep, CoeffFactor, CoeffIntegrand, CoeffTerm};
use crate::error::{Error, Result};
use crate::funcexpr::{fourier_transform, inner_product, FuncExpr, Measure, PlaneFunc};
use crate::heis::HeisElement;
use crate::interval::Interval;
use crate::quadrature::{integrate_interval, IntegralResult, QuadConfig};
use crate::C64;

const ONE: C64 = C64::new(1.0, 0.0);

type PlaneEval = Arc<dyn Fn(f64, f64) -> C64 + Send + Sync>;

/// A function on ℝ × ℝ₊* vanishing outside `b_support × a_support`.
#[derive(Clone)]
pub struct L2GSample {
    pub f: PlaneEval,
    pub b_support: Interval,
    pub a_support: Interval,
}

impl std::fmt::Debug for L2GSample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("L2GSample")
            .field("b_support", &self.b_support)
            .field("a_support", &self.a_support)
            .finish_non_exhaustive()
    }
}

impl L2GSample {
    pub fn new(f: PlaneEval, b_support: Interval, a_support: Interval) -> Result<Self> {
        if !a_support.is_empty() && a_support.lo <= 0.0 {
            return Err(Error::Domain("a-support must lie in (0, ∞)".into()));
        }
        Ok(L2GSample { f, b_support, a_support })
    }

    /// (b, a) ↦ u(b)·v(a).
    pub fn separable(u: FuncExpr, v: FuncExpr) -> Result<Self> {
        let hull = |f: &FuncExpr| crate::interval::hull(&f.support()).unwrap_or(Interval::new(1.0, 1.0));
        let (bs, as_) = (hull(&u), hull(&v));
        L2GSample::new(Arc::new(move |b, a| u.eval(b) * v.eval(a)), bs, as_)
    }

    pub fn scaled(&self, c: C64) -> Self {
        let f = self.f.clone();
        L2GSample { f: Arc::new(move |b, a| c * f(b, a)), ..self.clone() }
    }

    /// (WF)(b, a) = F(b, |b|·a).
    pub fn w(&self) -> L2GSample {
        let f = self.f.clone();
        L2GSample { f: Arc::new(move |b, a| f(b, b.abs() * a)), ..self.clone() }
    }
}

/// ∫∫ |F|² db da/a over b ∈ b_support and a ∈ a_range(b), integrating in a for each b.
fn norm_sq<R>(f: &L2GSample, a_range: R, cfg: &QuadConfig) -> Result<f64>
where
    R: Fn(f64) -> Option<Interval>,
{
    let bs = f.b_support;
    if bs.is_empty() {
        return Ok(0.0);
    }
    let mut pieces = vec![bs];
    if bs.lo < 0.0 && bs.hi > 0.0 {
        pieces = vec![Interval::new(bs.lo, 0.0), Interval::new(0.0, bs.hi)];
    }
    let mut total = 0.0;
    for piece in pieces {
        let r = integrate_interval(
            |b| {
                let Some(iv) = a_range(b).filter(|iv| !iv.is_empty()) else {
                    return C64::new(0.0, 0.0);
                };
                integrate_interval(|a| C64::new((f.f)(b, a).norm_sqr() / a, 0.0), iv, cfg, 0.0)
                    .map(|r| r.value)
                    .unwrap_or(C64::new(f64::NAN, 0.0))
            },
            piece,
            cfg,
            0.0,
        )?;
        if !r.value.re.is_finite() {
            return Err(Error::Numerical("inner a-integral failed".into()));
        }
        total += r.value.re;
    }
    Ok(total)
}

/// |‖WF‖ − ‖F‖| / ‖F‖ for the measure db·da/a, with both norms by nested quadrature in
/// the original variables.
pub fn w_isometry_check(f: &L2GSample, cfg: &QuadConfig) -> Result<f64> {
    let a = f.a_support;
    let nf = norm_sq(f, |_| Some(a), cfg)?.sqrt();
    if nf == 0.0 {
        return Ok(0.0);
    }
    let wf = f.w();
    let nw = norm_sq(&wf, |b| (b != 0.0).then(|| Interval::new(a.lo / b.abs(), a.hi / b.abs())), cfg)?.sqrt();
    Ok((nw - nf).abs() / nf)
}

/// One pointwise comparison of a Fourier-side identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointResidual {
    pub point: AxbElement,
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
}

/// (ℱ⊗I)W(η⊗ξ)(b,a) = ∫₀^∞ e^{−2πibt} η(t) ξ(ta) dt against (ξ∗_{π₊}conj(Kη))(b,a).
/// With `mirrored`, η is replaced by η̌(t) = η(−t); the left side becomes
/// ∫₀^∞ e^{2πibs} η(s) ξ(sa) ds, compared with (ξ∗_{π₋}conj(Kη))(b,a).
pub fn ftw_identity_points(
    eta: &FuncExpr,
    xi: &FuncExpr,
    points: &[AxbElement],
    mirrored: bool,
) -> Result<Vec<PointResidual>> {
    let k_eta = eta.clone().power_weight(1.0)?.conj();
    let rep = if mirrored { AxbRep::Minus } else { AxbRep::Plus };
    let term = CoeffTerm::new(rep, xi.clone(), k_eta, ONE)?;
    let cfg = QuadConfig::precise();
    points
        .iter()
        .map(|g| {
            let lhs = if mirrored {
                // W(η̌⊗ξ)(t,a) = η(−t)ξ(|t|a), supported on t < 0.
                let h = FuncExpr::product(vec![eta.clone(), xi.clone().dilate(g.a)]);
                let osc = h.max_frequency() + g.b.abs();
                let mut v = C64::new(0.0, 0.0);
                for iv in h.support() {
                    v += integrate_interval(
                        |t| h.eval(-t) * C64::from_polar(1.0, -2.0 * PI * g.b * t),
                        Interval::new(-iv.hi, -iv.lo),
                        &cfg,
                        osc,
                    )?
                    .value;
                }
                v
            } else {
                let h = FuncExpr::product(vec![eta.clone(), xi.clone().dilate(g.a)]);
                fourier_transform(&h, g.b, &cfg)?
            };
            let rhs = coeff_eval(&term, g)?;
            Ok(PointResidual { point: *g, lhs, rhs, residual: (lhs - rhs).norm() })
        })
        .collect()
}

/// Largest pointwise residual of the ftw identity.
pub fn ftw_identity_check(eta: &FuncExpr, xi: &FuncExpr, points: &[AxbElement], mirrored: bool) -> Result<f64> {
    Ok(ftw_identity_points(eta, xi, points, mirrored)?
        .iter()
        .map(|p| p.residual)
        .fold(0.0, f64::max))
}

/// Both sides of ⟨λ(x)(ξ∗_{π₊}η), ξ'∗_{π±}η'⟩ at one x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaConvPoint {
    pub point: AxbElement,
    /// Translated L²(G) inner product with the same-sign term.
    pub lhs: IntegralResult,
    /// ⟨K^{-1/2}ξ, K^{-1/2}ξ'⟩·(η̄∗_{π₋}η̄')(x).
    pub rhs: C64,
    /// Translated L²(G) inner product with the opposite-sign term; should vanish.
    pub cross: IntegralResult,
}

impl LambdaConvPoint {
    pub fn residual(&self) -> f64 {
        (self.lhs.value - self.rhs).norm()
    }
}

/// ⟨λ(x)u, w⟩_{L²(G)} = ∫ u(x⁻¹y)·conj(w(y)) dy.
pub fn translated_inner(x: &AxbElement, u: &CoeffTerm, w: &CoeffTerm, cfg: &QuadConfig) -> Result<IntegralResult> {
    let mut f = CoeffIntegrand::new();
    f.push(
        ONE,
        vec![
            CoeffFactor { term: u.clone(), conj: false, translate: Some(*x) },
            CoeffFactor { term: w.clone(), conj: true, translate: None },
        ],
    );
    f.integrate(cfg)
}

pub fn lambda_conv_points(
    xi: &FuncExpr,
    eta: &FuncExpr,
    xi2: &FuncExpr,
    eta2: &FuncExpr,
    points: &[AxbElement],
    cfg: &QuadConfig,
) -> Result<Vec<LambdaConvPoint>> {
    let u = CoeffTerm::new(AxbRep::Plus, xi.clone(), eta.clone(), ONE)?;
    let w = CoeffTerm::new(AxbRep::Plus, xi2.clone(), eta2.clone(), ONE)?;
    let w_cross = CoeffTerm::new(AxbRep::Minus, xi2.clone(), eta2.clone(), ONE)?;
    let k = inner_product(&xi.clone().power_weight(-1.0)?, xi2, Measure::HaarHalfLine)?;
    let conv = CoeffTerm::new(AxbRep::Minus, eta.clone().conj(), eta2.clone().conj(), ONE)?;
    points
        .iter()
        .map(|x| {
            Ok(LambdaConvPoint {
                point: *x,
                lhs: translated_inner(x, &u, &w, cfg)?,
                rhs: k * coeff_eval(&conv, x)?,
                cross: translated_inner(x, &u, &w_cross, cfg)?,
            })
        })
        .collect()
}

/// Left translation of f⊗χₙ on ℍ_r evaluated through the group law, against the
/// closed form e^{−2πinθ}e^{πin(−xy'+x'y)} f(x'−x, y'−y) χₙ(θ').
pub fn heis_translation_formula_check(f: &PlaneFunc, n: i64, g: &HeisElement, g2: &HeisElement) -> f64 {
    let chi = |theta: f64| C64::from_polar(1.0, 2.0 * PI * n as f64 * theta);
    let h = g.inverse().mul(g2);
    let lhs = f.eval(h.p, h.q) * chi(h.theta);
    let nf = n as f64;
    let rhs = C64::from_polar(1.0, -2.0 * PI * nf * g.theta + PI * nf * (-g.p * g2.q + g2.p * g.q))
        * f.eval(g2.p - g.p, g2.q - g.q)
        * chi(g2.theta);
    (lhs - rhs).norm()
}
