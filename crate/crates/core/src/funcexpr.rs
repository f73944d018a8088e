//! Expression trees for smooth compactly supported test functions.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{self, Interval};
use crate::jet::{is_nonneg_integer, Jet, JET_CAP};
use crate::quadrature::{integrate_interval, QuadConfig};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    Line,
    HalfLine,
    Plane,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// dt/t on (0, ∞).
    HaarHalfLine,
    /// dt on ℝ.
    LebesgueLine,
    /// dx dy on ℝ².
    LebesguePlane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    /// exp(−1/(1−x²)) with x = (t−center)/radius, zero for |x| ≥ 1.
    Bump {
        center: f64,
        radius: f64,
    },
    /// Σ c_k t^k on `support`, zero elsewhere.
    Poly {
        coefficients: Vec<C64>,
        support: Interval,
    },
    Sum {
        terms: Vec<Node>,
    },
    Product {
        factors: Vec<Node>,
    },
    Scale {
        c: C64,
        f: Box<Node>,
    },
    /// t ↦ f(t − s).
    Shift {
        s: f64,
        f: Box<Node>,
    },
    /// t ↦ f(a·t).
    Dilate {
        a: f64,
        f: Box<Node>,
    },
    /// t ↦ t^α·f(t).
    PowerWeight {
        alpha: f64,
        f: Box<Node>,
    },
    /// t ↦ e^{2πiωt}·f(t).
    Modulate {
        omega: f64,
        f: Box<Node>,
    },
    Conj {
        f: Box<Node>,
    },
    Deriv {
        f: Box<Node>,
    },
}

/// A validated expression tree together with its domain tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FuncExprRepr")]
pub struct FuncExpr {
    node: Node,
    domain: DomainTag,
}

#[derive(Deserialize)]
struct FuncExprRepr {
    node: Node,
    domain: DomainTag,
}

impl TryFrom<FuncExprRepr> for FuncExpr {
    type Error = Error;
    fn try_from(r: FuncExprRepr) -> Result<FuncExpr> {
        FuncExpr::new(r.node, r.domain)
    }
}

impl FuncExpr {
    /// Validates `node` and the domain invariant.
    pub fn new(node: Node, domain: DomainTag) -> Result<FuncExpr> {
        validate(&node)?;
        let f = FuncExpr { node, domain };
        match domain {
            DomainTag::HalfLine => {
                if let Some(lo) = f.support().first().map(|iv| iv.lo) {
                    if lo <= 0.0 {
                        return Err(Error::Domain(format!(
                            "half-line function has support reaching {lo}"
                        )));
                    }
                }
            }
            DomainTag::Plane => {
                return Err(Error::Domain(
                    "plane functions are tensor sums, see PlaneFunc".into(),
                ))
            }
            DomainTag::Line => {}
        }
        Ok(f)
    }

    /// # Panics
    /// If `radius` is not a positive finite number or `center` is not finite.
    pub fn bump(center: f64, radius: f64) -> FuncExpr {
        let node = Node::Bump { center, radius };
        validate(&node).expect("invalid bump");
        FuncExpr {
            node,
            domain: DomainTag::Line,
        }
    }

    pub fn zero() -> FuncExpr {
        FuncExpr {
            node: Node::Sum { terms: Vec::new() },
            domain: DomainTag::Line,
        }
    }

    pub fn poly(coefficients: Vec<C64>, support: Interval) -> Result<FuncExpr> {
        FuncExpr::new(
            Node::Poly {
                coefficients,
                support,
            },
            DomainTag::Line,
        )
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn domain(&self) -> DomainTag {
        self.domain
    }

    /// Retags the function, checking the half-line invariant.
    pub fn with_domain(self, domain: DomainTag) -> Result<FuncExpr> {
        FuncExpr::new(self.node, domain)
    }

    /// Applies a unary combinator. The tag is kept when its invariant still holds.
    fn wrap(self, node: Node) -> FuncExpr {
        let domain = self.domain;
        let f = FuncExpr {
            node,
            domain: DomainTag::Line,
        };
        if domain == DomainTag::HalfLine {
            f.clone().with_domain(DomainTag::HalfLine).unwrap_or(f)
        } else {
            f
        }
    }

    pub fn sum(terms: Vec<FuncExpr>) -> FuncExpr {
        let domain = common_domain(&terms);
        let f = FuncExpr {
            node: Node::Sum {
                terms: terms.into_iter().map(|t| t.node).collect(),
            },
            domain: DomainTag::Line,
        };
        f.wrap_domain(domain)
    }

    /// # Panics
    /// If `factors` is empty.
    pub fn product(factors: Vec<FuncExpr>) -> FuncExpr {
        assert!(!factors.is_empty(), "empty product has unbounded support");
        let domain = if factors.iter().any(|f| f.domain == DomainTag::HalfLine) {
            DomainTag::HalfLine
        } else {
            DomainTag::Line
        };
        let f = FuncExpr {
            node: Node::Product {
                factors: factors.into_iter().map(|t| t.node).collect(),
            },
            domain: DomainTag::Line,
        };
        f.wrap_domain(domain)
    }

    fn wrap_domain(self, domain: DomainTag) -> FuncExpr {
        if domain == DomainTag::HalfLine {
            self.clone().with_domain(domain).unwrap_or(self)
        } else {
            self
        }
    }

    pub fn scale(self, c: C64) -> FuncExpr {
        let node = Node::Scale {
            c,
            f: Box::new(self.node.clone()),
        };
        self.wrap(node)
    }

    pub fn shift(self, s: f64) -> FuncExpr {
        let node = Node::Shift {
            s,
            f: Box::new(self.node.clone()),
        };
        self.wrap(node)
    }

    /// # Panics
    /// If `a` is not positive.
    pub fn dilate(self, a: f64) -> FuncExpr {
        assert!(a > 0.0 && a.is_finite(), "dilation factor must be positive");
        let node = Node::Dilate {
            a,
            f: Box::new(self.node.clone()),
        };
        self.wrap(node)
    }

    /// t^α·f. Fails when α is not a nonnegative integer and the support of f reaches 0.
    pub fn power_weight(self, alpha: f64) -> Result<FuncExpr> {
        let node = Node::PowerWeight {
            alpha,
            f: Box::new(self.node.clone()),
        };
        validate(&node)?;
        Ok(self.wrap(node))
    }

    pub fn modulate(self, omega: f64) -> FuncExpr {
        let node = Node::Modulate {
            omega,
            f: Box::new(self.node.clone()),
        };
        self.wrap(node)
    }

    pub fn conj(self) -> FuncExpr {
        let node = Node::Conj {
            f: Box::new(self.node.clone()),
        };
        self.wrap(node)
    }

    /// Unevaluated derivative node (evaluated through jets).
    pub fn deriv(self) -> FuncExpr {
        let node = Node::Deriv {
            f: Box::new(self.node.clone()),
        };
        self.wrap(node)
    }

    /// Derivative built by the product and chain rules, with `Deriv` kept only on bumps.
    pub fn derivative(&self) -> FuncExpr {
        FuncExpr {
            node: derivative(&self.node),
            domain: self.domain,
        }
    }

    pub fn eval(&self, t: f64) -> C64 {
        eval(&self.node, t)
    }

    /// Taylor jet with `len` coefficients at `t`.
    ///
    /// # Panics
    /// If `len` plus the nesting depth of `Deriv` nodes exceeds the jet capacity.
    pub fn eval_jet(&self, t: f64, len: usize) -> Jet {
        jet(&self.node, t, len)
    }

    pub fn support(&self) -> Vec<Interval> {
        support(&self.node)
    }

    /// Smallest length scale of the tree (bump radius after dilations).
    pub fn feature_scale(&self) -> f64 {
        feature(&self.node)
    }

    /// Upper bound on the modulation frequency carried by the tree.
    pub fn max_frequency(&self) -> f64 {
        frequency(&self.node)
    }

    pub fn is_zero(&self) -> bool {
        self.support().is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("expression trees always serialize")
    }

    pub fn from_json(s: &str) -> Result<FuncExpr> {
        serde_json::from_str(s).map_err(|e| Error::Domain(format!("bad expression JSON: {e}")))
    }
}

fn common_domain(fs: &[FuncExpr]) -> DomainTag {
    if !fs.is_empty() && fs.iter().all(|f| f.domain == DomainTag::HalfLine) {
        DomainTag::HalfLine
    } else {
        DomainTag::Line
    }
}

fn validate(n: &Node) -> Result<()> {
    let finite = |x: f64, what: &str| {
        if x.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!("{what} must be finite")))
        }
    };
    match n {
        Node::Bump { center, radius } => {
            finite(*center, "bump center")?;
            if !(*radius > 0.0 && radius.is_finite()) {
                return Err(Error::Domain(format!(
                    "bump radius {radius} must be positive"
                )));
            }
        }
        Node::Poly {
            coefficients,
            support,
        } => {
            finite(support.lo, "polynomial support")?;
            finite(support.hi, "polynomial support")?;
            if support.lo > support.hi {
                return Err(Error::Domain("polynomial support is reversed".into()));
            }
            if coefficients.iter().any(|c| !c.is_finite()) {
                return Err(Error::Domain(
                    "polynomial coefficients must be finite".into(),
                ));
            }
        }
        Node::Sum { terms } => terms.iter().try_for_each(validate)?,
        Node::Product { factors } => {
            if factors.is_empty() {
                return Err(Error::Domain("empty product".into()));
            }
            factors.iter().try_for_each(validate)?
        }
        Node::Scale { c, f } => {
            if !c.is_finite() {
                return Err(Error::Domain("scale must be finite".into()));
            }
            validate(f)?
        }
        Node::Shift { s, f } => {
            finite(*s, "shift")?;
            validate(f)?
        }
        Node::Dilate { a, f } => {
            if !(*a > 0.0 && a.is_finite()) {
                return Err(Error::Domain(format!("dilation {a} must be positive")));
            }
            validate(f)?
        }
        Node::PowerWeight { alpha, f } => {
            finite(*alpha, "power")?;
            validate(f)?;
            if !is_nonneg_integer(*alpha) {
                if let Some(iv) = support(f).first() {
                    if iv.lo <= 0.0 {
                        return Err(Error::Domain(format!(
                            "t^{alpha} applied to a function whose support reaches {}",
                            iv.lo
                        )));
                    }
                }
            }
        }
        Node::Modulate { omega, f } => {
            finite(*omega, "frequency")?;
            validate(f)?
        }
        Node::Conj { f } | Node::Deriv { f } => validate(f)?,
    }
    Ok(())
}

#[inline]
fn bump_value(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (-1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

#[inline]
fn cis(theta: f64) -> C64 {
    let (s, c) = theta.sin_cos();
    C64::new(c, s)
}

fn tpow(t: f64, alpha: f64) -> f64 {
    if is_nonneg_integer(alpha) && alpha <= i32::MAX as f64 {
        t.powi(alpha as i32)
    } else {
        t.powf(alpha)
    }
}

fn eval(n: &Node, t: f64) -> C64 {
    match n {
        Node::Bump { center, radius } => C64::new(bump_value((t - center) / radius), 0.0),
        Node::Poly {
            coefficients,
            support,
        } => {
            if support.contains(t) {
                coefficients.iter().rev().fold(ZERO, |acc, c| acc * t + c)
            } else {
                ZERO
            }
        }
        Node::Sum { terms } => terms.iter().map(|f| eval(f, t)).sum(),
        Node::Product { factors } => {
            let mut p = ONE;
            for f in factors {
                let v = eval(f, t);
                if v == ZERO {
                    return ZERO;
                }
                p *= v;
            }
            p
        }
        Node::Scale { c, f } => c * eval(f, t),
        Node::Shift { s, f } => eval(f, t - s),
        Node::Dilate { a, f } => eval(f, a * t),
        Node::PowerWeight { alpha, f } => {
            let v = eval(f, t);
            if v == ZERO {
                ZERO
            } else {
                v * tpow(t, *alpha)
            }
        }
        Node::Modulate { omega, f } => {
            let v = eval(f, t);
            if v == ZERO {
                ZERO
            } else {
                v * cis(2.0 * PI * omega * t)
            }
        }
        Node::Conj { f } => eval(f, t).conj(),
        Node::Deriv { f } => jet(f, t, 2).c[1],
    }
}

fn jet(n: &Node, t: f64, len: usize) -> Jet {
    match n {
        Node::Bump { center, radius } => {
            let x = (t - center) / radius;
            if x.abs() >= 1.0 {
                return Jet::zero(len);
            }
            bump_jet(x, *radius, len)
        }
        Node::Poly {
            coefficients,
            support,
        } => {
            let mut r = Jet::zero(len);
            if !support.contains(t) {
                return r;
            }
            // Repeated synthetic division by (x − t) yields the Taylor coefficients.
            let mut c: Vec<C64> = coefficients.clone();
            for k in 0..len.min(c.len()) {
                let deg = c.len() - 1;
                let mut acc = ZERO;
                let mut q = vec![ZERO; deg];
                for j in (0..=deg).rev() {
                    acc = acc * t + c[j];
                    if j > 0 {
                        q[j - 1] = acc;
                    }
                }
                r.c[k] = acc;
                if q.is_empty() {
                    break;
                }
                c = q;
            }
            r
        }
        Node::Sum { terms } => terms
            .iter()
            .fold(Jet::zero(len), |acc, f| acc.add(&jet(f, t, len))),
        Node::Product { factors } => {
            let mut p = Jet::constant(ONE, len);
            for f in factors {
                let j = jet(f, t, len);
                if j.is_zero() {
                    return Jet::zero(len);
                }
                p = p.mul(&j);
            }
            p
        }
        Node::Scale { c, f } => jet(f, t, len).scale(*c),
        Node::Shift { s, f } => jet(f, t - s, len),
        Node::Dilate { a, f } => jet(f, a * t, len).dilate(*a),
        Node::PowerWeight { alpha, f } => {
            let j = jet(f, t, len);
            if j.is_zero() {
                j
            } else {
                j.mul(&Jet::power(t, *alpha, len))
            }
        }
        Node::Modulate { omega, f } => {
            let j = jet(f, t, len);
            if j.is_zero() {
                return j;
            }
            let w = C64::new(0.0, 2.0 * PI * omega);
            let mut m = Jet::constant(cis(2.0 * PI * omega * t), len);
            for k in 1..len {
                m.c[k] = m.c[k - 1] * w / k as f64;
            }
            j.mul(&m)
        }
        Node::Conj { f } => jet(f, t, len).conj(),
        Node::Deriv { f } => {
            assert!(len < JET_CAP, "derivative nesting exceeds jet capacity");
            let j = jet(f, t, len + 1);
            let mut r = Jet::zero(len);
            for k in 0..len {
                r.c[k] = j.c[k + 1] * (k + 1) as f64;
            }
            r
        }
    }
}

/// Jet of exp(−1/u) with u = 1 − x², x = (t−c)/r, in real arithmetic.
fn bump_jet(x: f64, r: f64, len: usize) -> Jet {
    let mut u = [0.0f64; JET_CAP];
    u[0] = 1.0 - x * x;
    if len > 1 {
        u[1] = -2.0 * x / r;
    }
    if len > 2 {
        u[2] = -1.0 / (r * r);
    }
    // v = −1/u; only u[0..3] are nonzero.
    let mut v = [0.0f64; JET_CAP];
    let inv0 = 1.0 / u[0];
    v[0] = -inv0;
    for k in 1..len {
        let mut acc = u[1] * v[k - 1];
        if k >= 2 {
            acc += u[2] * v[k - 2];
        }
        v[k] = -acc * inv0;
    }
    let mut e = [0.0f64; JET_CAP];
    e[0] = v[0].exp();
    for k in 1..len {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += j as f64 * v[j] * e[k - j];
        }
        e[k] = acc / k as f64;
    }
    let mut out = Jet::zero(len);
    for k in 0..len {
        out.c[k] = C64::new(e[k], 0.0);
    }
    out
}

fn derivative(n: &Node) -> Node {
    let bx = |n: Node| Box::new(n);
    match n {
        Node::Bump { .. } => Node::Deriv { f: bx(n.clone()) },
        Node::Poly {
            coefficients,
            support,
        } => Node::Poly {
            coefficients: coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
            support: *support,
        },
        Node::Sum { terms } => Node::Sum {
            terms: terms.iter().map(derivative).collect(),
        },
        Node::Product { factors } => Node::Sum {
            terms: (0..factors.len())
                .map(|i| {
                    let mut fs = factors.clone();
                    fs[i] = derivative(&factors[i]);
                    Node::Product { factors: fs }
                })
                .collect(),
        },
        Node::Scale { c, f } => Node::Scale {
            c: *c,
            f: bx(derivative(f)),
        },
        Node::Shift { s, f } => Node::Shift {
            s: *s,
            f: bx(derivative(f)),
        },
        Node::Dilate { a, f } => Node::Scale {
            c: C64::new(*a, 0.0),
            f: bx(Node::Dilate {
                a: *a,
                f: bx(derivative(f)),
            }),
        },
        Node::PowerWeight { alpha, f } => {
            if *alpha == 0.0 {
                return Node::PowerWeight {
                    alpha: 0.0,
                    f: bx(derivative(f)),
                };
            }
            Node::Sum {
                terms: vec![
                    Node::Scale {
                        c: C64::new(*alpha, 0.0),
                        f: bx(Node::PowerWeight {
                            alpha: alpha - 1.0,
                            f: f.clone(),
                        }),
                    },
                    Node::PowerWeight {
                        alpha: *alpha,
                        f: bx(derivative(f)),
                    },
                ],
            }
        }
        Node::Modulate { omega, f } => Node::Sum {
            terms: vec![
                Node::Modulate {
                    omega: *omega,
                    f: bx(derivative(f)),
                },
                Node::Scale {
                    c: C64::new(0.0, 2.0 * PI * omega),
                    f: bx(Node::Modulate {
                        omega: *omega,
                        f: f.clone(),
                    }),
                },
            ],
        },
        Node::Conj { f } => Node::Conj {
            f: bx(derivative(f)),
        },
        Node::Deriv { .. } => Node::Deriv { f: bx(n.clone()) },
    }
}

fn support(n: &Node) -> Vec<Interval> {
    match n {
        Node::Bump { center, radius } => vec![Interval::new(center - radius, center + radius)],
        Node::Poly {
            coefficients,
            support,
        } => {
            if coefficients.iter().all(|c| *c == ZERO) || support.is_empty() {
                Vec::new()
            } else {
                vec![*support]
            }
        }
        Node::Sum { terms } => interval::normalize(terms.iter().flat_map(support).collect()),
        Node::Product { factors } => {
            let mut acc = support(&factors[0]);
            for f in &factors[1..] {
                if acc.is_empty() {
                    break;
                }
                acc = interval::intersect(&acc, &support(f));
            }
            acc
        }
        Node::Scale { c, f } => {
            if *c == ZERO {
                Vec::new()
            } else {
                support(f)
            }
        }
        Node::Shift { s, f } => support(f).iter().map(|iv| iv.shift(*s)).collect(),
        Node::Dilate { a, f } => support(f).iter().map(|iv| iv.scale(1.0 / a)).collect(),
        Node::PowerWeight { f, .. }
        | Node::Modulate { f, .. }
        | Node::Conj { f }
        | Node::Deriv { f } => support(f),
    }
}

fn feature(n: &Node) -> f64 {
    match n {
        Node::Bump { radius, .. } => *radius,
        Node::Poly {
            coefficients,
            support,
        } => support.len() / coefficients.len().max(1) as f64,
        Node::Sum { terms } => terms.iter().map(feature).fold(f64::INFINITY, f64::min),
        Node::Product { factors } => factors.iter().map(feature).fold(f64::INFINITY, f64::min),
        Node::Dilate { a, f } => feature(f) / a,
        Node::Scale { f, .. }
        | Node::Shift { f, .. }
        | Node::PowerWeight { f, .. }
        | Node::Modulate { f, .. }
        | Node::Conj { f }
        | Node::Deriv { f } => feature(f),
    }
}

fn frequency(n: &Node) -> f64 {
    match n {
        Node::Bump { .. } | Node::Poly { .. } => 0.0,
        Node::Sum { terms } => terms.iter().map(frequency).fold(0.0, f64::max),
        Node::Product { factors } => factors.iter().map(frequency).sum(),
        Node::Dilate { a, f } => a * frequency(f),
        Node::Modulate { omega, f } => omega.abs() + frequency(f),
        Node::Scale { f, .. }
        | Node::Shift { f, .. }
        | Node::PowerWeight { f, .. }
        | Node::Conj { f }
        | Node::Deriv { f } => frequency(f),
    }
}

/// ∫ f·conj(g) dμ with a tight default configuration.
pub fn inner_product(f: &FuncExpr, g: &FuncExpr, measure: Measure) -> Result<C64> {
    inner_product_with(f, g, measure, &QuadConfig::precise())
}

pub fn inner_product_with(
    f: &FuncExpr,
    g: &FuncExpr,
    measure: Measure,
    cfg: &QuadConfig,
) -> Result<C64> {
    let common = interval::intersect(&f.support(), &g.support());
    let osc = f.max_frequency() + g.max_frequency();
    let mut total = ZERO;
    match measure {
        Measure::LebesgueLine => {
            for iv in &common {
                total += integrate_interval(|t| f.eval(t) * g.eval(t).conj(), *iv, cfg, osc)?.value;
            }
        }
        Measure::HaarHalfLine => {
            if let Some(iv) = common.first() {
                if iv.lo <= 0.0 {
                    return Err(Error::Domain(
                        "Haar measure on the half-line needs supports inside (0, ∞)".into(),
                    ));
                }
            }
            for iv in &common {
                total +=
                    integrate_interval(|t| f.eval(t) * g.eval(t).conj() / t, *iv, cfg, osc)?.value;
            }
        }
        Measure::LebesguePlane => {
            return Err(Error::Domain(
                "plane inner products act on PlaneFunc values".into(),
            ))
        }
    }
    Ok(total)
}

/// ℱf(y) = ∫ f(t) e^{−2πiyt} dt.
pub fn fourier_transform(f: &FuncExpr, y: f64, cfg: &QuadConfig) -> Result<C64> {
    let osc = f.max_frequency() + y.abs();
    let mut total = ZERO;
    for iv in f.support() {
        total += integrate_interval(|t| f.eval(t) * cis(-2.0 * PI * y * t), iv, cfg, osc)?.value;
    }
    Ok(total)
}

pub fn norm(f: &FuncExpr, measure: Measure) -> Result<f64> {
    Ok(inner_product(f, f, measure)?.re.max(0.0).sqrt())
}

/// One tensor term weight·x(s)·y(t) of a plane function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorTerm {
    pub weight: C64,
    pub x: FuncExpr,
    pub y: FuncExpr,
}

/// A function on ℝ² given as a finite sum of tensor products.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PlaneFunc {
    pub terms: Vec<TensorTerm>,
}

impl PlaneFunc {
    pub fn tensor(x: FuncExpr, y: FuncExpr) -> PlaneFunc {
        PlaneFunc {
            terms: vec![TensorTerm { weight: ONE, x, y }],
        }
    }

    pub fn domain(&self) -> DomainTag {
        DomainTag::Plane
    }

    pub fn eval(&self, x: f64, y: f64) -> C64 {
        self.terms
            .iter()
            .map(|t| t.weight * t.x.eval(x) * t.y.eval(y))
            .sum()
    }

    /// (x, y) ↦ f(x − p, y − q).
    pub fn translate(&self, p: f64, q: f64) -> PlaneFunc {
        PlaneFunc {
            terms: self
                .terms
                .iter()
                .map(|t| TensorTerm {
                    weight: t.weight,
                    x: t.x.clone().shift(p),
                    y: t.y.clone().shift(q),
                })
                .collect(),
        }
    }

    pub fn conj(&self) -> PlaneFunc {
        PlaneFunc {
            terms: self
                .terms
                .iter()
                .map(|t| TensorTerm {
                    weight: t.weight.conj(),
                    x: t.x.clone().conj(),
                    y: t.y.clone().conj(),
                })
                .collect(),
        }
    }

    pub fn support_x(&self) -> Vec<Interval> {
        interval::normalize(self.live_terms().flat_map(|t| t.x.support()).collect())
    }

    pub fn support_y(&self) -> Vec<Interval> {
        interval::normalize(self.live_terms().flat_map(|t| t.y.support()).collect())
    }

    fn live_terms(&self) -> impl Iterator<Item = &TensorTerm> {
        self.terms
            .iter()
            .filter(|t| t.weight != ZERO && !t.x.is_zero() && !t.y.is_zero())
    }

    pub fn feature_scale(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.x.feature_scale().min(t.y.feature_scale()))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_zero(&self) -> bool {
        self.live_terms().next().is_none()
    }

    /// ∫∫ f·conj(g) dx dy, factorized over the tensor terms.
    pub fn inner_product(&self, other: &PlaneFunc) -> Result<C64> {
        let mut total = ZERO;
        for s in &self.terms {
            for o in &other.terms {
                let w = s.weight * o.weight.conj();
                if w == ZERO {
                    continue;
                }
                let ix = inner_product(&s.x, &o.x, Measure::LebesgueLine)?;
                if ix == ZERO {
                    continue;
                }
                total += w * ix * inner_product(&s.y, &o.y, Measure::LebesgueLine)?;
            }
        }
        Ok(total)
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(self.inner_product(self)?.re.max(0.0).sqrt())
    }
}

/// Seeded test functions: 1–3 bumps with centers in [0.5, 4], radii in [0.2, 1]
/// and complex coefficients with |c| ≤ 2. Half-line draws keep the support in [0.1, ∞).
pub fn random_bump_sum<R: Rng + ?Sized>(rng: &mut R, domain: DomainTag) -> FuncExpr {
    let count = rng.gen_range(1..=3);
    let terms = (0..count)
        .map(|_| {
            let center: f64 = rng.gen_range(0.5..=4.0);
            let mut radius: f64 = rng.gen_range(0.2..=1.0);
            if domain == DomainTag::HalfLine {
                radius = radius.min(center - 0.1);
            }
            let modulus: f64 = rng.gen_range(0.25..=2.0);
            let phase: f64 = rng.gen_range(0.0..2.0 * PI);
            FuncExpr::bump(center, radius).scale(C64::from_polar(modulus, phase))
        })
        .collect();
    let f = FuncExpr::sum(terms);
    match domain {
        DomainTag::HalfLine => f
            .with_domain(DomainTag::HalfLine)
            .expect("support kept in [0.1, ∞)"),
        _ => f,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bump_examples() {
        let b = FuncExpr::bump(1.5, 0.5);
        assert_relative_eq!(b.eval(1.5).re, (-1f64).exp(), max_relative = 1e-15);
        assert_eq!(b.eval(2.1), ZERO);
        let k = b.clone().power_weight(1.0).unwrap();
        assert_relative_eq!(k.eval(1.5).re, 1.5 * (-1f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn support_examples() {
        let b = FuncExpr::bump(1.5, 0.5);
        assert_eq!(b.support(), vec![Interval::new(1.0, 2.0)]);
        assert_eq!(
            b.clone().shift(2.0).support(),
            vec![Interval::new(3.0, 4.0)]
        );
        let p = FuncExpr::product(vec![b, FuncExpr::bump(2.5, 0.5)]);
        assert!(p.support().is_empty());
    }

    #[test]
    fn negative_power_needs_support_away_from_zero() {
        let b = FuncExpr::bump(0.5, 0.6);
        assert!(matches!(
            b.clone().power_weight(-0.5),
            Err(Error::Domain(_))
        ));
        assert!(b.power_weight(2.0).is_ok());
        assert!(FuncExpr::bump(1.5, 0.5).power_weight(-0.5).is_ok());
    }

    #[test]
    fn half_line_tag_is_checked() {
        assert!(FuncExpr::bump(0.5, 0.6)
            .with_domain(DomainTag::HalfLine)
            .is_err());
        let h = FuncExpr::bump(1.5, 0.5)
            .with_domain(DomainTag::HalfLine)
            .unwrap();
        assert_eq!(h.clone().shift(-5.0).domain(), DomainTag::Line);
        assert_eq!(h.dilate(2.0).domain(), DomainTag::HalfLine);
    }

    #[test]
    fn json_round_trip() {
        let f = FuncExpr::sum(vec![
            FuncExpr::bump(1.5, 0.5)
                .modulate(2.0)
                .scale(C64::new(0.5, -1.0)),
            FuncExpr::bump(3.0, 0.4)
                .dilate(1.3)
                .power_weight(-0.5)
                .unwrap()
                .conj(),
        ])
        .with_domain(DomainTag::HalfLine)
        .unwrap();
        let s = f.to_json();
        assert_eq!(FuncExpr::from_json(&s).unwrap(), f);
        let bad = r#"{"node":{"node":"power_weight","alpha":-1.0,"f":{"node":"bump","center":0.0,"radius":1.0}},"domain":"line"}"#;
        assert!(FuncExpr::from_json(bad).is_err());
    }

    #[test]
    fn poly_jet_is_taylor_shift() {
        let p = FuncExpr::poly(
            vec![C64::new(1.0, 0.0), C64::new(-2.0, 0.0), C64::new(0.0, 3.0)],
            Interval::new(-1.0, 5.0),
        )
        .unwrap();
        let j = p.eval_jet(2.0, 4);
        assert_eq!(j.c[0], C64::new(-3.0, 12.0));
        assert_eq!(j.c[1], C64::new(-2.0, 12.0));
        assert_eq!(j.c[2], C64::new(0.0, 3.0));
        assert_eq!(j.c[3], ZERO);
    }

    #[test]
    fn disjoint_inner_product_is_zero() {
        let f = FuncExpr::bump(1.5, 0.5);
        let g = FuncExpr::bump(3.5, 0.5);
        assert_eq!(inner_product(&f, &g, Measure::HaarHalfLine).unwrap(), ZERO);
    }
}
