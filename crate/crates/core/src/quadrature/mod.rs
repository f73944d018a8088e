//! Adaptive Gauss–Legendre quadrature, certified b-truncation and Haar integrals.

mod gauss;
mod haar;
mod spectral;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;

pub use gauss::{gauss_legendre, GaussRule};
pub use haar::{
    integrate_axb_haar, integrate_heis_haar, theta_character_sum, AxbIntegrand, HeisIntegrand,
    PointwiseAxb, PointwiseHeis, SliceIntegral, B_CUTOFF_FLOOR, B_CUTOFF_MAX,
};
pub use spectral::{
    fourier_tail_bound, integrate_slice, Kernel, Monomial, SliceFactor,
    TAIL_MAX_ORDER,
};

/// How the non-compact b- (or q-) direction is truncated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum BCutoff {
    /// Fixed dimensionless cutoff B.
    Fixed { b: f64 },
    /// Start at [`B_CUTOFF_FLOOR`] and double B until the tail certificate is below
    /// `target_tail` times the integral of |F|.
    Certified { target_tail: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub base_order: usize,
    pub max_panels: usize,
    pub osc_panels_per_period: usize,
    pub b_cutoff: BCutoff,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-15,
            base_order: 16,
            max_panels: 2000,
            osc_panels_per_period: 4,
            b_cutoff: BCutoff::Certified { target_tail: 1e-3 },
        }
    }
}

impl QuadConfig {
    /// Tighter tolerances for one-dimensional reference integrals.
    pub fn precise() -> Self {
        QuadConfig {
            rel_tol: 1e-13,
            abs_tol: 1e-17,
            max_panels: 20000,
            ..Default::default()
        }
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        QuadConfig { rel_tol, ..self }
    }

    pub fn with_cutoff(self, b_cutoff: BCutoff) -> Self {
        QuadConfig { b_cutoff, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Domain(format!("invalid quadrature config: {m}")));
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.base_order < 4 {
            return bad("base_order must be at least 4");
        }
        if self.max_panels == 0 {
            return bad("max_panels must be positive");
        }
        if self.osc_panels_per_period < 4 {
            return bad("osc_panels_per_period must be at least 4");
        }
        match self.b_cutoff {
            BCutoff::Fixed { b } if !(b > 0.0 && b.is_finite()) => bad("cutoff must be positive"),
            BCutoff::Certified { target_tail } if !(target_tail > 0.0) => {
                bad("target tail must be positive")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: C64,
    pub error_estimate: f64,
    /// Bound on the discarded part of a non-compact domain; 0 for compact domains.
    pub tail_bound: f64,
    pub panels_used: usize,
}

impl IntegralResult {
    pub fn zero() -> Self {
        IntegralResult {
            value: C64::new(0.0, 0.0),
            error_estimate: 0.0,
            tail_bound: 0.0,
            panels_used: 0,
        }
    }

    /// Total uncertainty: quadrature error plus truncation tail.
    pub fn uncertainty(&self) -> f64 {
        self.error_estimate + self.tail_bound
    }
}

/// Compensated summation of complex values in the order given.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: C64,
    comp: C64,
}

impl KahanSum {
    pub fn add(&mut self, x: C64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> C64 {
        self.sum
    }
}

/// Integrand sample: a complex value and auxiliary real quantities integrated with the
/// same rule but not used for adaptivity.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Sample {
    pub value: C64,
    pub aux: [f64; 2],
}

#[derive(Debug, Clone)]
pub(crate) struct Adaptive {
    pub value: C64,
    pub aux: [f64; 2],
    pub error: f64,
    pub mass: f64,
    pub panels: usize,
}

struct Panel {
    lo: f64,
    hi: f64,
    value: C64,
    aux: [f64; 2],
    mass: f64,
    error: f64,
}

struct Ranked(Panel);

impl PartialEq for Ranked {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Ranked {
    // Largest error first; ties go to the leftmost panel.
    fn cmp(&self, o: &Self) -> Ordering {
        self.0
            .error
            .total_cmp(&o.0.error)
            .then_with(|| o.0.lo.total_cmp(&self.0.lo))
    }
}

fn panel<F>(f: &mut F, lo: f64, hi: f64, order: usize) -> Result<Panel>
where
    F: FnMut(f64) -> Result<Sample>,
{
    let hi_rule = gauss_legendre(order);
    let lo_rule = gauss_legendre(order / 2);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut q = C64::new(0.0, 0.0);
    let mut aux = [0.0; 2];
    let mut mass = 0.0;
    for (x, w) in hi_rule.nodes.iter().zip(&hi_rule.weights) {
        let s = f(mid + half * x)?;
        q += s.value * w;
        mass += s.value.norm() * w;
        aux[0] += s.aux[0] * w;
        aux[1] += s.aux[1] * w;
    }
    let mut q2 = C64::new(0.0, 0.0);
    for (x, w) in lo_rule.nodes.iter().zip(&lo_rule.weights) {
        q2 += f(mid + half * x)?.value * w;
    }
    Ok(Panel {
        lo,
        hi,
        value: q * half,
        aux: [aux[0] * half, aux[1] * half],
        mass: mass * half,
        error: ((q - q2) * half).norm(),
    })
}

/// Globally adaptive bisection. Stops when the summed error estimate is below
/// max(abs_tol, rel_tol·∫|f|).
pub(crate) fn adaptive<F>(mut f: F, iv: Interval, cfg: &QuadConfig, osc: f64) -> Result<Adaptive>
where
    F: FnMut(f64) -> Result<Sample>,
{
    cfg.validate()?;
    if iv.is_empty() {
        return Ok(Adaptive {
            value: C64::new(0.0, 0.0),
            aux: [0.0; 2],
            error: 0.0,
            mass: 0.0,
            panels: 0,
        });
    }
    let mut initial = 1usize;
    if osc > 0.0 {
        let width = 1.0 / (cfg.osc_panels_per_period as f64 * osc);
        initial = (iv.len() / width).ceil().max(1.0) as usize;
    }
    if initial > cfg.max_panels {
        return Err(Error::Tolerance {
            best: Box::new(IntegralResult {
                value: C64::new(f64::NAN, f64::NAN),
                error_estimate: f64::INFINITY,
                tail_bound: 0.0,
                panels_used: 0,
            }),
        });
    }
    let mut heap = BinaryHeap::with_capacity(2 * initial + 16);
    let step = iv.len() / initial as f64;
    let mut err = 0.0;
    let mut mass = 0.0;
    for i in 0..initial {
        let lo = iv.lo + step * i as f64;
        let hi = if i + 1 == initial { iv.hi } else { lo + step };
        let p = panel(&mut f, lo, hi, cfg.base_order)?;
        err += p.error;
        mass += p.mass;
        heap.push(Ranked(p));
    }
    let min_width = iv.len() * 1e-12;
    let mut converged = false;
    loop {
        if err <= cfg.abs_tol.max(cfg.rel_tol * mass) {
            converged = true;
            break;
        }
        if heap.len() >= cfg.max_panels {
            break;
        }
        let Ranked(worst) = heap.pop().expect("heap is never empty here");
        if worst.hi - worst.lo < min_width {
            heap.push(Ranked(worst));
            break;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = panel(&mut f, worst.lo, mid, cfg.base_order)?;
        let right = panel(&mut f, mid, worst.hi, cfg.base_order)?;
        err += left.error + right.error - worst.error;
        mass += left.mass + right.mass - worst.mass;
        heap.push(Ranked(left));
        heap.push(Ranked(right));
    }
    let mut panels: Vec<Panel> = heap.into_iter().map(|r| r.0).collect();
    panels.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let mut sum = KahanSum::default();
    let mut aux = [0.0; 2];
    let mut error = 0.0;
    let mut total_mass = 0.0;
    for p in &panels {
        sum.add(p.value);
        aux[0] += p.aux[0];
        aux[1] += p.aux[1];
        error += p.error;
        total_mass += p.mass;
    }
    let out = Adaptive {
        value: sum.value(),
        aux,
        error,
        mass: total_mass,
        panels: panels.len(),
    };
    if converged {
        Ok(out)
    } else {
        Err(Error::Tolerance {
            best: Box::new(IntegralResult {
                value: out.value,
                error_estimate: out.error,
                tail_bound: 0.0,
                panels_used: out.panels,
            }),
        })
    }
}

/// Adaptive Gauss–Legendre quadrature of `f` over `iv`. `osc` is an upper bound on the
/// oscillation frequency of f (cycles per unit length); it caps the panel width.
pub fn integrate_interval<F>(
    f: F,
    iv: Interval,
    cfg: &QuadConfig,
    osc: f64,
) -> Result<IntegralResult>
where
    F: Fn(f64) -> C64,
{
    let r = adaptive(
        |t| {
            Ok(Sample {
                value: f(t),
                aux: [0.0; 2],
            })
        },
        iv,
        cfg,
        osc,
    )?;
    Ok(IntegralResult {
        value: r.value,
        error_estimate: r.error,
        tail_bound: 0.0,
        panels_used: r.panels,
    })
}
