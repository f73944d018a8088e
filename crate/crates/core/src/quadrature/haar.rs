//! Haar integrals over the ax+b group (a⁻² da db) and the reduced Heisenberg group
//! (dp dq dθ).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::{adaptive, BCutoff, IntegralResult, QuadConfig, Sample};
use crate::error::{Error, Result};
use crate::interval::Interval;

/// Initial dimensionless cutoff of the certified policy.
pub const B_CUTOFF_FLOOR: f64 = 20.0;
/// The certified policy stops doubling here and reports whatever tail it reached.
pub const B_CUTOFF_MAX: f64 = 20.0 * 64.0;

/// The inner (non-compact) integral of a Haar integrand at one value of the outer variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceIntegral {
    pub value: C64,
    pub error: f64,
    /// Bound on the discarded tail of the inner integral.
    pub tail: f64,
    /// Integral of |F| over the retained window.
    pub mass: f64,
}

/// An integrand on the ax+b group, integrated in b for fixed a.
pub trait AxbIntegrand: Sync {
    /// ∫ F(b, a) db with dimensionless b-cutoff `big_b`.
    fn slice(&self, a: f64, big_b: f64, cfg: &QuadConfig) -> Result<SliceIntegral>;
}

/// An integrand on ℍ_r, integrated in q and θ for fixed p.
pub trait HeisIntegrand: Sync {
    /// ∫∫ F(p, q, θ) dq dθ with dimensionless q-cutoff `big_b`.
    fn slice(&self, p: f64, big_b: f64, cfg: &QuadConfig) -> Result<SliceIntegral>;
}

fn with_cutoff<G>(cfg: &QuadConfig, mut run: G) -> Result<IntegralResult>
where
    G: FnMut(f64) -> Result<(IntegralResult, f64)>,
{
    match cfg.b_cutoff {
        BCutoff::Fixed { b } => Ok(run(b)?.0),
        BCutoff::Certified { target_tail } => {
            let mut b = B_CUTOFF_FLOOR;
            loop {
                let (r, mass) = run(b)?;
                let target = cfg.abs_tol.max(target_tail * mass);
                if r.tail_bound <= target || b >= B_CUTOFF_MAX {
                    return Ok(r);
                }
                b *= 2.0;
            }
        }
    }
}

fn outer<S>(pieces: &[Interval], cfg: &QuadConfig, mut sample: S) -> Result<(IntegralResult, f64)>
where
    S: FnMut(f64) -> Result<Sample>,
{
    let mut out = IntegralResult::zero();
    let mut mass = 0.0;
    for iv in pieces {
        let r = match adaptive(&mut sample, *iv, cfg, 0.0) {
            Ok(r) => r,
            Err(Error::Tolerance { mut best }) => {
                best.value += out.value;
                best.error_estimate += out.error_estimate;
                best.panels_used += out.panels_used;
                return Err(Error::Tolerance { best });
            }
            Err(e) => return Err(e),
        };
        out.value += r.value;
        out.error_estimate += r.error;
        out.tail_bound += r.aux[0];
        out.panels_used += r.panels;
        mass += r.aux[1];
    }
    Ok((out, mass))
}

/// ∫∫ F(b,a) db a⁻² da over ℝ × `a_support`. The outer integral runs in u = ln a.
pub fn integrate_axb_haar<F: AxbIntegrand + ?Sized>(
    f: &F,
    a_support: &[Interval],
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    cfg.validate()?;
    if a_support.iter().any(|iv| !iv.is_empty() && iv.lo <= 0.0) {
        return Err(Error::Domain("a-support must lie in (0, ∞)".into()));
    }
    let logs: Vec<Interval> = a_support
        .iter()
        .filter(|iv| !iv.is_empty())
        .map(|iv| Interval::new(iv.lo.ln(), iv.hi.ln()))
        .collect();
    with_cutoff(cfg, |big_b| {
        outer(&logs, cfg, |u| {
            let a = u.exp();
            let s = f.slice(a, big_b, cfg)?;
            let w = 1.0 / a;
            Ok(Sample {
                value: s.value * w,
                aux: [s.tail * w, s.mass * w],
            })
        })
    })
}

/// ∫∫∫ F dp dq dθ with p restricted to `p_support`.
pub fn integrate_heis_haar<F: HeisIntegrand + ?Sized>(
    f: &F,
    p_support: &[Interval],
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    cfg.validate()?;
    with_cutoff(cfg, |big_b| {
        outer(p_support, cfg, |p| {
            let s = f.slice(p, big_b, cfg)?;
            Ok(Sample {
                value: s.value,
                aux: [s.tail, s.mass],
            })
        })
    })
}

/// A pointwise ax+b integrand with a caller-supplied decay constant C(a) such that
/// |F(b,a)| ≤ C(a)/b². The b-window at cutoff B is [−B, B].
pub struct PointwiseAxb<F, D> {
    pub f: F,
    pub decay: D,
    /// Bound on the oscillation frequency of F in b.
    pub osc: f64,
}

impl<F, D> AxbIntegrand for PointwiseAxb<F, D>
where
    F: Fn(f64, f64) -> C64 + Sync,
    D: Fn(f64) -> f64 + Sync,
{
    fn slice(&self, a: f64, big_b: f64, cfg: &QuadConfig) -> Result<SliceIntegral> {
        let r = adaptive(
            |b| {
                Ok(Sample {
                    value: (self.f)(b, a),
                    aux: [0.0; 2],
                })
            },
            Interval::new(-big_b, big_b),
            cfg,
            self.osc,
        )?;
        Ok(SliceIntegral {
            value: r.value,
            error: r.error,
            tail: 2.0 * (self.decay)(a) / big_b,
            mass: r.mass,
        })
    }
}

/// A pointwise ℍ_r integrand. θ is integrated by the periodic trapezoid rule with
/// 8·max_n+1 nodes; q over `q_support` when given (no tail), otherwise over [−B, B]
/// with tail 2·C(p)/B from |F| ≤ C(p)/q².
pub struct PointwiseHeis<F, D> {
    pub f: F,
    pub decay: D,
    pub q_support: Option<Interval>,
    pub max_n: usize,
    pub osc: f64,
}

/// Periodic trapezoid nodes on [0, 1) exact for frequencies up to `max_n`.
pub(crate) fn theta_nodes(max_n: usize) -> usize {
    8 * max_n + 1
}

impl<F, D> HeisIntegrand for PointwiseHeis<F, D>
where
    F: Fn(f64, f64, f64) -> C64 + Sync,
    D: Fn(f64) -> f64 + Sync,
{
    fn slice(&self, p: f64, big_b: f64, cfg: &QuadConfig) -> Result<SliceIntegral> {
        let nt = theta_nodes(self.max_n);
        let (window, tail) = match self.q_support {
            Some(iv) => (iv, 0.0),
            None => (Interval::new(-big_b, big_b), 2.0 * (self.decay)(p) / big_b),
        };
        let r = adaptive(
            |q| {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..nt {
                    acc += (self.f)(p, q, i as f64 / nt as f64);
                }
                Ok(Sample {
                    value: acc / nt as f64,
                    aux: [0.0; 2],
                })
            },
            window,
            cfg,
            self.osc,
        )?;
        Ok(SliceIntegral {
            value: r.value,
            error: r.error,
            tail,
            mass: r.mass,
        })
    }
}

/// (1/N) Σ_l e^{2πiνl/N}: the θ-trapezoid of a single character.
pub fn theta_character_sum(nu: i64, nodes: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for l in 0..nodes {
        acc += C64::from_polar(1.0, 2.0 * PI * nu as f64 * l as f64 / nodes as f64);
    }
    acc / nodes as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_integrand() {
        let f = PointwiseAxb {
            f: |_: f64, _: f64| C64::new(0.0, 0.0),
            decay: |_: f64| 0.0,
            osc: 0.0,
        };
        let r = integrate_axb_haar(&f, &[Interval::new(1.0, 2.0)], &QuadConfig::default()).unwrap();
        assert_eq!(r.value, C64::new(0.0, 0.0));
        assert_eq!(r.tail_bound, 0.0);
    }

    #[test]
    fn heis_unit_cube() {
        let f = PointwiseHeis {
            f: |_: f64, _: f64, _: f64| C64::new(1.0, 0.0),
            decay: |_: f64| 0.0,
            q_support: Some(Interval::new(0.0, 1.0)),
            max_n: 0,
            osc: 0.0,
        };
        let r =
            integrate_heis_haar(&f, &[Interval::new(0.0, 1.0)], &QuadConfig::default()).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn character_sums() {
        assert!((theta_character_sum(0, 17) - 1.0).norm() < 1e-15);
        for nu in 1..17 {
            assert!(theta_character_sum(nu, 17).norm() < 1e-14);
        }
        assert!((theta_character_sum(17, 17) - 1.0).norm() < 1e-13);
    }
}
