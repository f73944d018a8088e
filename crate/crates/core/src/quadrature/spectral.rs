//! Slices of products of Fourier-type factors, integrated on a uniform grid.
//!
//! A spectral factor is φ(x) = ℱh(n·(x−c)/d) (optionally conjugated) for a compactly
//! supported kernel h, with ℱh(y) = ∫ h(s) e^{−2πiys} ds. A product of such factors is
//! band-limited in x, so the trapezoid rule with step below the inverse bandwidth is exact
//! up to truncation of the x-range. Truncation is certified with
//! |ℱh(y)| ≤ ‖h^(k)‖₁ / (2π|y|)^k, choosing k per factor.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use super::haar::SliceIntegral;
use super::{adaptive, gauss_legendre, QuadConfig, Sample};
use crate::funcexpr::FuncExpr;
use crate::interval::{self, Interval};
use crate::jet::{factorial, Jet};

/// Highest derivative order used in tail certificates.
pub const TAIL_MAX_ORDER: usize = 8;

/// Oversampling margin (in units of 1/feature) against aliasing of sampled kernels.
const ALIAS_MARGIN: f64 = 60.0;
/// Safety factor on the bandwidth condition for the x-grid.
const BAND_SAFETY: f64 = 1.05;
/// Derivative norms are accumulated on a sub-grid with this many points per feature length.
const NORM_POINTS_PER_FEATURE: f64 = 12.0;
/// Margin on the sampled derivative norms.
const NORM_SAFETY: f64 = 1.5;
/// Gauss–Legendre order per panel when a profile is evaluated directly.
const DIRECT_ORDER: usize = 24;

const ZERO: C64 = C64::new(0.0, 0.0);

/// A compactly supported kernel h.
pub trait Kernel: Sync {
    fn support(&self) -> Vec<Interval>;
    /// Smallest length scale of h.
    fn feature(&self) -> f64;
    fn eval(&self, s: f64) -> C64;
    fn jet(&self, s: f64, len: usize) -> Jet;
}

pub enum SliceFactor<'a> {
    /// x ↦ ℱh(n·(x−c)/d), conjugated when `conj` is set.
    Spectral {
        kernel: &'a dyn Kernel,
        n: f64,
        center: f64,
        dilation: f64,
        conj: bool,
    },
    /// A smooth factor vanishing outside `support`, sampled on the grid x_k = k·dx for
    /// k_lo ≤ k ≤ k_hi by `sample(k_lo, k_hi, dx)`.
    Compact {
        support: Interval,
        feature: f64,
        sample: &'a (dyn Fn(i64, i64, f64) -> Vec<C64> + Sync),
    },
}

/// weight · Π factors[i].
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub weight: C64,
    pub factors: Vec<usize>,
}

struct Geometry {
    zero: bool,
    hull: Interval,
    tmax: f64,
    feature: f64,
    reach: f64,
}

fn geometry(f: &SliceFactor, big_b: f64) -> Geometry {
    match f {
        SliceFactor::Spectral {
            kernel,
            n,
            dilation,
            ..
        } => {
            let supp = kernel.support();
            match interval::hull(&supp) {
                None => Geometry {
                    zero: true,
                    hull: Interval::new(0.0, 0.0),
                    tmax: 0.0,
                    feature: 1.0,
                    reach: 0.0,
                },
                Some(h) => {
                    // A sliver of a smooth kernel needs fine sampling but is not
                    // broader in frequency than the kernel it was cut from.
                    let smooth = kernel.feature();
                    Geometry {
                        zero: false,
                        hull: h,
                        tmax: h.max_abs(),
                        feature: smooth.min(h.len()),
                        reach: big_b * dilation / (n.abs() * smooth),
                    }
                }
            }
        }
        SliceFactor::Compact {
            support, feature, ..
        } => Geometry {
            zero: support.is_empty(),
            hull: *support,
            tmax: 0.0,
            feature: *feature,
            reach: 0.0,
        },
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

/// Smallest 2^a·3^b·5^c ≥ n.
fn fast_size(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p5 = 1usize;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            let mut m = p35;
            while m < n {
                m *= 2;
            }
            best = best.min(m);
            p35 *= 3;
        }
        p5 *= 5;
    }
    best
}

struct Profile {
    values: Vec<C64>,
    /// Decay constants E_k with |φ(x)| ≤ E_k / |x − c|^k.
    decay: [f64; TAIL_MAX_ORDER + 1],
}

#[allow(clippy::too_many_arguments)]
fn spectral_profile(
    kernel: &dyn Kernel,
    n: f64,
    center: f64,
    dilation: f64,
    conj: bool,
    geo: &Geometry,
    k_lo: i64,
    k_hi: i64,
    dx: f64,
) -> Profile {
    let x_lo = k_lo as f64 * dx;
    let x_hi = k_hi as f64 * dx;
    let y_max = n.abs() * (x_lo - center).abs().max((x_hi - center).abs()) / dilation;
    let h_max = 1.0 / (2.0 * y_max + ALIAS_MARGIN / geo.feature);
    let dy = n.abs() * dx / dilation;
    let nfft = fast_size(((1.0 / (h_max * dy)).ceil() as usize).max(16));
    let hs = 1.0 / (nfft as f64 * dy);
    let s_lo = geo.hull.lo;
    let m = ((geo.hull.len() / hs).floor() as usize + 1).min(nfft);
    let y0 = -n * center / dilation;
    let supp = kernel.support();

    // Short kernels force a fine sampling step for few output values.
    let count = (k_hi - k_lo + 1) as usize;
    let panels = (geo.hull.len() / geo.feature).ceil() as usize + (y_max * geo.hull.len()).ceil() as usize;
    let direct_cost = count * panels.max(1) * DIRECT_ORDER;
    if direct_cost < nfft * (usize::BITS - nfft.leading_zeros()) as usize {
        return direct_profile(kernel, n, y0, dilation, conj, geo, panels.max(1), k_lo, k_hi, dx);
    }

    let stride = ((geo.feature / (NORM_POINTS_PER_FEATURE * hs)).floor() as usize).max(1);
    let fact: [f64; TAIL_MAX_ORDER + 1] = std::array::from_fn(factorial);
    let mut buf = vec![ZERO; nfft];
    let mut l1 = [0.0f64; TAIL_MAX_ORDER + 1];
    for (i, slot) in buf.iter_mut().enumerate().take(m) {
        let s = s_lo + i as f64 * hs;
        if !supp.iter().any(|iv| iv.contains(s)) {
            continue;
        }
        let v = kernel.eval(s);
        *slot = if y0 != 0.0 {
            v * C64::from_polar(1.0, -2.0 * PI * y0 * s)
        } else {
            v
        };
        if i % stride == 0 {
            let j = kernel.jet(s, TAIL_MAX_ORDER + 1);
            for (k, acc) in l1.iter_mut().enumerate() {
                *acc += j.c[k].norm_sqr().sqrt() * fact[k];
            }
        }
    }
    fft_plan(nfft).process(&mut buf);

    let sgn = n.signum() as i64;
    let nn = nfft as i64;
    // Phase e^{−2πi·l·dy·s_lo} by recurrence, resynchronized every 64 nodes.
    let step = C64::from_polar(1.0, -2.0 * PI * sgn as f64 * dy * s_lo);
    let mut phase = C64::new(0.0, 0.0);
    let values = (k_lo..=k_hi)
        .enumerate()
        .map(|(i, k)| {
            let l = sgn * k;
            if i % 64 == 0 {
                phase = C64::from_polar(hs, -2.0 * PI * l as f64 * dy * s_lo);
            } else {
                phase *= step;
            }
            let v = buf[l.rem_euclid(nn) as usize] * phase;
            if conj {
                v.conj()
            } else {
                v
            }
        })
        .collect();

    let mut decay = [0.0; TAIL_MAX_ORDER + 1];
    let scale = dilation / (2.0 * PI * n.abs());
    for (k, e) in decay.iter_mut().enumerate() {
        *e = NORM_SAFETY * l1[k] * hs * stride as f64 * scale.powi(k as i32);
    }
    Profile { values, decay }
}

/// The profile by Gauss–Legendre quadrature of ℱh at each grid point.
#[allow(clippy::too_many_arguments)]
fn direct_profile(
    kernel: &dyn Kernel,
    n: f64,
    y0: f64,
    dilation: f64,
    conj: bool,
    geo: &Geometry,
    panels: usize,
    k_lo: i64,
    k_hi: i64,
    dx: f64,
) -> Profile {
    let rule = gauss_legendre(DIRECT_ORDER);
    let supp = kernel.support();
    let width = geo.hull.len() / panels as f64;
    let fact: [f64; TAIL_MAX_ORDER + 1] = std::array::from_fn(factorial);
    let mut nodes = Vec::with_capacity(panels * DIRECT_ORDER);
    let mut l1 = [0.0f64; TAIL_MAX_ORDER + 1];
    for p in 0..panels {
        let mid = geo.hull.lo + (p as f64 + 0.5) * width;
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let s = mid + 0.5 * width * t;
            if !supp.iter().any(|iv| iv.contains(s)) {
                continue;
            }
            let w = 0.5 * width * w;
            let v = kernel.eval(s);
            if v != ZERO {
                nodes.push((s, w * v));
            }
            let j = kernel.jet(s, TAIL_MAX_ORDER + 1);
            for (k, acc) in l1.iter_mut().enumerate() {
                *acc += w * j.c[k].norm() * fact[k];
            }
        }
    }
    let dy = n * dx / dilation;
    let mut values = vec![ZERO; (k_hi - k_lo + 1) as usize];
    for &(s, wv) in &nodes {
        let step = C64::from_polar(1.0, -2.0 * PI * dy * s);
        let mut phase = ZERO;
        for (i, slot) in values.iter_mut().enumerate() {
            if i % 64 == 0 {
                let y = dy * (k_lo + i as i64) as f64 + y0;
                phase = C64::from_polar(1.0, -2.0 * PI * y * s);
            } else {
                phase *= step;
            }
            *slot += wv * phase;
        }
    }
    if conj {
        values.iter_mut().for_each(|v| *v = v.conj());
    }
    let mut decay = [0.0; TAIL_MAX_ORDER + 1];
    let scale = dilation / (2.0 * PI * n.abs());
    for (k, e) in decay.iter_mut().enumerate() {
        *e = NORM_SAFETY * l1[k] * scale.powi(k as i32);
    }
    Profile { values, decay }
}

/// Bound on ∫ over x outside [lo, hi] of |Π φ_j| for spectral factors with centers in
/// (lo, hi): Π E_{j,k_j} · (d_R^{1−K} + d_L^{1−K}) / (K − 1), K = Σ k_j ≥ 2.
fn product_tail(decays: &[&[f64; TAIL_MAX_ORDER + 1]], d_left: f64, d_right: f64) -> f64 {
    if decays.is_empty() {
        return 0.0;
    }
    let dmin = d_left.min(d_right);
    let mut ks: Vec<usize> = decays
        .iter()
        .map(|e| {
            (0..=TAIL_MAX_ORDER)
                .min_by(|&i, &j| {
                    let ri = e[i] / dmin.powi(i as i32);
                    let rj = e[j] / dmin.powi(j as i32);
                    ri.total_cmp(&rj)
                })
                .unwrap_or(0)
        })
        .collect();
    while ks.iter().sum::<usize>() < 2 {
        // Raise the order where it costs least.
        let (best, _) = ks
            .iter()
            .enumerate()
            .filter(|(_, &k)| k < TAIL_MAX_ORDER)
            .map(|(j, &k)| {
                (
                    j,
                    decays[j][k + 1] / (decays[j][k].max(f64::MIN_POSITIVE) * dmin),
                )
            })
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("some order can be raised");
        ks[best] += 1;
    }
    let big_k = ks.iter().sum::<usize>() as f64;
    let coef: f64 = decays.iter().zip(&ks).map(|(e, &k)| e[k]).product();
    coef * (d_right.powf(1.0 - big_k) + d_left.powf(1.0 - big_k)) / (big_k - 1.0)
}

/// Integrates Σ_m w_m Π_{j∈m} φ_j over the real line at dimensionless cutoff `big_b`.
pub fn integrate_slice(
    factors: &[SliceFactor],
    monomials: &[Monomial],
    big_b: f64,
) -> SliceIntegral {
    let geo: Vec<Geometry> = factors.iter().map(|f| geometry(f, big_b)).collect();

    struct Live {
        weight: C64,
        factors: Vec<usize>,
        lo: f64,
        hi: f64,
        compact: bool,
    }
    let mut live = Vec::new();
    let mut inv_step: f64 = 0.0;
    for m in monomials {
        if m.weight == ZERO || m.factors.iter().any(|&j| geo[j].zero) {
            continue;
        }
        let mut band = 0.0;
        let mut extent: f64 = 0.0;
        let mut compact_iv: Option<Interval> = None;
        let mut compact_feature = f64::INFINITY;
        let mut c_lo = f64::INFINITY;
        let mut c_hi = f64::NEG_INFINITY;
        let mut reach = f64::INFINITY;
        let mut dead = false;
        for &j in &m.factors {
            match &factors[j] {
                SliceFactor::Spectral {
                    n,
                    center,
                    dilation,
                    ..
                } => {
                    band += n.abs() * geo[j].tmax / dilation;
                    extent = extent.max(n.abs() * geo[j].hull.len() / dilation);
                    c_lo = c_lo.min(*center);
                    c_hi = c_hi.max(*center);
                    // The product is negligible once its fastest-decaying factor is.
                    reach = reach.min(geo[j].reach);
                }
                SliceFactor::Compact {
                    support, feature, ..
                } => {
                    compact_feature = compact_feature.min(*feature);
                    compact_iv = match compact_iv {
                        None => Some(*support),
                        Some(iv) => iv.intersect(support),
                    };
                    if compact_iv.is_none() {
                        dead = true;
                    }
                }
            }
        }
        if dead {
            continue;
        }
        let compact = compact_iv.is_some();
        let (lo, hi) = match compact_iv {
            Some(iv) => (iv.lo, iv.hi),
            None => (c_lo - reach, c_hi + reach),
        };
        let mut need = BAND_SAFETY * band.max(extent);
        if compact {
            need += ALIAS_MARGIN / compact_feature;
        }
        inv_step = inv_step.max(need + 1e-3);
        live.push(Live {
            weight: m.weight,
            factors: m.factors.clone(),
            lo,
            hi,
            compact,
        });
    }
    if live.is_empty() {
        return SliceIntegral {
            value: ZERO,
            error: 0.0,
            tail: 0.0,
            mass: 0.0,
        };
    }
    let dx = 1.0 / inv_step;
    let lo = live.iter().map(|m| m.lo).fold(f64::INFINITY, f64::min);
    let hi = live.iter().map(|m| m.hi).fold(f64::NEG_INFINITY, f64::max);
    let k_lo = (lo / dx).floor() as i64 - 1;
    let k_hi = (hi / dx).ceil() as i64 + 1;
    let count = (k_hi - k_lo + 1) as usize;

    let mut used = vec![false; factors.len()];
    for m in &live {
        for &j in &m.factors {
            used[j] = true;
        }
    }
    let mut profiles: Vec<Option<Profile>> = Vec::with_capacity(factors.len());
    for (j, f) in factors.iter().enumerate() {
        if !used[j] {
            profiles.push(None);
            continue;
        }
        let p = match f {
            SliceFactor::Spectral {
                kernel,
                n,
                center,
                dilation,
                conj,
            } => spectral_profile(
                *kernel, *n, *center, *dilation, *conj, &geo[j], k_lo, k_hi, dx,
            ),
            SliceFactor::Compact { sample, .. } => {
                let values = sample(k_lo, k_hi, dx);
                debug_assert_eq!(values.len(), count);
                Profile {
                    values,
                    decay: [0.0; TAIL_MAX_ORDER + 1],
                }
            }
        };
        profiles.push(Some(p));
    }

    let mut sum = super::KahanSum::default();
    let mut mass = 0.0;
    for i in 0..count {
        let x = (k_lo + i as i64) as f64 * dx;
        let mut v = ZERO;
        for m in &live {
            if x < m.lo - dx || x > m.hi + dx {
                continue;
            }
            let mut p = m.weight;
            for &j in &m.factors {
                p *= profiles[j].as_ref().expect("profile computed").values[i];
            }
            v += p;
        }
        sum.add(v);
        mass += v.norm_sqr().sqrt();
    }

    let mut tail = 0.0;
    for m in &live {
        if m.compact {
            continue;
        }
        let mut decays = Vec::new();
        let mut c_lo = f64::INFINITY;
        let mut c_hi = f64::NEG_INFINITY;
        for &j in &m.factors {
            if let SliceFactor::Spectral { center, .. } = &factors[j] {
                decays.push(&profiles[j].as_ref().expect("profile computed").decay);
                c_lo = c_lo.min(*center);
                c_hi = c_hi.max(*center);
            }
        }
        tail += m.weight.norm() * product_tail(&decays, c_lo - m.lo, m.hi - c_hi);
    }

    let value = sum.value() * dx;
    let mass = mass * dx;
    SliceIntegral {
        value,
        error: mass * f64::EPSILON * (count as f64).sqrt(),
        tail,
        mass,
    }
}

/// Rigorous-in-b bound on ∫_{|b|>B} |ℱ(g_a)(b)| db with g_a(t) = ξ(at)·conj(η(t))/t,
/// using |ℱg(b)| ≤ ‖g''‖₁/(4π²b²) and the maximum of ‖g_a''‖₁ over sampled a in the
/// a-support of ξ∗η.
pub fn fourier_tail_bound(xi: &FuncExpr, eta: &FuncExpr, big_b: f64) -> f64 {
    let (Some(sx), Some(se)) = (
        interval::hull(&xi.support()),
        interval::hull(&eta.support()),
    ) else {
        return 0.0;
    };
    if sx.lo <= 0.0 || se.lo <= 0.0 {
        return f64::INFINITY;
    }
    let a_lo = sx.lo / se.hi;
    let a_hi = sx.hi / se.lo;
    let samples = 129;
    let cfg = QuadConfig {
        rel_tol: 1e-8,
        ..QuadConfig::default()
    };
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let a = a_lo * (a_hi / a_lo).powf(i as f64 / (samples - 1) as f64);
        let common = interval::intersect(
            &xi.support()
                .iter()
                .map(|iv| iv.scale(1.0 / a))
                .collect::<Vec<_>>(),
            &eta.support(),
        );
        let mut norm = 0.0;
        for iv in common {
            let r = adaptive(
                |t| {
                    let j = xi
                        .eval_jet(a * t, 3)
                        .dilate(a)
                        .mul(&eta.eval_jet(t, 3).conj())
                        .mul(&Jet::power(t, -1.0, 3));
                    Ok(Sample {
                        value: C64::new(j.derivative(2).norm(), 0.0),
                        aux: [0.0; 2],
                    })
                },
                iv,
                &cfg,
                0.0,
            )
            .map(|r| r.value.re)
            .unwrap_or(f64::INFINITY);
            norm += r;
        }
        worst = worst.max(norm);
    }
    worst / (4.0 * PI * PI) * 2.0 / big_b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_interval;

    struct BumpKernel(FuncExpr);
    impl Kernel for BumpKernel {
        fn support(&self) -> Vec<Interval> {
            self.0.support()
        }
        fn feature(&self) -> f64 {
            self.0.feature_scale()
        }
        fn eval(&self, s: f64) -> C64 {
            self.0.eval(s)
        }
        fn jet(&self, s: f64, len: usize) -> Jet {
            self.0.eval_jet(s, len)
        }
    }

    #[test]
    fn fast_sizes() {
        assert_eq!(fast_size(1000), 1000);
        assert_eq!(fast_size(1001), 1024);
        assert_eq!(fast_size(7), 8);
        assert_eq!(fast_size(1025), 1080);
    }

    #[test]
    fn plancherel_on_one_factor_pair() {
        // ∫ |ℱh|² = ∫ |h|².
        let k = BumpKernel(FuncExpr::bump(1.2, 0.4));
        let factors = [
            SliceFactor::Spectral {
                kernel: &k,
                n: 1.0,
                center: 0.0,
                dilation: 1.0,
                conj: false,
            },
            SliceFactor::Spectral {
                kernel: &k,
                n: 1.0,
                center: 0.0,
                dilation: 1.0,
                conj: true,
            },
        ];
        let mono = [Monomial {
            weight: C64::new(1.0, 0.0),
            factors: vec![0, 1],
        }];
        let s = integrate_slice(&factors, &mono, 40.0);
        let want = integrate_interval(
            |t| C64::new(k.eval(t).norm_sqr(), 0.0),
            Interval::new(0.8, 1.6),
            &QuadConfig::precise(),
            0.0,
        )
        .unwrap()
        .value;
        assert!((s.value - want).norm() < 1e-12, "{} vs {}", s.value, want);
        assert!(s.tail < 1e-8 * want.re);
    }

    #[test]
    fn shifted_and_scaled_factor_matches_direct_quadrature() {
        let k = BumpKernel(FuncExpr::bump(0.7, 0.3).modulate(0.5));
        let (n, c, d) = (-2.0, 0.4, 1.7);
        let f = [SliceFactor::Spectral {
            kernel: &k,
            n,
            center: c,
            dilation: d,
            conj: false,
        }];
        let s = integrate_slice(
            &f,
            &[Monomial {
                weight: C64::new(1.0, 0.0),
                factors: vec![0],
            }],
            200.0,
        );
        // ∫ ℱh(n(x−c)/d) dx = (d/|n|)·h(0) = 0 here since 0 ∉ supp h.
        assert!(s.value.norm() < 1e-10, "{}", s.value);
        let k2 = BumpKernel(FuncExpr::bump(0.1, 0.3));
        let f2 = [SliceFactor::Spectral {
            kernel: &k2,
            n,
            center: c,
            dilation: d,
            conj: false,
        }];
        let s2 = integrate_slice(
            &f2,
            &[Monomial {
                weight: C64::new(1.0, 0.0),
                factors: vec![0],
            }],
            400.0,
        );
        let want = d / n.abs() * k2.eval(0.0).re;
        assert!(
            (s2.value.re - want).abs() < 1e-6 * want,
            "{} vs {want}",
            s2.value
        );
        assert!((s2.value.re - want).abs() <= s2.tail + 1e-12);
    }
}
