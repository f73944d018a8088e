use std::f64::consts::PI;

use approx::assert_relative_eq;
use fdlab::heis::{heis_l2_inner, HrElem, SchCoeffTerm};
use fdlab::quadrature::{
    fourier_tail_bound, integrate_axb_haar, integrate_heis_haar, integrate_interval, PointwiseAxb, PointwiseHeis,
};
use fdlab::{BCutoff, DomainTag, FuncExpr, Interval, Measure, QuadConfig, C64};
use proptest::prelude::*;

const ONE: C64 = C64::new(1.0, 0.0);

fn trapezoid(f: impl Fn(f64) -> C64, lo: f64, hi: f64, n: usize) -> C64 {
    let h = (hi - lo) / n as f64;
    let mut s = (f(lo) + f(hi)) * 0.5;
    for i in 1..n {
        s += f(lo + i as f64 * h);
    }
    s * h
}

fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

fn half(c: f64, r: f64) -> FuncExpr {
    FuncExpr::bump(c, r).with_domain(DomainTag::HalfLine).unwrap()
}

#[test]
fn constant_on_unit_interval() {
    let r = integrate_interval(|_| ONE, Interval::new(0.0, 1.0), &QuadConfig::default(), 0.0).unwrap();
    assert!((r.value - ONE).norm() < 1e-14);
    assert_eq!(r.tail_bound, 0.0);
}

#[test]
fn bump_against_trapezoid_oracle() {
    let b = FuncExpr::bump(0.0, 1.0);
    let frozen = 0.443_993_816_168_079_44;
    let oracle = trapezoid(|t| b.eval(t), -1.0, 1.0, 1_000_000);
    assert!((oracle.re - frozen).abs() < 1e-13);
    let r = integrate_interval(|t| b.eval(t), Interval::new(-1.0, 1.0), &QuadConfig::precise(), 0.0).unwrap();
    assert!((r.value.re - frozen).abs() < 1e-10);
    assert!(r.error_estimate >= 0.0);
}

#[test]
fn oscillatory_refinement_is_self_consistent() {
    let b = FuncExpr::bump(1.5, 0.5);
    let f = |t: f64| b.eval(t) * cis(2.0 * PI * 50.0 * t);
    let iv = Interval::new(1.0, 2.0);
    let cfg = QuadConfig::default();
    let osc = integrate_interval(f, iv, &cfg, 50.0).unwrap();
    let fine = integrate_interval(f, iv, &QuadConfig { max_panels: 8000, osc_panels_per_period: 16, ..cfg }, 50.0).unwrap();
    assert!((osc.value - fine.value).norm() < 1e-9);
    // 30-digit reference: 3.86152224907e-8 (the bump is smooth, so this is tiny).
    assert!((osc.value - C64::new(3.861_522_249_073_027e-8, 0.0)).norm() < 1e-12);
}

#[test]
fn exhausted_panels_report_tolerance_error() {
    let cfg = QuadConfig { max_panels: 4, rel_tol: 1e-14, ..QuadConfig::default() };
    let kink = |t: f64| C64::new((t - 1.3).abs().sqrt(), 0.0);
    match integrate_interval(kink, Interval::new(1.0, 2.0), &cfg, 0.0) {
        Err(fdlab::Error::Tolerance { best }) => {
            assert!(best.value.is_finite());
            assert!(best.error_estimate > 0.0);
            assert_eq!(best.panels_used, 4);
        }
        other => panic!("expected a tolerance error, got {other:?}"),
    }
    // Too many oscillation panels for the budget: no estimate at all.
    let b = FuncExpr::bump(1.5, 0.5);
    let r = integrate_interval(|t| b.eval(t) * cis(2.0 * PI * 80.0 * t), Interval::new(1.0, 2.0), &cfg, 80.0);
    assert!(matches!(r, Err(fdlab::Error::Tolerance { best }) if best.value.is_nan()));
}

#[test]
fn tail_bound_examples() {
    let b = half(1.5, 0.5);
    let t50 = fourier_tail_bound(&b, &b, 50.0);
    let t100 = fourier_tail_bound(&b, &b, 100.0);
    assert_relative_eq!(t100, t50 / 2.0, max_relative = 1e-15);
    assert!(fourier_tail_bound(&b, &b, 1e9) < 1e-9);
    // max_a ‖(b(a·)b/t)''‖₁ / (2π²B) from a 4001-point a-grid and second differences on
    // 2·10⁵ points; the library samples 129 values of a.
    let oracle = 0.002_112_038_628;
    assert!(t50 <= oracle * (1.0 + 1e-6));
    assert!(t50 >= oracle * 0.99);
}

#[test]
fn axb_haar_separable() {
    let u = FuncExpr::bump(0.0, 1.5);
    let v = FuncExpr::bump(1.5, 0.5);
    let f = PointwiseAxb { f: |b: f64, a: f64| u.eval(b) * v.eval(a), decay: |_: f64| 0.0, osc: 0.0 };
    let r = integrate_axb_haar(&f, &[Interval::new(1.0, 2.0)], &QuadConfig::default().with_cutoff(BCutoff::Fixed { b: 2.0 }))
        .unwrap();
    let ub = trapezoid(|b| u.eval(b), -1.5, 1.5, 100_000);
    let va = trapezoid(|a| v.eval(a) / (a * a), 1.0, 2.0, 100_000);
    assert!((r.value - ub * va).norm() < 1e-11);

    let z = PointwiseAxb { f: |_: f64, _: f64| C64::new(0.0, 0.0), decay: |_: f64| 0.0, osc: 0.0 };
    assert_eq!(integrate_axb_haar(&z, &[Interval::new(1.0, 2.0)], &QuadConfig::default()).unwrap().value, C64::new(0.0, 0.0));
    assert!(integrate_axb_haar(&z, &[Interval::new(-1.0, 2.0)], &QuadConfig::default()).is_err());
}

#[test]
fn heis_haar_examples() {
    let one = PointwiseHeis {
        f: |_: f64, _: f64, _: f64| ONE,
        decay: |_: f64| 0.0,
        q_support: Some(Interval::new(0.0, 1.0)),
        max_n: 1,
        osc: 0.0,
    };
    let r = integrate_heis_haar(&one, &[Interval::new(0.0, 1.0)], &QuadConfig::default()).unwrap();
    assert!((r.value - ONE).norm() < 1e-14);

    let b = FuncExpr::bump(0.5, 0.5);
    for n in [1i64, 2, 5] {
        let ch = PointwiseHeis {
            f: |p: f64, q: f64, th: f64| b.eval(p) * b.eval(q) * cis(2.0 * PI * n as f64 * th),
            decay: |_: f64| 0.0,
            q_support: Some(Interval::new(0.0, 1.0)),
            max_n: n as usize,
            osc: 0.0,
        };
        let r = integrate_heis_haar(&ch, &[Interval::new(0.0, 1.0)], &QuadConfig::default()).unwrap();
        assert!(r.value.norm() < 1e-15, "n = {n}");
    }

    // |ξ∗σ₁η|² integrates to ‖ξ‖²‖η‖².
    let xi = FuncExpr::bump(1.5, 0.5);
    let eta = FuncExpr::bump(1.0, 0.8).modulate(0.4);
    let u = HrElem::sch(SchCoeffTerm::new(1, xi.clone(), eta.clone(), ONE).unwrap());
    let v = heis_l2_inner(&u, &u, &QuadConfig::default()).unwrap();
    let nx = fdlab::funcexpr::inner_product(&xi, &xi, Measure::LebesgueLine).unwrap().re;
    let ne = fdlab::funcexpr::inner_product(&eta, &eta, Measure::LebesgueLine).unwrap().re;
    assert!((v.value.re - nx * ne).abs() < 1e-9 * nx * ne + v.uncertainty());
}

#[test]
fn results_are_bit_identical_across_runs() {
    let b = FuncExpr::bump(1.5, 0.5);
    let run = || integrate_interval(|t| b.eval(t) * cis(2.0 * PI * 7.0 * t), Interval::new(1.0, 2.0), &QuadConfig::default(), 7.0).unwrap();
    let (x, y) = (run(), run());
    assert_eq!(x.value.re.to_bits(), y.value.re.to_bits());
    assert_eq!(x.value.im.to_bits(), y.value.im.to_bits());
    assert_eq!(x.panels_used, y.panels_used);
}

#[test]
fn halving_rel_tol_never_worsens_the_oracle_error() {
    let b = FuncExpr::bump(0.0, 1.0);
    let oracle = C64::new(0.443_993_816_168_079_44, 0.0);
    let mut tol = 1e-3;
    let mut prev = f64::INFINITY;
    while tol > 1e-12 {
        let cfg = QuadConfig::default().with_rel_tol(tol);
        let e = (integrate_interval(|t| b.eval(t), Interval::new(-1.0, 1.0), &cfg, 0.0).unwrap().value - oracle).norm();
        assert!(e <= prev + 8.0 * f64::EPSILON, "rel_tol {tol:e}: {e:e} after {prev:e}");
        prev = e;
        tol /= 2.0;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linearity(c1 in -2.0f64..2.0, c2 in -2.0f64..2.0, w in 0.0f64..30.0) {
        let f = FuncExpr::bump(1.2, 0.6);
        let g = FuncExpr::bump(1.6, 0.3).modulate(w);
        let iv = Interval::new(0.5, 2.0);
        let cfg = QuadConfig::default();
        let i = |h: &dyn Fn(f64) -> C64| integrate_interval(h, iv, &cfg, w).unwrap();
        let fi = i(&|t| f.eval(t));
        let gi = i(&|t| g.eval(t));
        let both = i(&|t| f.eval(t) * c1 + g.eval(t) * c2);
        let err = fi.error_estimate * c1.abs() + gi.error_estimate * c2.abs() + both.error_estimate;
        prop_assert!((both.value - (fi.value * c1 + gi.value * c2)).norm() <= err + 1e-15);
    }

    #[test]
    fn truncation_is_certified(b1 in 0.8f64..2.0, b2 in 0.8f64..2.0, r in 0.3f64..0.7) {
        // |full − truncated| ≤ tail_bound with the full value taken at ten times the cutoff.
        let xi = half(b1, r.min(b1 - 0.2));
        let eta = half(b2, 0.5);
        let t = fdlab::axb::CoeffTerm::new(fdlab::axb::AxbRep::Plus, xi, eta, ONE).unwrap();
        let u = fdlab::axb::CoeffSum::new(vec![t]);
        let short = fdlab::axb::l2g_inner(&u, &u, &QuadConfig::default().with_cutoff(BCutoff::Fixed { b: 5.0 })).unwrap();
        let long = fdlab::axb::l2g_inner(&u, &u, &QuadConfig::default().with_cutoff(BCutoff::Fixed { b: 50.0 })).unwrap();
        prop_assert!(short.tail_bound > 0.0);
        prop_assert!((long.value - short.value).norm() <= short.tail_bound + short.error_estimate + long.uncertainty());
    }
}
