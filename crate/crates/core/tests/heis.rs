use approx::assert_relative_eq;
use fdlab::funcexpr::{inner_product, norm, random_bump_sum};
use fdlab::heis::{
    a_norm_heis, d_flat_heis, dtheta, heis_derivation_residuals, heis_l2_inner, key_estimate_heis, lambda0_coeff_eval,
    random_lambda0_term, random_sch_term, sch_apply, sch_coeff_eval, sch_coeff_eval_inner, HeisAlgebra, HeisElement,
    HrElem, Lambda0CoeffTerm, NormKind, SchCoeffTerm,
};
use fdlab::{DomainTag, FuncExpr, Measure, PlaneFunc, QuadConfig, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ONE: C64 = C64::new(1.0, 0.0);
const L: Measure = Measure::LebesgueLine;

fn sch(n: i64, xi: &FuncExpr, eta: &FuncExpr) -> SchCoeffTerm {
    SchCoeffTerm::new(n, xi.clone(), eta.clone(), ONE).unwrap()
}

fn sq(f: &FuncExpr) -> f64 {
    norm(f, L).unwrap().powi(2)
}

#[test]
fn group_law_and_action() {
    let (x, y, z) = (HeisElement::new(0.3, -1.2, 0.7), HeisElement::new(2.0, 0.5, 0.25), HeisElement::new(-0.4, 0.9, 0.1));
    assert!(x.mul(&y).mul(&z).dist(&x.mul(&y.mul(&z))) < 1e-14);
    assert!(x.mul(&x.inverse()).dist(&HeisElement::identity()) < 1e-14);
    assert_eq!(HeisElement::new(0.0, 0.0, 1.25).theta, 0.25);

    let xi = FuncExpr::bump(0.5, 0.7).modulate(0.3);
    for n in [1i64, -2, 3] {
        let two = sch_apply(n, &x, &sch_apply(n, &y, &xi).unwrap()).unwrap();
        let one = sch_apply(n, &x.mul(&y), &xi).unwrap();
        for i in 0..30 {
            let t = -1.0 + 0.2 * i as f64;
            assert!((two.eval(t) - one.eval(t)).norm() < 1e-13, "n = {n}, t = {t}");
        }
        assert_relative_eq!(sq(&one), sq(&xi), max_relative = 1e-12);
    }
    assert!(sch_apply(0, &x, &xi).is_err());
    assert!(SchCoeffTerm::new(0, xi.clone(), xi, ONE).is_err());
}

#[test]
fn coefficient_examples() {
    let xi = FuncExpr::bump(1.5, 0.5);
    let eta = FuncExpr::bump(1.0, 0.8).modulate(0.4);
    let g = HeisElement::new(0.3, 0.4, 0.1);
    // 30-digit references of e^{2πinθ}∫ ξ(t − p/2) conj η(t + p/2) e^{−2πinqt} dt.
    let frozen = [
        (1, C64::new(0.007_869_450_233_476_793, -0.003_255_830_322_853_161_6)),
        (-2, C64::new(-0.002_318_022_286_692_370_2, 0.008_734_733_315_566_919)),
    ];
    for (n, want) in frozen {
        let t = sch(n, &xi, &eta);
        assert!((sch_coeff_eval(&t, &g).unwrap() - want).norm() < 1e-13, "n = {n}");
        assert!((sch_coeff_eval_inner(&t, &g).unwrap() - want).norm() < 1e-13, "n = {n}");
    }
    let t = sch(1, &xi, &eta);
    let e = sch_coeff_eval(&t, &HeisElement::identity()).unwrap();
    assert!((e - inner_product(&xi, &eta, L).unwrap()).norm() < 1e-15);
    // The supports of ξ(· − 3) and η are disjoint.
    assert_eq!(sch_coeff_eval(&t, &HeisElement::new(3.0, 0.2, 0.0)).unwrap(), C64::new(0.0, 0.0));
    // θ only enters through e^{2πinθ}.
    let shifted = sch_coeff_eval(&t, &HeisElement::new(0.3, 0.4, 0.35)).unwrap();
    assert!((shifted - frozen[0].1 * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * 0.25)).norm() < 1e-13);
}

#[test]
fn lambda0_coefficient_is_a_translated_inner_product() {
    let xi = PlaneFunc::tensor(FuncExpr::bump(0.0, 1.0), FuncExpr::bump(0.5, 0.6).modulate(0.2));
    let eta = PlaneFunc::tensor(FuncExpr::bump(0.3, 0.9), FuncExpr::bump(0.7, 0.5));
    let t = Lambda0CoeffTerm::new(xi.clone(), eta.clone(), C64::new(0.0, 2.0));
    let g = HeisElement::new(0.2, 0.1, 0.4);
    let want = C64::new(0.0, 2.0)
        * inner_product(&FuncExpr::bump(0.0, 1.0).shift(0.2), &FuncExpr::bump(0.3, 0.9), L).unwrap()
        * inner_product(&FuncExpr::bump(0.5, 0.6).modulate(0.2).shift(0.1), &FuncExpr::bump(0.7, 0.5), L).unwrap();
    assert!((lambda0_coeff_eval(&t, &g).unwrap() - want).norm() < 1e-14);
    // λ₀ coefficients do not see θ.
    let g2 = HeisElement::new(0.2, 0.1, 0.9);
    assert_eq!(lambda0_coeff_eval(&t, &g).unwrap(), lambda0_coeff_eval(&t, &g2).unwrap());
}

#[test]
fn square_integrability_examples() {
    let cfg = QuadConfig::default();
    let b = FuncExpr::bump(1.5, 0.5);
    let frozen = 0.066_543_060_422_497_136;
    assert_relative_eq!(sq(&b), frozen, max_relative = 1e-12);
    let u = HrElem::sch(sch(2, &b, &b));
    let v = heis_l2_inner(&u, &u, &cfg).unwrap();
    // ‖b‖⁴/2 to 30 digits.
    assert_relative_eq!(v.value.re, 0.002_213_989_445_196_052_4, max_relative = 1e-9);

    let other = HrElem::sch(sch(3, &b, &b));
    assert!(heis_l2_inner(&u, &other, &cfg).unwrap().value.norm() < 1e-12);
    assert!(heis_l2_inner(&HrElem::default(), &u, &cfg).unwrap().value.norm() == 0.0);
}

#[test]
fn d_flat_examples() {
    let cfg = QuadConfig::default();
    let b = FuncExpr::bump(1.5, 0.5);
    let norm4 = 0.004_427_978_890_392_104_7;
    for n in [1i64, 2, -1, -3] {
        let f = HrElem::sch(sch(n, &b, &b));
        let d = d_flat_heis(&(&f).into(), &f.conj().into(), &cfg).unwrap();
        assert!((d.value.re - n.signum() as f64 * norm4).abs() < 1e-9 * norm4 + d.uncertainty(), "n = {n}");
        assert!(d.value.im.abs() < 1e-12);
    }
    // Same-character pairs integrate to zero over θ.
    let f = HrElem::sch(sch(1, &b, &b));
    assert!(d_flat_heis(&(&f).into(), &(&f).into(), &cfg).unwrap().value.norm() < 1e-14);
    // λ₀ terms are killed by ∂_θ.
    let z = HrElem::lambda0(Lambda0CoeffTerm::new(PlaneFunc::tensor(b.clone(), b.clone()), PlaneFunc::tensor(b.clone(), b.clone()), ONE));
    assert!(dtheta(&z).sch_terms.is_empty() && dtheta(&z).zero_terms.is_empty());
    assert_eq!(d_flat_heis(&(&z).into(), &f.conj().into(), &cfg).unwrap().value, C64::new(0.0, 0.0));
}

#[test]
fn a_norm_examples() {
    let (xi, eta) = (FuncExpr::bump(1.5, 0.5), FuncExpr::bump(0.2, 0.9).modulate(1.0));
    let nn = norm(&xi, L).unwrap() * norm(&eta, L).unwrap();
    let (v, kind) = a_norm_heis(&HrElem::sch(sch(1, &xi, &eta))).unwrap();
    assert_relative_eq!(v, nn, max_relative = 1e-10);
    assert_eq!(kind, NormKind::Exact);

    let two = HrElem::new(vec![sch(1, &xi, &eta), sch(-1, &xi, &eta)], vec![]);
    assert_relative_eq!(a_norm_heis(&two).unwrap().0, 2.0 * nn, max_relative = 1e-10);
    let same = HrElem::new(vec![sch(1, &xi, &eta), sch(1, &xi, &eta)], vec![]);
    assert_relative_eq!(a_norm_heis(&same).unwrap().0, 2.0 * nn, max_relative = 1e-8);

    let p = PlaneFunc::tensor(xi.clone(), eta.clone());
    let z = HrElem::new(vec![sch(1, &xi, &eta)], vec![Lambda0CoeffTerm::new(p.clone(), p, ONE)]);
    let (v, kind) = a_norm_heis(&z).unwrap();
    assert_eq!(kind, NormKind::UpperBound);
    assert_relative_eq!(v, nn + nn * nn, max_relative = 1e-10);
}

#[test]
fn key_estimate_and_derivation_examples() {
    let cfg = QuadConfig::default();
    let b = FuncExpr::bump(1.5, 0.5);
    let f = HrElem::sch(sch(1, &b, &b));
    let k = key_estimate_heis(&f, &f.conj(), &cfg).unwrap();
    // The estimate is attained here.
    assert!(k.margin.abs() < 1e-9 * k.product + k.d_flat.uncertainty());
    assert_eq!(k.kind, NormKind::Exact);

    let eta = FuncExpr::bump(1.2, 0.6).modulate(0.5);
    let g = HrElem::new(vec![sch(1, &b, &eta), sch(-2, &eta, &b)], vec![]);
    let (fa, ga): (HeisAlgebra, HeisAlgebra) = ((&f).into(), (&g).into());
    let r = heis_derivation_residuals(&fa, &ga.conj(), &fa.conj(), &cfg).unwrap();
    assert!(r.leibniz < 1e-8 * r.scale.max(1e-300) + r.uncertainty + 1e-15);
    assert!(r.antisym < 1e-8 * r.scale.max(1e-300) + r.uncertainty + 1e-15);
    assert!(r.key_margin.unwrap() > -1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn two_coefficient_paths_agree(seed in any::<u64>(), n in 1i64..6, neg in any::<bool>(), p in -1.5f64..1.5, q in -2.0f64..2.0, th in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = if neg { -n } else { n };
        let t = random_sch_term(&mut rng, n);
        let g = HeisElement::new(p, q, th);
        let scale = t.weight.norm() * norm(&t.xi, L).unwrap() * norm(&t.eta, L).unwrap();
        let a = sch_coeff_eval(&t, &g).unwrap();
        prop_assert!((a - sch_coeff_eval_inner(&t, &g).unwrap()).norm() <= 1e-10 * scale);
        prop_assert!(a.norm() <= scale * (1.0 + 1e-12));
    }

    #[test]
    fn conjugation_flips_the_character(seed in any::<u64>(), n in 1i64..5, p in -1.0f64..1.0, q in -1.0f64..1.0, th in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_sch_term(&mut rng, n);
        let c = t.conj();
        prop_assert_eq!(c.n, -n);
        let g = HeisElement::new(p, q, th);
        prop_assert!((sch_coeff_eval(&c, &g).unwrap() - sch_coeff_eval(&t, &g).unwrap().conj()).norm() <= 1e-13);
        let z = random_lambda0_term(&mut rng);
        prop_assert!((lambda0_coeff_eval(&z.conj(), &g).unwrap() - lambda0_coeff_eval(&z, &g).unwrap().conj()).norm() <= 1e-13);
    }

    #[test]
    fn square_norm_is_product_over_n(seed in any::<u64>(), n in 1i64..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = random_bump_sum(&mut rng, DomainTag::Line);
        let eta = random_bump_sum(&mut rng, DomainTag::Line);
        let u = HrElem::sch(sch(n, &xi, &eta));
        let v = heis_l2_inner(&u, &u, &QuadConfig::default()).unwrap();
        let want = sq(&xi) * sq(&eta) / n as f64;
        prop_assert!((v.value.re - want).abs() <= 1e-8 * want + v.uncertainty());
    }
}
