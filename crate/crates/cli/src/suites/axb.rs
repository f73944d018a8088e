use std::f64::consts::PI;

use fdlab::axb::{
    a_norm, coeff_eval, coeff_eval_fourier, coeff_eval_inner, d_flat, derivation_residuals, l2g_inner, madb,
    madb_algebra, random_term, rep_apply, AlgebraElem, AlgebraTerm, AxbElement, AxbRep, CoeffSum, CoeffTerm,
};
use fdlab::funcexpr::{inner_product, norm, random_bump_sum};
use fdlab::{interval, DomainTag, FuncExpr, Interval, Measure, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{re, Case, Outcome, Suite, ONE, ZERO};

const H: Measure = Measure::HaarHalfLine;

fn hnorm(f: &FuncExpr) -> f64 {
    norm(f, H).expect("norm of a bump sum")
}

fn rep(rng: &mut ChaCha8Rng) -> AxbRep {
    if rng.gen_bool(0.5) {
        AxbRep::Plus
    } else {
        AxbRep::Minus
    }
}

fn half_line(rng: &mut ChaCha8Rng) -> FuncExpr {
    random_bump_sum(rng, DomainTag::HalfLine)
}

/// A random term rescaled so that |w|·‖ξ‖·‖η‖ = 1.
fn unit_term(rng: &mut ChaCha8Rng, r: AxbRep) -> CoeffTerm {
    let t = random_term(rng, r);
    let s = t.weight.norm() * hnorm(&t.xi) * hnorm(&t.eta);
    t.scaled(re(1.0 / s))
}

/// A point of `ivs`, away from the edges.
fn inside(rng: &mut ChaCha8Rng, ivs: &[Interval]) -> f64 {
    let iv = interval::hull(ivs).expect("non-empty support");
    iv.lo + iv.len() * rng.gen_range(0.1..0.9)
}

fn point_for(rng: &mut ChaCha8Rng, t: &CoeffTerm, b_max: f64) -> AxbElement {
    let b = rng.gen_range(-b_max..=b_max);
    let a = inside(rng, &t.a_support());
    AxbElement::new(b, a).expect("a > 0")
}

fn random_point(rng: &mut ChaCha8Rng) -> AxbElement {
    AxbElement::new(rng.gen_range(-3.0..=3.0), rng.gen_range(0.3..=3.0)).expect("a > 0")
}

fn single(t: CoeffTerm) -> AlgebraElem {
    AlgebraElem::from(CoeffSum::new(vec![t]))
}

fn product(s: CoeffTerm, t: CoeffTerm) -> AlgebraElem {
    AlgebraElem::new(vec![AlgebraTerm { weight: ONE, factors: vec![s, t] }]).expect("two factors")
}

/// Two unit terms whose a-supports overlap, so their product is not identically zero.
fn overlapping_pair(rng: &mut ChaCha8Rng) -> (CoeffTerm, CoeffTerm) {
    loop {
        let (r1, r2) = (rep(rng), rep(rng));
        let s = unit_term(rng, r1);
        let t = unit_term(rng, r2);
        if interval::total_len(&interval::intersect(&s.a_support(), &t.a_support())) > 0.05 {
            return (s, t);
        }
    }
}

/// Fourth-order central difference in b.
fn d_db(f: impl Fn(f64) -> fdlab::Result<C64>, b: f64, h: f64) -> fdlab::Result<C64> {
    Ok((-f(b + 2.0 * h)? + f(b + h)? * 8.0 - f(b - h)? * 8.0 + f(b - 2.0 * h)?) / (12.0 * h))
}

/// −(1/2πi)·a·∂_b.
fn madb_fd(f: impl Fn(&AxbElement) -> fdlab::Result<C64>, g: &AxbElement, h: f64) -> fdlab::Result<C64> {
    let d = d_db(|b| f(&AxbElement { b, a: g.a }), g.b, h)?;
    Ok(C64::new(0.0, g.a / (2.0 * PI)) * d)
}

pub const REP_UNITARITY: Suite = Suite {
    id: "axb.rep_unitarity",
    statement: "‖π±(b,a)ξ‖_ℋ = ‖ξ‖_ℋ in ℋ = L²(ℝ₊*, dt/t)",
    reference: "ax+b group: the realization π±(b,a)ξ(t) = e^{∓2πibt}ξ(at)",
    residual: "|‖π(g)ξ‖ − ‖ξ‖| / ‖ξ‖",
    tolerance: 1e-10,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "random (ξ, g, sign)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let r = rep(rng);
                let xi = half_line(rng);
                let g = random_point(rng);
                Case::new(
                    &json!({ "rep": r, "xi": xi, "g": g }),
                    Box::new(move |_| {
                        let lhs = norm(&rep_apply(r, &g, &xi), H)?;
                        let rhs = hnorm(&xi);
                        Ok(vec![Outcome::rel("norm", re(lhs), re(rhs), rhs)])
                    }),
                )
            })
            .collect()
    },
};

pub const REP_HOMOMORPHISM: Suite = Suite {
    id: "axb.rep_homomorphism",
    statement: "π(g₁)π(g₂)ξ = π(g₁g₂)ξ pointwise",
    reference: "ax+b group: group law (b,a)(b',a') = (b+ab', aa') and the realization of π±",
    residual: "max over 20 random t of |π(g₁)π(g₂)ξ(t) − π(g₁g₂)ξ(t)|",
    tolerance: 1e-12,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "random (ξ, g₁, g₂, sign)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let r = rep(rng);
                let xi = half_line(rng);
                let (g1, g2) = (random_point(rng), random_point(rng));
                let ts: Vec<f64> = (0..20).map(|_| rng.gen_range(0.05..6.0)).collect();
                Case::new(
                    &json!({ "rep": r, "xi": xi, "g1": g1, "g2": g2, "t": ts }),
                    Box::new(move |_| {
                        let lhs = rep_apply(r, &g1, &rep_apply(r, &g2, &xi));
                        let rhs = rep_apply(r, &g1.mul(&g2), &xi);
                        let worst = ts
                            .iter()
                            .map(|&t| (lhs.eval(t), rhs.eval(t)))
                            .max_by(|x, y| (x.0 - x.1).norm().total_cmp(&(y.0 - y.1).norm()))
                            .unwrap_or((ZERO, ZERO));
                        Ok(vec![Outcome::abs("pointwise", worst.0, worst.1)])
                    }),
                )
            })
            .collect()
    },
};

pub const COEFF_TWO_PATH: Suite = Suite {
    id: "axb.coeff_two_path",
    statement: "(ξ∗π±η)(b,a) by the explicit integral equals ⟨π±(b,a)ξ, η⟩_ℋ and ℱ(K⁻¹(ξ(a·)η̄))(±b)",
    reference: "ax+b group: explicit form of the coefficient functions and its Fourier-transform rewriting",
    residual: "|direct − other path| / (|w|‖ξ‖‖η‖)",
    tolerance: 1e-8,
    label_tolerances: &[],
    default_size: 50,
    size_unit: "random (term, g)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let r = rep(rng);
                let t = random_term(rng, r);
                let g = if rng.gen_bool(0.8) { point_for(rng, &t, 3.0) } else { random_point(rng) };
                Case::new(
                    &json!({ "term": t, "g": g }),
                    Box::new(move |_| {
                        let scale = t.weight.norm() * hnorm(&t.xi) * hnorm(&t.eta);
                        let direct = coeff_eval(&t, &g)?;
                        Ok(vec![
                            Outcome::rel("inner", direct, coeff_eval_inner(&t, &g)?, scale),
                            Outcome::rel("fourier", direct, coeff_eval_fourier(&t, &g)?, scale),
                        ])
                    }),
                )
            })
            .collect()
    },
};

pub const CONJ_SYMMETRY: Suite = Suite {
    id: "axb.conj_symmetry",
    statement: "conj(ξ∗π₊η) = ξ̄∗π₋η̄ (and with the signs swapped)",
    reference: "ax+b group: conjugating a π₊ coefficient gives a π₋ coefficient",
    residual: "|conj(value) − value of the conjugate term| / (|w|‖ξ‖‖η‖)",
    tolerance: 1e-10,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "random (term, g)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let r = rep(rng);
                let t = random_term(rng, r);
                let g = point_for(rng, &t, 3.0);
                Case::new(
                    &json!({ "term": t, "g": g }),
                    Box::new(move |_| {
                        let scale = t.weight.norm() * hnorm(&t.xi) * hnorm(&t.eta);
                        let lhs = coeff_eval(&t, &g)?.conj();
                        let rhs = coeff_eval(&t.conj(), &g)?;
                        Ok(vec![Outcome::rel("conj", lhs, rhs, scale)])
                    }),
                )
            })
            .collect()
    },
};

/// ⟨η₂,η₁⟩⟨K^{-1/2}ξ₁, K^{-1/2}ξ₂⟩ and the product of the four norms.
fn orthogonality_rhs(xi1: &FuncExpr, eta1: &FuncExpr, xi2: &FuncExpr, eta2: &FuncExpr) -> fdlab::Result<(C64, f64)> {
    let k1 = xi1.clone().power_weight(-0.5)?;
    let k2 = xi2.clone().power_weight(-0.5)?;
    let v = inner_product(eta2, eta1, H)? * inner_product(&k1, &k2, H)?;
    let scale = hnorm(eta1) * hnorm(eta2) * hnorm(&k1) * hnorm(&k2);
    Ok((v, scale))
}

/// The seeded quadruples (ξ₁, η₁, ξ₂, η₂) of the orthogonality suite.
pub fn orthogonality_corpus(rng: &mut ChaCha8Rng, size: usize) -> Vec<[FuncExpr; 4]> {
    (0..size)
        .map(|_| {
            let xi1 = half_line(rng);
            let eta1 = half_line(rng);
            // Half of the quadruples share vectors so that the inner products are large.
            if rng.gen_bool(0.5) {
                let xi2 = FuncExpr::sum(vec![xi1.clone(), half_line(rng).scale(re(0.3))]);
                let eta2 = FuncExpr::sum(vec![eta1.clone(), half_line(rng).scale(re(0.3))]);
                [xi1, eta1, xi2, eta2]
            } else {
                [xi1, eta1, half_line(rng), half_line(rng)]
            }
        })
        .collect()
}

pub const ORTHOGONALITY: Suite = Suite {
    id: "axb.orthogonality",
    statement: "⟨ξ₁∗π±η₁, ξ₂∗π±η₂⟩_{L²(G)} = ⟨η₂,η₁⟩⟨K^{-1/2}ξ₁, K^{-1/2}ξ₂⟩ and ⟨ξ₁∗π₊η₁, ξ₂∗π₋η₂⟩ = 0",
    reference: "ax+b group: explicit orthogonality relations with the Duflo–Moore operator K",
    residual: "same_*: |lhs − rhs| / (‖η₁‖‖η₂‖‖K^{-1/2}ξ₁‖‖K^{-1/2}ξ₂‖); cross: |lhs|; tail: largest b-tail certificate / (‖ξ₁∗η₁‖‖ξ₂∗η₂‖), the Cauchy–Schwarz scale of the inner products",
    tolerance: 1e-6,
    label_tolerances: &[("tail", 1e-8)],
    default_size: 20,
    size_unit: "random quadruples (ξ₁, η₁, ξ₂, η₂)",
    build: |rng, p| {
        orthogonality_corpus(rng, p.size)
            .into_iter()
            .map(|[xi1, eta1, xi2, eta2]| {
                Case::new(
                    &json!({ "xi1": xi1, "eta1": eta1, "xi2": xi2, "eta2": eta2 }),
                    Box::new(move |cfg| {
                        let (rhs, scale) = orthogonality_rhs(&xi1, &eta1, &xi2, &eta2)?;
                        let term = |r, x: &FuncExpr, e: &FuncExpr| {
                            CoeffTerm::new(r, x.clone(), e.clone(), ONE).map(|t| CoeffSum::new(vec![t]))
                        };
                        let p1 = term(AxbRep::Plus, &xi1, &eta1)?;
                        let p2 = term(AxbRep::Plus, &xi2, &eta2)?;
                        let m1 = term(AxbRep::Minus, &xi1, &eta1)?;
                        let m2 = term(AxbRep::Minus, &xi2, &eta2)?;
                        let pp = l2g_inner(&p1, &p2, cfg)?;
                        let mm = l2g_inner(&m1, &m2, cfg)?;
                        let pm = l2g_inner(&p1, &m2, cfg)?;
                        let tail = pp.tail_bound.max(mm.tail_bound).max(pm.tail_bound);
                        Ok(vec![
                            Outcome::rel("same_plus", pp.value, rhs, scale).with_tail(pp.uncertainty() / scale),
                            Outcome::rel("same_minus", mm.value, rhs, scale).with_tail(mm.uncertainty() / scale),
                            Outcome::abs("cross", pm.value, ZERO).with_tail(pm.uncertainty()),
                            Outcome::custom("tail", re(tail), re(scale), tail / scale),
                        ])
                    }),
                )
            })
            .collect()
    },
};

pub const MADB_FD: Suite = Suite {
    id: "axb.madb_fd",
    statement: "M_a∂_b(ξ∗π±η) = ±(Kξ)∗π±η with M_a∂_b = −(1/2πi)·a·∂_b",
    reference: "ax+b group: the derivative formula for coefficient functions",
    residual: "|FD(−a∂_b/2πi) − coeff(madb term)| / (|w|‖Kξ‖‖η‖), fourth-order central difference, h = 1e-4",
    tolerance: 1e-6,
    label_tolerances: &[],
    default_size: 50,
    size_unit: "random (term, g)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let r = rep(rng);
                let t = random_term(rng, r);
                let g = point_for(rng, &t, 2.0);
                Case::new(
                    &json!({ "term": t, "g": g }),
                    Box::new(move |_| {
                        let m = madb(&t);
                        let scale = t.weight.norm() * hnorm(&m.xi) * hnorm(&t.eta);
                        let lhs = madb_fd(|x| coeff_eval(&t, x), &g, 1e-4)?;
                        let rhs = coeff_eval(&m, &g)?;
                        Ok(vec![Outcome::rel("fd", lhs, rhs, scale)])
                    }),
                )
            })
            .collect()
    },
};

pub const MADB_ALGEBRA_FD: Suite = Suite {
    id: "axb.madb_algebra_fd",
    statement: "M_a∂_b of a product of coefficient functions follows the product rule",
    reference: "ax+b group: M_a∂_b maps the algebra generated by convenient functions into A ∩ L¹",
    residual: "|FD − product-rule value| / Σᵢ Πⱼ(|wⱼ|‖ξⱼ‖‖ηⱼ‖ with ξᵢ → Kξᵢ)",
    tolerance: 1e-6,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "random two-factor products with a point",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let (s, t) = overlapping_pair(rng);
                let a = inside(rng, &interval::intersect(&s.a_support(), &t.a_support()));
                let g = AxbElement::new(rng.gen_range(-1.5..=1.5), a).expect("a > 0");
                Case::new(
                    &json!({ "factors": [s, t], "g": g }),
                    Box::new(move |_| {
                        let n = |x: &CoeffTerm| x.weight.norm() * hnorm(&x.xi) * hnorm(&x.eta);
                        let scale = n(&madb(&s)) * n(&t) + n(&s) * n(&madb(&t));
                        let f = product(s.clone(), t.clone());
                        let lhs = madb_fd(|x| f.eval(x), &g, 1e-4)?;
                        let rhs = madb_algebra(&f).eval(&g)?;
                        Ok(vec![Outcome::rel("fd", lhs, rhs, scale)])
                    }),
                )
            })
            .collect()
    },
};

/// 1–4 unit terms of random sign.
fn coeff_sum(rng: &mut ChaCha8Rng, max_terms: usize) -> CoeffSum {
    let k = rng.gen_range(1..=max_terms);
    CoeffSum::new((0..k).map(|_| { let r = rep(rng); unit_term(rng, r) }).collect())
}

pub const KEY_ESTIMATE: Suite = Suite {
    id: "axb.key_estimate",
    statement: "|D♭(f,g)| ≤ ‖f‖_A‖g‖_A and D♭(f,g) + D♭(g,f) = 0 on convenient sums",
    reference: "ax+b group: the key estimate for D♭(f,g) = ∫(M_a∂_b f)g dμ and its antisymmetry",
    residual: "key: max(0, |D♭| − ‖f‖_A‖g‖_A) / (‖f‖_A‖g‖_A); antisym: |D♭(f,g) + D♭(g,f)|",
    tolerance: 1e-6,
    label_tolerances: &[],
    default_size: 200,
    size_unit: "random pairs of sums of at most 4 unit-norm terms",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let f = coeff_sum(rng, 4);
                let g = match rng.gen_range(0..4) {
                    // Pairings against the conjugate give the large values of D♭.
                    0 => f.conj(),
                    1 => {
                        let mut g = f.conj();
                        g.terms.truncate(1);
                        g.terms.extend(coeff_sum(rng, 2).terms);
                        g
                    }
                    _ => coeff_sum(rng, 4),
                };
                Case::new(
                    &json!({ "f": f, "g": g }),
                    Box::new(move |cfg| {
                        let (fa, ga) = (AlgebraElem::from(&f), AlgebraElem::from(&g));
                        let d_fg = d_flat(&fa, &ga, cfg)?;
                        let d_gf = d_flat(&ga, &fa, cfg)?;
                        let prod = a_norm(&f)? * a_norm(&g)?;
                        let d = d_fg.value.norm();
                        Ok(vec![
                            Outcome::custom("key", re(d), re(prod), (d - prod).max(0.0) / prod)
                                .with_tail(d_fg.uncertainty() / prod),
                            Outcome::abs("antisym", d_fg.value, -d_gf.value)
                                .with_tail(d_fg.uncertainty() + d_gf.uncertainty()),
                        ])
                    }),
                )
            })
            .collect()
    },
};

pub const NONVANISHING: Suite = Suite {
    id: "axb.nonvanishing",
    statement: "D♭(ξ∗π₊ξ, conj(ξ∗π₊ξ)) = ‖ξ‖⁴, so the key estimate is attained",
    reference: "ax+b group: the derivation D♭ is non-zero on ξ∗π₊ξ paired with its conjugate",
    residual: "value: |D♭ − ‖ξ‖⁴| / ‖ξ‖⁴; tight: (‖f‖_A‖conj f‖_A − |D♭|) / ‖ξ‖⁴",
    tolerance: 1e-6,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "random ξ",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let xi = half_line(rng);
                Case::new(
                    &json!({ "xi": xi }),
                    Box::new(move |cfg| {
                        let t = CoeffTerm::new(AxbRep::Plus, xi.clone(), xi.clone(), ONE)?;
                        let s = CoeffSum::new(vec![t]);
                        let d = d_flat(&AlgebraElem::from(&s), &AlgebraElem::from(s.conj()), cfg)?;
                        let n4 = hnorm(&xi).powi(4);
                        let prod = a_norm(&s)? * a_norm(&s.conj())?;
                        Ok(vec![
                            Outcome::rel("value", d.value, re(n4), n4).with_tail(d.uncertainty() / n4),
                            Outcome::custom("tight", re(d.value.norm()), re(prod), (prod - d.value.norm()).abs() / n4)
                                .with_tail(d.uncertainty() / n4),
                        ])
                    }),
                )
            })
            .collect()
    },
};

/// A sum of 1–2 unit terms or, with `genuine`, a product of two overlapping unit terms.
fn leibniz_element(rng: &mut ChaCha8Rng, genuine: bool) -> AlgebraElem {
    if genuine {
        let (s, t) = overlapping_pair(rng);
        product(s, t)
    } else {
        AlgebraElem::from(coeff_sum(rng, 2))
    }
}

pub const LEIBNIZ: Suite = Suite {
    id: "axb.leibniz",
    statement: "D♭(fg,h) = D♭(g,hf) + D♭(f,gh)",
    reference: "continuous extension of derivations: the Leibniz condition, for the ax+b group",
    residual: "|D♭(fg,h) − D♭(g,hf) − D♭(f,gh)| (label leibniz_product when one of f, g, h is itself a two-factor product)",
    tolerance: 1e-6,
    label_tolerances: &[],
    default_size: 50,
    size_unit: "random triples (3 in 5 contain a two-factor product)",
    build: |rng, p| {
        (0..p.size)
            .map(|i| {
                let genuine = i % 5 < 3;
                let which = if genuine { rng.gen_range(0..3) } else { 3 };
                let f = leibniz_element(rng, which == 0);
                let g = leibniz_element(rng, which == 1);
                let h = leibniz_element(rng, which == 2);
                Case::new(
                    &json!({ "f": f, "g": g, "h": h }),
                    Box::new(move |cfg| {
                        let r = derivation_residuals(&f, &g, &h, cfg)?;
                        let label = if genuine { "leibniz_product" } else { "leibniz" };
                        Ok(vec![Outcome::custom(label, re(r.leibniz), ZERO, r.leibniz).with_tail(r.uncertainty)])
                    }),
                )
            })
            .collect()
    },
};

pub const A_NORM: Suite = Suite {
    id: "axb.a_norm",
    statement: "‖ξ∗η‖_A = ‖ξ‖‖η‖, the A-norm is ℓ¹ across the two signs and across orthogonal pieces",
    reference: "ax+b group: ℓ¹-direct sum decomposition A(G) = A_{π₊} ⊕₁ A_{π₋} with trace norms",
    residual: "|a_norm − expected| / expected",
    tolerance: 1e-10,
    label_tolerances: &[],
    default_size: 10,
    size_unit: "random vector pairs",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let xi = half_line(rng);
                let eta = half_line(rng);
                // Shifted copies have supports in [5.1, ∞), disjoint from the first pair.
                let xi2 = half_line(rng).shift(5.0);
                let eta2 = half_line(rng).shift(5.0);
                Case::new(
                    &json!({ "xi": xi, "eta": eta, "xi2": xi2, "eta2": eta2 }),
                    Box::new(move |_| {
                        let t = |r, x: &FuncExpr, e: &FuncExpr| CoeffTerm::new(r, x.clone(), e.clone(), ONE);
                        let n1 = hnorm(&xi) * hnorm(&eta);
                        let n2 = hnorm(&xi2) * hnorm(&eta2);
                        let one = a_norm(&CoeffSum::new(vec![t(AxbRep::Plus, &xi, &eta)?]))?;
                        let both = a_norm(&CoeffSum::new(vec![t(AxbRep::Plus, &xi, &eta)?, t(AxbRep::Minus, &xi, &eta)?]))?;
                        let disjoint = a_norm(&CoeffSum::new(vec![t(AxbRep::Plus, &xi, &eta)?, t(AxbRep::Plus, &xi2, &eta2)?]))?;
                        Ok(vec![
                            Outcome::rel("rank_one", re(one), re(n1), n1),
                            Outcome::rel("cross_sign", re(both), re(2.0 * n1), 2.0 * n1),
                            Outcome::rel("disjoint", re(disjoint), re(n1 + n2), n1 + n2),
                        ])
                    }),
                )
            })
            .collect()
    },
};

pub const D_FLAT_VALUES: Suite = Suite {
    id: "axb.d_flat_values",
    statement: "D♭(ξ₁∗π₊η₁, conj(ξ₂∗π₊η₂)) = ⟨ξ₁,ξ₂⟩⟨η₂,η₁⟩ and D♭ vanishes on pairs from the plus part",
    reference: "ax+b group: evaluation of D♭ on rank-one coefficient functions in the proof of the key estimate",
    residual: "|lhs − rhs| / (‖ξ₁‖‖ξ₂‖‖η₁‖‖η₂‖)",
    tolerance: 1e-6,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "random quadruples",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let [xi1, eta1, xi2, eta2] = orthogonality_corpus(rng, 1).pop().expect("one quadruple");
                Case::new(
                    &json!({ "xi1": xi1, "eta1": eta1, "xi2": xi2, "eta2": eta2 }),
                    Box::new(move |cfg| {
                        let f = single(CoeffTerm::new(AxbRep::Plus, xi1.clone(), eta1.clone(), ONE)?);
                        let g1 = single(CoeffTerm::new(AxbRep::Plus, xi2.clone(), eta2.clone(), ONE)?);
                        let scale = hnorm(&xi1) * hnorm(&xi2) * hnorm(&eta1) * hnorm(&eta2);
                        let want = inner_product(&xi1, &xi2, H)? * inner_product(&eta2, &eta1, H)?;
                        let pair = d_flat(&f, &g1.conj(), cfg)?;
                        let plus = d_flat(&f, &g1, cfg)?;
                        Ok(vec![
                            Outcome::rel("pairing", pair.value, want, scale).with_tail(pair.uncertainty() / scale),
                            Outcome::rel("plus_plus", plus.value, ZERO, scale).with_tail(plus.uncertainty() / scale),
                        ])
                    }),
                )
            })
            .collect()
    },
};
