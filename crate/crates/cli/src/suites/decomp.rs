use fdlab::axb::{l2g_inner, AxbElement, AxbRep, CoeffSum, CoeffTerm};
use fdlab::decomp::{ftw_identity_points, heis_translation_formula_check, lambda_conv_points, L2GSample};
use fdlab::funcexpr::{inner_product, norm, random_bump_sum};
use fdlab::heis::HeisElement;
use fdlab::{interval, DomainTag, FuncExpr, Measure, PlaneFunc};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::axb::orthogonality_corpus;
use super::{corpus_rng, re, Case, Outcome, Params, Suite, ONE, ZERO};

const H: Measure = Measure::HaarHalfLine;

fn half_line(rng: &mut ChaCha8Rng) -> FuncExpr {
    random_bump_sum(rng, DomainTag::HalfLine)
}

/// Ten points (b, a), the first with b = 0, most with a where ξ(ta)η(t) is not identically zero.
fn ftw_points(rng: &mut ChaCha8Rng, xi: &FuncExpr, eta: &FuncExpr) -> Vec<AxbElement> {
    let t = CoeffTerm::new(AxbRep::Plus, xi.clone(), eta.clone(), ONE).expect("half-line vectors");
    let iv = interval::hull(&t.a_support()).expect("non-empty support");
    (0..10)
        .map(|i| {
            let a = if rng.gen_bool(0.8) { iv.lo + iv.len() * rng.gen_range(0.05..0.95) } else { rng.gen_range(0.2..4.0) };
            let b = if i == 0 { 0.0 } else { rng.gen_range(-3.0..=3.0) };
            AxbElement::new(b, a).expect("a > 0")
        })
        .collect()
}

fn ftw_build(rng: &mut ChaCha8Rng, p: &Params, mirrored: bool) -> Vec<Case> {
    (0..p.size)
        .map(|_| {
            let eta = half_line(rng);
            let xi = half_line(rng);
            let points = ftw_points(rng, &xi, &eta);
            Case::new(
                &json!({ "eta": eta, "xi": xi, "points": points, "mirrored": mirrored }),
                Box::new(move |_| {
                    Ok(ftw_identity_points(&eta, &xi, &points, mirrored)?
                        .into_iter()
                        .enumerate()
                        .map(|(i, r)| {
                            let label = if i == 0 { "b=0".to_string() } else { format!("point{i}") };
                            Outcome::custom(label, r.lhs, r.rhs, r.residual)
                        })
                        .collect())
                }),
            )
        })
        .collect()
}

pub const W_ISOMETRY: Suite = Suite {
    id: "decomp.w_isometry",
    statement: "WF(b,a) = F(b,|b|a) preserves the L² norm for db·da/a",
    reference: "appendix, identification of L²(G) with L²(ℝ×ℝ₊*): the map W is an isometric isomorphism",
    residual: "|‖WF‖ − ‖F‖| / ‖F‖, both by nested quadrature; scaling: |residual(cF) − residual(F)|",
    tolerance: 1e-6,
    label_tolerances: &[("scaling", 1e-12)],
    default_size: 10,
    size_unit: "random separable F(b,a) = u(b)v(a)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let u = random_bump_sum(rng, DomainTag::Line).shift(rng.gen_range(-3.0..0.0));
                let v = half_line(rng);
                let c = super::re(rng.gen_range(0.2..5.0));
                Case::new(
                    &json!({ "u": u, "v": v, "c": c.re }),
                    Box::new(move |cfg| {
                        let f = L2GSample::separable(u.clone(), v.clone())?;
                        let r = fdlab::decomp::w_isometry_check(&f, cfg)?;
                        let rc = fdlab::decomp::w_isometry_check(&f.scaled(c), cfg)?;
                        Ok(vec![
                            Outcome::custom("isometry", re(r), ZERO, r),
                            Outcome::custom("scaling", re(rc), re(r), (rc - r).abs()),
                        ])
                    }),
                )
            })
            .collect()
    },
};

pub const FTW: Suite = Suite {
    id: "decomp.ftw",
    statement: "(ℱ⊗I)W(η⊗ξ)(b,a) = (ξ∗π₊conj(Kη))(b,a)",
    reference: "appendix, the Fourier transform in b of W(η⊗ξ) is a π₊ coefficient function",
    residual: "|lhs − rhs| at each of 10 points per input (the first at b = 0)",
    tolerance: 1e-5,
    label_tolerances: &[],
    default_size: 10,
    size_unit: "random (η, ξ) with 10 points each",
    build: |rng, p| ftw_build(rng, p, false),
};

pub const FTW_MIRRORED: Suite = Suite {
    id: "decomp.ftw_mirrored",
    statement: "(ℱ⊗I)W(η̌⊗ξ)(b,a) = (ξ∗π₋conj(Kη))(b,a) for η̌(t) = η(−t)",
    reference: "appendix, the mirrored case of the Fourier-transform identity, which gives π₋ coefficients",
    residual: "|lhs − rhs| at each of 10 points per input (the first at b = 0)",
    tolerance: 1e-5,
    label_tolerances: &[],
    default_size: 10,
    size_unit: "random (η, ξ) with 10 points each",
    build: |rng, p| ftw_build(rng, p, true),
};

pub const LAMBDA_CONV: Suite = Suite {
    id: "decomp.lambda_conv",
    statement: "⟨λ(x)(ξ∗π₊η), ξ'∗π₊η'⟩ = ⟨K^{-1/2}ξ, K^{-1/2}ξ'⟩(η̄∗π₋η̄')(x) and ⟨λ(x)(ξ∗π₊η), ξ'∗π₋η'⟩ = 0",
    reference: "appendix, left translates of π₊ coefficients against π± coefficients in L²(G)",
    residual: "same: |lhs − rhs|; cross: |lhs|; 10 points per input",
    tolerance: 1e-5,
    label_tolerances: &[("cross", 1e-6)],
    default_size: 5,
    size_unit: "random quadruples with 10 translation points each",
    build: |rng, p| {
        orthogonality_corpus(rng, p.size)
            .into_iter()
            .map(|[xi, eta, xi2, eta2]| {
                let points: Vec<AxbElement> = (0..10)
                    .map(|i| {
                        if i == 0 {
                            AxbElement::identity()
                        } else {
                            AxbElement::new(rng.gen_range(-2.0..=2.0), rng.gen_range(0.5..=2.0)).expect("a > 0")
                        }
                    })
                    .collect();
                Case::new(
                    &json!({ "xi": xi, "eta": eta, "xi2": xi2, "eta2": eta2, "points": points }),
                    Box::new(move |cfg| {
                        let mut out = Vec::new();
                        for (i, r) in lambda_conv_points(&xi, &eta, &xi2, &eta2, &points, cfg)?.into_iter().enumerate() {
                            out.push(Outcome::abs(format!("same/x{i}"), r.lhs.value, r.rhs).with_tail(r.lhs.uncertainty()));
                            out.push(Outcome::abs(format!("cross/x{i}"), r.cross.value, ZERO).with_tail(r.cross.uncertainty()));
                        }
                        Ok(out)
                    }),
                )
            })
            .collect()
    },
};

pub const LAMBDA_CONV_IDENTITY: Suite = Suite {
    id: "decomp.lambda_conv_identity",
    statement: "at x = e the translated identity reduces to ⟨ξ∗π₊η, ξ'∗π₊η'⟩ = ⟨η',η⟩⟨K^{-1/2}ξ, K^{-1/2}ξ'⟩",
    reference: "appendix translated identity at the identity element against the ax+b orthogonality relations",
    residual: "|lhs − rhs| / (‖η‖‖η'‖‖K^{-1/2}ξ‖‖K^{-1/2}ξ'‖); orthogonality compares with the L²(G) inner product of axb.orthogonality, closed_form with the 1D formula",
    tolerance: 1e-6,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "the seeded quadruples of axb.orthogonality",
    build: |_, p| {
        // The corpus of axb.orthogonality, so that the two suites check the same values.
        let mut rng = corpus_rng(p.seed, "axb.orthogonality");
        orthogonality_corpus(&mut rng, p.size)
            .into_iter()
            .map(|[xi, eta, xi2, eta2]| {
                Case::new(
                    &json!({ "xi1": xi, "eta1": eta, "xi2": xi2, "eta2": eta2 }),
                    Box::new(move |cfg| {
                        let e = [AxbElement::identity()];
                        let r = lambda_conv_points(&xi, &eta, &xi2, &eta2, &e, cfg)?[0];
                        let u = CoeffSum::new(vec![CoeffTerm::new(AxbRep::Plus, xi.clone(), eta.clone(), ONE)?]);
                        let w = CoeffSum::new(vec![CoeffTerm::new(AxbRep::Plus, xi2.clone(), eta2.clone(), ONE)?]);
                        let l2 = l2g_inner(&u, &w, cfg)?;
                        let k1 = xi.clone().power_weight(-0.5)?;
                        let k2 = xi2.clone().power_weight(-0.5)?;
                        let closed = inner_product(&eta2, &eta, H)? * inner_product(&k1, &k2, H)?;
                        let scale = norm(&eta, H)? * norm(&eta2, H)? * norm(&k1, H)? * norm(&k2, H)?;
                        let tail = (r.lhs.uncertainty() + l2.uncertainty()) / scale;
                        Ok(vec![
                            Outcome::rel("orthogonality", r.lhs.value, l2.value, scale).with_tail(tail),
                            Outcome::rel("closed_form", r.lhs.value, closed, scale).with_tail(r.lhs.uncertainty() / scale),
                            Outcome::rel("rhs_closed_form", r.rhs, closed, scale),
                        ])
                    }),
                )
            })
            .collect()
    },
};

pub const HEIS_TRANSLATION: Suite = Suite {
    id: "decomp.heis_translation",
    statement: "λ(x,y,θ)(f⊗χₙ)(x',y',θ') = e^{−2πinθ}e^{πin(−xy'+x'y)}f(x'−x, y'−y)χₙ(θ')",
    reference: "appendix, left translation of f⊗χₙ on the reduced Heisenberg group",
    residual: "|translate through the group law − closed form|; n cycles through −3, …, 3",
    tolerance: 1e-10,
    label_tolerances: &[],
    default_size: 21,
    size_unit: "random (f, g, g')",
    build: |rng, p| {
        (0..p.size)
            .map(|i| {
                let n = (i % 7) as i64 - 3;
                let f = PlaneFunc::tensor(random_bump_sum(rng, DomainTag::Line), random_bump_sum(rng, DomainTag::Line));
                let g = HeisElement::new(rng.gen_range(-2.0..=2.0), rng.gen_range(-2.0..=2.0), rng.gen_range(0.0..1.0));
                // g' − g lands in the support of f for most draws.
                let g2 = HeisElement::new(
                    g.p + rng.gen_range(0.0..=4.5),
                    g.q + rng.gen_range(0.0..=4.5),
                    rng.gen_range(0.0..1.0),
                );
                Case::new(
                    &json!({ "f": f, "n": n, "g": g, "g2": g2 }),
                    Box::new(move |_| {
                        let r = heis_translation_formula_check(&f, n, &g, &g2);
                        Ok(vec![Outcome::custom(format!("n={n}"), re(r), ZERO, r)])
                    }),
                )
            })
            .collect()
    },
};
