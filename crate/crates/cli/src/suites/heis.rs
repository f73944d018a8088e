use std::f64::consts::PI;

use fdlab::funcexpr::{inner_product, norm, random_bump_sum};
use fdlab::heis::{
    a_norm_heis, d_flat_heis, dtheta, heis_derivation_residuals, heis_l2_inner, key_estimate_heis, random_lambda0_term,
    random_sch_term, sch_apply, sch_coeff_eval, sch_coeff_eval_inner, HeisAlgebra, HeisElement, HrElem,
    Lambda0CoeffTerm, NormKind, SchCoeffTerm,
};
use fdlab::{interval, DomainTag, FuncExpr, Measure, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{re, Case, Outcome, Suite, ONE, ZERO};

const L: Measure = Measure::LebesgueLine;

fn lnorm(f: &FuncExpr) -> f64 {
    norm(f, L).expect("norm of a bump sum")
}

fn line(rng: &mut ChaCha8Rng) -> FuncExpr {
    random_bump_sum(rng, DomainTag::Line)
}

/// Non-zero n with |n| ≤ max.
fn random_n(rng: &mut ChaCha8Rng, max: i64) -> i64 {
    let k = rng.gen_range(1..=max);
    if rng.gen_bool(0.5) {
        k
    } else {
        -k
    }
}

fn random_element(rng: &mut ChaCha8Rng) -> HeisElement {
    HeisElement::new(rng.gen_range(-3.0..=3.0), rng.gen_range(-3.0..=3.0), rng.gen_range(0.0..1.0))
}

/// A point whose p lies inside the p-support of `t`, with moderate q.
fn point_for(rng: &mut ChaCha8Rng, t: &SchCoeffTerm) -> HeisElement {
    let iv = interval::hull(&t.p_support()).expect("non-empty support");
    HeisElement::new(iv.lo + iv.len() * rng.gen_range(0.1..0.9), rng.gen_range(-2.0..=2.0), rng.gen_range(0.0..1.0))
}

fn term_scale(t: &SchCoeffTerm) -> f64 {
    t.weight.norm() * lnorm(&t.xi) * lnorm(&t.eta)
}

/// A random σₙ term rescaled so that |w|·‖ξ‖·‖η‖ = 1.
fn unit_sch(rng: &mut ChaCha8Rng, n: i64) -> SchCoeffTerm {
    let t = random_sch_term(rng, n);
    let s = term_scale(&t);
    t.scaled(re(1.0 / s))
}

fn unit_lambda0(rng: &mut ChaCha8Rng) -> Lambda0CoeffTerm {
    let t = random_lambda0_term(rng);
    let s = t.weight.norm() * t.xi.norm().expect("plane norm") * t.eta.norm().expect("plane norm");
    t.scaled(re(1.0 / s))
}

/// `count` unit terms with n drawn from −max..=max; n = 0 gives a λ₀ term.
fn random_hr(rng: &mut ChaCha8Rng, count: usize, max: i64) -> HrElem {
    let mut x = HrElem::default();
    for _ in 0..count {
        match rng.gen_range(-max..=max) {
            0 => x.zero_terms.push(unit_lambda0(rng)),
            n => x.sch_terms.push(unit_sch(rng, n)),
        }
    }
    x
}

pub const SCH_UNITARITY: Suite = Suite {
    id: "heis.sch_unitarity",
    statement: "‖σₙ(g)ξ‖₂ = ‖ξ‖₂",
    reference: "reduced Heisenberg group: the Schrödinger representations σₙ on L²(ℝ)",
    residual: "|‖σₙ(g)ξ‖ − ‖ξ‖| / ‖ξ‖",
    tolerance: 1e-10,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "random (n, ξ, g)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let n = random_n(rng, p.max_n_heis);
                let xi = line(rng);
                let g = random_element(rng);
                Case::new(
                    &json!({ "n": n, "xi": xi, "g": g }),
                    Box::new(move |_| {
                        let lhs = norm(&sch_apply(n, &g, &xi)?, L)?;
                        let rhs = lnorm(&xi);
                        Ok(vec![Outcome::rel("norm", re(lhs), re(rhs), rhs)])
                    }),
                )
            })
            .collect()
    },
};

pub const SCH_HOMOMORPHISM: Suite = Suite {
    id: "heis.sch_homomorphism",
    statement: "σₙ(g₁)σₙ(g₂)ξ = σₙ(g₁g₂)ξ pointwise",
    reference: "reduced Heisenberg group: group law and the Schrödinger representations",
    residual: "max over 20 random x of |σₙ(g₁)σₙ(g₂)ξ(x) − σₙ(g₁g₂)ξ(x)|",
    tolerance: 1e-12,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "random (n, ξ, g₁, g₂)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let n = random_n(rng, p.max_n_heis);
                let xi = line(rng);
                let (g1, g2) = (random_element(rng), random_element(rng));
                let xs: Vec<f64> = (0..20).map(|_| rng.gen_range(-4.0..9.0)).collect();
                Case::new(
                    &json!({ "n": n, "xi": xi, "g1": g1, "g2": g2, "x": xs }),
                    Box::new(move |_| {
                        let lhs = sch_apply(n, &g1, &sch_apply(n, &g2, &xi)?)?;
                        let rhs = sch_apply(n, &g1.mul(&g2), &xi)?;
                        let worst = xs
                            .iter()
                            .map(|&x| (lhs.eval(x), rhs.eval(x)))
                            .max_by(|a, b| (a.0 - a.1).norm().total_cmp(&(b.0 - b.1).norm()))
                            .unwrap_or((ZERO, ZERO));
                        Ok(vec![Outcome::abs("pointwise", worst.0, worst.1)])
                    }),
                )
            })
            .collect()
    },
};

pub const COEFF_TWO_PATH: Suite = Suite {
    id: "heis.coeff_two_path",
    statement: "(ξ∗σₙη)(p,q,θ) = e^{2πinθ}ℱ(ξ(·+p/2)η̄(·−p/2))(nq) equals ⟨σₙ(g)ξ, η⟩, and shifts in θ multiply by e^{2πins}",
    reference: "reduced Heisenberg group: Fourier-transform form of the Schrödinger coefficients",
    residual: "|lhs − rhs| / (|w|‖ξ‖‖η‖)",
    tolerance: 1e-8,
    label_tolerances: &[("theta_shift", 1e-10)],
    default_size: 50,
    size_unit: "random (term, g)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let n = random_n(rng, p.max_n_heis);
                let t = random_sch_term(rng, n);
                let g = point_for(rng, &t);
                let s: f64 = rng.gen_range(0.0..1.0);
                Case::new(
                    &json!({ "term": t, "g": g, "shift": s }),
                    Box::new(move |_| {
                        let scale = term_scale(&t);
                        let direct = sch_coeff_eval(&t, &g)?;
                        let shifted = sch_coeff_eval(&t, &HeisElement::new(g.p, g.q, g.theta + s))?;
                        let phase = C64::from_polar(1.0, 2.0 * PI * t.n as f64 * s);
                        Ok(vec![
                            Outcome::rel("inner", direct, sch_coeff_eval_inner(&t, &g)?, scale),
                            Outcome::rel("theta_shift", shifted, phase * direct, scale),
                        ])
                    }),
                )
            })
            .collect()
    },
};

pub const CONJ_SYMMETRY: Suite = Suite {
    id: "heis.conj_symmetry",
    statement: "conj(ξ∗σₙη) = ξ̄∗σ₋ₙη̄",
    reference: "reduced Heisenberg group: conjugation of Schrödinger coefficients",
    residual: "|conj(value) − value of the conjugate term| / (|w|‖ξ‖‖η‖)",
    tolerance: 1e-10,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "random (term, g)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let n = random_n(rng, p.max_n_heis);
                let t = random_sch_term(rng, n);
                let g = point_for(rng, &t);
                Case::new(
                    &json!({ "term": t, "g": g }),
                    Box::new(move |_| {
                        let lhs = sch_coeff_eval(&t, &g)?.conj();
                        let rhs = sch_coeff_eval(&t.conj(), &g)?;
                        Ok(vec![Outcome::rel("conj", lhs, rhs, term_scale(&t))])
                    }),
                )
            })
            .collect()
    },
};

pub const SQUARE_INTEGRABLE: Suite = Suite {
    id: "heis.square_integrable",
    statement: "‖ξ∗σₙη‖²_{L²(ℍ_r)} = (1/|n|)‖ξ‖₂²‖η‖₂²",
    reference: "reduced Heisenberg group: the Schrödinger representations are square-integrable modulo the centre",
    residual: "|lhs − rhs| / rhs, labelled by n",
    tolerance: 1e-6,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "random (ξ, η) for each n = ±1, …, ±max_n_heis",
    build: |rng, p| {
        let mut cases = Vec::new();
        for k in 1..=p.max_n_heis {
            for n in [k, -k] {
                for _ in 0..p.size {
                    let xi = line(rng);
                    let eta = line(rng);
                    cases.push(Case::new(
                        &json!({ "n": n, "xi": xi, "eta": eta }),
                        Box::new(move |cfg| {
                            let u = HrElem::sch(SchCoeffTerm::new(n, xi.clone(), eta.clone(), ONE)?);
                            let r = heis_l2_inner(&u, &u, cfg)?;
                            let want = (lnorm(&xi) * lnorm(&eta)).powi(2) / n.abs() as f64;
                            Ok(vec![Outcome::rel(format!("n={n}"), r.value, re(want), want)
                                .with_tail(r.uncertainty() / want)])
                        }),
                    ));
                }
            }
        }
        cases
    },
};

pub const ORTHOGONALITY: Suite = Suite {
    id: "heis.orthogonality",
    statement: "⟨ξ₁∗σₙη₁, ξ₂∗σₘη₂⟩ = δₙₘ(1/|n|)⟨η₂,η₁⟩⟨ξ₁,ξ₂⟩",
    reference: "reduced Heisenberg group: explicit orthogonality relations",
    residual: "cross_n: |lhs| for n ≠ m; same_n: |lhs − rhs| / (‖ξ₁‖‖ξ₂‖‖η₁‖‖η₂‖)",
    tolerance: 1e-6,
    label_tolerances: &[("cross_n", 1e-8)],
    default_size: 20,
    size_unit: "random (n, m, ξ₁, η₁, ξ₂, η₂)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let n = random_n(rng, p.max_n_heis);
                let m = loop {
                    let m = random_n(rng, p.max_n_heis);
                    if m != n {
                        break m;
                    }
                };
                let v: Vec<FuncExpr> = (0..4).map(|_| line(rng)).collect();
                Case::new(
                    &json!({ "n": n, "m": m, "vectors": v }),
                    Box::new(move |cfg| {
                        let t = |k, x: &FuncExpr, e: &FuncExpr| {
                            SchCoeffTerm::new(k, x.clone(), e.clone(), ONE).map(HrElem::sch)
                        };
                        let (xi1, eta1, xi2, eta2) = (&v[0], &v[1], &v[2], &v[3]);
                        let u = t(n, xi1, eta1)?;
                        let cross = heis_l2_inner(&u, &t(m, xi2, eta2)?, cfg)?;
                        let same = heis_l2_inner(&u, &t(n, xi2, eta2)?, cfg)?;
                        let want = inner_product(eta2, eta1, L)? * inner_product(xi1, xi2, L)? / n.abs() as f64;
                        let scale = lnorm(xi1) * lnorm(xi2) * lnorm(eta1) * lnorm(eta2);
                        Ok(vec![
                            Outcome::abs("cross_n", cross.value, ZERO).with_tail(cross.uncertainty()),
                            Outcome::rel("same_n", same.value, want, scale).with_tail(same.uncertainty() / scale),
                        ])
                    }),
                )
            })
            .collect()
    },
};

pub const DTHETA_FD: Suite = Suite {
    id: "heis.dtheta_fd",
    statement: "∂_θ = (1/2πi)d/dθ multiplies σₙ coefficients by n and kills λ₀ coefficients",
    reference: "reduced Heisenberg group: the derivative ∂_θ on the span V of σₙ and λ₀ coefficients",
    residual: "|FD − ∂_θ value| / Σ|n|·|w|‖ξ‖‖η‖, fourth-order central difference, h = 1e-4",
    tolerance: 1e-6,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "random (element of V, g)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let mut x = random_hr(rng, 2, p.max_n_heis);
                x.zero_terms.push(unit_lambda0(rng));
                let g = match x.sch_terms.first() {
                    Some(t) => point_for(rng, t),
                    None => random_element(rng),
                };
                Case::new(
                    &json!({ "x": x, "g": g }),
                    Box::new(move |_| {
                        let h = 1e-4;
                        let f = |s: f64| x.eval(&HeisElement::new(g.p, g.q, g.theta + s));
                        let d = (-f(2.0 * h)? + f(h)? * 8.0 - f(-h)? * 8.0 + f(-2.0 * h)?) / (12.0 * h);
                        let lhs = d / C64::new(0.0, 2.0 * PI);
                        let rhs = dtheta(&x).eval(&g)?;
                        let scale: f64 = x.sch_terms.iter().map(|t| t.n.abs() as f64 * term_scale(t)).sum();
                        Ok(vec![Outcome::rel("fd", lhs, rhs, scale)])
                    }),
                )
            })
            .collect()
    },
};

pub const DERIVATION: Suite = Suite {
    id: "heis.derivation",
    statement: "|D♭(ξ∗σₙη, conj(ξ∗σₙη))| = ‖ξ‖₂²‖η‖₂² with D♭(f,g) = ∫∂_θf·g",
    reference: "reduced Heisenberg group: the derivation D♭ is non-zero (not weakly amenable)",
    residual: "||D♭| − ‖ξ‖²‖η‖²| / (‖ξ‖²‖η‖²), labelled by n; lhs keeps the sign of D♭",
    tolerance: 1e-6,
    label_tolerances: &[],
    default_size: 10,
    size_unit: "random (ξ, η), each run for n = ±1, …, ±max_n_heis",
    build: |rng, p| {
        let max = p.max_n_heis;
        (0..p.size)
            .map(|_| {
                let xi = line(rng);
                let eta = line(rng);
                Case::new(
                    &json!({ "xi": xi, "eta": eta, "max_n": max }),
                    Box::new(move |cfg| {
                        let want = (lnorm(&xi) * lnorm(&eta)).powi(2);
                        let mut out = Vec::new();
                        for k in 1..=max {
                            for n in [k, -k] {
                                let v = HeisAlgebra::from(HrElem::sch(SchCoeffTerm::new(n, xi.clone(), eta.clone(), ONE)?));
                                let d = d_flat_heis(&v, &v.conj(), cfg)?;
                                out.push(
                                    Outcome::custom(format!("n={n}"), d.value, re(want), (d.value.norm() - want).abs() / want)
                                        .with_tail(d.uncertainty() / want),
                                );
                            }
                        }
                        Ok(out)
                    }),
                )
            })
            .collect()
    },
};

pub const LAMBDA0_NULL: Suite = Suite {
    id: "heis.lambda0_null",
    statement: "D♭(v₀, ·) = D♭(·, v₀) = 0 for λ₀ coefficients v₀",
    reference: "reduced Heisenberg group: ∂_θ vanishes on λ₀ coefficients, which are constant in θ",
    residual: "|D♭|",
    tolerance: 1e-10,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "random (λ₀ term, element of V)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let v0 = HrElem::lambda0(unit_lambda0(rng));
                let k = rng.gen_range(1..=3);
                let w = random_hr(rng, k, p.max_n_heis.min(2));
                Case::new(
                    &json!({ "v0": v0, "w": w }),
                    Box::new(move |cfg| {
                        let (a, b) = (HeisAlgebra::from(&v0), HeisAlgebra::from(&w));
                        let left = d_flat_heis(&a, &b, cfg)?;
                        let right = d_flat_heis(&b, &a, cfg)?;
                        Ok(vec![Outcome::abs("left", left.value, ZERO), Outcome::abs("right", right.value, ZERO)])
                    }),
                )
            })
            .collect()
    },
};

pub const KEY_ESTIMATE: Suite = Suite {
    id: "heis.key_estimate",
    statement: "|D♭(v,w)| ≤ ‖v‖_A‖w‖_A and D♭(v,w) + D♭(w,v) = 0 on V",
    reference: "reduced Heisenberg group: the norm estimate pairing the σₙ and σ₋ₙ blocks",
    residual: "key: max(0, |D♭| − ‖v‖_A‖w‖_A) / (‖v‖_A‖w‖_A); antisym: |D♭(v,w) + D♭(w,v)|",
    tolerance: 1e-6,
    label_tolerances: &[],
    default_size: 100,
    size_unit: "random pairs of at most 5 unit-norm terms with n ∈ {−2, …, 2} (0 is λ₀)",
    build: |rng, p| {
        let max = p.max_n_heis.min(2);
        (0..p.size)
            .map(|_| {
                let k = rng.gen_range(1..=5);
                let v = random_hr(rng, k, max);
                let w = match rng.gen_range(0..4) {
                    0 => v.conj(),
                    1 => {
                        let mut w = v.conj();
                        w.zero_terms.clear();
                        w.sch_terms.truncate(1);
                        let extra = random_hr(rng, 2, max);
                        w.sch_terms.extend(extra.sch_terms);
                        w.zero_terms.extend(extra.zero_terms);
                        w
                    }
                    _ => {
                        let k = rng.gen_range(1..=5);
                        random_hr(rng, k, max)
                    }
                };
                Case::new(
                    &json!({ "v": v, "w": w }),
                    Box::new(move |cfg| {
                        let e = key_estimate_heis(&v, &w, cfg)?;
                        let back = d_flat_heis(&(&w).into(), &(&v).into(), cfg)?;
                        let d = e.d_flat.value.norm();
                        Ok(vec![
                            Outcome::custom("key", re(d), re(e.product), (d - e.product).max(0.0) / e.product)
                                .with_tail(e.d_flat.uncertainty() / e.product),
                            Outcome::abs("antisym", e.d_flat.value, -back.value)
                                .with_tail(e.d_flat.uncertainty() + back.uncertainty()),
                        ])
                    }),
                )
            })
            .collect()
    },
};

/// A sum of 1–2 unit terms or, with `genuine`, a product of two Schrödinger terms.
fn leibniz_element(rng: &mut ChaCha8Rng, genuine: bool, max: i64) -> HeisAlgebra {
    if genuine {
        let (n1, n2) = (random_n(rng, max), random_n(rng, max));
        HeisAlgebra::from(HrElem::sch(unit_sch(rng, n1))).mul(&HeisAlgebra::from(HrElem::sch(unit_sch(rng, n2))))
    } else {
        let k = rng.gen_range(1..=2);
        HeisAlgebra::from(random_hr(rng, k, max))
    }
}

pub const LEIBNIZ: Suite = Suite {
    id: "heis.leibniz",
    statement: "D♭(fg,h) = D♭(g,hf) + D♭(f,gh)",
    reference: "continuous extension of derivations: the Leibniz condition, for the reduced Heisenberg group",
    residual: "|D♭(fg,h) − D♭(g,hf) − D♭(f,gh)| (label leibniz_product when one of f, g, h is a two-factor product)",
    tolerance: 1e-6,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "random triples (3 in 5 contain a two-factor product)",
    build: |rng, p| {
        let max = p.max_n_heis.min(2);
        (0..p.size)
            .map(|i| {
                let genuine = i % 5 < 3;
                let which = if genuine { rng.gen_range(0..3) } else { 3 };
                let f = leibniz_element(rng, which == 0, max);
                let g = leibniz_element(rng, which == 1, max);
                let h = leibniz_element(rng, which == 2, max);
                Case::new(
                    &json!({ "f": f, "g": g, "h": h }),
                    Box::new(move |cfg| {
                        let r = heis_derivation_residuals(&f, &g, &h, cfg)?;
                        let label = if genuine { "leibniz_product" } else { "leibniz" };
                        Ok(vec![
                            Outcome::custom(label, re(r.leibniz), ZERO, r.leibniz).with_tail(r.uncertainty),
                            Outcome::custom("antisym", re(r.antisym), ZERO, r.antisym).with_tail(r.uncertainty),
                        ])
                    }),
                )
            })
            .collect()
    },
};

pub const A_NORM: Suite = Suite {
    id: "heis.a_norm",
    statement: "‖·‖_A is the trace norm per σₙ block, ℓ¹ across n, and an upper bound once λ₀ terms are present",
    reference: "reduced Heisenberg group: ℓ¹-direct sum decomposition of A(ℍ_r) into σₙ blocks and the λ₀ part",
    residual: "|a_norm − expected| / expected, plus 1 if the exact/upper-bound flag is wrong",
    tolerance: 1e-10,
    label_tolerances: &[],
    default_size: 10,
    size_unit: "random vector pairs",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let s1 = random_sch_term(rng, 1);
                let s2 = random_sch_term(rng, 2);
                let z = random_lambda0_term(rng);
                Case::new(
                    &json!({ "s1": s1, "s2": s2, "z": z }),
                    Box::new(move |_| {
                        let n1 = term_scale(&s1);
                        let n2 = term_scale(&s2);
                        let nz = z.weight.norm() * z.xi.norm()? * z.eta.norm()?;
                        let check = |label: &str, x: HrElem, want: f64, kind: NormKind| -> fdlab::Result<Outcome> {
                            let (v, k) = a_norm_heis(&x)?;
                            let flag = if k == kind { 0.0 } else { 1.0 };
                            Ok(Outcome::custom(label, re(v), re(want), (v - want).abs() / want + flag))
                        };
                        Ok(vec![
                            check("rank_one", HrElem::sch(s1.clone()), n1, NormKind::Exact)?,
                            check("two_blocks", HrElem::new(vec![s1.clone(), s2.clone()], vec![]), n1 + n2, NormKind::Exact)?,
                            check("with_lambda0", HrElem::new(vec![s1.clone()], vec![z.clone()]), n1 + nz, NormKind::UpperBound)?,
                        ])
                    }),
                )
            })
            .collect()
    },
};
