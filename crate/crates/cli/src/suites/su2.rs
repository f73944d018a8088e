use std::f64::consts::PI;

use fdlab::su2::{
    a_norm_su2, d_flat_su2, f_pi, f_pi_ratio, partial_phi, random_trig_poly, random_vector, schur_check, wigner_d,
    SU2Element, TrigPoly, TrigTerm,
};
use fdlab::C64;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{re, Case, Outcome, Suite, ONE, ZERO};

/// Haar-distributed element: uniform α, γ and cos β.
fn random_element(rng: &mut ChaCha8Rng) -> SU2Element {
    SU2Element::from_euler(
        rng.gen_range(0.0..2.0 * PI),
        rng.gen_range(-1.0f64..=1.0).acos(),
        rng.gen_range(0.0..4.0 * PI),
    )
}

fn max_entry(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn vnorm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(x, y)| x * y.conj()).sum()
}

fn term(n: usize, xi: Vec<C64>, eta: Vec<C64>) -> TrigTerm {
    TrigTerm::new(n, xi, eta, ONE).expect("vector lengths match n + 1")
}

pub const HOMOMORPHISM: Suite = Suite {
    id: "su2.homomorphism",
    statement: "D_n(g₁g₂) = D_n(g₁)D_n(g₂) and D_n(g) is unitary",
    reference: "SU(2): the irreducible representations in the weight basis",
    residual: "largest entry of D(g₁g₂) − D(g₁)D(g₂), resp. of D(g)D(g)* − I",
    tolerance: 1e-9,
    label_tolerances: &[("unitary", 1e-10)],
    default_size: 20,
    size_unit: "random (n, g₁, g₂)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let n = rng.gen_range(0..=p.max_n_su2);
                let (g1, g2) = (random_element(rng), random_element(rng));
                Case::new(
                    &json!({ "n": n, "g1": g1, "g2": g2 }),
                    Box::new(move |_| {
                        let (d1, d2) = (wigner_d(n, &g1), wigner_d(n, &g2));
                        let d12 = wigner_d(n, &g1.mul(&g2));
                        let hom = max_entry(&(&d12 - &d1 * &d2));
                        let uni = max_entry(&(&d1 * d1.adjoint() - DMatrix::identity(n + 1, n + 1)));
                        Ok(vec![
                            Outcome::custom("homomorphism", d12[(0, 0)], (&d1 * &d2)[(0, 0)], hom),
                            Outcome::custom("unitary", re(uni), ZERO, uni),
                        ])
                    }),
                )
            })
            .collect()
    },
};

pub const TORUS: Suite = Suite {
    id: "su2.torus",
    statement: "D_n(s_φ) = diag(e^{ikφ/2} : k = n, n−2, …, −n)",
    reference: "SU(2): the torus path s_φ = diag(e^{iφ/2}, e^{−iφ/2}) acts diagonally",
    residual: "largest entry of D_n(s_φ) − diag(e^{ikφ/2}), labelled by n",
    tolerance: 1e-12,
    label_tolerances: &[],
    default_size: 5,
    size_unit: "random φ, each checked for n = 0, …, max_n_su2",
    build: |rng, p| {
        let max = p.max_n_su2;
        (0..p.size)
            .map(|_| {
                let phi: f64 = rng.gen_range(-2.0 * PI..2.0 * PI);
                Case::new(
                    &json!({ "phi": phi, "max_n": max }),
                    Box::new(move |_| {
                        Ok((0..=max)
                            .map(|n| {
                                let d = wigner_d(n, &SU2Element::torus(phi));
                                let want = DMatrix::from_fn(n + 1, n + 1, |i, j| {
                                    if i == j {
                                        C64::from_polar(1.0, (n as f64 - 2.0 * i as f64) * phi / 2.0)
                                    } else {
                                        ZERO
                                    }
                                });
                                Outcome::custom(format!("n={n}"), d[(0, 0)], want[(0, 0)], max_entry(&(&d - &want)))
                            })
                            .collect())
                    }),
                )
            })
            .collect()
    },
};

pub const SCHUR: Suite = Suite {
    id: "su2.schur",
    statement: "∫⟨D_nξ₁,η₁⟩·conj⟨D_mξ₂,η₂⟩dμ = δₙₘ⟨ξ₁,ξ₂⟩⟨η₂,η₁⟩/(n+1)",
    reference: "Schur orthogonality relations for compact groups, on SU(2) by Haar quadrature",
    residual: "|quadrature − closed form|; label same or cross",
    tolerance: 1e-8,
    label_tolerances: &[],
    default_size: 50,
    size_unit: "random vector pairs, cycling through all (n, m) with n, m ≤ max_n_su2",
    build: |rng, p| {
        let grid: Vec<(usize, usize)> =
            (0..=p.max_n_su2).flat_map(|n| (0..=p.max_n_su2).map(move |m| (n, m))).collect();
        (0..p.size)
            .map(|i| {
                let (n, m) = grid[i % grid.len()];
                let a = term(n, random_vector(rng, n + 1), random_vector(rng, n + 1));
                let b = term(m, random_vector(rng, m + 1), random_vector(rng, m + 1));
                Case::new(
                    &json!({ "a": a, "b": b }),
                    Box::new(move |_| {
                        let (q, want) = schur_check(&a, &b);
                        let label = if a.n == b.n { "same" } else { "cross" };
                        Ok(vec![Outcome::abs(label, q.value, want)])
                    }),
                )
            })
            .collect()
    },
};

pub const F_PI_BOUND: Suite = Suite {
    id: "su2.f_pi_bound",
    statement: "‖F_π‖/dim π = n/(2n+2) < 1/2, increasing in n",
    reference: "SU(2): the uniform bound on F_π = d/dφ π(s_φ)|_{φ=0} relative to dim π",
    residual: "ratio: |SVD value − n/(2n+2)|; below_half, monotone: 0 when the inequality holds strictly",
    tolerance: 1e-12,
    label_tolerances: &[("below_half", 0.0), ("monotone", 0.0)],
    default_size: 1,
    size_unit: "sweeps over n = 0, …, max_n_su2",
    build: |_, p| {
        let max = p.max_n_su2;
        (0..p.size)
            .map(|_| {
                Case::new(
                    &json!({ "max_n": max }),
                    Box::new(move |_| {
                        let mut out = Vec::new();
                        let mut prev: Option<f64> = None;
                        for n in 0..=max {
                            let (svd, closed) = f_pi_ratio(n);
                            out.push(Outcome::abs(format!("ratio/n={n}"), re(svd), re(closed)));
                            let gap = if svd < 0.5 { 0.0 } else { svd - 0.5 + f64::EPSILON };
                            out.push(Outcome::custom(format!("below_half/n={n}"), re(svd), re(0.5), gap));
                            if let Some(r) = prev {
                                let drop = if svd > r { 0.0 } else { r - svd + f64::EPSILON };
                                out.push(Outcome::custom(format!("monotone/n={n}"), re(svd), re(r), drop));
                            }
                            prev = Some(svd);
                        }
                        Ok(out)
                    }),
                )
            })
            .collect()
    },
};

pub const KEY_ESTIMATE: Suite = Suite {
    id: "su2.key_estimate",
    statement: "|D♭(f,g)| ≤ ½‖f‖_A‖g‖_A and D♭(f,g) + D♭(g,f) = 0 for trigonometric polynomials",
    reference: "SU(2): the derivation D♭(f,g) = ∫(∂_φ f)g dμ and the bound from ‖F_π‖/dim π < 1/2",
    residual: "key: max(0, |D♭| − ½‖f‖_A‖g‖_A); cyclic: |D♭(f,g) + D♭(g,f)|",
    tolerance: 1e-8,
    label_tolerances: &[],
    default_size: 200,
    size_unit: "random pairs of trigonometric polynomials with n ≤ max_n_su2",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let f = random_trig_poly(rng, p.max_n_su2);
                let g = if rng.gen_bool(0.25) { f.conj() } else { random_trig_poly(rng, p.max_n_su2) };
                Case::new(
                    &json!({ "f": f, "g": g }),
                    Box::new(move |_| {
                        let d_fg = d_flat_su2(&f, &g);
                        let d_gf = d_flat_su2(&g, &f);
                        let bound = 0.5 * a_norm_su2(&f) * a_norm_su2(&g);
                        let d = d_fg.value.norm();
                        Ok(vec![
                            Outcome::custom("key", re(d), re(bound), (d - bound).max(0.0))
                                .with_tail(d_fg.error_estimate),
                            Outcome::abs("cyclic", d_fg.value, -d_gf.value)
                                .with_tail(d_fg.error_estimate + d_gf.error_estimate),
                        ])
                    }),
                )
            })
            .collect()
    },
};

pub const NONVANISHING: Suite = Suite {
    id: "su2.nonvanishing",
    statement: "D♭(ξ∗πξ, conj(ξ∗πξ)) = (1/3)⟨F_πξ,ξ⟩⟨ξ,ξ⟩ on the 3-dimensional block; = i/3 for the top weight vector",
    reference: "SU(2): the derivation is non-zero on the standard 3-dimensional representation",
    residual: "|D♭ − (1/3)⟨F_πξ,ξ⟩⟨ξ,ξ⟩|; label top_weight for ξ = c·e₀ (expected i|c|⁴/3), generic for random ξ",
    tolerance: 1e-8,
    label_tolerances: &[],
    default_size: 5,
    size_unit: "random (c, ξ); the first uses c = 1",
    build: |rng, p| {
        (0..p.size)
            .map(|i| {
                let c = if i == 0 { ONE } else { C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..2.0 * PI)) };
                let generic = random_vector(rng, 3);
                Case::new(
                    &json!({ "c": [c.re, c.im], "xi": generic }),
                    Box::new(move |_| {
                        let value = |xi: Vec<C64>| {
                            let f = TrigPoly::new(vec![term(2, xi.clone(), xi.clone())]);
                            let fxi: Vec<C64> = (&f_pi(2) * DVector::from_column_slice(&xi)).iter().copied().collect();
                            let want = dot(&fxi, &xi) * dot(&xi, &xi) / 3.0;
                            (d_flat_su2(&f, &f.conj()), want)
                        };
                        let (top, top_want) = value(vec![c, ZERO, ZERO]);
                        let (gen, gen_want) = value(generic.clone());
                        let i_third = C64::new(0.0, c.norm().powi(4) / 3.0);
                        Ok(vec![
                            Outcome::abs("top_weight", top.value, i_third).with_tail(top.error_estimate),
                            Outcome::abs("top_weight_formula", top_want, i_third),
                            Outcome::abs("generic", gen.value, gen_want).with_tail(gen.error_estimate),
                        ])
                    }),
                )
            })
            .collect()
    },
};

pub const PARTIAL_PHI_FD: Suite = Suite {
    id: "su2.partial_phi_fd",
    statement: "∂_φ(ξ∗πη) = (F_πξ)∗πη with ∂_φf(g) = d/dφ f(g·s_φ)|_{φ=0}",
    reference: "SU(2): the derivative along the torus path acting on coefficient functions",
    residual: "|(f(g·s_h) − f(g))/h − ∂_φf(g)| / max(1, ‖f‖_A), h = 1e-5",
    tolerance: 1e-4,
    label_tolerances: &[],
    default_size: 20,
    size_unit: "random (f, g)",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let f = random_trig_poly(rng, p.max_n_su2);
                let g = random_element(rng);
                Case::new(
                    &json!({ "f": f, "g": g }),
                    Box::new(move |_| {
                        let h = 1e-5;
                        let lhs = (f.eval(&g.mul(&SU2Element::torus(h))) - f.eval(&g)) / h;
                        let rhs = partial_phi(&f).eval(&g);
                        Ok(vec![Outcome::rel("fd", lhs, rhs, a_norm_su2(&f).max(1.0))])
                    }),
                )
            })
            .collect()
    },
};

pub const A_NORM: Suite = Suite {
    id: "su2.a_norm",
    statement: "‖f‖_A = Σ_n ‖π_n(f)‖₁: rank one gives ‖ξ‖‖η‖, blocks add, zero gives 0",
    reference: "SU(2): ℓ¹ decomposition of A(G) over the irreducible blocks",
    residual: "|a_norm − expected| / max(expected, 1)",
    tolerance: 1e-12,
    label_tolerances: &[],
    default_size: 10,
    size_unit: "random vector pairs",
    build: |rng, p| {
        (0..p.size)
            .map(|_| {
                let n = rng.gen_range(0..=p.max_n_su2);
                let a = term(n, random_vector(rng, n + 1), random_vector(rng, n + 1));
                let b1 = term(1, random_vector(rng, 2), random_vector(rng, 2));
                let b2 = term(2, random_vector(rng, 3), random_vector(rng, 3));
                Case::new(
                    &json!({ "a": a, "b1": b1, "b2": b2 }),
                    Box::new(move |_| {
                        let r1 = vnorm(&a.xi) * vnorm(&a.eta);
                        let one = a_norm_su2(&TrigPoly::new(vec![a.clone()]));
                        let s = vnorm(&b1.xi) * vnorm(&b1.eta) + vnorm(&b2.xi) * vnorm(&b2.eta);
                        let two = a_norm_su2(&TrigPoly::new(vec![b1.clone(), b2.clone()]));
                        let zero = a_norm_su2(&TrigPoly::default());
                        Ok(vec![
                            Outcome::rel("rank_one", re(one), re(r1), r1.max(1.0)),
                            Outcome::rel("blocks", re(two), re(s), s.max(1.0)),
                            Outcome::abs("zero", re(zero), ZERO),
                        ])
                    }),
                )
            })
            .collect()
    },
};
