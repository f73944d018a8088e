//! Truncated Taylor series ("jets") used to evaluate derivatives of expression trees.
//!
//! Coefficient k holds f^(k)(t₀)/k!.

use num_complex::Complex64 as C64;

/// Maximal number of stored coefficients (derivative orders 0..JET_CAP-1).
pub const JET_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [C64; JET_CAP],
    /// Number of coefficients in use.
    pub len: usize,
}

const ZERO: C64 = C64::new(0.0, 0.0);

impl Jet {
    pub fn zero(len: usize) -> Jet {
        assert!(len >= 1 && len <= JET_CAP, "jet length {len} out of range");
        Jet {
            c: [ZERO; JET_CAP],
            len,
        }
    }

    pub fn constant(v: C64, len: usize) -> Jet {
        let mut j = Jet::zero(len);
        j.c[0] = v;
        j
    }

    /// Jet of the affine function t ↦ v + slope·(t − t₀).
    pub fn affine(v: f64, slope: f64, len: usize) -> Jet {
        let mut j = Jet::constant(C64::new(v, 0.0), len);
        if len > 1 {
            j.c[1] = C64::new(slope, 0.0);
        }
        j
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> C64 {
        self.c[k] * factorial(k)
    }

    pub fn is_zero(&self) -> bool {
        self.c[..self.len].iter().all(|z| *z == ZERO)
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut r = *self;
        for k in 0..self.len {
            r.c[k] += o.c[k];
        }
        r
    }

    pub fn scale(&self, s: C64) -> Jet {
        let mut r = *self;
        for k in 0..self.len {
            r.c[k] *= s;
        }
        r
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut r = Jet::zero(self.len);
        for k in 0..self.len {
            let mut acc = ZERO;
            for j in 0..=k {
                acc += self.c[j] * o.c[k - j];
            }
            r.c[k] = acc;
        }
        r
    }

    pub fn conj(&self) -> Jet {
        let mut r = *self;
        for k in 0..self.len {
            r.c[k] = r.c[k].conj();
        }
        r
    }

    /// Jet of t ↦ f(a·t) at t₀ from the jet of f at a·t₀.
    pub fn dilate(&self, a: f64) -> Jet {
        let mut r = *self;
        let mut p = 1.0;
        for k in 0..self.len {
            r.c[k] *= p;
            p *= a;
        }
        r
    }

    /// Jet of t ↦ f'(t): shifts coefficients down, dropping the top order.
    pub fn differentiate(&self) -> Jet {
        let mut r = Jet::zero(self.len);
        for k in 0..self.len - 1 {
            r.c[k] = self.c[k + 1] * (k + 1) as f64;
        }
        r
    }

    /// Jet of 1/u. Requires u(t₀) ≠ 0.
    pub fn recip(&self) -> Jet {
        let mut r = Jet::zero(self.len);
        let inv0 = 1.0 / self.c[0];
        r.c[0] = inv0;
        for k in 1..self.len {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.c[j] * r.c[k - j];
            }
            r.c[k] = -acc * inv0;
        }
        r
    }

    /// Jet of exp(v).
    pub fn exp(&self) -> Jet {
        let mut r = Jet::zero(self.len);
        r.c[0] = self.c[0].exp();
        for k in 1..self.len {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.c[j] * r.c[k - j] * j as f64;
            }
            r.c[k] = acc / k as f64;
        }
        r
    }

    /// Jet of t ↦ t^α at t₀ (t₀ > 0 unless α is a nonnegative integer).
    pub fn power(t0: f64, alpha: f64, len: usize) -> Jet {
        let mut r = Jet::zero(len);
        // Generalized binomial: C(α,k)·t₀^(α−k).
        let integer = is_nonneg_integer(alpha);
        let inv = 1.0 / t0;
        let mut pw = if integer {
            t0.powi(alpha as i32)
        } else {
            t0.powf(alpha)
        };
        let mut binom = 1.0;
        for k in 0..len {
            if integer && alpha < k as f64 {
                break;
            }
            r.c[k] = C64::new(binom * pw, 0.0);
            binom *= (alpha - k as f64) / (k as f64 + 1.0);
            pw = if integer {
                t0.powi((alpha as i32) - k as i32 - 1)
            } else {
                pw * inv
            };
        }
        r
    }
}

pub fn is_nonneg_integer(x: f64) -> bool {
    x >= 0.0 && x.fract() == 0.0
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_affine_matches_series() {
        // exp(2 + 3(t−t₀)) has coefficients e²·3^k/k!.
        let j = Jet::affine(2.0, 3.0, 8).exp();
        for k in 0..8 {
            let want = 2f64.exp() * 3f64.powi(k as i32) / factorial(k);
            assert!((j.c[k].re - want).abs() < 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn recip_times_self_is_one() {
        let mut u = Jet::affine(1.5, -0.3, 10);
        u.c[2] = C64::new(0.2, 0.1);
        let p = u.mul(&u.recip());
        assert!((p.c[0] - 1.0).norm() < 1e-14);
        for k in 1..10 {
            assert!(p.c[k].norm() < 1e-13);
        }
    }

    #[test]
    fn power_of_integer_exponent_truncates() {
        let j = Jet::power(-2.0, 2.0, 5);
        assert_eq!(j.c[0].re, 4.0);
        assert_eq!(j.c[1].re, -4.0);
        assert_eq!(j.c[2].re, 1.0);
        assert_eq!(j.c[3].re, 0.0);
    }
}
