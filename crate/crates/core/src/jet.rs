//! Truncated Taylor arithmetic in one variable, used to differentiate the
//! univariate building blocks (transition profile, bump functions) exactly.

use crate::multi_index::factorial;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of Taylor coefficients carried (derivatives 0..=5).
pub const JET_LEN: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    c: [f64; JET_LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = v;
        Jet { c }
    }

    /// The identity map expanded at `x0`.
    pub fn variable(x0: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = x0;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn zero() -> Self {
        Jet { c: [0.0; JET_LEN] }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.c[k] * factorial(k)
    }

    pub fn derivatives(&self) -> [f64; JET_LEN] {
        let mut d = [0.0; JET_LEN];
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = self.derivative(k);
        }
        d
    }

    pub fn recip(self) -> Self {
        Jet::constant(1.0) / self
    }

    pub fn exp(self) -> Self {
        // e' = a' e  ⇒  k e_k = Σ_{j=1}^{k} j a_j e_{k-j}
        let mut e = [0.0; JET_LEN];
        e[0] = self.c[0].exp();
        for k in 1..JET_LEN {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * e[k - j];
            }
            e[k] = s / k as f64;
        }
        Jet { c: e }
    }

    pub fn scale(self, s: f64) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|x| *x *= s);
        Jet { c }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c) {
            *a += b;
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for i in 0..JET_LEN {
            for j in 0..JET_LEN - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let mut q = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            let mut s = self.c[k];
            for j in 1..=k {
                s -= o.c[j] * q[k - j];
            }
            q[k] = s / o.c[0];
        }
        Jet { c: q }
    }
}

/// `exp(-1/u)` for `u > 0`, the zero jet otherwise. Returns the zero jet
/// where the value underflows, which also keeps `0 · ∞` out of the
/// higher coefficients.
pub fn exp_neg_recip(u: Jet) -> Jet {
    if u.value() <= 0.0 {
        return Jet::zero();
    }
    let arg = -u.recip();
    if arg.value() < -700.0 {
        return Jet::zero();
    }
    arg.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exp_of_sin_like_polynomial() {
        // d^k/dx^k e^{2x} = 2^k e^{2x}
        let x = Jet::variable(0.3).scale(2.0);
        let e = x.exp();
        for k in 0..JET_LEN {
            assert_relative_eq!(e.derivative(k), 2f64.powi(k as i32) * 0.6f64.exp(), max_relative = 1e-13);
        }
    }

    #[test]
    fn reciprocal_derivatives() {
        // d^k (1/x) = (-1)^k k! x^{-k-1}
        let r = Jet::variable(0.7).recip();
        for k in 0..JET_LEN {
            let expect = (-1f64).powi(k as i32) * factorial(k) * 0.7f64.powi(-(k as i32) - 1);
            assert_relative_eq!(r.derivative(k), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn underflow_gives_zero_jet() {
        let j = exp_neg_recip(Jet::variable(1e-4));
        assert!(j.derivatives().iter().all(|&d| d == 0.0));
        assert_eq!(exp_neg_recip(Jet::variable(-0.2)), Jet::zero());
    }
}
