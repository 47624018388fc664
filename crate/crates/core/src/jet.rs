//! Truncated Taylor series ("jets").
//!
//! A [`Jet`] stores normalized Taylor coefficients `c[j] = f^{(j)}(x0) / j!`
//! of a function about a fixed point, truncated after `order`. Arithmetic on
//! jets is exact up to truncation, so composing elementary operations on
//! `Jet::var(x0, r)` yields the first `r` derivatives of the composite
//! without finite differences.

use core::ops::{Add, Div, Mul, Neg, Sub};

/// Largest supported order plus one.
pub const JET_CAP: usize = 10;

/// Truncated Taylor expansion about an implicit base point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    c: [f64; JET_CAP],
    n: usize,
}

const FACT: [f64; JET_CAP] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0, 362880.0];

/// `j!` for `j < JET_CAP`.
pub fn factorial(j: usize) -> f64 {
    FACT[j]
}

impl Jet {
    /// Constant function with the given truncation order.
    pub fn constant(v: f64, order: usize) -> Self {
        assert!(order < JET_CAP, "jet order {order} exceeds capacity");
        let mut c = [0.0; JET_CAP];
        c[0] = v;
        Jet { c, n: order + 1 }
    }

    /// The identity map expanded about `x0`.
    pub fn var(x0: f64, order: usize) -> Self {
        let mut j = Self::constant(x0, order);
        if order >= 1 {
            j.c[1] = 1.0;
        }
        j
    }

    /// Builds a jet from normalized coefficients; the order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: &[f64]) -> Self {
        assert!(!coeffs.is_empty() && coeffs.len() <= JET_CAP);
        let mut c = [0.0; JET_CAP];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Jet { c, n: coeffs.len() }
    }

    /// Builds a jet from derivatives `f, f', f'', ...`.
    pub fn from_derivatives(derivs: &[f64]) -> Self {
        let mut j = Self::from_coeffs(derivs);
        for (k, c) in j.c[..j.n].iter_mut().enumerate() {
            *c /= FACT[k];
        }
        j
    }

    pub fn order(&self) -> usize {
        self.n - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Normalized coefficient `f^{(j)}/j!`; zero beyond the order.
    pub fn coeff(&self, j: usize) -> f64 {
        if j < self.n {
            self.c[j]
        } else {
            0.0
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..self.n]
    }

    /// The `j`-th derivative at the base point.
    pub fn derivative(&self, j: usize) -> f64 {
        self.coeff(j) * FACT[j.min(JET_CAP - 1)]
    }

    pub fn truncate(mut self, order: usize) -> Self {
        let n = (order + 1).min(self.n);
        for c in &mut self.c[n..] {
            *c = 0.0;
        }
        self.n = n;
        self
    }

    /// Jet of the derivative; order drops by one.
    pub fn differentiate(&self) -> Self {
        if self.n == 1 {
            return Self::constant(0.0, 0);
        }
        let mut c = [0.0; JET_CAP];
        for j in 0..self.n - 1 {
            c[j] = (j + 1) as f64 * self.c[j + 1];
        }
        Jet { c, n: self.n - 1 }
    }

    /// Jet of the antiderivative with value `c0`; order grows by one.
    pub fn integrate(&self, c0: f64) -> Self {
        let n = (self.n + 1).min(JET_CAP);
        let mut c = [0.0; JET_CAP];
        c[0] = c0;
        for j in 1..n {
            c[j] = self.c[j - 1] / j as f64;
        }
        Jet { c, n }
    }

    /// Rescales the expansion variable: returns the jet of `ε ↦ f(s·ε)`.
    pub fn scale_arg(mut self, s: f64) -> Self {
        let mut p = 1.0;
        for c in &mut self.c[..self.n] {
            *c *= p;
            p *= s;
        }
        self
    }

    pub fn map_value(mut self, v: f64) -> Self {
        self.c[0] = v;
        self
    }

    pub fn recip(&self) -> Self {
        let a = &self.c;
        let mut b = [0.0; JET_CAP];
        b[0] = 1.0 / a[0];
        for j in 1..self.n {
            let mut s = 0.0;
            for i in 1..=j {
                s += a[i] * b[j - i];
            }
            b[j] = -s * b[0];
        }
        Jet { c: b, n: self.n }
    }

    pub fn exp(&self) -> Self {
        let a = &self.c;
        let mut e = [0.0; JET_CAP];
        e[0] = libm::exp(a[0]);
        for j in 1..self.n {
            let mut s = 0.0;
            for i in 1..=j {
                s += i as f64 * a[i] * e[j - i];
            }
            e[j] = s / j as f64;
        }
        Jet { c: e, n: self.n }
    }

    pub fn ln(&self) -> Self {
        let a = &self.c;
        let mut l = [0.0; JET_CAP];
        l[0] = libm::log(a[0]);
        for j in 1..self.n {
            let mut s = 0.0;
            for i in 1..j {
                s += i as f64 * l[i] * a[j - i];
            }
            l[j] = (a[j] - s / j as f64) / a[0];
        }
        Jet { c: l, n: self.n }
    }

    /// `self^p` for a positive base value.
    pub fn powf(&self, p: f64) -> Self {
        (self.ln() * p).exp().map_value(libm::pow(self.c[0], p))
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut r = Self::constant(1.0, self.order());
        for _ in 0..k {
            r = r * *self;
        }
        r
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5).map_value(libm::sqrt(self.c[0]))
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let a = &self.c;
        let mut s = [0.0; JET_CAP];
        let mut c = [0.0; JET_CAP];
        s[0] = libm::sin(a[0]);
        c[0] = libm::cos(a[0]);
        for j in 1..self.n {
            let (mut ss, mut cc) = (0.0, 0.0);
            for i in 1..=j {
                ss += i as f64 * a[i] * c[j - i];
                cc += i as f64 * a[i] * s[j - i];
            }
            s[j] = ss / j as f64;
            c[j] = -cc / j as f64;
        }
        (Jet { c: s, n: self.n }, Jet { c, n: self.n })
    }

    /// Evaluates the series `self` (expanded about `p`) at `p + (inner - inner(0))`.
    ///
    /// `inner` is a jet whose constant term is the point where `self` was
    /// expanded; only its non-constant part enters the composition.
    pub fn compose(&self, inner: &Jet) -> Self {
        let n = self.n.min(inner.n);
        let mut delta = inner.truncate(n - 1);
        delta.c[0] = 0.0;
        let mut r = Self::constant(self.c[n - 1], n - 1);
        for j in (0..n - 1).rev() {
            r = r * delta;
            r.c[0] += self.c[j];
        }
        r
    }

    /// Series reversion: for `self = y0 + ρ(ε)` with `ρ'(0) ≠ 0`, returns the
    /// jet `x0 + σ(η)` with `ρ(σ(η)) = η`, expanded about the given `x0`.
    pub fn revert(&self, x0: f64) -> Self {
        let c1 = self.c[1];
        let order = self.order();
        let mut sigma = Self::var(0.0, order) * (1.0 / c1);
        for _ in 0..order {
            let mut r = self.compose(&sigma);
            r.c[0] = 0.0;
            let resid = r - Self::var(0.0, order);
            sigma = sigma - resid * (1.0 / c1);
        }
        sigma.map_value(x0)
    }

    /// Shifts the expansion point by `h`: evaluates the polynomial part at
    /// base + h. Only meaningful for polynomials or small `h`.
    pub fn eval_poly(&self, h: f64) -> f64 {
        let mut r = 0.0;
        for j in (0..self.n).rev() {
            r = r * h + self.c[j];
        }
        r
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let n = self.n.min(rhs.n);
        let mut c = [0.0; JET_CAP];
        for j in 0..n {
            c[j] = self.c[j] + rhs.c[j];
        }
        Jet { c, n }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for c in &mut self.c[..self.n] {
            *c = -*c;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let n = self.n.min(rhs.n);
        let mut c = [0.0; JET_CAP];
        for (i, &a) in self.c[..n].iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for j in 0..n - i {
                c[i + j] += a * rhs.c[j];
            }
        }
        Jet { c, n }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for c in &mut self.c[..self.n] {
            *c *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn polynomial_derivatives() {
        let x = Jet::var(2.0, 4);
        let p = x * x * x;
        assert_eq!(p.derivative(0), 8.0);
        assert_eq!(p.derivative(1), 12.0);
        assert_eq!(p.derivative(2), 12.0);
        assert_eq!(p.derivative(3), 6.0);
        assert_eq!(p.derivative(4), 0.0);
    }

    #[test]
    fn exp_ln_roundtrip() {
        let x = Jet::var(0.7, 6);
        let e = (x * 3.0).exp().ln();
        for j in 0..=6 {
            let want = if j == 0 {
                2.1
            } else if j == 1 {
                3.0
            } else {
                0.0
            };
            assert!(close(e.derivative(j), want, 1e-12), "order {j}");
        }
    }

    #[test]
    fn sin_derivatives_cycle() {
        let (s, c) = Jet::var(0.3, 5).sin_cos();
        let want = [0.3f64.sin(), 0.3f64.cos(), -0.3f64.sin(), -0.3f64.cos()];
        for (j, w) in want.iter().enumerate() {
            assert!(close(s.derivative(j), *w, 1e-14));
        }
        assert!(close(c.derivative(1), -0.3f64.sin(), 1e-14));
    }

    #[test]
    fn reversion_inverts_series() {
        // y = x + x^2 about 0.5
        let x = Jet::var(0.5, 6);
        let y = x + x * x;
        let inv = y.revert(0.5);
        let back = y.compose(&inv);
        assert!(close(back.value(), 0.75, 1e-15));
        assert!(close(back.derivative(1), 1.0, 1e-13));
        for j in 2..=6 {
            assert!(back.derivative(j).abs() < 1e-9, "order {j}: {}", back.derivative(j));
        }
    }

    #[test]
    fn recip_matches_quotient_rule() {
        let x = Jet::var(1.5, 3);
        let r = (x * x + 1.0).recip();
        // d/dx 1/(x^2+1) = -2x/(x^2+1)^2
        assert!(close(r.derivative(1), -3.0 / (3.25f64 * 3.25), 1e-14));
    }
}
