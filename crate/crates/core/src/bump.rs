//! Compactly supported smooth bumps with a flat core.

use crate::jet::Jet;

/// Smooth step: `0` for `t ≤ 0`, `1` for `t ≥ 1`, `C^∞` and strictly
/// increasing in between. Built from `e^{-1/t}` so every derivative
/// vanishes at both ends.
pub fn smooth_step(t: Jet) -> Jet {
    let order = t.order();
    let t0 = t.value();
    if t0 <= 0.0 {
        return Jet::constant(0.0, order);
    }
    if t0 >= 1.0 {
        return Jet::constant(1.0, order);
    }
    let one = Jet::constant(1.0, order);
    let q = t.recip() - (one - t).recip();
    let q0 = q.value();
    if q0 > 700.0 {
        return Jet::constant(0.0, order);
    }
    if q0 < -700.0 {
        return Jet::constant(1.0, order);
    }
    (q.exp() + 1.0).recip()
}

/// Bump equal to `1` on `[core_lo, core_hi]`, positive exactly on `(lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub lo: f64,
    pub core_lo: f64,
    pub core_hi: f64,
    pub hi: f64,
}

impl Bump {
    pub const fn new(lo: f64, core_lo: f64, core_hi: f64, hi: f64) -> Self {
        Bump { lo, core_lo, core_hi, hi }
    }

    /// `Φ`: support `[-1, 1]`, flat on `[-1/2, 1/2]`.
    pub const fn symmetric_unit() -> Self {
        Bump::new(-1.0, -0.5, 0.5, 1.0)
    }

    /// Composite `B ∘ x` for an arbitrary inner jet.
    pub fn jet(&self, x: Jet) -> Jet {
        let x0 = x.value();
        let order = x.order();
        if x0 <= self.lo || x0 >= self.hi {
            return Jet::constant(0.0, order);
        }
        let rise = smooth_step((x - self.lo) * (1.0 / (self.core_lo - self.lo)));
        let fall = smooth_step((-x + self.hi) * (1.0 / (self.hi - self.core_hi)));
        rise * fall
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.jet(Jet::constant(x, 0)).value()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_is_flat_outside_unit_interval() {
        assert_eq!(smooth_step(Jet::var(-0.1, 4)).coeffs(), &[0.0; 5]);
        assert_eq!(smooth_step(Jet::var(1.2, 4)).value(), 1.0);
        let mid = smooth_step(Jet::var(0.5, 3));
        assert!((mid.value() - 0.5).abs() < 1e-15);
        assert!(mid.derivative(1) > 0.0);
    }

    #[test]
    fn step_is_antisymmetric() {
        for &t in &[0.1, 0.25, 0.4] {
            let a = smooth_step(Jet::constant(t, 0)).value();
            let b = smooth_step(Jet::constant(1.0 - t, 0)).value();
            assert!((a + b - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn bump_core_and_support() {
        let b = Bump::symmetric_unit();
        assert_eq!(b.eval(0.0), 1.0);
        assert_eq!(b.eval(0.5), 1.0);
        assert_eq!(b.eval(1.0), 0.0);
        assert_eq!(b.eval(-1.3), 0.0);
        assert!(b.eval(0.9) > 0.0 && b.eval(0.9) < 1.0);
    }

    #[test]
    fn bump_derivative_matches_difference_quotient() {
        let b = Bump::new(2.0 / 3.0, 0.75, 1.25, 1.5);
        let x = 0.7;
        let h = 1e-6;
        let fd = (b.eval(x + h) - b.eval(x - h)) / (2.0 * h);
        let an = b.jet(Jet::var(x, 2)).derivative(1);
        assert!((fd - an).abs() < 1e-6 * (1.0 + an.abs()), "{fd} vs {an}");
    }
}
