//! Rotated graphs: `e^{iφ}(x + i f(x)) = y + i f_φ(y)`.
//!
//! `f_φ` is evaluated through `R(x) = x cos φ - f(x) sin φ` and
//! `I(x) = x sin φ + f(x) cos φ`: invert `R` at the requested point, then
//! revert the Taylor series of `R` and compose `I` with it.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::func::{cr_norm, Interval, Profile, SmoothFn};
use crate::jet::Jet;

#[derive(Clone, Debug)]
pub struct RotatedFn {
    pub base: SmoothFn,
    pub phi: f64,
    pub f_phi: SmoothFn,
}

#[derive(Clone)]
struct Frame {
    f: SmoothFn,
    cos: f64,
    sin: f64,
}

impl Frame {
    fn r(&self, x: f64) -> f64 {
        x * self.cos - self.f.value(x) * self.sin
    }

    /// `x` in the base domain with `R(x) = y`; Newton steps safeguarded by a
    /// shrinking bracket, so the result is within a few ulps.
    fn invert(&self, y: f64) -> f64 {
        let dom = self.f.domain();
        let (mut lo, mut hi) = (dom.lo, dom.hi);
        let (r_lo, r_hi) = (self.r(lo), self.r(hi));
        if y <= r_lo {
            return lo;
        }
        if y >= r_hi {
            return hi;
        }
        let mut x = lo + (y - r_lo) / (r_hi - r_lo) * (hi - lo);
        for _ in 0..200 {
            let j = self.f.jet(x, 1);
            let rx = x * self.cos - j.value() * self.sin - y;
            if rx == 0.0 {
                return x;
            }
            if rx < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let slope = self.cos - j.coeff(1) * self.sin;
            let mut next = x - rx / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if next == x || hi - lo <= 2.0 * f64::EPSILON * libm::fabs(x).max(f64::MIN_POSITIVE) {
                return next;
            }
            x = next;
        }
        x
    }

    fn expand(&self, y: f64, order: usize) -> Jet {
        let x0 = self.invert(y);
        let fj = self.f.jet(x0, order);
        let id = Jet::var(x0, order);
        let rj = id * self.cos - fj * self.sin;
        let ij = id * self.sin + fj * self.cos;
        if order == 0 {
            return ij;
        }
        ij.compose(&rj.revert(x0))
    }
}

impl Profile for Frame {
    fn taylor(&self, y: f64, order: usize) -> Jet {
        self.expand(y, order)
    }
}

impl RotatedFn {
    pub fn r(&self, x: f64) -> f64 {
        x * libm::cos(self.phi) - self.base.value(x) * libm::sin(self.phi)
    }

    pub fn i(&self, x: f64) -> f64 {
        x * libm::sin(self.phi) + self.base.value(x) * libm::cos(self.phi)
    }

    pub fn r_prime(&self, x: f64) -> f64 {
        libm::cos(self.phi) - self.base.jet(x, 1).coeff(1) * libm::sin(self.phi)
    }

    /// `x` with `R(x) = y`.
    pub fn preimage(&self, y: f64) -> f64 {
        Frame { f: self.base.clone(), cos: libm::cos(self.phi), sin: libm::sin(self.phi) }.invert(y)
    }
}

/// Rotate the graph of `f` counterclockwise by `phi`.
pub fn rotate_graph(f: &SmoothFn, phi: f64) -> Result<RotatedFn> {
    if f.max_order() < 1 {
        return Err(Error::Capability { requested: 1, max_order: 0 });
    }
    let (c, s) = (libm::cos(phi), libm::sin(phi));
    let dom = f.domain();
    let bad = match f.grid() {
        // node slopes are already stored; f' is monotone between nodes for convex inputs
        Some(g) => g.nodes().iter().zip(g.first_samples()).find(|(_, d1)| c - **d1 * s <= 0.0).map(|(x, _)| *x),
        None => f.sample_points(dom, 1).into_iter().find(|&x| c - f.jet(x, 1).coeff(1) * s <= 0.0),
    };
    if let Some(at) = bad {
        return Err(Error::RotationTooLarge { phi, at });
    }
    let frame = Frame { f: f.clone(), cos: c, sin: s };
    let ydom = Interval::new(frame.r(dom.lo), frame.r(dom.hi))?;
    let f_phi = SmoothFn::from_profile(ydom, f.max_order(), Arc::new(frame));
    Ok(RotatedFn { base: f.clone(), phi, f_phi })
}

/// `(f_φ'(R(x)), f_φ''(R(x)))` from the closed forms in terms of `f`.
pub fn rotated_derivatives(rf: &RotatedFn, x: f64) -> (f64, f64) {
    let (c, s) = (libm::cos(rf.phi), libm::sin(rf.phi));
    let j = rf.base.jet(x, 2);
    let (d1, d2) = (j.derivative(1), j.derivative(2));
    let rp = c - d1 * s;
    ((s + d1 * c) / rp, d2 / (rp * rp * rp))
}

/// Signed curvature of a graph from its first two derivatives.
pub fn graph_curvature(d1: f64, d2: f64) -> f64 {
    d2 / libm::pow(1.0 + d1 * d1, 1.5)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrBoundRow {
    pub phi: f64,
    pub measured: f64,
    pub bound: f64,
}

impl CrBoundRow {
    pub fn holds(&self) -> bool {
        self.measured <= self.bound
    }
}

/// Measured `‖f_φ‖_{C^r(R(J))}` next to the explicit bound
/// `D + ‖f‖_0 + Σ_{i<r} (D + 1 + ‖f‖_{r+i}) / ((cos φ - ‖sin φ f‖_{r+i})(cos φ - ‖sin φ f‖_r)^i)`.
pub fn cr_bound_check(f: &SmoothFn, phis: &[f64], r: usize) -> Result<Vec<CrBoundRow>> {
    let top = (2 * r).saturating_sub(1).max(r);
    if f.max_order() < top {
        return Err(Error::Capability { requested: top, max_order: f.max_order() });
    }
    let dom = f.domain();
    let per_order = cr_norm(f, top, dom)?.per_order;
    let norm = |k: usize| per_order[..=k].iter().sum::<f64>();
    let diam = dom.hi.max(0.0) - dom.lo.min(0.0);
    let mut rows = Vec::with_capacity(phis.len());
    for &phi in phis {
        let (c, s) = (libm::cos(phi), libm::fabs(libm::sin(phi)));
        if !(libm::fabs(libm::tan(phi)) * norm(r) < 1.0) {
            return Err(Error::Precondition(format!(
                "‖f tan φ‖_{r} = {} ≥ 1 at φ = {phi}",
                libm::fabs(libm::tan(phi)) * norm(r)
            )));
        }
        let base = c - s * norm(r);
        let mut bound = diam + norm(0);
        for i in 0..r {
            let den = (c - s * norm(r + i)) * libm::pow(base, i as f64);
            bound += if den > 0.0 { (diam + 1.0 + norm(r + i)) / den } else { f64::INFINITY };
        }
        let rf = rotate_graph(f, phi)?;
        let measured = cr_norm(&rf.f_phi, r, rf.f_phi.domain())?.value;
        rows.push(CrBoundRow { phi, measured, bound });
    }
    Ok(rows)
}
