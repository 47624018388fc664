//! Infimal convolution `h(x) = inf_y f(y) + g(x - y)` of convex functions on
//! compact intervals.
//!
//! Two independent routes produce sampled `h`: direct minimization of
//! `σ_x(y) = f(y) + g(x - y)` ([`infconv_direct`]) and the discrete
//! Legendre transform ([`infconv_conjugate`]). [`infconv_fn`] gives `h` as a
//! [`SmoothFn`] whose derivatives come from implicit differentiation of the
//! minimizer equation `f'(y) = g'(x - y)`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::func::{Interval, Profile, SmoothFn};
use crate::jet::Jet;

pub const COARSE_SCAN: usize = 1024;
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    DirectMin,
    Conjugate,
}

#[derive(Clone, Debug)]
pub struct InfConvResult {
    pub route: Route,
    pub xs: Vec<f64>,
    pub h: Vec<f64>,
    pub mu: Vec<f64>,
    /// Minimizer sits at an end of the admissible window.
    pub boundary: Vec<bool>,
}

impl InfConvResult {
    pub fn sup_diff(&self, other: &InfConvResult) -> f64 {
        self.h.iter().zip(&other.h).fold(0.0f64, |m, (a, b)| m.max(libm::fabs(a - b)))
    }
}

/// Matched second derivatives at `(μ(x), x - μ(x), x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessDiag {
    pub x: f64,
    pub mu: f64,
    pub hess_f: f64,
    pub hess_g: f64,
    /// `f'' g'' / (f'' + g'')`.
    pub hess_h: f64,
    /// `g'' / (f'' + g'')`.
    pub j_mu: f64,
    /// Richardson-extrapolated second difference of `h` built from independent minimizer solves.
    pub hess_h_fd: f64,
    /// Extrapolated central difference of the minimizer map.
    pub j_mu_fd: f64,
    /// `h'` by extrapolated central difference of `h`.
    pub grad_h_fd: f64,
    pub grad_f: f64,
    pub grad_g: f64,
}

impl SmoothnessDiag {
    /// Largest residual of `h' = f'∘μ = g'(x-μ)` and
    /// `h'' = f''·J_μ = g''·(1 - J_μ)`, each scaled by `1 + |value|`.
    pub fn identity_residual(&self) -> f64 {
        let rel = |a: f64, b: f64| libm::fabs(a - b) / (1.0 + libm::fabs(b));
        let checks = [
            rel(self.grad_h_fd, self.grad_f),
            rel(self.grad_f, self.grad_g),
            rel(self.hess_h_fd, self.hess_f * self.j_mu_fd),
            rel(self.hess_h_fd, self.hess_g * (1.0 - self.j_mu_fd)),
        ];
        checks.iter().fold(0.0f64, |m, v| m.max(*v))
    }
}

/// Discrete convexity check: second differences on `n` points are `≥ -tol·scale`.
pub fn check_convex(f: &SmoothFn, n: usize, tol: f64) -> Result<()> {
    let xs = f.domain().linspace(n.max(3));
    let vs: Vec<f64> = xs.iter().map(|&x| f.value(x)).collect();
    let scale = vs.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v))).max(f64::MIN_POSITIVE);
    for i in 1..xs.len() - 1 {
        let d = vs[i + 1] - 2.0 * vs[i] + vs[i - 1];
        if d < -tol * scale {
            return Err(Error::Validation(format!("not convex near x = {}: second difference {d:e}", xs[i])));
        }
    }
    Ok(())
}

fn window(f: &SmoothFn, g: &SmoothFn, x: f64) -> Result<(f64, f64)> {
    let (fd, gd) = (f.domain(), g.domain());
    let lo = fd.lo.max(x - gd.hi);
    let hi = fd.hi.min(x - gd.lo);
    if !(lo <= hi) {
        return Err(Error::Argument(format!("x = {x} outside dom f + dom g")));
    }
    Ok((lo, hi))
}

fn slope_gap(f: &SmoothFn, g: &SmoothFn, x: f64, y: f64) -> f64 {
    f.jet(y, 1).coeff(1) - g.jet(x - y, 1).coeff(1)
}

/// Bisection on the increasing map `y ↦ f'(y) - g'(x - y)` over `[lo, hi]`,
/// run until the bracket cannot shrink further.
fn bisect_gap(f: &SmoothFn, g: &SmoothFn, x: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope_gap(f, g, x, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (a, b) = (slope_gap(f, g, x, lo), slope_gap(f, g, x, hi));
    if libm::fabs(a) <= libm::fabs(b) {
        lo
    } else {
        hi
    }
}

/// The minimizer `μ(x)`: root of `f'(y) = g'(x - y)`.
pub fn minimizer_map(f: &SmoothFn, g: &SmoothFn, x: f64) -> Result<f64> {
    if f.max_order() < 1 || g.max_order() < 1 {
        return Err(Error::Capability { requested: 1, max_order: 0 });
    }
    let (lo, hi) = window(f, g, x)?;
    let (a, b) = (slope_gap(f, g, x, lo), slope_gap(f, g, x, hi));
    if a > 0.0 || b < 0.0 {
        return Err(Error::RootNotBracketed { lo, hi });
    }
    if a == 0.0 {
        return Ok(lo);
    }
    if b == 0.0 {
        return Ok(hi);
    }
    Ok(bisect_gap(f, g, x, lo, hi))
}

/// Minimizer with the boundary fallback used by the direct route.
fn minimizer_or_boundary(f: &SmoothFn, g: &SmoothFn, x: f64) -> Result<(f64, bool)> {
    let (lo, hi) = window(f, g, x)?;
    if slope_gap(f, g, x, lo) >= 0.0 {
        return Ok((lo, true));
    }
    if slope_gap(f, g, x, hi) <= 0.0 {
        return Ok((hi, true));
    }
    Ok((bisect_gap(f, g, x, lo, hi), false))
}

fn golden(sigma: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (sigma(c), sigma(d));
    for _ in 0..200 {
        if b - a <= ROOT_TOL * (1.0 + libm::fabs(a)) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = sigma(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = sigma(d);
        }
    }
    0.5 * (a + b)
}

/// Direct route: coarse scan of `σ_x`, golden-section refinement, then a
/// bisection polish on `f' - g'` when the refined bracket straddles the root.
pub fn infconv_direct(f: &SmoothFn, g: &SmoothFn, out: Interval, grid_n: usize) -> Result<InfConvResult> {
    check_convex(f, 1024, 1e-9)?;
    check_convex(g, 1024, 1e-9)?;
    let xs = out.linspace(grid_n);
    let mut h = Vec::with_capacity(xs.len());
    let mut mu = Vec::with_capacity(xs.len());
    let mut boundary = Vec::with_capacity(xs.len());
    let smooth = f.max_order() >= 1 && g.max_order() >= 1;
    for &x in &xs {
        let (lo, hi) = window(f, g, x)?;
        let sigma = |y: f64| f.value(y) + g.value(x - y);
        let (y, at_edge) = if hi - lo <= 0.0 {
            (lo, true)
        } else {
            let step = (hi - lo) / (COARSE_SCAN - 1) as f64;
            let mut best = (0usize, f64::INFINITY);
            for i in 0..COARSE_SCAN {
                let v = sigma(lo + step * i as f64);
                if v < best.1 {
                    best = (i, v);
                }
            }
            let a = lo + step * best.0.saturating_sub(1) as f64;
            let b = (lo + step * (best.0 + 1) as f64).min(hi);
            let mut y = golden(&sigma, a, b);
            if smooth {
                let (ga, gb) = (slope_gap(f, g, x, a), slope_gap(f, g, x, b));
                if ga < 0.0 && gb > 0.0 {
                    y = bisect_gap(f, g, x, a, b);
                } else if a == lo && ga >= 0.0 {
                    y = lo;
                } else if b == hi && gb <= 0.0 {
                    y = hi;
                }
            }
            let tol = ROOT_TOL * (1.0 + libm::fabs(y)) + 4.0 * f64::EPSILON * (hi - lo);
            (y, y - lo <= tol || hi - y <= tol)
        };
        h.push(f.value(y) + g.value(x - y));
        mu.push(y);
        boundary.push(at_edge);
    }
    Ok(InfConvResult { route: Route::DirectMin, xs, h, mu, boundary })
}

/// Lower convex hull of points sorted by abscissa (indices into the input).
fn lower_hull(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Discrete Legendre transform `f*(s) = max_i (s x_i - f_i)` at increasing
/// slopes in linear time. Returns values and the maximizing sample index.
pub fn discrete_conjugate(xs: &[f64], fs: &[f64], slopes: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let hull = lower_hull(xs, fs);
    let mut p = 0;
    let mut vals = Vec::with_capacity(slopes.len());
    let mut arg = Vec::with_capacity(slopes.len());
    for &s in slopes {
        while p + 1 < hull.len() {
            let (a, b) = (hull[p], hull[p + 1]);
            if (fs[b] - fs[a]) / (xs[b] - xs[a]) <= s {
                p += 1;
            } else {
                break;
            }
        }
        let i = hull[p];
        vals.push(s * xs[i] - fs[i]);
        arg.push(i);
    }
    (vals, arg)
}

const MAX_SPLITS: usize = 64;
const SPLIT_TOL: f64 = 1e-12;

/// Slope node of `φ = f* + g*` with its exact dual points.
#[derive(Clone, Copy)]
struct Node {
    s: f64,
    phi: f64,
    xf: f64,
    xg: f64,
}

impl Node {
    fn dphi(&self) -> f64 {
        self.xf + self.xg
    }
}

/// Root of `f' = s` in `[lo, hi]` by safeguarded Newton from `x0`.
fn dual_point(f: &SmoothFn, s: f64, lo: f64, hi: f64, x0: f64) -> f64 {
    let (mut lo, mut hi, mut x) = (lo, hi, x0);
    let scale = 1.0 + libm::fabs(lo) + libm::fabs(hi);
    for _ in 0..100 {
        let j = f.jet(x, 2);
        let r = j.derivative(1) - s;
        if r == 0.0 {
            return x;
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - r / j.derivative(2);
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if libm::fabs(next - x) <= 4.0 * f64::EPSILON * scale || hi - lo <= 4.0 * f64::EPSILON * scale {
            return next;
        }
        x = next;
    }
    x
}

/// `f*(s)` and `f*'(s)` at each slope: the discrete transform picks the
/// sample cell, a Newton solve of `f' = s` inside it gives the exact point.
fn conjugate_with_slope(f: &SmoothFn, xs: &[f64], fs: &[f64], slopes: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (_, arg) = discrete_conjugate(xs, fs, slopes);
    let last = xs.len() - 1;
    slopes
        .iter()
        .zip(arg)
        .map(|(&s, i)| {
            let (lo, hi) = (xs[i.saturating_sub(1)], xs[(i + 1).min(last)]);
            let inside = |x: f64| f.jet(x, 1).derivative(1);
            // the maximiser is an end of the domain when s is out of range of f'
            let x = if i == 0 && inside(xs[0]) >= s {
                xs[0]
            } else if i == last && inside(xs[last]) <= s {
                xs[last]
            } else {
                dual_point(f, s, lo, hi, xs[i])
            };
            (s * x - f.value(x), x)
        })
        .unzip()
}

/// Conjugate route: `h = (f* + g*)*`. Inner transforms on uniform grids of
/// `8·grid_n + 1` points, each sharpened to the exact dual point; the outer
/// transform bisects the slope cell holding `x` with further exact nodes
/// until the concavity gap is below `SPLIT_TOL`, then maximises `s x - φ(s)`
/// over the cubic Hermite interpolant of `φ = f* + g*`, whose nodal slopes
/// `φ' = x_f + x_g` are exact.
pub fn infconv_conjugate(f: &SmoothFn, g: &SmoothFn, out: Interval, grid_n: usize) -> Result<InfConvResult> {
    check_convex(f, 1024, 1e-9)?;
    check_convex(g, 1024, 1e-9)?;
    let m = 8 * grid_n + 1;
    let fx = f.domain().linspace(m);
    let gx = g.domain().linspace(m);
    let fv: Vec<f64> = fx.iter().map(|&x| f.value(x)).collect();
    let gv: Vec<f64> = gx.iter().map(|&x| g.value(x)).collect();
    let edge_slopes = |xs: &[f64], vs: &[f64]| {
        let n = xs.len();
        ((vs[1] - vs[0]) / (xs[1] - xs[0]), (vs[n - 1] - vs[n - 2]) / (xs[n - 1] - xs[n - 2]))
    };
    let (fa, fb) = edge_slopes(&fx, &fv);
    let (ga, gb) = edge_slopes(&gx, &gv);
    let slopes = Interval::new(fa.min(ga), fb.max(gb))?.linspace(m);
    let (fs, fd) = conjugate_with_slope(f, &fx, &fv, &slopes);
    let (gs, gd) = conjugate_with_slope(g, &gx, &gv, &slopes);
    let phi: Vec<f64> = fs.iter().zip(&gs).map(|(a, b)| a + b).collect();
    let dphi: Vec<f64> = fd.iter().zip(&gd).map(|(a, b)| a + b).collect();
    let xs = out.linspace(grid_n);
    let last = slopes.len() - 1;
    let mut h = Vec::with_capacity(xs.len());
    let mut mu = Vec::with_capacity(xs.len());
    let mut boundary = Vec::with_capacity(xs.len());
    for &x in &xs {
        if x <= dphi[0] || x >= dphi[last] {
            let j = if x <= dphi[0] { 0 } else { last };
            h.push(slopes[j] * x - phi[j]);
            mu.push(fd[j]);
            boundary.push(true);
            continue;
        }
        // dphi is nondecreasing, so the cell with dphi[j] ≤ x < dphi[j+1] is unique
        let j = dphi.partition_point(|&d| d <= x) - 1;
        let mut lo = Node { s: slopes[j], phi: phi[j], xf: fd[j], xg: gd[j] };
        let mut hi = Node { s: slopes[j + 1], phi: phi[j + 1], xf: fd[j + 1], xg: gd[j + 1] };
        // sx - φ is concave, so the cell's gap is at most Δs·Δφ'/4; split
        // with exact dual points until that is negligible
        for _ in 0..MAX_SPLITS {
            if (hi.s - lo.s) * (hi.dphi() - lo.dphi()) <= 4.0 * SPLIT_TOL * (1.0 + libm::fabs(x)) {
                break;
            }
            let s = 0.5 * (lo.s + hi.s);
            let xf = dual_point(f, s, lo.xf, hi.xf, 0.5 * (lo.xf + hi.xf));
            let xg = dual_point(g, s, lo.xg, hi.xg, 0.5 * (lo.xg + hi.xg));
            let mid = Node { s, phi: s * xf - f.value(xf) + s * xg - g.value(xg), xf, xg };
            if mid.dphi() <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (s0, w) = (lo.s, hi.s - lo.s);
        let (p0, p1, d0, d1) = (lo.phi, hi.phi, lo.dphi() * w, hi.dphi() * w);
        let hermite = |t: f64| {
            let (t2, t3) = (t * t, t * t * t);
            (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * d1
        };
        let slope = |t: f64| {
            let t2 = t * t;
            ((6.0 * t2 - 6.0 * t) * p0
                + (3.0 * t2 - 4.0 * t + 1.0) * d0
                + (6.0 * t - 6.0 * t2) * p1
                + (3.0 * t2 - 2.0 * t) * d1)
                / w
        };
        let (mut a, mut b) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if slope(mid) < x {
                a = mid;
            } else {
                b = mid;
            }
        }
        let t = 0.5 * (a + b);
        // never below the exact node values
        let best = (s0 + t * w) * x - hermite(t);
        h.push(best.max(lo.s * x - lo.phi).max(hi.s * x - hi.phi));
        mu.push(dual_point(f, s0 + t * w, lo.xf, hi.xf, lo.xf + t * (hi.xf - lo.xf)));
        boundary.push(false);
    }
    Ok(InfConvResult { route: Route::Conjugate, xs, h, mu, boundary })
}

/// Second derivatives at the matched triple and the identities `h' = f'∘μ`,
/// `h'' = f''·J_μ = g''·(1 - J_μ)`.
pub fn smoothness_diag(f: &SmoothFn, g: &SmoothFn, x: f64) -> Result<SmoothnessDiag> {
    if f.max_order() < 2 || g.max_order() < 2 {
        return Err(Error::Capability { requested: 2, max_order: f.max_order().min(g.max_order()) });
    }
    let mu = minimizer_map(f, g, x)?;
    let fj = f.jet(mu, 2);
    let gj = g.jet(x - mu, 2);
    let (hess_f, hess_g) = (fj.derivative(2), gj.derivative(2));
    let sum = hess_f + hess_g;
    if !(sum > 0.0) {
        return Err(Error::DegenerateHessian { x, curvature_sum: sum });
    }
    let dom = window(f, g, x)?;
    let scale = (dom.1 - dom.0).max(libm::fabs(x)).max(1e-300);
    let delta = 1e-4 * scale;
    let h_at = |t: f64| -> Result<(f64, f64)> {
        let y = minimizer_map(f, g, t)?;
        Ok((f.value(y) + g.value(t - y), y))
    };
    let (hp, mp) = h_at(x + delta)?;
    let (hm, mm) = h_at(x - delta)?;
    let (hp2, mp2) = h_at(x + 2.0 * delta)?;
    let (hm2, mm2) = h_at(x - 2.0 * delta)?;
    let h0 = f.value(mu) + g.value(x - mu);
    // one Richardson level: the δ² terms cancel
    let rich = |d1: f64, d2: f64| (4.0 * d1 - d2) / 3.0;
    Ok(SmoothnessDiag {
        x,
        mu,
        hess_f,
        hess_g,
        hess_h: hess_f * hess_g / sum,
        j_mu: hess_g / sum,
        hess_h_fd: rich((hp - 2.0 * h0 + hm) / (delta * delta), (hp2 - 2.0 * h0 + hm2) / (4.0 * delta * delta)),
        j_mu_fd: rich((mp - mm) / (2.0 * delta), (mp2 - mm2) / (4.0 * delta)),
        grad_h_fd: rich((hp - hm) / (2.0 * delta), (hp2 - hm2) / (4.0 * delta)),
        grad_f: fj.derivative(1),
        grad_g: gj.derivative(1),
    })
}

struct InfConvProfile {
    f: SmoothFn,
    g: SmoothFn,
}

impl InfConvProfile {
    /// Taylor jet of `h` at `x` by Newton iteration on jets of
    /// `f'(μ + δ) - g'(x - μ + ε - δ) = 0`.
    fn expand(&self, x: f64, order: usize) -> Jet {
        let (mu, _) = match minimizer_or_boundary(&self.f, &self.g, x) {
            Ok(v) => v,
            Err(_) => return Jet::constant(f64::NAN, order),
        };
        let z = x - mu;
        let fj = self.f.jet(mu, order + 1);
        let gj = self.g.jet(z, order + 1);
        if order == 0 {
            return Jet::constant(fj.value() + gj.value(), 0);
        }
        let fd = fj.differentiate();
        let gd = gj.differentiate();
        let slope = fd.coeff(1) + gd.coeff(1);
        let eps = Jet::var(0.0, order);
        let mut delta = Jet::constant(0.0, order);
        if slope > 0.0 {
            for _ in 0..order {
                let mut r = fd.compose(&(delta + mu)) - gd.compose(&(eps - delta + z));
                r = r.map_value(0.0);
                delta = delta - r / slope;
            }
        } else {
            // f'' + g'' = 0: the minimizer is locally stuck; expansion beyond h' is undefined.
            let mut c = [f64::NAN; crate::jet::JET_CAP];
            c[0] = fj.value() + gj.value();
            c[1] = fd.value();
            return Jet::from_coeffs(&c[..=order]);
        }
        let fj = fj.truncate(order);
        let gj = gj.truncate(order);
        let mut h = fj.compose(&(delta + mu)) + gj.compose(&(eps - delta + z));
        h = h.map_value(fj.value() + gj.value());
        h
    }
}

impl Profile for InfConvProfile {
    fn taylor(&self, x: f64, order: usize) -> Jet {
        self.expand(x, order)
    }
}

/// `f □ g` on `out` as a smooth function (order one below the inputs).
pub fn infconv_fn(f: &SmoothFn, g: &SmoothFn, out: Interval) -> Result<SmoothFn> {
    let (fd, gd) = (f.domain(), g.domain());
    let full = Interval::new(fd.lo + gd.lo, fd.hi + gd.hi)?;
    if !full.contains_interval(&out) {
        return Err(Error::Argument("output interval leaves dom f + dom g".into()));
    }
    let order = f.max_order().min(g.max_order()).saturating_sub(1);
    Ok(SmoothFn::from_profile(out, order, Arc::new(InfConvProfile { f: f.clone(), g: g.clone() })))
}

/// Convexity of sampled `h`: minimum scaled second difference.
pub fn min_second_difference(r: &InfConvResult) -> f64 {
    let scale = r.h.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v))).max(f64::MIN_POSITIVE);
    (1..r.h.len().saturating_sub(1))
        .map(|i| (r.h[i + 1] - 2.0 * r.h[i] + r.h[i - 1]) / scale)
        .fold(f64::INFINITY, f64::min)
}

/// Per-sample `(h', h'', J_μ)` from the matched derivatives of `f` and `g`.
pub fn derivative_columns(f: &SmoothFn, g: &SmoothFn, r: &InfConvResult) -> Vec<(f64, f64, f64)> {
    r.xs.iter()
        .zip(&r.mu)
        .map(|(&x, &mu)| {
            let fj = f.jet(mu, 2);
            let gj = g.jet(x - mu, 2);
            let (a, b) = (fj.derivative(2), gj.derivative(2));
            let s = a + b;
            if s > 0.0 {
                (fj.derivative(1), a * b / s, b / s)
            } else {
                (fj.derivative(1), f64::NAN, f64::NAN)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::library::{polynomial, quadratic};
    use alloc::vec;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn parabola_pair_closed_form() {
        // x² □ 2x² = (2/3) x²
        let f = polynomial(iv(-2.0, 2.0), vec![0.0, 0.0, 1.0]);
        let g = polynomial(iv(-2.0, 2.0), vec![0.0, 0.0, 2.0]);
        let d = infconv_direct(&f, &g, iv(-1.0, 1.0), 101).unwrap();
        for (x, h) in d.xs.iter().zip(&d.h) {
            assert!((h - 2.0 / 3.0 * x * x).abs() < 1e-12, "x = {x}");
        }
        assert!(d.boundary.iter().all(|b| !b));
    }

    #[test]
    fn flat_g_gives_min_of_f() {
        let f = polynomial(iv(-1.0, 1.0), vec![0.5, -0.2, 1.0]);
        let g = polynomial(iv(-10.0, 10.0), vec![0.0]);
        let d = infconv_direct(&f, &g, iv(-3.0, 3.0), 31).unwrap();
        let fmin = 0.5 - 0.01;
        for h in &d.h {
            assert!((h - fmin).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_split() {
        let f = quadratic(iv(-2.0, 2.0), 1.0);
        let d = infconv_direct(&f, &f, iv(-1.0, 1.0), 21).unwrap();
        for ((x, h), mu) in d.xs.iter().zip(&d.h).zip(&d.mu) {
            assert!((h - x * x / 4.0).abs() < 1e-12);
            assert!((mu - x / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn conjugate_route_on_unequal_parabolas() {
        // a = 1, b = 3 -> h = (3/4) x²/2
        let f = quadratic(iv(-2.0, 2.0), 1.0);
        let g = quadratic(iv(-2.0, 2.0), 3.0);
        let c = infconv_conjugate(&f, &g, iv(-1.0, 1.0), 2001).unwrap();
        for (x, h) in c.xs.iter().zip(&c.h) {
            assert!((h - 0.375 * x * x).abs() < 1e-6, "x = {x}: {h}");
        }
    }

    #[test]
    fn minimizer_map_parabolas() {
        let f = quadratic(iv(-2.0, 2.0), 1.0);
        let g = quadratic(iv(-2.0, 2.0), 3.0);
        for x in [-1.0, -0.3, 0.0, 0.7] {
            let y = minimizer_map(&f, &g, x).unwrap();
            assert!((y - 0.75 * x).abs() < 1e-14);
        }
        let y = minimizer_map(&f, &f, 0.8).unwrap();
        assert!((y - 0.4).abs() < 1e-15);
    }

    #[test]
    fn unbracketed_root_is_reported() {
        let f = polynomial(iv(0.0, 1.0), vec![0.0, 1.0, 1.0]); // f' ≥ 1
        let g = quadratic(iv(0.0, 1.0), 1.0); // g' ≤ 1 on [0, 1]
        assert!(matches!(minimizer_map(&f, &g, 0.5), Err(Error::RootNotBracketed { .. })));
    }

    #[test]
    fn nonconvex_input_rejected() {
        let f = polynomial(iv(-1.0, 1.0), vec![0.0, 0.0, -1.0]);
        let g = quadratic(iv(-1.0, 1.0), 1.0);
        assert!(matches!(infconv_direct(&f, &g, iv(-0.5, 0.5), 5), Err(Error::Validation(_))));
    }

    #[test]
    fn smoothness_diag_parabolas_and_quartic() {
        let f = quadratic(iv(-2.0, 2.0), 1.0);
        let g = quadratic(iv(-2.0, 2.0), 3.0);
        let d = smoothness_diag(&f, &g, 0.4).unwrap();
        assert!((d.hess_h - 0.75).abs() < 1e-14);
        assert!((d.j_mu - 0.75).abs() < 1e-14);
        assert!(d.identity_residual() < 1e-6);
        let s = smoothness_diag(&f, &f, -0.2).unwrap();
        assert!((s.j_mu - 0.5).abs() < 1e-15);
        // g = x⁴/4 is flat at 0: μ(0) = 0 and h''(0) = 0
        let q = polynomial(iv(-2.0, 2.0), vec![0.0, 0.0, 0.0, 0.0, 0.25]);
        let z = smoothness_diag(&f, &q, 0.0).unwrap();
        assert_eq!(z.hess_g, 0.0);
        assert_eq!(z.hess_h, 0.0);
    }

    #[test]
    fn degenerate_hessian() {
        let lin = polynomial(iv(-1.0, 1.0), vec![0.0, 0.0, 0.0, 0.0, 0.25]);
        assert!(matches!(smoothness_diag(&lin, &lin, 0.0), Err(Error::DegenerateHessian { .. })));
    }

    #[test]
    fn jet_evaluator_matches_closed_form() {
        let f = quadratic(iv(-2.0, 2.0), 1.0);
        let g = quadratic(iv(-2.0, 2.0), 3.0);
        let h = infconv_fn(&f, &g, iv(-1.0, 1.0)).unwrap();
        let j = h.jet(0.6, 4);
        assert!((j.derivative(0) - 0.375 * 0.36).abs() < 1e-15);
        assert!((j.derivative(1) - 0.75 * 0.6).abs() < 1e-14);
        assert!((j.derivative(2) - 0.75).abs() < 1e-13);
        assert!(j.derivative(3).abs() < 1e-12);
    }

    #[test]
    fn jet_evaluator_quartic_pair() {
        // f = y²/2, g = z⁴/4: μ solves y = (x - y)³; check h'' against J_μ formula
        let f = quadratic(iv(-2.0, 2.0), 1.0);
        let g = polynomial(iv(-2.0, 2.0), vec![0.0, 0.0, 0.0, 0.0, 0.25]);
        let h = infconv_fn(&f, &g, iv(-1.0, 1.0)).unwrap();
        let x = 0.9;
        let d = smoothness_diag(&f, &g, x).unwrap();
        let j = h.jet(x, 4);
        assert!((j.derivative(2) - d.hess_h).abs() < 1e-13);
        // h''' by differencing h'' from the jets
        let e = 1e-5;
        let fd3 = (h.jet(x + e, 2).derivative(2) - h.jet(x - e, 2).derivative(2)) / (2.0 * e);
        assert!((j.derivative(3) - fd3).abs() < 1e-7 * (1.0 + fd3.abs()), "{} vs {fd3}", j.derivative(3));
    }

    #[test]
    fn discrete_conjugate_of_abs_is_indicator_like() {
        let xs = iv(-1.0, 1.0).linspace(201);
        let fs: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
        let (v, _) = discrete_conjugate(&xs, &fs, &[-0.5, 0.0, 0.5, 2.0]);
        assert!(v[0].abs() < 1e-15 && v[1].abs() < 1e-15 && v[2].abs() < 1e-15);
        assert!((v[3] - 1.0).abs() < 1e-15);
    }
}
