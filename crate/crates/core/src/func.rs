//! One-dimensional smooth functions, `C^r` norms and Hölder seminorms.

use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::error::{Error, Result};
use crate::jet::{factorial, Jet, JET_CAP};
use crate::quad;

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Argument(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.hi > self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// `n` equally spaced points including both ends.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.mid()],
            _ => {
                let h = self.len() / (n - 1) as f64;
                let mut v: Vec<f64> = (0..n).map(|i| self.lo + h * i as f64).collect();
                v[n - 1] = self.hi;
                v
            }
        }
    }
}

/// Source of Taylor expansions.
pub trait Profile: Send + Sync {
    /// Jet of the function at `x`, truncated after `order`.
    fn taylor(&self, x: f64, order: usize) -> Jet;
}

struct FnProfile<F>(F);

impl<F: Fn(Jet) -> Jet + Send + Sync> Profile for FnProfile<F> {
    fn taylor(&self, x: f64, order: usize) -> Jet {
        (self.0)(Jet::var(x, order))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FnKind {
    ClosedForm,
    GridIntegrated,
}

/// A smooth function on a compact interval with derivatives up to `max_order`.
#[derive(Clone)]
pub struct SmoothFn {
    domain: Interval,
    max_order: usize,
    kind: FnKind,
    profile: Arc<dyn Profile>,
    grid: Option<Arc<GridIntegrated>>,
}

impl core::fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SmoothFn")
            .field("domain", &self.domain)
            .field("max_order", &self.max_order)
            .field("kind", &self.kind)
            .finish()
    }
}

pub const DEFAULT_MAX_ORDER: usize = 6;

impl SmoothFn {
    /// Closed form given as a map on jets of the identity.
    pub fn closed_form<F>(domain: Interval, max_order: usize, f: F) -> Self
    where
        F: Fn(Jet) -> Jet + Send + Sync + 'static,
    {
        Self::from_profile(domain, max_order, Arc::new(FnProfile(f)))
    }

    pub fn from_profile(domain: Interval, max_order: usize, profile: Arc<dyn Profile>) -> Self {
        assert!(max_order < JET_CAP);
        SmoothFn { domain, max_order, kind: FnKind::ClosedForm, profile, grid: None }
    }

    pub fn from_grid(grid: GridIntegrated, max_order: usize) -> Self {
        let domain = Interval { lo: grid.nodes[0], hi: *grid.nodes.last().unwrap() };
        let grid = Arc::new(grid);
        SmoothFn {
            domain,
            max_order: max_order.min(JET_CAP - 1),
            kind: FnKind::GridIntegrated,
            profile: grid.clone(),
            grid: Some(grid),
        }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn kind(&self) -> FnKind {
        self.kind
    }

    pub fn grid(&self) -> Option<&GridIntegrated> {
        self.grid.as_deref()
    }

    pub fn profile(&self) -> Arc<dyn Profile> {
        self.profile.clone()
    }

    /// Same function with a narrower domain.
    pub fn restrict(&self, domain: Interval) -> Result<Self> {
        if !self.domain.contains_interval(&domain) {
            return Err(Error::Argument(format!("restriction [{}, {}] leaves the domain", domain.lo, domain.hi)));
        }
        let mut r = self.clone();
        r.domain = domain;
        Ok(r)
    }

    pub fn with_max_order(mut self, max_order: usize) -> Self {
        self.max_order = max_order.min(JET_CAP - 1);
        self
    }

    /// Unchecked Taylor jet; callers guarantee `x ∈ domain`, `order ≤ max_order`.
    pub fn jet(&self, x: f64, order: usize) -> Jet {
        self.profile.taylor(x, order)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.profile.taylor(x, 0).value()
    }

    pub fn eval(&self, x: f64, order: usize) -> Result<f64> {
        self.check_order(order)?;
        if !self.domain.contains(x) {
            return Err(Error::Argument(format!("x = {x} outside [{}, {}]", self.domain.lo, self.domain.hi)));
        }
        Ok(self.profile.taylor(x, order).derivative(order))
    }

    fn check_order(&self, order: usize) -> Result<()> {
        if order > self.max_order {
            return Err(Error::Capability { requested: order, max_order: self.max_order });
        }
        Ok(())
    }

    /// Sample abscissae over `iv`: the function's own nodes refined `density`
    /// times when grid-integrated, `4096 * density` uniform points otherwise.
    pub fn sample_points(&self, iv: Interval, density: usize) -> Vec<f64> {
        let density = density.max(1);
        match &self.grid {
            Some(g) => {
                let mut pts = vec![iv.lo];
                let i0 = g.nodes.partition_point(|&x| x <= iv.lo);
                let i1 = g.nodes.partition_point(|&x| x < iv.hi);
                let mut prev = iv.lo;
                for &x in g.nodes[i0..i1].iter().chain(core::iter::once(&iv.hi)) {
                    for s in 1..=density {
                        pts.push(prev + (x - prev) * s as f64 / density as f64);
                    }
                    prev = x;
                }
                pts
            }
            None => iv.linspace(4096 * density + 1),
        }
    }
}

/// Function obtained by integrating a closed-form second derivative twice.
///
/// Node values of `f'` and `f` come from cumulative Simpson quadrature
/// (cell midpoints serve as the Simpson midpoints); values between nodes add a
/// Gauss–Legendre panel from the left node.
pub struct GridIntegrated {
    second: Arc<dyn Profile>,
    nodes: Vec<f64>,
    d2: Vec<f64>,
    d1: Vec<f64>,
    d0: Vec<f64>,
}

impl GridIntegrated {
    /// Integrates `second` over `nodes` starting from `f(nodes[0]) = f0`,
    /// `f'(nodes[0]) = f1`.
    pub fn build(second: Arc<dyn Profile>, nodes: Vec<f64>, f0: f64, f1: f64) -> Result<Self> {
        if nodes.len() < 2 || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Argument("grid nodes must be strictly increasing".into()));
        }
        let n = nodes.len();
        let d2: Vec<f64> = nodes.iter().map(|&x| second.taylor(x, 0).value()).collect();
        let mut d1 = vec![0.0; n];
        let mut d0 = vec![0.0; n];
        d1[0] = f1;
        d0[0] = f0;
        for i in 0..n - 1 {
            let h = nodes[i + 1] - nodes[i];
            let fm = second.taylor(0.5 * (nodes[i] + nodes[i + 1]), 0).value();
            d1[i + 1] = d1[i] + h / 6.0 * (d2[i] + 4.0 * fm + d2[i + 1]);
            d0[i + 1] = d0[i] + h * d1[i] + h * h / 6.0 * (d2[i] + 2.0 * fm);
        }
        Ok(GridIntegrated { second, nodes, d2, d1, d0 })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn second_samples(&self) -> &[f64] {
        &self.d2
    }

    pub fn first_samples(&self) -> &[f64] {
        &self.d1
    }

    pub fn value_samples(&self) -> &[f64] {
        &self.d0
    }

    pub fn second_profile(&self) -> Arc<dyn Profile> {
        self.second.clone()
    }

    /// `(f(x), f'(x))`.
    pub fn value_and_slope(&self, x: f64) -> (f64, f64) {
        let n = self.nodes.len();
        let i = self.nodes.partition_point(|&t| t <= x).clamp(1, n) - 1;
        let x0 = self.nodes[i];
        if x == x0 {
            return (self.d0[i], self.d1[i]);
        }
        let (i1, i2) = quad::first_and_second_integral(|s| self.second.taylor(s, 0).value(), x0, x);
        (self.d0[i] + self.d1[i] * (x - x0) + i2, self.d1[i] + i1)
    }
}

impl Profile for GridIntegrated {
    fn taylor(&self, x: f64, order: usize) -> Jet {
        let (v, s) = self.value_and_slope(x);
        let mut c = [0.0; JET_CAP];
        c[0] = v;
        if order >= 1 {
            c[1] = s;
        }
        if order >= 2 {
            let sec = self.second.taylor(x, order - 2);
            for j in 2..=order {
                c[j] = sec.coeff(j - 2) * factorial(j - 2) / factorial(j);
            }
        }
        Jet::from_coeffs(&c[..=order])
    }
}

struct Shifted {
    inner: Arc<dyn Profile>,
    by: usize,
}

impl Profile for Shifted {
    fn taylor(&self, x: f64, order: usize) -> Jet {
        let j = self.inner.taylor(x, order + self.by);
        let mut c = [0.0; JET_CAP];
        for i in 0..=order {
            c[i] = j.coeff(i + self.by) * factorial(i + self.by) / factorial(i);
        }
        Jet::from_coeffs(&c[..=order])
    }
}

/// `x ↦ sign · f(sign · x + shift) + offset`.
struct Affine {
    inner: Arc<dyn Profile>,
    sign: f64,
    shift: f64,
    offset: f64,
}

impl Profile for Affine {
    fn taylor(&self, x: f64, order: usize) -> Jet {
        let j = self.inner.taylor(self.sign * x + self.shift, order);
        let mut c = [0.0; JET_CAP];
        let mut s = 1.0;
        for (i, ci) in c.iter_mut().enumerate().take(order + 1) {
            *ci = j.coeff(i) * s;
            s *= self.sign;
        }
        c[0] += self.offset;
        Jet::from_coeffs(&c[..=order])
    }
}

impl SmoothFn {
    fn affine(&self, sign: f64, shift: f64, offset: f64, domain: Interval) -> SmoothFn {
        SmoothFn {
            domain,
            max_order: self.max_order,
            kind: self.kind,
            profile: Arc::new(Affine { inner: self.profile.clone(), sign, shift, offset }),
            grid: None,
        }
    }

    /// `x ↦ f(x + c)`.
    pub fn translated(&self, c: f64) -> SmoothFn {
        let d = self.domain;
        self.affine(1.0, c, 0.0, Interval { lo: d.lo - c, hi: d.hi - c })
    }

    /// `x ↦ f(-x)`.
    pub fn reflected(&self) -> SmoothFn {
        let d = self.domain;
        self.affine(-1.0, 0.0, 0.0, Interval { lo: -d.hi, hi: -d.lo })
    }

    /// `x ↦ f(x) + v`.
    pub fn offset(&self, v: f64) -> SmoothFn {
        self.affine(1.0, 0.0, v, self.domain)
    }

    /// Same profile on a different domain; evaluation outside the original
    /// domain is the caller's responsibility (used to trim rounding at endpoints).
    pub fn with_domain(&self, domain: Interval) -> SmoothFn {
        let mut r = self.clone();
        r.domain = domain;
        r
    }
}

/// `f^{(order)}` as a function in its own right.
pub fn derivative_fn(f: &SmoothFn, order: usize) -> Result<SmoothFn> {
    f.check_order(order)?;
    if order == 0 {
        return Ok(f.clone());
    }
    Ok(SmoothFn {
        domain: f.domain,
        max_order: f.max_order - order,
        kind: f.kind,
        profile: Arc::new(Shifted { inner: f.profile.clone(), by: order }),
        grid: None,
    })
}

/// `Σ_{i ≤ r} max |f^{(i)}|` over an interval.
#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub r: usize,
    pub value: f64,
    pub per_order: Vec<f64>,
    pub interval: Interval,
}

/// Discrete Hölder seminorm of `f^{(k)}` on a window.
#[derive(Clone, Debug, PartialEq)]
pub struct HolderReport {
    pub k: usize,
    pub alpha: f64,
    pub window: Interval,
    pub seminorm: f64,
    pub pair_argmax: (f64, f64),
    /// `max |f^{(k)}|` over the window samples.
    pub sup: f64,
}

pub fn cr_norm(f: &SmoothFn, r: usize, iv: Interval) -> Result<NormReport> {
    cr_norm_with(f, r, iv, 1)
}

/// `C^r` norm over the sample points of [`SmoothFn::sample_points`].
pub fn cr_norm_with(f: &SmoothFn, r: usize, iv: Interval, density: usize) -> Result<NormReport> {
    f.check_order(r)?;
    if iv.is_degenerate() {
        return Err(Error::Argument("empty interval for C^r norm".into()));
    }
    if !f.domain.contains_interval(&iv) {
        return Err(Error::Argument("norm interval leaves the domain".into()));
    }
    let mut per_order = vec![0.0f64; r + 1];
    for x in f.sample_points(iv, density) {
        let j = f.jet(x, r);
        for (i, m) in per_order.iter_mut().enumerate() {
            *m = m.max(libm::fabs(j.derivative(i)));
        }
    }
    Ok(NormReport { r, value: per_order.iter().sum(), per_order, interval: iv })
}

pub const HOLDER_GRID: usize = 512;

pub fn holder_seminorm(f: &SmoothFn, k: usize, alpha: f64, window: Interval) -> Result<HolderReport> {
    holder_seminorm_with(f, k, alpha, window, HOLDER_GRID)
}

/// Exact supremum of `|f^{(k)}(x) - f^{(k)}(y)| / |x - y|^α` over all pairs
/// of an `n`-point uniform grid on the window.
pub fn holder_seminorm_with(f: &SmoothFn, k: usize, alpha: f64, window: Interval, n: usize) -> Result<HolderReport> {
    f.check_order(k)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Argument(format!("alpha = {alpha} not in (0, 1]")));
    }
    if window.is_degenerate() || n < 2 {
        return Err(Error::Argument("degenerate Hölder window".into()));
    }
    let xs = window.linspace(n);
    let vals: Vec<f64> = xs.iter().map(|&x| f.jet(x, k).derivative(k)).collect();
    Ok(holder_from_samples(&xs, &vals, k, alpha, window))
}

/// Pairwise Hölder quotient supremum over pre-computed samples.
pub fn holder_from_samples(xs: &[f64], vals: &[f64], k: usize, alpha: f64, window: Interval) -> HolderReport {
    let mut best = 0.0;
    let mut arg = (xs[0], xs[0]);
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let q = libm::fabs(vals[i] - vals[j]) / libm::pow(xs[j] - xs[i], alpha);
            if q > best {
                best = q;
                arg = (xs[i], xs[j]);
            }
        }
    }
    let sup = vals.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
    HolderReport { k, alpha, window, seminorm: best, pair_argmax: arg, sup }
}

/// Common closed forms.
pub mod library {
    use super::*;

    /// `Σ c_i x^i`.
    pub fn polynomial(domain: Interval, coeffs: Vec<f64>) -> SmoothFn {
        SmoothFn::closed_form(domain, DEFAULT_MAX_ORDER, move |x| {
            let mut r = Jet::constant(0.0, x.order());
            for &c in coeffs.iter().rev() {
                r = r * x + c;
            }
            r
        })
    }

    /// `a x² / 2`.
    pub fn quadratic(domain: Interval, a: f64) -> SmoothFn {
        polynomial(domain, vec![0.0, 0.0, 0.5 * a])
    }

    pub fn sine(domain: Interval) -> SmoothFn {
        SmoothFn::closed_form(domain, DEFAULT_MAX_ORDER, |x| x.sin_cos().0)
    }

    /// `e^{-1/x}` for `x > 0`, `0` otherwise: strictly convex on `(0, 1/2)` and
    /// flat to all orders at `0`.
    pub fn exp_flat(domain: Interval, max_order: usize) -> SmoothFn {
        SmoothFn::closed_form(domain, max_order, |x| {
            if x.value() <= 0.0 {
                return Jet::constant(0.0, x.order());
            }
            (-x.recip()).exp()
        })
    }

    /// `|x|^p`; derivatives of order `≥ p` at `0` are reported as zero or infinite.
    pub fn abs_power(domain: Interval, p: f64, max_order: usize) -> SmoothFn {
        SmoothFn::closed_form(domain, max_order, move |x| {
            let x0 = x.value();
            if x0 == 0.0 {
                let mut c = [0.0; JET_CAP];
                for (j, cj) in c.iter_mut().enumerate().take(x.order() + 1) {
                    if (j as f64) > p {
                        *cj = f64::INFINITY;
                    }
                }
                return Jet::from_coeffs(&c[..=x.order()]);
            }
            let a = if x0 < 0.0 { -x } else { x };
            a.powf(p)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::library::*;
    use super::*;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn norm_of_identity() {
        let f = polynomial(unit(), vec![0.0, 1.0]);
        let r = cr_norm(&f, 1, unit()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn norm_of_sine() {
        let iv = Interval::new(0.0, core::f64::consts::PI).unwrap();
        let r = cr_norm(&sine(iv), 0, iv).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn capability_and_argument_errors() {
        let f = polynomial(unit(), vec![0.0, 1.0]).with_max_order(2);
        assert!(matches!(cr_norm(&f, 3, unit()), Err(Error::Capability { .. })));
        let empty = Interval::new(0.5, 0.5).unwrap();
        assert!(matches!(cr_norm(&f, 1, empty), Err(Error::Argument(_))));
        assert!(matches!(derivative_fn(&f, 3), Err(Error::Capability { .. })));
        assert!(matches!(holder_seminorm(&f, 1, 0.5, empty), Err(Error::Argument(_))));
        assert!(matches!(holder_seminorm(&f, 1, 0.0, unit()), Err(Error::Argument(_))));
    }

    #[test]
    fn derivative_fn_shifts_orders() {
        let f = polynomial(Interval::new(-5.0, 5.0).unwrap(), vec![0.0, 0.0, 1.0]);
        let d = derivative_fn(&f, 1).unwrap();
        assert_eq!(d.eval(3.0, 0).unwrap(), 6.0);
        assert_eq!(d.eval(3.0, 1).unwrap(), 2.0);
        assert_eq!(d.max_order(), f.max_order() - 1);
        let same = derivative_fn(&f, 0).unwrap();
        for x in [-1.0, 0.3, 2.0] {
            for k in 0..=3 {
                assert_eq!(same.eval(x, k).unwrap(), f.eval(x, k).unwrap());
            }
        }
    }

    #[test]
    fn holder_of_quartic_fourth_derivative_vanishes() {
        let f = polynomial(Interval::new(-2.0, 2.0).unwrap(), vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        let r = holder_seminorm(&f, 4, 0.7, Interval::new(-1.0, 0.5).unwrap()).unwrap();
        assert_eq!(r.seminorm, 0.0);
    }

    #[test]
    fn holder_blowup_for_rough_power() {
        let iv = Interval::new(-1.0, 1.0).unwrap();
        let f = abs_power(iv, 4.5, 4);
        // f'''' = c |x|^{1/2}: finite at alpha = 1/2.
        let half = holder_seminorm(&f, 4, 0.5, iv).unwrap();
        let c4 = 4.5 * 3.5 * 2.5 * 1.5;
        assert!(half.seminorm.is_finite() && half.seminorm <= c4 * 1.0001);
        // alpha = 0.6 grows as the window shrinks, like w^{-0.1}.
        let mut prev = 0.0;
        for w in [1.0, 1e-2, 1e-4, 1e-6] {
            let r = holder_seminorm(&f, 4, 0.6, Interval::new(-w, w).unwrap()).unwrap();
            assert!(r.seminorm > prev, "w = {w}");
            prev = r.seminorm;
        }
    }

    #[test]
    fn grid_integrated_reproduces_cubic() {
        // f'' = 6x on [0, 1], f(0) = 1, f'(0) = 2  =>  f = x^3 + 2x + 1
        let sec: Arc<dyn Profile> = Arc::new(FnProfile(|x: Jet| x * 6.0));
        let g = GridIntegrated::build(sec, unit().linspace(65), 1.0, 2.0).unwrap();
        let f = SmoothFn::from_grid(g, 5);
        for &x in &[0.0, 0.1234, 0.5, 0.999, 1.0] {
            let want = x * x * x + 2.0 * x + 1.0;
            assert!((f.value(x) - want).abs() < 1e-14, "x = {x}");
            assert!((f.eval(x, 1).unwrap() - (3.0 * x * x + 2.0)).abs() < 1e-14);
            assert!((f.eval(x, 3).unwrap() - 6.0).abs() < 1e-14);
        }
        assert_eq!(f.kind(), FnKind::GridIntegrated);
    }

    #[test]
    fn quadrature_consistency_has_second_order_refinement() {
        // centered differences of node values reproduce f'' with O(h²) error
        let sec: Arc<dyn Profile> = Arc::new(FnProfile(|x: Jet| (x * 3.0).sin_cos().0));
        let err = |n: usize| {
            let g = GridIntegrated::build(sec.clone(), unit().linspace(n), 0.0, 0.0).unwrap();
            let (x, v) = (g.nodes(), g.value_samples());
            let mut e = 0.0f64;
            for i in 1..x.len() - 1 {
                let h = x[i + 1] - x[i];
                let fd = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
                e = e.max((fd - g.second_samples()[i]).abs());
            }
            e
        };
        let ratio = err(65) / err(129);
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }
}
