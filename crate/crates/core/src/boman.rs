//! Boman's convex patching: a function infinitely flat at `0` whose slope
//! at `t_k = 4^{-k}` is exactly `b_k`, assembled from local models `f_k`.
//!
//! `f''` is the series `Σ b_k f_k''(x - t_k) Ψ_{2k}(x) + α_k Ψ_{2k-1}(x)`
//! with `Ψ_j(x) = Ψ(2^j x)`; `α_k` is chosen so that the slope drops from
//! `b_{k-1}` to `b_k` across `[t_k, 4t_k]`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::bump::Bump;
use crate::error::{Error, Result};
use crate::func::{GridIntegrated, Interval, Profile, SmoothFn, DEFAULT_MAX_ORDER};
use crate::jet::{factorial, Jet, JET_CAP};
use crate::quad::simpson;

pub const COEFF_QUADRATURE: usize = 4096;
pub const GRID_PER_SEGMENT: usize = 1 << 14;
/// Series terms whose slope contribution is below this fraction of `b_K` are dropped.
pub const TRUNCATION: f64 = 1e-16;

pub fn t(k: usize) -> f64 {
    libm::ldexp(1.0, -2 * k as i32)
}

/// `Ψ = ψ / Σ_m ψ(2^m ·)` for a mollifier `ψ` positive on `(2/3, 3/2)`, flat on `[3/4, 5/4]`.
#[derive(Clone, Copy, Debug)]
pub struct BumpSystem {
    psi0: Bump,
    /// `max |Σ_m Ψ(2^m x) - 1|` over the certificate grid.
    pub certificate: f64,
    /// `∫ Ψ`.
    pub integral: f64,
}

impl BumpSystem {
    pub fn jet(&self, x: Jet) -> Jet {
        let x0 = x.value();
        if !(x0 > 2.0 / 3.0 && x0 < 1.5) {
            return Jet::constant(0.0, x.order());
        }
        let num = self.psi0.jet(x);
        num / (self.psi0.jet(x * 0.5) + num + self.psi0.jet(x * 2.0))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.jet(Jet::constant(x, 0)).value()
    }

    /// `Ψ_j(x) = Ψ(2^j x)` on a jet.
    pub fn scaled(&self, j: i32, x: Jet) -> Jet {
        self.jet(x * libm::ldexp(1.0, j))
    }

    /// `Σ_m Ψ(2^m x) - 1` for `x > 0`.
    pub fn partition_residual(&self, x: f64) -> f64 {
        let m0 = -libm::round(libm::log2(x)) as i32;
        let s: f64 = (m0 - 3..=m0 + 3).map(|m| self.eval(libm::ldexp(x, m))).sum();
        s - 1.0
    }
}

pub fn make_bump_system() -> BumpSystem {
    let mut sys = BumpSystem { psi0: Bump::new(2.0 / 3.0, 0.75, 1.25, 1.5), certificate: 0.0, integral: 0.0 };
    let pts = Interval { lo: -6.0, hi: 6.0 }.linspace(1001);
    sys.certificate = pts.iter().map(|&e| libm::fabs(sys.partition_residual(libm::exp2(e)))).fold(0.0, f64::max);
    sys.integral = simpson(|x| sys.eval(x), 2.0 / 3.0, 1.5, COEFF_QUADRATURE);
    sys
}

/// Local models `f_k` on `[-t_k, t_k]`, given as maps on jets.
#[derive(Clone)]
pub struct Family {
    pub name: String,
    f: Arc<dyn Fn(usize, Jet) -> Jet + Send + Sync>,
}

impl core::fmt::Debug for Family {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Family({})", self.name)
    }
}

impl Family {
    pub fn new<F: Fn(usize, Jet) -> Jet + Send + Sync + 'static>(name: &str, f: F) -> Self {
        Family { name: name.into(), f: Arc::new(f) }
    }

    /// `f_k(u) = a_k² u² / 2`.
    pub fn quadratic<A: Fn(usize) -> f64 + Send + Sync + 'static>(a: A) -> Self {
        Family::new("quadratic", move |k, u| {
            let a = a(k);
            u * u * (0.5 * a * a)
        })
    }

    /// `f_k(u) = u⁴ / 4` for every `k`.
    pub fn quartic() -> Self {
        Family::new("quartic", |_, u| u.powi(4) * 0.25)
    }

    pub fn value(&self, k: usize, u: Jet) -> Jet {
        (self.f)(k, u)
    }

    /// Jet of `f_k''` at `u0` (in the same variable as the input jet offset).
    pub fn second(&self, k: usize, u0: f64, order: usize) -> Jet {
        let j = (self.f)(k, Jet::var(u0, order + 2));
        let mut c = [0.0; JET_CAP];
        for i in 0..=order {
            c[i] = j.coeff(i + 2) * factorial(i + 2) / factorial(i);
        }
        Jet::from_coeffs(&c[..=order])
    }

    pub fn as_fn(&self, k: usize) -> SmoothFn {
        let tk = t(k);
        let fam = self.clone();
        SmoothFn::closed_form(Interval { lo: -tk, hi: tk }, DEFAULT_MAX_ORDER, move |u| fam.value(k, u))
    }
}

/// Closed-form schedule: `b_k = 2^{-k - k²/q}`, `a_k = a_scale · 4^{-k}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub q: f64,
    pub a_scale: f64,
    /// Hölder exponent the schedule is meant to defeat.
    pub alpha: f64,
    /// Number of coefficients kept for bookkeeping (`b_0 ..= b_depth`).
    pub depth: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { q: 24.0, a_scale: 1.0 / 16.0, alpha: 0.9, depth: 128 }
    }
}

impl Schedule {
    pub fn b(&self, k: usize) -> f64 {
        let k = k as f64;
        libm::exp2(-k - k * k / self.q)
    }

    pub fn a(&self, k: usize) -> f64 {
        self.a_scale * t(k)
    }

    pub fn b_seq(&self) -> Vec<f64> {
        (0..=self.depth).map(|k| self.b(k)).collect()
    }

    /// `a_k^α / b_k`.
    pub fn hypothesis_ratio(&self, k: usize) -> f64 {
        libm::pow(self.a(k), self.alpha) / self.b(k)
    }

    /// `a_k^α / b_k` strictly decreasing over `ks`; returns the first offending `k`.
    pub fn validate_hypothesis(&self, ks: core::ops::RangeInclusive<usize>) -> Result<()> {
        let mut prev = f64::INFINITY;
        for k in ks {
            let r = self.hypothesis_ratio(k);
            if !(r < prev) {
                return Err(Error::Precondition(format!("a_k^α / b_k not decreasing at k = {k} ({r:e} ≥ {prev:e})")));
            }
            prev = r;
        }
        Ok(())
    }

    pub fn quadratic_input(&self) -> BomanInput {
        let s = *self;
        BomanInput { b: self.b_seq(), family: Family::quadratic(move |k| s.a(k)) }
    }

    pub fn quartic_input(&self) -> BomanInput {
        BomanInput { b: self.b_seq(), family: Family::quartic() }
    }
}

#[derive(Clone, Debug)]
pub struct BomanInput {
    /// `b_0, b_1, …`; the bookkeeping depth is `b.len() - 1`.
    pub b: Vec<f64>,
    pub family: Family,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InputReport {
    /// `M_r = sup_{x,k} |f_k^{(r)}|` over the checked models.
    pub m_bounds: Vec<f64>,
    /// Models whose `f_k''` vanishes somewhere besides `u = 0`.
    pub degenerate: Vec<usize>,
}

const MODEL_CHECK_DEPTH: usize = 30;

impl BomanInput {
    pub fn validate(&self) -> Result<InputReport> {
        if self.b.len() < 5 {
            return Err(Error::Validation("need at least b_0..b_4".into()));
        }
        for (k, w) in self.b.windows(2).enumerate() {
            if !(w[0] > 0.0 && w[1] > 0.0) {
                return Err(Error::Validation(format!("b_{k} must be positive")));
            }
            // 2^{k+1} b_{k+1} < 2^k b_k
            if !(2.0 * w[1] < w[0]) {
                return Err(Error::Validation(format!("2^k b_k not decreasing at k = {}", k + 1)));
            }
        }
        let mut m_bounds = vec![0.0f64; DEFAULT_MAX_ORDER + 1];
        let mut degenerate = Vec::new();
        for k in 0..self.b.len().min(MODEL_CHECK_DEPTH) {
            let fk = self.family.as_fn(k);
            let at0 = fk.jet(0.0, 1);
            if at0.value() != 0.0 || at0.coeff(1) != 0.0 {
                return Err(Error::Validation(format!("f_{k}(0) or f_{k}'(0) nonzero")));
            }
            for u in fk.domain().linspace(65) {
                let j = fk.jet(u, DEFAULT_MAX_ORDER);
                for (r, m) in m_bounds.iter_mut().enumerate() {
                    *m = m.max(libm::fabs(j.derivative(r)));
                }
                let d2 = j.derivative(2);
                if d2 < 0.0 {
                    return Err(Error::Validation(format!("f_{k}'' < 0 at {u}")));
                }
                if d2 == 0.0 && u != 0.0 && !degenerate.contains(&k) {
                    degenerate.push(k);
                }
            }
        }
        Ok(InputReport { m_bounds, degenerate })
    }
}

/// `f''` as a closed-form series over `k ∈ [k_lo, k_hi]`.
struct SeriesSecond {
    psi: BumpSystem,
    family: Family,
    b: Vec<f64>,
    alpha: Vec<f64>,
    k_lo: usize,
    k_hi: usize,
}

impl SeriesSecond {
    fn term_range(&self, x: f64) -> core::ops::RangeInclusive<usize> {
        let kc = libm::floor(-libm::log2(x) / 2.0);
        let lo = (kc - 1.0).max(self.k_lo as f64) as usize;
        let hi = (kc + 2.0).min(self.k_hi as f64).max(0.0) as usize;
        lo..=hi
    }

    fn jet_terms(&self, x: f64, order: usize, ks: core::ops::RangeInclusive<usize>) -> Jet {
        let mut acc = Jet::constant(0.0, order);
        if !(x > 0.0) {
            return acc;
        }
        let xj = Jet::var(x, order);
        for k in ks {
            if k < self.k_lo || k > self.k_hi {
                continue;
            }
            let tk = t(k);
            if x > 2.0 / 3.0 * tk && x < 1.5 * tk {
                let s = self.family.second(k, x - tk, order);
                acc = acc + s * self.psi.jet(xj * (1.0 / tk)) * self.b[k];
            }
            if x > 4.0 / 3.0 * tk && x < 3.0 * tk {
                acc = acc + self.psi.jet(xj * (0.5 / tk)) * self.alpha[k];
            }
        }
        acc
    }
}

impl Profile for SeriesSecond {
    fn taylor(&self, x: f64, order: usize) -> Jet {
        if !(x > 0.0) {
            return Jet::constant(0.0, order);
        }
        self.jet_terms(x, order, self.term_range(x))
    }
}

#[derive(Clone)]
pub struct BomanOutput {
    pub f: SmoothFn,
    /// Least index with `α_k > 0` for every bookkept `k ≥ K`.
    pub k0: usize,
    /// Last index for which claims are checked.
    pub k_max: usize,
    /// Last index actually summed.
    pub k_trunc: usize,
    pub b: Vec<f64>,
    /// `α_k`, `A_k`, `B_k`, `D_k` indexed by `k` (entry `0` unused).
    pub alpha: Vec<f64>,
    pub a_int: Vec<f64>,
    pub b_int: Vec<f64>,
    pub d_int: Vec<f64>,
    pub psi: BumpSystem,
    pub family: Family,
    /// `(k, f'(t_k) - b_k)` for `K ≤ k ≤ k_max`.
    pub slope_residuals: Vec<(usize, f64)>,
    second: Arc<SeriesSecond>,
}

impl core::fmt::Debug for BomanOutput {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("BomanOutput")
            .field("k0", &self.k0)
            .field("k_max", &self.k_max)
            .field("k_trunc", &self.k_trunc)
            .field("family", &self.family)
            .finish()
    }
}

fn coefficient_integrals(psi: &BumpSystem, family: &Family, k: usize) -> (f64, f64, f64) {
    let (tk, tp) = (t(k), t(k - 1));
    let n = COEFF_QUADRATURE;
    let a = simpson(|x| psi.eval(x / tk) * family.second(k, x - tk, 0).value(), tk, 1.5 * tk, n);
    let b = simpson(|x| psi.eval(x / tp) * family.second(k - 1, x - tp, 0).value(), 8.0 / 3.0 * tk, 4.0 * tk, n);
    let d = simpson(|x| psi.eval(0.5 * x / tk), 4.0 / 3.0 * tk, 3.0 * tk, n);
    (a, b, d)
}

/// Geometric node set on `[0, 3t_K]`: `per_segment` points on each `[t_{k+1}, t_k]`.
fn segmented_nodes(k0: usize, k_trunc: usize, per_segment: usize) -> Vec<f64> {
    let mut nodes = vec![0.0];
    let mut edges: Vec<f64> = (k0 + 1..=k_trunc + 1).rev().map(t).collect();
    edges.push(t(k0));
    edges.push(3.0 * t(k0));
    for w in edges.windows(2) {
        let h = (w[1] - w[0]) / per_segment as f64;
        for i in 0..per_segment {
            nodes.push(w[0] + h * i as f64);
        }
    }
    nodes.push(3.0 * t(k0));
    nodes
}

pub fn build_boman(input: &BomanInput, k_max: usize) -> Result<BomanOutput> {
    build_boman_with(input, k_max, GRID_PER_SEGMENT)
}

pub fn build_boman_with(input: &BomanInput, k_max: usize, per_segment: usize) -> Result<BomanOutput> {
    input.validate()?;
    let psi = make_bump_system();
    let depth = input.b.len() - 1;
    let b = &input.b;
    let mut alpha = vec![f64::NAN; depth + 1];
    let mut a_int = vec![f64::NAN; depth + 1];
    let mut b_int = vec![f64::NAN; depth + 1];
    let mut d_int = vec![f64::NAN; depth + 1];
    for k in 1..=depth {
        let (a, bb, d) = coefficient_integrals(&psi, &input.family, k);
        a_int[k] = a;
        b_int[k] = bb;
        d_int[k] = d;
        alpha[k] = (b[k - 1] * (1.0 - bb) - b[k] * (1.0 + a)) / d;
    }
    let mut k0 = depth + 1;
    while k0 > 1 && alpha[k0 - 1] > 0.0 {
        k0 -= 1;
    }
    if k0 > depth {
        return Err(Error::ConstructionFailed(format!("α_{depth} ≤ 0: no admissible K")));
    }
    if k_max < k0 + 3 || k_max > depth {
        return Err(Error::Argument(format!("k_max = {k_max} outside [K + 3, {depth}] with K = {k0}")));
    }
    let mut k_trunc = k_max;
    while k_trunc < depth && b[k_trunc] >= TRUNCATION * b[k0] {
        k_trunc += 1;
    }
    let second = Arc::new(SeriesSecond {
        psi,
        family: input.family.clone(),
        b: b.clone(),
        alpha: alpha.clone(),
        k_lo: k0,
        k_hi: k_trunc,
    });
    let nodes = segmented_nodes(k0, k_trunc, per_segment.max(2));
    let grid = GridIntegrated::build(second.clone(), nodes, 0.0, 0.0)?;
    let f = SmoothFn::from_grid(grid, DEFAULT_MAX_ORDER);
    let slope_residuals = (k0..=k_max).map(|k| (k, f.jet(t(k), 1).coeff(1) - b[k])).collect();
    Ok(BomanOutput {
        f,
        k0,
        k_max,
        k_trunc,
        b: b.clone(),
        alpha,
        a_int,
        b_int,
        d_int,
        psi,
        family: input.family.clone(),
        slope_residuals,
        second,
    })
}

impl BomanOutput {
    pub fn domain(&self) -> Interval {
        self.f.domain()
    }

    pub fn max_slope_residual(&self) -> f64 {
        self.slope_residuals.iter().fold(0.0, |m, (_, r)| m.max(libm::fabs(*r)))
    }

    /// `max |f''(x) - b_k f_k''(x - t_k)|` over `[3t_k/4, 5t_k/4]`.
    pub fn patch_residual(&self, k: usize, n: usize) -> f64 {
        let tk = t(k);
        Interval { lo: 0.75 * tk, hi: 1.25 * tk }
            .linspace(n)
            .iter()
            .map(|&x| {
                let lhs = self.f.jet(x, 2).derivative(2);
                let rhs = self.b[k] * self.family.second(k, x - tk, 0).value();
                libm::fabs(lhs - rhs) / (1.0 + libm::fabs(rhs))
            })
            .fold(0.0, f64::max)
    }

    /// The `f''` series as a pliable decomposition at `0`: term `k` is
    /// `(b_k f_k''(· - t_k) Ψ_{2k} + α_k Ψ_{2k-1}) / c_k` with `c_k = b_k + α_k`.
    /// Terms past `materialize` carry coefficients and supports only.
    pub fn pliable_series(&self, materialize: usize) -> PliableSeries {
        let depth = self.b.len() - 1;
        let mut ps = PliableSeries {
            base: 0.0,
            domain: self.domain(),
            finite: false,
            index: Vec::new(),
            c: Vec::new(),
            supports: Vec::new(),
            terms: Vec::new(),
        };
        for k in self.k0..=depth {
            let c = self.b[k] + self.alpha[k];
            let tk = t(k);
            ps.index.push(k as i64);
            ps.c.push(c);
            ps.supports.push(Interval { lo: 2.0 / 3.0 * tk, hi: 3.0 * tk });
            ps.terms.push(if k <= materialize.min(self.k_trunc) {
                let s = self.second.clone();
                let dom = Interval { lo: 2.0 / 3.0 * tk, hi: 3.0 * tk };
                Some(SmoothFn::closed_form(dom, DEFAULT_MAX_ORDER, move |x| {
                    s.jet_terms(x.value(), x.order(), k..=k) * (1.0 / c)
                }))
            } else {
                None
            });
        }
        ps
    }
}

/// `Σ c_k g_k` with support metadata, pliable at `base` when (i)–(iii) hold.
#[derive(Clone, Debug)]
pub struct PliableSeries {
    pub base: f64,
    pub domain: Interval,
    /// The family is finite: coefficient decay holds vacuously.
    pub finite: bool,
    pub index: Vec<i64>,
    pub c: Vec<f64>,
    pub supports: Vec<Interval>,
    /// `g_k` where materialized; the `C^r` growth check uses these.
    pub terms: Vec<Option<SmoothFn>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayCheck {
    pub gamma: f64,
    /// First index from which `2^{kγ} c_k` is strictly decreasing to the end.
    pub onset: Option<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthCheck {
    pub r: usize,
    /// `log2 ‖g_k‖_r` per materialized term.
    pub log2_norms: Vec<(i64, f64)>,
    /// Largest one-step increment of `log2 ‖g_k‖_r` in the early and late halves.
    pub early_rate: f64,
    pub late_rate: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PliableReport {
    pub decay: Vec<DecayCheck>,
    pub growth: Vec<GrowthCheck>,
    /// Least `L` that works for every tested `ε`.
    pub l: Option<u32>,
    /// `(ε, |J_ε|)` for the tested `ε`.
    pub j_eps: Vec<(f64, usize)>,
    pub violations: Vec<String>,
}

impl PliableReport {
    pub fn pliable(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const DECAY_GAMMAS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];
/// A decay onset must leave at least this many terms after it.
pub const MIN_TAIL: usize = 4;

pub fn check_pliable(ps: &PliableSeries, r_max: usize, eps_grid: &[f64], gammas: &[f64]) -> PliableReport {
    let mut violations = Vec::new();
    let n = ps.c.len();
    if ps.c.iter().any(|&c| !(c > 0.0)) {
        violations.push("coefficients must be positive".into());
    }
    let mut decay = Vec::new();
    for &g in gammas {
        let onset = if ps.finite {
            ps.index.first().copied()
        } else {
            let v: Vec<f64> = ps.c.iter().zip(&ps.index).map(|(c, &k)| libm::log2(*c) + g * k as f64).collect();
            let mut start = n.saturating_sub(1);
            while start > 0 && v[start - 1] > v[start] {
                start -= 1;
            }
            if n - start > MIN_TAIL {
                Some(ps.index[start])
            } else {
                None
            }
        };
        if onset.is_none() {
            violations.push(format!("(i): 2^(kγ) c_k not eventually decreasing for γ = {g}"));
        }
        decay.push(DecayCheck { gamma: g, onset });
    }
    let mut growth = Vec::new();
    for r in 0..=r_max {
        let mut log2_norms = Vec::new();
        for (k, term) in ps.index.iter().zip(&ps.terms) {
            if let Some(g) = term {
                if r > g.max_order() {
                    continue;
                }
                let mut m = vec![0.0f64; r + 1];
                for x in g.domain().linspace(1025) {
                    let j = g.jet(x, r);
                    for (i, mi) in m.iter_mut().enumerate() {
                        *mi = mi.max(libm::fabs(j.derivative(i)));
                    }
                }
                log2_norms.push((*k, libm::log2(m.iter().sum::<f64>())));
            }
        }
        let steps: Vec<f64> = log2_norms.windows(2).map(|w| w[1].1 - w[0].1).collect();
        let half = steps.len() / 2;
        let early_rate = steps[..half].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let late_rate = steps[half..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ok = steps.len() < 2 || late_rate <= early_rate.max(0.0) + 1.0;
        if !ok {
            violations.push(format!("(ii): C^{r} norms accelerate ({early_rate:.2} → {late_rate:.2} per step)"));
        }
        growth.push(GrowthCheck { r, log2_norms, early_rate, late_rate, ok });
    }
    let deepest = ps.supports.iter().map(|s| dist_lo(s, ps.base)).fold(f64::INFINITY, f64::min);
    let mut l_need: u32 = 1;
    let mut j_eps = Vec::new();
    let mut feasible = true;
    for &eps in eps_grid {
        if !(eps > 0.0 && 2.0 * eps < ps.domain.len()) || 2.0 * eps < deepest {
            continue;
        }
        let mut count = 0usize;
        for (s, &k) in ps.supports.iter().zip(&ps.index) {
            let (dlo, dhi) = (dist_lo(s, ps.base), dist_hi(s, ps.base));
            if dlo <= 2.0 * eps && dhi >= eps {
                count += 1;
                if k <= 0 {
                    feasible = false;
                    violations.push(format!("(iii): index {k} ≤ 0 meets ε = {eps}"));
                } else {
                    let need = libm::ceil(libm::log2(1.0 / eps) / k as f64).max(1.0) as u32;
                    l_need = l_need.max(need);
                }
            }
        }
        l_need = l_need.max(count as u32);
        j_eps.push((eps, count));
    }
    PliableReport { decay, growth, l: feasible.then_some(l_need), j_eps, violations }
}

fn dist_lo(s: &Interval, c: f64) -> f64 {
    if s.contains(c) {
        0.0
    } else {
        libm::fabs(s.lo - c).min(libm::fabs(s.hi - c))
    }
}

fn dist_hi(s: &Interval, c: f64) -> f64 {
    libm::fabs(s.lo - c).max(libm::fabs(s.hi - c))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailReport {
    pub r: usize,
    pub from: i64,
    pub to: i64,
    /// `‖S_to - S_from‖_r` measured on the supports of the dropped terms.
    pub norm: f64,
}

/// `‖Σ_{from < k ≤ to} c_k g_k‖_r`; all terms in range must be materialized.
pub fn partial_sum_convergence(ps: &PliableSeries, r: usize, from: i64, to: i64) -> Result<TailReport> {
    let picked: Vec<(f64, &SmoothFn)> = ps
        .index
        .iter()
        .zip(&ps.c)
        .zip(&ps.terms)
        .filter(|((k, _), _)| **k > from && **k <= to)
        .map(|((k, c), g)| {
            g.as_ref().map(|g| (*c, g)).ok_or_else(|| Error::Argument(format!("term {k} not materialized")))
        })
        .collect::<Result<_>>()?;
    let mut per = vec![0.0f64; r + 1];
    for (_, g) in &picked {
        for x in g.domain().linspace(1025) {
            let mut acc = Jet::constant(0.0, r);
            for (c, h) in &picked {
                if h.domain().contains(x) {
                    acc = acc + h.jet(x, r) * *c;
                }
            }
            for (i, m) in per.iter_mut().enumerate() {
                *m = m.max(libm::fabs(acc.derivative(i)));
            }
        }
    }
    Ok(TailReport { r, from, to, norm: per.iter().sum() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_system_shape() {
        let s = make_bump_system();
        assert_eq!(s.eval(1.0), 1.0);
        assert_eq!(s.eval(0.8), 1.0);
        assert_eq!(s.eval(2.0), 0.0);
        assert_eq!(s.eval(0.5), 0.0);
        assert!(s.eval(0.7) > 0.0 && s.eval(1.45) > 0.0);
        for x in [0.7, 1.0, 1.4, 3.3e-5, 17.0] {
            assert!(s.partition_residual(x).abs() < 1e-12);
        }
        assert!(s.certificate < 1e-12);
    }

    #[test]
    fn dyadic_supports_are_disjoint() {
        // supp Ψ_{2k} = [2/3, 3/2]·t_k and supp Ψ_{2k-1} = [4/3, 3]·t_k
        for k in 1..40 {
            assert!(1.5 * t(k + 1) < 2.0 / 3.0 * t(k));
            assert!(3.0 * t(k + 1) < 4.0 / 3.0 * t(k));
        }
    }

    #[test]
    fn schedule_hypotheses() {
        let s = Schedule::default();
        assert!(s.validate_hypothesis(1..=7).is_ok());
        assert!(s.quadratic_input().validate().is_ok());
        let r = s.quartic_input().validate().unwrap();
        assert!(r.degenerate.is_empty());
        let bad = Schedule { q: 2.0, ..s };
        assert!(bad.validate_hypothesis(1..=7).is_err());
    }

    #[test]
    fn coefficient_integrals_match_closed_forms() {
        let s = Schedule::default();
        let psi = make_bump_system();
        let fam = s.quadratic_input().family;
        for k in [1, 3, 9] {
            let (a, b, d) = coefficient_integrals(&psi, &fam, k);
            assert!((d / (2.0 * t(k) * psi.integral) - 1.0).abs() < 1e-12);
            let ak = s.a(k);
            let core = simpson(|u| psi.eval(u), 1.0, 1.5, COEFF_QUADRATURE);
            assert!((a / (ak * ak * t(k) * core) - 1.0).abs() < 1e-12);
            assert!(b > 0.0);
        }
    }

    #[test]
    fn small_boman_build() {
        let s = Schedule { depth: 40, ..Schedule::default() };
        let out = build_boman_with(&s.quadratic_input(), 7, 1 << 11).unwrap();
        assert_eq!(out.k0, 1);
        assert!(out.max_slope_residual() < 1e-8, "{:?}", out.slope_residuals);
        for k in out.k0..=out.k_max {
            assert!(out.alpha[k] > 0.0);
            assert!(out.patch_residual(k, 33) < 1e-12);
        }
        let f = &out.f;
        let j0 = f.jet(0.0, 4);
        for r in 0..=4 {
            assert_eq!(j0.derivative(r), 0.0);
        }
        for x in [1e-6, 0.01, 0.3, 0.74] {
            let j = f.jet(x, 2);
            assert!(j.derivative(1) > 0.0 && j.derivative(2) > 0.0, "x = {x}");
        }
    }

    #[test]
    fn geometric_coefficients_fail_decay() {
        let n = 30;
        let ps = PliableSeries {
            base: 0.0,
            domain: Interval { lo: 0.0, hi: 1.0 },
            finite: false,
            index: (1..=n).collect(),
            c: (1..=n).map(|k| libm::exp2(-(k as f64))).collect(),
            supports: (1..=n).map(|k| Interval { lo: 0.5 * t(k as usize), hi: t(k as usize) }).collect(),
            terms: vec![None; n as usize],
        };
        let rep = check_pliable(&ps, 0, &[0.1], &DECAY_GAMMAS);
        assert!(rep.decay[0].onset.is_none());
        assert!(rep.decay[1].onset.is_none());
        assert!(!rep.pliable());
    }

    #[test]
    fn single_far_bump_is_pliable() {
        let bump = Bump::new(0.5, 0.55, 0.65, 0.7);
        let g = SmoothFn::closed_form(Interval { lo: 0.5, hi: 0.7 }, 4, move |x| bump.jet(x));
        let ps = PliableSeries {
            base: 0.0,
            domain: Interval { lo: 0.0, hi: 1.0 },
            finite: true,
            index: vec![1],
            c: vec![1.0],
            supports: vec![Interval { lo: 0.5, hi: 0.7 }],
            terms: vec![Some(g)],
        };
        let eps: Vec<f64> = (1..50).map(|i| i as f64 * 0.01).collect();
        let rep = check_pliable(&ps, 2, &eps, &DECAY_GAMMAS);
        assert!(rep.pliable(), "{:?}", rep.violations);
        assert_eq!(rep.l, Some(2));
    }
}
