//! Convex smoothing of a hinge.
//!
//! The hinge `V` has apex `0` and endpoints `(∓d, d tan γ)`. Its smoothing `F`
//! on `[-d, d]` is defined by
//! `F'' = f_u''·Φ_u + f_v''·Φ_v + b_ε·Φ_0`, where `f_u`, `f_v` are copies of a
//! flat convex profile tangent to the two sides of `V`, and `b_ε` is fixed by
//! requiring `F'(d) = f_v'(d)`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::f64::consts::{FRAC_PI_3, PI};

use crate::bump::Bump;
use crate::error::{Error, Result};
use crate::func::{cr_norm, GridIntegrated, Interval, Profile, SmoothFn};
use crate::jet::Jet;
use crate::quad::simpson;
use crate::rotate::rotate_graph;

/// Grid points per half of the integrated middle zone.
pub const MIDDLE_GRID: usize = 1 << 14;
/// Uniform samples per analytic end zone in the positivity checks.
pub const END_SAMPLES: usize = 256;
pub const MAX_HALVINGS: usize = 40;
pub const ENDPOINT_TOL: f64 = 1e-10;
pub const SLOPE_TOL: f64 = 1e-12;
/// Allowed mismatch of `F'` against `f_v'` where the integrated zone hands over.
pub const JOIN_TOL: f64 = 1e-9;

const PHI: Bump = Bump::symmetric_unit();

/// Two segments of lengths `l`, `r` meeting at `apex` with interior angle
/// `alpha`. `frame` is the direction of the bisector, pointing into the
/// opening.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hinge {
    pub l: f64,
    pub r: f64,
    pub alpha: f64,
    pub apex: (f64, f64),
    pub frame: f64,
}

impl Hinge {
    pub fn new(l: f64, r: f64, alpha: f64, apex: (f64, f64), frame: f64) -> Result<Self> {
        if !(l > 0.0 && r > 0.0) {
            return Err(Error::Argument(format!("hinge sides must be positive, got {l}, {r}")));
        }
        if !(alpha > 0.0 && alpha < PI) {
            return Err(Error::Argument(format!("hinge angle {alpha} not in (0, π)")));
        }
        Ok(Hinge { l, r, alpha, apex, frame })
    }

    /// Apex at the origin, endpoints `(∓d, d tan γ)`.
    pub fn symmetric(d: f64, gamma: f64) -> Result<Self> {
        let s = d / libm::cos(gamma);
        Hinge::new(s, s, PI - 2.0 * gamma, (0.0, 0.0), 0.5 * PI)
    }

    /// `(left, right)` endpoints.
    pub fn endpoints(&self) -> ((f64, f64), (f64, f64)) {
        let (a, b) = (self.frame + 0.5 * self.alpha, self.frame - 0.5 * self.alpha);
        let (x, y) = self.apex;
        ((x + self.l * libm::cos(a), y + self.l * libm::sin(a)), (x + self.r * libm::cos(b), y + self.r * libm::sin(b)))
    }

    /// Turning angle `π - α`.
    pub fn turn(&self) -> f64 {
        PI - self.alpha
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub name: &'static str,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Certificate {
    fn at_most(name: &'static str, measured: f64, bound: f64) -> Self {
        Certificate { name, measured, bound, pass: measured <= bound }
    }

    fn below(name: &'static str, measured: f64, bound: f64) -> Self {
        Certificate { name, measured, bound, pass: measured < bound }
    }

    fn positive(name: &'static str, measured: f64) -> Self {
        Certificate { name, measured, bound: 0.0, pass: measured > 0.0 }
    }
}

fn check_angle(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < FRAC_PI_3) {
        return Err(Error::Argument(format!("hinge angle γ = {gamma} not in (0, π/3)")));
    }
    Ok(())
}

fn slope(f: &SmoothFn, x: f64) -> f64 {
    f.jet(x, 1).coeff(1)
}

fn second(f: &SmoothFn, x: f64) -> f64 {
    f.jet(x, 2).derivative(2)
}

fn second_jet(f: &SmoothFn, x: f64, order: usize) -> Jet {
    f.jet(x, order + 2).differentiate().differentiate()
}

/// Profiles tangent to the sides of the hinge: `f_u` is the graph of `f`
/// moved left by `d / cos γ` and turned clockwise by `γ`; `f_v(t) = f_u(-t)`.
/// Both are returned on `[-d, d]`.
pub fn place_profiles(f: &SmoothFn, d: f64, gamma: f64) -> Result<(SmoothFn, SmoothFn)> {
    check_angle(gamma)?;
    let dom = f.domain();
    if dom.lo != 0.0 {
        return Err(Error::Argument("profile must be given on [0, τ]".into()));
    }
    if !(d > 0.0 && 4.0 * d < dom.hi) {
        return Err(Error::Argument(format!("need 0 < 4d < τ, got d = {d}, τ = {}", dom.hi)));
    }
    let moved = f.translated(d / libm::cos(gamma));
    let fu = rotate_graph(&moved, -gamma)?.f_phi;
    if fu.domain().hi < d {
        return Err(Error::Argument(format!("rotated profile ends before d = {d}")));
    }
    let fu = fu.with_domain(Interval { lo: -d, hi: d });
    let fv = fu.reflected();
    Ok((fu, fv))
}

fn epsilon_for(f: &SmoothFn, fu: &SmoothFn, fv: &SmoothFn, d: f64, gamma: f64) -> Result<f64> {
    let tg = libm::tan(gamma);
    let dom = f.domain();
    if !(slope(f, dom.hi) > tg) {
        return Err(Error::GammaTooLarge { gamma });
    }
    let (mut lo, mut hi) = (dom.lo, dom.hi);
    while hi - lo > 0.0 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(f, mid) < tg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = if libm::fabs(slope(f, lo) - tg) <= libm::fabs(slope(f, hi) - tg) { lo } else { hi };
    let eps = 0.25 * (x - dom.lo);
    if !(eps > 0.0 && 4.0 * eps < d) {
        return Err(Error::GammaNotSmall { gamma });
    }
    if !(slope(fu, 2.0 * eps - d) < 0.0 && slope(fv, d - 2.0 * eps) > 0.0) {
        return Err(Error::GammaNotSmall { gamma });
    }
    Ok(eps)
}

/// `ε` with `f'(4ε) = tan γ`, checked against `4ε < d` and
/// `f_u'(2ε - d) < 0 < f_v'(d - 2ε)`.
pub fn solve_epsilon(f: &SmoothFn, d: f64, gamma: f64) -> Result<f64> {
    let (fu, fv) = place_profiles(f, d, gamma)?;
    epsilon_for(f, &fu, &fv, d, gamma)
}

/// The three integrals of the slope balance and the constant they determine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BSolve {
    pub b: f64,
    /// `∫ f_u'' Φ_u`.
    pub i_u: f64,
    /// `∫ f_v'' Φ_v`.
    pub i_v: f64,
    /// `∫ Φ_0`.
    pub i_0: f64,
    /// `|F'(-d) + i_u + i_v + b·i_0 - f_v'(d)|`.
    pub residual: f64,
}

/// `b_ε` from `f_v'(d) = f_u'(-d) + ∫ f_u''Φ_u + ∫ f_v''Φ_v + b_ε ∫ Φ_0`.
pub fn solve_b_eps(fu: &SmoothFn, fv: &SmoothFn, eps: f64, d: f64) -> Result<BSolve> {
    if !(eps > 0.0 && 2.0 * eps < d) {
        return Err(Error::Argument(format!("need 0 < 2ε < d, got ε = {eps}, d = {d}")));
    }
    let n = MIDDLE_GRID;
    let h = 0.5 / eps;
    // Φ_u = 1 on [-d, -d + ε], so that part integrates exactly
    let i_u = slope(fu, -d + eps) - slope(fu, -d)
        + simpson(|x| second(fu, x) * PHI.eval((d + x) * h), -d + eps, -d + 2.0 * eps, n);
    let i_v = slope(fv, d) - slope(fv, d - eps)
        + simpson(|x| second(fv, x) * PHI.eval((d - x) * h), d - 2.0 * eps, d - eps, n);
    let i_0 = 2.0 * (d - 2.0 * eps) + 2.0 * simpson(|x| PHI.eval(eps / (d - x)), d - 2.0 * eps, d - eps, n);
    if !(i_0 > 0.0) {
        return Err(Error::Inconsistent(format!("∫Φ_0 = {i_0} is not positive")));
    }
    let (s_lo, s_hi) = (slope(fu, -d), slope(fv, d));
    let b = (s_hi - s_lo - i_u - i_v) / i_0;
    if !(b > 0.0) {
        return Err(Error::Inconsistent(format!("b_ε = {b} is not positive")));
    }
    let tg = 0.5 * (s_hi - s_lo);
    if !(b < 2.0 * tg / d) {
        return Err(Error::Inconsistent(format!("b_ε = {b} exceeds 2 tan γ / d = {}", 2.0 * tg / d)));
    }
    let residual = libm::fabs(s_lo + i_u + i_v + b * i_0 - s_hi);
    Ok(BSolve { b, i_u, i_v, i_0, residual })
}

/// The three bumps at `x`: `(Φ_u, Φ_v, Φ_0)`.
pub fn bumps(d: f64, eps: f64, x: f64) -> (f64, f64, f64) {
    let h = 0.5 / eps;
    let p0 = if libm::fabs(x) < d - eps { PHI.eval(eps / (d - libm::fabs(x))) } else { 0.0 };
    (PHI.eval((d + x) * h), PHI.eval((d - x) * h), p0)
}

struct Second {
    fu: SmoothFn,
    fv: SmoothFn,
    d: f64,
    eps: f64,
    b: f64,
}

impl Profile for Second {
    fn taylor(&self, x: f64, order: usize) -> Jet {
        let (d, e) = (self.d, self.eps);
        let xj = Jet::var(x, order);
        let mut acc = Jet::constant(0.0, order);
        if x < -d + 2.0 * e {
            acc = acc + second_jet(&self.fu, x, order) * PHI.jet((xj + d) * (0.5 / e));
        }
        if x > d - 2.0 * e {
            acc = acc + second_jet(&self.fv, x, order) * PHI.jet((-xj + d) * (0.5 / e));
        }
        if libm::fabs(x) < d - e {
            let gap = if x >= 0.0 { -xj + d } else { xj + d };
            acc = acc + PHI.jet(gap.recip() * e) * self.b;
        }
        acc
    }
}

/// `f_u` on `[-d, x_l]`, the integrated middle, `f_v + c` on `[x_r, d]`.
struct Piecewise {
    left: SmoothFn,
    middle: SmoothFn,
    right: SmoothFn,
    x_l: f64,
    x_r: f64,
}

impl Profile for Piecewise {
    fn taylor(&self, x: f64, order: usize) -> Jet {
        if x <= self.x_l {
            self.left.jet(x, order)
        } else if x >= self.x_r {
            self.right.jet(x, order)
        } else {
            self.middle.jet(x, order)
        }
    }
}

/// Nodes on `[x_l, x_r]` spaced geometrically in the distance to the nearer
/// end of `[-d, d]`, `MIDDLE_GRID` per half.
fn middle_nodes(d: f64, x_l: f64) -> Vec<f64> {
    let n = MIDDLE_GRID;
    let r0 = d + x_l;
    let q = libm::log(d / r0);
    let mut left: Vec<f64> = (0..=n).map(|i| -d + r0 * libm::exp(q * i as f64 / n as f64)).collect();
    left[0] = x_l;
    left[n] = 0.0;
    let mut nodes = left.clone();
    nodes.extend(left[..n].iter().rev().map(|x| -x));
    nodes
}

#[derive(Clone, Debug)]
pub struct SmoothingResult {
    pub f: SmoothFn,
    pub d: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub b_eps: f64,
    pub integrals: BSolve,
    pub f_u: SmoothFn,
    pub f_v: SmoothFn,
    /// Grid-integrated part of `F` on `[x_l, x_r]`.
    pub middle: SmoothFn,
    pub x_l: f64,
    pub x_r: f64,
    /// `F - f_v` on `[x_r, d]`.
    pub right_offset: f64,
    pub hinge_in: Hinge,
    /// Hinge cut out by the tangent lines of `F` at `±d`.
    pub hinge_out: Hinge,
    pub certificates: Vec<Certificate>,
}

impl SmoothingResult {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Certificate> {
        self.certificates.iter().filter(|c| !c.pass).collect()
    }

    pub fn certificate(&self, name: &str) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.name == name)
    }

    /// `F''` at `x`.
    pub fn second(&self, x: f64) -> f64 {
        second(&self.f, x)
    }
}

/// Builds `F` and evaluates every certificate without rejecting failures.
pub fn smoothing_report(f: &SmoothFn, d: f64, gamma: f64) -> Result<SmoothingResult> {
    if f.max_order() < 2 {
        return Err(Error::Capability { requested: 2, max_order: f.max_order() });
    }
    let (fu, fv) = place_profiles(f, d, gamma)?;
    let eps = epsilon_for(f, &fu, &fv, d, gamma)?;
    let bs = solve_b_eps(&fu, &fv, eps, d)?;
    let tg = libm::tan(gamma);
    let order = f.max_order();

    let sec = Arc::new(Second { fu: fu.clone(), fv: fv.clone(), d, eps, b: bs.b });
    let (x_l, x_r) = (-d + 0.5 * eps, d - 0.5 * eps);
    let nodes = middle_nodes(d, x_l);
    let grid = GridIntegrated::build(sec.clone(), nodes, fu.value(x_l), slope(&fu, x_l))?;
    let middle = SmoothFn::from_grid(grid, order);
    let g = middle.grid().unwrap();
    let (nodes, vals, d1, d2) = (g.nodes(), g.value_samples(), g.first_samples(), g.second_samples());
    let last = nodes.len() - 1;
    let right_offset = vals[last] - fv.value(x_r);
    let right = fv.offset(right_offset);
    let domain = Interval { lo: -d, hi: d };
    let big_f = SmoothFn::from_profile(
        domain,
        order,
        Arc::new(Piecewise { left: fu.clone(), middle: middle.clone(), right: right.clone(), x_l, x_r }),
    );

    let ends: Vec<f64> = (1..=END_SAMPLES)
        .flat_map(|i| {
            let s = 0.5 * eps * i as f64 / END_SAMPLES as f64;
            [-d + s, d - s]
        })
        .collect();
    let min_inner =
        ends.iter().map(|&x| sec.taylor(x, 0).value()).chain(d2.iter().copied()).fold(f64::INFINITY, f64::min);
    let min_bumps = ends
        .iter()
        .chain(nodes.iter())
        .map(|&x| {
            let (a, b, c) = bumps(d, eps, x);
            a + b + c
        })
        .fold(f64::INFINITY, f64::min);
    let mut left_match: f64 = 0.0;
    let mut right_const: f64 = 0.0;
    for i in 0..=last {
        let x = nodes[i];
        if x <= -d + eps {
            left_match = left_match.max(libm::fabs(vals[i] - fu.value(x)));
        }
        if x >= d - eps {
            right_const = right_const.max(libm::fabs(vals[i] - fv.value(x) - right_offset));
        }
    }
    let (s_lo, s_hi) = (slope(&fu, -d), slope(&right, d));
    let max_slope = d1.iter().fold(libm::fabs(s_lo).max(libm::fabs(s_hi)), |m, v| m.max(libm::fabs(*v)));

    // tangent lines at ±d
    let (y_lo, y_hi) = (fu.value(-d), right.value(d));
    let px = (y_lo - y_hi) / (2.0 * tg);
    let py = y_hi + tg * (px - d);
    let l = libm::hypot(px + d, py - y_lo);
    let r = libm::hypot(d - px, y_hi - py);
    let hinge_out = Hinge::new(l, r, PI - 2.0 * gamma, (px, py), 0.5 * PI)?;
    let hinge_in = Hinge::symmetric(d, gamma)?;

    let certificates = vec![
        Certificate::at_most("f'(4eps) = tan gamma", libm::fabs(slope(f, 4.0 * eps) - tg), SLOPE_TOL),
        Certificate::below("4 eps < d", 4.0 * eps, d),
        Certificate::at_most("F''(-d) = 0", libm::fabs(sec.taylor(-d, 0).value()), 0.0),
        Certificate::at_most("F''(d) = 0", libm::fabs(sec.taylor(d, 0).value()), 0.0),
        Certificate::positive("F'' > 0 inside", min_inner),
        Certificate::positive("bumps have no common zero", min_bumps),
        Certificate::at_most("F'(-d) = -tan gamma", libm::fabs(s_lo + tg), SLOPE_TOL),
        Certificate::at_most("F'(d) = tan gamma", libm::fabs(s_hi - tg), SLOPE_TOL),
        Certificate::at_most("slope balance residual", bs.residual, SLOPE_TOL),
        Certificate::at_most("slope join", libm::fabs(d1[last] - slope(&fv, x_r)), JOIN_TOL),
        Certificate::at_most("F = f_u near -d", left_match, ENDPOINT_TOL),
        Certificate::at_most("F - f_v constant near d", right_const, ENDPOINT_TOL),
        Certificate::below("int f_u'' Phi_u < -f_u'(-d)", bs.i_u, -s_lo),
        Certificate::below("int f_v'' Phi_v < f_v'(d)", bs.i_v, slope(&fv, d)),
        Certificate::positive("b_eps > 0", bs.b),
        Certificate::at_most("b_eps <= tan gamma / (d - 2 eps)", bs.b, tg / (d - 2.0 * eps)),
        Certificate::below("b_eps < 2 tan gamma / d", bs.b, 2.0 * tg / d),
        Certificate::below("max |F'| < 7 tan gamma", max_slope, 7.0 * tg),
        Certificate::at_most("side sum <= 4d / cos gamma", l + r, 4.0 * d / libm::cos(gamma)),
    ];

    Ok(SmoothingResult {
        f: big_f,
        d,
        gamma,
        epsilon: eps,
        b_eps: bs.b,
        integrals: bs,
        f_u: fu,
        f_v: fv,
        middle,
        x_l,
        x_r,
        right_offset,
        hinge_in,
        hinge_out,
        certificates,
    })
}

/// [`smoothing_report`], failing if any certificate does.
pub fn build_smoothing(f: &SmoothFn, d: f64, gamma: f64) -> Result<SmoothingResult> {
    let res = smoothing_report(f, d, gamma)?;
    if !res.passed() {
        let mut msg = String::from("hinge smoothing certificates failed:");
        for c in res.failures() {
            msg.push_str(&format!(" [{}: {:e} vs {:e}]", c.name, c.measured, c.bound));
        }
        return Err(Error::ConstructionFailed(msg));
    }
    Ok(res)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleConfig {
    pub gamma_start: f64,
    /// Largest `r` whose `C^r` norm is capped.
    pub r_max: usize,
    pub cap_factor: f64,
    pub max_halvings: usize,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { gamma_start: 0.5, r_max: 2, cap_factor: 2.0, max_halvings: MAX_HALVINGS }
    }
}

#[derive(Clone, Debug)]
pub struct HingeSchedule {
    pub d: Vec<f64>,
    /// Angles before rescaling.
    pub raw_gammas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub n: usize,
    pub lambda: f64,
    /// `levels[m][p]`: smoothing of level `m` for profile `p`.
    pub levels: Vec<Vec<SmoothingResult>>,
    /// `caps[p][r]`.
    pub caps: Vec<Vec<f64>>,
    /// `norms[m][p][r]` after rescaling.
    pub norms: Vec<Vec<Vec<f64>>>,
}

impl HingeSchedule {
    /// `Σ 2^{m+1} γ_m`.
    pub fn angle_sum(&self) -> f64 {
        self.gammas.iter().enumerate().map(|(m, g)| libm::ldexp(*g, m as i32 + 1)).sum()
    }

    /// Partial sums of `Σ 2^m (l_m + r_m)` over the smoothed hinges.
    pub fn side_sum_partials(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.levels
            .iter()
            .enumerate()
            .map(|(m, lv)| {
                let h = lv[0].hinge_out;
                acc += libm::ldexp(h.l + h.r, m as i32);
                acc
            })
            .collect()
    }
}

fn norms_of(res: &SmoothingResult, r_max: usize) -> Result<Vec<f64>> {
    let iv = Interval { lo: -res.d, hi: res.d };
    let rep = cr_norm(&res.f, r_max, iv)?;
    let mut acc = 0.0;
    Ok(rep
        .per_order
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect())
}

fn build_level(
    profiles: &[SmoothFn],
    d: f64,
    gamma: f64,
    r_max: usize,
    caps: Option<&[Vec<f64>]>,
) -> Result<(Vec<SmoothingResult>, Vec<Vec<f64>>)> {
    // cheap rejections first
    for f in profiles {
        solve_epsilon(f, d, gamma)?;
    }
    let mut results = Vec::with_capacity(profiles.len());
    let mut norms = Vec::with_capacity(profiles.len());
    for (p, f) in profiles.iter().enumerate() {
        let res = build_smoothing(f, d, gamma)?;
        let nr = norms_of(&res, r_max)?;
        if let Some(caps) = caps {
            if nr.iter().zip(&caps[p]).any(|(v, c)| v > c) {
                return Err(Error::Precondition(format!("C^r cap exceeded at γ = {gamma}")));
            }
        }
        results.push(res);
        norms.push(nr);
    }
    Ok((results, norms))
}

/// Diagonal schedule of smoothings for a shared angle sequence.
///
/// Level `m` smooths a hinge of half-width `d[m]`; its angle is halved from the
/// previous level's until every profile's smoothing certifies and its `C^r`
/// norms (`r ≤ r_max`) stay below `cap_factor` times those of level `0`. The
/// angles are then scaled by `λ ≤ 1` so that `Σ 2^{m+1} γ_m = π/n` for the
/// least admissible `n ≥ 2`, and every level is rebuilt and re-checked.
pub fn schedule_smoothings(profiles: &[SmoothFn], d: &[f64], cfg: &ScheduleConfig) -> Result<HingeSchedule> {
    if profiles.is_empty() || d.is_empty() {
        return Err(Error::Argument("schedule needs at least one profile and one level".into()));
    }
    for f in profiles {
        if f.max_order() < cfg.r_max {
            return Err(Error::Capability { requested: cfg.r_max, max_order: f.max_order() });
        }
        let tau = f.domain().len();
        if let Some(&bad) = d.iter().find(|&&x| !(x > 0.0 && 4.0 * x < tau)) {
            return Err(Error::Argument(format!("level width {bad} violates 0 < 4d < τ = {tau}")));
        }
    }
    let mut caps: Option<Vec<Vec<f64>>> = None;
    let mut raw = Vec::with_capacity(d.len());
    let mut gamma = cfg.gamma_start.min(FRAC_PI_3 * 0.999);
    for (m, &dm) in d.iter().enumerate() {
        let mut found = false;
        for _ in 0..=cfg.max_halvings {
            if let Ok((_, norms)) = build_level(profiles, dm, gamma, cfg.r_max, caps.as_deref()) {
                if caps.is_none() {
                    caps = Some(norms.iter().map(|v| v.iter().map(|x| cfg.cap_factor * x).collect()).collect());
                }
                found = true;
                break;
            }
            gamma *= 0.5;
        }
        if !found {
            return Err(Error::ScheduleFailed { step: m });
        }
        raw.push(gamma);
    }
    let caps = caps.unwrap();
    let s: f64 = raw.iter().enumerate().map(|(m, g)| libm::ldexp(*g, m as i32 + 1)).sum();
    let n = (libm::ceil(PI / s) as usize).max(2);
    let lambda = PI / (n as f64 * s);
    let gammas: Vec<f64> = raw.iter().map(|g| g * lambda).collect();
    let mut levels = Vec::with_capacity(d.len());
    let mut norms = Vec::with_capacity(d.len());
    for (m, (&dm, &g)) in d.iter().zip(&gammas).enumerate() {
        let (lv, nr) =
            build_level(profiles, dm, g, cfg.r_max, Some(&caps)).map_err(|_| Error::ScheduleFailed { step: m })?;
        levels.push(lv);
        norms.push(nr);
    }
    Ok(HingeSchedule { d: d.to_vec(), raw_gammas: raw, gammas, n, lambda, levels, caps, norms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boman::{build_boman, Schedule};
    use std::sync::OnceLock;

    fn quadratic_profile() -> &'static SmoothFn {
        static F: OnceLock<SmoothFn> = OnceLock::new();
        F.get_or_init(|| build_boman(&Schedule::default().quadratic_input(), 7).unwrap().f)
    }

    fn quartic_profile() -> &'static SmoothFn {
        static G: OnceLock<SmoothFn> = OnceLock::new();
        G.get_or_init(|| build_boman(&Schedule::default().quartic_input(), 7).unwrap().f)
    }

    #[test]
    fn symmetric_hinge_endpoints() {
        let (d, g) = (0.3, 0.2);
        let h = Hinge::symmetric(d, g).unwrap();
        let ((x0, y0), (x1, y1)) = h.endpoints();
        assert!((x0 + d).abs() < 1e-15 && (x1 - d).abs() < 1e-15);
        assert!((y0 - d * g.tan()).abs() < 1e-15 && (y1 - y0).abs() < 1e-15);
        assert!((h.turn() - 2.0 * g).abs() < 1e-15);
        assert!(Hinge::new(1.0, 1.0, PI, (0.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn placed_profiles_mirror_and_touch_the_sides() {
        let f = quadratic_profile();
        let (d, g) = (0.02, 0.03);
        let (fu, fv) = place_profiles(f, d, g).unwrap();
        for i in 0..=50 {
            let t = -d + 2.0 * d * i as f64 / 50.0;
            assert!((fu.value(t) - fv.value(-t)).abs() < 1e-15);
        }
        assert!((slope(&fu, -d) + g.tan()).abs() < 1e-12);
        assert!((slope(&fv, d) - g.tan()).abs() < 1e-12);
        assert!((fu.value(-d) - d * g.tan()).abs() < 1e-15);
        // a point of the graph of f, moved and turned by hand
        let x = 0.01;
        let (px, py) = (x - d / g.cos(), f.value(x));
        let (qx, qy) = (px * g.cos() + py * g.sin(), -px * g.sin() + py * g.cos());
        assert!((fu.value(qx) - qy).abs() < 1e-14);
        assert!(place_profiles(f, d, 0.0).is_err());
        assert!(place_profiles(f, 0.2, g).is_err());
    }

    #[test]
    fn epsilon_solves_the_slope_equation() {
        let f = quadratic_profile();
        let (d, g) = (0.02, 0.03);
        let eps = solve_epsilon(f, d, g).unwrap();
        assert!((slope(f, 4.0 * eps) - g.tan()).abs() < 1e-12);
        let (fu, fv) = place_profiles(f, d, g).unwrap();
        assert!(slope(&fu, 2.0 * eps - d) < 0.0 && slope(&fv, d - 2.0 * eps) > 0.0);
        assert!(solve_epsilon(f, d, g * 0.5).unwrap() < eps);
        assert_eq!(solve_epsilon(f, d, 1.0), Err(Error::GammaTooLarge { gamma: 1.0 }));
        // tan γ = f'(1.01 d) needs 4ε > d
        let g_big = libm::atan(slope(f, 1.01 * d));
        assert_eq!(solve_epsilon(f, d, g_big), Err(Error::GammaNotSmall { gamma: g_big }));
    }

    #[test]
    fn b_eps_balances_the_slopes() {
        let f = quadratic_profile();
        let (d, g) = (0.02, 0.03);
        let (fu, fv) = place_profiles(f, d, g).unwrap();
        let eps = solve_epsilon(f, d, g).unwrap();
        let bs = solve_b_eps(&fu, &fv, eps, d).unwrap();
        assert!(bs.b > 0.0 && bs.b <= g.tan() / (d - 2.0 * eps));
        assert!(bs.residual < 1e-15);
        assert!((bs.i_u - bs.i_v).abs() < 1e-15);
        // ∫Φ_0 lies between the flat core and the support
        assert!(bs.i_0 > 2.0 * (d - 2.0 * eps) && bs.i_0 < 2.0 * (d - eps));
    }

    #[test]
    fn smoothing_certificates_pass() {
        let f = quadratic_profile();
        let (d, g) = (0.02, 0.03);
        let res = build_smoothing(f, d, g).unwrap();
        assert!(res.passed());
        assert!(res.second(0.0) > 0.0);
        assert_eq!(res.second(-d), 0.0);
        assert_eq!(res.second(d), 0.0);
        // F'(d) - F'(-d) by quadrature of F'' on panels halving towards ±d
        let e = res.epsilon;
        let mut total = simpson(|x| res.second(x), -d + e, d - e, 1 << 17);
        for j in 0..60 {
            let (a, b) = (e * 0.5f64.powi(j + 1), e * 0.5f64.powi(j));
            total += simpson(|x| res.second(x), -d + a, -d + b, 2048);
            total += simpson(|x| res.second(x), d - b, d - a, 2048);
        }
        assert!((total - 2.0 * g.tan()).abs() < 1e-8 * g.tan(), "{total}");
        // the output hinge touches F at ±d
        let ((x0, y0), (x1, y1)) = res.hinge_out.endpoints();
        assert!((x0 + d).abs() < 1e-12 && (y0 - res.f.value(-d)).abs() < 1e-12);
        assert!((x1 - d).abs() < 1e-12 && (y1 - res.f.value(d)).abs() < 1e-12);
        // F is convex and stays above its tangent lines
        let tg = g.tan();
        for i in 0..=200 {
            let x = -d + 2.0 * d * i as f64 / 200.0;
            let y = res.f.value(x);
            assert!(y >= res.f.value(-d) - tg * (x + d) - 1e-15);
            assert!(y >= res.f.value(d) + tg * (x - d) - 1e-15);
        }
        let c = res.certificate("max |F'| < 7 tan gamma").unwrap();
        assert!(c.measured <= tg * (1.0 + 1e-12));
    }

    #[test]
    fn flat_profile_underflow_is_reported() {
        // e^{-1/x} underflows near 0, so sampled F'' vanishes next to ±d
        let f = crate::func::library::exp_flat(Interval { lo: 0.0, hi: 0.45 }, 6);
        let res = smoothing_report(&f, 0.1, 0.004).unwrap();
        let c = res.certificate("F'' > 0 inside").unwrap();
        assert!(!c.pass && c.measured == 0.0);
        assert!(build_smoothing(&f, 0.1, 0.004).is_err());
        assert!(res.certificates.iter().filter(|c| !c.pass).count() == 1);
    }

    #[test]
    fn schedule_hits_pi_over_n() {
        let profiles = [quadratic_profile().clone(), quartic_profile().clone()];
        let d = [0.04, 0.01, 0.0025];
        let sch = schedule_smoothings(&profiles, &d, &ScheduleConfig::default()).unwrap();
        assert!(sch.n >= 2 && sch.lambda <= 1.0 && sch.lambda > 0.5);
        assert!((sch.angle_sum() - PI / sch.n as f64).abs() < 1e-12);
        assert!(sch.gammas.windows(2).all(|w| w[1] <= w[0]));
        for (m, lv) in sch.levels.iter().enumerate() {
            assert_eq!(lv.len(), 2);
            for (p, res) in lv.iter().enumerate() {
                assert!(res.passed());
                assert!(sch.norms[m][p].iter().zip(&sch.caps[p]).all(|(v, c)| v <= c));
            }
        }
        let partial = sch.side_sum_partials();
        assert!(partial.windows(2).all(|w| w[1] > w[0]));
        assert!(schedule_smoothings(&profiles, &[0.2], &ScheduleConfig::default()).is_err());
    }
}
