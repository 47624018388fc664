//! Closed convex curves assembled from hinge smoothings, their Gauss images,
//! and support-function calculus for plane convex bodies.
//!
//! One arc is laid out by walking the levels of a smoothing schedule in the
//! middle-thirds order: the level-0 smoothing sits in the middle, the level-1
//! smoothings in the middles of the two remaining straight parts, and so on.
//! Each level-`m` smoothing turns the tangent by `2γ_m`, so the arc turns by
//! `Σ 2^{m+1} γ_m = π/n`; `2n` rotated copies close the curve.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::cantor::{build_cantor, periodic_copies, CantorSpec, IntervalSet};
use crate::error::{Error, Result};
use crate::func::SmoothFn;
use crate::hinge::{HingeSchedule, SmoothingResult};
use crate::jet::Jet;
use crate::rotate::rotate_graph;

/// Angular samples of support functions and the cell used to compare angles.
pub const ANGLE_GRID: usize = 1 << 16;
/// A vertex is flat when `κ < FLAT_TOL · max κ`.
pub const FLAT_TOL: f64 = 1e-8;
/// Polyline samples per smoothing.
pub const PIECE_SAMPLES: usize = 128;

type Pt = (f64, f64);

fn rot(a: f64, p: Pt) -> Pt {
    let (s, c) = libm::sincos(a);
    (c * p.0 - s * p.1, s * p.0 + c * p.1)
}

fn add(a: Pt, b: Pt) -> Pt {
    (a.0 + b.0, a.1 + b.1)
}

fn sub(a: Pt, b: Pt) -> Pt {
    (a.0 - b.0, a.1 - b.1)
}

fn norm(a: Pt) -> f64 {
    libm::hypot(a.0, a.1)
}

fn wrap_angle(a: f64) -> f64 {
    let r = a - TAU * libm::floor(a / TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Local data of a smoothing: `(F, F', F'')` at `x`.
fn local(s: &SmoothingResult, x: f64) -> (f64, f64, f64) {
    let j = s.f.jet(x, 2);
    (j.value(), j.coeff(1), j.derivative(2))
}

fn graph_curvature(d1: f64, d2: f64) -> f64 {
    d2 / libm::pow(1.0 + d1 * d1, 1.5)
}

/// A placed smoothing: local point `(x, F(x))` maps to
/// `start + R(turn)·((x + d, F(x) - F(-d)))`.
#[derive(Clone, Debug)]
pub struct Placed {
    pub level: usize,
    pub start: Pt,
    /// Incoming tangent direction.
    pub dir: f64,
    /// Rotation of the local frame, `dir + γ`.
    pub turn: f64,
    pub f_left: f64,
    /// Samples `(x, F', F'')` used to seed the tangent solve.
    table: Arc<Vec<(f64, f64)>>,
}

#[derive(Clone, Debug)]
enum Piece {
    Segment { start: Pt, dir: f64, len: f64 },
    Smoothing(Placed),
}

/// One arc: the graph of `h_m` when levels `≥ m` are left unbent.
#[derive(Clone, Debug)]
pub struct ArcLayout {
    pieces: Vec<Piece>,
    pub end: Pt,
    pub end_dir: f64,
    pub length_budget: f64,
}

struct Walker<'a> {
    levels: &'a [SmoothingResult],
    tables: &'a [Arc<Vec<(f64, f64)>>],
    unbent_from: usize,
    pos: Pt,
    dir: f64,
    pieces: Vec<Piece>,
    tol: f64,
}

impl Walker<'_> {
    fn segment(&mut self, len: f64) -> Result<()> {
        if len < -self.tol {
            return Err(Error::Assembly(format!("negative straight part {len}")));
        }
        if len > self.tol {
            self.pieces.push(Piece::Segment { start: self.pos, dir: self.dir, len });
            self.pos = add(self.pos, rot(self.dir, (len, 0.0)));
        }
        Ok(())
    }

    fn emit(&mut self, m: usize, s: f64) -> Result<()> {
        if m >= self.levels.len() || m >= self.unbent_from {
            return self.segment(s);
        }
        let sm = &self.levels[m];
        let h = sm.hinge_out;
        let rem = 0.5 * (s - h.l - h.r);
        self.emit(m + 1, rem)?;
        let d = sm.d;
        let f_left = sm.f.value(-d);
        let turn = self.dir + sm.gamma;
        self.pieces.push(Piece::Smoothing(Placed {
            level: m,
            start: self.pos,
            dir: self.dir,
            turn,
            f_left,
            table: self.tables[m].clone(),
        }));
        let chord = (2.0 * d, sm.f.value(d) - f_left);
        self.pos = add(self.pos, rot(turn, chord));
        self.dir += 2.0 * sm.gamma;
        self.emit(m + 1, rem)
    }
}

fn slope_table(s: &SmoothingResult) -> Vec<(f64, f64)> {
    (0..=PIECE_SAMPLES)
        .map(|i| {
            let x = -s.d + 2.0 * s.d * i as f64 / PIECE_SAMPLES as f64;
            (x, local(s, x).1)
        })
        .collect()
}

/// `Σ 2^m (l_m + r_m)` over the given levels.
pub fn arc_length_budget(levels: &[SmoothingResult]) -> f64 {
    levels.iter().enumerate().map(|(m, s)| libm::ldexp(s.hinge_out.l + s.hinge_out.r, m as i32)).sum()
}

/// Lays out one arc starting at the origin with tangent `start_dir`, bending
/// and smoothing the levels below `unbent_from`.
pub fn layout_arc(levels: &[SmoothingResult], unbent_from: usize, start_dir: f64) -> Result<ArcLayout> {
    let tables: Vec<_> = levels.iter().map(|s| Arc::new(slope_table(s))).collect();
    layout_with(levels, &tables, unbent_from, start_dir)
}

fn layout_with(
    levels: &[SmoothingResult],
    tables: &[Arc<Vec<(f64, f64)>>],
    unbent_from: usize,
    start_dir: f64,
) -> Result<ArcLayout> {
    let budget = arc_length_budget(levels);
    let mut w = Walker {
        levels,
        tables,
        unbent_from,
        pos: (0.0, 0.0),
        dir: start_dir,
        pieces: Vec::new(),
        tol: 1e-13 * budget,
    };
    w.emit(0, budget)?;
    Ok(ArcLayout { pieces: w.pieces, end: w.pos, end_dir: w.dir, length_budget: budget })
}

#[derive(Clone, Debug, Default)]
struct Polyline {
    pts: Vec<Pt>,
    tangent: Vec<f64>,
    kappa: Vec<f64>,
    /// Index of the smoothing each vertex came from, if any.
    piece: Vec<Option<usize>>,
    /// Vertices that are the left endpoint of a smoothing.
    left_ends: Vec<usize>,
}

impl Polyline {
    fn push(&mut self, p: Pt, t: f64, k: f64, piece: Option<usize>, tol: f64) -> usize {
        if let Some(last) = self.pts.last() {
            if norm(sub(p, *last)) <= tol {
                let i = self.pts.len() - 1;
                self.kappa[i] = self.kappa[i].min(k);
                return i;
            }
        }
        self.pts.push(p);
        self.tangent.push(t);
        self.kappa.push(k);
        self.piece.push(piece);
        self.pts.len() - 1
    }
}

impl ArcLayout {
    fn polyline(&self, levels: &[SmoothingResult], samples: usize) -> Polyline {
        let tol = 1e-14 * self.length_budget.max(f64::MIN_POSITIVE);
        let mut pl = Polyline::default();
        for (pi, piece) in self.pieces.iter().enumerate() {
            match piece {
                Piece::Segment { start, dir, len } => {
                    pl.push(*start, *dir, 0.0, None, tol);
                    pl.push(add(*start, rot(*dir, (*len, 0.0))), *dir, 0.0, None, tol);
                }
                Piece::Smoothing(p) => {
                    let s = &levels[p.level];
                    for i in 0..=samples {
                        let x = -s.d + 2.0 * s.d * i as f64 / samples as f64;
                        let (v, d1, d2) = local(s, x);
                        let q = add(p.start, rot(p.turn, (x + s.d, v - p.f_left)));
                        let k = graph_curvature(d1, d2);
                        let at = pl.push(q, p.turn + libm::atan(d1), k, Some(pi), tol);
                        if i == 0 {
                            pl.left_ends.push(at);
                        }
                    }
                }
            }
        }
        pl
    }

    /// Graph of the arc over its initial tangent line, for arcs laid out
    /// with `start_dir = 0`: vertices `(x, h(x))`.
    pub fn graph_points(&self, levels: &[SmoothingResult], samples: usize) -> Vec<Pt> {
        self.polyline(levels, samples).pts
    }
}

/// Piecewise-linear interpolation of a graph given by increasing abscissae.
fn interp(pts: &[Pt], x: f64) -> Option<f64> {
    let i = pts.partition_point(|p| p.0 < x);
    if i == 0 {
        return (pts[0].0 == x).then_some(pts[0].1);
    }
    if i == pts.len() {
        return None;
    }
    let (a, b) = (pts[i - 1], pts[i]);
    if b.0 == a.0 {
        return Some(b.1.min(a.1));
    }
    Some(a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneRow {
    pub m: usize,
    /// `max (h_m - h_{m+1})` over common abscissae (should be `≤ 0`).
    pub worst: f64,
    pub max_curvature: f64,
}

/// Gauss angles where the curvature vanishes exactly, and the left-endpoint
/// angles among them. The profiles can be nearly flat between their bumps;
/// those points are flat marks but not zeros.
#[derive(Clone, Debug)]
pub struct GaussZeroSet {
    /// Sorted angles in `[0, 2π)`.
    pub z: Vec<f64>,
    pub e: Vec<f64>,
}

impl GaussZeroSet {
    pub fn as_set(&self) -> IntervalSet<f64> {
        IntervalSet::new(self.z.iter().map(|&a| (a, a)).collect()).unwrap_or_else(|_| IntervalSet::empty())
    }

    pub fn e_set(&self) -> IntervalSet<f64> {
        IntervalSet::new(self.e.iter().map(|&a| (a, a)).collect()).unwrap_or_else(|_| IntervalSet::empty())
    }

    /// `max_e dist(e, Z)`.
    pub fn e_in_z(&self) -> f64 {
        self.e.iter().map(|&a| nearest(&self.z, a)).fold(0.0, f64::max)
    }

    /// `max_z dist(z + π/n, Z)` and `max_z dist(-z, Z)`.
    pub fn symmetry_defects(&self, n: usize) -> (f64, f64) {
        let step = PI / n as f64;
        let r = self.z.iter().map(|&a| nearest(&self.z, wrap_angle(a + step))).fold(0.0, f64::max);
        let m = self.z.iter().map(|&a| nearest(&self.z, wrap_angle(-a))).fold(0.0, f64::max);
        (r, m)
    }
}

/// Circular distance from `a` to the nearest angle of the sorted list.
fn nearest(sorted: &[f64], a: f64) -> f64 {
    if sorted.is_empty() {
        return f64::INFINITY;
    }
    let i = sorted.partition_point(|&z| z < a);
    let cand = [i.checked_sub(1).unwrap_or(sorted.len() - 1), i % sorted.len()];
    cand.iter()
        .map(|&j| {
            let d = libm::fabs(sorted[j] - a);
            d.min(TAU - d)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Closed strictly convex curve with `2n`-fold rotational symmetry.
#[derive(Clone, Debug)]
pub struct ConvexCurve {
    pub points: Vec<Pt>,
    /// Outward normal angle in `[0, 2π)`.
    pub gauss_angle: Vec<f64>,
    pub curvature: Vec<f64>,
    pub flat_marks: Vec<usize>,
    pub symmetry_order: usize,
    pub n: usize,
    pub gammas: Vec<f64>,
    pub levels: Vec<SmoothingResult>,
    arc: ArcLayout,
    /// Start of each copy of the arc.
    starts: Vec<Pt>,
    pub center: Pt,
    /// Vertices per arc copy.
    pub arc_vertices: usize,
    left_ends: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveChecks {
    pub total_turning: f64,
    /// Smallest `sin` of the turning between consecutive edges.
    pub min_cross: f64,
    pub gauss_monotone: bool,
    /// Longest straight edge between two flat vertices.
    pub longest_flat_edge: f64,
    pub closure_gap: f64,
    pub symmetry_defect: f64,
    pub diameter: f64,
}

impl ConvexCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn diameter(&self) -> f64 {
        let (mut lo, mut hi) = ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in &self.points {
            lo = (lo.0.min(p.0), lo.1.min(p.1));
            hi = (hi.0.max(p.0), hi.1.max(p.1));
        }
        norm(sub(hi, lo))
    }

    pub fn checks(&self) -> CurveChecks {
        let n = self.points.len();
        let mut turning = 0.0;
        let mut min_cross = f64::INFINITY;
        for i in 0..n {
            let (a, b, c) = (self.points[(i + n - 1) % n], self.points[i], self.points[(i + 1) % n]);
            let (e1, e2) = (sub(b, a), sub(c, b));
            let cross = e1.0 * e2.1 - e1.1 * e2.0;
            let dot = e1.0 * e2.0 + e1.1 * e2.1;
            turning += libm::atan2(cross, dot);
            min_cross = min_cross.min(cross / (norm(e1) * norm(e2)));
        }
        let mut steps = 0.0;
        let mut gauss_monotone = true;
        for i in 0..n {
            let d = wrap_angle(self.gauss_angle[(i + 1) % n] - self.gauss_angle[i]);
            if d > PI {
                gauss_monotone = false;
            }
            steps += d;
        }
        gauss_monotone &= libm::fabs(steps - TAU) < 1e-9;
        let flat: Vec<bool> = (0..n).map(|i| self.flat_marks.binary_search(&i).is_ok()).collect();
        let longest_flat_edge = (0..n)
            .filter(|&i| flat[i] && flat[(i + 1) % n])
            .map(|i| norm(sub(self.points[(i + 1) % n], self.points[i])))
            .fold(0.0, f64::max);
        let closure_gap = {
            let last = self.starts.len() - 1;
            let end = add(self.starts[last], rot(last as f64 * PI / self.n as f64, self.arc.end));
            norm(sub(end, self.starts[0]))
        };
        let m = self.arc_vertices;
        let step = PI / self.n as f64;
        let symmetry_defect = (0..m)
            .map(|i| {
                let p = add(self.center, rot(step, sub(self.points[i], self.center)));
                norm(sub(p, self.points[(i + m) % n]))
            })
            .fold(0.0, f64::max);
        CurveChecks {
            total_turning: turning,
            min_cross,
            gauss_monotone,
            longest_flat_edge,
            closure_gap,
            symmetry_defect,
            diameter: self.diameter(),
        }
    }

    pub fn zero_set(&self) -> GaussZeroSet {
        let mut z: Vec<f64> =
            (0..self.len()).filter(|&i| self.curvature[i] == 0.0).map(|i| self.gauss_angle[i]).collect();
        z.sort_by(f64::total_cmp);
        let mut e: Vec<f64> = self.left_ends.iter().map(|&i| self.gauss_angle[i]).collect();
        e.sort_by(f64::total_cmp);
        GaussZeroSet { z, e }
    }

    /// The Cantor spec on `[0, π/n]` whose depth-`m` intervals are the Gauss
    /// images of the parts left unsmoothed after level `m - 1`.
    pub fn cantor_spec(&self) -> Result<CantorSpec<f64>> {
        let mm = self.gammas.len();
        let mut tail = vec![0.0; mm + 1];
        for m in (0..mm).rev() {
            tail[m] = 2.0 * self.gammas[m] + 2.0 * tail[m + 1];
        }
        let ratios = (0..mm.saturating_sub(1)).map(|m| 2.0 * self.gammas[m] / tail[m]).collect();
        CantorSpec::new((0.0, PI / self.n as f64), ratios)
    }

    /// `2n` copies of the depth-`depth` arc set, in radians.
    pub fn zero_set_model(&self, depth: usize) -> Result<IntervalSet<f64>> {
        let spec = self.cantor_spec()?;
        let arc = build_cantor(&spec.truncated(depth))?;
        Ok(periodic_copies(&arc, &(PI / self.n as f64), 2 * self.n))
    }

    /// Worst circular distance between the zero angles and the endpoints of
    /// the deepest model intervals, in both directions.
    pub fn zero_set_agreement(&self) -> Result<(f64, f64)> {
        let spec = self.cantor_spec()?;
        let arc = build_cantor(&spec.truncated(self.gammas.len().saturating_sub(1)))?;
        // per copy, since neighbouring copies merge at their common endpoint
        let step = PI / self.n as f64;
        let mut ends: Vec<f64> = (0..2 * self.n)
            .flat_map(|k| {
                arc.intervals().iter().flat_map(move |(a, b)| [a, b].map(|x| wrap_angle(x + k as f64 * step)))
            })
            .collect();
        ends.sort_by(f64::total_cmp);
        let zs = self.zero_set();
        let z_to_model = zs.z.iter().map(|&a| nearest(&ends, a)).fold(0.0, f64::max);
        let model_to_z = ends.iter().map(|&a| nearest(&zs.z, a)).fold(0.0, f64::max);
        Ok((z_to_model, model_to_z))
    }

    /// Local graph of the curve over its tangent line at the left endpoint of
    /// the `index`-th level-`level` smoothing of the first arc, on `[0, extent]`.
    pub fn local_graph_at_left_end(&self, level: usize, index: usize, extent: f64) -> Result<SmoothFn> {
        let placed = self
            .arc
            .pieces
            .iter()
            .filter_map(|p| match p {
                Piece::Smoothing(s) if s.level == level => Some(s),
                _ => None,
            })
            .nth(index)
            .ok_or_else(|| Error::Argument(format!("no smoothing {index} at level {level}")))?;
        let s = &self.levels[placed.level];
        let moved = s.f.translated(-s.d).offset(-placed.f_left);
        let lifted = rotate_graph(&moved, s.gamma)?.f_phi;
        if !(extent > 0.0 && extent <= lifted.domain().hi) {
            return Err(Error::Argument(format!("extent {extent} outside the smoothing")));
        }
        lifted.restrict(crate::func::Interval { lo: 0.0, hi: extent })
    }

    /// Where the left endpoint of that smoothing sits on the closed curve,
    /// with its tangent direction.
    pub fn left_end_frame(&self, level: usize, index: usize) -> Option<(Pt, f64)> {
        self.arc
            .pieces
            .iter()
            .filter_map(|p| match p {
                Piece::Smoothing(s) if s.level == level => Some(s),
                _ => None,
            })
            .nth(index)
            .map(|s| (add(self.starts[0], s.start), s.dir))
    }

    /// Support data at the outward normal `theta`, from the smoothings.
    pub fn support_at(&self, theta: f64) -> SupportSample {
        let step = PI / self.n as f64;
        let t = wrap_angle(theta);
        let k = ((t / step) as usize).min(2 * self.n - 1);
        let tangent = t - k as f64 * step + FRAC_PI_2;
        let pieces = &self.arc.pieces;
        let i = pieces
            .partition_point(|p| match p {
                Piece::Smoothing(s) => s.dir <= tangent,
                Piece::Segment { dir, .. } => *dir <= tangent,
            })
            .max(1)
            - 1;
        let (p_arc, rho) = match &pieces[i] {
            Piece::Segment { start, .. } => (*start, 0.0),
            Piece::Smoothing(p) => {
                let s = &self.levels[p.level];
                let target = libm::tan(tangent - p.turn);
                let x = solve_slope(s, &p.table, target);
                let (v, d1, d2) = local(s, x);
                let q = add(p.start, rot(p.turn, (x + s.d, v - p.f_left)));
                let rho = if d2 > 0.0 { libm::pow(1.0 + d1 * d1, 1.5) / d2 } else { f64::INFINITY };
                (q, rho)
            }
        };
        let g = add(self.starts[k], rot(k as f64 * step, p_arc));
        let (s, c) = libm::sincos(theta);
        SupportSample { h: g.0 * c + g.1 * s, dh: -g.0 * s + g.1 * c, rho }
    }
}

/// Slopes this close to `F'(±d)` land on the joint itself.
const SNAP: f64 = 1e-12;

/// `x ∈ [-d, d]` with `F'(x) = target`, Newton from the sampled slopes with a
/// bisection fallback.
fn solve_slope(s: &SmoothingResult, table: &[(f64, f64)], target: f64) -> f64 {
    let d = s.d;
    let n = table.len();
    if target <= table[0].1 + SNAP {
        return -d;
    }
    if target >= table[n - 1].1 - SNAP {
        return d;
    }
    let i = table.partition_point(|e| e.1 < target).clamp(1, n - 1);
    let (mut lo, mut hi) = (table[i - 1].0, table[i].0);
    let (s0, s1) = (table[i - 1].1, table[i].1);
    let mut x = if s1 > s0 { lo + (hi - lo) * (target - s0) / (s1 - s0) } else { 0.5 * (lo + hi) };
    for _ in 0..100 {
        let (_, d1, d2) = local(s, x);
        let r = d1 - target;
        if r == 0.0 {
            return x;
        }
        if r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = if d2 > 0.0 { x - r / d2 } else { 0.5 * (lo + hi) };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == x || hi - lo <= 4.0 * f64::EPSILON * d {
            return next;
        }
        x = next;
    }
    x
}

#[derive(Clone, Debug)]
pub struct Assembly {
    pub curve: ConvexCurve,
    pub zero_set: GaussZeroSet,
    /// `h_m ≤ h_{m+1}` rows for `m < m_max`.
    pub monotone: Vec<MonotoneRow>,
}

/// Builds `C_f` from the smoothings of profile `profile` in a schedule.
pub fn assemble_curve(schedule: &HingeSchedule, profile: usize, m_max: usize) -> Result<Assembly> {
    let levels: Vec<SmoothingResult> = schedule
        .levels
        .iter()
        .take(m_max)
        .map(|lv| lv.get(profile).cloned().ok_or_else(|| Error::Argument(format!("no profile {profile}"))))
        .collect::<Result<_>>()?;
    if levels.is_empty() {
        return Err(Error::Argument("assembly needs at least one level".into()));
    }
    let n = schedule.n;
    let gammas: Vec<f64> = levels.iter().map(|s| s.gamma).collect();
    let turn: f64 = gammas.iter().enumerate().map(|(m, g)| libm::ldexp(*g, m as i32 + 1)).sum();
    if libm::fabs(turn - PI / n as f64) > 1e-9 {
        return Err(Error::Assembly(format!("arc turns by {turn}, expected π/{n}")));
    }
    let tables: Vec<_> = levels.iter().map(|s| Arc::new(slope_table(s))).collect();

    // h_m ≤ h_{m+1} on graphs over the initial tangent line
    let graphs: Vec<Vec<Pt>> = (0..=levels.len())
        .map(|m| Ok(layout_with(&levels, &tables, m, 0.0)?.polyline(&levels, 32).pts))
        .collect::<Result<_>>()?;
    let budget = arc_length_budget(&levels);
    let mut monotone = Vec::with_capacity(levels.len());
    for m in 0..levels.len() {
        let (a, b) = (&graphs[m], &graphs[m + 1]);
        let mut worst = f64::NEG_INFINITY;
        for p in a.iter().chain(b.iter()) {
            if let (Some(ha), Some(hb)) = (interp(a, p.0), interp(b, p.0)) {
                worst = worst.max(ha - hb);
            }
        }
        let max_curvature = levels[..m + 1]
            .iter()
            .flat_map(|s| {
                (0..=64).map(move |i| {
                    let (_, d1, d2) = local(s, -s.d + s.d * i as f64 / 32.0);
                    graph_curvature(d1, d2)
                })
            })
            .fold(0.0, f64::max);
        monotone.push(MonotoneRow { m, worst, max_curvature });
        if worst > 1e-12 * budget {
            return Err(Error::Assembly(format!("h_{m} exceeds h_{} by {worst}", m + 1)));
        }
    }

    let arc = layout_with(&levels, &tables, levels.len(), FRAC_PI_2)?;
    let pl = arc.polyline(&levels, PIECE_SAMPLES);
    // the last vertex of each copy is the first of the next
    let m = pl.pts.len() - 1;
    let step = PI / n as f64;
    let mut starts = Vec::with_capacity(2 * n);
    let mut pos = (0.0, 0.0);
    for k in 0..2 * n {
        starts.push(pos);
        pos = add(pos, rot(k as f64 * step, arc.end));
    }
    let gap = norm(pos);
    let scale = arc.length_budget;
    if gap > 1e-9 * scale {
        return Err(Error::Symmetry { gap });
    }
    let center = starts.iter().fold((0.0, 0.0), |c, s| (c.0 + s.0 / (2 * n) as f64, c.1 + s.1 / (2 * n) as f64));
    let mut points = Vec::with_capacity(2 * n * m);
    let mut gauss_angle = Vec::with_capacity(2 * n * m);
    let mut curvature = Vec::with_capacity(2 * n * m);
    let mut left_ends = Vec::new();
    for (k, s) in starts.iter().enumerate() {
        let a = k as f64 * step;
        for i in 0..m {
            points.push(add(*s, rot(a, pl.pts[i])));
            gauss_angle.push(wrap_angle(pl.tangent[i] + a - FRAC_PI_2));
            curvature.push(pl.kappa[i]);
        }
        left_ends.extend(pl.left_ends.iter().filter(|&&i| i < m).map(|&i| k * m + i));
    }
    let kmax = curvature.iter().fold(0.0f64, |a, b| a.max(*b));
    let flat_marks: Vec<usize> = (0..curvature.len()).filter(|&i| curvature[i] < FLAT_TOL * kmax).collect();
    let mut curve = ConvexCurve {
        points,
        gauss_angle,
        curvature,
        flat_marks,
        symmetry_order: 1,
        n,
        gammas,
        levels,
        arc,
        starts,
        center,
        arc_vertices: m,
        left_ends,
    };
    let ch = curve.checks();
    if ch.symmetry_defect > 1e-9 * ch.diameter {
        return Err(Error::Symmetry { gap: ch.symmetry_defect });
    }
    curve.symmetry_order = 2 * n;
    let zero_set = curve.zero_set();
    Ok(Assembly { curve, zero_set, monotone })
}

/// Support data at one normal angle: `h`, `h'` and the curvature radius
/// `ρ = h + h''` (`∞` at flat points).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportSample {
    pub h: f64,
    pub dh: f64,
    pub rho: f64,
}

impl SupportSample {
    pub fn kappa(&self) -> f64 {
        if self.rho.is_infinite() {
            0.0
        } else {
            1.0 / self.rho
        }
    }

    /// Boundary point with outward normal `theta`.
    pub fn point(&self, theta: f64) -> Pt {
        let (s, c) = libm::sincos(theta);
        (self.h * c - self.dh * s, self.h * s + self.dh * c)
    }
}

/// A plane convex body known through its support function.
pub trait Body: Send + Sync {
    fn support(&self, theta: f64) -> SupportSample;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: Pt,
    pub radius: f64,
}

impl Body for Disk {
    fn support(&self, theta: f64) -> SupportSample {
        let (s, c) = libm::sincos(theta);
        let (x, y) = self.center;
        SupportSample { h: x * c + y * s + self.radius, dh: -x * s + y * c, rho: self.radius }
    }
}

/// `{(x, y) : (x/a)² + (y/b)² ≤ 1}` turned by `tilt` and moved to `center`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipse {
    pub center: Pt,
    pub a: f64,
    pub b: f64,
    pub tilt: f64,
}

impl Body for Ellipse {
    fn support(&self, theta: f64) -> SupportSample {
        let t = Jet::var(theta - self.tilt, 2);
        let (s, c) = t.sin_cos();
        let h = (c * c * (self.a * self.a) + s * s * (self.b * self.b)).sqrt();
        let (sn, cs) = libm::sincos(theta);
        let (x, y) = self.center;
        SupportSample {
            h: h.value() + x * cs + y * sn,
            dh: h.derivative(1) - x * sn + y * cs,
            rho: h.value() + h.derivative(2),
        }
    }
}

impl Body for ConvexCurve {
    fn support(&self, theta: f64) -> SupportSample {
        self.support_at(theta)
    }
}

/// A body turned by `angle` about the origin.
pub struct Rotated<'a>(pub &'a dyn Body, pub f64);

impl Body for Rotated<'_> {
    fn support(&self, theta: f64) -> SupportSample {
        self.0.support(theta - self.1)
    }
}

/// `A + B` for bodies.
pub struct SumBody<'a>(pub &'a dyn Body, pub &'a dyn Body);

impl Body for SumBody<'_> {
    fn support(&self, theta: f64) -> SupportSample {
        let (a, b) = (self.0.support(theta), self.1.support(theta));
        SupportSample { h: a.h + b.h, dh: a.dh + b.dh, rho: a.rho + b.rho }
    }
}

/// Support function sampled on the uniform grid `θ_j = 2πj/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportFn {
    pub h: Vec<f64>,
    pub dh: Vec<f64>,
    pub rho: Vec<f64>,
}

impl SupportFn {
    pub fn sample(body: &dyn Body, n: usize) -> Self {
        Self::from_samples((0..n).map(|j| body.support(theta_of(j, n))).collect())
    }

    pub fn from_samples(samples: Vec<SupportSample>) -> Self {
        SupportFn {
            h: samples.iter().map(|s| s.h).collect(),
            dh: samples.iter().map(|s| s.dh).collect(),
            rho: samples.iter().map(|s| s.rho).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn theta(&self, j: usize) -> f64 {
        theta_of(j, self.len())
    }

    /// `h''`, from `ρ = h + h''`.
    pub fn d2h(&self, j: usize) -> f64 {
        self.rho[j] - self.h[j]
    }

    pub fn boundary(&self) -> Vec<Pt> {
        (0..self.len())
            .map(|j| SupportSample { h: self.h[j], dh: self.dh[j], rho: self.rho[j] }.point(self.theta(j)))
            .collect()
    }
}

pub fn theta_of(j: usize, n: usize) -> f64 {
    TAU * j as f64 / n as f64
}

/// Support functions add under Minkowski sum.
pub fn minkowski_sum(a: &SupportFn, b: &SupportFn) -> Result<SupportFn> {
    if a.len() != b.len() {
        return Err(Error::Argument(format!("angular grids differ: {} vs {}", a.len(), b.len())));
    }
    let z = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x + y).collect();
    Ok(SupportFn { h: z(&a.h, &b.h), dh: z(&a.dh, &b.dh), rho: z(&a.rho, &b.rho) })
}

/// Symmetric Hausdorff distance between two point clouds.
pub fn hausdorff(a: &[Pt], b: &[Pt]) -> f64 {
    let one = |p: &[Pt], q: &[Pt]| {
        p.iter().map(|x| q.iter().map(|y| norm(sub(*x, *y))).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

/// Distance from each point of `pts` to the polygon `poly` (closed), maximised.
pub fn max_distance_to_polygon(pts: &[Pt], poly: &[Pt]) -> f64 {
    let n = poly.len();
    pts.iter()
        .map(|p| {
            (0..n)
                .map(|i| {
                    let (a, b) = (poly[i], poly[(i + 1) % n]);
                    let ab = sub(b, a);
                    let l2 = ab.0 * ab.0 + ab.1 * ab.1;
                    let t =
                        if l2 > 0.0 { (((p.0 - a.0) * ab.0 + (p.1 - a.1) * ab.1) / l2).clamp(0.0, 1.0) } else { 0.0 };
                    norm(sub(*p, (a.0 + t * ab.0, a.1 + t * ab.1)))
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Convex hull (counterclockwise, monotone chain).
pub fn convex_hull(mut pts: Vec<Pt>) -> Vec<Pt> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Pt, a: Pt, b: Pt| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<Pt> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Pt> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferReport {
    pub theta: f64,
    pub rho_a: f64,
    pub rho_b: f64,
    pub rho_sum: f64,
    /// `ρ_{A+B}` from a central difference of the boundary of `A + B`
    /// reconstructed from its support function; `None` where `ρ_B = ∞`.
    pub rho_sum_fd: Option<f64>,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub kappa_sum: f64,
    pub holds: bool,
}

impl TransferReport {
    pub fn additivity_error(&self) -> f64 {
        match self.rho_sum_fd {
            Some(fd) => libm::fabs(fd - self.rho_sum) / self.rho_sum,
            None => 0.0,
        }
    }
}

/// Curvature of `A + B` at the normal `theta`, given `κ_A(θ) > 0`:
/// `κ_{A+B}(θ) = 0` exactly when `κ_B(θ) = 0`.
pub fn curvature_transfer_check(a: &dyn Body, b: &dyn Body, theta: f64, fd_step: f64) -> Result<TransferReport> {
    let (sa, sb) = (a.support(theta), b.support(theta));
    let kappa_a = sa.kappa();
    if !(kappa_a > 1e-6) {
        return Err(Error::Precondition(format!("κ_A({theta}) = {kappa_a} is not positive")));
    }
    let rho_sum = sa.rho + sb.rho;
    let kappa_sum = if rho_sum.is_infinite() { 0.0 } else { 1.0 / rho_sum };
    let rho_sum_fd = rho_sum.is_finite().then(|| {
        let sum = SumBody(a, b);
        let (s, c) = libm::sincos(theta);
        let chord = |h: f64| {
            let p = sum.support(theta + h).point(theta + h);
            let q = sum.support(theta - h).point(theta - h);
            ((p.0 - q.0) * -s + (p.1 - q.1) * c) / (2.0 * libm::sin(h))
        };
        // two Richardson levels on the even-order chord estimate
        let (c1, c2, c4) = (chord(fd_step), chord(2.0 * fd_step), chord(4.0 * fd_step));
        let (r1, r2) = ((4.0 * c1 - c2) / 3.0, (4.0 * c2 - c4) / 3.0);
        (16.0 * r1 - r2) / 15.0
    });
    let kappa_b = sb.kappa();
    Ok(TransferReport {
        theta,
        rho_a: sa.rho,
        rho_b: sb.rho,
        rho_sum,
        rho_sum_fd,
        kappa_a,
        kappa_b,
        kappa_sum,
        holds: (kappa_sum == 0.0) == (kappa_b == 0.0),
    })
}

/// Grid angles `θ` with `(Z_A + θ) mod 2π` disjoint from `Z_B`.
pub fn rotations_avoiding_zero_sets(za: &GaussZeroSet, zb: &GaussZeroSet, grid: &[f64]) -> Vec<f64> {
    crate::cantor::avoiding_angles(&za.as_set(), &zb.as_set(), grid, &TAU)
}

pub fn angle_grid(count: usize) -> Vec<f64> {
    (0..count).map(|j| theta_of(j, count)).collect()
}
