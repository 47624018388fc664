//! Desk-scale experiments: growth of the `C^{4,α}` seminorm of `f □ g`
//! near `2t_k`, and its stability under small rotations of `f`.

use alloc::vec::Vec;

use crate::boman::{t, BomanOutput, Schedule};
use crate::error::Result;
use crate::func::{holder_seminorm_with, Interval, SmoothFn, HOLDER_GRID};
use crate::infconv::{infconv_fn, minimizer_map};
use crate::rotate::rotate_graph;

/// Window half-width in units of `a_k`.
pub const WINDOW_FACTOR: f64 = 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct BlowupRow {
    pub k: usize,
    pub window: Interval,
    /// Hölder seminorm of `h⁽⁴⁾` on the window.
    pub seminorm: f64,
    /// `max |h⁽⁴⁾|` on the window (the α = 0 control).
    pub c4: f64,
    pub pair_argmax: (f64, f64),
    /// `a_k^α / b_k`.
    pub ratio: f64,
    /// `f'(t_k) - b_k` and `g'(t_k) - b_k`.
    pub f_slope_residual: f64,
    pub g_slope_residual: f64,
    /// `|f'(μ) - g'(2t_k - μ)|` at the window centre.
    pub root_residual: f64,
}

pub fn blowup_window(s: &Schedule, k: usize, factor: f64) -> Interval {
    let c = 2.0 * t(k);
    let w = factor * s.a(k);
    Interval { lo: c - w, hi: c + w }
}

/// Windowed `C^{4,α}` data of `h = f □ g` near `2t_k`.
pub fn blowup_row(
    f: &BomanOutput,
    g: &BomanOutput,
    s: &Schedule,
    k: usize,
    factor: f64,
    n: usize,
) -> Result<BlowupRow> {
    let window = blowup_window(s, k, factor);
    let h = infconv_fn(&f.f, &g.f, window)?;
    let rep = holder_seminorm_with(&h, 4, s.alpha, window, n)?;
    let resid = |o: &BomanOutput| o.f.jet(t(k), 1).coeff(1) - o.b[k];
    let x = 2.0 * t(k);
    let mu = minimizer_map(&f.f, &g.f, x)?;
    let root_residual = libm::fabs(f.f.jet(mu, 1).coeff(1) - g.f.jet(x - mu, 1).coeff(1));
    Ok(BlowupRow {
        k,
        window,
        seminorm: rep.seminorm,
        c4: rep.sup,
        pair_argmax: rep.pair_argmax,
        ratio: s.hypothesis_ratio(k),
        f_slope_residual: resid(f),
        g_slope_residual: resid(g),
        root_residual,
    })
}

pub fn blowup_table(f: &BomanOutput, g: &BomanOutput, s: &Schedule, ks: &[usize]) -> Result<Vec<BlowupRow>> {
    ks.iter().map(|&k| blowup_row(f, g, s, k, WINDOW_FACTOR, HOLDER_GRID)).collect()
}

/// Longest run of consecutive `k` over which the seminorm strictly increases.
pub fn longest_increasing_run(rows: &[BlowupRow]) -> usize {
    let mut best = if rows.is_empty() { 0 } else { 1 };
    let mut cur = best;
    for w in rows.windows(2) {
        if w[1].k == w[0].k + 1 && w[1].seminorm > w[0].seminorm {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 1;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub seminorm: f64,
    pub c4: f64,
}

/// Seminorm of `f_δ □ g` on a fixed window, `f_δ` being the graph of `f`
/// rotated by `δ` about the origin (the common flat tangency point).
pub fn rotation_sweep(
    f: &SmoothFn,
    g: &SmoothFn,
    window: Interval,
    alpha: f64,
    deltas: &[f64],
    n: usize,
) -> Result<Vec<SweepRow>> {
    deltas
        .iter()
        .map(|&delta| {
            let fd = if delta == 0.0 { f.clone() } else { rotate_graph(f, delta)?.f_phi };
            let h = infconv_fn(&fd, g, window)?;
            let rep = holder_seminorm_with(&h, 4, alpha, window, n)?;
            Ok(SweepRow { delta, seminorm: rep.seminorm, c4: rep.sup })
        })
        .collect()
}
