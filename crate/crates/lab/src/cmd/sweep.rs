use std::path::Path;

use minkflat_core::boman::Schedule;
use minkflat_core::curve::{assemble_curve, rotations_avoiding_zero_sets, Assembly, Body, GaussZeroSet, SumBody};
use minkflat_core::experiment::{blowup_row, blowup_window, WINDOW_FACTOR};
use minkflat_core::func::{holder_seminorm_with, Interval, SmoothFn, HOLDER_GRID};
use minkflat_core::infconv::infconv_fn;
use minkflat_core::rotate::rotate_graph;
use rayon::prelude::*;
use serde_json::json;

use crate::config::Config;
use crate::error::LabError;
use crate::output::{Artifacts, Cell, Check};
use crate::specs::{boman_pair, hinge_schedule, schedule};

/// Local graphs of `A = C_f` and `B = C_g` over their common tangent at a
/// left endpoint, and the frame they live in.
pub struct Superimposed {
    pub f: SmoothFn,
    pub g: SmoothFn,
    pub base: (f64, f64),
    pub dir: f64,
}

/// `reach` is the furthest minimiser the window can call for. The profile is
/// untouched on the first `ε` past the joint, so `0.9 ε` keeps clear of the
/// bump.
pub fn superimpose(
    a: &Assembly,
    b: &Assembly,
    level: usize,
    index: usize,
    reach: f64,
) -> Result<Superimposed, LabError> {
    let ext = |asm: &Assembly| 0.9 * asm.curve.levels.get(level).map_or(0.0, |s| s.epsilon);
    let (ea, eb) = (ext(a), ext(b));
    if reach > ea.min(eb) {
        return Err(LabError::config(
            Some("k"),
            format!("window reaches {reach:e}, beyond the flat part {:e}", ea.min(eb)),
        ));
    }
    let f = a.curve.local_graph_at_left_end(level, index, ea)?;
    let g = b.curve.local_graph_at_left_end(level, index, eb)?;
    let (pa, da) =
        a.curve.left_end_frame(level, index).ok_or_else(|| LabError::config(Some("index"), "no such smoothing"))?;
    let (pb, db) =
        b.curve.left_end_frame(level, index).ok_or_else(|| LabError::config(Some("index"), "no such smoothing"))?;
    if (da - db).abs() > 1e-12 {
        return Err(LabError::Construction(format!("tangent directions differ: {da} vs {db}")));
    }
    Ok(Superimposed { f, g, base: (pa.0 + pb.0, pa.1 + pb.1), dir: da })
}

/// Largest gap between the support function of `A + B` and that of the
/// graph of `f □ g` placed in the shared frame, at the normals the graph
/// realises. Support values rather than points: on the near-flat valleys a
/// rounding-level change of normal slides the support point a long way.
pub fn local_graph_defect(a: &dyn Body, b: &dyn Body, sup: &Superimposed, h: &SmoothFn, xs: &[f64]) -> f64 {
    let sum = SumBody(a, b);
    let (s, c) = sup.dir.sin_cos();
    xs.iter()
        .map(|&x| {
            let j = h.jet(x, 1);
            let theta = sup.dir - std::f64::consts::FRAC_PI_2 + j.derivative(1).atan();
            let (lx, ly) = (x, j.value());
            let q = (sup.base.0 + c * lx - s * ly, sup.base.1 + s * lx + c * ly);
            (sum.support(theta).h - (q.0 * theta.cos() + q.1 * theta.sin())).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub delta: f64,
    pub seminorm: f64,
    pub c4: f64,
    pub zero_sets_meet: bool,
}

pub fn sweep(
    sup: &Superimposed,
    window: Interval,
    alpha: f64,
    deltas: &[f64],
    grid: usize,
    zero_sets: (&GaussZeroSet, &GaussZeroSet),
) -> Result<Vec<SweepPoint>, LabError> {
    deltas
        .par_iter()
        .map(|&delta| {
            let fd = if delta == 0.0 { sup.f.clone() } else { rotate_graph(&sup.f, delta)?.f_phi };
            let h = infconv_fn(&fd, &sup.g, window)?;
            let rep = holder_seminorm_with(&h, 4, alpha, window, grid)?;
            let zero_sets_meet = rotations_avoiding_zero_sets(zero_sets.0, zero_sets.1, &[delta]).is_empty();
            Ok(SweepPoint { delta, seminorm: rep.seminorm, c4: rep.sup, zero_sets_meet })
        })
        .collect()
}

/// Default small-angle threshold `3 b_k a_k³`.
pub fn default_threshold(s: &Schedule, k: usize) -> f64 {
    3.0 * s.b(k) * s.a(k).powi(3)
}

fn zero_set_from_json(path: &Path) -> Result<GaussZeroSet, LabError> {
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(path)?)?;
    let list = |k: &str| -> Result<Vec<f64>, LabError> {
        v["zero_set"][k]
            .as_array()
            .ok_or_else(|| LabError::config(None, format!("{}: no zero_set.{k}", path.display())))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| LabError::config(None, format!("{}: bad angle", path.display()))))
            .collect()
    };
    Ok(GaussZeroSet { z: list("z")?, e: list("e")? })
}

pub fn run(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Check>, LabError> {
    let s = schedule(cfg)?;
    let k: usize = cfg.get_or("k", 4)?;
    let level: usize = cfg.get_or("level", 0)?;
    let index: usize = cfg.get_or("index", 0)?;
    let factor: f64 = cfg.get_or("window_factor", WINDOW_FACTOR)?;
    let grid: usize = cfg.get_or("grid", HOLDER_GRID)?;
    let threshold: f64 = cfg.get_or("threshold", default_threshold(&s, k))?;
    let deltas = match cfg.list::<f64>("deltas")? {
        Some(d) => d,
        None => {
            let count: usize = cfg.get_or("delta_count", 4)?;
            let mut d = vec![0.0];
            for j in 1..=count {
                let x = threshold * j as f64 / count as f64;
                d.extend([-x, x]);
            }
            d
        }
    };
    let window = blowup_window(&s, k, factor);
    let pair = boman_pair(cfg)?;
    let sch = hinge_schedule(cfg, &pair)?;
    let (a, b) =
        rayon::join(|| assemble_curve(&sch, 0, sch.levels.len()), || assemble_curve(&sch, 1, sch.levels.len()));
    let (a, b) = (a?, b?);
    let za = match cfg.raw("curve_a") {
        Some(p) => zero_set_from_json(Path::new(p))?,
        None => a.zero_set.clone(),
    };
    let zb = match cfg.raw("curve_b") {
        Some(p) => zero_set_from_json(Path::new(p))?,
        None => b.zero_set.clone(),
    };
    // the minimiser moves no faster than x, so it stays within half-width of t_k
    let reach = (window.lo + window.hi) / 4.0 + (window.hi - window.lo) / 2.0;
    let sup = superimpose(&a, &b, level, index, reach)?;
    let points = sweep(&sup, window, s.alpha, &deltas, grid, (&za, &zb))?;
    let reference = blowup_row(&pair.0, &pair.1, &s, k, factor, grid)?.seminorm;
    let h0 = infconv_fn(&sup.f, &sup.g, window)?;
    let defect = local_graph_defect(&a.curve, &b.curve, &sup, &h0, &window.linspace(9));
    let at_zero = points.iter().find(|p| p.delta == 0.0).map(|p| p.seminorm);
    let rows = points.iter().map(|p| {
        let rel = at_zero.map_or(f64::NAN, |z| (p.seminorm - z).abs() / z);
        vec![Cell::from(p.delta), p.seminorm.into(), p.c4.into(), rel.into(), p.zero_sets_meet.into()]
    });
    art.csv("sweep.csv", &["delta", "seminorm", "c4", "rel_change", "zero_sets_meet"], rows)?;
    art.json(
        "sweep.json",
        &json!({
            "k": k, "level": level, "index": index, "window": [window.lo, window.hi],
            "threshold": threshold, "blowup_reference": reference, "local_graph_defect": defect,
            "n": sch.n, "gammas": sch.gammas,
        }),
    )?;
    let mut checks = vec![Check::at_most("support of A+B vs f□g in the tangent frame", defect, 1e-9)];
    if let Some(z) = at_zero {
        checks.push(Check::at_most("|seminorm(0) / blow-up reference - 1|", (z / reference - 1.0).abs(), 0.01));
        let cont = points
            .iter()
            .filter(|p| p.delta.abs() <= threshold)
            .map(|p| (p.seminorm - z).abs() / z)
            .fold(0.0, f64::max);
        checks.push(Check::at_most("max relative change for |δ| ≤ threshold", cont, 0.1));
    }
    Ok(checks)
}
