use minkflat_core::boman::t;
use minkflat_core::experiment::{blowup_row, longest_increasing_run, BlowupRow, WINDOW_FACTOR};
use minkflat_core::func::HOLDER_GRID;
use rayon::prelude::*;

use crate::config::Config;
use crate::error::LabError;
use crate::output::{Artifacts, Cell, Check};
use crate::specs::{boman_pair, k_max, schedule};

const HEADER: [&str; 11] = [
    "k",
    "t_k",
    "window_lo",
    "window_hi",
    "seminorm",
    "c4",
    "ratio",
    "f_slope_residual",
    "g_slope_residual",
    "root_residual",
    "increasing",
];

/// Rows for `ks`, after checking that `a_k^α / b_k` decreases over them.
pub fn table(cfg: &Config) -> Result<Vec<BlowupRow>, LabError> {
    let s = schedule(cfg)?;
    let km = k_max(cfg)?;
    let ks = cfg.indices("ks")?.unwrap_or_else(|| (1..=5.min(km)).collect());
    if ks.is_empty() || ks.windows(2).any(|w| w[1] <= w[0]) || ks[ks.len() - 1] > km || ks[0] == 0 {
        return Err(LabError::config(Some("ks"), format!("need increasing k in 1..={km}")));
    }
    let mut prev = f64::INFINITY;
    for &k in &ks {
        let r = s.hypothesis_ratio(k);
        if !(r < prev) {
            return Err(LabError::Hypothesis {
                message: format!("a_k^α / b_k = {r:e} does not decrease at k = {k}"),
                k: Some(k),
            });
        }
        prev = r;
    }
    let factor: f64 = cfg.get_or("window_factor", WINDOW_FACTOR)?;
    let grid: usize = cfg.get_or("grid", HOLDER_GRID)?;
    let pair = boman_pair(cfg)?;
    let rows: Vec<BlowupRow> =
        ks.par_iter().map(|&k| blowup_row(&pair.0, &pair.1, &s, k, factor, grid)).collect::<Result<_, _>>()?;
    Ok(rows)
}

pub fn run(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Check>, LabError> {
    let rows = table(cfg)?;
    let tol: f64 = cfg.get_or("tol", 1e-8)?;
    let csv_rows = rows.iter().enumerate().map(|(i, r)| {
        let up = i == 0 || r.seminorm > rows[i - 1].seminorm;
        vec![
            Cell::from(r.k),
            t(r.k).into(),
            r.window.lo.into(),
            r.window.hi.into(),
            r.seminorm.into(),
            r.c4.into(),
            r.ratio.into(),
            r.f_slope_residual.into(),
            r.g_slope_residual.into(),
            r.root_residual.into(),
            up.into(),
        ]
    });
    art.csv("blowup.csv", &HEADER, csv_rows)?;
    let worst = rows.iter().map(|r| r.f_slope_residual.abs().max(r.g_slope_residual.abs())).fold(0.0, f64::max);
    Ok(vec![
        Check::at_least("longest strictly increasing run", longest_increasing_run(&rows) as f64, rows.len() as f64),
        Check::flag("C4 control finite", rows.iter().all(|r| r.c4.is_finite())),
        Check::at_most("max |f'(t_k) - b_k|", worst, tol),
    ])
}
