use minkflat_core::func::Interval;
use minkflat_core::infconv::{
    check_convex, derivative_columns, infconv_conjugate, infconv_direct, min_second_difference, InfConvResult,
};
use serde_json::json;

use crate::config::Config;
use crate::error::LabError;
use crate::output::{Artifacts, Cell, Check};
use crate::specs::function;

const HEADER: [&str; 7] = ["x", "h", "mu", "h_prime", "h_second", "j_mu", "boundary_flag"];

pub fn run(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Check>, LabError> {
    let f = function(cfg, "f")?;
    let g = function(cfg, "g")?;
    let (lo, hi) = cfg.pair("out")?.ok_or_else(|| LabError::config(Some("out"), "missing required key"))?;
    let out = Interval::new(lo, hi)?;
    let grid: usize = cfg.get_or("grid", 1025)?;
    if grid < 3 {
        return Err(LabError::config(Some("grid"), "need at least 3 points"));
    }
    let tol: f64 = cfg.get_or("tol", 1e-6)?;
    let route = cfg.raw("route").unwrap_or("direct");
    let routes: &[&str] = match route {
        "direct" => &["direct"],
        "conjugate" => &["conjugate"],
        "both" => &["direct", "conjugate"],
        other => return Err(LabError::config(Some("route"), format!("unknown route {other:?}"))),
    };
    check_convex(&f, 256, 1e-12)?;
    check_convex(&g, 256, 1e-12)?;
    let results: Vec<InfConvResult> = routes
        .iter()
        .map(|r| match *r {
            "direct" => infconv_direct(&f, &g, out, grid),
            _ => infconv_conjugate(&f, &g, out, grid),
        })
        .collect::<Result<_, _>>()?;
    let mut checks = Vec::new();
    for (name, r) in routes.iter().zip(&results) {
        let cols = derivative_columns(&f, &g, r);
        let rows = (0..r.xs.len()).map(|i| {
            let (d1, d2, j) = cols[i];
            vec![
                Cell::from(r.xs[i]),
                r.h[i].into(),
                r.mu[i].into(),
                d1.into(),
                d2.into(),
                j.into(),
                r.boundary[i].into(),
            ]
        });
        art.csv(&format!("infconv_{name}.csv"), &HEADER, rows)?;
        checks.push(Check::at_least(&format!("{name}: min scaled second difference"), min_second_difference(r), -tol));
    }
    if let [a, b] = results.as_slice() {
        let dev = a.sup_diff(b);
        art.json("route_diff.json", &json!({ "max_deviation": dev, "tol": tol, "samples": a.xs.len() }))?;
        checks.push(Check::at_most("direct vs conjugate sup deviation", dev, tol));
    }
    Ok(checks)
}
