use minkflat_core::hinge::smoothing_report;
use serde_json::json;

use crate::config::Config;
use crate::error::LabError;
use crate::output::{Artifacts, Check};
use crate::specs::function;

pub fn run(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Check>, LabError> {
    let mut cfg = cfg.clone();
    if cfg.raw("profile").is_none() {
        cfg.set("profile", "boman:quadratic");
    }
    let f = function(&cfg, "profile")?;
    let d: f64 = cfg.require("d")?;
    let gamma: f64 = cfg.require("gamma")?;
    let grid: usize = cfg.get_or("grid", 257)?;
    if grid < 2 {
        return Err(LabError::config(Some("grid"), "need at least 2 points"));
    }
    let r = smoothing_report(&f, d, gamma)?;
    let xs: Vec<f64> = (0..grid).map(|i| -d + 2.0 * d * i as f64 / (grid - 1) as f64).collect();
    let jets: Vec<_> = xs.iter().map(|&x| r.f.jet(x, 2)).collect();
    let certs: Vec<_> = r
        .certificates
        .iter()
        .map(|c| json!({ "name": c.name, "measured": c.measured, "bound": c.bound, "pass": c.pass }))
        .collect();
    art.json(
        "hinge.json",
        &json!({
            "parameters": {
                "d": d, "gamma": gamma, "epsilon": r.epsilon, "b_eps": r.b_eps,
                "x_l": r.x_l, "x_r": r.x_r, "right_offset": r.right_offset,
                "hinge_out": { "l": r.hinge_out.l, "r": r.hinge_out.r, "alpha": r.hinge_out.alpha },
            },
            "certificates": certs,
            "grid": {
                "x": xs,
                "F": jets.iter().map(|j| j.value()).collect::<Vec<_>>(),
                "F_prime": jets.iter().map(|j| j.derivative(1)).collect::<Vec<_>>(),
                "F_second": jets.iter().map(|j| j.derivative(2)).collect::<Vec<_>>(),
            },
        }),
    )?;
    Ok(r.certificates
        .iter()
        .map(|c| Check { name: c.name.into(), measured: c.measured, bound: c.bound, pass: c.pass })
        .collect())
}
