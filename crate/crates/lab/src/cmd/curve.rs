use std::f64::consts::TAU;

use minkflat_core::curve::{assemble_curve, theta_of, Assembly, SupportFn, ANGLE_GRID};
use minkflat_core::hinge::HingeSchedule;
use rayon::prelude::*;
use serde_json::json;

use crate::config::Config;
use crate::error::LabError;
use crate::output::{Artifacts, Cell, Check};
use crate::specs::{boman_pair, hinge_schedule};

pub fn profile_index(cfg: &Config) -> Result<usize, LabError> {
    match cfg.raw("profile").unwrap_or("f") {
        "f" => Ok(0),
        "g" => Ok(1),
        other => Err(LabError::config(Some("profile"), format!("expected f or g, got {other:?}"))),
    }
}

/// Support function on `n` angles, evaluated in parallel.
pub fn sample_support(asm: &Assembly, n: usize) -> SupportFn {
    SupportFn::from_samples((0..n).into_par_iter().map(|j| asm.curve.support_at(theta_of(j, n))).collect())
}

pub fn checks(asm: &Assembly, sch: &HingeSchedule) -> Result<Vec<Check>, LabError> {
    let c = &asm.curve;
    let ch = c.checks();
    let cell = TAU / ANGLE_GRID as f64;
    let (z_to_model, model_to_z) = c.zero_set_agreement()?;
    let worst_monotone = asm.monotone.iter().map(|r| r.worst).fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![
        Check::at_most("total turning - 2π", (ch.total_turning - TAU).abs(), 1e-6),
        Check::at_least("min normalised cross product", ch.min_cross, -1e-9),
        Check::flag("gauss angle monotone", ch.gauss_monotone),
        Check::at_most("closure gap / diameter", ch.closure_gap / ch.diameter, 1e-9),
        Check::at_most("symmetry defect / diameter", ch.symmetry_defect / ch.diameter, 1e-9),
        Check::flag("symmetry order is 2n", c.symmetry_order == 2 * sch.n),
        Check::at_most("zero angle to Cantor endpoint", z_to_model, cell),
        Check::at_most("Cantor endpoint to zero angle", model_to_z, cell),
        Check::at_most("max (h_m - h_{m+1})", worst_monotone, 0.0),
        Check::at_most("left endpoints off the zero set", asm.zero_set.e_in_z(), 0.0),
    ])
}

pub fn run(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Check>, LabError> {
    let p = profile_index(cfg)?;
    let grid: usize = cfg.get_or("grid", 4096)?;
    if grid < 4 {
        return Err(LabError::config(Some("grid"), "need at least 4 angles"));
    }
    let pair = boman_pair(cfg)?;
    let sch = hinge_schedule(cfg, &pair)?;
    let asm = assemble_curve(&sch, p, sch.levels.len())?;
    let c = &asm.curve;
    let spec = c.cantor_spec()?;
    art.json(
        "curve.json",
        &json!({
            "vertices": c.points.iter().map(|p| [p.0, p.1]).collect::<Vec<_>>(),
            "gauss_angle": c.gauss_angle,
            "curvature": c.curvature,
            "flat_marks": c.flat_marks,
            "symmetry_order": c.symmetry_order,
            "n": c.n,
            "gammas": c.gammas,
            "d": sch.d,
            "cantor_spec": { "base": [spec.base.0, spec.base.1], "ratios": spec.ratios },
            "zero_set": { "z": asm.zero_set.z, "e": asm.zero_set.e },
            "monotone": asm.monotone.iter().map(|r| json!({ "m": r.m, "worst": r.worst, "max_curvature": r.max_curvature })).collect::<Vec<_>>(),
        }),
    )?;
    let sf = sample_support(&asm, grid);
    let rows = (0..grid).map(|j| vec![Cell::from(sf.theta(j)), sf.h[j].into(), sf.dh[j].into(), sf.d2h(j).into()]);
    art.csv("support.csv", &["theta", "h", "h_prime", "h_second"], rows)?;
    checks(&asm, &sch)
}
