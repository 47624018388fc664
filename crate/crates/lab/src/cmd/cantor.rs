use minkflat_core::cantor::{
    avoiding_angles, build_cantor, circle_set, difference, exact_angle_grid, sum_sets, CantorSpec, Coord, Exact,
    IntervalSet,
};
use serde_json::json;

use crate::config::Config;
use crate::error::LabError;
use crate::output::{Artifacts, Check};

fn exact_list(cfg: &Config, key: &str) -> Result<Option<Vec<Exact>>, LabError> {
    cfg.list::<Exact>(key)
}

fn exact_pair(cfg: &Config, key: &str) -> Result<Option<(Exact, Exact)>, LabError> {
    match exact_list(cfg, key)? {
        None => Ok(None),
        Some(v) if v.len() == 2 && v[0] < v[1] => Ok(Some((v[0], v[1]))),
        Some(_) => Err(LabError::config(Some(key), "expected `lo, hi` with lo < hi")),
    }
}

/// Ratios from `ratios`, or `ratio` repeated `depth` times.
fn ratios(cfg: &Config) -> Result<Vec<Exact>, LabError> {
    let depth: usize = cfg.get_or("depth", 8)?;
    match (exact_list(cfg, "ratios")?, cfg.get::<Exact>("ratio")?) {
        (Some(r), _) => Ok(r.into_iter().take(depth).collect()),
        (None, Some(r)) => Ok(vec![r; depth]),
        (None, None) => Ok(vec![Exact::new(1, 3); depth]),
    }
}

fn set_json(s: &IntervalSet<Exact>) -> serde_json::Value {
    json!({
        "depth": s.depth,
        "intervals": s.intervals().iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect::<Vec<_>>(),
        "intervals_f64": s.intervals().iter().map(|(a, b)| [a.to_f64(), b.to_f64()]).collect::<Vec<_>>(),
    })
}

pub fn run(cfg: &Config, art: &mut Artifacts) -> Result<Vec<Check>, LabError> {
    let op = cfg.raw("op").unwrap_or("difference");
    let mut checks = Vec::new();
    match op {
        "sum" | "difference" => {
            let base = exact_pair(cfg, "base")?.unwrap_or((Exact::from_integer(0), Exact::from_integer(1)));
            let spec = CantorSpec::new(base, ratios(cfg)?)?;
            let c = build_cantor(&spec)?;
            let out = if op == "sum" { sum_sets(&c, &c) } else { difference(&c, &c) };
            art.json("cantor.json", &json!({ "spec": { "base": [base.0.to_string(), base.1.to_string()], "ratios": spec.ratios.iter().map(|r| r.to_string()).collect::<Vec<_>>() }, "set": set_json(&c) }))?;
            art.json("result.json", &set_json(&out))?;
            if let Some((lo, hi)) = exact_pair(cfg, "target")? {
                let cov = out.covers(&lo, &hi);
                art.json("coverage.json", &json!({ "target": [lo.to_string(), hi.to_string()], "covered": cov.covered, "gaps": cov.gaps.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect::<Vec<_>>() }))?;
                checks.push(Check::flag("covers target", cov.covered));
            }
        }
        "circle" => {
            let n: usize = cfg.get_or("n", 2)?;
            if n < 1 {
                return Err(LabError::config(Some("n"), "need n ≥ 1"));
            }
            let (spec, o) = circle_set(n, ratios(cfg)?)?;
            let period = Exact::from_integer(2);
            let sum = sum_sets(&o, &o).wrap(&period);
            let cov = sum.covers(&Exact::from_integer(0), &period);
            let count: usize = cfg.get_or("count", 10_000)?;
            let grid = exact_angle_grid(count, &period);
            let free = avoiding_angles(&o, &o, &grid, &period);
            let min_remaining = (0..spec.depth()).map(|i| spec.remaining(i)).min();
            art.json(
                "circle.json",
                &json!({
                    "units": "pi",
                    "n": n,
                    "ratios": spec.ratios.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                    "set": set_json(&o),
                    "sum_mod_2": set_json(&sum),
                    "covered": cov.covered,
                    "avoiding_angles": free.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                    "angles_tested": count,
                }),
            )?;
            if let Some(s) = min_remaining {
                checks.push(Check::at_least("smallest remaining ratio", s.to_f64(), 1.0 / 3.0));
            }
            checks.push(Check::flag("O + O covers the circle", cov.covered));
            checks.push(Check::at_most("avoiding rotations found", free.len() as f64, 0.0));
        }
        other => return Err(LabError::config(Some("op"), format!("unknown op {other:?}"))),
    }
    Ok(checks)
}
