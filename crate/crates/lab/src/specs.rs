//! Constructions shared by several subcommands, read from the config.

use minkflat_core::boman::{build_boman, BomanOutput, Schedule};
use minkflat_core::func::{library, Interval, SmoothFn, DEFAULT_MAX_ORDER};
use minkflat_core::hinge::{schedule_smoothings, HingeSchedule, ScheduleConfig};

use crate::config::Config;
use crate::error::LabError;

pub const DEFAULT_K_MAX: usize = 7;
pub const DEFAULT_D0: f64 = 0.16;
pub const DEFAULT_LEVELS: usize = 6;

pub fn schedule(cfg: &Config) -> Result<Schedule, LabError> {
    let d = Schedule::default();
    let s = Schedule {
        q: cfg.get_or("schedule.q", d.q)?,
        a_scale: cfg.get_or("schedule.a_scale", d.a_scale)?,
        alpha: cfg.get_or("schedule.alpha", d.alpha)?,
        depth: cfg.get_or("schedule.depth", d.depth)?,
    };
    if !(s.q > 0.0) {
        return Err(LabError::config(Some("schedule.q"), "must be positive"));
    }
    if !(s.a_scale > 0.0 && s.a_scale < 0.5) {
        return Err(LabError::config(Some("schedule.a_scale"), "must lie in (0, 1/2)"));
    }
    if !(s.alpha > 0.0 && s.alpha < 1.0) {
        return Err(LabError::config(Some("schedule.alpha"), "must lie in (0, 1)"));
    }
    Ok(s)
}

pub fn k_max(cfg: &Config) -> Result<usize, LabError> {
    let k = cfg.get_or("boman.k_max", DEFAULT_K_MAX)?;
    if !(1..=12).contains(&k) {
        return Err(LabError::config(Some("boman.k_max"), "must lie in 1..=12"));
    }
    Ok(k)
}

/// `(f, g)` built on the quadratic and quartic model families.
pub fn boman_pair(cfg: &Config) -> Result<(BomanOutput, BomanOutput), LabError> {
    let s = schedule(cfg)?;
    let k = k_max(cfg)?;
    let (f, g) = rayon::join(|| build_boman(&s.quadratic_input(), k), || build_boman(&s.quartic_input(), k));
    Ok((f?, g?))
}

/// A function from its tag at `key` and its domain at `key.domain`:
/// `quadratic:a` (a x²/2), `poly:c0,c1,…`, `exp_flat`, `boman:quadratic`,
/// `boman:quartic`.
pub fn function(cfg: &Config, key: &str) -> Result<SmoothFn, LabError> {
    let tag: String = cfg.require(key)?;
    let (kind, arg) = tag.split_once(':').map_or((tag.as_str(), ""), |(a, b)| (a.trim(), b.trim()));
    let dom_key = format!("{key}.domain");
    let domain = |default: (f64, f64)| -> Result<Interval, LabError> {
        let (lo, hi) = cfg.pair(&dom_key)?.unwrap_or(default);
        Interval::new(lo, hi).map_err(|e| LabError::config(Some(&dom_key), e.to_string()))
    };
    let num = |s: &str| s.parse::<f64>().map_err(|e| LabError::config(Some(key), format!("cannot parse {s:?}: {e}")));
    match kind {
        "quadratic" => Ok(library::quadratic(domain((-2.0, 2.0))?, num(arg)?)),
        "poly" => {
            let coeffs = arg.split(',').map(|s| num(s.trim())).collect::<Result<Vec<_>, _>>()?;
            Ok(library::polynomial(domain((-2.0, 2.0))?, coeffs))
        }
        "exp_flat" => Ok(library::exp_flat(domain((0.0, 0.5))?, DEFAULT_MAX_ORDER)),
        "boman" => {
            let s = schedule(cfg)?;
            let input = match arg {
                "quadratic" => s.quadratic_input(),
                "quartic" => s.quartic_input(),
                other => return Err(LabError::config(Some(key), format!("unknown Boman family {other:?}"))),
            };
            let f = build_boman(&input, k_max(cfg)?)?.f;
            match cfg.pair(&dom_key)? {
                Some((lo, hi)) => Ok(f.restrict(Interval::new(lo, hi)?)?),
                None => Ok(f),
            }
        }
        other => Err(LabError::config(Some(key), format!("unknown function kind {other:?}"))),
    }
}

/// Level widths `d_m = d0 · ratio^m`.
pub fn level_widths(cfg: &Config) -> Result<Vec<f64>, LabError> {
    let d0: f64 = cfg.get_or("curve.d0", DEFAULT_D0)?;
    let ratio: f64 = cfg.get_or("curve.ratio", 0.25)?;
    let levels: usize = cfg.get_or("depth", cfg.get_or("curve.levels", DEFAULT_LEVELS)?)?;
    if !(1..=10).contains(&levels) {
        return Err(LabError::config(Some("curve.levels"), "must lie in 1..=10"));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(LabError::config(Some("curve.ratio"), "must lie in (0, 1)"));
    }
    if !(d0 > 0.0) {
        return Err(LabError::config(Some("curve.d0"), "must be positive"));
    }
    Ok((0..levels).map(|m| d0 * ratio.powi(m as i32)).collect())
}

pub fn schedule_config(cfg: &Config) -> Result<ScheduleConfig, LabError> {
    let d = ScheduleConfig::default();
    Ok(ScheduleConfig {
        gamma_start: cfg.get_or("smoothing.gamma_start", d.gamma_start)?,
        r_max: cfg.get_or("smoothing.r_max", d.r_max)?,
        cap_factor: cfg.get_or("smoothing.cap_factor", d.cap_factor)?,
        max_halvings: cfg.get_or("smoothing.max_halvings", d.max_halvings)?,
    })
}

/// Smoothing schedule shared by the two Boman profiles.
pub fn hinge_schedule(cfg: &Config, pair: &(BomanOutput, BomanOutput)) -> Result<HingeSchedule, LabError> {
    let d = level_widths(cfg)?;
    Ok(schedule_smoothings(&[pair.0.f.clone(), pair.1.f.clone()], &d, &schedule_config(cfg)?)?)
}
