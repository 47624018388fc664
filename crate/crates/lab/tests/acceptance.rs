//! One line per acceptance criterion. Runs without the libtest harness so
//! the lines come out in order; exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use minkflat::cmd::curve::checks as curve_checks;
use minkflat::cmd::sweep::{default_threshold, local_graph_defect, superimpose, sweep};
use minkflat::config::Config;
use minkflat::specs::{boman_pair, hinge_schedule, schedule};
use minkflat_core::boman::{t, BomanOutput, Schedule};
use minkflat_core::cantor::{
    avoiding_angles, build_cantor, circle_set, difference, exact_angle_grid, sum_sets, CantorSpec, Exact,
};
use minkflat_core::curve::{
    angle_grid, assemble_curve, curvature_transfer_check, rotations_avoiding_zero_sets, Assembly, Body, Rotated,
};
use minkflat_core::error::Error as CoreError;
use minkflat_core::experiment::{blowup_table, blowup_window, longest_increasing_run, BlowupRow, WINDOW_FACTOR};
use minkflat_core::func::{library, Interval, SmoothFn, HOLDER_GRID};
use minkflat_core::hinge::smoothing_report;
use minkflat_core::infconv::{infconv_conjugate, infconv_direct, infconv_fn, smoothness_diag};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 0x6d696e6b;
const BLOWUP_KS: [usize; 5] = [1, 2, 3, 4, 5];
const SWEEP_K: usize = 4;

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

fn cfg(text: &str) -> Config {
    Config::parse(text).unwrap()
}

fn sched() -> Schedule {
    schedule(&Config::default()).unwrap()
}

fn pair() -> &'static (BomanOutput, BomanOutput) {
    static P: OnceLock<(BomanOutput, BomanOutput)> = OnceLock::new();
    P.get_or_init(|| boman_pair(&Config::default()).unwrap())
}

fn blowup() -> &'static Vec<BlowupRow> {
    static R: OnceLock<Vec<BlowupRow>> = OnceLock::new();
    R.get_or_init(|| blowup_table(&pair().0, &pair().1, &sched(), &BLOWUP_KS).unwrap())
}

/// Curve from the full six-level schedule.
fn deep_curve() -> &'static Result<(Assembly, usize), String> {
    static C: OnceLock<Result<(Assembly, usize), String>> = OnceLock::new();
    C.get_or_init(|| {
        let sch = hinge_schedule(&Config::default(), pair()).map_err(|e| e.to_string())?;
        let asm = assemble_curve(&sch, 0, sch.levels.len()).map_err(|e| e.to_string())?;
        Ok((asm, sch.n))
    })
}

/// `C_f` and `C_g` from a three-level schedule.
fn shallow_pair() -> &'static (Assembly, Assembly) {
    static C: OnceLock<(Assembly, Assembly)> = OnceLock::new();
    C.get_or_init(|| {
        let sch = hinge_schedule(&cfg("curve.levels = 3"), pair()).unwrap();
        let (a, b) = rayon::join(|| assemble_curve(&sch, 0, 3), || assemble_curve(&sch, 1, 3));
        (a.unwrap(), b.unwrap())
    })
}

fn sup_err(xs: &[f64], h: &[f64], exact: impl Fn(f64) -> f64) -> f64 {
    xs.iter().zip(h).map(|(&x, &v)| (v - exact(x)).abs()).fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let q = library::quadratic(iv(-3.0, 3.0), 2.0);
    let r = library::quadratic(iv(-3.0, 3.0), 4.0);
    let out = iv(-1.0, 1.0);
    let d = infconv_direct(&q, &r, out, 1025).map_err(|e| e.to_string())?;
    let c = infconv_conjugate(&q, &r, out, 1025).map_err(|e| e.to_string())?;
    let exact = |x: f64| 2.0 * x * x / 3.0;
    let (ed, ec) = (sup_err(&d.xs, &d.h, exact), sup_err(&c.xs, &c.h, exact));
    let msg = format!("direct {ed:.2e}, conjugate {ec:.2e} (bound 1e-6)");
    if ed <= 1e-6 && ec <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// `c0 + c1 x + c2 x² + c3 x³ + c4 x⁴` with `f'' ≥ c2 > 0` on `[-2, 2]`.
fn random_convex(rng: &mut ChaCha8Rng) -> SmoothFn {
    let c4: f64 = rng.gen_range(0.0..1.0);
    let c3: f64 = rng.gen_range(-0.3..0.3);
    // f'' = 2c2 + 6c3 x + 12c4 x² ≥ 2c2 - 12|c3| on [-2, 2]
    let c2 = 6.0 * c3.abs() + rng.gen_range(0.2..2.0);
    let coeffs = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), c2, c3, c4];
    library::polynomial(iv(-2.0, 2.0), coeffs)
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (f, g) = (random_convex(&mut rng), random_convex(&mut rng));
        let out = iv(-1.5, 1.5);
        let d = infconv_direct(&f, &g, out, 513).map_err(|e| e.to_string())?;
        let c = infconv_conjugate(&f, &g, out, 513).map_err(|e| e.to_string())?;
        worst = worst.max(d.sup_diff(&c));
    }
    let (f, g) = (&pair().0.f, &pair().1.f);
    let out = iv(2.0 * t(5), 2.0 * t(1));
    let d = infconv_direct(f, g, out, 513).map_err(|e| e.to_string())?;
    let c = infconv_conjugate(f, g, out, 513).map_err(|e| e.to_string())?;
    let boman = d.sup_diff(&c);
    let msg = format!("20 random pairs {worst:.2e}, Boman pair {boman:.2e} (bound 1e-6)");
    if worst <= 1e-6 && boman <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_3() -> Outcome {
    let dom = iv(-2.0, 2.0);
    let pairs: Vec<(&str, SmoothFn, SmoothFn, Interval)> = vec![
        ("x²/2 □ x²", library::quadratic(dom, 1.0), library::quadratic(dom, 2.0), iv(-1.5, 1.5)),
        (
            "x² + x⁴ □ 3x²/2",
            library::polynomial(dom, vec![0.0, 0.0, 1.0, 0.0, 1.0]),
            library::quadratic(dom, 3.0),
            iv(-1.5, 1.5),
        ),
        (
            "x⁴/4 + x²/8 □ cubic",
            library::polynomial(dom, vec![0.0, 0.0, 0.125, 0.0, 0.25]),
            library::polynomial(dom, vec![0.3, -0.2, 1.0, 0.1, 0.0]),
            iv(-1.0, 1.0),
        ),
        (
            "x⁶/6 + x/2 □ x²",
            library::polynomial(dom, vec![0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 1.0 / 6.0]),
            library::quadratic(dom, 2.0),
            iv(-1.5, 1.5),
        ),
        ("Boman f □ g", pair().0.f.clone(), pair().1.f.clone(), iv(2.0 * t(4), 2.0 * t(1))),
    ];
    let mut worst = 0.0f64;
    let mut count = 0;
    for (name, f, g, out) in &pairs {
        for x in out.linspace(200) {
            let d = smoothness_diag(f, g, x).map_err(|e| format!("{name} at {x}: {e}"))?;
            worst = worst.max(d.identity_residual());
            count += 1;
        }
    }
    let msg = format!("{count} points on 5 pairs, worst relative residual {worst:.2e} (bound 1e-6)");
    if worst <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_4() -> Outcome {
    let mut slope = 0.0f64;
    let mut alpha_ok = true;
    for o in [&pair().0, &pair().1] {
        slope = slope.max(o.max_slope_residual());
        alpha_ok &= o.alpha.iter().skip(o.k0).all(|&a| a > 0.0);
    }
    // log-spaced points over twelve octaves
    let psi = &pair().0.psi;
    let pou = (0..1000)
        .map(|i| psi.partition_residual((-12.0 + 12.0 * i as f64 / 999.0).exp2() * 3.0).abs())
        .fold(0.0, f64::max);
    let msg = format!("max |f'(t_k) - b_k| {slope:.2e}, α_k > 0 past K: {alpha_ok}, partition residual {pou:.2e}");
    if slope <= 1e-8 && alpha_ok && pou < 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_5() -> Outcome {
    let s = sched();
    let ks = *BLOWUP_KS.first().unwrap()..=*BLOWUP_KS.last().unwrap();
    s.validate_hypothesis(ks).map_err(|e| e.to_string())?;
    let rows = blowup();
    let run = longest_increasing_run(rows);
    let finite = rows.iter().all(|r| r.c4.is_finite() && r.seminorm.is_finite());
    let semi: Vec<String> = rows.iter().map(|r| format!("{:.0}", r.seminorm)).collect();
    let msg = format!("seminorms [{}], increasing run {run}, C4 finite: {finite}", semi.join(", "));
    if run >= 4 && finite {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_6() -> Outcome {
    let f = &pair().0.f;
    let mut failed = Vec::new();
    for d in [0.01, 0.04, 0.16] {
        for gamma in [0.01, 0.03, 0.05] {
            let r = smoothing_report(f, d, gamma).map_err(|e| format!("d {d}, γ {gamma}: {e}"))?;
            failed.extend(r.failures().iter().map(|c| format!("d {d}, γ {gamma}: {}", c.name)));
        }
    }
    if failed.is_empty() {
        Ok("all certificates on d ∈ {0.01, 0.04, 0.16} × γ ∈ {0.01, 0.03, 0.05}".into())
    } else {
        Err(failed.join("; "))
    }
}

fn criterion_7() -> Outcome {
    let (asm, n) = deep_curve().as_ref().map_err(|e| e.clone())?;
    let sch = hinge_schedule(&Config::default(), pair()).map_err(|e| e.to_string())?;
    let checks = curve_checks(asm, &sch).map_err(|e| e.to_string())?;
    let failed: Vec<String> =
        checks.iter().filter(|c| !c.pass).map(|c| format!("{} = {:e}", c.name, c.measured)).collect();
    if failed.is_empty() {
        Ok(format!(
            "{} levels, n = {n}, {} checks incl. zero set vs Cantor spec within one cell",
            asm.curve.levels.len(),
            checks.len()
        ))
    } else {
        Err(failed.join("; "))
    }
}

/// Built depth for the covering spec: every step keeps sides of ratio 1/3.
const COVER_DEPTH: usize = 8;

fn criterion_8() -> Outcome {
    let c = build_cantor(&CantorSpec::<Exact>::middle_thirds(12)).map_err(|e| e.to_string())?;
    let diff = difference(&c, &c);
    let one = Exact::from_integer(1);
    let middle = diff.covers(&-one, &one).covered;
    // O_1 on [0, π/n] for the n of the assembled curve, in units of π
    let (asm, n) = deep_curve().as_ref().map_err(|e| e.clone())?;
    let base = asm.curve.cantor_spec().map_err(|e| e.to_string())?.base;
    if base.0 != 0.0 || (base.1 - PI / *n as f64).abs() > 1e-12 {
        return Err(format!("curve spec base {base:?} is not [0, π/n]"));
    }
    let spec =
        CantorSpec::with_remaining((Exact::from_integer(0), Exact::new(1, *n as i128)), Exact::new(1, 3), COVER_DEPTH)
            .map_err(|e| e.to_string())?;
    let (exact, o) = circle_set(*n, spec.ratios).map_err(|e| e.to_string())?;
    let min_ratio = (0..exact.depth()).map(|i| exact.remaining(i)).min().unwrap_or(one);
    let two = Exact::from_integer(2);
    let covers = sum_sets(&o, &o).wrap(&two).covers(&Exact::from_integer(0), &two).covered;
    let free = avoiding_angles(&o, &o, &exact_angle_grid(10_000, &two), &two);
    let msg = format!(
        "C - C ⊇ [-1, 1] at depth 12: {middle}; n = {n}, depth {}, min remaining {min_ratio}, O + O ⊇ circle: {covers}, avoiding angles {} of 10000",
        exact.depth(),
        free.len()
    );
    if middle && min_ratio >= Exact::new(1, 3) && covers && free.is_empty() {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_9() -> Outcome {
    let (cf, cg) = (&shallow_pair().0.curve, &shallow_pair().1.curve);
    let a = Rotated(cf, 0.0123);
    let grid = angle_grid(1024);
    let flat = &shallow_pair().1.zero_set.z;
    let (mut add, mut checked, mut skipped, mut zeros) = (0.0f64, 0, 0, 0);
    for &th in grid.iter().chain(flat) {
        match curvature_transfer_check(&a, cg, th, 1e-6) {
            Ok(r) => {
                if !r.holds {
                    return Err(format!("κ transfer fails at θ = {th}: κ_B {:e}, κ_A+B {:e}", r.kappa_b, r.kappa_sum));
                }
                zeros += usize::from(r.kappa_b == 0.0);
                add = add.max(r.additivity_error());
                checked += 1;
            }
            Err(CoreError::Precondition(_)) => skipped += 1,
            Err(e) => return Err(e.to_string()),
        }
    }
    let msg = format!(
        "{checked} angles ({zeros} flat for C_g, {skipped} with κ_A ≤ 1e-6), ρ-additivity {add:.2e} (bound 1e-8)"
    );
    if add <= 1e-8 && zeros > 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_10() -> Outcome {
    let s = sched();
    let (a, b) = shallow_pair();
    let window = blowup_window(&s, SWEEP_K, WINDOW_FACTOR);
    let reach = (window.lo + window.hi) / 4.0 + (window.hi - window.lo) / 2.0;
    let sup = superimpose(a, b, 0, 0, reach).map_err(|e| e.to_string())?;
    let h0 = infconv_fn(&sup.f, &sup.g, window).map_err(|e| e.to_string())?;
    let defect = local_graph_defect(&a.curve as &dyn Body, &b.curve, &sup, &h0, &window.linspace(9));
    let th = default_threshold(&s, SWEEP_K);
    let points = sweep(&sup, window, s.alpha, &[0.0, -th, th], HOLDER_GRID, (&a.zero_set, &b.zero_set))
        .map_err(|e| e.to_string())?;
    let reference = blowup().iter().find(|r| r.k == SWEEP_K).ok_or("no blow-up row")?.seminorm;
    let z = points[0].seminorm;
    let rel = (z / reference - 1.0).abs();
    let cont = points.iter().map(|p| (p.seminorm - z).abs() / z).fold(0.0, f64::max);
    let meets = rotations_avoiding_zero_sets(&a.zero_set, &b.zero_set, &[0.0]).is_empty();
    let msg = format!(
        "k = {SWEEP_K}: seminorm {z:.1} vs blow-up {reference:.1} ({rel:.1e}), max change {cont:.1e} over |δ| ≤ {th:.2e}, frame defect {defect:.1e}"
    );
    if rel <= 0.01 && cont < 0.1 && defect <= 1e-9 && meets {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    // `cargo test -- --list` and filters are not meaningful here
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let criteria: [Criterion; 10] = [
        ("closed-form infimal convolution", criterion_1),
        ("route equivalence", criterion_2),
        ("gradient and Hessian identities", criterion_3),
        ("Boman construction", criterion_4),
        ("blow-up reproduction", criterion_5),
        ("hinge certificates", criterion_6),
        ("curve assembly", criterion_7),
        ("Cantor covering", criterion_8),
        ("curvature transfer", criterion_9),
        ("rotation sweep", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let slow = took > Duration::from_secs(120);
        let (tag, msg) = match &res {
            Ok(m) if !slow => ("pass", m.as_str()),
            Ok(m) => ("FAIL (over two minutes)", m.as_str()),
            Err(m) => ("FAIL", m.as_str()),
        };
        failures += usize::from(tag != "pass");
        println!("criterion {:2} {name}: {tag}: {msg} [{:.1} s]", i + 1, took.as_secs_f64());
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria pass");
}
