//! Quadrature rules.

/// Composite Simpson rule with `n` (rounded up to even) subintervals.
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Eight-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        s += w * f(m + r * x);
    }
    s * r
}

/// Returns `(∫_a^x f, ∫_a^x (x - s) f(s) ds)` by one Gauss–Legendre panel.
pub fn first_and_second_integral<F: FnMut(f64) -> f64>(mut f: F, a: f64, x: f64) -> (f64, f64) {
    let m = 0.5 * (a + x);
    let r = 0.5 * (x - a);
    let (mut i1, mut i2) = (0.0, 0.0);
    for (t, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        let s = m + r * t;
        let v = w * f(s);
        i1 += v;
        i2 += v * (x - s);
    }
    (i1 * r, i2 * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 4);
        assert!((v - (15.0 / 4.0 - 3.0 + 3.0)).abs() < 1e-13);
    }

    #[test]
    fn simpson_error_is_fourth_order() {
        let exact = 1.0 - libm::cos(1.0);
        let e1 = (simpson(libm::sin, 0.0, 1.0, 16) - exact).abs();
        let e2 = (simpson(libm::sin, 0.0, 1.0, 32) - exact).abs();
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn gauss_legendre_integrates_degree_15() {
        let v = gauss_legendre(|x| libm::pow(x, 15.0), 0.0, 1.0);
        assert!((v - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn weighted_second_integral() {
        // ∫_0^1 (1 - s) s ds = 1/6
        let (i1, i2) = first_and_second_integral(|s| s, 0.0, 1.0);
        assert!((i1 - 0.5).abs() < 1e-15);
        assert!((i2 - 1.0 / 6.0).abs() < 1e-15);
    }
}
