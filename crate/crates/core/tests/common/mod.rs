//! Independent oracles and statistics shared by the integration tests.
//! Nothing here calls into the library's numerics.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Adaptive Simpson on `[a, b]` to absolute tolerance `eps`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, eps, 50)
}

/// Simpson over consecutive panels `[x_i, x_{i+1}]`.
pub fn simpson_panels<F: Fn(f64) -> f64>(f: &F, edges: &[f64], eps: f64) -> f64 {
    edges.windows(2).map(|w| simpson(f, w[0], w[1], eps)).sum()
}

/// `sum_k (-1)^k (x/2)^{2k} / (k!)^2`, accurate for |x| <~ 12.
pub fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..200 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && k > 5 {
            break;
        }
    }
    sum
}

/// `(1/pi) int_0^pi cos(x sin t) dt` by the trapezoid rule, which converges
/// geometrically for this periodic integrand.
pub fn j0_trapezoid(x: f64) -> f64 {
    let m = 400;
    let h = PI / m as f64;
    let mut s = 0.5 * (1.0 + (x * PI.sin()).cos());
    for i in 1..m {
        s += (x * (i as f64 * h).sin()).cos();
    }
    s * h / PI
}

/// `sum_k (x/2)^{2k} / (k!)^2`; all terms positive so no cancellation.
pub fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..2000 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// `K1(x) = int_0^inf exp(-x cosh t) cosh t dt`.
pub fn k1_integral(x: f64) -> f64 {
    // integrand below e^-745 once x cosh t > 745
    let t_max = (760.0 / x).acosh();
    let f = |t: f64| (-x * t.cosh()).exp() * t.cosh();
    let n = 64;
    let edges: Vec<f64> = (0..=n).map(|i| t_max * i as f64 / n as f64).collect();
    // relative accuracy: scale tolerance by a cheap magnitude estimate
    let scale = simpson_panels(&f, &edges, 1e-6).abs();
    simpson_panels(&f, &edges, 1e-13 * scale / n as f64)
}

/// `Q(x) = int_x^inf phi(t) dt` by quadrature of the normal density.
pub fn q_integral(x: f64) -> f64 {
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
    if x >= 0.0 {
        let edges: Vec<f64> = (0..=40).map(|i| x + i as f64 * 0.5).collect();
        simpson_panels(&phi, &edges, 1e-17)
    } else {
        1.0 - q_integral(-x)
    }
}

/// Two-sided KS distance between a sample and a continuous CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Upper 1% point of chi-square with `df` degrees of freedom
/// (Wilson-Hilferty).
pub fn chi2_crit_1pct(df: f64) -> f64 {
    let z = 2.326_347_874_040_841;
    let c = 2.0 / (9.0 * df);
    df * (1.0 - c + z * c.sqrt()).powi(3)
}

/// Exact binomial coefficient by the multiplicative formula in u128.
pub fn choose(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * u128::from(n - i) / u128::from(i + 1);
    }
    r
}

pub fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}
