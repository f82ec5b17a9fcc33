use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Above this |x| the Hankel asymptotic expansion replaces the power series
/// for J0. Both branches agree to ~1e-12 here.
const J0_SERIES_LIMIT: f64 = 12.0;

/// Above this x the I0 power series is replaced by its asymptotic expansion.
const I0_SERIES_LIMIT: f64 = 30.0;

/// Series-with-log region for K1; Steed's continued fraction beyond.
const K1_SERIES_LIMIT: f64 = 2.0;

const MAX_TERMS: usize = 500;

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("bessel_j0", format!("non-finite argument {x}")));
    }
    let ax = x.abs();
    if ax <= J0_SERIES_LIMIT {
        Ok(j0_series(ax))
    } else {
        Ok(j0_asymptotic(ax))
    }
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && kf * kf > q.abs() {
            break;
        }
    }
    sum
}

/// Hankel expansion `sqrt(2/(pi x)) (P cos chi - Q sin chi)`, summed up to
/// the smallest term.
fn j0_asymptotic(x: f64) -> f64 {
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    for k in 1..MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        let next = term * (-(odd * odd)) / (k as f64 * eight_x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        // t_k contributes to P for even k and to Q for odd k, with
        // alternating signs inside each series.
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Modified Bessel function of the first kind, order zero, for `x >= 0`.
pub fn bessel_i0(x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("bessel_i0", format!("argument must be finite and non-negative, got {x}")));
    }
    let value = if x <= I0_SERIES_LIMIT { i0_series(x) } else { i0_asymptotic(x) };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::range("bessel_i0", format!("I0({x}) overflows")))
    }
}

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

fn i0_asymptotic(x: f64) -> f64 {
    let eight_x = 8.0 * x;
    let mut term = 1.0_f64;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        let next = term * odd * odd / (k as f64 * eight_x);
        if next >= term || next < 1e-17 * sum {
            break;
        }
        term = next;
        sum += term;
    }
    // Split the exponential so that values just below f64::MAX survive.
    let half = (0.5 * x).exp();
    half * (half / (2.0 * PI * x).sqrt()) * sum
}

/// I1 by its power series; used only inside the K1 small-argument branch.
fn i1_series(x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = half;
    let mut sum = half;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// `sum_k (psi(k+1) + psi(k+2)) (x^2/4)^k / (k! (k+1)!)`, the digamma series
/// appearing in the small-argument expansion of K1.
fn k1_digamma_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    // psi(1) = -gamma, psi(2) = 1 - gamma
    let mut harmonic_k = 0.0;
    let mut harmonic_k1 = 1.0;
    let mut weight = 1.0;
    let mut sum = 1.0 - 2.0 * EULER_GAMMA;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        weight *= q / (kf * (kf + 1.0));
        harmonic_k += 1.0 / kf;
        harmonic_k1 += 1.0 / (kf + 1.0);
        let term = weight * (harmonic_k + harmonic_k1 - 2.0 * EULER_GAMMA);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Modified Bessel function of the second kind, order one, for `x > 0`.
///
/// Underflows to exactly zero for very large arguments (`x > ~705`).
pub fn bessel_k1(x: f64) -> Result<f64> {
    check_k1_arg("bessel_k1", x)?;
    if x <= K1_SERIES_LIMIT {
        Ok(1.0 / x + (0.5 * x).ln() * i1_series(x) - 0.25 * x * k1_digamma_series(x))
    } else {
        Ok(k1_scaled_cf(x) * (-x).exp())
    }
}

/// `exp(x) K1(x)`, finite for every positive argument.
pub fn bessel_k1_scaled(x: f64) -> Result<f64> {
    check_k1_arg("bessel_k1_scaled", x)?;
    if x <= K1_SERIES_LIMIT {
        Ok(x.exp() * bessel_k1(x)?)
    } else {
        Ok(k1_scaled_cf(x))
    }
}

/// `1 - x K1(x)` without the cancellation of the direct form as `x -> 0`.
///
/// Defined at `x = 0` by continuity (value 0). Panics in debug builds on
/// negative input.
pub fn one_minus_x_k1(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "one_minus_x_k1 needs x >= 0");
    if x == 0.0 {
        0.0
    } else if x <= K1_SERIES_LIMIT {
        -x * (0.5 * x).ln() * i1_series(x) + 0.25 * x * x * k1_digamma_series(x)
    } else {
        1.0 - x * k1_scaled_cf(x) * (-x).exp()
    }
}

fn check_k1_arg(op: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("argument must be positive and finite, got {x}")))
    }
}

/// Steed's continued fraction (CF2) for `exp(x) K1(x)`, valid for x >~ 2.
fn k1_scaled_cf(x: f64) -> f64 {
    const EPS: f64 = 1e-16;
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0_scaled = (PI / (2.0 * x)).sqrt() / s;
    k0_scaled * (x + 0.5 - h) / x
}
