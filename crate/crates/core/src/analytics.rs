//! Closed-form distribution and error-rate results for the selected relay.
//!
//! Notation follows the link budget: `a = rho_e / a~` and `b = rho_e / b~`
//! where `a~`, `b~` weight the two estimated gains in the high-SNR SNR
//! `a~ g1 b~ g2 / (a~ g1 + b~ g2)`.
//!
//! The selection-time/transmission-time estimates of a link are jointly
//! Gaussian with correlation `rho_j`, so the gains are correlated
//! exponentials whose power correlation is `rho_j^2`. Every outdating
//! denominator below is therefore `(2n+1)(1 - rho_j^2) + 1`.

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::channel::link_correlation;
use crate::error::{Error, Result};
use crate::numerics::binomial_f64;
use crate::numerics::quadrature::{integrate, Tolerance};
use crate::numerics::{bessel_i0, bessel_k1_scaled, double_factorial_ratio, one_minus_x_k1};
use crate::transceiver::Modulation;

/// `SER = alpha * E[Q(sqrt(beta * gamma))]` constants of a modulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationConstants {
    pub alpha: f64,
    pub beta: f64,
}

pub fn modulation_constants(format: Modulation) -> Result<ModulationConstants> {
    format.validate()?;
    Ok(match format {
        Modulation::Bpsk => ModulationConstants { alpha: 1.0, beta: 2.0 },
        Modulation::Qpsk => ModulationConstants { alpha: 1.0, beta: 1.0 },
        Modulation::Mpsk(m) => {
            let bits = f64::from(m).log2();
            ModulationConstants { alpha: 1.0 / bits, beta: bits * (PI / f64::from(m)).sin().powi(2) }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticCoeffs {
    pub a: f64,
    pub b: f64,
    pub a_tilde: f64,
    pub b_tilde: f64,
}

impl AsymptoticCoeffs {
    /// The same coefficients seen from S2: `a` and `b` exchange roles.
    pub fn swapped(&self) -> Self {
        AsymptoticCoeffs { a: self.b, b: self.a, a_tilde: self.b_tilde, b_tilde: self.a_tilde }
    }
}

/// `(a~, b~)` without validation; callers guarantee positive inputs.
pub(crate) fn snr_weights(psi_s: f64, psi_r: f64, rho_e: f64) -> (f64, f64) {
    let re2 = rho_e * rho_e;
    let sd2 = 1.0 - rho_e;
    let a_tilde = psi_r * re2 * re2 / (1.0 + psi_r * re2 * sd2);
    let b_tilde = psi_r * psi_s * re2 * re2 / (5.0 * psi_r * psi_s * re2 * sd2 + psi_r * re2 + psi_s);
    (a_tilde, b_tilde)
}

pub fn asymptotic_coeffs(psi_s: f64, psi_r: f64, rho_e: f64) -> Result<AsymptoticCoeffs> {
    if !(psi_s > 0.0 && psi_s.is_finite() && psi_r > 0.0 && psi_r.is_finite()) {
        return Err(Error::domain(
            "asymptotic_coeffs",
            format!("psi_s = {psi_s}, psi_r = {psi_r} must be positive and finite"),
        ));
    }
    if !(rho_e > 0.0 && rho_e <= 1.0) {
        return Err(Error::domain("asymptotic_coeffs", format!("rho_e = {rho_e} outside (0, 1]")));
    }
    let re2 = rho_e * rho_e;
    let re3 = re2 * rho_e;
    let sd2 = 1.0 - rho_e;
    let a = (1.0 + psi_r * re2 * sd2) / (psi_r * re3);
    let b = (5.0 * psi_r * psi_s * re2 * sd2 + psi_r * re2 + psi_s) / (psi_r * psi_s * re3);
    Ok(AsymptoticCoeffs { a, b, a_tilde: rho_e / a, b_tilde: rho_e / b })
}

fn check_rho(op: &'static str, name: &str, rho: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rho) {
        Ok(())
    } else {
        Err(Error::domain(op, format!("{name} = {rho} outside [0, 1]")))
    }
}

/// `(2n+1)(1 - rho^2) + 1`
#[inline]
fn outdating_denominator(n: u32, rho: f64) -> f64 {
    f64::from(2 * n + 1) * (1.0 - rho * rho) + 1.0
}

/// `P(XY/(X+Y) <= z)` for independent exponentials of rates `alpha`, `beta`,
/// as the pair `(G, 1 - G)` with `1 - G = x exp(-(alpha+beta) z) K1(x)`,
/// `x = 2z sqrt(alpha beta)`. Both halves are computed without cancellation.
fn harmonic_exp_cdf(alpha: f64, beta: f64, z: f64) -> (f64, f64) {
    let x = 2.0 * z * (alpha * beta).sqrt();
    let s = (alpha + beta) * z;
    if x <= 2.0 {
        let defect = one_minus_x_k1(x);
        let tail = (1.0 - defect) * (-s).exp();
        (defect + (1.0 - defect) * -(-s).exp_m1(), tail)
    } else {
        let k1e = bessel_k1_scaled(x).expect("x > 2 is in the K1 domain");
        let tail = x * k1e * (-x - s).exp();
        (1.0 - tail, tail)
    }
}

/// CDF of the high-SNR SNR at S1 for `n` relays.
///
/// Double sum over `m, n < N` of four Bessel-K1 terms; `rho_1`, `rho_2` are
/// the combined estimate correlations of the two links.
pub fn cdf_gamma1(z: f64, n_relays: u32, coeffs: &AsymptoticCoeffs, rho_1: f64, rho_2: f64) -> Result<f64> {
    const OP: &str = "cdf_gamma1";
    if !(z >= 0.0) {
        return Err(Error::domain(OP, format!("z = {z} must be non-negative")));
    }
    if n_relays == 0 {
        return Err(Error::domain(OP, "need at least one relay"));
    }
    check_rho(OP, "rho_1", rho_1)?;
    check_rho(OP, "rho_2", rho_2)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    if z.is_infinite() {
        return Ok(1.0);
    }
    let (a, b) = (coeffs.a, coeffs.b);
    let big_n = n_relays;
    // The weights sum to one, so F = N^2 sum c_m c_n sum w G and
    // 1 - F = N^2 sum c_m c_n sum w (1 - G). The alternating binomials
    // amplify rounding; each form is accurate where its terms are small.
    let (mut cdf, mut survival) = (0.0, 0.0);
    for m in 0..big_n {
        let cm = binomial_f64(big_n - 1, m) * sign(m) / f64::from(2 * m + 1);
        let b_m = 2.0 * f64::from(m + 1) * b / outdating_denominator(m, rho_2);
        let wm = f64::from(m) / f64::from(m + 1);
        for n in 0..big_n {
            let cn = binomial_f64(big_n - 1, n) * sign(n) / f64::from(2 * n + 1);
            let a_n = 2.0 * f64::from(n + 1) * a / outdating_denominator(n, rho_1);
            let wn = f64::from(n) / f64::from(n + 1);
            // wn = 0 at n = 0 and wm = 0 at m = 0
            let terms = [(1.0, a, b), (wn, a_n, b), (wm, a, b_m), (wn * wm, a_n, b_m)];
            for (w, alpha, beta) in terms.into_iter().filter(|t| t.0 > 0.0) {
                let (g, tail) = harmonic_exp_cdf(alpha, beta, z);
                cdf += cm * cn * w * g;
                survival += cm * cn * w * tail;
            }
        }
    }
    let nn = f64::from(big_n * big_n);
    let f = if nn * cdf <= 0.5 { nn * cdf } else { 1.0 - nn * survival };
    clamp_probability(OP, f)
}

fn sign(k: u32) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn clamp_probability(op: &'static str, p: f64) -> Result<f64> {
    const RESIDUE: f64 = 1e-9;
    if !(p > -RESIDUE && p < 1.0 + RESIDUE) {
        return Err(Error::numeric(op, format!("probability {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// CDF of `|h_hat_s,1k|^2` at the selected relay.
pub fn marginal_cdf_selected_gain(x: f64, n_relays: u32, sigma2_hhat: f64) -> Result<f64> {
    const OP: &str = "marginal_cdf_selected_gain";
    if !(x >= 0.0) {
        return Err(Error::domain(OP, format!("x = {x} must be non-negative")));
    }
    if n_relays == 0 || !(sigma2_hhat > 0.0) {
        return Err(Error::domain(OP, "need n_relays >= 1 and sigma2_hhat > 0"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let u = x / sigma2_hhat;
    let big_n = n_relays;
    let survival: f64 = (0..big_n)
        .map(|n| {
            let nf = f64::from(n);
            binomial_f64(big_n - 1, n) * sign(n) / (2.0 * nf + 1.0)
                * ((-u).exp() + nf / (nf + 1.0) * (-2.0 * (nf + 1.0) * u).exp())
        })
        .sum();
    clamp_probability(OP, 1.0 - f64::from(big_n) * survival)
}

/// Density of `|h_hat_t|^2 = y` given `|h_hat_s|^2 = x` for an outdated link
/// (`rho_j < 1`): a non-central exponential,
/// `exp(-(y + rho^2 x)/D) I0(2 sqrt(rho^2 x y)/D) / D` with
/// `D = (1 - rho^2) sigma2_hhat`.
pub fn conditional_gain_pdf(y: f64, x: f64, rho_j: f64, sigma2_hhat: f64) -> Result<f64> {
    const OP: &str = "conditional_gain_pdf";
    if !(x >= 0.0 && y >= 0.0) {
        return Err(Error::domain(OP, format!("gains must be non-negative (x = {x}, y = {y})")));
    }
    if !(0.0..1.0).contains(&rho_j) || !(sigma2_hhat > 0.0) {
        return Err(Error::domain(OP, format!("need 0 <= rho_j < 1 and sigma2_hhat > 0 (rho_j = {rho_j})")));
    }
    let rho2 = rho_j * rho_j;
    let d = (1.0 - rho2) * sigma2_hhat;
    let arg = 2.0 * (rho2 * x * y).sqrt() / d;
    // exp(-(sqrt(y) - rho sqrt(x))^2 / D) * exp(-arg) I0(arg), stable for large gains
    let i0 = bessel_i0(arg)?;
    Ok((-(y + rho2 * x) / d).exp() * i0 / d)
}

/// Average SER `alpha/sqrt(2 pi) * int_0^inf F(t^2/beta) exp(-t^2/2) dt`.
///
/// The integral is truncated at `t = 10`, where the Gaussian weight is below
/// 2e-22.
pub fn ser_by_integration<F>(cdf: F, mods: ModulationConstants) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    const T_MAX: f64 = 10.0;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |t: f64| -> f64 {
        match cdf(t * t / mods.beta) {
            Ok(p) => p * (-0.5 * t * t).exp(),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let tol = Tolerance { abs: 1e-8, rel: 1e-7, max_panels: 1000 };
    let est = integrate(integrand, 0.0, T_MAX, 10, tol);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(mods.alpha / (2.0 * PI).sqrt() * est?.value)
}

/// Semi-analytical SER of S1: [`cdf_gamma1`] pushed through
/// [`ser_by_integration`].
pub fn ser_integral_gamma1(
    n_relays: u32,
    coeffs: &AsymptoticCoeffs,
    rho_1: f64,
    rho_2: f64,
    mods: ModulationConstants,
) -> Result<f64> {
    ser_by_integration(|z| cdf_gamma1(z, n_relays, coeffs, rho_1, rho_2), mods)
}

/// `N sum_n (-1)^n C(N-1, n) (2 - rho^2) / ((2n+1)(1 - rho^2) + 1)`: the
/// first-order slope of the selected link's gain CDF at the origin,
/// relative to the unselected one.
fn outdated_link_weight(n_relays: u32, rho: f64) -> f64 {
    let big_n = n_relays;
    let num = 2.0 - rho * rho;
    f64::from(big_n)
        * (0..big_n).map(|n| sign(n) * binomial_f64(big_n - 1, n) * num / outdating_denominator(n, rho)).sum::<f64>()
}

/// High-SNR SER from precomputed coefficients. `rho_1` pairs with `a` and
/// `rho_2` with `b`; `fresh` selects the no-outdating branch.
pub fn asymptotic_ser_with(
    n_relays: u32,
    coeffs: &AsymptoticCoeffs,
    rho_1: f64,
    rho_2: f64,
    fresh: bool,
    mods: ModulationConstants,
) -> Result<f64> {
    const OP: &str = "asymptotic_ser";
    if n_relays == 0 {
        return Err(Error::domain(OP, "need at least one relay"));
    }
    check_rho(OP, "rho_1", rho_1)?;
    check_rho(OP, "rho_2", rho_2)?;
    let ModulationConstants { alpha, beta } = mods;
    if fresh {
        let big_n = n_relays as i32;
        let ratio = double_factorial_ratio(n_relays)?;
        Ok(alpha / (4.0 * beta.powi(big_n)) * ratio * (coeffs.a.powi(big_n) + coeffs.b.powi(big_n)))
    } else {
        Ok(alpha / (2.0 * beta)
            * (coeffs.a * outdated_link_weight(n_relays, rho_1) + coeffs.b * outdated_link_weight(n_relays, rho_2)))
    }
}

/// High-SNR SER of S1.
///
/// With both links fresh (`rho_f1 = rho_f2 = 1`) the SER decays as
/// `psi^-N`; otherwise as `psi^-1`.
pub fn asymptotic_ser(
    n_relays: u32,
    psi_s: f64,
    psi_r: f64,
    rho_e: f64,
    rho_f1: f64,
    rho_f2: f64,
    mods: ModulationConstants,
) -> Result<f64> {
    let coeffs = asymptotic_coeffs(psi_s, psi_r, rho_e)?;
    check_rho("asymptotic_ser", "rho_f1", rho_f1)?;
    check_rho("asymptotic_ser", "rho_f2", rho_f2)?;
    let fresh = rho_f1 == 1.0 && rho_f2 == 1.0;
    asymptotic_ser_with(
        n_relays,
        &coeffs,
        link_correlation(rho_f1, rho_e),
        link_correlation(rho_f2, rho_e),
        fresh,
        mods,
    )
}

/// High-SNR SER of S2: the S1 expression with `a` and `b` exchanged.
pub fn asymptotic_ser_s2(
    n_relays: u32,
    psi_s: f64,
    psi_r: f64,
    rho_e: f64,
    rho_f1: f64,
    rho_f2: f64,
    mods: ModulationConstants,
) -> Result<f64> {
    let coeffs = asymptotic_coeffs(psi_s, psi_r, rho_e)?.swapped();
    let fresh = rho_f1 == 1.0 && rho_f2 == 1.0;
    asymptotic_ser_with(
        n_relays,
        &coeffs,
        link_correlation(rho_f1, rho_e),
        link_correlation(rho_f2, rho_e),
        fresh,
        mods,
    )
}

/// Diversity order: `N` with fresh CSI on both links, 1 otherwise.
pub fn diversity_order(rho_f1: f64, rho_f2: f64, n_relays: u32) -> u32 {
    if rho_f1 == 1.0 && rho_f2 == 1.0 {
        n_relays
    } else {
        1
    }
}

/// SNR in dB at which a decreasing `ser(snr_db)` curve crosses `target`,
/// by bisection on `[lo_db, hi_db]` in log-SER.
pub fn snr_at_ser<F>(ser: F, target: f64, lo_db: f64, hi_db: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    const OP: &str = "snr_at_ser";
    let g = |db: f64| -> Result<f64> { Ok(ser(db)?.ln() - target.ln()) };
    let (mut lo, mut hi) = (lo_db, hi_db);
    let (glo, ghi) = (g(lo)?, g(hi)?);
    if !(glo > 0.0 && ghi < 0.0) {
        return Err(Error::numeric(OP, format!("target {target:e} not bracketed by [{lo_db}, {hi_db}] dB")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
