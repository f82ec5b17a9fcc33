//! Channel model: delay-outdated and estimation-error-corrupted Rayleigh
//! coefficients for every source–relay link.
//!
//! Actual coefficients have unit variance. The transmission-time coefficient
//! follows the first-order autoregressive model
//! `h_t = rho_f h_s + sqrt(1 - rho_f^2) eps`, and every estimate is
//! `h_hat = h + e` with `e ~ CN(0, (1 - rho_e) / rho_e)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::bessel_j0;

/// Correlation and variance parameters of the imperfect-CSI model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiParams {
    rho_f1: f64,
    rho_f2: f64,
    rho_e: f64,
    rho_1: f64,
    rho_2: f64,
    sigma2_hhat: f64,
    sigma2_d: f64,
    sigma2_e: f64,
}

impl CsiParams {
    /// Perfect CSI: no outdating, no estimation error.
    pub fn perfect() -> Self {
        derive_csi_params(1.0, 1.0, 1.0).expect("perfect CSI parameters are valid")
    }

    /// Delay correlation between S1 and the relays.
    pub fn rho_f1(&self) -> f64 {
        self.rho_f1
    }

    pub fn rho_f2(&self) -> f64 {
        self.rho_f2
    }

    /// Estimation-error correlation coefficient; 1 means no estimation error.
    pub fn rho_e(&self) -> f64 {
        self.rho_e
    }

    /// Correlation between the selection-time and transmission-time
    /// estimates of the S1 links.
    pub fn rho_1(&self) -> f64 {
        self.rho_1
    }

    pub fn rho_2(&self) -> f64 {
        self.rho_2
    }

    /// Variance of every estimated coefficient, `1 / rho_e`.
    pub fn sigma2_hhat(&self) -> f64 {
        self.sigma2_hhat
    }

    /// Variance of `d` in `h = rho_e h_hat + d`, `1 - rho_e`.
    pub fn sigma2_d(&self) -> f64 {
        self.sigma2_d
    }

    /// Variance of `e` in `h_hat = h + e`, `(1 - rho_e) / rho_e`.
    pub fn sigma2_e(&self) -> f64 {
        self.sigma2_e
    }

    /// True when neither link is outdated.
    pub fn is_fresh(&self) -> bool {
        self.rho_f1 == 1.0 && self.rho_f2 == 1.0
    }

    /// Delay correlation of source `j` (0 for S1, 1 for S2).
    pub fn rho_f(&self, source: usize) -> f64 {
        if source == 0 {
            self.rho_f1
        } else {
            self.rho_f2
        }
    }
}

/// Combined correlation of the estimates: 1 when the link is not outdated,
/// otherwise `rho_e * rho_f`.
pub fn link_correlation(rho_f: f64, rho_e: f64) -> f64 {
    if rho_f == 1.0 {
        1.0
    } else {
        rho_e * rho_f
    }
}

/// Jakes autocorrelation `J0(2 pi f_d T)`.
///
/// The raw Bessel value is returned; it is negative past the first zero
/// (`f_d T > 0.3827`), which scenario validation rejects.
pub fn jakes_correlation(doppler_hz: f64, delay_s: f64) -> Result<f64> {
    if !(doppler_hz.is_finite() && delay_s.is_finite()) {
        return Err(Error::domain(
            "jakes_correlation",
            format!("non-finite input (f_d = {doppler_hz}, T = {delay_s})"),
        ));
    }
    if doppler_hz < 0.0 || delay_s < 0.0 {
        return Err(Error::domain("jakes_correlation", format!("negative input (f_d = {doppler_hz}, T = {delay_s})")));
    }
    bessel_j0(2.0 * PI * doppler_hz * delay_s)
}

/// Estimation-error coefficient `P / (P + N0)` for training power `P`.
///
/// `f64::INFINITY` is the "no estimation error" sentinel and yields exactly 1.
pub fn cee_coefficient(training_power: f64, noise_density: f64) -> Result<f64> {
    if !(noise_density > 0.0) || !noise_density.is_finite() {
        return Err(Error::domain("cee_coefficient", format!("noise density must be positive, got {noise_density}")));
    }
    if !(training_power >= 0.0) {
        return Err(Error::domain(
            "cee_coefficient",
            format!("training power must be non-negative, got {training_power}"),
        ));
    }
    if training_power.is_infinite() {
        return Ok(1.0);
    }
    Ok(training_power / (training_power + noise_density))
}

/// Build [`CsiParams`] from the two delay correlations and the estimation
/// correlation.
pub fn derive_csi_params(rho_f1: f64, rho_f2: f64, rho_e: f64) -> Result<CsiParams> {
    for (name, v) in [("rho_f1", rho_f1), ("rho_f2", rho_f2)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::domain("derive_csi_params", format!("{name} = {v} outside [0, 1]")));
        }
    }
    if !(rho_e > 0.0 && rho_e <= 1.0) {
        return Err(Error::domain("derive_csi_params", format!("rho_e = {rho_e} outside (0, 1]")));
    }
    let sigma2_hhat = 1.0 / rho_e;
    Ok(CsiParams {
        rho_f1,
        rho_f2,
        rho_e,
        rho_1: link_correlation(rho_f1, rho_e),
        rho_2: link_correlation(rho_f2, rho_e),
        sigma2_hhat,
        sigma2_d: 1.0 - rho_e,
        sigma2_e: (1.0 - rho_e) / rho_e,
    })
}

/// Draw from `CN(0, variance)`.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let sd = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sd * re, sd * im)
}

/// Actual and estimated coefficients of every source–relay link at
/// selection time (`_s`) and transmission time (`_t`).
///
/// Index `[j][i]` addresses source `j` (0 = S1, 1 = S2) and relay `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayChannelSet {
    pub h_s: [Vec<Complex64>; 2],
    pub h_t: [Vec<Complex64>; 2],
    pub hhat_s: [Vec<Complex64>; 2],
    pub hhat_t: [Vec<Complex64>; 2],
}

impl RelayChannelSet {
    /// All-zero set for `n_relays` relays, to be filled by [`resample`].
    ///
    /// [`resample`]: RelayChannelSet::resample
    pub fn zeros(n_relays: usize) -> Self {
        let z = || [vec![Complex64::default(); n_relays], vec![Complex64::default(); n_relays]];
        RelayChannelSet { h_s: z(), h_t: z(), hhat_s: z(), hhat_t: z() }
    }

    pub fn n_relays(&self) -> usize {
        self.h_s[0].len()
    }

    /// Redraw every coefficient in place.
    ///
    /// Per link: `h_s, eps ~ CN(0,1)`, `h_t = rho_f h_s + sqrt(1-rho_f^2) eps`,
    /// then independent errors `e_s, e_t ~ CN(0, sigma2_e)` are added to form
    /// the estimates. A link with `rho_f = 1` has `h_t = h_s` and reuses the
    /// selection-time estimate, so `h_hat_t = h_hat_s`.
    pub fn resample<R: Rng + ?Sized>(&mut self, rng: &mut R, params: &CsiParams) {
        let sigma2_e = params.sigma2_e();
        for j in 0..2 {
            let rho_f = params.rho_f(j);
            let innovation = (1.0 - rho_f * rho_f).sqrt();
            for i in 0..self.n_relays() {
                let h_s = complex_gaussian(rng, 1.0);
                let e_s = if sigma2_e > 0.0 { complex_gaussian(rng, sigma2_e) } else { Complex64::default() };
                let hhat_s = h_s + e_s;
                let (h_t, hhat_t) = if rho_f == 1.0 {
                    (h_s, hhat_s)
                } else {
                    let eps = complex_gaussian(rng, 1.0);
                    let h_t = h_s * rho_f + eps * innovation;
                    let e_t = if sigma2_e > 0.0 { complex_gaussian(rng, sigma2_e) } else { Complex64::default() };
                    (h_t, h_t + e_t)
                };
                self.h_s[j][i] = h_s;
                self.h_t[j][i] = h_t;
                self.hhat_s[j][i] = hhat_s;
                self.hhat_t[j][i] = hhat_t;
            }
        }
    }

    /// `(|h_hat_s,1i|^2, |h_hat_s,2i|^2)` for every relay: the only
    /// quantities the selection criterion may look at.
    pub fn selection_gains(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.hhat_s[0].iter().zip(&self.hhat_s[1]).map(|(a, b)| (a.norm_sqr(), b.norm_sqr()))
    }
}

/// Draw a fresh [`RelayChannelSet`] for `n_relays` relays.
pub fn sample_relay_channels<R: Rng + ?Sized>(
    rng: &mut R,
    params: &CsiParams,
    n_relays: usize,
) -> Result<RelayChannelSet> {
    if n_relays == 0 {
        return Err(Error::domain("sample_relay_channels", "need at least one relay"));
    }
    let mut set = RelayChannelSet::zeros(n_relays);
    set.resample(rng, params);
    Ok(set)
}
