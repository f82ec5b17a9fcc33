//! Monte-Carlo link engine for the two-phase exchange through the selected
//! relay, plus the closed-form instantaneous SNR expressions.
//!
//! Phase one: both sources transmit, the selected relay `k` receives
//! `y_k = sqrt(p_s) h_1k s1 + sqrt(p_s) h_2k s2 + n_k`. Phase two: it
//! broadcasts `sqrt(p_r) beta_k y_k` with the variable gain
//! `beta_k = (p_s |h_hat_1k|^2 + p_s |h_hat_2k|^2 + N0)^(-1/2)`. Each source
//! subtracts the part of its own signal it can rebuild from estimates,
//! rotates by `conj(h_hat_1k h_hat_2k)` and makes a minimum-distance
//! decision.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytics::snr_weights;
use crate::channel::{complex_gaussian, CsiParams, RelayChannelSet};
use crate::error::{Error, Result};
use crate::selection::best_worse_channel;

/// Trials handled by one rng substream.
pub const CHUNK_TRIALS: u64 = 1 << 14;

/// Two-sided 95% normal quantile used for Wilson intervals.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    Bpsk,
    Qpsk,
    /// M-ary PSK; only M > 4 is accepted (smaller orders have their own
    /// variants).
    Mpsk(u32),
}

impl Modulation {
    pub fn order(&self) -> u32 {
        match self {
            Modulation::Bpsk => 2,
            Modulation::Qpsk => 4,
            Modulation::Mpsk(m) => *m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Modulation::Mpsk(m) if *m <= 4 => {
                Err(Error::domain("modulation", format!("MPSK needs M > 4 (got {m}); use bpsk or qpsk")))
            }
            _ => Ok(()),
        }
    }

    /// Unit-energy constellation. QPSK sits on the diagonals so that a Gray
    /// labelling is the natural one; labels do not matter for symbol errors.
    pub fn alphabet(&self) -> Vec<Complex64> {
        match self {
            Modulation::Bpsk => vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            Modulation::Qpsk => (0..4).map(|k| Complex64::from_polar(1.0, PI / 4.0 + k as f64 * PI / 2.0)).collect(),
            Modulation::Mpsk(m) => {
                (0..*m).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / *m as f64)).collect()
            }
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulation::Bpsk => write!(f, "bpsk"),
            Modulation::Qpsk => write!(f, "qpsk"),
            Modulation::Mpsk(m) => write!(f, "{m}psk"),
        }
    }
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let m = match lower.as_str() {
            "bpsk" | "2psk" => Modulation::Bpsk,
            "qpsk" | "4psk" => Modulation::Qpsk,
            other => {
                let order = other
                    .strip_suffix("psk")
                    .and_then(|n| n.parse::<u32>().ok())
                    .ok_or_else(|| Error::domain("modulation", format!("unknown format {s:?}")))?;
                Modulation::Mpsk(order)
            }
        };
        m.validate()?;
        Ok(m)
    }
}

/// Powers, noise level, relay count and modulation of one link setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    n_relays: usize,
    p_s: f64,
    p_r: f64,
    n0: f64,
    modulation: Modulation,
}

impl SystemConfig {
    pub fn new(n_relays: usize, p_s: f64, p_r: f64, n0: f64, modulation: Modulation) -> Result<Self> {
        if n_relays == 0 {
            return Err(Error::domain("system_config", "n_relays must be at least 1"));
        }
        for (name, v) in [("p_s", p_s), ("p_r", p_r), ("n0", n0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain("system_config", format!("{name} = {v} must be positive")));
            }
        }
        modulation.validate()?;
        Ok(SystemConfig { n_relays, p_s, p_r, n0, modulation })
    }

    /// Equal source and relay power `P0 = 10^(snr_db/10)` with `N0 = 1`.
    pub fn equal_power(n_relays: usize, snr_db: f64, modulation: Modulation) -> Result<Self> {
        let p0 = 10f64.powf(snr_db / 10.0);
        SystemConfig::new(n_relays, p0, p0, 1.0, modulation)
    }

    pub fn n_relays(&self) -> usize {
        self.n_relays
    }

    pub fn p_s(&self) -> f64 {
        self.p_s
    }

    pub fn p_r(&self) -> f64 {
        self.p_r
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    /// `p_s / N0`
    pub fn psi_s(&self) -> f64 {
        self.p_s / self.n0
    }

    /// `p_r / N0`
    pub fn psi_r(&self) -> f64 {
        self.p_r / self.n0
    }
}

/// Symbol and error counts accumulated over one or more trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    pub symbols_sent: u64,
    /// Wrong decisions on `s2` made by S1.
    pub symbol_errors_at_s1: u64,
    /// Wrong decisions on `s1` made by S2.
    pub symbol_errors_at_s2: u64,
}

impl Add for TrialOutcome {
    type Output = TrialOutcome;

    fn add(self, rhs: Self) -> Self {
        TrialOutcome {
            symbols_sent: self.symbols_sent + rhs.symbols_sent,
            symbol_errors_at_s1: self.symbol_errors_at_s1 + rhs.symbol_errors_at_s1,
            symbol_errors_at_s2: self.symbol_errors_at_s2 + rhs.symbol_errors_at_s2,
        }
    }
}

impl AddAssign for TrialOutcome {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Variable relay gain computed from the estimated transmission-time gains.
pub fn amplification_factor(g1: f64, g2: f64, p_s: f64, n0: f64) -> f64 {
    (p_s * g1 + p_s * g2 + n0).sqrt().recip()
}

/// Instantaneous SNR at S1 including the residual interference left by
/// channel estimation error. `g1`, `g2` are `|h_hat_t,1k|^2`, `|h_hat_t,2k|^2`.
pub fn instantaneous_snr_exact(g1: f64, g2: f64, cfg: &SystemConfig, params: &CsiParams) -> f64 {
    let (ps, pr) = (cfg.psi_s(), cfg.psi_r());
    let re2 = params.rho_e() * params.rho_e();
    let sd2 = params.sigma2_d();
    let num = pr * ps * re2 * re2 * g1 * g2;
    if num == 0.0 {
        return 0.0;
    }
    let c1 = 5.0 * pr * ps * re2 * sd2 + pr * re2 + ps;
    let c2 = pr * ps * re2 * sd2 + ps;
    let c0 = 3.0 * pr * ps * sd2 * sd2 + pr * sd2 + 1.0;
    num / (c1 * g1 + c2 * g2 + c0)
}

/// High-SNR form `a~ g1 * b~ g2 / (a~ g1 + b~ g2)`; never below the exact SNR.
pub fn instantaneous_snr_simplified(g1: f64, g2: f64, cfg: &SystemConfig, params: &CsiParams) -> f64 {
    let (a_tilde, b_tilde) = snr_weights(cfg.psi_s(), cfg.psi_r(), params.rho_e());
    harmonic_snr(a_tilde * g1, b_tilde * g2)
}

#[inline]
pub(crate) fn harmonic_snr(x: f64, y: f64) -> f64 {
    let s = x + y;
    if s == 0.0 {
        0.0
    } else {
        x * y / s
    }
}

/// Relay chosen on the selection-time estimates together with its estimated
/// transmission-time gains `(k, |h_hat_t,1k|^2, |h_hat_t,2k|^2)`.
pub fn selected_transmission_gains(channels: &RelayChannelSet) -> (usize, f64, f64) {
    let k = best_worse_channel(channels.selection_gains()).expect("channel sets are non-empty with finite gains").index;
    (k, channels.hhat_t[0][k].norm_sqr(), channels.hhat_t[1][k].norm_sqr())
}

/// Everything one trial saw, for white-box tests of the signal chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialTrace {
    pub relay: usize,
    pub h_t: [Complex64; 2],
    pub hhat_t: [Complex64; 2],
    pub beta: f64,
    pub symbols: [Complex64; 2],
    /// Processed statistic at S1 (after cancellation and rotation).
    pub y1: Complex64,
    pub y2: Complex64,
    /// Noiseless reference amplitude `sqrt(p_r p_s) beta rho_e^2 |h_hat_1|^2 |h_hat_2|^2`.
    pub reference_gain: f64,
    /// S1's decision on `s2`.
    pub decided_at_s1: Complex64,
    pub decided_at_s2: Complex64,
}

/// Reusable per-thread state of the link simulation.
#[derive(Debug, Clone)]
pub struct Transceiver {
    cfg: SystemConfig,
    params: CsiParams,
    alphabet: Vec<Complex64>,
    channels: RelayChannelSet,
    noise_scale: f64,
}

impl Transceiver {
    pub fn new(cfg: SystemConfig, params: CsiParams) -> Self {
        Transceiver {
            alphabet: cfg.modulation().alphabet(),
            channels: RelayChannelSet::zeros(cfg.n_relays()),
            cfg,
            params,
            noise_scale: 1.0,
        }
    }

    /// Test hook: multiply every noise sample by `scale` (0 disables noise).
    /// Amplification still uses the nominal `N0`.
    #[doc(hidden)]
    pub fn with_noise_scale(mut self, scale: f64) -> Self {
        self.noise_scale = scale;
        self
    }

    /// Run one full selection + two-phase exchange.
    pub fn run_trial<R: Rng + ?Sized>(&mut self, rng: &mut R) -> TrialOutcome {
        let t = self.run_trial_traced(rng);
        TrialOutcome {
            symbols_sent: 1,
            symbol_errors_at_s1: u64::from(t.decided_at_s1 != t.symbols[1]),
            symbol_errors_at_s2: u64::from(t.decided_at_s2 != t.symbols[0]),
        }
    }

    pub fn run_trial_traced<R: Rng + ?Sized>(&mut self, rng: &mut R) -> TrialTrace {
        self.channels.resample(rng, &self.params);
        let (k, g1, g2) = selected_transmission_gains(&self.channels);
        let h = [self.channels.h_t[0][k], self.channels.h_t[1][k]];
        let hh = [self.channels.hhat_t[0][k], self.channels.hhat_t[1][k]];

        let m = self.alphabet.len();
        let s = [self.alphabet[rng.random_range(0..m)], self.alphabet[rng.random_range(0..m)]];

        let (ps, pr, n0) = (self.cfg.p_s(), self.cfg.p_r(), self.cfg.n0());
        let noise_var = n0 * self.noise_scale * self.noise_scale;
        let mut noise = || {
            if noise_var > 0.0 {
                complex_gaussian(rng, noise_var)
            } else {
                Complex64::default()
            }
        };
        let n_k = noise();
        let n_1 = noise();
        let n_2 = noise();

        let beta = amplification_factor(g1, g2, ps, n0);
        let y_k = (h[0] * s[0] + h[1] * s[1]) * ps.sqrt() + n_k;
        let x_k = y_k * (pr.sqrt() * beta);

        let rho_e2 = self.params.rho_e() * self.params.rho_e();
        let amp = (pr * ps).sqrt() * beta * rho_e2;
        let rotation = (hh[0] * hh[1]).conj();

        let y1_r = h[0] * x_k + n_1;
        let y2_r = h[1] * x_k + n_2;
        let y1 = rotation * (y1_r - hh[0] * hh[0] * s[0] * amp);
        let y2 = rotation * (y2_r - hh[1] * hh[1] * s[1] * amp);

        let reference_gain = amp * g1 * g2;
        TrialTrace {
            relay: k,
            h_t: h,
            hhat_t: hh,
            beta,
            symbols: s,
            y1,
            y2,
            reference_gain,
            decided_at_s1: detect(&self.alphabet, y1, reference_gain),
            decided_at_s2: detect(&self.alphabet, y2, reference_gain),
        }
    }
}

/// Minimum Euclidean distance decision `argmin |y - gain * s'|^2`.
fn detect(alphabet: &[Complex64], y: Complex64, gain: f64) -> Complex64 {
    let mut best = alphabet[0];
    let mut best_d = f64::INFINITY;
    for &s in alphabet {
        let d = (y - s * gain).norm_sqr();
        if d < best_d {
            best_d = d;
            best = s;
        }
    }
    best
}

/// Convenience single trial with a throw-away [`Transceiver`].
pub fn run_trial<R: Rng + ?Sized>(rng: &mut R, cfg: &SystemConfig, params: &CsiParams) -> TrialOutcome {
    Transceiver::new(*cfg, *params).run_trial(rng)
}

/// Wilson score interval at 95% for `errors` out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo.min(p), hi.max(p))
}

/// Symbol error rates at both sources with Wilson 95% intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerEstimate {
    pub outcome: TrialOutcome,
    pub ser1: f64,
    pub ci1: (f64, f64),
    pub ser2: f64,
    pub ci2: (f64, f64),
}

impl SerEstimate {
    pub fn from_outcome(outcome: TrialOutcome) -> Self {
        let n = outcome.symbols_sent.max(1) as f64;
        SerEstimate {
            outcome,
            ser1: outcome.symbol_errors_at_s1 as f64 / n,
            ci1: wilson_interval(outcome.symbol_errors_at_s1, outcome.symbols_sent),
            ser2: outcome.symbol_errors_at_s2 as f64 / n,
            ci2: wilson_interval(outcome.symbol_errors_at_s2, outcome.symbols_sent),
        }
    }
}

/// Rng for substream `chunk` of the run keyed by `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Monte-Carlo run of `trials` trials split into fixed substreams.
///
/// Chunk `c` always draws from `chunk_rng(seed, c)` and counts are summed,
/// so the result depends on `seed` only, not on how many threads run it.
pub fn simulate(seed: u64, cfg: &SystemConfig, params: &CsiParams, trials: u64, noise_scale: f64) -> TrialOutcome {
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    (0..chunks)
        .into_par_iter()
        .map_init(
            || Transceiver::new(*cfg, *params).with_noise_scale(noise_scale),
            |engine, c| {
                let mut rng = chunk_rng(seed, c);
                let n = CHUNK_TRIALS.min(trials - c * CHUNK_TRIALS);
                let mut acc = TrialOutcome::default();
                for _ in 0..n {
                    acc += engine.run_trial(&mut rng);
                }
                acc
            },
        )
        .reduce(TrialOutcome::default, |a, b| a + b)
}

/// Build a rayon pool with exactly `workers` threads.
pub fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(Error::config("workers", "must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| Error::config("workers", e.to_string()))
}

/// Estimate both sources' SER over `trials` trials on `workers` threads.
pub fn estimate_ser(
    seed: u64,
    cfg: &SystemConfig,
    params: &CsiParams,
    trials: u64,
    workers: usize,
) -> Result<SerEstimate> {
    if trials == 0 {
        return Err(Error::domain("estimate_ser", "trials must be at least 1"));
    }
    let pool = worker_pool(workers)?;
    let outcome = pool.install(|| simulate(seed, cfg, params, trials, 1.0));
    Ok(SerEstimate::from_outcome(outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::derive_csi_params;

    #[test]
    fn amplification_examples() {
        assert_eq!(amplification_factor(0.0, 0.0, 1.0, 1.0), 1.0);
        assert!((amplification_factor(1.0, 1.0, 1.0, 1.0) - 3f64.sqrt().recip()).abs() < 1e-15);
        let b = amplification_factor(2.5, 0.3, 10.0, 0.01);
        assert!((b - 28.01f64.sqrt().recip()).abs() < 1e-15);
        assert!((b - 0.18895).abs() < 1e-5);
    }

    #[test]
    fn modulation_parsing_and_alphabets() {
        assert_eq!("BPSK".parse::<Modulation>().unwrap(), Modulation::Bpsk);
        assert_eq!("qpsk".parse::<Modulation>().unwrap(), Modulation::Qpsk);
        assert_eq!("8psk".parse::<Modulation>().unwrap(), Modulation::Mpsk(8));
        assert!("4psk".parse::<Modulation>().is_ok());
        assert!(Modulation::Mpsk(4).validate().is_err());
        assert!("16qam".parse::<Modulation>().is_err());
        for m in [Modulation::Bpsk, Modulation::Qpsk, Modulation::Mpsk(8)] {
            let a = m.alphabet();
            assert_eq!(a.len() as u32, m.order());
            let energy: f64 = a.iter().map(|s| s.norm_sqr()).sum::<f64>() / a.len() as f64;
            assert!((energy - 1.0).abs() < 1e-12);
            assert_eq!(m.to_string().parse::<Modulation>().unwrap(), m);
        }
    }

    #[test]
    fn exact_snr_without_estimation_error() {
        let cfg = SystemConfig::new(2, 3.0, 7.0, 0.5, Modulation::Bpsk).unwrap();
        let p = CsiParams::perfect();
        let (ps, pr) = (cfg.psi_s(), cfg.psi_r());
        for (g1, g2) in [(0.3, 1.7), (2.0, 0.01), (1.0, 1.0)] {
            let expect = pr * ps * g1 * g2 / ((pr + ps) * g1 + ps * g2 + 1.0);
            assert!((instantaneous_snr_exact(g1, g2, &cfg, &p) - expect).abs() < 1e-12 * expect);
        }
        assert_eq!(instantaneous_snr_exact(0.0, 3.0, &cfg, &p), 0.0);
        assert_eq!(instantaneous_snr_exact(3.0, 0.0, &cfg, &p), 0.0);
    }

    #[test]
    fn exact_snr_scripted_value() {
        // (g1, g2, psi_s, psi_r, rho_e) = (1, 1, 100, 100, 0.9): numerator
        // 1e4 * 0.6561 = 6561; denominator 5*1e4*0.81*0.1 + 100*0.81 + 100
        // + 1e4*0.81*0.1 + 100 + 3*1e4*0.01 + 100*0.1 + 1 = 5452.
        let cfg = SystemConfig::new(1, 100.0, 100.0, 1.0, Modulation::Bpsk).unwrap();
        let p = derive_csi_params(1.0, 1.0, 0.9).unwrap();
        let v = instantaneous_snr_exact(1.0, 1.0, &cfg, &p);
        assert!((v - 6561.0 / 5452.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn simplified_snr_examples() {
        let cfg = SystemConfig::new(1, 1000.0, 1000.0, 1.0, Modulation::Bpsk).unwrap();
        let p = CsiParams::perfect();
        // a~ = psi_r = 1000, b~ = psi_r psi_s / (psi_r + psi_s) = 500;
        // 1000 * 500 / 1500
        let v = instantaneous_snr_simplified(1.0, 1.0, &cfg, &p);
        assert!((v - 1000.0 / 3.0).abs() < 1e-9, "{v}");
        assert_eq!(instantaneous_snr_simplified(0.0, 0.0, &cfg, &p), 0.0);
        assert_eq!(harmonic_snr(4.0, 4.0), 2.0);
    }

    #[test]
    fn wilson_interval_edges() {
        assert_eq!(wilson_interval(0, 100).0, 0.0);
        assert!(wilson_interval(0, 100).1 > 0.0);
        assert_eq!(wilson_interval(100, 100).1, 1.0);
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && hi > 0.5 && (0.5 - lo - (hi - 0.5)).abs() < 1e-12);
        // textbook value for 10/100: [0.0552, 0.1744]
        let (lo, hi) = wilson_interval(10, 100);
        assert!((lo - 0.0552).abs() < 1e-4 && (hi - 0.1744).abs() < 1e-4);
    }

    #[test]
    fn chunk_streams_differ() {
        let a: u64 = chunk_rng(1, 0).random();
        let b: u64 = chunk_rng(1, 1).random();
        let c: u64 = chunk_rng(2, 0).random();
        assert!(a != b && a != c);
        assert_eq!(a, chunk_rng(1, 0).random::<u64>());
    }

    #[test]
    fn estimate_rejects_zero_trials_and_workers() {
        let cfg = SystemConfig::equal_power(1, 10.0, Modulation::Bpsk).unwrap();
        let p = CsiParams::perfect();
        assert!(estimate_ser(1, &cfg, &p, 0, 1).is_err());
        assert!(estimate_ser(1, &cfg, &p, 10, 0).is_err());
    }
}
