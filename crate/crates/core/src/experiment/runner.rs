use crate::analytics::{asymptotic_coeffs, asymptotic_ser, diversity_order, modulation_constants, ser_integral_gamma1};
use crate::channel::{cee_coefficient, derive_csi_params};
use crate::error::{Error, Result};
use crate::transceiver::{simulate, worker_pool, Modulation, SerEstimate, SystemConfig};

use super::scenario::Scenario;

/// Points whose asymptotic SER falls below this get ten times the trials.
pub const ADAPTIVE_THRESHOLD: f64 = 1e-5;
/// Upper bound on the adaptive trial budget.
pub const MAX_TRIALS: u64 = 100_000_000;

/// Which halves of a point to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Both,
    AnalyticOnly,
    MonteCarloOnly,
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub workers: usize,
    pub mode: Mode,
    /// Scale up the budget of points expected below [`ADAPTIVE_THRESHOLD`].
    pub adaptive_trials: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            mode: Mode::Both,
            adaptive_trials: true,
        }
    }
}

/// One row of output. Monte-Carlo or analytic fields are `None` when the
/// corresponding half was skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct SerPoint {
    pub scenario: String,
    pub snr_db: f64,
    pub n_relays: u32,
    pub rho_f1: f64,
    pub rho_f2: f64,
    pub rho_e: f64,
    pub modulation: Modulation,
    pub trials: u64,
    pub ser_mc: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub ser_asymptotic: Option<f64>,
    pub ser_integral: Option<f64>,
    pub diversity_order: u32,
}

/// Seed of the `index`-th SNR point of a scenario.
///
/// Mixes the scenario name in so curves sharing a base seed still draw
/// independent channels.
pub fn point_seed(seed: u64, scenario: &str, index: usize) -> u64 {
    // FNV-1a over the name, then a splitmix64 finaliser
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in scenario.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = seed ^ h.rotate_left(17) ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Trial budget for a point with the given asymptotic SER.
pub fn trials_for_point(base: u64, ser_asymptotic: f64, adaptive: bool) -> u64 {
    if adaptive && ser_asymptotic < ADAPTIVE_THRESHOLD {
        base.saturating_mul(10).min(MAX_TRIALS.max(base))
    } else {
        base
    }
}

/// Sweep a scenario's SNR grid. Points run in order; each point's trials
/// are spread over `opts.workers` threads.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<Vec<SerPoint>> {
    scenario.validate()?;
    let pool = worker_pool(opts.workers)?;
    let mods = modulation_constants(scenario.modulation)?;
    let n = scenario.n_relays;
    let mut points = Vec::with_capacity(scenario.snr_db.len());
    for (i, &snr_db) in scenario.snr_db.iter().enumerate() {
        let cfg = SystemConfig::equal_power(n as usize, snr_db, scenario.modulation)?;
        let p0 = cfg.p_s();
        let rho_e = cee_coefficient(scenario.training_power_ratio * p0, cfg.n0())?;
        let params = derive_csi_params(scenario.rho_f1, scenario.rho_f2, rho_e)?;
        let asym = asymptotic_ser(n, cfg.psi_s(), cfg.psi_r(), rho_e, scenario.rho_f1, scenario.rho_f2, mods)?;

        let analytic = opts.mode != Mode::MonteCarloOnly;
        let integral = if analytic {
            let coeffs = asymptotic_coeffs(cfg.psi_s(), cfg.psi_r(), rho_e)?;
            Some(ser_integral_gamma1(n, &coeffs, params.rho_1(), params.rho_2(), mods)?)
        } else {
            None
        };

        let (trials, mc) = if opts.mode == Mode::AnalyticOnly {
            (0, None)
        } else {
            let trials = trials_for_point(scenario.trials_per_point, asym, opts.adaptive_trials);
            let seed = point_seed(scenario.seed, &scenario.name, i);
            let outcome = pool.install(|| simulate(seed, &cfg, &params, trials, 1.0));
            (trials, Some(SerEstimate::from_outcome(outcome)))
        };

        let point = SerPoint {
            scenario: scenario.name.clone(),
            snr_db,
            n_relays: n,
            rho_f1: scenario.rho_f1,
            rho_f2: scenario.rho_f2,
            rho_e,
            modulation: scenario.modulation,
            trials,
            ser_mc: mc.map(|e| e.ser1),
            ci_low: mc.map(|e| e.ci1.0),
            ci_high: mc.map(|e| e.ci1.1),
            ser_asymptotic: analytic.then_some(asym),
            ser_integral: integral,
            diversity_order: diversity_order(scenario.rho_f1, scenario.rho_f2, n),
        };
        check_point(&point)?;
        points.push(point);
    }
    Ok(points)
}

fn check_point(p: &SerPoint) -> Result<()> {
    let fields = [p.ser_mc, p.ci_low, p.ci_high, p.ser_integral];
    if let Some(bad) = fields.into_iter().flatten().find(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::numeric(
            "run_scenario",
            format!("{} at {} dB: SER {bad} outside [0, 1]", p.scenario, p.snr_db),
        ));
    }
    if let (Some(lo), Some(mc), Some(hi)) = (p.ci_low, p.ser_mc, p.ci_high) {
        debug_assert!(lo <= mc && mc <= hi);
    }
    Ok(())
}

/// Run every scenario in order.
pub fn run_scenarios(scenarios: &[Scenario], opts: &RunOptions) -> Result<Vec<SerPoint>> {
    let mut all = Vec::new();
    for s in scenarios {
        all.extend(run_scenario(s, opts)?);
    }
    Ok(all)
}
