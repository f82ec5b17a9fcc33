mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relaylab_core::analytics::*;
use relaylab_core::channel::{derive_csi_params, RelayChannelSet};
use relaylab_core::numerics::binomial;
use relaylab_core::selection::best_worse_channel;
use relaylab_core::transceiver::Modulation;

fn c_n(big_n: u32, n: u32) -> f64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * binomial(big_n - 1, n).unwrap() as f64 / f64::from(2 * n + 1)
}

/// Survival function of one selected link's scaled gain with exponential
/// rate `rate` and estimate correlation `rho`:
/// `N sum_n c_n [exp(-rate x) + n/(n+1) exp(-2(n+1) rate x / D_n)]`,
/// `D_n = (2n+1)(1 - rho^2) + 1`. Its density is returned alongside.
fn link_law(big_n: u32, rate: f64, rho: f64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let terms: Vec<(f64, f64, f64)> = (0..big_n)
        .map(|n| {
            let d = f64::from(2 * n + 1) * (1.0 - rho * rho) + 1.0;
            let w = f64::from(n) / f64::from(n + 1);
            (c_n(big_n, n), w, 2.0 * f64::from(n + 1) * rate / d)
        })
        .collect();
    let nf = f64::from(big_n);
    let t2 = terms.clone();
    let survival =
        move |x: f64| nf * terms.iter().map(|&(c, w, r)| c * ((-rate * x).exp() + w * (-r * x).exp())).sum::<f64>();
    let density = move |x: f64| {
        nf * t2.iter().map(|&(c, w, r)| c * (rate * (-rate * x).exp() + w * r * (-r * x).exp())).sum::<f64>()
    };
    (survival, density)
}

/// `P(XY/(X+Y) <= z)` for independent X, Y with the laws above, by
/// quadrature of `1 - int_z^inf f_X(x) S_Y(z x / (x - z)) dx`.
fn harmonic_cdf_oracle(z: f64, big_n: u32, c: &AsymptoticCoeffs, rho_1: f64, rho_2: f64) -> f64 {
    let (_, fx) = link_law(big_n, c.a, rho_1);
    let (sy, _) = link_law(big_n, c.b, rho_2);
    let g = |u: f64| if u == 0.0 { 0.0 } else { fx(z + u) * sy(z * (z + u) / u) };
    let top = 80.0 / c.a;
    let mut edges = vec![0.0];
    let mut e = z.min(top) * 1e-6;
    while e < top {
        edges.push(e);
        e *= 2.0;
    }
    edges.push(top);
    1.0 - simpson_panels(&g, &edges, 1e-15)
}

#[test]
fn closed_form_cdf_matches_convolution_quadrature() {
    for (n, snr, r1, r2, rho_e) in [
        (1, 10.0, 1.0, 1.0, 1.0),
        (2, 20.0, 1.0, 1.0, 1.0),
        (4, 25.0, 1.0, 1.0, 0.8),
        (4, 25.0, 0.72, 0.72, 0.8),
        (3, 15.0, 1.0, 0.4, 0.8),
        (5, 30.0, 0.0, 0.0, 1.0),
    ] {
        let psi = 10f64.powf(snr / 10.0);
        let c = asymptotic_coeffs(psi, psi, rho_e).unwrap();
        for k in [0.02, 0.1, 0.3, 1.0, 3.0] {
            let z = k / c.a;
            let got = cdf_gamma1(z, n, &c, r1, r2).unwrap();
            let oracle = harmonic_cdf_oracle(z, n, &c, r1, r2);
            assert!((got - oracle).abs() < 1e-9, "N={n} z={z}: {got} vs {oracle}");
        }
    }
}

#[test]
fn outdated_selected_gain_uses_squared_correlation() {
    // |h_hat_t,1k|^2 at the selected relay, in units of sigma2_hhat.
    let p = derive_csi_params(0.9, 0.9, 0.8).unwrap();
    let n = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut set = RelayChannelSet::zeros(n);
    let mut g: Vec<f64> = (0..1_000_000)
        .map(|_| {
            set.resample(&mut rng, &p);
            let k = best_worse_channel(set.selection_gains()).unwrap().index;
            set.hhat_t[0][k].norm_sqr() / p.sigma2_hhat()
        })
        .collect();
    let (squared, _) = link_law(n as u32, 1.0, p.rho_1());
    let d_squared = ks_distance(&mut g, |x| 1.0 - squared(x));
    assert!(d_squared < 0.005, "rho^2 law: KS {d_squared}");
    // rho in place of rho^2: D_n = (2n+1)(1 - rho) + 1
    let (linear, _) = link_law(n as u32, 1.0, p.rho_1().sqrt());
    let d_linear = ks_distance(&mut g, |x| 1.0 - linear(x));
    assert!(d_linear > 0.02, "rho law: KS {d_linear}");
}

#[test]
fn cdf_is_monotone_and_bounded() {
    for (n, r1, r2, rho_e) in [(1, 1.0, 1.0, 1.0), (4, 1.0, 1.0, 1.0), (4, 0.72, 0.72, 0.8), (8, 0.3, 1.0, 0.5)] {
        let c = asymptotic_coeffs(300.0, 300.0, rho_e).unwrap();
        let zmax = 20.0 / c.a.min(c.b);
        let mut prev = 0.0;
        for i in 0..=1000 {
            let z = zmax * f64::from(i) / 1000.0;
            let f = cdf_gamma1(z, n, &c, r1, r2).unwrap();
            assert!((0.0..=1.0).contains(&f));
            assert!(f >= prev - 1e-12, "N={n} z={z}: {f} < {prev}");
            prev = f;
        }
    }
}

#[test]
fn small_argument_ratio_stabilises() {
    for n in 1..=4u32 {
        for (ps, pr) in [(100.0, 100.0), (1000.0, 250.0)] {
            let c = asymptotic_coeffs(ps, pr, 1.0).unwrap();
            let z = 1e-3 * (1.0 / c.a).min(1.0 / c.b);
            let lead = 0.5 * (2.0 * c.a).powi(n as i32) + 0.5 * (2.0 * c.b).powi(n as i32);
            let ratio = cdf_gamma1(z, n, &c, 1.0, 1.0).unwrap() / z.powi(n as i32) / lead;
            assert!((ratio - 1.0).abs() < 0.05, "N={n}: ratio {ratio}");
        }
    }
}

#[test]
fn asymptote_slope_matches_diversity_order() {
    let bpsk = modulation_constants(Modulation::Bpsk).unwrap();
    // (N, rho_f1, rho_f2, training power ratio)
    for (n, rf1, rf2, ratio) in [
        (1, 1.0, 1.0, f64::INFINITY),
        (2, 1.0, 1.0, f64::INFINITY),
        (4, 1.0, 1.0, f64::INFINITY),
        (4, 1.0, 1.0, 1.0),
        (4, 0.9, 0.9, f64::INFINITY),
        (4, 0.9, 0.9, 1.0),
        (3, 1.0, 0.5, 4.0),
        (4, 0.0, 0.0, f64::INFINITY),
    ] {
        let dbs: Vec<f64> = (0..=8).map(|i| 40.0 + 2.5 * f64::from(i)).collect();
        let logs: Vec<f64> = dbs
            .iter()
            .map(|&db| {
                let psi = 10f64.powf(db / 10.0);
                let rho_e = if ratio.is_infinite() { 1.0 } else { ratio * psi / (ratio * psi + 1.0) };
                asymptotic_ser(n, psi, psi, rho_e, rf1, rf2, bpsk).unwrap().log10()
            })
            .collect();
        let x: Vec<f64> = dbs.iter().map(|d| d / 10.0).collect();
        let slope = ls_slope(&x, &logs);
        let d = f64::from(diversity_order(rf1, rf2, n));
        assert!((slope + d).abs() < 0.05, "N={n} rho_f=({rf1},{rf2}) P/P0={ratio}: slope {slope}");
    }
}

#[test]
fn integral_matches_rayleigh_closed_form_for_every_modulation() {
    // F(z) = 1 - exp(-z/g): SER = alpha (1 - sqrt(beta g / (2 + beta g))) / 2
    for m in [Modulation::Bpsk, Modulation::Qpsk, Modulation::Mpsk(8)] {
        let mods = modulation_constants(m).unwrap();
        for g in [0.5, 10.0, 1000.0] {
            let ser = ser_by_integration(|z| Ok(1.0 - (-z / g).exp()), mods).unwrap();
            let bg = mods.beta * g;
            let exact = 0.5 * mods.alpha * (1.0 - (bg / (2.0 + bg)).sqrt());
            assert!((ser - exact).abs() < 1e-8 && (ser / exact - 1.0).abs() < 1e-6, "{m} g={g}");
        }
    }
}

proptest! {
    #[test]
    fn cdf_is_nondecreasing(
        n in 1u32..=6,
        snr in 0.0f64..40.0,
        rho_e in 0.3f64..=1.0,
        r1 in 0.0f64..=1.0,
        r2 in 0.0f64..=1.0,
        u in 0.0f64..5.0,
        du in 0.0f64..1.0,
    ) {
        let psi = 10f64.powf(snr / 10.0);
        let c = asymptotic_coeffs(psi, psi, rho_e).unwrap();
        let z = u / c.a;
        let lo = cdf_gamma1(z, n, &c, r1, r2).unwrap();
        let hi = cdf_gamma1(z + du / c.a, n, &c, r1, r2).unwrap();
        prop_assert!(hi >= lo - 1e-12);
    }

    #[test]
    fn asymptote_decreases_with_snr(
        n in 1u32..=8,
        snr in 0.0f64..50.0,
        rf in 0.0f64..=1.0,
    ) {
        let bpsk = modulation_constants(Modulation::Bpsk).unwrap();
        let at = |db: f64| {
            let psi = 10f64.powf(db / 10.0);
            asymptotic_ser(n, psi, psi, 1.0, rf, rf, bpsk).unwrap()
        };
        prop_assert!(at(snr + 1.0) < at(snr));
    }

    #[test]
    fn coefficients_invert(ps in 0.01f64..1e6, pr in 0.01f64..1e6, rho_e in 0.01f64..=1.0) {
        let c = asymptotic_coeffs(ps, pr, rho_e).unwrap();
        prop_assert!(c.a > 0.0 && c.b > 0.0 && c.a.is_finite() && c.b.is_finite());
        prop_assert!((c.a * c.a_tilde / rho_e - 1.0).abs() < 1e-12);
        prop_assert!((c.b * c.b_tilde / rho_e - 1.0).abs() < 1e-12);
    }
}
