//! Quick reference-value checks of the numerical kernels.

use relaylab_core::analytics::{
    asymptotic_coeffs, asymptotic_ser, cdf_gamma1, modulation_constants, ser_by_integration,
};
use relaylab_core::channel::CsiParams;
use relaylab_core::numerics::{bessel_i0, bessel_j0, bessel_k1, binomial, double_factorial_ratio, gaussian_q};
use relaylab_core::transceiver::{simulate, Modulation, SystemConfig};
use relaylab_core::Result;

struct Check {
    name: &'static str,
    got: f64,
    want: f64,
    tol: f64,
    relative: bool,
}

fn abs(name: &'static str, got: Result<f64>, want: f64, tol: f64) -> Result<Check> {
    Ok(Check { name, got: got?, want, tol, relative: false })
}

fn rel(name: &'static str, got: Result<f64>, want: f64, tol: f64) -> Result<Check> {
    Ok(Check { name, got: got?, want, tol, relative: true })
}

fn checks() -> Vec<(&'static str, Result<Check>)> {
    let bpsk = || modulation_constants(Modulation::Bpsk);
    let list: Vec<Result<Check>> = vec![
        abs("J0(1)", bessel_j0(1.0), 0.765_197_686_557_966_5, 1e-10),
        abs("J0 first zero", bessel_j0(2.404_825_557_695_773), 0.0, 1e-9),
        rel("I0(1)", bessel_i0(1.0), 1.266_065_877_752_008_4, 1e-10),
        rel("I0(5)", bessel_i0(5.0), 27.239_871_823_604_442, 1e-10),
        rel("K1(1)", bessel_k1(1.0), 0.601_907_230_197_234_6, 1e-8),
        rel("K1(10)", bessel_k1(10.0), 1.864_877_345_382_558_5e-5, 1e-8),
        rel("K1(0.001)", bessel_k1(1e-3), 999.996_238_156_085_5, 1e-8),
        abs("Q(1)", gaussian_q(1.0), 0.158_655_253_931_457_05, 1e-12),
        abs("C(10,3)", binomial(10, 3).map(|v| v as f64), 120.0, 0.0),
        abs("8!/4!", double_factorial_ratio(4), 1680.0, 0.0),
        rel(
            "Rayleigh BPSK SER at 10",
            bpsk().and_then(|m| ser_by_integration(|z| Ok(1.0 - (-z / 10.0).exp()), m)),
            0.5 * (1.0 - (10.0f64 / 11.0).sqrt()),
            1e-8,
        ),
        rel(
            "asymptotic SER, N=2, 30 dB",
            bpsk().and_then(|m| asymptotic_ser(2, 1000.0, 1000.0, 1.0, 1.0, 1.0, m)),
            3.75e-6,
            1e-12,
        ),
        abs(
            "CDF at 0",
            asymptotic_coeffs(300.0, 300.0, 0.8).and_then(|c| cdf_gamma1(0.0, 4, &c, 0.72, 0.72)),
            0.0,
            0.0,
        ),
        abs(
            "CDF far tail",
            asymptotic_coeffs(300.0, 300.0, 0.8).and_then(|c| cdf_gamma1(50.0 / c.a, 4, &c, 0.72, 0.72)),
            1.0,
            1e-9,
        ),
        abs(
            "noiseless SER, perfect CSI",
            SystemConfig::equal_power(4, 10.0, Modulation::Qpsk).map(|cfg| {
                let o = simulate(1, &cfg, &CsiParams::perfect(), 20_000, 0.0);
                (o.symbol_errors_at_s1 + o.symbol_errors_at_s2) as f64
            }),
            0.0,
            0.0,
        ),
    ];
    list.into_iter().map(|c| (c.as_ref().map_or("?", |c| c.name), c)).collect()
}

/// Print one line per check; true when all pass.
pub fn run() -> bool {
    let mut ok = true;
    for (name, check) in checks() {
        match check {
            Ok(c) => {
                let err = if c.relative && c.want != 0.0 {
                    ((c.got - c.want) / c.want).abs()
                } else {
                    (c.got - c.want).abs()
                };
                let pass = err <= c.tol;
                ok &= pass;
                println!(
                    "{} {}: {:.12e} (want {:.12e}, {} error {:.1e} <= {:.0e})",
                    if pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.got,
                    c.want,
                    if c.relative { "rel" } else { "abs" },
                    err,
                    c.tol
                );
            }
            Err(e) => {
                ok = false;
                println!("FAIL {name}: {e}");
            }
        }
    }
    ok
}
