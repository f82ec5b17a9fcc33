//! Globally adaptive Gauss–Kronrod (G7/K15) quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1]; odd indices are the Gauss points.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule: a result is accepted once the summed error estimate is
/// below `min(abs, rel * |value|)`. If the panel budget runs out first the
/// result is still returned provided the error is below `abs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-10, rel: 1e-10, max_panels: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel { lo, hi, value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

/// Integrate `f` over `[lo, hi]`, starting from `initial_panels` equal panels
/// and bisecting the worst panel until the tolerance is met.
pub fn integrate<F>(f: F, lo: f64, hi: f64, initial_panels: usize, tol: Tolerance) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::domain("integrate", format!("bad interval [{lo}, {hi}]")));
    }
    let n0 = initial_panels.max(1);
    let width = (hi - lo) / n0 as f64;
    let mut heap: BinaryHeap<Panel> = (0..n0)
        .map(|i| {
            let a = lo + width * i as f64;
            let b = if i + 1 == n0 { hi } else { a + width };
            kronrod15(&f, a, b)
        })
        .collect();

    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::numeric("integrate", "integrand produced a non-finite value"));
        }
        let target = tol.abs.min(tol.rel * value.abs());
        if error <= target {
            return Ok(Estimate { value, error, panels: heap.len() });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        if heap.len() + 2 > tol.max_panels || mid <= worst.lo || mid >= worst.hi {
            heap.push(worst);
            if error <= tol.abs {
                return Ok(Estimate { value, error, panels: heap.len() });
            }
            return Err(Error::numeric(
                "integrate",
                format!("no convergence: error estimate {error:.3e} after {} panels", heap.len()),
            ));
        }
        heap.push(kronrod15(&f, worst.lo, mid));
        heap.push(kronrod15(&f, mid, worst.hi));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let est = integrate(|x| x.powi(7) - 3.0 * x * x, 0.0, 2.0, 1, Tolerance::default()).unwrap();
        assert!((est.value - (32.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn gaussian_half_line() {
        let est = integrate(|t| (-0.5 * t * t).exp(), 0.0, 10.0, 10, Tolerance::default()).unwrap();
        let exact = (std::f64::consts::PI / 2.0).sqrt();
        assert!((est.value - exact).abs() < 1e-12);
    }

    #[test]
    fn sharp_peak_refines() {
        let f = |x: f64| 1.0 / (1e-4 + (x - 0.3).powi(2));
        let est = integrate(f, 0.0, 1.0, 1, Tolerance::default()).unwrap();
        let exact = 100.0 * ((0.7f64 / 0.01).atan() + (0.3f64 / 0.01).atan());
        assert!((est.value - exact).abs() / exact < 1e-9);
        assert!(est.panels > 1);
    }

    #[test]
    fn exhausted_budget_is_a_numeric_error() {
        let tol = Tolerance { abs: 1e-300, rel: 1e-300, max_panels: 4 };
        let err = integrate(|x| x.sqrt(), 0.0, 1.0, 1, tol).unwrap_err();
        assert!(err.is_numeric());
    }

    #[test]
    fn bad_interval() {
        assert!(integrate(|x| x, 1.0, 0.0, 1, Tolerance::default()).is_err());
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1, Tolerance::default()).is_err());
    }
}
