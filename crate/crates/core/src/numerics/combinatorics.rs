use crate::error::{Error, Result};

const BINOMIAL_MAX_N: u32 = 64;
const FACTORIAL_RATIO_MAX_N: u32 = 16;

/// Exact binomial coefficient `C(n, k)` for `k <= n <= 64`.
pub fn binomial(n: u32, k: u32) -> Result<u64> {
    if n > BINOMIAL_MAX_N {
        return Err(Error::range("binomial", format!("n = {n} exceeds {BINOMIAL_MAX_N}")));
    }
    if k > n {
        return Err(Error::domain("binomial", format!("k = {k} > n = {n}")));
    }
    let k = k.min(n - k);
    // Each partial product is itself a binomial coefficient, so the
    // division is exact; u128 keeps the intermediate from overflowing.
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    Ok(acc as u64)
}

/// `(2N)! / N!` for `1 <= N <= 16`, correctly rounded to f64.
///
/// The integer product is formed exactly in u128 before the single
/// conversion; values up to N = 12 are exactly representable.
pub fn double_factorial_ratio(n: u32) -> Result<f64> {
    if n == 0 || n > FACTORIAL_RATIO_MAX_N {
        return Err(Error::range("double_factorial_ratio", format!("N = {n} outside 1..={FACTORIAL_RATIO_MAX_N}")));
    }
    let product: u128 = (n + 1..=2 * n).map(u128::from).product();
    Ok(product as f64)
}

/// `C(n, k)` as f64 for use inside floating-point sums.
pub(crate) fn binomial_f64(n: u32, k: u32) -> f64 {
    binomial(n, k).expect("binomial called within its validated range") as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(0, 0).unwrap(), 1);
        assert_eq!(binomial(5, 2).unwrap(), 10);
        assert_eq!(binomial(10, 3).unwrap(), 120);
        assert_eq!(binomial(64, 32).unwrap(), 1_832_624_140_942_590_534);
        assert_eq!(binomial(64, 64).unwrap(), 1);
    }

    #[test]
    fn binomial_pascal_rule() {
        for n in 1..=64 {
            for k in 1..n {
                assert_eq!(binomial(n, k).unwrap(), binomial(n - 1, k - 1).unwrap() + binomial(n - 1, k).unwrap());
            }
        }
    }

    #[test]
    fn binomial_errors() {
        assert!(matches!(binomial(3, 4), Err(Error::Domain { .. })));
        assert!(matches!(binomial(65, 1), Err(Error::Range { .. })));
    }

    #[test]
    fn factorial_ratio_examples() {
        assert_eq!(double_factorial_ratio(1).unwrap(), 2.0);
        assert_eq!(double_factorial_ratio(2).unwrap(), 12.0);
        assert_eq!(double_factorial_ratio(4).unwrap(), 1680.0);
        // 24!/12! = 1295295050649600
        assert_eq!(double_factorial_ratio(12).unwrap(), 1_295_295_050_649_600.0);
        assert!(matches!(double_factorial_ratio(0), Err(Error::Range { .. })));
        assert!(matches!(double_factorial_ratio(17), Err(Error::Range { .. })));
    }
}
