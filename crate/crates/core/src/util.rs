//! Shared integer helpers: factorials, binomials, and float conversion for
//! huge rationals.

use num::{BigInt, BigRational, BigUint, One, Signed, ToPrimitive, Zero};

pub(crate) fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= BigUint::from(k);
    }
    acc
}

pub(crate) fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    // Exact at every step: the running value is binom(n, i+1).
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// num/den as f64 for operands far beyond f64 range; relative error is a few
/// ulps as long as the true ratio itself fits in f64.
pub fn big_ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return 0.0;
    }
    let shift = num.bits().max(den.bits()).saturating_sub(96);
    let n = (num >> shift).to_f64().expect("shifted value fits");
    let d = (den >> shift).to_f64().expect("shifted value fits");
    n / d
}

pub fn rational_f64(r: &BigRational) -> f64 {
    let num = r.numer().abs().to_biguint().expect("abs is nonnegative");
    let den = r.denom().abs().to_biguint().expect("abs is nonnegative");
    let mag = big_ratio_f64(&num, &den);
    if r.is_negative() {
        -mag
    } else {
        mag
    }
}

pub(crate) fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
