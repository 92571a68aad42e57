//! The symmetric-node density constant of uniform plane trees.
//!
//! The expected number of internal nodes whose two branches are isomorphic,
//! in a uniform plane tree with n leaves, grows like γ·n. The constant is
//! the value at 1/4 of the fixed point f of
//!
//!   f(y) = 1 - sqrt((1 - 2y)(1 + f(y²))),    f(0) = 0,
//!
//! evaluated here in big-integer fixed point: repeated argument squaring
//! reaches dyadic points y = 4^(-2^k) where f(y) = y holds to working
//! precision, which seeds an exact walk back up to y = 1/4. Each upward step
//! contracts the seed error, so the result is limited only by the fixed
//! point's resolution.

use num::bigint::BigUint;
use num::{One, Zero};

use crate::error::{Error, Result};
use crate::util::big_ratio_f64;

const FRAC_BITS: u64 = 640;
const DEFAULT_LEVELS: u32 = 6;

/// Floor of the square root, by Newton's method from an over-estimate.
fn isqrt(v: &BigUint) -> BigUint {
    if v.is_zero() {
        return BigUint::zero();
    }
    let mut x = BigUint::one() << (v.bits() / 2 + 1);
    loop {
        let y = (&x + v / &x) >> 1;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Square root in FRAC_BITS fixed point.
fn sqrt_fixed(v: &BigUint) -> BigUint {
    isqrt(&(v << FRAC_BITS))
}

/// γ as a FRAC_BITS fixed-point integer, seeded `levels` squarings deep.
pub(crate) fn gamma_fixed(levels: u32) -> BigUint {
    assert!(
        levels >= 1 && 2u64.pow(levels + 1) < FRAC_BITS,
        "seed depth must stay representable"
    );
    let one = BigUint::one() << FRAC_BITS;
    // f(y) = y at the deepest point, up to O(y²) below the working error.
    let mut f = BigUint::one() << (FRAC_BITS - 2u64.pow(levels + 1));
    for k in (0..levels).rev() {
        let y = BigUint::one() << (FRAC_BITS - 2u64.pow(k + 1));
        let a = &one - (&y << 1);
        let b = &one + &f;
        let prod = (a * b) >> FRAC_BITS;
        f = &one - sqrt_fixed(&prod);
    }
    f
}

/// γ to at least the requested precision. The fixed-point computation always
/// carries well over a hundred digits, so the argument acts as a validated
/// contract floor (accepted range [1e-12, 0.1]), not a work knob.
pub fn gamma_constant(precision: f64) -> Result<f64> {
    if !(1e-12..=0.1).contains(&precision) {
        return Err(Error::Domain(format!(
            "supported precision range is [1e-12, 0.1], got {precision}"
        )));
    }
    Ok(big_ratio_f64(
        &gamma_fixed(DEFAULT_LEVELS),
        &(BigUint::one() << FRAC_BITS),
    ))
}

/// Decimal expansion "0.d₁d₂…" of γ, truncated (not rounded) to `digits`
/// fractional digits.
pub fn gamma_digits(digits: u32) -> Result<String> {
    if digits == 0 || digits > 150 {
        return Err(Error::Domain(format!(
            "supported digit range is 1..=150, got {digits}"
        )));
    }
    let scaled = (gamma_fixed(DEFAULT_LEVELS) * BigUint::from(10u32).pow(digits)) >> FRAC_BITS;
    Ok(format!(
        "0.{:0>width$}",
        scaled.to_string(),
        width = digits as usize
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::stats::plane_generator_mean;
    use crate::util::rational_f64;

    #[test]
    fn ten_digit_pin() {
        assert_eq!(gamma_digits(10).unwrap(), "0.2710416936");
        let g = gamma_constant(1e-12).unwrap();
        assert!((g - 0.2710416936).abs() < 1e-9, "{g}");
    }

    #[test]
    fn digit_prefix_stability() {
        let short = gamma_digits(10).unwrap();
        let long = gamma_digits(40).unwrap();
        assert!(long.starts_with(&short));
        assert_eq!(long.len(), 2 + 40);
    }

    #[test]
    fn seed_depth_insensitive() {
        let a = gamma_fixed(5);
        let b = gamma_fixed(6);
        let c = gamma_fixed(7);
        let close = |x: &BigUint, y: &BigUint| {
            let d = if x > y { x - y } else { y - x };
            d < (BigUint::one() << (FRAC_BITS - 120))
        };
        assert!(close(&a, &b));
        assert!(close(&b, &c));
    }

    #[test]
    fn precision_domain() {
        assert!(gamma_constant(1e-13).is_err());
        assert!(gamma_constant(0.2).is_err());
        assert!(gamma_constant(f64::NAN).is_err());
        assert!(gamma_constant(1e-12).is_ok());
        assert!(gamma_constant(0.1).is_ok());
        assert!(gamma_digits(0).is_err());
        assert!(gamma_digits(151).is_err());
    }

    #[test]
    fn matches_small_tree_density() {
        // The exact symmetric-node mean at a modest size already sits near
        // γ·n; a recursion bug would land far away.
        let caps = Caps::default();
        let mean = rational_f64(&plane_generator_mean(12, &caps).unwrap());
        let g = gamma_constant(1e-9).unwrap();
        assert!((mean / 12.0 - g).abs() < 0.15 * g, "{mean}");
    }

    #[test]
    fn isqrt_exactness() {
        for v in [0u64, 1, 2, 3, 4, 15, 16, 17, 10_000, u64::MAX] {
            let big = BigUint::from(v);
            let r = isqrt(&big);
            assert!(&r * &r <= big);
            let r1 = &r + BigUint::one();
            assert!(&r1 * &r1 > big);
        }
    }
}
