//! Exact integer and rational helpers shared across the crate.
//!
//! Everything here is arbitrary precision. The conventions that matter
//! elsewhere are centralized in two places: `binomial` returns 0 for a
//! negative lower argument, and `multinomial` returns 0 as soon as any
//! part is negative. Both conventions are relied on by the coefficient
//! formulas in the transition calculus.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Binomial coefficient `C(n, k)` for integer `n` (possibly negative) and
/// `k >= 0`, via the falling-factorial product. `k < 0` yields 0.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..k {
        num *= BigInt::from(n - j);
        den *= BigInt::from(j + 1);
    }
    num / den
}

/// Multinomial coefficient `top! / (parts[0]! * ... * parts[m]!)`.
///
/// Defined as 0 whenever a part is negative or the parts do not sum to
/// `top`; with no parts it is 1 exactly when `top == 0`.
pub fn multinomial(top: i64, parts: &[i64]) -> BigInt {
    if top < 0 || parts.iter().any(|&p| p < 0) {
        return BigInt::zero();
    }
    if parts.iter().sum::<i64>() != top {
        return BigInt::zero();
    }
    let mut rest = top;
    let mut acc = BigInt::one();
    for &p in parts {
        acc *= binomial(rest, p);
        rest -= p;
    }
    acc
}

/// Integer power with exact arithmetic; `0^0 = 1`.
pub fn int_pow(base: i64, exp: u32) -> BigInt {
    num_traits::pow::pow(BigInt::from(base), exp as usize)
}

/// Renders a rational as `p` or `p/q` with `q > 0`.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p` or `p/q` (base 10, optional leading sign) into a rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// True when the rational is a (possibly negative) integer.
pub fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

/// Floor of a rational as a `BigInt`.
pub fn rational_floor(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

/// Ceiling of a rational as a `BigInt`.
pub fn rational_ceil(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

/// Absolute value helper for rationals.
pub fn rational_abs(r: &BigRational) -> BigRational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(0, 0), BigInt::from(1));
        assert_eq!(binomial(3, 5), BigInt::from(0));
        assert_eq!(binomial(-2, 2), BigInt::from(3));
        assert_eq!(binomial(4, -1), BigInt::from(0));
    }

    #[test]
    fn multinomial_conventions() {
        // multinomial(2; 2, 0) = 1, used by the coefficient formula checks
        assert_eq!(multinomial(2, &[2, 0]), BigInt::from(1));
        assert_eq!(multinomial(4, &[2, 1, 1]), BigInt::from(12));
        // negative part is defined to vanish
        assert_eq!(multinomial(2, &[3, -1]), BigInt::from(0));
        // parts that do not sum to the top vanish
        assert_eq!(multinomial(3, &[1, 1]), BigInt::from(0));
        assert_eq!(multinomial(0, &[]), BigInt::from(1));
    }

    #[test]
    fn rational_round_trip() {
        for s in ["3/2", "-7", "0", "22/7", "-5/3"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert!(parse_rational("1/0").is_none());
        assert_eq!(
            parse_rational("4/2").unwrap(),
            parse_rational("2").unwrap()
        );
    }
}
