//! Exact rational helpers: the `p/q` literal syntax, conversions, and
//! certified rational bounds for real powers `b^e`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used for coefficients, exponents and radii.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `p/q` (q > 0) or an integer `p`. Reduction is performed, so
/// `2/4` parses as `1/2`; use [`parse_canonical`] to reject unreduced forms.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((p, q)) => {
            let p = p.parse::<BigInt>().ok()?;
            let q = q.parse::<BigInt>().ok()?;
            if !q.is_positive() {
                return None;
            }
            Some(Rational::new(p, q))
        }
    }
}

/// Like [`parse`] but only accepts the canonical spelling (gcd-reduced,
/// positive denominator, no `/1`).
pub fn parse_canonical(s: &str) -> Option<Rational> {
    let r = parse(s)?;
    (format(&r) == s.trim()).then_some(r)
}

/// Canonical textual form: `p` for integers, `p/q` otherwise.
pub fn format(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Domain(format!("non-finite value {x}")))
}

fn pow_int(b: &Rational, e: &BigInt) -> Rational {
    let e = e.to_i32().expect("exponent numerator too large");
    num_traits::pow::Pow::pow(b, e)
}

const BOUND_BITS: i32 = 48;

fn dyadic(x: f64, round_up: bool) -> Rational {
    let scale = 2f64.powi(BOUND_BITS);
    let v = if round_up { (x * scale).ceil() } else { (x * scale).floor() };
    let num = BigInt::from(v.max(0.0) as u128);
    Rational::new(num, BigInt::from(1u128 << BOUND_BITS))
}

/// Certified bounds `lo ≤ b^e ≤ hi` for `b ≥ 0`, `e ≥ 0`.
///
/// Exact when `e` is an integer. Otherwise the bounds are dyadic rationals
/// verified by comparing integer powers, so no floating-point rounding
/// leaks into the result.
pub fn pow_bounds(b: &Rational, e: &Rational) -> (Rational, Rational) {
    assert!(!b.is_negative() && !e.is_negative(), "pow_bounds needs b, e >= 0");
    if e.is_zero() {
        return (Rational::one(), Rational::one());
    }
    if b.is_zero() || b.is_one() {
        return (b.clone(), b.clone());
    }
    if e.is_integer() {
        let v = pow_int(b, e.numer());
        return (v.clone(), v);
    }
    let target = pow_int(b, e.numer());
    let q = e.denom();
    let approx = to_f64(b).powf(to_f64(e));
    let mut hi = dyadic(approx * (1.0 + 1e-12) + f64::MIN_POSITIVE, true);
    while pow_int(&hi, q) < target {
        hi *= frac(2, 1);
    }
    let mut lo = dyadic(approx * (1.0 - 1e-12), false);
    while pow_int(&lo, q) > target {
        lo /= frac(2, 1);
    }
    (lo, hi)
}

pub fn pow_upper(b: &Rational, e: &Rational) -> Rational {
    pow_bounds(b, e).1
}

pub fn pow_lower(b: &Rational, e: &Rational) -> Rational {
    pow_bounds(b, e).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("3/2"), Some(frac(3, 2)));
        assert_eq!(parse("-7"), Some(int(-7)));
        assert_eq!(parse("2/4"), Some(frac(1, 2)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("1/-2"), None);
        assert_eq!(parse("x"), None);
        assert_eq!(parse_canonical("2/4"), None);
        assert_eq!(parse_canonical("4/1"), None);
        assert_eq!(format(&frac(-3, 6)), "-1/2");
        assert_eq!(format(&int(5)), "5");
    }

    #[test]
    fn pow_bounds_bracket_the_real_power() {
        let cases = [(frac(1, 2), frac(1, 2)), (frac(3, 4), frac(5, 3)), (int(2), frac(1, 3))];
        for (b, e) in cases {
            let (lo, hi) = pow_bounds(&b, &e);
            let exact = to_f64(&b).powf(to_f64(&e));
            assert!(lo <= hi);
            assert!(to_f64(&lo) <= exact + 1e-15 && exact <= to_f64(&hi) + 1e-15);
            assert!(to_f64(&hi) - to_f64(&lo) < 1e-9);
        }
        assert_eq!(pow_bounds(&frac(1, 2), &int(3)), (frac(1, 8), frac(1, 8)));
    }
}
