//! Exact rational scalars: thin helpers over arbitrary-precision rationals.
//!
//! Every coefficient in the kernel is a [`Rat`]: numerator and denominator are
//! arbitrary-precision integers, always stored reduced with a positive
//! denominator (`num_rational` maintains that invariant on construction).

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, Zero};
use std::str::FromStr;

/// Exact rational number. gcd(|num|, den) = 1, den >= 1, zero is 0/1.
pub type Rat = BigRational;

/// Integer as a rational.
pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Build p/q. Panics if q = 0.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Render as `p/q`, or just `p` when the denominator is 1.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p` or `p/q` (optional leading `-`).
pub fn rat_from_string(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        None => BigInt::from_str(s).ok().map(Rat::from_integer),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rat::new(p, q))
            }
        }
    }
}

/// n! as a big integer. Negative arguments are the caller's problem
/// (factorials of negative integers are poles, handled upstream).
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// Binomial coefficient for 0 <= j <= m, by the falling-factorial product.
pub fn binomial(m: u64, j: u64) -> BigInt {
    debug_assert!(j <= m);
    let j = j.min(m - j);
    let mut acc = BigInt::one();
    for i in 0..j {
        acc = acc * BigInt::from(m - i) / BigInt::from(i + 1);
    }
    acc
}

/// base^exp for integer exp; negative exp inverts (base must be nonzero then).
pub fn rat_pow(base: &Rat, exp: i64) -> Option<Rat> {
    if base.is_zero() {
        return match exp {
            e if e > 0 => Some(Rat::zero()),
            0 => Some(Rat::one()),
            _ => None,
        };
    }
    let p = base.pow(exp.unsigned_abs().try_into().ok()?);
    Some(if exp < 0 { p.recip() } else { p })
}

/// gcd of two big integers, nonnegative.
pub fn bigint_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    num::Integer::gcd(a, b)
}

/// Positive divisors of |v|, by trial division. Returns None when |v| is too
/// large to factor cheaply (beyond ~10^12); callers fall back to a bound scan.
pub fn divisors(v: &BigInt) -> Option<Vec<i64>> {
    let v = v.abs();
    if v.is_zero() {
        return Some(vec![]);
    }
    let v: u64 = v.try_into().ok().filter(|&x: &u64| x <= 1_000_000_000_000)?;
    let mut divs = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= v {
        if v % d == 0 {
            divs.push(d as i64);
            if d != v / d {
                divs.push((v / d) as i64);
            }
        }
        d += 1;
    }
    divs.sort_unstable();
    Some(divs)
}

/// Sign of the rational as -1, 0, or 1.
pub fn rat_sign(r: &Rat) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        for s in ["0", "5", "-7", "3/4", "-22/7"] {
            let r = rat_from_string(s).unwrap();
            assert_eq!(rat_to_string(&r), s);
        }
        assert_eq!(rat_to_string(&rat_from_string("6/4").unwrap()), "3/2");
        assert!(rat_from_string("1/0").is_none());
        assert!(rat_from_string("x").is_none());
    }

    #[test]
    fn small_combinatorics() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(50, 25).to_string(), "126410606437752");
    }

    #[test]
    fn pow_handles_negative_exponents() {
        assert_eq!(rat_pow(&rat(2, 3), -2), Some(rat(9, 4)));
        assert_eq!(rat_pow(&rat_int(0), 3), Some(rat_int(0)));
        assert_eq!(rat_pow(&rat_int(0), -1), None);
    }

    #[test]
    fn divisor_enumeration() {
        assert_eq!(divisors(&BigInt::from(-12)).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(&BigInt::from(1)).unwrap(), vec![1]);
    }
}
