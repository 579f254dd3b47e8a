//! Canonical quotients of multivariate polynomials.
//!
//! A [`RationalFunction`] is stored with numerator and denominator coprime,
//! jointly integer-primitive, and the denominator's leading coefficient
//! positive, so equal values have identical representations and equality is a
//! representation check.

use crate::poly::{check_ctx, poly_gcd, ArithError, CtxRef, MultiPoly};
use crate::rat::{bigint_gcd, Rat};
use num::{BigInt, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    /// Canonicalize num/den. Errors when den = 0.
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, ArithError> {
        check_ctx(num.ctx(), den.ctx())?;
        if den.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        if num.is_zero() {
            let ctx = num.ctx().clone();
            return Ok(RationalFunction { num, den: MultiPoly::one(&ctx) });
        }
        if den.is_constant() || num.is_constant() {
            return Ok(Self::rescale(num, den));
        }
        let g = poly_gcd(&num, &den);
        let num = num.div_exact(&g).expect("gcd divides");
        let den = den.div_exact(&g).expect("gcd divides");
        Ok(Self::rescale(num, den))
    }

    /// Joint scaling only (numerator and denominator already coprime):
    /// integer coefficients, jointly coprime, den lead > 0.
    fn rescale(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            let one = MultiPoly::one(den.ctx());
            return RationalFunction { num, den: one };
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in num.terms().map(|(_, c)| c).chain(den.terms().map(|(_, c)| c)) {
            num_gcd = bigint_gcd(&num_gcd, c.numer());
            den_lcm = &den_lcm * c.denom() / bigint_gcd(&den_lcm, c.denom());
        }
        let mut scale = Rat::new(den_lcm, num_gcd);
        if den.leading_coeff().is_negative() {
            scale = -scale;
        }
        RationalFunction { num: num.scale(&scale), den: den.scale(&scale) }
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let one = MultiPoly::one(p.ctx());
        Self::new(p, one).expect("denominator 1")
    }

    pub fn zero(ctx: &CtxRef) -> Self {
        Self::from_poly(MultiPoly::zero(ctx))
    }

    pub fn one(ctx: &CtxRef) -> Self {
        Self::from_poly(MultiPoly::one(ctx))
    }

    pub fn constant(ctx: &CtxRef, c: Rat) -> Self {
        Self::from_poly(MultiPoly::constant(ctx, c))
    }

    pub fn var(ctx: &CtxRef, name: &str) -> Result<Self, ArithError> {
        Ok(Self::from_poly(MultiPoly::var(ctx, name)?))
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn ctx(&self) -> &CtxRef {
        self.num.ctx()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// Some(c) when the value is the constant c.
    pub fn constant_value(&self) -> Option<Rat> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(n / d)
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ArithError> {
        check_ctx(self.ctx(), other.ctx())?;
        // common-denominator form via gcd of the denominators
        let g = poly_gcd(&self.den, &other.den);
        let da = self.den.div_exact(&g).expect("gcd divides");
        let db = other.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &db) + &(&other.num * &da);
        let den = &self.den * &db;
        Self::new(num, den)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ArithError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ArithError> {
        check_ctx(self.ctx(), other.ctx())?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ctx()));
        }
        // cross-cancel; the remaining pieces are pairwise coprime
        let g1 = poly_gcd(&self.num, &other.den);
        let g2 = poly_gcd(&other.num, &self.den);
        let n = &self.num.div_exact(&g1).unwrap() * &other.num.div_exact(&g2).unwrap();
        let d = &self.den.div_exact(&g2).unwrap() * &other.den.div_exact(&g1).unwrap();
        Ok(Self::rescale(n, d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ArithError> {
        if other.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        self.checked_mul(&RationalFunction::rescale(other.den.clone(), other.num.clone()))
    }

    pub fn recip(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Self::rescale(self.den.clone(), self.num.clone()))
    }

    /// Integer power; negative exponents invert (value must be nonzero).
    pub fn pow(&self, e: i64) -> Result<Self, ArithError> {
        if e < 0 {
            return self.recip()?.pow(-e);
        }
        // powers of a canonical quotient stay coprime
        Ok(Self::rescale(self.num.pow(e as u32), self.den.pow(e as u32)))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.ctx());
        }
        Self::rescale(self.num.scale(c), self.den.clone())
    }

    /// Shift one name by an integer: f(..., x, ...) -> f(..., x + delta, ...).
    pub fn shift(&self, idx: usize, delta: i64) -> Self {
        // shifting is a ring automorphism, so coprimality is preserved
        Self::rescale(self.num.shift(idx, delta), self.den.shift(idx, delta))
    }

    /// Exact evaluation; pole error (with the point as witness) when the
    /// denominator vanishes.
    pub fn evaluate(&self, point: &BTreeMap<String, Rat>) -> Result<Rat, ArithError> {
        let d = self.den.evaluate(point)?;
        if d.is_zero() {
            let witness: Vec<String> = point
                .iter()
                .map(|(k, v)| format!("{}={}", k, crate::rat::rat_to_string(v)))
                .collect();
            return Err(ArithError::Pole(witness.join(", ")));
        }
        Ok(self.num.evaluate(point)? / d)
    }

    pub fn evaluate_slice(&self, values: &[Rat]) -> Result<Rat, ArithError> {
        let d = self.den.evaluate_slice(values);
        if d.is_zero() {
            let witness: Vec<String> = self
                .ctx()
                .names()
                .iter()
                .zip(values)
                .map(|(k, v)| format!("{}={}", k, crate::rat::rat_to_string(v)))
                .collect();
            return Err(ArithError::Pole(witness.join(", ")));
        }
        Ok(self.num.evaluate_slice(values) / d)
    }

    /// Bind a subset of names, keeping the rest symbolic. Errors when the
    /// denominator collapses to zero under the bindings.
    pub fn eval_partial(&self, bindings: &BTreeMap<usize, Rat>) -> Result<Self, ArithError> {
        Self::new(self.num.eval_partial(bindings), self.den.eval_partial(bindings))
    }

    /// Serialize as `(<num>)/(<den>)` with canonical polynomial strings.
    pub fn to_canonical_string(&self) -> String {
        format!("({})/({})", self.num.to_canonical_string(), self.den.to_canonical_string())
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

macro_rules! rf_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: &RationalFunction) -> RationalFunction {
                self.$checked(rhs).expect("rational function arithmetic")
            }
        }
        impl $trait for RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$method(&rhs)
            }
        }
    };
}

rf_binop!(Add, add, checked_add);
rf_binop!(Sub, sub, checked_sub);
rf_binop!(Mul, mul, checked_mul);
rf_binop!(Div, div, checked_div);

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        self.scale(&-Rat::one())
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Context;
    use crate::rat::{rat, rat_int};

    fn ctx() -> CtxRef {
        Context::new(vec!["n", "k"], vec![])
    }

    fn k(c: &CtxRef) -> MultiPoly {
        MultiPoly::var(c, "k").unwrap()
    }

    #[test]
    fn common_factor_cancels() {
        let c = ctx();
        let num = &k(&c).pow(2) - &MultiPoly::one(&c);
        let den = &k(&c) - &MultiPoly::one(&c);
        let r = RationalFunction::new(num, den).unwrap();
        assert_eq!(r.num(), &(&k(&c) + &MultiPoly::one(&c)));
        assert!(r.den().is_one());
    }

    #[test]
    fn content_is_removed_jointly() {
        let c = ctx();
        let num = (&k(&c) + &MultiPoly::one(&c)).scale(&rat_int(2));
        let den = MultiPoly::int(&c, 4);
        let r = RationalFunction::new(num, den).unwrap();
        assert_eq!(r.num().to_canonical_string(), "k + 1");
        assert_eq!(r.den().to_canonical_string(), "2");
    }

    #[test]
    fn zero_normalizes_to_zero_over_one() {
        let c = ctx();
        let den = &k(&c).pow(3) + &MultiPoly::int(&c, 7);
        let r = RationalFunction::new(MultiPoly::zero(&c), den).unwrap();
        assert!(r.num().is_zero());
        assert!(r.den().is_one());
    }

    #[test]
    fn zero_denominator_is_an_error() {
        let c = ctx();
        assert!(matches!(
            RationalFunction::new(MultiPoly::one(&c), MultiPoly::zero(&c)),
            Err(ArithError::DivisionByZero)
        ));
    }

    #[test]
    fn scaling_num_and_den_is_invisible() {
        let c = ctx();
        let p = &k(&c) + &MultiPoly::one(&c);
        let q = MultiPoly::int(&c, 2);
        let a = (&k(&c) + &MultiPoly::var(&c, "n").unwrap()).scale(&rat(7, 3));
        let r1 = RationalFunction::new(p.clone(), q.clone()).unwrap();
        let r2 = RationalFunction::new(&p * &a, &q * &a).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn evaluation_and_poles() {
        let c = ctx();
        let r = RationalFunction::new(&k(&c) + &MultiPoly::one(&c), MultiPoly::int(&c, 2)).unwrap();
        let mut pt = BTreeMap::new();
        pt.insert("k".to_string(), rat_int(3));
        pt.insert("n".to_string(), rat_int(0));
        assert_eq!(r.evaluate(&pt).unwrap(), rat_int(2));

        let pole = RationalFunction::new(&k(&c) + &MultiPoly::one(&c), &k(&c) - &MultiPoly::int(&c, 3)).unwrap();
        assert!(matches!(pole.evaluate(&pt), Err(ArithError::Pole(_))));
    }

    #[test]
    fn shift_composes_with_arithmetic() {
        let c = ctx();
        // r(k) = k/(k+1); r(k+1) = (k+1)/(k+2)
        let r = RationalFunction::new(k(&c), &k(&c) + &MultiPoly::one(&c)).unwrap();
        let s = r.shift(1, 1);
        assert_eq!(s.num().to_canonical_string(), "k + 1");
        assert_eq!(s.den().to_canonical_string(), "k + 2");
    }
}
