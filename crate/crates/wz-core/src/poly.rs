//! Sparse multivariate polynomials over exact rationals.
//!
//! A [`Context`] fixes the ordered name list (variables first, then symbolic
//! parameters); a [`MultiPoly`] is a term map from exponent vectors to nonzero
//! rational coefficients. Term order is graded lexicographic, so "leading
//! coefficient" is well defined and canonical forms are representation checks.

use crate::rat::{bigint_gcd, Rat};
use num::{BigInt, One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("incompatible variable/parameter lists: {0} vs {1}")]
    IncompatibleContext(String, String),
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("denominator vanishes at {0}")]
    Pole(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("point does not bind `{0}`")]
    UnboundName(String),
}

/// Ordered name environment shared by all polynomials of one computation.
/// `names[..vars]` are variables, `names[vars..]` are parameters.
#[derive(Debug, PartialEq, Eq)]
pub struct Context {
    names: Vec<String>,
    vars: usize,
}

pub type CtxRef = Arc<Context>;

impl Context {
    pub fn new<S: Into<String>>(variables: Vec<S>, parameters: Vec<S>) -> CtxRef {
        let vars = variables.len();
        let mut names: Vec<String> = variables.into_iter().map(Into::into).collect();
        names.extend(parameters.into_iter().map(Into::into));
        debug_assert!(
            names.iter().collect::<std::collections::BTreeSet<_>>().len() == names.len(),
            "duplicate names in context"
        );
        Arc::new(Context { names, vars })
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn num_vars(&self) -> usize {
        self.vars
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_variable(&self, idx: usize) -> bool {
        idx < self.vars
    }

    fn describe(&self) -> String {
        format!("[{}]", self.names.join(","))
    }
}

fn same_ctx(a: &CtxRef, b: &CtxRef) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub(crate) fn check_ctx(a: &CtxRef, b: &CtxRef) -> Result<(), ArithError> {
    if same_ctx(a, b) {
        Ok(())
    } else {
        Err(ArithError::IncompatibleContext(a.describe(), b.describe()))
    }
}

/// Exponent vector with graded-lexicographic order (degree first, then lex,
/// earlier names weigh more).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial. No zero coefficients are stored, so
/// equality of term maps is equality of polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    ctx: CtxRef,
    terms: BTreeMap<Monomial, Rat>,
}

impl MultiPoly {
    pub fn zero(ctx: &CtxRef) -> Self {
        MultiPoly { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &CtxRef, c: Rat) -> Self {
        let mut p = Self::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; ctx.arity()]), c);
        }
        p
    }

    pub fn one(ctx: &CtxRef) -> Self {
        Self::constant(ctx, Rat::one())
    }

    pub fn int(ctx: &CtxRef, v: i64) -> Self {
        Self::constant(ctx, Rat::from_integer(BigInt::from(v)))
    }

    /// The polynomial `name` (a single first-degree term).
    pub fn var(ctx: &CtxRef, name: &str) -> Result<Self, ArithError> {
        let idx = ctx.index_of(name).ok_or_else(|| ArithError::UnknownName(name.into()))?;
        Ok(Self::var_idx(ctx, idx))
    }

    pub fn var_idx(ctx: &CtxRef, idx: usize) -> Self {
        let mut exps = vec![0; ctx.arity()];
        exps[idx] = 1;
        let mut p = Self::zero(ctx);
        p.terms.insert(Monomial(exps), Rat::one());
        p
    }

    pub fn from_terms(ctx: &CtxRef, terms: Vec<(Vec<u32>, Rat)>) -> Self {
        let mut p = Self::zero(ctx);
        for (exps, c) in terms {
            debug_assert_eq!(exps.len(), ctx.arity());
            p.add_term(Monomial(exps), c);
        }
        p
    }

    pub fn ctx(&self) -> &CtxRef {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_constant())
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map(|c| c.is_one()).unwrap_or(false)
    }

    /// Some(c) when the polynomial is the constant c.
    pub fn constant_value(&self) -> Option<Rat> {
        if self.is_zero() {
            Some(Rat::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    /// Leading (greatest) monomial and coefficient under graded lex.
    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rat {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rat::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ArithError> {
        check_ctx(&self.ctx, &other.ctx)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ArithError> {
        check_ctx(&self.ctx, &other.ctx)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ArithError> {
        check_ctx(&self.ctx, &other.ctx)?;
        let mut out = Self::zero(&self.ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base).unwrap();
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base).unwrap();
            }
        }
        acc
    }

    /// Degree in one name.
    pub fn degree_in(&self, idx: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[idx]).max()
    }

    /// Coefficient of name^d as a polynomial in the remaining names
    /// (same context, that slot zeroed).
    pub fn coeff_of_power(&self, idx: usize, d: u32) -> MultiPoly {
        let mut out = Self::zero(&self.ctx);
        for (m, c) in &self.terms {
            if m.0[idx] == d {
                let mut e = m.0.clone();
                e[idx] = 0;
                out.add_term(Monomial(e), c.clone());
            }
        }
        out
    }

    /// All coefficients viewed as univariate in `idx`, index = power.
    pub fn coeffs_in(&self, idx: usize) -> Vec<MultiPoly> {
        let d = match self.degree_in(idx) {
            None => return vec![],
            Some(d) => d,
        };
        (0..=d).map(|i| self.coeff_of_power(idx, i)).collect()
    }

    /// Substitute name `idx` by `idx + delta` (shift), exactly.
    pub fn shift(&self, idx: usize, delta: i64) -> Self {
        if delta == 0 {
            return self.clone();
        }
        let d = Rat::from_integer(BigInt::from(delta));
        let mut out = Self::zero(&self.ctx);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            // (x + delta)^e expanded binomially
            let mut binom = Rat::one();
            let mut dpow = Rat::one();
            for i in (0..=e).rev() {
                // coefficient of x^i: C(e, i) * delta^(e-i)
                let mut exps = m.0.clone();
                exps[idx] = i;
                out.add_term(Monomial(exps), c * &binom * &dpow);
                if i > 0 {
                    binom = binom * Rat::from_integer(BigInt::from(i)) / Rat::from_integer(BigInt::from(e - i + 1));
                    dpow *= &d;
                }
            }
        }
        out
    }

    /// Substitute name `idx` by an arbitrary polynomial (Horner in `idx`).
    pub fn substitute(&self, idx: usize, value: &MultiPoly) -> Result<Self, ArithError> {
        check_ctx(&self.ctx, &value.ctx)?;
        let coeffs = self.coeffs_in(idx);
        if coeffs.is_empty() {
            return Ok(Self::zero(&self.ctx));
        }
        let mut acc = Self::zero(&self.ctx);
        for c in coeffs.into_iter().rev() {
            acc = acc.checked_mul(value)?.checked_add(&c)?;
        }
        Ok(acc)
    }

    /// Full evaluation: the point must bind every name.
    pub fn evaluate(&self, point: &BTreeMap<String, Rat>) -> Result<Rat, ArithError> {
        let mut values = Vec::with_capacity(self.ctx.arity());
        for name in self.ctx.names() {
            values.push(point.get(name).ok_or_else(|| ArithError::UnboundName(name.clone()))?.clone());
        }
        Ok(self.evaluate_slice(&values))
    }

    pub fn evaluate_slice(&self, values: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &values[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Bind a subset of names to rationals, keeping the rest symbolic.
    pub fn eval_partial(&self, bindings: &BTreeMap<usize, Rat>) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exps = m.0.clone();
            for (&idx, val) in bindings {
                for _ in 0..exps[idx] {
                    coeff *= val;
                }
                exps[idx] = 0;
            }
            out.add_term(Monomial(exps), coeff);
        }
        out
    }

    /// Rational content: gcd of numerators over lcm of denominators, with the
    /// sign of the leading coefficient. Zero polynomial has content 0.
    pub fn content(&self) -> Rat {
        if self.is_zero() {
            return Rat::zero();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = bigint_gcd(&num_gcd, c.numer());
            den_lcm = &den_lcm * c.denom() / bigint_gcd(&den_lcm, c.denom());
        }
        let mut content = Rat::new(num_gcd, den_lcm);
        if self.leading_coeff().is_negative() {
            content = -content;
        }
        content
    }

    /// Divide by the content: integer-coprime coefficients, positive leading
    /// coefficient. Zero stays zero.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.content().recip())
    }

    /// Exact division; None when `d` does not divide exactly.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        check_ctx(&self.ctx, &d.ctx).ok()?;
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (dm, dc) = d.leading().unwrap();
        let dm = dm.clone();
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.ctx);
        while !rem.is_zero() {
            let (rm, rc) = rem.leading().unwrap();
            let qm = rm.try_div(&dm)?;
            let qc = rc / &dc;
            let mut t = Self::zero(&self.ctx);
            t.terms.insert(qm, qc);
            rem = rem.checked_sub(&t.checked_mul(d).unwrap()).unwrap();
            quot = quot.checked_add(&t).unwrap();
        }
        Some(quot)
    }

    /// First name (lowest index) that occurs with positive degree.
    fn main_name(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 && best.map(|b| i < b).unwrap_or(true) {
                    best = Some(i);
                }
            }
        }
        best
    }

    /// Content with respect to one name: gcd of the univariate coefficients.
    fn content_in(&self, idx: usize) -> MultiPoly {
        let mut g = Self::zero(&self.ctx);
        for c in self.coeffs_in(idx) {
            if !c.is_zero() {
                g = poly_gcd(&g, &c);
                if g.is_one() {
                    break;
                }
            }
        }
        g
    }

    /// True pseudo-remainder: lc(b)^(deg a - deg b + 1) * a rem b in `idx`.
    fn prem(&self, b: &Self, idx: usize) -> Self {
        let da = self.degree_in(idx).unwrap_or(0);
        let db = b.degree_in(idx).expect("prem: zero divisor");
        if da < db {
            return self.clone();
        }
        let lcb = b.coeff_of_power(idx, db);
        let mut r = self.clone();
        let mut e = da - db + 1;
        loop {
            let dr = match r.degree_in(idx) {
                None => break,
                Some(d) => d,
            };
            if dr < db {
                break;
            }
            let lcr = r.coeff_of_power(idx, dr);
            let mut xpow = vec![0u32; self.ctx.arity()];
            xpow[idx] = dr - db;
            let shift_mono = MultiPoly::from_terms(&self.ctx, vec![(xpow, Rat::one())]);
            r = &(&r * &lcb) - &(&(b * &lcr) * &shift_mono);
            e -= 1;
        }
        for _ in 0..e {
            r = &r * &lcb;
        }
        r
    }

    /// Re-express over another context containing at least the same names.
    pub fn remap(&self, new_ctx: &CtxRef) -> Result<MultiPoly, ArithError> {
        let mut mapping = Vec::with_capacity(self.ctx.arity());
        for name in self.ctx.names() {
            mapping.push(new_ctx.index_of(name).ok_or_else(|| ArithError::UnknownName(name.clone()))?);
        }
        let mut out = MultiPoly::zero(new_ctx);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; new_ctx.arity()];
            for (i, &e) in m.0.iter().enumerate() {
                exps[mapping[i]] += e;
            }
            out.add_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Canonical serialization: descending graded-lex terms with explicit
    /// `*` and `^`, e.g. `3*n^2*k - 2*n + 1`.
    pub fn to_canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || m.is_constant() {
                factors.push(crate::rat::rat_to_string(&mag));
            }
            for (idx, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    factors.push(self.ctx.name(idx).to_string());
                } else if e > 1 {
                    factors.push(format!("{}^{}", self.ctx.name(idx), e));
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                self.$checked(rhs).expect("polynomial contexts must match")
            }
        }
        impl $trait for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rat::one())
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

/// Greatest common divisor, integer-primitive with positive leading
/// coefficient. gcd(0, 0) = 0. Recursive content/primitive-part reduction on
/// the first name present, with a subresultant pseudo-remainder sequence for
/// the primitive parts (all divisions exact, no per-step content stripping).
pub fn poly_gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    check_ctx(a.ctx(), b.ctx()).expect("polynomial contexts must match");
    if a.is_zero() {
        return b.primitive_part();
    }
    if b.is_zero() {
        return a.primitive_part();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(a.ctx());
    }
    let idx = match (a.main_name(), b.main_name()) {
        (Some(x), Some(y)) => x.min(y),
        _ => unreachable!("non-constant polynomials have a main name"),
    };
    let ca = a.content_in(idx);
    let cb = b.content_in(idx);
    let cont_gcd = poly_gcd(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(idx).unwrap_or(0) < q.degree_in(idx).unwrap_or(0) {
        std::mem::swap(&mut p, &mut q);
    }

    // fast paths: equal primitive parts, or one divides the other
    let pp = p.primitive_part();
    let qq = q.primitive_part();
    if pp == qq {
        return cont_gcd.checked_mul(&pp).unwrap().primitive_part();
    }
    if pp.div_exact(&qq).is_some() {
        return cont_gcd.checked_mul(&qq).unwrap().primitive_part();
    }

    // subresultant PRS on the primitive parts
    let ctx = a.ctx();
    let mut u = pp;
    let mut v = qq;
    let mut g = MultiPoly::one(ctx);
    let mut h = MultiPoly::one(ctx);
    loop {
        let du = u.degree_in(idx).unwrap_or(0);
        let dv = v.degree_in(idx).unwrap_or(0);
        let delta = du - dv;
        let r = u.prem(&v, idx);
        if r.is_zero() {
            // strip the content in idx that the pseudo-remainders introduced
            let c = v.content_in(idx);
            let vpp = v.div_exact(&c).expect("content divides");
            return cont_gcd.checked_mul(&vpp.primitive_part()).unwrap().primitive_part();
        }
        if r.degree_in(idx).unwrap_or(0) == 0 {
            // nonzero remainder free of idx: primitive parts are coprime
            return cont_gcd;
        }
        let divisor = g.checked_mul(&h.pow(delta)).unwrap();
        let r = r.div_exact(&divisor).expect("subresultant division is exact");
        u = v;
        v = r;
        g = u.coeff_of_power(idx, u.degree_in(idx).unwrap());
        h = match delta {
            0 => h,
            1 => g.clone(),
            d => g.pow(d).div_exact(&h.pow(d - 1)).expect("subresultant h-update is exact"),
        };
    }
}

/// lcm, normalized like `poly_gcd`. lcm(0, x) = 0.
pub fn poly_lcm(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() || b.is_zero() {
        return MultiPoly::zero(a.ctx());
    }
    let g = poly_gcd(a, b);
    a.div_exact(&g).unwrap().checked_mul(b).unwrap().primitive_part()
}

/// Resultant of `a` and `b` with respect to name `idx`, via the Sylvester
/// matrix and fraction-free elimination. Zero iff the two share a factor of
/// positive degree in `idx` (for nonzero inputs).
pub fn resultant_in(a: &MultiPoly, b: &MultiPoly, idx: usize) -> MultiPoly {
    let da = a.degree_in(idx).unwrap_or(0) as usize;
    let db = b.degree_in(idx).unwrap_or(0) as usize;
    let ctx = a.ctx();
    if da == 0 && db == 0 {
        return MultiPoly::one(ctx);
    }
    if a.is_zero() || b.is_zero() {
        return MultiPoly::zero(ctx);
    }
    if da == 0 {
        return a.pow(db as u32);
    }
    if db == 0 {
        return b.pow(da as u32);
    }
    let ac = a.coeffs_in(idx);
    let bc = b.coeffs_in(idx);
    let n = da + db;
    let mut rows: Vec<Vec<MultiPoly>> = Vec::with_capacity(n);
    for i in 0..db {
        let mut row = vec![MultiPoly::zero(ctx); n];
        for (j, c) in ac.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..da {
        let mut row = vec![MultiPoly::zero(ctx); n];
        for (j, c) in bc.iter().rev().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    crate::solve::determinant(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn ctx2() -> CtxRef {
        Context::new(vec!["n", "k"], vec![])
    }

    fn k(ctx: &CtxRef) -> MultiPoly {
        MultiPoly::var(ctx, "k").unwrap()
    }

    fn n(ctx: &CtxRef) -> MultiPoly {
        MultiPoly::var(ctx, "n").unwrap()
    }

    #[test]
    fn add_cancels() {
        let ctx = ctx2();
        let kp = k(&ctx);
        let a = &kp + &MultiPoly::one(&ctx);
        let b = &kp - &MultiPoly::one(&ctx);
        let s = &a + &b;
        assert_eq!(s, kp.scale(&rat_int(2)));
    }

    #[test]
    fn cube_of_binomial_expands() {
        let ctx = Context::new(vec![], vec!["a", "b"]);
        let a = MultiPoly::var(&ctx, "a").unwrap();
        let b = MultiPoly::var(&ctx, "b").unwrap();
        let s = &a + &b;
        let cube = s.pow(3);
        let expected = MultiPoly::from_terms(
            &ctx,
            vec![
                (vec![3, 0], rat_int(1)),
                (vec![2, 1], rat_int(3)),
                (vec![1, 2], rat_int(3)),
                (vec![0, 3], rat_int(1)),
            ],
        );
        assert_eq!(cube, expected);
    }

    #[test]
    fn mul_by_zero_annihilates() {
        let ctx = ctx2();
        let p = &n(&ctx) + &k(&ctx).pow(2);
        assert!(p.checked_mul(&MultiPoly::zero(&ctx)).unwrap().is_zero());
    }

    #[test]
    fn incompatible_contexts_error() {
        let c1 = ctx2();
        let c2 = Context::new(vec!["n"], vec![]);
        let p = MultiPoly::one(&c1);
        let q = MultiPoly::one(&c2);
        assert!(matches!(p.checked_add(&q), Err(ArithError::IncompatibleContext(_, _))));
    }

    #[test]
    fn gcd_of_shifted_squares() {
        // (k-1)(k+1) vs (k-1)^2
        let ctx = ctx2();
        let km1 = &k(&ctx) - &MultiPoly::one(&ctx);
        let kp1 = &k(&ctx) + &MultiPoly::one(&ctx);
        let g = poly_gcd(&(&km1 * &kp1), &(&km1 * &km1));
        assert_eq!(g, km1);
    }

    #[test]
    fn gcd_pulls_cross_variable_factor() {
        // n*k + n vs k + 1
        let ctx = ctx2();
        let kp1 = &k(&ctx) + &MultiPoly::one(&ctx);
        let p = &n(&ctx) * &kp1;
        let g = poly_gcd(&p, &kp1);
        assert_eq!(g, kp1);
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let ctx = ctx2();
        let g = poly_gcd(&k(&ctx).scale(&rat_int(2)), &n(&ctx).scale(&rat_int(3)));
        assert!(g.is_one());
        assert!(poly_gcd(&MultiPoly::zero(&ctx), &MultiPoly::zero(&ctx)).is_zero());
    }

    #[test]
    fn gcd_divides_both() {
        let ctx = ctx2();
        let p = (&k(&ctx) + &n(&ctx)).pow(2).scale(&rat(3, 2));
        let q = (&k(&ctx) + &n(&ctx)) * (&k(&ctx) - &n(&ctx));
        let g = poly_gcd(&p, &q);
        assert!(p.div_exact(&g).is_some());
        assert!(q.div_exact(&g).is_some());
        let pp = p.div_exact(&g).unwrap();
        let qq = q.div_exact(&g).unwrap();
        assert!(poly_gcd(&pp, &qq).is_one());
    }

    #[test]
    fn shift_is_exact() {
        let ctx = ctx2();
        // (k+1)^2 shifted by -1 in k gives k^2
        let p = (&k(&ctx) + &MultiPoly::one(&ctx)).pow(2);
        assert_eq!(p.shift(1, -1), k(&ctx).pow(2));
    }

    #[test]
    fn substitute_horner() {
        let ctx = ctx2();
        // k^2 + 1 with k -> n + 2
        let p = &k(&ctx).pow(2) + &MultiPoly::one(&ctx);
        let np2 = &n(&ctx) + &MultiPoly::int(&ctx, 2);
        let got = p.substitute(1, &np2).unwrap();
        let want = &np2.pow(2) + &MultiPoly::one(&ctx);
        assert_eq!(got, want);
    }

    #[test]
    fn canonical_string_format() {
        let ctx = ctx2();
        let p = MultiPoly::from_terms(
            &ctx,
            vec![
                (vec![2, 1], rat_int(3)),
                (vec![1, 0], rat_int(-2)),
                (vec![0, 0], rat_int(1)),
            ],
        );
        assert_eq!(p.to_canonical_string(), "3*n^2*k - 2*n + 1");
        assert_eq!(MultiPoly::zero(&ctx).to_canonical_string(), "0");
        let half_k = k(&ctx).scale(&rat(1, 2));
        assert_eq!(half_k.to_canonical_string(), "1/2*k");
    }

    #[test]
    fn resultant_detects_common_roots() {
        let ctx = ctx2();
        let km1 = &k(&ctx) - &MultiPoly::one(&ctx);
        let kp2 = &k(&ctx) + &MultiPoly::int(&ctx, 2);
        assert!(resultant_in(&(&km1 * &kp2), &km1, 1).is_zero());
        let r = resultant_in(&km1, &kp2, 1);
        assert_eq!(r.constant_value(), Some(rat_int(3)));
    }

    #[test]
    fn eval_partial_binds_subset() {
        let ctx = ctx2();
        let p = &(&n(&ctx) * &k(&ctx)) + &k(&ctx); // n*k + k
        let mut b = BTreeMap::new();
        b.insert(0usize, rat_int(3));
        let got = p.eval_partial(&b);
        assert_eq!(got, k(&ctx).scale(&rat_int(4)));
    }
}
