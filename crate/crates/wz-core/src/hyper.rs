//! Hypergeometric terms: a summand F(n; k1..kr) represented by its factored
//! kernel (polynomial part, factorials, binomials, geometric factors), the
//! shift quotients F(.., v+1, ..)/F(.., v, ..) as canonical rational
//! functions, an exact integer-point evaluator, and the finite support box.
//!
//! The quotient algebra uses only the rewrites (x+1)!/x! -> x+1 and
//! a^(e+c)/a^e -> a^c. The evaluator is authoritative where a quotient
//! denominator vanishes: factorials of negative integers are poles, and
//! binomial(m, j) evaluates to 0 whenever j < 0 or j > m.

use crate::expr::{expr_to_linear, expr_to_ratfun, Expr, LinearForm};
use crate::poly::{ArithError, Context, CtxRef, MultiPoly};
use crate::rat::{binomial as binom_int, factorial as factorial_int, rat_pow, Rat};
use crate::ratfun::RationalFunction;
use num::{BigInt, One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("not hypergeometric: factor `{factor}`")]
    NotHypergeometric { factor: String },
    #[error("parameter inside factorial/binomial argument: `{factor}`")]
    ParameterInFactorial { factor: String },
    #[error("not a proper term: witness `{witness}`")]
    NotProper { witness: String },
    #[error("summand is identically zero")]
    ZeroTerm,
    #[error("nested sum inside a summand")]
    UnexpectedBinder,
    #[error("evaluation undefined: {witness}")]
    EvalUndefined { witness: String },
    #[error("support is not finite")]
    InfiniteSupport,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// One summand in factored hypergeometric form.
#[derive(Debug, Clone)]
pub struct HyperTerm {
    ctx: CtxRef,
    outer: usize,
    sum_vars: Vec<usize>,
    source: Expr,
    coeff: Rat,
    num_poly: MultiPoly,
    den_poly: MultiPoly,
    factorials: Vec<(LinearForm, i64)>,
    binomials: Vec<(LinearForm, LinearForm, i64)>,
    /// (base restricted to parameters, integer-linear exponent in variables)
    powers: Vec<(RationalFunction, LinearForm)>,
    /// Shift quotient per variable, indexed like the context's variables.
    quotients: Vec<RationalFunction>,
    /// Linear constraints `form >= 0`; F vanishes outside their intersection.
    support: Vec<LinearForm>,
    /// Declared summation bounds per sum variable (None side = unbounded).
    bounds: Vec<(Option<LinearForm>, Option<LinearForm>)>,
}

struct Kernel {
    coeff: Rat,
    num_poly: MultiPoly,
    den_poly: MultiPoly,
    factorials: Vec<(LinearForm, i64)>,
    binomials: Vec<(LinearForm, LinearForm, i64)>,
    powers: Vec<(RationalFunction, LinearForm)>,
}

/// Build a term over a freshly inferred context: outer variable first, then
/// the sum variables in order, then the remaining free names as parameters
/// (alphabetical).
pub fn to_hyper_term(e: &Expr, outer: &str, sum_vars: &[String]) -> Result<HyperTerm, TermError> {
    let mut free = BTreeSet::new();
    e.free_names(&mut free);
    free.remove(outer);
    for v in sum_vars {
        free.remove(v);
    }
    free.remove("inf");
    let mut vars: Vec<String> = vec![outer.to_string()];
    vars.extend(sum_vars.iter().cloned());
    let params: Vec<String> = free.into_iter().collect();
    let ctx = Context::new(vars, params);
    to_hyper_term_in_ctx(e, &ctx, outer, sum_vars)
}

/// Build a term over a caller-supplied context (so several terms can share
/// one coefficient field).
pub fn to_hyper_term_in_ctx(
    e: &Expr,
    ctx: &CtxRef,
    outer: &str,
    sum_vars: &[String],
) -> Result<HyperTerm, TermError> {
    let outer_idx = ctx.index_of(outer).ok_or(ArithError::UnknownName(outer.into()))?;
    let mut sv = Vec::new();
    for v in sum_vars {
        sv.push(ctx.index_of(v).ok_or_else(|| ArithError::UnknownName(v.clone()))?);
    }
    let mut kernel = Kernel {
        coeff: Rat::one(),
        num_poly: MultiPoly::one(ctx),
        den_poly: MultiPoly::one(ctx),
        factorials: Vec::new(),
        binomials: Vec::new(),
        powers: Vec::new(),
    };
    flatten(e, 1, ctx, &mut kernel)?;
    if kernel.coeff.is_zero() || kernel.num_poly.is_zero() {
        return Err(TermError::ZeroTerm);
    }

    let mut term = HyperTerm {
        ctx: ctx.clone(),
        outer: outer_idx,
        sum_vars: sv,
        source: e.clone(),
        coeff: kernel.coeff,
        num_poly: kernel.num_poly,
        den_poly: kernel.den_poly,
        factorials: kernel.factorials,
        binomials: kernel.binomials,
        powers: kernel.powers,
        quotients: Vec::new(),
        support: Vec::new(),
        bounds: Vec::new(),
    };
    term.bounds = vec![(None, None); term.sum_vars.len()];

    for v in 0..ctx.num_vars() {
        term.quotients.push(term.quotient_for(v)?);
    }
    term.support = term.support_constraints();
    Ok(term)
}

fn flatten(e: &Expr, mult: i64, ctx: &CtxRef, k: &mut Kernel) -> Result<(), TermError> {
    match e {
        Expr::Mul(a, b) => {
            flatten(a, mult, ctx, k)?;
            flatten(b, mult, ctx, k)
        }
        Expr::Div(a, b) => {
            flatten(a, mult, ctx, k)?;
            flatten(b, -mult, ctx, k)
        }
        Expr::Pow(base, exp) => {
            if let Expr::Int(c) = &**exp {
                let c = i64::try_from(c.clone())
                    .map_err(|_| TermError::NotHypergeometric { factor: e.to_string() })?;
                return flatten(base, mult * c, ctx, k);
            }
            let lf = expr_to_linear(exp).map_err(|_| TermError::NotHypergeometric { factor: e.to_string() })?;
            check_vars_only(&lf, ctx, e)?;
            let base_rf = expr_to_ratfun(base, ctx)
                .map_err(|_| TermError::NotHypergeometric { factor: e.to_string() })?;
            if depends_on_vars(&base_rf, ctx) {
                return Err(TermError::NotHypergeometric { factor: e.to_string() });
            }
            if base_rf.is_zero() {
                return Err(TermError::NotHypergeometric { factor: e.to_string() });
            }
            k.powers.push((base_rf, lf.scale(mult)));
            Ok(())
        }
        Expr::Factorial(arg) => {
            let lf = expr_to_linear(arg).map_err(|_| TermError::NotHypergeometric { factor: e.to_string() })?;
            if lf.is_constant() {
                return fold_constant_factorial(lf.constant, mult, e, k);
            }
            check_vars_only_strict(&lf, ctx, e)?;
            k.factorials.push((lf, mult));
            Ok(())
        }
        Expr::Binomial(top, bot) => {
            let t = expr_to_linear(top).map_err(|_| TermError::NotHypergeometric { factor: e.to_string() })?;
            let b = expr_to_linear(bot).map_err(|_| TermError::NotHypergeometric { factor: e.to_string() })?;
            if t.is_constant() && b.is_constant() {
                return fold_constant_binomial(t.constant, b.constant, mult, e, k);
            }
            check_vars_only_strict(&t, ctx, e)?;
            check_vars_only_strict(&b, ctx, e)?;
            k.binomials.push((t, b, mult));
            Ok(())
        }
        Expr::Sum { .. } => Err(TermError::UnexpectedBinder),
        Expr::Int(v) => {
            let p = rat_pow(&Rat::from_integer(v.clone()), mult)
                .ok_or_else(|| TermError::NotHypergeometric { factor: e.to_string() })?;
            k.coeff *= p;
            Ok(())
        }
        // anything built from +,-,names: a rational factor
        other => {
            let rf = expr_to_ratfun(other, ctx)
                .map_err(|_| TermError::NotHypergeometric { factor: other.to_string() })?;
            if rf.is_zero() {
                k.coeff = Rat::zero();
                return Ok(());
            }
            let rf = rf.pow(mult)?;
            k.num_poly = &k.num_poly * rf.num();
            k.den_poly = &k.den_poly * rf.den();
            Ok(())
        }
    }
}

fn fold_constant_factorial(c: i64, mult: i64, e: &Expr, k: &mut Kernel) -> Result<(), TermError> {
    if c < 0 {
        return Err(TermError::EvalUndefined { witness: format!("factorial of negative constant in `{e}`") });
    }
    let v = Rat::from_integer(factorial_int(c as u64));
    k.coeff *= rat_pow(&v, mult).ok_or(TermError::ZeroTerm)?;
    Ok(())
}

fn fold_constant_binomial(t: i64, b: i64, mult: i64, e: &Expr, k: &mut Kernel) -> Result<(), TermError> {
    if b < 0 || b > t {
        if mult > 0 {
            k.coeff = Rat::zero();
            return Ok(());
        }
        return Err(TermError::EvalUndefined { witness: format!("zero binomial in a denominator: `{e}`") });
    }
    let v = Rat::from_integer(binom_int(t as u64, b as u64));
    k.coeff *= rat_pow(&v, mult).ok_or(TermError::ZeroTerm)?;
    Ok(())
}

fn check_vars_only(lf: &LinearForm, ctx: &CtxRef, e: &Expr) -> Result<(), TermError> {
    for name in lf.names() {
        match ctx.index_of(name) {
            Some(i) if ctx.is_variable(i) => {}
            _ => return Err(TermError::NotHypergeometric { factor: e.to_string() }),
        }
    }
    Ok(())
}

fn check_vars_only_strict(lf: &LinearForm, ctx: &CtxRef, e: &Expr) -> Result<(), TermError> {
    for name in lf.names() {
        match ctx.index_of(name) {
            Some(i) if ctx.is_variable(i) => {}
            Some(_) => return Err(TermError::ParameterInFactorial { factor: e.to_string() }),
            None => return Err(TermError::NotHypergeometric { factor: e.to_string() }),
        }
    }
    Ok(())
}

fn depends_on_vars(rf: &RationalFunction, ctx: &CtxRef) -> bool {
    (0..ctx.num_vars()).any(|v| {
        rf.num().degree_in(v).unwrap_or(0) > 0 || rf.den().degree_in(v).unwrap_or(0) > 0
    })
}

/// (l + shift)! / l! as a rational function, where shift = c (may be negative).
fn factorial_ratio(lf: &LinearForm, c: i64, ctx: &CtxRef) -> Result<RationalFunction, TermError> {
    let l = lf.to_poly(ctx)?;
    let one = MultiPoly::one(ctx);
    let mut num = MultiPoly::one(ctx);
    let mut den = MultiPoly::one(ctx);
    if c > 0 {
        for i in 1..=c {
            num = &num * &(&l + &one.scale(&Rat::from_integer(BigInt::from(i))));
        }
    } else {
        for i in 0..(-c) {
            den = &den * &(&l - &one.scale(&Rat::from_integer(BigInt::from(i))));
        }
    }
    Ok(RationalFunction::new(num, den)?)
}

impl HyperTerm {
    fn quotient_for(&self, var: usize) -> Result<RationalFunction, TermError> {
        let ctx = &self.ctx;
        let name = ctx.name(var).to_string();
        let mut q = RationalFunction::new(self.num_poly.shift(var, 1), self.num_poly.clone())?;
        q = q.checked_mul(&RationalFunction::new(self.den_poly.clone(), self.den_poly.shift(var, 1))?)?;
        for (lf, m) in &self.factorials {
            let ratio = factorial_ratio(lf, lf.coeff(&name), ctx)?;
            q = q.checked_mul(&ratio.pow(*m)?)?;
        }
        for (t, b, m) in &self.binomials {
            let tb = t.add(&b.scale(-1));
            let rt = factorial_ratio(t, t.coeff(&name), ctx)?;
            let rb = factorial_ratio(b, b.coeff(&name), ctx)?;
            let rtb = factorial_ratio(&tb, tb.coeff(&name), ctx)?;
            let ratio = rt.checked_div(&rb)?.checked_div(&rtb)?;
            q = q.checked_mul(&ratio.pow(*m)?)?;
        }
        for (base, lf) in &self.powers {
            let c = lf.coeff(&name);
            q = q.checked_mul(&base.pow(c)?)?;
        }
        Ok(q)
    }

    fn support_constraints(&self) -> Vec<LinearForm> {
        let mut cs = Vec::new();
        for (t, b, m) in &self.binomials {
            if *m > 0 {
                cs.push(b.clone());
                cs.push(t.add(&b.scale(-1)));
            }
        }
        for (lf, m) in &self.factorials {
            if *m < 0 {
                cs.push(lf.clone());
            }
        }
        cs
    }

    /// Attach declared summation bounds (from the enclosing sum expression);
    /// None means the bound is infinite.
    pub fn with_bounds(mut self, bounds: Vec<(Option<LinearForm>, Option<LinearForm>)>) -> Self {
        assert_eq!(bounds.len(), self.sum_vars.len());
        self.bounds = bounds;
        self
    }

    pub fn ctx(&self) -> &CtxRef {
        &self.ctx
    }

    pub fn outer_idx(&self) -> usize {
        self.outer
    }

    pub fn outer_name(&self) -> &str {
        self.ctx.name(self.outer)
    }

    pub fn sum_var_indices(&self) -> &[usize] {
        &self.sum_vars
    }

    pub fn sum_var_names(&self) -> Vec<String> {
        self.sum_vars.iter().map(|&i| self.ctx.name(i).to_string()).collect()
    }

    pub fn param_names(&self) -> Vec<String> {
        (self.ctx.num_vars()..self.ctx.arity()).map(|i| self.ctx.name(i).to_string()).collect()
    }

    pub fn source(&self) -> &Expr {
        &self.source
    }

    pub fn bounds(&self) -> &[(Option<LinearForm>, Option<LinearForm>)] {
        &self.bounds
    }

    /// F(.., v+1, ..)/F(.., v, ..) for a context variable index.
    pub fn quotient(&self, var: usize) -> &RationalFunction {
        &self.quotients[var]
    }

    /// F(n+1, ..)/F(n, ..).
    pub fn outer_quotient(&self) -> &RationalFunction {
        &self.quotients[self.outer]
    }

    /// F(n+i, ..)/F(n, ..) as a product of shifted outer quotients.
    pub fn outer_shift_ratio(&self, i: usize) -> Result<RationalFunction, ArithError> {
        let mut acc = RationalFunction::one(&self.ctx);
        for m in 0..i {
            acc = acc.checked_mul(&self.quotients[self.outer].shift(self.outer, m as i64))?;
        }
        Ok(acc)
    }

    /// True when the term is a polynomial times factorial/binomial powers of
    /// integer-linear arguments times geometric factors; the witness names a
    /// violating factor otherwise.
    pub fn check_proper(&self) -> (bool, Option<String>) {
        if self.den_poly.is_constant() {
            (true, None)
        } else {
            (false, Some(self.den_poly.to_canonical_string()))
        }
    }

    /// Divide by a closed form (a term with no sum variables) over the same
    /// context; used for sum normalization.
    pub fn div_closed(&self, g: &HyperTerm) -> Result<HyperTerm, TermError> {
        crate::poly::check_ctx(&self.ctx, &g.ctx)?;
        let mut out = self.clone();
        out.coeff /= &g.coeff;
        out.num_poly = &out.num_poly * &g.den_poly;
        out.den_poly = &out.den_poly * &g.num_poly;
        for (lf, m) in &g.factorials {
            out.factorials.push((lf.clone(), -m));
        }
        for (t, b, m) in &g.binomials {
            out.binomials.push((t.clone(), b.clone(), -m));
        }
        for (base, lf) in &g.powers {
            out.powers.push((base.clone(), lf.scale(-1)));
        }
        out.source = Expr::Div(Box::new(self.source.clone()), Box::new(g.source.clone()));
        out.quotients.clear();
        for v in 0..self.ctx.num_vars() {
            out.quotients.push(out.quotient_for(v)?);
        }
        out.support = out.support_constraints();
        Ok(out)
    }

    // -- evaluation ---------------------------------------------------------

    /// Exact value at an integer point binding every variable, with rational
    /// values for every parameter. Zero outside the support; factorials of
    /// negative integers in the numerator are undefined.
    pub fn eval(
        &self,
        vars: &BTreeMap<String, i64>,
        params: &BTreeMap<String, Rat>,
    ) -> Result<Rat, TermError> {
        let witness = || {
            let mut parts: Vec<String> =
                vars.iter().map(|(k, v)| format!("{k}={v}")).collect();
            parts.extend(params.iter().map(|(k, v)| format!("{k}={}", crate::rat::rat_to_string(v))));
            parts.join(", ")
        };
        let mut num_poles = 0i64;
        let mut den_poles = 0i64;
        let mut zero = false;
        let mut acc = self.coeff.clone();

        let mut full_point: BTreeMap<String, Rat> = params.clone();
        for (k, v) in vars {
            full_point.insert(k.clone(), Rat::from_integer(BigInt::from(*v)));
        }

        for (lf, m) in &self.factorials {
            let v = lf.evaluate(vars).ok_or_else(|| TermError::EvalUndefined { witness: witness() })?;
            if v < 0 {
                if *m > 0 {
                    num_poles += m;
                } else {
                    den_poles -= m;
                }
            } else {
                let f = Rat::from_integer(factorial_int(v as u64));
                acc *= rat_pow(&f, *m).ok_or_else(|| TermError::EvalUndefined { witness: witness() })?;
            }
        }
        for (t, b, m) in &self.binomials {
            let tv = t.evaluate(vars).ok_or_else(|| TermError::EvalUndefined { witness: witness() })?;
            let bv = b.evaluate(vars).ok_or_else(|| TermError::EvalUndefined { witness: witness() })?;
            if bv < 0 || bv > tv {
                if *m > 0 {
                    zero = true;
                } else {
                    return Err(TermError::EvalUndefined {
                        witness: format!("binomial({t}, {b}) = 0 in a denominator at {}", witness()),
                    });
                }
            } else {
                let v = Rat::from_integer(binom_int(tv as u64, bv as u64));
                acc *= rat_pow(&v, *m).ok_or_else(|| TermError::EvalUndefined { witness: witness() })?;
            }
        }
        if num_poles > 0 && den_poles == 0 {
            return Err(TermError::EvalUndefined {
                witness: format!("factorial pole at {}", witness()),
            });
        }
        if num_poles > 0 && den_poles > 0 {
            return Err(TermError::EvalUndefined {
                witness: format!("indeterminate factorial quotient at {}", witness()),
            });
        }
        if den_poles > 0 {
            return Ok(Rat::zero());
        }
        if zero {
            return Ok(Rat::zero());
        }

        let np = self.num_poly.evaluate(&full_point)?;
        let dp = self.den_poly.evaluate(&full_point)?;
        if dp.is_zero() {
            return Err(TermError::EvalUndefined {
                witness: format!("polynomial denominator vanishes at {}", witness()),
            });
        }
        acc *= np / dp;

        for (base, lf) in &self.powers {
            let e = lf.evaluate(vars).ok_or_else(|| TermError::EvalUndefined { witness: witness() })?;
            let b = base.evaluate(&full_point).map_err(|err| TermError::EvalUndefined {
                witness: format!("{err} at {}", witness()),
            })?;
            let p = rat_pow(&b, e).ok_or_else(|| TermError::EvalUndefined {
                witness: format!("0^{e} at {}", witness()),
            })?;
            acc *= p;
        }
        Ok(acc)
    }

    /// Value at an integer variable point with parameters left symbolic:
    /// a rational function of the parameters.
    pub fn eval_symbolic(&self, vars: &BTreeMap<String, i64>) -> Result<RationalFunction, TermError> {
        let ctx = &self.ctx;
        let witness = || vars.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ");
        let mut num_poles = 0i64;
        let mut den_poles = 0i64;
        let mut zero = false;
        let mut acc = RationalFunction::constant(ctx, self.coeff.clone());

        let bindings: BTreeMap<usize, Rat> = vars
            .iter()
            .filter_map(|(name, v)| ctx.index_of(name).map(|i| (i, Rat::from_integer(BigInt::from(*v)))))
            .collect();

        for (lf, m) in &self.factorials {
            let v = lf.evaluate(vars).ok_or_else(|| TermError::EvalUndefined { witness: witness() })?;
            if v < 0 {
                if *m > 0 {
                    num_poles += m;
                } else {
                    den_poles -= m;
                }
            } else {
                let f = Rat::from_integer(factorial_int(v as u64));
                let p = rat_pow(&f, *m).ok_or_else(|| TermError::EvalUndefined { witness: witness() })?;
                acc = acc.scale(&p);
            }
        }
        for (t, b, m) in &self.binomials {
            let tv = t.evaluate(vars).ok_or_else(|| TermError::EvalUndefined { witness: witness() })?;
            let bv = b.evaluate(vars).ok_or_else(|| TermError::EvalUndefined { witness: witness() })?;
            if bv < 0 || bv > tv {
                if *m > 0 {
                    zero = true;
                } else {
                    return Err(TermError::EvalUndefined {
                        witness: format!("binomial({t}, {b}) = 0 in a denominator at {}", witness()),
                    });
                }
            } else {
                let v = Rat::from_integer(binom_int(tv as u64, bv as u64));
                let p = rat_pow(&v, *m).ok_or_else(|| TermError::EvalUndefined { witness: witness() })?;
                acc = acc.scale(&p);
            }
        }
        if num_poles > 0 && den_poles == 0 {
            return Err(TermError::EvalUndefined { witness: format!("factorial pole at {}", witness()) });
        }
        if num_poles > 0 && den_poles > 0 {
            return Err(TermError::EvalUndefined {
                witness: format!("indeterminate factorial quotient at {}", witness()),
            });
        }
        if den_poles > 0 || zero {
            return Ok(RationalFunction::zero(ctx));
        }

        let np = self.num_poly.eval_partial(&bindings);
        let dp = self.den_poly.eval_partial(&bindings);
        acc = acc.checked_mul(&RationalFunction::new(np, dp).map_err(|_| TermError::EvalUndefined {
            witness: format!("polynomial denominator vanishes at {}", witness()),
        })?)?;

        for (base, lf) in &self.powers {
            let e = lf.evaluate(vars).ok_or_else(|| TermError::EvalUndefined { witness: witness() })?;
            let p = base.pow(e).map_err(|_| TermError::EvalUndefined {
                witness: format!("zero base to power {e} at {}", witness()),
            })?;
            acc = acc.checked_mul(&p)?;
        }
        Ok(acc)
    }

    // -- support ------------------------------------------------------------

    /// Per-sum-variable integer ranges outside which F(n; .) vanishes, for a
    /// fixed outer value. Declared bounds and binomial-support constraints
    /// are intersected; interval propagation handles coupled constraints.
    pub fn support_box(&self, n: i64) -> Result<Vec<(i64, i64)>, TermError> {
        let outer_name = self.outer_name().to_string();
        let r = self.sum_vars.len();
        let mut lo = vec![None::<i64>; r];
        let mut hi = vec![None::<i64>; r];
        let names: Vec<String> = self.sum_vars.iter().map(|&i| self.ctx.name(i).to_string()).collect();

        let mut base = BTreeMap::new();
        base.insert(outer_name.clone(), n);

        for (j, (blo, bhi)) in self.bounds.iter().enumerate() {
            if let Some(b) = blo {
                lo[j] = b.evaluate(&base);
                if lo[j].is_none() {
                    return Err(TermError::EvalUndefined { witness: format!("bound {b} needs more than {outer_name}") });
                }
            }
            if let Some(b) = bhi {
                hi[j] = b.evaluate(&base);
                if hi[j].is_none() {
                    return Err(TermError::EvalUndefined { witness: format!("bound {b} needs more than {outer_name}") });
                }
            }
        }

        // tighten with each constraint c0 + cn*n + sum ci*ki >= 0: every
        // in-support point satisfies cj*kj >= -(rest) >= -(max rest), where
        // the max runs over the current intervals of the other variables
        for _round in 0..(2 * r + 2) {
            let mut changed = false;
            for cons in &self.support {
                for (j, kname) in names.iter().enumerate() {
                    let cj = cons.coeff(kname);
                    if cj == 0 {
                        continue;
                    }
                    let mut rest_max: Option<i64> = Some(cons.constant + cons.coeff(&outer_name) * n);
                    for (i, iname) in names.iter().enumerate() {
                        if i == j {
                            continue;
                        }
                        let ci = cons.coeff(iname);
                        if ci == 0 {
                            continue;
                        }
                        let ki = if ci > 0 { hi[i] } else { lo[i] };
                        match ki {
                            None => {
                                rest_max = None;
                                break;
                            }
                            Some(v) => rest_max = rest_max.map(|rb| rb + ci * v),
                        }
                    }
                    if let Some(rest_max) = rest_max {
                        if cj > 0 {
                            // kj >= ceil(-rest_max / cj)
                            let b = (-rest_max).div_euclid(cj)
                                + i64::from((-rest_max).rem_euclid(cj) != 0);
                            if lo[j].map(|cur| b > cur).unwrap_or(true) {
                                lo[j] = Some(b);
                                changed = true;
                            }
                        } else {
                            // kj <= floor(rest_max / -cj)
                            let b = rest_max.div_euclid(-cj);
                            if hi[j].map(|cur| b < cur).unwrap_or(true) {
                                hi[j] = Some(b);
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let mut out = Vec::with_capacity(r);
        for j in 0..r {
            match (lo[j], hi[j]) {
                (Some(a), Some(b)) => out.push((a, b)),
                _ => return Err(TermError::InfiniteSupport),
            }
        }
        Ok(out)
    }

    /// All integer points of the support box at a fixed outer value.
    pub fn support_points(&self, n: i64) -> Result<Vec<Vec<i64>>, TermError> {
        let box_ = self.support_box(n)?;
        let mut points = vec![vec![]];
        for &(a, b) in &box_ {
            let mut next = Vec::new();
            for p in &points {
                for v in a..=b {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
            points = next;
            if points.len() > 2_000_000 {
                return Err(TermError::InfiniteSupport);
            }
        }
        Ok(points)
    }

    /// Variable point map for eval: outer = n, sum vars = ks.
    pub fn point(&self, n: i64, ks: &[i64]) -> BTreeMap<String, i64> {
        let mut m = BTreeMap::new();
        m.insert(self.outer_name().to_string(), n);
        for (j, &i) in self.sum_vars.iter().enumerate() {
            m.insert(self.ctx.name(i).to_string(), ks[j]);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::rat::rat_int;

    fn term(src: &str, sum_vars: &[&str]) -> HyperTerm {
        let e = parse(src).unwrap();
        let sv: Vec<String> = sum_vars.iter().map(|s| s.to_string()).collect();
        to_hyper_term(&e, "n", &sv).unwrap()
    }

    fn rf(src: &str, t: &HyperTerm) -> RationalFunction {
        crate::expr::parse_ratfun(src, t.ctx()).unwrap()
    }

    #[test]
    fn binomial_quotients_match_hand_reduction() {
        let t = term("binomial(n, k)", &["k"]);
        let k_idx = t.sum_var_indices()[0];
        assert_eq!(t.quotient(k_idx), &rf("(n - k)/(k + 1)", &t));
        assert_eq!(t.outer_quotient(), &rf("(n + 1)/(n + 1 - k)", &t));
    }

    #[test]
    fn alternating_cube_quotient() {
        let t = term("(-1)^k * binomial(2*n, n+k)^3", &["k"]);
        let k_idx = t.sum_var_indices()[0];
        let expected = rf("(-(n - k)^3)/((n + k + 1)^3)", &t);
        assert_eq!(t.quotient(k_idx), &expected);
    }

    #[test]
    fn quadratic_exponent_is_rejected() {
        let e = parse("2^(k*k)").unwrap();
        let err = to_hyper_term(&e, "n", &["k".into()]).unwrap_err();
        assert!(matches!(err, TermError::NotHypergeometric { .. }));
    }

    #[test]
    fn properness_and_witness() {
        let t = term("(-1)^k * binomial(2*n, n+k)^3", &["k"]);
        assert_eq!(t.check_proper(), (true, None));

        let t = term("binomial(n, k)*a^k*b^(n-k)", &["k"]);
        assert_eq!(t.check_proper(), (true, None));

        let t = term("binomial(n, k)/(k^2 + 1)", &["k"]);
        let (ok, witness) = t.check_proper();
        assert!(!ok);
        assert_eq!(witness.as_deref(), Some("k^2 + 1"));
    }

    #[test]
    fn evaluation_matches_direct_computation() {
        let t = term("binomial(n, k)", &["k"]);
        assert_eq!(t.eval(&t.point(4, &[2]), &BTreeMap::new()).unwrap(), rat_int(6));

        let dixon = term("(-1)^k * binomial(2*n, n+k)^3", &["k"]);
        assert_eq!(dixon.eval(&dixon.point(1, &[1]), &BTreeMap::new()).unwrap(), rat_int(-1));
        assert_eq!(dixon.eval(&dixon.point(1, &[5]), &BTreeMap::new()).unwrap(), rat_int(0));
    }

    #[test]
    fn support_box_from_binomial_arguments() {
        let dixon = term("(-1)^k * binomial(2*n, n+k)^3", &["k"]);
        assert_eq!(dixon.support_box(3).unwrap(), vec![(-3, 3)]);
        let b = term("binomial(n, k)", &["k"]);
        assert_eq!(b.support_box(5).unwrap(), vec![(0, 5)]);
    }

    #[test]
    fn support_soundness_outside_box() {
        let t = term("binomial(n, k)", &["k"]);
        for k in [-7i64, -1, 6, 9, 40] {
            assert_eq!(t.eval(&t.point(5, &[k]), &BTreeMap::new()).unwrap(), rat_int(0));
        }
    }

    #[test]
    fn quotient_consistency_with_evaluator() {
        let t = term("(-1)^k * binomial(2*n, n+k)^3", &["k"]);
        let k_idx = t.sum_var_indices()[0];
        for n in 2i64..6 {
            for k in -n..n {
                let f0 = t.eval(&t.point(n, &[k]), &BTreeMap::new()).unwrap();
                if f0.is_zero() {
                    continue;
                }
                let f1 = t.eval(&t.point(n, &[k + 1]), &BTreeMap::new()).unwrap();
                let q = t
                    .quotient(k_idx)
                    .evaluate(&vals(&[("n", n), ("k", k)]))
                    .unwrap();
                assert_eq!(&f1 / &f0, q, "at n={n}, k={k}");
            }
        }
    }

    #[test]
    fn mixed_shift_compatibility() {
        for (src, sv) in [
            ("binomial(n, k)", vec!["k"]),
            ("(-1)^k * binomial(2*n, n+k)^3", vec!["k"]),
            ("binomial(n, k)*a^k*b^(n-k)", vec!["k"]),
        ] {
            let svs: Vec<String> = sv.iter().map(|s| s.to_string()).collect();
            let t = to_hyper_term(&parse(src).unwrap(), "n", &svs).unwrap();
            let n_idx = t.outer_idx();
            let k_idx = t.sum_var_indices()[0];
            let rn = t.quotient(n_idx).clone();
            let rk = t.quotient(k_idx).clone();
            // r_n(n, k+1) * r_k(n, k) = r_k(n+1, k) * r_n(n, k)
            let lhs = rn.shift(k_idx, 1).checked_mul(&rk).unwrap();
            let rhs = rk.shift(n_idx, 1).checked_mul(&rn).unwrap();
            assert_eq!(lhs, rhs, "compatibility fails for {src}");
        }
    }

    #[test]
    fn symbolic_evaluation_keeps_parameters() {
        let t = term("binomial(n, k)*a^k*b^(n-k)", &["k"]);
        let v = t.eval_symbolic(&t.point(2, &[1])).unwrap();
        // 2*a*b
        let expected = rf("(2*a*b)/(1)", &t);
        assert_eq!(v, expected);
    }

    #[test]
    fn outer_shift_ratio_products() {
        let t = term("binomial(n, k)", &["k"]);
        let u2 = t.outer_shift_ratio(2).unwrap();
        // C(n+2,k)/C(n,k) = (n+1)(n+2) / ((n+1-k)(n+2-k))
        let expected = rf("((n + 1)*(n + 2))/((n + 1 - k)*(n + 2 - k))", &t);
        assert_eq!(u2, expected);
    }

    fn vals(binds: &[(&str, i64)]) -> BTreeMap<String, Rat> {
        binds.iter().map(|(n, v)| (n.to_string(), rat_int(*v))).collect()
    }
}
