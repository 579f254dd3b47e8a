//! Indefinite hypergeometric summation: given a term t(k), find T(k) with
//! T(k+1) - T(k) = t(k) and T/t rational, or decide that none exists.
//!
//! The engine is the classical three-step decomposition of the term ratio
//! t(k+1)/t(k) = (a(k)/b(k)) * (c(k+1)/c(k)) with gcd(a(k), b(k+j)) = 1 for
//! all integers j >= 0, a degree bound for the polynomial unknown x(k), and
//! an exact linear solve of a(k) x(k+1) - b(k-1) x(k) = c(k). The certificate
//! returned is T/t = b(k-1) x(k) / c(k), verified symbolically.

use crate::hyper::{HyperTerm, TermError};
use crate::poly::{poly_gcd, resultant_in, Context, CtxRef, MultiPoly};
use crate::pricing::Cost;
use crate::rat::{divisors, Rat};
use crate::ratfun::RationalFunction;
use num::{BigInt, One, Signed, Zero};

/// The (a, b, c) decomposition of a term ratio in one variable.
#[derive(Debug, Clone)]
pub struct GosperForm {
    pub a: MultiPoly,
    pub b: MultiPoly,
    pub c: MultiPoly,
    /// Variable index the decomposition lives in.
    pub var: usize,
}

impl GosperForm {
    /// (a/b) * (c(k+1)/c(k)) as a canonical rational function.
    pub fn reconstruct(&self) -> RationalFunction {
        let ab = RationalFunction::new(self.a.clone(), self.b.clone()).expect("b nonzero");
        let cc = RationalFunction::new(self.c.shift(self.var, 1), self.c.clone()).expect("c nonzero");
        ab.checked_mul(&cc).expect("same context")
    }

    /// The defining gcd condition: gcd(a(k), b(k+j)) = 1 for all j >= 0.
    pub fn gcd_condition_holds(&self) -> bool {
        dispersion_set(&self.a, &self.b, self.var).is_empty()
    }
}

/// Integer j >= 0 with gcd(f(k), g(k+j)) nonconstant, ascending. Candidates
/// come from integer roots of the resultant Res_k(f(k), g(k+j)) in a fresh
/// name j; each candidate is confirmed by an actual gcd computation.
pub fn dispersion_set(f: &MultiPoly, g: &MultiPoly, var: usize) -> Vec<i64> {
    if f.degree_in(var).unwrap_or(0) == 0 || g.degree_in(var).unwrap_or(0) == 0 {
        return vec![];
    }
    let ctx = f.ctx();
    // fresh-name context: original names plus the shift distance
    let mut fresh = String::from("_j");
    while ctx.index_of(&fresh).is_some() {
        fresh.push('_');
    }
    let vars: Vec<String> = ctx.names().iter().cloned().chain([fresh.clone()]).collect();
    let ext: CtxRef = Context::new(vars, vec![]);
    let fe = f.remap(&ext).expect("superset context");
    let ge = g.remap(&ext).expect("superset context");
    let var_e = ext.index_of(ctx.name(var)).unwrap();
    let j_e = ext.index_of(&fresh).unwrap();
    let k_plus_j = &MultiPoly::var_idx(&ext, var_e) + &MultiPoly::var_idx(&ext, j_e);
    let g_shift = ge.substitute(var_e, &k_plus_j).expect("same context");
    let res = resultant_in(&fe, &g_shift, var_e);

    let candidates = identical_integer_roots(&res, j_e);
    let mut out: Vec<i64> = candidates
        .into_iter()
        .filter(|&j| j >= 0)
        .filter(|&j| !poly_gcd(f, &g.shift(var, j)).is_constant())
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Integers v0 with p(.., v0, ..) identically zero in the remaining names:
/// exactly the common integer roots of the var-profiles of every monomial
/// group, i.e. the integer roots of their gcd.
pub fn identical_integer_roots(p: &MultiPoly, var: usize) -> Vec<i64> {
    if p.is_zero() {
        return vec![];
    }
    let jctx: CtxRef = Context::new(vec!["_r"], vec![]);
    let mut groups: std::collections::BTreeMap<Vec<u32>, Vec<(Vec<u32>, Rat)>> = Default::default();
    for (mono, c) in p.terms() {
        let vexp = mono.0[var];
        let mut rest = mono.0.clone();
        rest[var] = 0;
        groups.entry(rest).or_default().push((vec![vexp], c.clone()));
    }
    let mut profile_gcd = MultiPoly::zero(&jctx);
    for (_, profile) in groups {
        let q = MultiPoly::from_terms(&jctx, profile);
        profile_gcd = poly_gcd(&profile_gcd, &q);
        if profile_gcd.is_one() {
            break;
        }
    }
    if profile_gcd.is_constant() {
        return vec![];
    }
    let coeffs: Vec<Rat> = profile_gcd
        .coeffs_in(0)
        .into_iter()
        .map(|c| c.constant_value().expect("univariate profile"))
        .collect();
    integer_roots(&coeffs)
}

/// Integer roots of a univariate polynomial given by its coefficient list
/// (index = power), via the rational root bound on the trailing coefficient.
fn integer_roots(coeffs: &[Rat]) -> Vec<i64> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
        coeffs.pop();
    }
    if coeffs.is_empty() {
        return vec![];
    }
    let mut roots = Vec::new();
    let mut low = 0usize;
    while coeffs[low].is_zero() {
        low += 1;
    }
    if low > 0 {
        roots.push(0);
    }
    // integer coefficients: scale by the lcm of denominators
    let mut lcm = BigInt::one();
    for c in &coeffs[low..] {
        lcm = &lcm * c.denom() / crate::rat::bigint_gcd(&lcm, c.denom());
    }
    let ints: Vec<BigInt> = coeffs[low..].iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect();
    let trailing = &ints[0];
    let divs = divisors(trailing)
        .expect("trailing coefficient too large for integer root search");
    let eval = |r: i64| -> bool {
        let rb = BigInt::from(r);
        let mut acc = BigInt::zero();
        for c in ints.iter().rev() {
            acc = acc * &rb + c;
        }
        acc.is_zero()
    };
    for d in divs {
        if eval(d) {
            roots.push(d);
        }
        if eval(-d) {
            roots.push(-d);
        }
    }
    roots.sort_unstable();
    roots.dedup();
    roots
}

/// Decompose a nonzero term ratio into a [`GosperForm`].
pub fn gosper_form(ratio: &RationalFunction, var: usize) -> GosperForm {
    let ctx = ratio.ctx();
    let mut a = ratio.num().clone();
    let mut b = ratio.den().clone();
    let mut c = MultiPoly::one(ctx);
    // inputs are canonical, so gcd(a, b) = 1; fold out every j with
    // gcd(a(k), b(k+j)) nonconstant, smallest first
    loop {
        let disp = dispersion_set(&a, &b, var);
        let Some(&j) = disp.first() else { break };
        let s = poly_gcd(&a, &b.shift(var, j));
        a = a.div_exact(&s).expect("gcd divides");
        b = b.div_exact(&s.shift(var, -j)).expect("gcd divides");
        for i in 1..=j {
            c = &c * &s.shift(var, -i);
        }
    }
    GosperForm { a, b, c, var }
}

/// Upper bound for the degree of the polynomial solution x(k) of
/// a(k) x(k+1) - b(k-1) x(k) = rhs(k); None when every candidate is negative.
pub fn degree_bound(a: &MultiPoly, b: &MultiPoly, rhs_deg: i64, var: usize) -> Option<usize> {
    let b_minus = b.shift(var, -1);
    let delta = a - &b_minus;
    let sigma = a + &b_minus;
    let deg = |p: &MultiPoly| p.degree_in(var).map(|d| d as i64);
    let mut cands: Vec<i64> = Vec::new();
    match (deg(&delta), deg(&sigma)) {
        (Some(dd), Some(ds)) if dd >= ds => cands.push(rhs_deg - dd),
        (Some(dd), None) => cands.push(rhs_deg - dd),
        (dd, Some(ds)) => {
            // leading terms can cancel: deg(rhs) - ds + 1, plus the special
            // degree -2*coeff_{ds-1}(delta)/lc(sigma) when it is an integer
            cands.push(rhs_deg - ds + 1);
            let v = if ds == 0 {
                MultiPoly::zero(a.ctx())
            } else {
                match dd {
                    Some(d) if d == ds - 1 => delta.coeff_of_power(var, (ds - 1) as u32),
                    _ => MultiPoly::zero(a.ctx()),
                }
            };
            if !v.is_zero() {
                let u = sigma.coeff_of_power(var, ds as u32);
                let z = RationalFunction::new(v.scale(&Rat::from_integer(BigInt::from(-2))), u)
                    .expect("lc nonzero");
                if let Some(c) = z.constant_value() {
                    if c.is_integer() && !c.is_negative() {
                        if let Ok(ci) = i64::try_from(c.to_integer()) {
                            cands.push(ci);
                        }
                    }
                }
            }
        }
        (None, None) => {}
    }
    cands.into_iter().filter(|&d| d >= 0).max().map(|d| d as usize)
}

/// Equation rows for sum_i x_i k^i: coefficient (in k) rows of
/// a(k) (k+1)^i - b(k-1) k^i per unknown x_i.
pub fn unknown_columns(a: &MultiPoly, b: &MultiPoly, d: usize, var: usize) -> Vec<MultiPoly> {
    let ctx = a.ctx();
    let b_minus = b.shift(var, -1);
    let k = MultiPoly::var_idx(ctx, var);
    let k1 = &k + &MultiPoly::one(ctx);
    let mut cols = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let col = &(a * &k1.pow(i as u32)) - &(&b_minus * &k.pow(i as u32));
        cols.push(col);
    }
    cols
}

/// Solve a(k) x(k+1) - b(k-1) x(k) = rhs(k) for a polynomial x of degree <= d
/// over the field of rational functions in the non-k names.
pub fn solve_polynomial(
    a: &MultiPoly,
    b: &MultiPoly,
    rhs: &MultiPoly,
    d: usize,
    var: usize,
    cost: &mut Cost,
) -> Option<Vec<RationalFunction>> {
    let cols = unknown_columns(a, b, d, var);
    let max_deg = cols
        .iter()
        .chain([rhs])
        .filter_map(|p| p.degree_in(var))
        .max()
        .unwrap_or(0) as usize;
    let mut rows = Vec::with_capacity(max_deg + 1);
    let mut rhs_rows = Vec::with_capacity(max_deg + 1);
    for m in 0..=max_deg {
        let row: Vec<MultiPoly> = cols.iter().map(|c| c.coeff_of_power(var, m as u32)).collect();
        rows.push(row);
        rhs_rows.push(rhs.coeff_of_power(var, m as u32));
    }
    crate::solve::solve(rows, rhs_rows, cost)
}

/// Indefinite summation: Some(T/t) with T(k+1) - T(k) = t(k), or None when no
/// rational certificate exists. The returned certificate is verified
/// symbolically.
pub fn gosper_sum(term: &HyperTerm, cost: &mut Cost) -> Result<Option<RationalFunction>, TermError> {
    let var = *term
        .sum_var_indices()
        .first()
        .ok_or(TermError::EvalUndefined { witness: "term has no sum variable".into() })?;
    let ratio = term.quotient(var).clone();
    Ok(gosper_sum_ratio(&ratio, var, cost))
}

/// Same as [`gosper_sum`], starting from the term ratio t(k+1)/t(k).
pub fn gosper_sum_ratio(ratio: &RationalFunction, var: usize, cost: &mut Cost) -> Option<RationalFunction> {
    if ratio.is_zero() {
        return None;
    }
    let form = gosper_form(ratio, var);
    let rhs = form.c.clone();
    let d = degree_bound(&form.a, &form.b, rhs.degree_in(var).unwrap_or(0) as i64, var)?;
    let x = solve_polynomial(&form.a, &form.b, &rhs, d, var, cost)?;
    let ctx = ratio.ctx();
    let k = RationalFunction::var(ctx, ctx.name(var)).expect("var exists");
    let mut xpoly = RationalFunction::zero(ctx);
    for (i, xi) in x.iter().enumerate() {
        xpoly = &xpoly + &(xi * &k.pow(i as i64).expect("nonnegative power"));
    }
    let b_minus = RationalFunction::from_poly(form.b.shift(var, -1));
    let certificate = &(&b_minus * &xpoly) / &RationalFunction::from_poly(form.c.clone());
    // postcondition: R(k+1) * ratio - R(k) = 1 exactly
    let check = &certificate.shift(var, 1).checked_mul(ratio).expect("same context") - &certificate;
    assert!(
        check.is_one(),
        "indefinite-summation certificate failed its telescoping check"
    );
    Some(certificate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, parse_ratfun};
    use crate::hyper::to_hyper_term;
    use crate::rat::rat;

    fn ctx_nk() -> CtxRef {
        Context::new(vec!["n", "k"], vec![])
    }

    fn check_form(ratio_src: &str) {
        let ctx = ctx_nk();
        let ratio = parse_ratfun(ratio_src, &ctx).unwrap();
        let form = gosper_form(&ratio, 1);
        assert_eq!(form.reconstruct(), ratio, "reconstruction of {ratio_src}");
        assert!(form.gcd_condition_holds(), "gcd condition for {ratio_src}");
    }

    #[test]
    fn form_reconstruction_and_gcd_condition() {
        check_form("(k + 1)/(k)"); // t = k * k!
        check_form("(1)/(1)");
        check_form("(k + 1)/(1)"); // t = k!
        check_form("(k)/(k + 2)"); // t = 1/(k(k+1))
        check_form("((k + 1)^2)/(k)"); // t = k * k!, squared flavor
    }

    #[test]
    fn dispersion_finds_integer_shifts() {
        let ctx = ctx_nk();
        let f = parse_ratfun("(k + 3)/(1)", &ctx).unwrap().num().clone();
        let g = parse_ratfun("(k)/(1)", &ctx).unwrap().num().clone();
        // gcd(k+3, (k+j)) nonconstant at j = 3
        assert_eq!(dispersion_set(&f, &g, 1), vec![3]);
        let h = parse_ratfun("(k + 5)/(1)", &ctx).unwrap().num().clone();
        assert_eq!(dispersion_set(&f, &h, 1), Vec::<i64>::new());
    }

    fn sum_certificate(term_src: &str) -> Option<RationalFunction> {
        let e = parse(term_src).unwrap();
        let t = to_hyper_term(&e, "n", &["k".to_string()]).unwrap();
        gosper_sum(&t, &mut Cost::new()).unwrap()
    }

    #[test]
    fn sums_the_identity_function() {
        // t(k) = k has T(k) = k(k-1)/2, certificate (k-1)/2
        let r = sum_certificate("k").unwrap();
        let ctx = r.ctx().clone();
        assert_eq!(r, parse_ratfun("(k - 1)/(2)", &ctx).unwrap());
    }

    #[test]
    fn sums_k_times_factorial() {
        // t(k) = k * k! has T(k) = k!, certificate 1/k
        let r = sum_certificate("k*factorial(k)").unwrap();
        let ctx = r.ctx().clone();
        assert_eq!(r, parse_ratfun("(1)/(k)", &ctx).unwrap());
    }

    #[test]
    fn factorial_itself_is_not_summable() {
        assert!(sum_certificate("factorial(k)").is_none());
    }

    #[test]
    fn partial_fraction_style_term() {
        // t(k) = 1/(k(k+1)) has T = -1/k, certificate -(k+1)
        let r = sum_certificate("1/(k*(k+1))").unwrap();
        let ctx = r.ctx().clone();
        assert_eq!(r, parse_ratfun("(-k - 1)/(1)", &ctx).unwrap());
    }

    #[test]
    fn agreement_with_brute_force_partial_sums() {
        use std::collections::BTreeMap;
        for (src, lo) in [("k", 0i64), ("k*factorial(k)", 1), ("k^2", 0)] {
            let e = parse(src).unwrap();
            let t = to_hyper_term(&e, "n", &["k".to_string()]).unwrap();
            let r = gosper_sum(&t, &mut Cost::new()).unwrap().expect("summable");
            let params = BTreeMap::new();
            let point = |k: i64| {
                let mut m = BTreeMap::new();
                m.insert("n".to_string(), crate::rat::rat_int(0));
                m.insert("k".to_string(), crate::rat::rat_int(k));
                m
            };
            let mut acc = crate::rat::rat_int(0);
            for kk in lo..=20 {
                // T(K+1) - T(lo) = sum_{k=lo}^{K} t(k), where T = R * t is defined
                acc += t.eval(&t.point(0, &[kk]), &params).unwrap();
                let (Ok(r_hi), Ok(r_lo)) = (r.evaluate(&point(kk + 1)), r.evaluate(&point(lo))) else {
                    continue;
                };
                let tk1 = t.eval(&t.point(0, &[kk + 1]), &params).unwrap();
                let tlo = t.eval(&t.point(0, &[lo]), &params).unwrap();
                assert_eq!(&(&tk1 * r_hi) - &(&tlo * r_lo), acc, "partial sums of {src} at K={kk}");
            }
        }
    }

    #[test]
    fn degree_bound_candidates() {
        // x(k+1) - x(k) = k: bound must reach degree 2
        let ctx = ctx_nk();
        let one = MultiPoly::one(&ctx);
        assert_eq!(degree_bound(&one, &one, 1, 1), Some(2));
        // (k+1) x(k+1) - x(k) = k: equal-degree case, bound 0
        let a = parse_ratfun("(k + 1)/(1)", &ctx).unwrap().num().clone();
        assert_eq!(degree_bound(&a, &one, 1, 1), Some(0));
        // k! case: (k+1) x(k+1) - x(k) = 1 admits no polynomial degree
        assert!(degree_bound(&a, &one, 0, 1).is_none());
    }
}
