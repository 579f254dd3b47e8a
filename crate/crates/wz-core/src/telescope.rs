//! Creative telescoping: find polynomials p_0(n)..p_L(n) and a rational
//! certificate R(n,k) with
//!
//! ```text
//! sum_i p_i(n) F(n+i, k) = G(n, k+1) - G(n, k),      G = R * F
//! ```
//!
//! Summing over the (compact) support kills the right side, so the definite
//! sum g(n) = sum_k F(n,k) satisfies sum_i p_i(n) g(n+i) = 0.
//!
//! The search ascends the order L and solves, for each L, one homogeneous
//! linear system over the field of rational functions in n (and parameters):
//! the unknowns are the certificate-numerator coefficients together with the
//! p_i, and the equations come from matching powers of k.

use crate::gosper::{degree_bound, gosper_form, unknown_columns};
use crate::hyper::{HyperTerm, TermError};
use crate::poly::{poly_gcd, poly_lcm, ArithError, MultiPoly};
use crate::pricing::Cost;
use crate::rat::{bigint_gcd, Rat};
use crate::ratfun::RationalFunction;
use num::{BigInt, One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TelescopeError {
    #[error("term is not proper: witness `{witness}`")]
    NotProper { witness: String },
    #[error("no recurrence found up to order {l_max} (inconclusive, not a refutation)")]
    OrderBoundExceeded { l_max: usize },
    #[error("no certificate for the unit recurrence g(n+1) - g(n) = 0")]
    NoWZPair,
    #[error("certificate discovery handles a single sum variable, got {0}")]
    MultisumUnsupported(usize),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Linear recurrence with polynomial coefficients p_0..p_L; the coefficient
/// list is content-free with a positive leading coefficient on p_L, so
/// comparing recurrences is a representation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    coeffs: Vec<MultiPoly>,
}

impl Recurrence {
    /// Normalize a coefficient list: strip the polynomial and rational
    /// content, make the leading coefficient of p_L positive.
    pub fn normalize(coeffs: Vec<MultiPoly>) -> Self {
        assert!(!coeffs.is_empty(), "a recurrence needs at least p_0");
        assert!(!coeffs.last().unwrap().is_zero(), "leading coefficient p_L must be nonzero");
        let mut g = MultiPoly::zero(coeffs[0].ctx());
        for c in &coeffs {
            if !c.is_zero() {
                g = poly_gcd(&g, c);
            }
        }
        let mut out: Vec<MultiPoly> = coeffs.iter().map(|c| c.div_exact(&g).expect("content divides")).collect();
        // joint rational content
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for p in &out {
            for (_, c) in p.terms() {
                num_gcd = bigint_gcd(&num_gcd, c.numer());
                den_lcm = &den_lcm * c.denom() / bigint_gcd(&den_lcm, c.denom());
            }
        }
        let mut scale = Rat::new(den_lcm, num_gcd);
        if out.last().unwrap().leading_coeff().is_negative() {
            scale = -scale;
        }
        for p in out.iter_mut() {
            *p = p.scale(&scale);
        }
        Recurrence { coeffs: out }
    }

    /// Wrap coefficients exactly as given (deserialized or test data);
    /// `p_L` must be nonzero.
    pub fn from_coeffs_raw(coeffs: Vec<MultiPoly>) -> Self {
        assert!(!coeffs.is_empty() && !coeffs.last().unwrap().is_zero());
        Recurrence { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    pub fn leading(&self) -> &MultiPoly {
        self.coeffs.last().unwrap()
    }

    pub fn ctx(&self) -> &crate::poly::CtxRef {
        self.coeffs[0].ctx()
    }

    /// The unit recurrence g(n+1) - g(n) = 0 over a context.
    pub fn unit(ctx: &crate::poly::CtxRef) -> Self {
        Recurrence { coeffs: vec![MultiPoly::int(ctx, -1), MultiPoly::one(ctx)] }
    }

    pub fn to_canonical_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_canonical_string()).collect()
    }

    /// Render like `(n^2 + 2*n + 1)*g(n+1) - (27*n^2 + 27*n + 6)*g(n) = 0`.
    pub fn display(&self, seq_name: &str, var_name: &str) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let arg = if i == 0 { var_name.to_string() } else { format!("{var_name}+{i}") };
            let (sign, mag) = {
                let lead_neg = c.leading_coeff().is_negative();
                (if lead_neg { "-" } else { "+" }, if lead_neg { -c } else { c.clone() })
            };
            let coeff_str = if mag.is_one() {
                String::new()
            } else if mag.is_constant() || mag.num_terms() == 1 {
                format!("{}*", mag.to_canonical_string())
            } else {
                format!("({})*", mag.to_canonical_string())
            };
            if parts.is_empty() {
                let lead = if sign == "-" { "-".to_string() } else { String::new() };
                parts.push(format!("{lead}{coeff_str}{seq_name}({arg})"));
            } else {
                parts.push(format!("{sign} {coeff_str}{seq_name}({arg})"));
            }
        }
        format!("{} = 0", parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Discovered,
    Supplied,
}

/// One entry of the order-search log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchStep {
    pub order: usize,
    pub unknowns: usize,
    pub equations: usize,
    pub solvable: bool,
}

/// Degree bounds and system dimensions behind a discovered certificate.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegreeMeta {
    pub x_degree_bound: usize,
    pub unknowns: usize,
    pub equations: usize,
    pub search_log: Vec<SearchStep>,
}

/// A recurrence plus the rational functions R_j certifying it for a term.
/// The defining telescoping identity is a checkable property (see the
/// verification module), never assumed.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub term: HyperTerm,
    pub recurrence: Recurrence,
    pub rs: Vec<RationalFunction>,
    pub degree_meta: DegreeMeta,
    pub provenance: Provenance,
}

/// The undetermined-coefficients system for one order L: columns are the
/// certificate-numerator coefficients x_0..x_d followed by p_0..p_L, rows
/// equate the coefficients of powers of k to zero.
#[derive(Debug, Clone)]
pub struct SymbolicSystem {
    pub rows: Vec<Vec<MultiPoly>>,
    pub x_unknowns: usize,
    pub p_unknowns: usize,
    /// None when the degree analysis already rules out a certificate.
    pub degree_bound: Option<usize>,
    pub var: usize,
    pub gosper_a: MultiPoly,
    pub gosper_b: MultiPoly,
    pub gosper_c: MultiPoly,
    /// Common denominator of the shifted-term ratios u_j = F(n+j)/F(n).
    pub s0: MultiPoly,
    /// Numerators s_j with u_j = s_j / s0.
    pub s: Vec<MultiPoly>,
}

impl SymbolicSystem {
    pub fn unknowns(&self) -> usize {
        self.x_unknowns + self.p_unknowns
    }

    pub fn equations(&self) -> usize {
        self.rows.len()
    }

    /// The predicted certificate denominator c(k) * s0(k); a certificate is
    /// assembled as b(k-1) x(k) / (c(k) s0(k)).
    pub fn predicted_denominator(&self) -> MultiPoly {
        &self.gosper_c * &self.s0
    }
}

fn require_proper(term: &HyperTerm) -> Result<(), TelescopeError> {
    match term.check_proper() {
        (true, _) => Ok(()),
        (false, witness) => Err(TelescopeError::NotProper { witness: witness.unwrap_or_default() }),
    }
}

fn single_sum_var(term: &HyperTerm) -> Result<usize, TelescopeError> {
    match term.sum_var_indices() {
        [v] => Ok(*v),
        vs => Err(TelescopeError::MultisumUnsupported(vs.len())),
    }
}

/// Build the order-L system for a proper single-sum term.
pub fn build_linear_system(term: &HyperTerm, order: usize, cost: &mut Cost) -> Result<SymbolicSystem, TelescopeError> {
    require_proper(term)?;
    let var = single_sum_var(term)?;
    let ctx = term.ctx();

    // u_j = F(n+j,k)/F(n,k) over a common denominator s0
    let mut us = Vec::with_capacity(order + 1);
    for j in 0..=order {
        us.push(term.outer_shift_ratio(j)?);
    }
    let mut s0 = MultiPoly::one(ctx);
    for u in &us {
        s0 = poly_lcm(&s0, u.den());
    }
    let s: Vec<MultiPoly> = us
        .iter()
        .map(|u| u.num() * &s0.div_exact(u.den()).expect("lcm is divisible"))
        .collect();

    // w(k) = rho_k(k) * s0(k)/s0(k+1), decomposed
    let rho = term.quotient(var).clone();
    let w = rho
        .checked_mul(&RationalFunction::new(s0.clone(), s0.shift(var, 1))?)?;
    let form = gosper_form(&w, var);

    let rhs_parts: Vec<MultiPoly> = s.iter().map(|sj| &form.c * sj).collect();
    let rhs_deg = rhs_parts.iter().filter_map(|p| p.degree_in(var)).max().map(|d| d as i64).unwrap_or(0);
    let d = degree_bound(&form.a, &form.b, rhs_deg, var);

    let (rows, x_unknowns) = match d {
        None => (Vec::new(), 0),
        Some(d) => {
            let x_cols = unknown_columns(&form.a, &form.b, d, var);
            let max_deg = x_cols
                .iter()
                .chain(rhs_parts.iter())
                .filter_map(|p| p.degree_in(var))
                .max()
                .unwrap_or(0) as usize;
            let mut rows = Vec::with_capacity(max_deg + 1);
            for m in 0..=max_deg {
                let mut row: Vec<MultiPoly> = Vec::with_capacity(x_cols.len() + rhs_parts.len());
                for ccol in &x_cols {
                    row.push(ccol.coeff_of_power(var, m as u32));
                }
                for rp in &rhs_parts {
                    row.push(-rp.coeff_of_power(var, m as u32));
                }
                rows.push(row);
            }
            (rows, d + 1)
        }
    };

    cost.observe_terms(s0.num_terms() as u64);
    Ok(SymbolicSystem {
        rows,
        x_unknowns,
        p_unknowns: order + 1,
        degree_bound: d,
        var,
        gosper_a: form.a,
        gosper_b: form.b,
        gosper_c: form.c,
        s0,
        s,
    })
}

/// Scale a homogeneous solution so the p-block becomes a content-free
/// polynomial list with positive leading p_L. Returns the polynomial p-block
/// and the rational-function multiplier that was applied.
fn normalize_solution(p_entries: &[RationalFunction]) -> (Vec<MultiPoly>, RationalFunction) {
    let ctx = p_entries[0].ctx();
    let mut den = MultiPoly::one(ctx);
    for e in p_entries {
        den = poly_lcm(&den, e.den());
    }
    // multiply through by the den-lcm; coefficients may still be rational
    let as_polys: Vec<MultiPoly> = p_entries
        .iter()
        .map(|e| {
            let q = RationalFunction::from_poly(den.clone()).checked_mul(e).expect("ctx");
            debug_assert!(q.is_polynomial());
            let c = q.den().constant_value().expect("constant denominator");
            q.num().scale(&c.recip())
        })
        .collect();
    let mut g = MultiPoly::zero(ctx);
    for p in &as_polys {
        if !p.is_zero() {
            g = poly_gcd(&g, p);
        }
    }
    let stripped: Vec<MultiPoly> = as_polys.iter().map(|p| p.div_exact(&g).expect("content divides")).collect();
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for p in &stripped {
        for (_, c) in p.terms() {
            num_gcd = bigint_gcd(&num_gcd, c.numer());
            den_lcm = &den_lcm * c.denom() / bigint_gcd(&den_lcm, c.denom());
        }
    }
    let mut scale = Rat::new(den_lcm, num_gcd);
    if stripped.last().unwrap().leading_coeff().is_negative() {
        scale = -scale;
    }
    let p_polys: Vec<MultiPoly> = stripped.iter().map(|p| p.scale(&scale)).collect();

    // multiplier = (den / g) * scale
    let multiplier = RationalFunction::new(den.scale(&scale), g).expect("g nonzero");
    (p_polys, multiplier)
}

/// Assemble R = b(k-1) x(k) / (c(k) s0(k)) from solved x-coefficients.
fn assemble_certificate(
    sys: &SymbolicSystem,
    xs: &[RationalFunction],
) -> Result<RationalFunction, ArithError> {
    let ctx = sys.gosper_a.ctx();
    let k = RationalFunction::from_poly(MultiPoly::var_idx(ctx, sys.var));
    let mut x = RationalFunction::zero(ctx);
    for (i, xi) in xs.iter().enumerate() {
        x = x.checked_add(&xi.checked_mul(&k.pow(i as i64)?)?)?;
    }
    let b_minus = RationalFunction::from_poly(sys.gosper_b.shift(sys.var, -1));
    b_minus
        .checked_mul(&x)?
        .checked_div(&RationalFunction::from_poly(sys.predicted_denominator()))
}

/// Exact check of the telescoping identity, dividing by F:
/// sum_i p_i u_i - sum_j [ R_j(k_j+1) rho_{k_j} - R_j ] must cancel to zero.
pub fn telescoping_defect(
    term: &HyperTerm,
    rec: &Recurrence,
    rs: &[RationalFunction],
    cost: &mut Cost,
) -> Result<RationalFunction, TelescopeError> {
    let ctx = term.ctx();
    let mut acc = RationalFunction::zero(ctx);
    for (i, p) in rec.coeffs().iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let u = term.outer_shift_ratio(i)?;
        acc = acc.checked_add(&RationalFunction::from_poly(p.clone()).checked_mul(&u)?)?;
        cost.bump_mults(1);
    }
    for (j, r) in rs.iter().enumerate() {
        let kj = term.sum_var_indices()[j];
        let rho = term.quotient(kj);
        let delta = r.shift(kj, 1).checked_mul(rho)?.checked_sub(r)?;
        acc = acc.checked_sub(&delta)?;
        cost.bump_mults(1);
    }
    Ok(acc)
}

/// Find the minimal-order recurrence with a telescoping certificate, trying
/// L = 0, 1, ... up to `l_max`. The returned certificate has already passed
/// the exact telescoping check.
pub fn find_recurrence(term: &HyperTerm, l_max: usize, cost: &mut Cost) -> Result<Certificate, TelescopeError> {
    require_proper(term)?;
    single_sum_var(term)?;
    let mut log: Vec<SearchStep> = Vec::new();
    for order in 0..=l_max {
        let sys = build_linear_system(term, order, cost)?;
        let (u, e) = (sys.unknowns(), sys.equations());
        if sys.degree_bound.is_none() {
            log.push(SearchStep { order, unknowns: u, equations: e, solvable: false });
            continue;
        }
        let basis = crate::solve::nullspace(sys.rows.clone(), cost);
        let chosen = basis.iter().find(|v| v[sys.x_unknowns..].iter().any(|p| !p.is_zero()));
        let Some(vec) = chosen else {
            log.push(SearchStep { order, unknowns: u, equations: e, solvable: false });
            continue;
        };
        let (p_polys, multiplier) = normalize_solution(&vec[sys.x_unknowns..]);
        let xs: Vec<RationalFunction> = vec[..sys.x_unknowns]
            .iter()
            .map(|x| x.checked_mul(&multiplier).expect("ctx"))
            .collect();
        let recurrence = Recurrence { coeffs: p_polys };
        let r = assemble_certificate(&sys, &xs)?;
        let defect = telescoping_defect(term, &recurrence, &[r.clone()], cost)?;
        assert!(defect.is_zero(), "telescoping certificate failed its exact check");
        log.push(SearchStep { order, unknowns: u, equations: e, solvable: true });
        return Ok(Certificate {
            term: term.clone(),
            recurrence,
            rs: vec![r],
            degree_meta: DegreeMeta {
                x_degree_bound: sys.degree_bound.unwrap(),
                unknowns: u,
                equations: e,
                search_log: log,
            },
            provenance: Provenance::Discovered,
        });
    }
    Err(TelescopeError::OrderBoundExceeded { l_max })
}

/// Solve for a certificate of a FIXED recurrence (inhomogeneous system in
/// the certificate coefficients only). None when no certificate exists at
/// the predicted degree.
pub fn certify_fixed_recurrence(
    term: &HyperTerm,
    rec: &Recurrence,
    cost: &mut Cost,
) -> Result<Option<RationalFunction>, TelescopeError> {
    let sys = build_linear_system(term, rec.order(), cost)?;
    let Some(d) = sys.degree_bound else { return Ok(None) };
    let var = sys.var;
    // rhs(k) = sum_j p_j * c * s_j
    let mut rhs = MultiPoly::zero(sys.gosper_a.ctx());
    for (j, p) in rec.coeffs().iter().enumerate() {
        rhs = &rhs + &(&(&sys.gosper_c * &sys.s[j]) * p);
    }
    let Some(xs) = crate::gosper::solve_polynomial(&sys.gosper_a, &sys.gosper_b, &rhs, d, var, cost) else {
        return Ok(None);
    };
    let r = assemble_certificate(&sys, &xs)?;
    let defect = telescoping_defect(term, rec, &[r.clone()], cost)?;
    assert!(defect.is_zero(), "fixed-recurrence certificate failed its exact check");
    Ok(Some(r))
}

/// Certificate for the normalized conjecture sum_k F(n,k) = 1: the unit
/// recurrence g(n+1) - g(n) = 0 with F(n+1,k) - F(n,k) = G(n,k+1) - G(n,k).
pub fn wz_pair(term: &HyperTerm, cost: &mut Cost) -> Result<Certificate, TelescopeError> {
    require_proper(term)?;
    single_sum_var(term)?;
    let rec = Recurrence::unit(term.ctx());
    match certify_fixed_recurrence(term, &rec, cost)? {
        None => Err(TelescopeError::NoWZPair),
        Some(r) => {
            let sys_dims = build_linear_system(term, 1, cost)?;
            Ok(Certificate {
                term: term.clone(),
                recurrence: rec,
                rs: vec![r],
                degree_meta: DegreeMeta {
                    x_degree_bound: sys_dims.degree_bound.unwrap_or(0),
                    unknowns: sys_dims.x_unknowns,
                    equations: sys_dims.equations(),
                    search_log: vec![],
                },
                provenance: Provenance::Discovered,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, parse_poly, parse_ratfun};
    use crate::hyper::to_hyper_term;
    use std::collections::BTreeMap;

    fn term(src: &str) -> HyperTerm {
        to_hyper_term(&parse(src).unwrap(), "n", &["k".to_string()]).unwrap()
    }

    fn brute_sum(t: &HyperTerm, n: i64) -> Rat {
        let (lo, hi) = t.support_box(n).unwrap()[0];
        let mut acc = Rat::zero();
        for k in lo..=hi {
            acc += t.eval(&t.point(n, &[k]), &BTreeMap::new()).unwrap();
        }
        acc
    }

    #[test]
    fn binomial_row_sum_recurrence() {
        let t = term("binomial(n, k)");
        let cert = find_recurrence(&t, 6, &mut Cost::new()).unwrap();
        assert_eq!(cert.recurrence.order(), 1);
        let expected = Recurrence::normalize(vec![
            parse_poly("2", t.ctx()).unwrap(),
            parse_poly("-1", t.ctx()).unwrap(),
        ]);
        assert_eq!(cert.recurrence, expected);
        // oracle: g(n) = 2^n annihilated for n = 0..20
        for n in 0..=20i64 {
            let g0 = brute_sum(&t, n);
            let g1 = brute_sum(&t, n + 1);
            let point: BTreeMap<String, Rat> = [("n".to_string(), crate::rat::rat_int(n)), ("k".to_string(), Rat::zero())]
                .into_iter()
                .collect();
            let p0 = cert.recurrence.coeffs()[0].evaluate(&point).unwrap();
            let p1 = cert.recurrence.coeffs()[1].evaluate(&point).unwrap();
            assert!((&p0 * &g0 + &p1 * &g1).is_zero(), "annihilation at n={n}");
        }
    }

    #[test]
    fn alternating_cube_recurrence_matches_closed_form_ratio() {
        let t = term("(-1)^k * binomial(2*n, n+k)^3");
        let cert = find_recurrence(&t, 6, &mut Cost::new()).unwrap();
        assert_eq!(cert.recurrence.order(), 1);
        let expected = Recurrence::normalize(vec![
            parse_poly("-3*(3*n+1)*(3*n+2)", t.ctx()).unwrap(),
            parse_poly("(n+1)^2", t.ctx()).unwrap(),
        ]);
        assert_eq!(cert.recurrence, expected);
        // brute-force ratio check for n <= 10
        for n in 0..=10i64 {
            let g0 = brute_sum(&t, n);
            let g1 = brute_sum(&t, n + 1);
            let expect = Rat::new(BigInt::from(3 * (3 * n + 1) * (3 * n + 2)), BigInt::from((n + 1) * (n + 1)));
            assert_eq!(&g1 / &g0, expect, "ratio at n={n}");
        }
    }

    #[test]
    fn squared_binomial_recurrence() {
        let t = term("binomial(n, k)^2");
        let cert = find_recurrence(&t, 6, &mut Cost::new()).unwrap();
        assert_eq!(cert.recurrence.order(), 1);
        let expected = Recurrence::normalize(vec![
            parse_poly("-2*(2*n+1)", t.ctx()).unwrap(),
            parse_poly("n+1", t.ctx()).unwrap(),
        ]);
        assert_eq!(cert.recurrence, expected);
    }

    #[test]
    fn order_zero_is_reported_unsolvable_for_binomial_row() {
        let t = term("binomial(n, k)");
        let cert = find_recurrence(&t, 6, &mut Cost::new()).unwrap();
        let l0 = &cert.degree_meta.search_log[0];
        assert_eq!(l0.order, 0);
        assert!(!l0.solvable);
        assert!(matches!(
            find_recurrence(&t, 0, &mut Cost::new()),
            Err(TelescopeError::OrderBoundExceeded { l_max: 0 })
        ));
    }

    #[test]
    fn improper_term_is_rejected() {
        let t = term("binomial(n, k)/(k^2 + 1)");
        assert!(matches!(find_recurrence(&t, 3, &mut Cost::new()), Err(TelescopeError::NotProper { .. })));
    }

    #[test]
    fn wz_pair_for_normalized_binomial_row() {
        let t = term("binomial(n, k)/2^n");
        let cert = wz_pair(&t, &mut Cost::new()).unwrap();
        let expected = parse_ratfun("(-k)/(2*(n + 1 - k))", t.ctx()).unwrap();
        assert_eq!(cert.rs[0], expected);
    }

    #[test]
    fn wz_pair_fails_for_wrong_normalization() {
        let t = term("binomial(n, k)/3^n");
        assert!(matches!(wz_pair(&t, &mut Cost::new()), Err(TelescopeError::NoWZPair)));
    }

    #[test]
    fn wz_pair_with_symbolic_parameters() {
        // binomial theorem summand normalized by (a+b)^n
        let t = term("binomial(n, k)*a^k*b^(n-k)/(a+b)^n");
        let cert = wz_pair(&t, &mut Cost::new()).unwrap();
        let defect = telescoping_defect(&t, &cert.recurrence, &cert.rs, &mut Cost::new()).unwrap();
        assert!(defect.is_zero());
    }

    #[test]
    fn dixon_system_dimensions_are_stable() {
        let t = term("(-1)^k * binomial(2*n, n+k)^3");
        let s1 = build_linear_system(&t, 1, &mut Cost::new()).unwrap();
        let s2 = build_linear_system(&t, 1, &mut Cost::new()).unwrap();
        assert_eq!((s1.unknowns(), s1.equations()), (s2.unknowns(), s2.equations()));
        assert!(s1.equations() >= s1.unknowns());
        assert!(s1.degree_bound.is_some());
    }

    #[test]
    fn grid_validation_of_telescoping() {
        // sum_i p_i F(n+i,k) = G(n,k+1) - G(n,k) at in-support grid points
        let t = term("(-1)^k * binomial(2*n, n+k)^3");
        let cert = find_recurrence(&t, 6, &mut Cost::new()).unwrap();
        let r = &cert.rs[0];
        let params = BTreeMap::new();
        for n in 0..=12i64 {
            let (lo, hi) = t.support_box(n).unwrap()[0];
            for k in lo..=hi {
                let point = |nn: i64, kk: i64| {
                    let mut m = BTreeMap::new();
                    m.insert("n".to_string(), crate::rat::rat_int(nn));
                    m.insert("k".to_string(), crate::rat::rat_int(kk));
                    m
                };
                // skip poles of R
                let (Ok(rk), Ok(rk1)) = (r.evaluate(&point(n, k)), r.evaluate(&point(n, k + 1))) else {
                    continue;
                };
                let f = |nn: i64, kk: i64| t.eval(&t.point(nn, &[kk]), &params).unwrap();
                let lhs: Rat = cert
                    .recurrence
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(i, p)| p.evaluate(&point(n, k)).unwrap() * f(n + i as i64, k))
                    .sum();
                let rhs = rk1 * f(n, k + 1) - rk * f(n, k);
                assert_eq!(lhs, rhs, "grid point n={n}, k={k}");
            }
        }
    }

    #[test]
    fn recurrence_display_reads_naturally() {
        let t = term("binomial(n, k)");
        let cert = find_recurrence(&t, 6, &mut Cost::new()).unwrap();
        assert_eq!(cert.recurrence.display("g", "n"), "g(n+1) - 2*g(n) = 0");
    }
}
