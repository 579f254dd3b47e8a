//! P-recursive sequences and whole-identity proving: brute-force definite
//! sums (the oracle everything is checked against), recurrence unrolling with
//! singular-index tracking, first-order closed forms, and the end-to-end
//! pipeline that proves `lhs = rhs` by finding a common recurrence for both
//! sides and matching initial values.

use crate::certify::{self, CertifyError, Mode, ProofReport, Verdict};
use crate::expr::{expr_to_linear, Expr, LinearForm};
use crate::hyper::{to_hyper_term_in_ctx, HyperTerm, TermError};
use crate::poly::{ArithError, Context, CtxRef, MultiPoly};
use crate::pricing::{compose, Cost, PriceTag};
use crate::rat::{rat_to_string, Rat};
use crate::ratfun::RationalFunction;
use crate::telescope::{
    certify_fixed_recurrence, find_recurrence, telescoping_defect, Certificate, Provenance,
    Recurrence, TelescopeError,
};
use num::{BigInt, One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProveError {
    #[error("cannot determine the outer variable: {0}")]
    OuterVariable(String),
    #[error("right side references the left side's bound variable `{0}`")]
    CapturedVariable(String),
    #[error("unsupported input shape: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Telescope(#[from] TelescopeError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

// ---------------------------------------------------------------------------
// Brute-force sums
// ---------------------------------------------------------------------------

/// Exact definite sum over the support box (all sum variables), parameters
/// must be absent.
pub fn direct_sum(term: &HyperTerm, n: i64) -> Result<Rat, TermError> {
    if !term.param_names().is_empty() {
        return Err(TermError::EvalUndefined {
            witness: format!("symbolic parameters {:?} need bindings", term.param_names()),
        });
    }
    let params = BTreeMap::new();
    let mut acc = Rat::zero();
    for pt in term.support_points(n)? {
        acc += term.eval(&term.point(n, &pt), &params)?;
    }
    Ok(acc)
}

/// Exact definite sum with parameters left symbolic.
pub fn direct_sum_symbolic(term: &HyperTerm, n: i64) -> Result<RationalFunction, TermError> {
    let mut acc = RationalFunction::zero(term.ctx());
    for pt in term.support_points(n)? {
        acc = acc.checked_add(&term.eval_symbolic(&term.point(n, &pt))?)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Unrolling
// ---------------------------------------------------------------------------

/// A window of exact sequence values. `values[i]` is g(start + i); None past
/// a singular index (where the leading coefficient vanished and propagation
/// stopped).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceWindow {
    pub start: i64,
    pub values: Vec<Option<Rat>>,
    pub singular_indices: Vec<i64>,
}

fn coeff_value(p: &MultiPoly, outer: usize, n: i64) -> Option<Rat> {
    let mut bindings = BTreeMap::new();
    bindings.insert(outer, Rat::from_integer(BigInt::from(n)));
    p.eval_partial(&bindings).constant_value()
}

/// Unroll a recurrence from initial values g(0)..g(L-1) up to index `upto`.
/// Indices n with p_L(n) = 0 are flagged singular; values past the first
/// singularity are unknown.
pub fn unroll(rec: &Recurrence, initial: &[Rat], upto: i64) -> Result<SequenceWindow, ProveError> {
    let order = rec.order();
    if initial.len() != order.max(1) && !(order == 0 && initial.is_empty()) {
        return Err(ProveError::Unsupported(format!(
            "order {order} needs exactly {} initial values, got {}",
            order.max(1),
            initial.len()
        )));
    }
    let ctx = rec.ctx();
    let outer = 0usize;
    for p in rec.coeffs() {
        for v in 1..ctx.arity() {
            if p.degree_in(v).unwrap_or(0) > 0 {
                return Err(ProveError::Unsupported(
                    "unrolling needs coefficients in the outer variable only".into(),
                ));
            }
        }
    }
    let mut values: Vec<Option<Rat>> = initial.iter().cloned().map(Some).collect();
    let mut singular = Vec::new();
    let mut stopped = false;
    while (values.len() as i64) <= upto {
        let n = values.len() as i64 - order as i64;
        let lead = coeff_value(rec.leading(), outer, n).expect("constant in other names");
        if lead.is_zero() {
            singular.push(n);
            stopped = true;
        }
        if stopped {
            values.push(None);
            continue;
        }
        let mut acc = Rat::zero();
        let mut defined = true;
        for (i, p) in rec.coeffs().iter().enumerate().take(order) {
            let c = coeff_value(p, outer, n).expect("constant in other names");
            match &values[(n + i as i64) as usize] {
                Some(v) => acc += c * v,
                None => {
                    defined = false;
                    break;
                }
            }
        }
        values.push(if defined { Some(-acc / lead) } else { None });
    }
    values.truncate((upto + 1) as usize);
    Ok(SequenceWindow { start: 0, values, singular_indices: singular })
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// Solution of a first-order recurrence as a hypergeometric product:
/// g(n) = g(0) * prod_{j=0}^{n-1} rho(j), rho = -p_0/p_1.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    pub rho: RationalFunction,
    pub g0: Rat,
    pub var: String,
}

/// Solve a first-order recurrence in closed form. Errors when the leading
/// coefficient has a nonnegative integer root (the product would cross a
/// singularity).
pub fn solve_first_order(rec: &Recurrence, g0: Rat) -> Result<ClosedForm, ProveError> {
    if rec.order() != 1 {
        return Err(ProveError::Unsupported(format!(
            "closed forms need a first-order recurrence, got order {}",
            rec.order()
        )));
    }
    let roots = crate::gosper::identical_integer_roots(rec.leading(), 0);
    if let Some(&r) = roots.iter().find(|&&r| r >= 0) {
        return Err(ProveError::Unsupported(format!(
            "leading coefficient vanishes at n = {r}"
        )));
    }
    let rho = RationalFunction::new(-rec.coeffs()[0].clone(), rec.coeffs()[1].clone())?;
    Ok(ClosedForm { rho, g0, var: rec.ctx().name(0).to_string() })
}

impl ClosedForm {
    /// g(0), g(1), ..., g(upto) by exact product accumulation.
    pub fn unroll(&self, upto: i64) -> Result<Vec<Rat>, ProveError> {
        let mut out = vec![self.g0.clone()];
        let names = self.rho.ctx().names().to_vec();
        for j in 0..upto {
            let point: BTreeMap<String, Rat> = names
                .iter()
                .map(|nm| {
                    let v = if nm == &self.var { Rat::from_integer(BigInt::from(j)) } else { Rat::zero() };
                    (nm.clone(), v)
                })
                .collect();
            let r = self.rho.evaluate(&point)?;
            let last = out.last().unwrap().clone();
            out.push(last * r);
        }
        Ok(out)
    }

    /// Best-effort display: `a^n` for constant ratios, shifted factorials for
    /// monic linear ratios, otherwise the explicit product form.
    pub fn display(&self) -> String {
        let n = &self.var;
        let pretty = |body: String| {
            if self.g0.is_one() {
                body
            } else {
                format!("{} * {}", rat_to_string(&self.g0), body)
            }
        };
        if let Some(c) = self.rho.constant_value() {
            let base = if c.denom().is_one() && !c.is_negative() {
                c.numer().to_string()
            } else {
                format!("({})", rat_to_string(&c))
            };
            return pretty(format!("{base}^{n}"));
        }
        // rho(j) = j + c with integer c >= 1 gives (n+c-1)!/(c-1)!
        if self.rho.den().is_one() {
            let num = self.rho.num();
            let var_idx = self.rho.ctx().index_of(n).unwrap();
            if num.degree_in(var_idx) == Some(1) && num.coeff_of_power(var_idx, 1).is_one() {
                if let Some(c) = num.coeff_of_power(var_idx, 0).constant_value() {
                    if c.denom().is_one() && c.is_positive() {
                        let c: BigInt = c.to_integer();
                        let shift = &c - BigInt::one();
                        return pretty(if shift.is_zero() {
                            format!("{n}!")
                        } else {
                            format!("factorial({n} + {shift})/factorial({shift})")
                        });
                    }
                }
            }
        }
        let j = if self.rho.ctx().index_of("j").is_none() { "j" } else { "j_" };
        let body = self
            .rho
            .to_canonical_string()
            .split(n.as_str())
            .collect::<Vec<_>>()
            .join(j);
        pretty(format!("prod_{{{j}=0}}^{{{n}-1}} {body}"))
    }
}

// ---------------------------------------------------------------------------
// Identity proving
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProveMode {
    Rigorous,
    Semi,
}

#[derive(Debug, Clone)]
pub struct ProveOptions {
    pub max_order: usize,
    pub mode: ProveMode,
    pub trials: u32,
    pub seed: u64,
}

impl Default for ProveOptions {
    fn default() -> Self {
        ProveOptions { max_order: 6, mode: ProveMode::Rigorous, trials: 20, seed: 42 }
    }
}

/// Right side of an identity: an explicit expression, or the request to
/// evaluate the sum in closed form.
#[derive(Debug, Clone)]
pub enum RhsSpec {
    Expr(Expr),
    ProductForm,
}

#[derive(Debug)]
pub struct ProveOutcome {
    pub report: ProofReport,
    pub lhs_certificate: Option<Certificate>,
    pub rhs_certificate: Option<Certificate>,
    pub common_recurrence: Option<Recurrence>,
    pub closed_form: Option<ClosedForm>,
    pub identity: String,
    /// Exact initial values of the left side that entered the proof.
    pub initial_values: Vec<Rat>,
}

enum Side {
    Sum(HyperTerm),
    Closed(HyperTerm),
    Combo(Vec<(i64, HyperTerm)>),
}

impl Side {
    fn value_at(&self, n: i64) -> Result<RationalFunction, TermError> {
        match self {
            Side::Sum(t) => direct_sum_symbolic(t, n),
            Side::Closed(t) => t.eval_symbolic(&t.point(n, &[])),
            Side::Combo(parts) => {
                let mut acc = RationalFunction::zero(parts[0].1.ctx());
                for (sign, t) in parts {
                    let v = t.eval_symbolic(&t.point(n, &[]))?;
                    acc = acc.checked_add(&v.scale(&Rat::from_integer(BigInt::from(*sign))))?;
                }
                Ok(acc)
            }
        }
    }

    fn term(&self) -> Option<&HyperTerm> {
        match self {
            Side::Sum(t) | Side::Closed(t) => Some(t),
            Side::Combo(_) => None,
        }
    }
}

fn rename_free(e: &Expr, from: &str, to: &str) -> Expr {
    match e {
        Expr::Int(_) => e.clone(),
        Expr::Sym(s) => {
            if s == from {
                Expr::Sym(to.into())
            } else {
                e.clone()
            }
        }
        Expr::Add(a, b) => Expr::Add(Box::new(rename_free(a, from, to)), Box::new(rename_free(b, from, to))),
        Expr::Sub(a, b) => Expr::Sub(Box::new(rename_free(a, from, to)), Box::new(rename_free(b, from, to))),
        Expr::Mul(a, b) => Expr::Mul(Box::new(rename_free(a, from, to)), Box::new(rename_free(b, from, to))),
        Expr::Div(a, b) => Expr::Div(Box::new(rename_free(a, from, to)), Box::new(rename_free(b, from, to))),
        Expr::Pow(a, b) => Expr::Pow(Box::new(rename_free(a, from, to)), Box::new(rename_free(b, from, to))),
        Expr::Factorial(a) => Expr::Factorial(Box::new(rename_free(a, from, to))),
        Expr::Binomial(a, b) => {
            Expr::Binomial(Box::new(rename_free(a, from, to)), Box::new(rename_free(b, from, to)))
        }
        Expr::Sum { var, lo, hi, body } => {
            let lo = Box::new(rename_free(lo, from, to));
            let hi = Box::new(rename_free(hi, from, to));
            if var == from {
                // shadowed inside
                Expr::Sum { var: var.clone(), lo, hi, body: body.clone() }
            } else {
                Expr::Sum { var: var.clone(), lo, hi, body: Box::new(rename_free(body, from, to)) }
            }
        }
    }
}

/// Rename a sum's bound variable (and its occurrences) to a fresh name.
fn alpha_rename_sums(e: &Expr, taken: &mut BTreeSet<String>) -> Expr {
    match e {
        Expr::Sum { var, lo, hi, body } => {
            let mut name = var.clone();
            while taken.contains(&name) {
                name.push('_');
            }
            taken.insert(name.clone());
            let body = if name == *var { (**body).clone() } else { rename_free(body, var, &name) };
            let body = alpha_rename_sums(&body, taken);
            Expr::Sum {
                var: name,
                lo: Box::new((**lo).clone()),
                hi: Box::new((**hi).clone()),
                body: Box::new(body),
            }
        }
        other => other.clone(),
    }
}

fn bound_pair(lo: &Expr, hi: &Expr) -> (Option<LinearForm>, Option<LinearForm>) {
    let blo = if lo.is_infinity() { None } else { expr_to_linear(lo).ok() };
    let bhi = if hi.is_infinity() { None } else { expr_to_linear(hi).ok() };
    (blo, bhi)
}

struct Analysis {
    outer: String,
    ctx: CtxRef,
    lhs: Side,
    rhs: Side,
    identity: String,
}

/// Work out the shared context (outer variable, both sides' sum variables,
/// parameters) and build both sides over it.
fn analyze(lhs: &Expr, rhs: &Expr) -> Result<Analysis, ProveError> {
    // collect names: free names and the chains of nested sums on both sides
    let mut taken = BTreeSet::new();
    let mut free = BTreeSet::new();
    lhs.free_names(&mut free);
    rhs.free_names(&mut free);
    free.remove("inf");
    taken.extend(free.iter().cloned());
    let lhs = alpha_rename_sums(lhs, &mut taken);
    let rhs = alpha_rename_sums(rhs, &mut taken);

    let (lchain, _) = certify::sum_chain(&lhs);
    let (rchain, _) = certify::sum_chain(&rhs);
    let lhs_vars: Vec<String> = lchain.iter().map(|(v, _, _)| v.clone()).collect();
    let rhs_vars: Vec<String> = rchain.iter().map(|(v, _, _)| v.clone()).collect();

    // outer variable: the free name the sum bounds refer to; fall back to
    // the single free non-parameter name
    let mut bound_names: BTreeSet<String> = BTreeSet::new();
    for (_, lo, hi) in lchain.iter().chain(rchain.iter()) {
        for e in [lo, hi] {
            if !e.is_infinity() {
                if let Ok(lf) = expr_to_linear(e) {
                    bound_names.extend(lf.names().cloned());
                }
            }
        }
    }
    bound_names.retain(|nm| !lhs_vars.contains(nm) && !rhs_vars.contains(nm));
    let outer = match bound_names.len() {
        1 => bound_names.into_iter().next().unwrap(),
        0 if free.contains("n") => "n".to_string(),
        0 => {
            return Err(ProveError::OuterVariable(
                "no free name appears in the summation bounds".into(),
            ))
        }
        _ => {
            return Err(ProveError::OuterVariable(format!(
                "several candidates appear in summation bounds: {bound_names:?}"
            )))
        }
    };

    let mut vars = vec![outer.clone()];
    vars.extend(lhs_vars.iter().cloned());
    vars.extend(rhs_vars.iter().cloned());
    let mut params: Vec<String> = free
        .iter()
        .filter(|nm| **nm != outer && !lhs_vars.contains(nm) && !rhs_vars.contains(nm))
        .cloned()
        .collect();
    params.sort();
    let ctx = Context::new(vars, params);

    let build_side = |e: &Expr, own_vars: &[String]| -> Result<Side, ProveError> {
        let (chain, body) = certify::sum_chain(e);
        if !chain.is_empty() {
            let term = to_hyper_term_in_ctx(&body, &ctx, &outer, own_vars)?;
            let bounds = chain.iter().map(|(_, lo, hi)| bound_pair(lo, hi)).collect();
            return Ok(Side::Sum(term.with_bounds(bounds)));
        }
        // closed form, or a top-level sum/difference of closed forms
        let mut names = BTreeSet::new();
        e.free_names(&mut names);
        for v in lhs_vars.iter().chain(rhs_vars.iter()) {
            if names.contains(v) {
                return Err(ProveError::CapturedVariable(v.clone()));
            }
        }
        match to_hyper_term_in_ctx(e, &ctx, &outer, &[]) {
            Ok(t) => Ok(Side::Closed(t)),
            Err(TermError::NotHypergeometric { .. }) => {
                // try a signed combination of closed terms
                let mut parts = Vec::new();
                fn split(e: &Expr, sign: i64, out: &mut Vec<(i64, Expr)>) {
                    match e {
                        Expr::Add(a, b) => {
                            split(a, sign, out);
                            split(b, sign, out);
                        }
                        Expr::Sub(a, b) => {
                            split(a, sign, out);
                            split(b, -sign, out);
                        }
                        other => out.push((sign, other.clone())),
                    }
                }
                let mut raw = Vec::new();
                split(e, 1, &mut raw);
                for (sign, part) in raw {
                    parts.push((sign, to_hyper_term_in_ctx(&part, &ctx, &outer, &[])?));
                }
                Ok(Side::Combo(parts))
            }
            Err(other) => Err(other.into()),
        }
    };

    let lhs_side = build_side(&lhs, &lhs_vars)?;
    let rhs_side = build_side(&rhs, &rhs_vars)?;
    let identity = format!("{} = {}", crate::expr::print(&lhs), crate::expr::print(&rhs));
    Ok(Analysis { outer, ctx, lhs: lhs_side, rhs: rhs_side, identity })
}

/// Recurrence and certificate for one side. Closed forms get their exact
/// first-order recurrence straight from the shift quotient.
fn side_certificate(side: &Side, opts: &ProveOptions, cost: &mut Cost) -> Result<Option<Certificate>, ProveError> {
    match side {
        Side::Sum(t) => match find_recurrence(t, opts.max_order, cost) {
            Ok(c) => Ok(Some(c)),
            Err(TelescopeError::OrderBoundExceeded { .. }) => Ok(None),
            Err(e) => Err(e.into()),
        },
        Side::Closed(t) => {
            let q = t.outer_quotient();
            let rec = Recurrence::normalize(vec![-q.num().clone(), q.den().clone()]);
            let cert = Certificate {
                term: t.clone(),
                recurrence: rec,
                rs: vec![],
                degree_meta: Default::default(),
                provenance: Provenance::Discovered,
            };
            let defect = telescoping_defect(&cert.term, &cert.recurrence, &[], cost)?;
            debug_assert!(defect.is_zero());
            Ok(Some(cert))
        }
        Side::Combo(_) => Ok(None),
    }
}

/// Largest index that initial values must cover: L values past the largest
/// nonnegative integer root of the leading coefficient.
fn initial_value_bound(rec: &Recurrence) -> i64 {
    let l = rec.order() as i64;
    let nroot = crate::gosper::identical_integer_roots(rec.leading(), 0)
        .into_iter()
        .filter(|&r| r >= 0)
        .max()
        .unwrap_or(-1);
    l.max(nroot + l)
}

/// Operator product: (q compose p) g (n) = sum_j q_j(n) (P g)(n + j), i.e.
/// coefficients r_m = sum_{i+j=m} q_j(n) p_i(n+j).
fn compose_recurrences(q: &Recurrence, p: &Recurrence) -> Recurrence {
    let ctx = q.ctx();
    let outer = 0usize;
    let mut coeffs = vec![MultiPoly::zero(ctx); q.order() + p.order() + 1];
    for (j, qc) in q.coeffs().iter().enumerate() {
        for (i, pc) in p.coeffs().iter().enumerate() {
            coeffs[i + j] = &coeffs[i + j] + &(qc * &pc.shift(outer, j as i64));
        }
    }
    Recurrence::normalize(coeffs)
}

/// Certificate for (q compose p) built from a certificate for p:
/// R' = sum_j q_j(n) R(n+j, .) u_j.
fn compose_certificate(q: &Recurrence, cert: &Certificate, cost: &mut Cost) -> Result<Certificate, ProveError> {
    let term = &cert.term;
    let outer = term.outer_idx();
    let mut rs_new = Vec::with_capacity(cert.rs.len());
    for r in &cert.rs {
        let mut acc = RationalFunction::zero(term.ctx());
        for (j, qc) in q.coeffs().iter().enumerate() {
            let u = term.outer_shift_ratio(j)?;
            let piece = RationalFunction::from_poly(qc.clone())
                .checked_mul(&r.shift(outer, j as i64))?
                .checked_mul(&u)?;
            acc = acc.checked_add(&piece)?;
            cost.bump_mults(2);
        }
        rs_new.push(acc);
    }
    let rec = compose_recurrences(q, &cert.recurrence);
    let defect = telescoping_defect(term, &rec, &rs_new, cost)?;
    assert!(defect.is_zero(), "composed certificate failed its exact check");
    Ok(Certificate {
        term: term.clone(),
        recurrence: rec,
        rs: rs_new,
        degree_meta: cert.degree_meta.clone(),
        provenance: cert.provenance,
    })
}

/// Try to put both sides under one recurrence: equal recurrences, a
/// cross-certification of one side's recurrence on the other, or an operator
/// product certified on both sides.
fn common_recurrence(
    analysis: &Analysis,
    lhs_cert: &Certificate,
    rhs_cert: &Certificate,
    cost: &mut Cost,
) -> Result<Option<(Recurrence, Certificate, Certificate)>, ProveError> {
    if lhs_cert.recurrence == rhs_cert.recurrence {
        return Ok(Some((lhs_cert.recurrence.clone(), lhs_cert.clone(), rhs_cert.clone())));
    }
    // does the rhs recurrence certify on the lhs term (or vice versa)?
    let try_fixed = |side: &Side, rec: &Recurrence, cost: &mut Cost| -> Result<Option<Certificate>, ProveError> {
        match side {
            Side::Sum(t) => Ok(certify_fixed_recurrence(t, rec, cost)?.map(|r| Certificate {
                term: t.clone(),
                recurrence: rec.clone(),
                rs: vec![r],
                degree_meta: Default::default(),
                provenance: Provenance::Discovered,
            })),
            Side::Closed(t) => {
                let cert = Certificate {
                    term: t.clone(),
                    recurrence: rec.clone(),
                    rs: vec![],
                    degree_meta: Default::default(),
                    provenance: Provenance::Discovered,
                };
                if telescoping_defect(t, rec, &[], cost)?.is_zero() {
                    Ok(Some(cert))
                } else {
                    Ok(None)
                }
            }
            Side::Combo(_) => Ok(None),
        }
    };
    if let Some(lc) = try_fixed(&analysis.lhs, &rhs_cert.recurrence, cost)? {
        return Ok(Some((rhs_cert.recurrence.clone(), lc, rhs_cert.clone())));
    }
    if let Some(rc) = try_fixed(&analysis.rhs, &lhs_cert.recurrence, cost)? {
        return Ok(Some((lhs_cert.recurrence.clone(), lhs_cert.clone(), rc)));
    }
    // operator product M = L_lhs . L_rhs: the rhs inherits a composed
    // certificate; the lhs needs a fresh fixed-recurrence solve (and the
    // mirror image the other way round)
    let m = compose_recurrences(&lhs_cert.recurrence, &rhs_cert.recurrence);
    if let Some(lc) = try_fixed(&analysis.lhs, &m, cost)? {
        let rc = compose_certificate(&lhs_cert.recurrence, rhs_cert, cost)?;
        return Ok(Some((m, lc, rc)));
    }
    let m = compose_recurrences(&rhs_cert.recurrence, &lhs_cert.recurrence);
    if let Some(rc) = try_fixed(&analysis.rhs, &m, cost)? {
        let lc = compose_certificate(&rhs_cert.recurrence, lhs_cert, cost)?;
        return Ok(Some((m, lc, rc)));
    }
    Ok(None)
}

fn verify_certificate(cert: &Certificate, opts: &ProveOptions) -> Result<ProofReport, ProveError> {
    Ok(match opts.mode {
        ProveMode::Rigorous => certify::verify_rigorous(cert)?,
        ProveMode::Semi => certify::verify_probabilistic(cert, opts.trials, opts.seed)?,
    })
}

/// Constants render as plain rationals, everything else canonically.
fn render_value(v: &RationalFunction) -> String {
    match v.constant_value() {
        Some(c) => rat_to_string(&c),
        None => v.to_canonical_string(),
    }
}

fn inconclusive(reason: &str, mode: Mode, cost: Cost) -> ProofReport {
    ProofReport {
        verdict: Verdict::Inconclusive { reason: reason.to_string() },
        mode,
        price: PriceTag::unpriced(cost),
        initial_values: vec![],
        cleared_degree: 0,
        trials: 0,
        seed: 0,
        points: vec![],
        notes: vec![],
    }
}

/// Prove (or refute) `lhs = rhs`: find a recurrence for each side, reconcile
/// them, verify the certificates per mode, and match initial values up to the
/// singularity-guarded bound.
pub fn prove_identity(lhs: &Expr, rhs: &RhsSpec, opts: &ProveOptions) -> Result<ProveOutcome, ProveError> {
    let start = std::time::Instant::now();
    let mut cost = Cost::new();
    let report_mode = match opts.mode {
        ProveMode::Rigorous => Mode::Rigorous,
        ProveMode::Semi => Mode::Probabilistic,
    };

    // closed-form request: prove the sum satisfies a first-order recurrence
    if let RhsSpec::ProductForm = rhs {
        return prove_product_form(lhs, opts, start);
    }
    let RhsSpec::Expr(rhs_expr) = rhs else { unreachable!() };

    let analysis = analyze(lhs, rhs_expr)?;

    // cheap exact refutation scan
    let mut initial_strings: Vec<(i64, String)> = Vec::new();
    for n in 0..=4i64 {
        let lv = analysis.lhs.value_at(n)?;
        let rv = analysis.rhs.value_at(n)?;
        if lv != rv {
            let witness = format!(
                "{} = {n}: left {} vs right {}",
                analysis.outer,
                lv.to_canonical_string(),
                rv.to_canonical_string()
            );
            let mut report = inconclusive("", report_mode, cost);
            report.verdict = Verdict::Refuted { witness };
            report.price = PriceTag::proved(report.price.cost.clone());
            report.price.cost.wall_ms = start.elapsed().as_millis() as u64;
            return Ok(ProveOutcome {
                report,
                lhs_certificate: None,
                rhs_certificate: None,
                common_recurrence: None,
                closed_form: None,
                identity: analysis.identity,
                initial_values: vec![],
            });
        }
        initial_strings.push((n, lv.to_canonical_string()));
    }

    // recurrences for both sides
    let lhs_cert = side_certificate(&analysis.lhs, opts, &mut cost)?;
    let rhs_cert = side_certificate(&analysis.rhs, opts, &mut cost)?;
    let (Some(lhs_cert), Some(rhs_cert)) = (lhs_cert, rhs_cert) else {
        let reason = match (&analysis.lhs, &analysis.rhs) {
            (Side::Combo(_), _) | (_, Side::Combo(_)) => {
                "one side is a sum of several closed forms; no common recurrence machinery applies"
            }
            _ => "no recurrence found within the order budget",
        };
        let mut report = inconclusive(reason, report_mode, cost);
        report.price.cost.wall_ms = start.elapsed().as_millis() as u64;
        return Ok(ProveOutcome {
            report,
            lhs_certificate: None,
            rhs_certificate: None,
            common_recurrence: None,
            closed_form: None,
            identity: analysis.identity,
            initial_values: vec![],
        });
    };

    // one recurrence for both sides
    let Some((rec, lhs_cert, rhs_cert)) = common_recurrence(&analysis, &lhs_cert, &rhs_cert, &mut cost)?
    else {
        let mut report = inconclusive(
            "the two sides' recurrences could not be reconciled within budget",
            report_mode,
            cost,
        );
        report.price.cost.wall_ms = start.elapsed().as_millis() as u64;
        return Ok(ProveOutcome {
            report,
            lhs_certificate: Some(lhs_cert),
            rhs_certificate: Some(rhs_cert),
            common_recurrence: None,
            closed_form: None,
            identity: analysis.identity,
            initial_values: vec![],
        });
    };

    // verify both certificates per mode and compose the price
    let lhs_report = verify_certificate(&lhs_cert, opts)?;
    let rhs_report = verify_certificate(&rhs_cert, opts)?;
    let mut price = compose(&lhs_report.price, &rhs_report.price);
    price.cost.field_mults += cost.field_mults;
    price.cost.unknowns += cost.unknowns;
    price.cost.equations += cost.equations;
    price.cost.peak_terms = price.cost.peak_terms.max(cost.peak_terms);
    for (label, rep) in [("left", &lhs_report), ("right", &rhs_report)] {
        if let Verdict::Refuted { witness } = &rep.verdict {
            let mut report = inconclusive("", report_mode, price.cost.clone());
            report.verdict =
                Verdict::Refuted { witness: format!("{label} certificate failed: {witness}") };
            return Ok(ProveOutcome {
                report,
                lhs_certificate: Some(lhs_cert),
                rhs_certificate: Some(rhs_cert),
                common_recurrence: Some(rec),
                closed_form: None,
                identity: analysis.identity,
                initial_values: vec![],
            });
        }
    }

    // initial values up to the singularity-guarded bound
    let bound = initial_value_bound(&rec);
    let mut initial_values = Vec::new();
    for n in 0..=bound {
        let lv = analysis.lhs.value_at(n)?;
        let rv = analysis.rhs.value_at(n)?;
        if lv != rv {
            let witness = format!(
                "{} = {n}: left {} vs right {}",
                analysis.outer,
                lv.to_canonical_string(),
                rv.to_canonical_string()
            );
            let mut report = inconclusive("", report_mode, price.cost.clone());
            report.verdict = Verdict::Refuted { witness };
            return Ok(ProveOutcome {
                report,
                lhs_certificate: Some(lhs_cert),
                rhs_certificate: Some(rhs_cert),
                common_recurrence: Some(rec),
                closed_form: None,
                identity: analysis.identity,
                initial_values: vec![],
            });
        }
        if n as usize >= initial_strings.len() {
            initial_strings.push((n, lv.to_canonical_string()));
        }
        if let Some(c) = lv.constant_value() {
            initial_values.push(c);
        }
    }

    let mut report = ProofReport {
        verdict: Verdict::Proved,
        mode: report_mode,
        price,
        initial_values: initial_strings,
        cleared_degree: lhs_report.cleared_degree.max(rhs_report.cleared_degree),
        trials: lhs_report.trials + rhs_report.trials,
        seed: opts.seed,
        points: [lhs_report.points.clone(), rhs_report.points.clone()].concat(),
        notes: vec![format!("common recurrence: {}", rec.display("g", &analysis.outer))],
    };
    report.price.cost.wall_ms = start.elapsed().as_millis() as u64;
    Ok(ProveOutcome {
        report,
        lhs_certificate: Some(lhs_cert),
        rhs_certificate: Some(rhs_cert),
        common_recurrence: Some(rec),
        closed_form: None,
        identity: analysis.identity,
        initial_values,
    })
}

/// Build a hypergeometric term from a standalone (possibly nested) sum
/// expression, inferring the outer variable from the summation bounds.
/// Returns the term and the outer variable's name.
pub fn build_sum_term(e: &Expr) -> Result<(HyperTerm, String), ProveError> {
    let mut taken = BTreeSet::new();
    let mut free = BTreeSet::new();
    e.free_names(&mut free);
    free.remove("inf");
    taken.extend(free.iter().cloned());
    let e = alpha_rename_sums(e, &mut taken);
    let (chain, body) = certify::sum_chain(&e);
    if chain.is_empty() {
        return Err(ProveError::Unsupported("expected a sum expression".into()));
    }
    let sum_vars: Vec<String> = chain.iter().map(|(v, _, _)| v.clone()).collect();
    let mut bound_names: BTreeSet<String> = BTreeSet::new();
    for (_, lo, hi) in &chain {
        for b in [lo, hi] {
            if let Ok(lf) = expr_to_linear(b) {
                bound_names.extend(lf.names().cloned());
            }
        }
    }
    bound_names.retain(|nm| !sum_vars.contains(nm));
    let outer = bound_names
        .into_iter()
        .next()
        .ok_or_else(|| ProveError::OuterVariable("no free name in the summation bounds".into()))?;
    let mut vars = vec![outer.clone()];
    vars.extend(sum_vars.iter().cloned());
    let mut params: Vec<String> =
        free.iter().filter(|nm| **nm != outer && !sum_vars.contains(nm)).cloned().collect();
    params.sort();
    let ctx = Context::new(vars, params);
    let term = to_hyper_term_in_ctx(&body, &ctx, &outer, &sum_vars)?;
    let bounds = chain.iter().map(|(_, lo, hi)| bound_pair(lo, hi)).collect();
    Ok((term.with_bounds(bounds), outer))
}

fn prove_product_form(
    lhs: &Expr,
    opts: &ProveOptions,
    start: std::time::Instant,
) -> Result<ProveOutcome, ProveError> {
    let mut cost = Cost::new();
    let report_mode = match opts.mode {
        ProveMode::Rigorous => Mode::Rigorous,
        ProveMode::Semi => Mode::Probabilistic,
    };
    let (term, outer) = build_sum_term(lhs)?;
    let lhs = lhs.clone();

    let cert = match find_recurrence(&term, opts.max_order, &mut cost) {
        Ok(c) => c,
        Err(TelescopeError::OrderBoundExceeded { l_max }) => {
            let mut report = inconclusive(
                &format!("no recurrence up to order {l_max}; cannot evaluate in closed form"),
                report_mode,
                cost,
            );
            report.price.cost.wall_ms = start.elapsed().as_millis() as u64;
            return Ok(ProveOutcome {
                report,
                lhs_certificate: None,
                rhs_certificate: None,
                common_recurrence: None,
                closed_form: None,
                identity: crate::expr::print(&lhs),
                initial_values: vec![],
            });
        }
        Err(e) => return Err(e.into()),
    };
    if cert.recurrence.order() != 1 {
        let mut report = inconclusive(
            &format!(
                "minimal telescoped recurrence has order {}; first-order closed form does not apply",
                cert.recurrence.order()
            ),
            report_mode,
            cost,
        );
        report.notes.push(cert.recurrence.display("g", &outer));
        report.price.cost.wall_ms = start.elapsed().as_millis() as u64;
        return Ok(ProveOutcome {
            report,
            lhs_certificate: Some(cert),
            rhs_certificate: None,
            common_recurrence: None,
            closed_form: None,
            identity: crate::expr::print(&lhs),
            initial_values: vec![],
        });
    }
    if !term.param_names().is_empty() {
        return Err(ProveError::Unsupported(
            "closed-form evaluation needs a parameter-free sum".into(),
        ));
    }
    let g0 = direct_sum(&term, 0)?;
    let closed = solve_first_order(&cert.recurrence, g0.clone())?;
    let cert_report = verify_certificate(&cert, opts)?;
    if let Verdict::Refuted { witness } = &cert_report.verdict {
        return Err(ProveError::Unsupported(format!("discovered certificate failed: {witness}")));
    }

    // the recurrence is certified and the closed form is its unique solution
    // seeded with g(0); cross-check a few unrolled values against the sum
    let mut initial_values = vec![g0];
    for n in 1..=5i64 {
        initial_values.push(direct_sum(&term, n)?);
    }
    let unrolled = closed.unroll(5)?;
    for (n, (a, b)) in unrolled.iter().zip(initial_values.iter()).enumerate() {
        assert_eq!(a, b, "closed form disagrees with the sum at n={n}");
    }

    let identity = format!("{} = {}", crate::expr::print(&lhs), closed.display());
    let rec = cert.recurrence.clone();
    let mut report = ProofReport {
        verdict: Verdict::Proved,
        mode: report_mode,
        price: compose(&cert_report.price, &PriceTag::proved(cost)),
        initial_values: initial_values
            .iter()
            .enumerate()
            .map(|(n, v)| (n as i64, rat_to_string(v)))
            .collect(),
        cleared_degree: cert_report.cleared_degree,
        trials: cert_report.trials,
        seed: opts.seed,
        points: cert_report.points.clone(),
        notes: vec![
            format!("recurrence: {}", rec.display("g", &outer)),
            format!("closed form: {}", closed.display()),
        ],
    };
    report.price.cost.wall_ms = start.elapsed().as_millis() as u64;
    Ok(ProveOutcome {
        report,
        lhs_certificate: Some(cert),
        rhs_certificate: None,
        common_recurrence: Some(rec),
        closed_form: Some(closed),
        identity,
        initial_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::hyper::to_hyper_term;
    use crate::rat::rat_int;

    fn term(src: &str) -> HyperTerm {
        to_hyper_term(&parse(src).unwrap(), "n", &["k".to_string()]).unwrap()
    }

    #[test]
    fn direct_sums_match_hand_computations() {
        let dixon = term("(-1)^k * binomial(2*n, n+k)^3");
        assert_eq!(direct_sum(&dixon, 1).unwrap(), rat_int(6));
        assert_eq!(direct_sum(&dixon, 2).unwrap(), rat_int(90));
        let rows = term("binomial(3, k)");
        // constant upper argument: support holds k in [0, 3] regardless of n
        assert_eq!(direct_sum(&rows, 0).unwrap(), rat_int(8));
    }

    #[test]
    fn unroll_factorial_recurrence() {
        let ctx = Context::new(vec!["n"], vec![]);
        // (n+1) g(n) - g(n+1) = 0, normalized
        let rec = Recurrence::normalize(vec![
            crate::expr::parse_poly("-n - 1", &ctx).unwrap(),
            MultiPoly::one(&ctx),
        ]);
        let w = unroll(&rec, &[rat_int(1)], 5).unwrap();
        let vals: Vec<i64> = w.values.iter().map(|v| i64::try_from(v.clone().unwrap().to_integer()).unwrap()).collect();
        assert_eq!(vals, vec![1, 1, 2, 6, 24, 120]);
        assert!(w.singular_indices.is_empty());
    }

    #[test]
    fn unroll_doubling_recurrence() {
        let ctx = Context::new(vec!["n"], vec![]);
        let rec = Recurrence::normalize(vec![MultiPoly::int(&ctx, -2), MultiPoly::one(&ctx)]);
        let w = unroll(&rec, &[rat_int(1)], 4).unwrap();
        let vals: Vec<Option<i64>> =
            w.values.iter().map(|v| v.clone().map(|r| i64::try_from(r.to_integer()).unwrap())).collect();
        assert_eq!(vals, vec![Some(1), Some(2), Some(4), Some(8), Some(16)]);
    }

    #[test]
    fn unroll_flags_singular_leading_coefficient() {
        let ctx = Context::new(vec!["n"], vec![]);
        // n g(n+1) - g(n) = 0: leading coefficient vanishes at n = 0
        let rec = Recurrence::from_coeffs_raw(vec![
            MultiPoly::int(&ctx, -1),
            MultiPoly::var(&ctx, "n").unwrap(),
        ]);
        let w = unroll(&rec, &[rat_int(1)], 4).unwrap();
        assert_eq!(w.singular_indices, vec![0]);
        assert_eq!(w.values[0], Some(rat_int(1)));
        assert!(w.values[1..].iter().all(|v| v.is_none()));
    }

    #[test]
    fn first_order_closed_forms() {
        let ctx = Context::new(vec!["n"], vec![]);
        let factorial = Recurrence::normalize(vec![
            crate::expr::parse_poly("-n - 1", &ctx).unwrap(),
            MultiPoly::one(&ctx),
        ]);
        let cf = solve_first_order(&factorial, rat_int(1)).unwrap();
        assert_eq!(cf.display(), "n!");
        let vals: Vec<i64> =
            cf.unroll(5).unwrap().iter().map(|v| i64::try_from(v.to_integer()).unwrap()).collect();
        assert_eq!(vals, vec![1, 1, 2, 6, 24, 120]);

        let doubling = Recurrence::normalize(vec![MultiPoly::int(&ctx, -2), MultiPoly::one(&ctx)]);
        let cf = solve_first_order(&doubling, rat_int(1)).unwrap();
        assert_eq!(cf.display(), "2^n");

        // (n+1) g(n+1) - 2(2n+1) g(n) = 0: central binomial coefficients
        let central = Recurrence::normalize(vec![
            crate::expr::parse_poly("-2*(2*n+1)", &ctx).unwrap(),
            crate::expr::parse_poly("n+1", &ctx).unwrap(),
        ]);
        let cf = solve_first_order(&central, rat_int(1)).unwrap();
        let vals: Vec<i64> =
            cf.unroll(4).unwrap().iter().map(|v| i64::try_from(v.to_integer()).unwrap()).collect();
        assert_eq!(vals, vec![1, 2, 6, 20, 70]);
        assert!(cf.display().starts_with("prod_"));
    }

    #[test]
    fn singular_leading_coefficient_is_an_error() {
        let ctx = Context::new(vec!["n"], vec![]);
        let rec = Recurrence::from_coeffs_raw(vec![
            MultiPoly::int(&ctx, -1),
            crate::expr::parse_poly("n - 2", &ctx).unwrap(),
        ]);
        assert!(solve_first_order(&rec, rat_int(1)).is_err());
    }

    fn prove(text: &str, opts: &ProveOptions) -> ProveOutcome {
        let (l, r) = crate::expr::split_identity(text).unwrap();
        let lhs = parse(l).unwrap();
        let rhs = if r.trim() == "product_form" {
            RhsSpec::ProductForm
        } else {
            RhsSpec::Expr(parse(r).unwrap())
        };
        prove_identity(&lhs, &rhs, opts).unwrap()
    }

    #[test]
    fn proves_alternating_cube_sum_against_closed_form() {
        let out = prove(
            "sum(k, -n, n, (-1)^k*binomial(2*n, n+k)^3) = factorial(3*n)/factorial(n)^3",
            &ProveOptions::default(),
        );
        assert_eq!(out.report.verdict, Verdict::Proved);
        assert!(out.report.price.rigor.is_proved());
        let rec = out.common_recurrence.unwrap();
        assert_eq!(rec.order(), 1);
    }

    #[test]
    fn proves_parametrized_binomial_theorem() {
        let out = prove(
            "sum(k, 0, n, binomial(n, k)*a^k*b^(n-k)) = (a+b)^n",
            &ProveOptions::default(),
        );
        assert_eq!(out.report.verdict, Verdict::Proved);
    }

    #[test]
    fn refutes_off_by_one_identity_at_n0() {
        let out = prove(
            "sum(k, 0, n, binomial(n, k)^2) = binomial(2*n, n) + 1",
            &ProveOptions::default(),
        );
        match &out.report.verdict {
            Verdict::Refuted { witness } => assert!(witness.contains("n = 0"), "witness: {witness}"),
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn product_form_evaluates_alternating_cube_sum() {
        let out = prove("sum(k, -n, n, (-1)^k*binomial(2*n, n+k)^3) = product_form", &ProveOptions::default());
        assert_eq!(out.report.verdict, Verdict::Proved);
        let cf = out.closed_form.unwrap();
        let vals: Vec<i64> =
            cf.unroll(3).unwrap().iter().map(|v| i64::try_from(v.clone().to_integer()).unwrap()).collect();
        assert_eq!(vals, vec![1, 6, 90, 1680]);
    }

    #[test]
    fn order_budget_yields_inconclusive() {
        let (l, _) = ("sum(k, 0, n, binomial(n, k))", "");
        let lhs = parse(l).unwrap();
        let out = prove_identity(
            &lhs,
            &RhsSpec::ProductForm,
            &ProveOptions { max_order: 0, ..Default::default() },
        )
        .unwrap();
        assert!(matches!(out.report.verdict, Verdict::Inconclusive { .. }));
    }

    #[test]
    fn proving_is_symmetric_in_the_two_sides() {
        let a = prove("sum(k, 0, n, binomial(n, k)) = 2^n", &ProveOptions::default());
        let b = prove("2^n = sum(k, 0, n, binomial(n, k))", &ProveOptions::default());
        assert_eq!(a.report.verdict, b.report.verdict);
        assert_eq!(a.common_recurrence, b.common_recurrence);
    }

    #[test]
    fn semi_mode_prices_the_same_verdict() {
        let opts = ProveOptions { mode: ProveMode::Semi, trials: 12, seed: 9, ..Default::default() };
        let out = prove("sum(k, 0, n, binomial(n, k)) = 2^n", &opts);
        assert_eq!(out.report.verdict, Verdict::Proved);
        let e = out.report.price.rigor.confidence_exponent().expect("semi-rigorous");
        assert!(e >= 100, "exponent {e}");
    }

    #[test]
    fn sum_equals_sum_with_renamed_bound_variable() {
        let out = prove(
            "sum(k, 0, n, binomial(n, k)) = sum(k, 0, n, binomial(n, n-k))",
            &ProveOptions::default(),
        );
        assert_eq!(out.report.verdict, Verdict::Proved);
    }
}
