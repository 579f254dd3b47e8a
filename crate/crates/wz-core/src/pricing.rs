//! Price tags for proofs: rigor levels, deterministic cost counters, and the
//! composition rule for deductions.
//!
//! A price has two parts. The rigor level says whether a statement is proved
//! outright or only established up to an explicit error-probability bound
//! (`SemiRigorous(e)` means error probability <= 2^-e). The cost counters
//! record how much exact arithmetic the verdict consumed. When two priced
//! statements are combined, costs add and error bounds combine by the union
//! bound, so composition never overstates confidence and never loses cost.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Deterministic work counters. Wall-clock time is measured and reported for
/// humans but excluded from serialized reports so identical runs stay
/// byte-identical.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cost {
    /// Multiplications in the active coefficient field (polynomial products
    /// during symbolic elimination, rational products during numeric work).
    pub field_mults: u64,
    /// Unknown-count of every linear system constructed, accumulated.
    pub unknowns: u64,
    /// Equation-count of every linear system constructed, accumulated.
    pub equations: u64,
    /// Largest polynomial term count seen while eliminating.
    pub peak_terms: u64,
    #[serde(skip)]
    pub wall_ms: u64,
}

impl Cost {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bump_mults(&mut self, n: u64) {
        self.field_mults += n;
    }

    pub fn observe_terms(&mut self, terms: u64) {
        if terms > self.peak_terms {
            self.peak_terms = terms;
        }
    }

    pub fn record_system(&mut self, unknowns: usize, equations: usize) {
        self.unknowns += unknowns as u64;
        self.equations += equations as u64;
    }

    pub fn add(&self, other: &Cost) -> Cost {
        Cost {
            field_mults: self.field_mults + other.field_mults,
            unknowns: self.unknowns + other.unknowns,
            equations: self.equations + other.equations,
            peak_terms: self.peak_terms.max(other.peak_terms),
            wall_ms: self.wall_ms + other.wall_ms,
        }
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} field mults, {}x{} system cells, peak {} terms",
            self.field_mults, self.equations, self.unknowns, self.peak_terms
        )
    }
}

/// Rigor level of a priced statement.
///
/// Semi-rigorous verdicts carry their error bound as an exact rational, so
/// composing many of them stays associative; the advertised confidence
/// exponent (error probability <= 2^-e) is derived from the exact mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rigor {
    /// Exact proof; error probability zero (confidence exponent infinity).
    Proved,
    /// Error probability bounded by the enclosed exact rational.
    SemiRigorous(crate::rat::Rat),
    /// No confidence statement attached.
    Unpriced,
}

/// Largest e >= 0 with eps <= 2^-e (0 when eps >= 1 or eps <= 0).
pub fn exponent_of_error(eps: &crate::rat::Rat) -> u64 {
    use num::Signed;
    if !eps.is_positive() {
        return u64::MAX; // zero error: treat as unbounded confidence
    }
    let p = eps.numer().abs();
    let q = eps.denom().clone();
    if p >= q {
        return 0;
    }
    // p * 2^e <= q  <=>  e <= log2(q/p)
    let mut e = (q.bits() - p.bits()) as u64;
    while (p.clone() << (e + 1)) <= q {
        e += 1;
    }
    while e > 0 && (p.clone() << e) > q {
        e -= 1;
    }
    e
}

impl Rigor {
    /// Build a semi-rigorous level from an exponent: error <= 2^-e.
    pub fn from_exponent(e: u32) -> Rigor {
        use num::BigInt;
        let eps = crate::rat::Rat::new(BigInt::from(1), BigInt::from(1) << e);
        Rigor::SemiRigorous(eps)
    }

    pub fn confidence_exponent(&self) -> Option<u64> {
        match self {
            Rigor::SemiRigorous(eps) => Some(exponent_of_error(eps)),
            _ => None,
        }
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, Rigor::Proved)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriceTag {
    pub rigor: Rigor,
    pub cost: Cost,
}

impl PriceTag {
    pub fn proved(cost: Cost) -> Self {
        PriceTag { rigor: Rigor::Proved, cost }
    }

    pub fn semi_rigorous(exponent: u32, cost: Cost) -> Self {
        PriceTag { rigor: Rigor::from_exponent(exponent), cost }
    }

    pub fn unpriced(cost: Cost) -> Self {
        PriceTag { rigor: Rigor::Unpriced, cost }
    }
}

/// Combine the prices of two statements used together in a deduction.
/// Costs add component-wise. Error bounds combine by the union bound (exact
/// addition of the error masses); a proved statement contributes zero error.
pub fn compose(p: &PriceTag, q: &PriceTag) -> PriceTag {
    let cost = Cost {
        field_mults: p.cost.field_mults + q.cost.field_mults,
        unknowns: p.cost.unknowns + q.cost.unknowns,
        equations: p.cost.equations + q.cost.equations,
        peak_terms: p.cost.peak_terms + q.cost.peak_terms,
        wall_ms: p.cost.wall_ms + q.cost.wall_ms,
    };
    let rigor = match (&p.rigor, &q.rigor) {
        (Rigor::Unpriced, _) | (_, Rigor::Unpriced) => Rigor::Unpriced,
        (Rigor::Proved, Rigor::Proved) => Rigor::Proved,
        (Rigor::Proved, Rigor::SemiRigorous(e)) | (Rigor::SemiRigorous(e), Rigor::Proved) => {
            Rigor::SemiRigorous(e.clone())
        }
        (Rigor::SemiRigorous(e1), Rigor::SemiRigorous(e2)) => Rigor::SemiRigorous(e1 + e2),
    };
    PriceTag { rigor, cost }
}

/// Predicted (not measured) cost of an order-`order` telescoping search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostEstimate {
    pub unknowns: usize,
    pub equations: usize,
    /// Cubic elimination-operation prediction; an estimate, not a measurement.
    pub elimination_ops: u64,
}

impl CostEstimate {
    pub fn from_dimensions(unknowns: usize, equations: usize) -> Self {
        let u = unknowns as u64;
        let e = equations as u64;
        CostEstimate { unknowns, equations, elimination_ops: e * u * u.min(e) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cost(m: u64) -> Cost {
        Cost { field_mults: m, ..Cost::default() }
    }

    #[test]
    fn proved_composes_to_proved() {
        let p = compose(&PriceTag::proved(cost(3)), &PriceTag::proved(cost(4)));
        assert_eq!(p.rigor, Rigor::Proved);
        assert_eq!(p.cost.field_mults, 7);
    }

    #[test]
    fn proved_is_identity_for_confidence() {
        let p = compose(&PriceTag::proved(cost(1)), &PriceTag::semi_rigorous(40, cost(1)));
        assert_eq!(p.rigor.confidence_exponent(), Some(40));
    }

    #[test]
    fn union_bound_costs_one_bit() {
        let p = compose(&PriceTag::semi_rigorous(40, cost(0)), &PriceTag::semi_rigorous(40, cost(0)));
        assert_eq!(p.rigor.confidence_exponent(), Some(39));
        let q = compose(&PriceTag::semi_rigorous(40, cost(0)), &PriceTag::semi_rigorous(50, cost(0)));
        assert_eq!(q.rigor.confidence_exponent(), Some(39));
    }

    #[test]
    fn exponent_of_exact_error_masses() {
        use crate::rat::rat;
        assert_eq!(exponent_of_error(&rat(1, 1024)), 10);
        assert_eq!(exponent_of_error(&rat(3, 1024)), 8); // 3/1024 <= 2^-8, > 2^-9
        assert_eq!(exponent_of_error(&rat(5, 4)), 0);
    }

    #[test]
    fn compose_is_commutative_and_associative_on_samples() {
        let tags = [
            PriceTag::proved(cost(1)),
            PriceTag::semi_rigorous(10, cost(2)),
            PriceTag::semi_rigorous(40, cost(3)),
            PriceTag::semi_rigorous(0, cost(4)),
        ];
        for a in &tags {
            for b in &tags {
                assert_eq!(compose(a, b).rigor, compose(b, a).rigor);
                for c in &tags {
                    let left = compose(&compose(a, b), c);
                    let right = compose(a, &compose(b, c));
                    assert_eq!(left.rigor, right.rigor);
                    assert_eq!(left.cost, right.cost);
                }
            }
        }
    }

    #[test]
    fn estimates_grow_with_dimensions() {
        let small = CostEstimate::from_dimensions(5, 8);
        let large = CostEstimate::from_dimensions(7, 10);
        assert!(large.elimination_ops > small.elimination_ops);
    }
}
