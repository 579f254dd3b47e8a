//! Exact-arithmetic proving for terminating hypergeometric identities.
//!
//! The pipeline: parse an identity into an expression tree, convert summands
//! into hypergeometric terms (shift quotients as canonical rational
//! functions), discover a polynomial-coefficient recurrence plus a
//! rational-function certificate by creative telescoping, then verify the
//! certificate either rigorously (an exact polynomial identity) or
//! probabilistically (random evaluation with an explicit error bound). Every
//! verdict carries a price: deterministic cost counters and a confidence
//! exponent.
//!
//! The guide in `book/` walks through each layer with runnable examples; the
//! same snippets are compiled and executed as doc-tests of this crate.

pub mod certify;
pub mod expr;
pub mod gosper;
pub mod hyper;
pub mod poly;
pub mod pricing;
pub mod qseries;
pub mod rat;
pub mod ratfun;
pub mod recurrence;
pub mod solve;
pub mod telescope;

pub use poly::{ArithError, Context, CtxRef, MultiPoly};
pub use pricing::{compose, Cost, CostEstimate, PriceTag, Rigor};
pub use rat::Rat;
pub use ratfun::RationalFunction;
