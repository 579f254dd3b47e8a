//! Deterministic JSON rendering of proof reports: identical seeds must give
//! byte-identical output, so wall-clock time never appears here.

use serde::Serialize;
use wz_core::certify::{ProofReport, Verdict};
use wz_core::pricing::{PriceTag, Rigor};
use wz_core::recurrence::ProveOutcome;
use wz_core::telescope::Certificate;
use wz_core::Cost;

#[derive(Serialize)]
pub struct PriceJson {
    pub mode: String,
    pub confidence_exponent: Option<u64>,
    pub cost: Cost,
}

impl PriceJson {
    fn from_price(price: &PriceTag, mode: &str) -> Self {
        PriceJson {
            mode: mode.to_string(),
            confidence_exponent: match &price.rigor {
                Rigor::SemiRigorous(_) => price.rigor.confidence_exponent(),
                _ => None,
            },
            cost: price.cost.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct JsonReport {
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recurrence: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recurrence_display: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificates: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<String>,
    pub price: PriceJson,
    pub initial_values: Vec<(i64, String)>,
    pub cleared_degree: u64,
    pub trials: u32,
    pub seed: u64,
    pub points: Vec<String>,
    pub notes: Vec<String>,
}

impl JsonReport {
    pub fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    fn verdict_fields(v: &Verdict) -> (String, Option<String>, Option<String>) {
        match v {
            Verdict::Proved => ("Proved".into(), None, None),
            Verdict::Refuted { witness } => ("Refuted".into(), Some(witness.clone()), None),
            Verdict::Inconclusive { reason } => ("Inconclusive".into(), None, Some(reason.clone())),
        }
    }

    pub fn from_report(report: &ProofReport, identity: Option<&str>) -> Self {
        let (verdict, witness, reason) = Self::verdict_fields(&report.verdict);
        JsonReport {
            verdict,
            witness,
            reason,
            identity: identity.map(str::to_string),
            recurrence: None,
            recurrence_display: None,
            certificates: None,
            closed_form: None,
            price: PriceJson::from_price(&report.price, report.mode.label()),
            initial_values: report.initial_values.clone(),
            cleared_degree: report.cleared_degree,
            trials: report.trials,
            seed: report.seed,
            points: report.points.clone(),
            notes: report.notes.clone(),
        }
    }

    pub fn from_outcome(outcome: &ProveOutcome) -> Self {
        let mut base = Self::from_report(&outcome.report, Some(&outcome.identity));
        if let Some(rec) = &outcome.common_recurrence {
            base.recurrence = Some(rec.to_canonical_strings());
            base.recurrence_display = Some(rec.display("g", "n"));
        }
        if let Some(cert) = &outcome.lhs_certificate {
            base.certificates = Some(cert.rs.iter().map(|r| r.to_canonical_string()).collect());
        }
        if let Some(cf) = &outcome.closed_form {
            base.closed_form = Some(cf.display());
        }
        base
    }

    pub fn from_certificate(cert: &Certificate, outer: &str) -> Self {
        JsonReport {
            verdict: "Found".into(),
            witness: None,
            reason: None,
            identity: None,
            recurrence: Some(cert.recurrence.to_canonical_strings()),
            recurrence_display: Some(cert.recurrence.display("g", outer)),
            certificates: Some(cert.rs.iter().map(|r| r.to_canonical_string()).collect()),
            closed_form: None,
            price: PriceJson {
                mode: "discovery".into(),
                confidence_exponent: None,
                cost: Cost::new(),
            },
            initial_values: vec![],
            cleared_degree: 0,
            trials: 0,
            seed: 0,
            points: vec![],
            notes: vec![format!(
                "system: {} unknowns, {} equations, degree bound {}",
                cert.degree_meta.unknowns, cert.degree_meta.equations, cert.degree_meta.x_degree_bound
            )],
        }
    }
}
