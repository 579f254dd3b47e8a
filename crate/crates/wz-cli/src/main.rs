//! `wz` — prove terminating hypergeometric identities, verify certificates,
//! discover recurrences, and run the bundled q-series checks.
//!
//! Exit codes: 0 proved, 1 refuted, 2 inconclusive, 3 input error.

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use wz_core::certify::{self, Mode, ProofReport, Verdict};
use wz_core::expr::{parse, split_identity};
use wz_core::pricing::{PriceTag, Rigor};
use wz_core::recurrence::{build_sum_term, prove_identity, ProveMode, ProveOptions, RhsSpec};
use wz_core::telescope::find_recurrence;
use wz_core::Cost;

mod report;
use report::JsonReport;

#[derive(Parser)]
#[command(name = "wz", version, about = "Exact prover for terminating hypergeometric identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProveModeArg {
    Rigorous,
    Semi,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyModeArg {
    Rigorous,
    Prob,
}

#[derive(Subcommand)]
enum Command {
    /// Prove or refute `lhs = rhs`; `rhs` may be `product_form` to ask for a
    /// closed-form evaluation of the sum.
    Prove {
        identity: String,
        #[arg(long, default_value_t = 6)]
        max_order: usize,
        #[arg(long, value_enum, default_value_t = ProveModeArg::Rigorous)]
        mode: ProveModeArg,
        #[arg(long, default_value_t = 20)]
        trials: u32,
        /// Random seed (default: WZ_SEED environment variable, then 42).
        #[arg(long)]
        seed: Option<u64>,
        /// Write the discovered certificate to this file.
        #[arg(long)]
        emit_cert: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Verify a certificate file, exactly or probabilistically.
    Verify {
        cert_file: PathBuf,
        #[arg(long, value_enum, default_value_t = VerifyModeArg::Rigorous)]
        mode: VerifyModeArg,
        #[arg(long, default_value_t = 20)]
        trials: u32,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Find the minimal telescoped recurrence of a sum.
    Recurrence {
        sum_expr: String,
        #[arg(long, default_value_t = 6)]
        max_order: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run one of the bundled q-series checks.
    Qcheck {
        /// One of: 7, 8, rr, jacobi.
        #[arg(long)]
        identity: String,
        /// Check the finite identity at every n up to this bound.
        #[arg(long)]
        n: Option<usize>,
        /// Truncation order for the limit identities.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Run the bundled identity corpus end to end and print a verdict table.
    Corpus {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

fn default_seed(cli_seed: Option<u64>) -> u64 {
    cli_seed
        .or_else(|| std::env::var("WZ_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(42)
}

fn exit_for(verdict: &Verdict) -> ExitCode {
    match verdict {
        Verdict::Proved => ExitCode::from(0),
        Verdict::Refuted { .. } => ExitCode::from(1),
        Verdict::Inconclusive { .. } => ExitCode::from(2),
    }
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(3)
}

fn print_price(price: &PriceTag) {
    let rigor = match &price.rigor {
        Rigor::Proved => "proved (exact)".to_string(),
        Rigor::SemiRigorous(_) => format!(
            "semi-rigorous, error probability <= 2^-{}",
            price.rigor.confidence_exponent().unwrap_or(0)
        ),
        Rigor::Unpriced => "unpriced".to_string(),
    };
    println!("price:   {rigor}");
    println!("cost:    {} (wall {} ms)", price.cost, price.cost.wall_ms);
}

fn print_report(report: &ProofReport) {
    match &report.verdict {
        Verdict::Proved => println!("verdict: Proved"),
        Verdict::Refuted { witness } => println!("verdict: Refuted ({witness})"),
        Verdict::Inconclusive { reason } => println!("verdict: Inconclusive ({reason})"),
    }
    println!("mode:    {}", report.mode.label());
    for note in &report.notes {
        println!("note:    {note}");
    }
    if !report.initial_values.is_empty() {
        let vals: Vec<String> =
            report.initial_values.iter().map(|(n, v)| format!("g({n}) = {v}")).collect();
        println!("initial: {}", vals.join(", "));
    }
    if report.mode == Mode::Probabilistic {
        println!(
            "trials:  {} (seed {}, cleared degree <= {})",
            report.trials, report.seed, report.cleared_degree
        );
    }
    print_price(&report.price);
}

#[allow(clippy::too_many_arguments)]
fn run_prove(
    identity: &str,
    max_order: usize,
    mode: ProveModeArg,
    trials: u32,
    seed: u64,
    emit_cert: Option<&PathBuf>,
    json: bool,
) -> ExitCode {
    let (lhs_text, rhs_text) = match split_identity(identity) {
        Ok(p) => p,
        Err(e) => return input_error(e),
    };
    let lhs = match parse(lhs_text) {
        Ok(e) => e,
        Err(e) => return input_error(e),
    };
    let rhs = if rhs_text.trim() == "product_form" {
        RhsSpec::ProductForm
    } else {
        match parse(rhs_text) {
            Ok(e) => RhsSpec::Expr(e),
            Err(e) => return input_error(e),
        }
    };
    let opts = ProveOptions {
        max_order,
        mode: match mode {
            ProveModeArg::Rigorous => ProveMode::Rigorous,
            ProveModeArg::Semi => ProveMode::Semi,
        },
        trials,
        seed,
    };
    let outcome = match prove_identity(&lhs, &rhs, &opts) {
        Ok(o) => o,
        Err(e) => return input_error(e),
    };

    if let Some(path) = emit_cert {
        match &outcome.lhs_certificate {
            None => return input_error("nothing to emit: no certificate was discovered"),
            Some(cert) => {
                let file = certify::to_file(
                    cert,
                    outcome.identity.clone(),
                    &outcome.initial_values,
                    &outcome.report,
                );
                match serde_json::to_string_pretty(&file) {
                    Ok(body) => {
                        if let Err(e) = std::fs::write(path, body + "\n") {
                            return input_error(format!("writing {}: {e}", path.display()));
                        }
                    }
                    Err(e) => return input_error(e),
                }
            }
        }
    }

    if json {
        println!("{}", JsonReport::from_outcome(&outcome).render());
    } else {
        println!("identity: {}", outcome.identity);
        if let Some(rec) = &outcome.common_recurrence {
            println!("recurrence: {}", rec.display("g", "n"));
        }
        if let Some(cert) = &outcome.lhs_certificate {
            for (i, r) in cert.rs.iter().enumerate() {
                println!("certificate R{}: {}", i + 1, r.to_canonical_string());
            }
        }
        if let Some(cf) = &outcome.closed_form {
            println!("closed form: {}", cf.display());
        }
        print_report(&outcome.report);
    }
    exit_for(&outcome.report.verdict)
}

fn run_verify(path: &PathBuf, mode: VerifyModeArg, trials: u32, seed: u64, json: bool) -> ExitCode {
    let body = match std::fs::read_to_string(path) {
        Ok(b) => b,
        Err(e) => return input_error(format!("reading {}: {e}", path.display())),
    };
    let file: certify::CertificateFile = match serde_json::from_str(&body) {
        Ok(f) => f,
        Err(e) => return input_error(format!("malformed certificate file: {e}")),
    };
    let cert = match certify::from_file(&file) {
        Ok(c) => c,
        Err(e) => return input_error(e),
    };
    let report = match mode {
        VerifyModeArg::Rigorous => certify::verify_rigorous(&cert),
        VerifyModeArg::Prob => certify::verify_probabilistic(&cert, trials, seed),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => return input_error(e),
    };
    if json {
        println!("{}", JsonReport::from_report(&report, Some(&file.identity)).render());
    } else {
        println!("identity: {}", file.identity);
        print_report(&report);
    }
    exit_for(&report.verdict)
}

fn run_recurrence(sum_expr: &str, max_order: usize, json: bool) -> ExitCode {
    let e = match parse(sum_expr) {
        Ok(e) => e,
        Err(e) => return input_error(e),
    };
    let (term, outer) = match build_sum_term(&e) {
        Ok(t) => t,
        Err(e) => return input_error(e),
    };
    let mut cost = Cost::new();
    match find_recurrence(&term, max_order, &mut cost) {
        Ok(cert) => {
            if json {
                println!("{}", JsonReport::from_certificate(&cert, &outer).render());
            } else {
                println!("order: {}", cert.recurrence.order());
                println!("coefficients: [{}]", cert.recurrence.to_canonical_strings().join(", "));
                println!("recurrence: {}", cert.recurrence.display("g", &outer));
                for (i, r) in cert.rs.iter().enumerate() {
                    println!("certificate R{}: {}", i + 1, r.to_canonical_string());
                }
                println!(
                    "system: {} unknowns, {} equations, certificate degree bound {}",
                    cert.degree_meta.unknowns,
                    cert.degree_meta.equations,
                    cert.degree_meta.x_degree_bound
                );
            }
            ExitCode::from(0)
        }
        Err(wz_core::telescope::TelescopeError::OrderBoundExceeded { l_max }) => {
            println!("inconclusive: no recurrence with a telescoping certificate up to order {l_max}");
            ExitCode::from(2)
        }
        Err(e) => input_error(e),
    }
}

fn run_qcheck(identity: &str, n: Option<usize>, order: Option<usize>, json: bool) -> ExitCode {
    let (label, pass): (String, bool) = match identity {
        "7" => {
            let n = n.unwrap_or(8);
            (
                format!("finite Rogers-Ramanujan (n <= {n})"),
                (0..=n).all(wz_core::qseries::check_identity7),
            )
        }
        "8" => {
            let n = n.unwrap_or(4);
            (
                format!("finite four-square (n <= {n})"),
                (0..=n).all(wz_core::qseries::check_identity8),
            )
        }
        "rr" => {
            let t = order.unwrap_or(30);
            (format!("Rogers-Ramanujan limit (order {t})"), wz_core::qseries::check_rr_limit(t))
        }
        "jacobi" => {
            let t = order.unwrap_or(30);
            (format!("four-square limit (order {t})"), wz_core::qseries::check_jacobi_limit(t))
        }
        other => return input_error(format!("unknown identity `{other}` (use 7, 8, rr, jacobi)")),
    };
    if json {
        println!(
            "{}",
            serde_json::json!({ "check": label, "verdict": if pass { "Proved" } else { "Refuted" } })
        );
    } else {
        println!("{label}: {}", if pass { "holds (exact)" } else { "FAILS" });
    }
    ExitCode::from(if pass { 0 } else { 1 })
}

struct CorpusRow {
    name: &'static str,
    verdict: String,
    confidence: String,
    cost: String,
    note: String,
}

fn run_corpus(seed: u64, json: bool) -> ExitCode {
    let opts = ProveOptions { max_order: 6, mode: ProveMode::Rigorous, trials: 20, seed };
    let mut rows: Vec<CorpusRow> = Vec::new();
    let mut all_ok = true;

    let mut prove_row = |rows: &mut Vec<CorpusRow>, name: &'static str, identity: &str, note: &str| {
        let (l, r) = split_identity(identity).expect("corpus identity");
        let lhs = parse(l).expect("corpus lhs");
        let rhs = RhsSpec::Expr(parse(r).expect("corpus rhs"));
        match prove_identity(&lhs, &rhs, &opts) {
            Ok(out) => {
                let ok = out.report.verdict.is_proved();
                rows.push(CorpusRow {
                    name,
                    verdict: out.report.verdict.label().to_string(),
                    confidence: confidence_string(&out.report.price),
                    cost: out.report.price.cost.to_string(),
                    note: note.to_string(),
                });
                ok
            }
            Err(e) => {
                rows.push(CorpusRow {
                    name,
                    verdict: format!("error: {e}"),
                    confidence: String::new(),
                    cost: String::new(),
                    note: note.to_string(),
                });
                false
            }
        }
    };

    all_ok &= prove_row(
        &mut rows,
        "binomial theorem (symbolic a, b)",
        "sum(k, 0, n, binomial(n, k)*a^k*b^(n-k)) = (a+b)^n",
        "",
    );
    all_ok &= prove_row(
        &mut rows,
        "alternating cube sum",
        "sum(k, -n, n, (-1)^k*binomial(2*n, n+k)^3) = factorial(3*n)/factorial(n)^3",
        "binomial(3*n, n) is commonly printed as the right side but differs at n = 1 (6 vs 3)",
    );

    let mut qrow = |rows: &mut Vec<CorpusRow>, name: &'static str, pass: bool, detail: &str| {
        rows.push(CorpusRow {
            name,
            verdict: if pass { "Proved".into() } else { "Refuted".into() },
            confidence: "exact".into(),
            cost: detail.to_string(),
            note: String::new(),
        });
        pass
    };
    all_ok &= qrow(
        &mut rows,
        "finite Rogers-Ramanujan (q), n <= 8",
        (0..=8).all(wz_core::qseries::check_identity7),
        "rational-function comparison per n",
    );
    all_ok &= qrow(
        &mut rows,
        "finite four-square (q), n <= 4",
        (0..=4).all(wz_core::qseries::check_identity8),
        "rational-function comparison per n",
    );
    all_ok &= qrow(
        &mut rows,
        "Rogers-Ramanujan limit, order 30",
        wz_core::qseries::check_rr_limit(30),
        "series vs product vs partition oracle",
    );
    all_ok &= qrow(
        &mut rows,
        "four-square limit, order 30",
        wz_core::qseries::check_jacobi_limit(30),
        "series vs divisor oracle",
    );

    if json {
        let arr: Vec<serde_json::Value> = rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "name": r.name,
                    "verdict": r.verdict,
                    "confidence": r.confidence,
                    "cost": r.cost,
                    "note": r.note,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({ "seed": seed, "rows": arr })).unwrap()
        );
    } else {
        println!("{:<38} {:<10} {:<14} cost", "identity", "verdict", "confidence");
        for r in &rows {
            println!("{:<38} {:<10} {:<14} {}", r.name, r.verdict, r.confidence, r.cost);
            if !r.note.is_empty() {
                println!("    note: {}", r.note);
            }
        }
    }
    ExitCode::from(if all_ok { 0 } else { 1 })
}

fn confidence_string(price: &PriceTag) -> String {
    match &price.rigor {
        Rigor::Proved => "exact".to_string(),
        Rigor::SemiRigorous(_) => format!("2^-{}", price.rigor.confidence_exponent().unwrap_or(0)),
        Rigor::Unpriced => "unpriced".to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Prove { identity, max_order, mode, trials, seed, emit_cert, json } => {
            let seed = default_seed(seed);
            run_prove(&identity, max_order, mode, trials, seed, emit_cert.as_ref(), json)
        }
        Command::Verify { cert_file, mode, trials, seed, json } => {
            let seed = default_seed(seed);
            run_verify(&cert_file, mode, trials, seed, json)
        }
        Command::Recurrence { sum_expr, max_order, json } => {
            run_recurrence(&sum_expr, max_order, json)
        }
        Command::Qcheck { identity, n, order, json } => run_qcheck(&identity, n, order, json),
        Command::Corpus { seed, json } => {
            let seed = default_seed(seed);
            run_corpus(seed, json)
        }
    }
}
