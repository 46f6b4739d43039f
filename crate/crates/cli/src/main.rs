use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use polycell_core::harness::{verify_all, Outcome, RunStatus, DEFAULT_BUDGET};
use polycell_core::motive::{assemble_t_class, hom_class_closed_form};
use polycell_core::report::Report;
use polycell_core::space::DEFAULT_CAP;
use polycell_core::strata::{poly1_pair_closed_form, CSV_HEADER};
use polycell_core::{
    assemble_hom_class, count_hom_weighted, count_poly1, count_r_stratum, decompose, field_of_order, make_field,
    poly1_class, verify_filtration, verify_psi, EnumConfig, Error, FqContext, HomStackParams, MotiveClass,
};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_REFUSED: u8 = 3;

/// Exhaustive finite-field checks of Euclidean cell decompositions and Hom stack counts.
#[derive(Parser, Debug)]
#[command(name = "polycell", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    /// Field order (a prime power).
    #[arg(long, conflicts_with_all = ["p", "e"])]
    q: Option<u64>,
    /// Characteristic, with --e.
    #[arg(long)]
    p: Option<u64>,
    /// Extension degree over F_p.
    #[arg(long, requires = "p")]
    e: Option<u32>,
}

impl FieldArgs {
    fn context(&self) -> Result<FqContext, Error> {
        match (self.q, self.p) {
            (Some(q), _) => field_of_order(q),
            (None, Some(p)) => make_field(p, self.e.unwrap_or(1)),
            (None, None) => Err(Error::Parse("field".into(), "one of --q or --p is required".into())),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Largest number of tuples a single enumeration may visit.
    #[arg(long, env = "POLYCELL_CAP", default_value_t = DEFAULT_CAP)]
    cap: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
    /// Write the JSON-lines report here.
    #[arg(long)]
    jsonl: Option<PathBuf>,
    /// Write the stratum table as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Print JSON lines to stdout instead of the table.
    #[arg(long)]
    json: bool,
}

impl RunArgs {
    fn config(&self) -> EnumConfig {
        let mut cfg = EnumConfig { cap: self.cap, ..EnumConfig::default() };
        if let Some(w) = self.workers {
            cfg.workers = w.max(1);
        }
        cfg
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count coprime monic tuples of the given degrees.
    CountPoly {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Count every stratum of the common-factor filtration.
    CountStrata {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Sort coprime tuples into Euclidean cells and check each cell size.
    Decompose {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Certify multiplication by a monic degree-k polynomial cell by cell.
    VerifyPsi {
        #[command(flatten)]
        field: FieldArgs,
        /// Degrees of the products.
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Weighted point count of Hom_n(P1, P(a,b)) by brute force.
    CountHom {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        n: usize,
        /// Count even when the characteristic divides a or b.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Symbolic classes: Poly1 with --degrees d1,d2 or the Hom stack with --a/--b/--n.
    Motive {
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["a", "b", "n"])]
        degrees: Option<Vec<i64>>,
        #[arg(long, requires_all = ["b", "n"])]
        a: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Also evaluate the class at L = q.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Run every acceptance criterion that fits in the budget.
    VerifyAll {
        /// Tuple evaluations allowed across all criteria.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        run: RunArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<Error>() {
                Some(Error::CapExceeded { .. } | Error::Hypothesis { .. }) => EXIT_REFUSED,
                Some(Error::IdentityFailed(_)) => EXIT_MISMATCH,
                Some(_) => EXIT_USAGE,
                None => EXIT_USAGE,
            };
            ExitCode::from(code)
        }
    }
}

fn execute(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::CountPoly { field, degrees, run } => {
            let ctx = field.context()?;
            let mut report = Report::new("count-poly", &CSV_HEADER);
            report.push_stratum(&count_poly1(&ctx, &degrees, &run.config())?);
            emit(&report, &run)
        }
        Command::CountStrata { field, degrees, run } => {
            let ctx = field.context()?;
            let cfg = run.config();
            let filtration = verify_filtration(&ctx, &degrees, &cfg)?;
            let mut report = Report::new("count-strata", &CSV_HEADER);
            for k in 0..filtration.strata.len() {
                report.push_stratum(&count_r_stratum(&ctx, &degrees, k, &cfg)?);
            }
            report.push(
                json!({
                    "record": "filtration",
                    "q": filtration.q,
                    "degrees": filtration.degrees,
                    "strata": filtration.strata,
                    "total": filtration.total.to_string(),
                }),
                Some(true),
                vec!["total".into(), ctx.q().to_string(), String::new(), filtration.total.to_string()],
            );
            emit(&report, &run)
        }
        Command::Decompose { field, degrees, run } => {
            let ctx = field.context()?;
            let dec = decompose(&ctx, &degrees, &run.config())?;
            let mut report = Report::new("decompose", &["signature", "gm", "affine", "observed", "predicted", "match"]);
            for (sig, cell) in &dec.cells {
                report.push(
                    json!({
                        "record": "cell",
                        "q": dec.q,
                        "degrees": dec.degrees,
                        "signature": sig.to_string(),
                        "gm": cell.shape.gm,
                        "affine": cell.shape.affine,
                        "observed": cell.observed,
                        "predicted": cell.predicted.to_string(),
                        "match": cell.matches(),
                    }),
                    Some(cell.matches()),
                    vec![
                        sig.to_string(),
                        cell.shape.gm.to_string(),
                        cell.shape.affine.to_string(),
                        cell.observed.to_string(),
                        cell.predicted.to_string(),
                        cell.matches().to_string(),
                    ],
                );
            }
            let mut summary = json!({
                "record": "decomposition",
                "q": dec.q,
                "degrees": dec.degrees,
                "cells": dec.cells.len(),
                "coprime": dec.coprime_total,
                "tuples": dec.tuple_total,
                "class": dec.class_sum().to_string(),
            });
            let mut row = vec!["coprime total".into(), String::new(), String::new(), dec.coprime_total.to_string()];
            let mut passed = None;
            if let [d1, d2] = degrees[..] {
                let predicted = poly1_pair_closed_form(ctx.q(), d1, d2);
                summary["predicted"] = json!(predicted.to_string());
                row.push(predicted.to_string());
                passed = Some(predicted == dec.coprime_total as u128);
            }
            report.push(summary, passed, row);
            emit(&report, &run)
        }
        Command::VerifyPsi { field, degrees, k, run } => {
            let ctx = field.context()?;
            let psi = verify_psi(&ctx, &degrees, k, &run.config())?;
            let mut report = Report::new(
                "verify-psi",
                &["signature", "cell", "predicted", "images", "target", "injective", "shift", "inverse", "pass"],
            );
            for cert in &psi.cells {
                report.push(
                    json!({
                        "record": "certificate",
                        "q": psi.q,
                        "degrees": psi.degrees,
                        "k": psi.k,
                        "signature": cert.signature.to_string(),
                        "shifted": cert.signature.shifted(k).to_string(),
                        "gm": cert.shape.gm,
                        "affine": cert.shape.affine,
                        "cell_count": cert.cell_count,
                        "predicted": cert.predicted.to_string(),
                        "image_count": cert.image_count,
                        "target_cell_count": cert.target_cell_count,
                        "injective": cert.injective,
                        "shift_ok": cert.shift_ok,
                        "inverse_ok": cert.inverse_ok,
                        "passed": cert.passed(),
                    }),
                    Some(cert.passed()),
                    vec![
                        cert.signature.to_string(),
                        cert.cell_count.to_string(),
                        cert.predicted.to_string(),
                        cert.image_count.to_string(),
                        cert.target_cell_count.to_string(),
                        cert.injective.to_string(),
                        cert.shift_ok.to_string(),
                        cert.inverse_ok.to_string(),
                        cert.passed().to_string(),
                    ],
                );
            }
            let whole = psi.injective && psi.image_count == psi.stratum_count;
            report.push(
                json!({
                    "record": "stratum-image",
                    "q": psi.q,
                    "degrees": psi.degrees,
                    "k": psi.k,
                    "image_count": psi.image_count,
                    "stratum_count": psi.stratum_count,
                    "injective": psi.injective,
                    "passed": whole,
                }),
                Some(whole),
                vec![
                    format!("R_{k} stratum"),
                    String::new(),
                    String::new(),
                    psi.image_count.to_string(),
                    psi.stratum_count.to_string(),
                    psi.injective.to_string(),
                    String::new(),
                    String::new(),
                    whole.to_string(),
                ],
            );
            emit(&report, &run)
        }
        Command::CountHom { field, a, b, n, force, run } => {
            let ctx = field.context()?;
            let params = HomStackParams::new(&ctx, a, b, n)?.forced(force);
            if force && !params.hypothesis_holds() {
                eprintln!("warning: characteristic {} divides a weight; counts are reported without a claim", ctx.p());
            }
            let count = count_hom_weighted(&params, &run.config())?;
            let mut report = Report::new("count-hom", &CSV_HEADER);
            for s in &count.strata {
                report.push_stratum(s);
            }
            report.push_stratum(&count.t);
            report.push(
                json!({
                    "record": "invariants",
                    "divisible": count.divisible,
                    "strata_sum": count.strata_sum_ok,
                }),
                Some(count.divisible && count.strata_sum_ok),
                vec![
                    "|T| invariants".into(),
                    ctx.q().to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    (count.divisible && count.strata_sum_ok).to_string(),
                ],
            );
            report.push_stratum(&count.hom);
            emit(&report, &run)
        }
        Command::Motive { degrees, a, b, n, q, json } => motive(degrees, a.zip(b).zip(n), q, json),
        Command::VerifyAll { budget, run } => {
            let acceptance = verify_all(budget, &run.config());
            let mut report = Report::new("verify-all", &["criterion", "title", "outcome", "detail"]);
            for r in &acceptance.results {
                let passed = match r.outcome {
                    Outcome::Passed => Some(true),
                    Outcome::Failed => Some(false),
                    Outcome::Skipped => None,
                };
                report.push(
                    r.to_json(),
                    passed,
                    vec![r.id.to_string(), r.title.into(), format!("{:?}", r.outcome), r.detail.clone()],
                );
            }
            let status = match acceptance.status() {
                RunStatus::Complete => "complete",
                RunStatus::Incomplete => "incomplete",
                RunStatus::Failed => "failed",
                RunStatus::NothingRun => "nothing run",
            };
            report.push(
                json!({"record": "status", "status": status, "budget": budget}),
                None,
                vec!["status".into(), status.into()],
            );
            if !run.json {
                for r in &acceptance.results {
                    eprintln!("criterion {} took {:.2?}", r.id, r.elapsed);
                }
            }
            emit(&report, &run)
        }
    }
}

fn motive(
    degrees: Option<Vec<i64>>,
    hom: Option<((usize, usize), usize)>,
    q: Option<u64>,
    json: bool,
) -> anyhow::Result<u8> {
    let mut report = Report::new("motive", &["object", "class", "measure", "check"]);
    let mut add = |object: String, class: &MotiveClass, check: Option<bool>| -> anyhow::Result<()> {
        let measure = q.map(|q| class.count_measure(q)).transpose()?;
        report.push(
            json!({
                "record": "class",
                "object": object,
                "class": class.to_string(),
                "terms": class.to_json(),
                "q": q,
                "measure": measure.as_ref().map(ToString::to_string),
                "match": check,
            }),
            check,
            vec![
                object,
                class.to_string(),
                measure.map_or_else(String::new, |m| m.to_string()),
                check.map_or_else(String::new, |c| c.to_string()),
            ],
        );
        Ok(())
    };
    match (degrees, hom) {
        (Some(ds), None) => {
            let [d1, d2] = ds[..] else {
                anyhow::bail!(Error::Parse(format!("{ds:?}"), "expected two degrees".into()));
            };
            add(format!("Poly1^({d1},{d2})"), &poly1_class(d1, d2)?, None)?;
        }
        (None, Some(((a, b), n))) => {
            if a == 0 || b == 0 || n == 0 {
                anyhow::bail!(Error::BadWeights { a, b, n });
            }
            add("T".into(), &assemble_t_class(a, b, n)?, None)?;
            let assembled = assemble_hom_class(a, b, n);
            let ok = matches!(&assembled, Ok(c) if *c == hom_class_closed_form(a, b, n));
            add(
                format!("Hom_{n}(P1,P({a},{b}))"),
                &assembled.unwrap_or_else(|_| hom_class_closed_form(a, b, n)),
                Some(ok),
            )?;
        }
        _ => anyhow::bail!(Error::Parse("motive".into(), "give --degrees d1,d2 or all of --a, --b, --n".into())),
    }
    let run = RunArgs { cap: DEFAULT_CAP, workers: None, jsonl: None, csv: None, json };
    emit(&report, &run)
}

fn emit(report: &Report, run: &RunArgs) -> anyhow::Result<u8> {
    if let Some(path) = &run.jsonl {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut out = BufWriter::new(file);
        report.write_jsonl(&mut out)?;
        out.flush()?;
    }
    if let Some(path) = &run.csv {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        report.write_csv(BufWriter::new(file))?;
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if run.json {
        report.write_jsonl(&mut out)?;
    } else {
        out.write_all(report.render_table().as_bytes())?;
    }
    Ok(if report.ok() { 0 } else { EXIT_MISMATCH })
}
