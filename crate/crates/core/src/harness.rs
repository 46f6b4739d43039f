//! The reproducibility harness: every enumeration-versus-prediction check
//! the project certifies, run under a budget of tuple evaluations.

use std::time::{Duration, Instant};

use serde_json::{json, Value};

use crate::cells::verify_psi;
use crate::error::Result;
use crate::field::{field_of_order, FqContext};
use crate::motive::{assemble_hom_class, assemble_t_class, gm_class, hom_class_closed_form};
use crate::poly::{common_factor_degree, enumerate_monic, sylvester_rank, Poly};
use crate::space::{power, EnumConfig};
use crate::strata::{count_hom_weighted, count_poly1, verify_filtration, HomStackParams};

/// Budget large enough for every criterion.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// `(a, b, n, q)` for the brute-force Hom stack counts.
pub const HOM_CASES: [(usize, usize, usize, u64); 7] =
    [(1, 1, 1, 2), (1, 1, 1, 3), (1, 2, 1, 2), (1, 2, 1, 3), (2, 3, 1, 2), (4, 6, 1, 2), (4, 6, 1, 3)];

const PAIR_FIELDS: [u64; 4] = [2, 3, 4, 5];
const PSI_FIELDS: [u64; 2] = [2, 3];
const AXIOM_FIELDS: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    Failed,
    Skipped,
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub outcome: Outcome,
    pub detail: String,
    /// Projected tuple evaluations.
    pub cost: u64,
    pub elapsed: Duration,
}

impl CriterionResult {
    /// Deterministic record (no timings).
    pub fn to_json(&self) -> Value {
        json!({
            "record": "criterion",
            "id": self.id,
            "title": self.title,
            "outcome": format!("{:?}", self.outcome).to_lowercase(),
            "detail": self.detail,
            "cost": self.cost,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunStatus {
    /// Every criterion ran and passed.
    Complete,
    /// Some criteria were skipped for budget; the rest passed.
    Incomplete,
    /// At least one executed criterion failed.
    Failed,
    NothingRun,
}

#[derive(Clone, Debug)]
pub struct AcceptanceReport {
    pub results: Vec<CriterionResult>,
}

impl AcceptanceReport {
    pub fn status(&self) -> RunStatus {
        let ran = self.results.iter().filter(|r| r.outcome != Outcome::Skipped).count();
        if ran == 0 {
            RunStatus::NothingRun
        } else if self.results.iter().any(|r| r.outcome == Outcome::Failed) {
            RunStatus::Failed
        } else if ran < self.results.len() {
            RunStatus::Incomplete
        } else {
            RunStatus::Complete
        }
    }
}

struct Criterion {
    id: u8,
    title: &'static str,
    cost: fn() -> u64,
    run: fn(&EnumConfig) -> Result<(bool, String)>,
}

fn pair_degrees() -> impl Iterator<Item = (usize, usize)> {
    (0..=4).flat_map(|d1| (0..=4).map(move |d2| (d1, d2)))
}

/// `(q, degrees, k)` for the cell-wise bijection checks.
pub fn psi_instances() -> Vec<(u64, Vec<usize>, usize)> {
    let mut out = Vec::new();
    for q in PSI_FIELDS {
        for (d1, d2) in pair_degrees() {
            for k in 0..=2.min(d1.min(d2)) {
                out.push((q, vec![d1, d2], k));
            }
        }
        for d1 in 0..=6 {
            for d2 in 0..=6 - d1 {
                for d3 in 0..=6 - d1 - d2 {
                    for k in 0..=1.min(d1.min(d2).min(d3)) {
                        out.push((q, vec![d1, d2, d3], k));
                    }
                }
            }
        }
    }
    out
}

fn field(q: u64) -> FqContext {
    field_of_order(q).expect("harness fields are prime powers")
}

fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, title: "Poly1 pair counts match the closed form", cost: cost_pairs, run: run_poly1 },
        Criterion {
            id: 2,
            title: "Common-factor filtration identities",
            cost: || 3 * cost_pairs(),
            run: run_filtration,
        },
        Criterion { id: 3, title: "Cell-wise bijection of multiplication by g", cost: cost_psi, run: run_psi },
        Criterion { id: 4, title: "Signature shift law", cost: cost_psi, run: run_shift },
        Criterion { id: 5, title: "Hom stack weighted counts", cost: cost_hom, run: run_hom },
        Criterion { id: 6, title: "Symbolic assembly of the Hom class", cost: || 144, run: run_assembly },
        Criterion { id: 7, title: "Point-counting measure compatibility", cost: cost_hom, run: run_measure },
        Criterion {
            id: 8,
            title: "Field, division and gcd/Sylvester property suites",
            cost: cost_algebra,
            run: run_algebra,
        },
    ]
}

fn cost_pairs() -> u64 {
    PAIR_FIELDS.iter().map(|&q| pair_degrees().map(|(a, b)| power(q as u32, a + b) as u64).sum::<u64>()).sum()
}

fn cost_psi() -> u64 {
    psi_instances()
        .iter()
        .map(|(q, ds, k)| {
            let total: usize = ds.iter().sum();
            let domain = power(*q as u32, total - (ds.len() - 1) * k) as u64;
            domain * 4 + power(*q as u32, total) as u64
        })
        .sum()
}

fn cost_hom() -> u64 {
    HOM_CASES
        .iter()
        .map(|&(a, b, n, q)| 2 * HomStackParams::new(&field(q), a, b, n).unwrap().t_space_size() as u64)
        .sum()
}

fn cost_algebra() -> u64 {
    let axioms: u64 = AXIOM_FIELDS.iter().map(|q| q * q * q).sum();
    axioms + 2 * PSI_FIELDS.iter().map(|&q| (1..=3).map(|d| q.pow(d)).sum::<u64>().pow(2)).sum::<u64>()
}

fn run_poly1(cfg: &EnumConfig) -> Result<(bool, String)> {
    let mut checked = 0;
    for q in PAIR_FIELDS {
        let ctx = field(q);
        for (d1, d2) in pair_degrees() {
            let c = count_poly1(&ctx, &[d1, d2], cfg)?;
            if c.matches() != Some(true) {
                return Ok((
                    false,
                    format!("q={q} degrees=({d1},{d2}): count {} predicted {:?}", c.count, c.predicted),
                ));
            }
            checked += 1;
        }
    }
    Ok((true, format!("{checked} (q, d1, d2) cases")))
}

fn run_filtration(cfg: &EnumConfig) -> Result<(bool, String)> {
    let mut checked = 0;
    for q in PAIR_FIELDS {
        let ctx = field(q);
        for (d1, d2) in pair_degrees() {
            match verify_filtration(&ctx, &[d1, d2], cfg) {
                Ok(_) => checked += 1,
                Err(crate::Error::IdentityFailed(why)) => return Ok((false, format!("q={q}: {why}"))),
                Err(e) => return Err(e),
            }
        }
    }
    Ok((true, format!("{checked} filtrations")))
}

fn run_psi(cfg: &EnumConfig) -> Result<(bool, String)> {
    let mut cells = 0;
    for (q, ds, k) in psi_instances() {
        let report = verify_psi(&field(q), &ds, k, cfg)?;
        if !report.passed() {
            return Ok((false, format!("q={q} degrees={ds:?} k={k} failed")));
        }
        cells += report.cells.len();
    }
    Ok((true, format!("{} instances, {cells} cells certified", psi_instances().len())))
}

fn run_shift(cfg: &EnumConfig) -> Result<(bool, String)> {
    for (q, ds, k) in psi_instances() {
        let report = verify_psi(&field(q), &ds, k, cfg)?;
        if let Some(bad) = report.cells.iter().find(|c| !c.shift_ok) {
            return Ok((false, format!("q={q} degrees={ds:?} k={k} cell {}", bad.signature)));
        }
    }
    Ok((true, format!("{} instances", psi_instances().len())))
}

fn run_hom(cfg: &EnumConfig) -> Result<(bool, String)> {
    for (a, b, n, q) in HOM_CASES {
        let params = HomStackParams::new(&field(q), a, b, n)?.forced(true);
        let count = count_hom_weighted(&params, cfg)?;
        if !count.passed() {
            return Ok((false, format!("(a,b,n,q)=({a},{b},{n},{q}): weighted count {}", count.hom.count)));
        }
    }
    Ok((true, format!("{} parameter sets", HOM_CASES.len())))
}

fn run_assembly(_: &EnumConfig) -> Result<(bool, String)> {
    for a in 1..=6 {
        for b in 1..=6 {
            for n in 1..=4 {
                let t = assemble_t_class(a, b, n)?;
                let exact = t.div_exact(&gm_class()).is_some();
                let class = assemble_hom_class(a, b, n);
                let ok = exact && matches!(&class, Ok(c) if *c == hom_class_closed_form(a, b, n) && c.num_terms() == 2);
                if !ok {
                    return Ok((false, format!("(a,b,n)=({a},{b},{n})")));
                }
            }
        }
    }
    Ok((true, "144 (a, b, n) triples".into()))
}

fn run_measure(cfg: &EnumConfig) -> Result<(bool, String)> {
    for (a, b, n, q) in HOM_CASES {
        let params = HomStackParams::new(&field(q), a, b, n)?.forced(true);
        let count = count_hom_weighted(&params, cfg)?;
        let measured = assemble_hom_class(a, b, n)?.count_measure(q)?;
        if measured != count.hom.count {
            return Ok((
                false,
                format!("(a,b,n,q)=({a},{b},{n},{q}): #_q = {measured}, brute force {}", count.hom.count),
            ));
        }
    }
    Ok((true, format!("{} parameter sets", HOM_CASES.len())))
}

/// Ring axioms, inverses and Frobenius over the whole field.
pub fn check_field_axioms(ctx: &FqContext) -> std::result::Result<(), String> {
    let els: Vec<_> = ctx.elements().collect();
    let q = ctx.q() as u64;
    for &x in &els {
        if ctx.add(x, ctx.neg(x).unwrap()).unwrap() != ctx.zero() {
            return Err(format!("{x:?} + (-{x:?}) != 0"));
        }
        if !x.is_zero() && ctx.mul(x, ctx.inv(x).unwrap()).unwrap() != ctx.one() {
            return Err(format!("{x:?} * inv != 1"));
        }
        if ctx.pow(x, q).unwrap() != x {
            return Err(format!("{x:?}^q != {x:?}"));
        }
        for &y in &els {
            if ctx.add(x, y) != ctx.add(y, x) || ctx.mul(x, y) != ctx.mul(y, x) {
                return Err(format!("commutativity fails at {x:?}, {y:?}"));
            }
            for &z in &els {
                let (add, mul) = (|a, b| ctx.add(a, b).unwrap(), |a, b| ctx.mul(a, b).unwrap());
                if add(add(x, y), z) != add(x, add(y, z)) || mul(mul(x, y), z) != mul(x, mul(y, z)) {
                    return Err(format!("associativity fails at {x:?}, {y:?}, {z:?}"));
                }
                if mul(x, add(y, z)) != add(mul(x, y), mul(x, z)) {
                    return Err(format!("distributivity fails at {x:?}, {y:?}, {z:?}"));
                }
            }
        }
    }
    Ok(())
}

fn run_algebra(_: &EnumConfig) -> Result<(bool, String)> {
    for q in AXIOM_FIELDS {
        if let Err(why) = check_field_axioms(&field(q)) {
            return Ok((false, format!("F_{q}: {why}")));
        }
    }
    for q in PSI_FIELDS {
        let ctx = field(q);
        let polys: Vec<Poly> = (0..=3).flat_map(|d| enumerate_monic(&ctx, d)).collect();
        for u in &polys {
            for v in &polys {
                let scaled = u.scale(ctx.from_int(-1)).unwrap();
                let (quot, rem) = scaled.divrem(v)?;
                if &(&quot * v) + &rem != scaled || rem.degree() >= v.degree() {
                    return Ok((false, format!("divrem fails for {scaled} / {v} over F_{q}")));
                }
                let (du, dv) = (u.deg().unwrap(), v.deg().unwrap());
                if du >= 1 && dv >= 1 {
                    let gcd_deg = common_factor_degree(&[u.clone(), v.clone()])?;
                    if du + dv - sylvester_rank(u, v)? != gcd_deg {
                        return Ok((false, format!("rank/gcd disagree for ({u}, {v}) over F_{q}")));
                    }
                }
            }
        }
    }
    Ok((true, format!("axioms over {} fields; division and rank over F_2, F_3", AXIOM_FIELDS.len())))
}

/// Runs the criteria in order, skipping any whose projected cost exceeds the
/// remaining budget.
pub fn verify_all(budget: u64, cfg: &EnumConfig) -> AcceptanceReport {
    let mut remaining = budget;
    let mut results = Vec::new();
    for c in criteria() {
        let cost = (c.cost)();
        let start = Instant::now();
        let (outcome, detail) = if cost > remaining {
            (Outcome::Skipped, format!("needs {cost}, {remaining} left in budget"))
        } else {
            remaining -= cost;
            match (c.run)(cfg) {
                Ok((true, d)) => (Outcome::Passed, d),
                Ok((false, d)) => (Outcome::Failed, d),
                Err(e) => (Outcome::Failed, e.to_string()),
            }
        };
        results.push(CriterionResult { id: c.id, title: c.title, outcome, detail, cost, elapsed: start.elapsed() });
    }
    AcceptanceReport { results }
}
