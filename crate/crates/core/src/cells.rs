//! Euclidean-algorithm cell decomposition of coprime monic tuples.
//!
//! A run of the multi-polynomial Euclidean algorithm on `(f_1, ..., f_m)`
//! repeatedly picks a pivot of minimal degree (smallest index on ties) and
//! replaces every other nonzero entry by its remainder modulo the pivot,
//! rescaled to be monic. The table of intermediate degrees together with the
//! pivot sequence is the tuple's [`EuclidSignature`]; tuples sharing a
//! signature form one cell.
//!
//! Running a step backwards, each reduced entry is recovered as
//! `alpha * remainder + quotient * pivot`. The quotient is monic of degree
//! `deg f_i - deg pivot` and contributes an affine factor of that dimension;
//! `alpha` ranges over `G_m` exactly when the remainder is nonzero (it is
//! pinned to 1 otherwise). The terminal monic polynomial of degree `t`
//! contributes a further `A^t`. So every cell is `G_m^a x A^b` and has
//! `(q-1)^a q^b` points over `F_q`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{FqContext, FqElement};
use crate::motive::{gm_class, MotiveClass};
use crate::partition::map_reduce;
use crate::poly::{common_factor_degree, trim, Degree, Poly};
use crate::space::{power, EnumConfig, MonicTupleSpace};

/// One non-pivot reduction `f_i <- (f_i - quotient * pivot) / alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub index: usize,
    pub quotient: Poly,
    pub alpha: FqElement,
    pub remainder_is_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EuclidStep {
    /// Degrees of the entries entering this step.
    pub degrees: Vec<Degree>,
    pub pivot: usize,
    pub reductions: Vec<Reduction>,
}

impl EuclidStep {
    /// `(index, deg quotient)` for every reduced entry.
    pub fn quotient_degrees(&self) -> Vec<(usize, usize)> {
        self.reductions
            .iter()
            .map(|r| (r.index, r.quotient.deg().expect("quotient of a reduction is nonzero")))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EuclidTrace {
    pub steps: Vec<EuclidStep>,
    /// Degrees after the last step: exactly one entry is nonzero.
    pub terminal_degrees: Vec<Degree>,
    pub terminal_index: usize,
    /// Monic gcd of the input tuple.
    pub terminal_gcd: Poly,
}

impl EuclidTrace {
    pub fn signature(&self) -> EuclidSignature {
        let mut rows: Vec<Vec<Degree>> = self.steps.iter().map(|s| s.degrees.clone()).collect();
        rows.push(self.terminal_degrees.clone());
        EuclidSignature { rows, pivots: self.steps.iter().map(|s| s.pivot).collect() }
    }
}

fn degree_of(codes: &[u32]) -> Degree {
    match codes.len() {
        0 => Degree::NegInfinity,
        n => Degree::Finite(n - 1),
    }
}

/// `a <- a mod b`, optionally collecting the quotient. `b` is nonzero and trimmed.
fn divrem_codes(ctx: &FqContext, a: &mut Vec<u32>, b: &[u32], mut quot: Option<&mut Vec<u32>>) {
    let bl = b.len();
    let lead = *b.last().unwrap();
    let inv = if lead == 1 { 1 } else { ctx.inv_code(lead).unwrap() };
    if let Some(q) = quot.as_deref_mut() {
        q.clear();
        q.resize((a.len() + 1).saturating_sub(bl), 0);
    }
    while a.len() >= bl {
        let top = a.len() - 1;
        let c = a[top];
        if c != 0 {
            let factor = ctx.mul_code(c, inv);
            let shift = top + 1 - bl;
            if let Some(q) = quot.as_deref_mut() {
                q[shift] = factor;
            }
            for (j, &bc) in b.iter().enumerate() {
                a[shift + j] = ctx.sub_code(a[shift + j], ctx.mul_code(factor, bc));
            }
        }
        a.pop();
        trim(a);
    }
    if let Some(q) = quot {
        trim(q);
    }
}

/// Smallest index among the nonzero entries of minimal degree.
fn choose_pivot(state: &[Vec<u32>]) -> usize {
    state
        .iter()
        .enumerate()
        .filter(|(_, f)| !f.is_empty())
        .min_by_key(|(i, f)| (f.len(), *i))
        .map(|(i, _)| i)
        .expect("at least one nonzero entry")
}

/// Runs the algorithm in place on ascending codes. `on_reduction` sees
/// `(step, index, quotient, alpha, remainder_is_zero)`; the quotient slice is
/// empty unless `want_quotients` is set.
fn run_codes<F>(ctx: &FqContext, state: &mut [Vec<u32>], want_quotients: bool, mut on_reduction: F) -> EuclidSignature
where
    F: FnMut(usize, usize, &[u32], u32, bool),
{
    let mut rows = vec![state.iter().map(|f| degree_of(f)).collect::<Vec<_>>()];
    let mut pivots = Vec::new();
    let mut quot = Vec::new();
    loop {
        if state.iter().filter(|f| !f.is_empty()).count() <= 1 {
            break;
        }
        let c = choose_pivot(state);
        let pivot = std::mem::take(&mut state[c]);
        for (i, f) in state.iter_mut().enumerate() {
            if i == c || f.is_empty() {
                continue;
            }
            divrem_codes(ctx, f, &pivot, want_quotients.then_some(&mut quot));
            let (alpha, zero) = match f.last() {
                None => (1, true),
                Some(&lead) => {
                    if lead != 1 {
                        let inv = ctx.inv_code(lead).unwrap();
                        for x in f.iter_mut() {
                            *x = ctx.mul_code(*x, inv);
                        }
                    }
                    (lead, false)
                }
            };
            on_reduction(pivots.len(), i, &quot, alpha, zero);
        }
        state[c] = pivot;
        pivots.push(c);
        rows.push(state.iter().map(|f| degree_of(f)).collect());
    }
    EuclidSignature { rows, pivots }
}

fn check_tuple(fs: &[Poly]) -> Result<&FqContext> {
    let first = fs.first().ok_or(Error::EmptyTuple)?;
    let ctx = first.ctx();
    for f in fs {
        if f.ctx() != ctx {
            return Err(Error::FieldMismatch(ctx.q(), f.ctx().q()));
        }
    }
    if fs.iter().all(Poly::is_zero) {
        return Err(Error::AllZero);
    }
    Ok(ctx)
}

/// Full record of a Euclidean run, including quotients and scalars.
pub fn euclid_trace(fs: &[Poly]) -> Result<EuclidTrace> {
    let ctx = check_tuple(fs)?.clone();
    let mut state: Vec<Vec<u32>> = fs.iter().map(|f| f.codes().to_vec()).collect();
    let mut per_step: Vec<Vec<Reduction>> = Vec::new();
    let sig = run_codes(&ctx, &mut state, true, |step, index, quot, alpha, zero| {
        if per_step.len() <= step {
            per_step.resize_with(step + 1, Vec::new);
        }
        per_step[step].push(Reduction {
            index,
            quotient: Poly::from_codes(&ctx, quot.to_vec()),
            alpha: ctx.from_code(alpha).unwrap(),
            remainder_is_zero: zero,
        });
    });
    per_step.resize_with(sig.pivots.len(), Vec::new);
    let terminal_index = state.iter().position(|f| !f.is_empty()).unwrap();
    let terminal = Poly::from_codes(&ctx, state[terminal_index].clone());
    let steps = sig
        .pivots
        .iter()
        .zip(per_step)
        .enumerate()
        .map(|(j, (&pivot, reductions))| EuclidStep { degrees: sig.rows[j].clone(), pivot, reductions })
        .collect();
    Ok(EuclidTrace {
        steps,
        terminal_degrees: sig.rows.last().unwrap().clone(),
        terminal_index,
        terminal_gcd: terminal.monic().unwrap(),
    })
}

/// The degree table and pivot sequence of the Euclidean run on `fs`.
pub fn signature_of(fs: &[Poly]) -> Result<EuclidSignature> {
    let ctx = check_tuple(fs)?;
    let mut state: Vec<Vec<u32>> = fs.iter().map(|f| f.codes().to_vec()).collect();
    Ok(run_codes(ctx, &mut state, false, |_, _, _, _, _| {}))
}

/// Signature of a tuple given as raw codes; consumes the buffers.
pub(crate) fn signature_of_codes(ctx: &FqContext, state: &mut [Vec<u32>]) -> EuclidSignature {
    run_codes(ctx, state, false, |_, _, _, _, _| {})
}

/// Cell label: per-step degree rows (the last row is terminal) and the pivot
/// chosen at each non-terminal step.
///
/// Serialized as `[(2,1),(0,1),(0,-)]|[1,0]`, with `-` for the zero polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EuclidSignature {
    rows: Vec<Vec<Degree>>,
    pivots: Vec<usize>,
}

/// A cell `G_m^gm x A^affine`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellShape {
    pub gm: usize,
    pub affine: usize,
}

impl CellShape {
    pub fn dimension(&self) -> usize {
        self.gm + self.affine
    }

    /// `(q-1)^gm q^affine`.
    pub fn point_count(&self, q: u32) -> u128 {
        (q as u128 - 1).pow(self.gm as u32) * (q as u128).pow(self.affine as u32)
    }

    pub fn class(&self) -> MotiveClass {
        &gm_class().pow(self.gm as u32) * &MotiveClass::monomial(1, self.affine as i64)
    }
}

impl EuclidSignature {
    pub fn new(rows: Vec<Vec<Degree>>, pivots: Vec<usize>) -> Result<Self> {
        let sig = EuclidSignature { rows, pivots };
        sig.validate()?;
        Ok(sig)
    }

    pub fn rows(&self) -> &[Vec<Degree>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn arity(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn input_degrees(&self) -> &[Degree] {
        &self.rows[0]
    }

    /// Degree of the terminal entry, i.e. of the gcd.
    pub fn terminal_degree(&self) -> usize {
        self.rows.last().and_then(|r| r.iter().find_map(|d| d.finite())).expect("terminal row has a nonzero entry")
    }

    /// The signature of `(f_1 g, ..., f_m g)` for monic `g` of degree `k`:
    /// every nonzero degree raised by `k`.
    pub fn shifted(&self, k: usize) -> EuclidSignature {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|d| match d {
                        Degree::Finite(x) => Degree::Finite(x + k),
                        Degree::NegInfinity => Degree::NegInfinity,
                    })
                    .collect()
            })
            .collect();
        EuclidSignature { rows, pivots: self.pivots.clone() }
    }

    fn validate(&self) -> Result<()> {
        let bad = |why: String| Err(Error::BadSignature(format!("{self}: {why}")));
        let m = self.arity();
        if m == 0 || self.rows.len() != self.pivots.len() + 1 {
            return bad("row count must be pivot count + 1".into());
        }
        if self.rows.iter().any(|r| r.len() != m) {
            return bad("rows of unequal length".into());
        }
        for (j, &c) in self.pivots.iter().enumerate() {
            let (row, next) = (&self.rows[j], &self.rows[j + 1]);
            let nonzero: Vec<usize> = (0..m).filter(|&i| row[i] != Degree::NegInfinity).collect();
            if nonzero.len() < 2 {
                return bad(format!("step {j} has fewer than two nonzero entries"));
            }
            let expected = *nonzero.iter().min_by_key(|&&i| (row[i], i)).unwrap();
            if c != expected {
                return bad(format!("step {j} pivot {c}, expected {expected}"));
            }
            if next[c] != row[c] {
                return bad(format!("step {j} changed the pivot entry"));
            }
            for i in 0..m {
                if i == c {
                    continue;
                }
                if row[i] == Degree::NegInfinity && next[i] != Degree::NegInfinity {
                    return bad(format!("step {j} revived entry {i}"));
                }
                if row[i] != Degree::NegInfinity && next[i] >= row[c] {
                    return bad(format!("step {j} entry {i} not reduced below the pivot"));
                }
            }
        }
        let last = self.rows.last().unwrap();
        if last.iter().filter(|d| **d != Degree::NegInfinity).count() != 1 {
            return bad("terminal row must have exactly one nonzero entry".into());
        }
        Ok(())
    }

    fn shape_unchecked(&self) -> CellShape {
        let mut gm = 0;
        let mut affine = self.terminal_degree();
        for (j, &c) in self.pivots.iter().enumerate() {
            let (row, next) = (&self.rows[j], &self.rows[j + 1]);
            let pivot_deg = row[c].finite().unwrap();
            for i in 0..row.len() {
                if i == c {
                    continue;
                }
                if let Degree::Finite(d) = row[i] {
                    affine += d - pivot_deg;
                    if next[i] != Degree::NegInfinity {
                        gm += 1;
                    }
                }
            }
        }
        CellShape { gm, affine }
    }
}

impl fmt::Display for EuclidSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(Degree::to_string).collect();
                format!("({})", cells.join(","))
            })
            .collect();
        let pivots: Vec<String> = self.pivots.iter().map(usize::to_string).collect();
        write!(f, "[{}]|[{}]", rows.join(","), pivots.join(","))
    }
}

impl FromStr for EuclidSignature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::BadSignature(format!("{s}: {why}"));
        let (table, pivots) = s.split_once('|').ok_or_else(|| bad("missing |"))?;
        let table = table
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| bad("degree table must be bracketed"))?;
        let mut rows = Vec::new();
        for chunk in table.split(')') {
            let chunk = chunk.trim().trim_start_matches(',').trim();
            if chunk.is_empty() {
                continue;
            }
            let inner = chunk.strip_prefix('(').ok_or_else(|| bad("row must be parenthesized"))?;
            let row = inner
                .split(',')
                .map(|d| match d.trim() {
                    "-" => Ok(Degree::NegInfinity),
                    x => x.parse().map(Degree::Finite).map_err(|_| bad("bad degree")),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let pivots = pivots
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| bad("pivot list must be bracketed"))?;
        let pivots = pivots
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| p.trim().parse().map_err(|_| bad("bad pivot")))
            .collect::<Result<Vec<usize>>>()?;
        EuclidSignature::new(rows, pivots)
    }
}

/// Predicted shape of the cell labelled `sig`.
pub fn cell_shape(sig: &EuclidSignature) -> Result<CellShape> {
    sig.validate()?;
    Ok(sig.shape_unchecked())
}

/// `(f_1, ..., f_m, g) -> (f_1 g, ..., f_m g)` on coprime tuples and monic `g`.
pub fn psi_forward(fs: &[Poly], g: &Poly) -> Result<Vec<Poly>> {
    if !g.is_monic() {
        return Err(Error::NotMonic(g.to_string()));
    }
    let d = common_factor_degree(fs)?;
    if d != 0 {
        return Err(Error::NotCoprime(d));
    }
    fs.iter().map(|f| f.checked_mul(g)).collect()
}

/// Recovers `(fs, g)` from a tuple whose common factor has degree exactly `k`:
/// `g` is the terminal polynomial of the Euclidean run and `f_i = h_i / g`.
pub fn psi_inverse(hs: &[Poly], k: usize) -> Result<(Vec<Poly>, Poly)> {
    let trace = euclid_trace(hs)?;
    let g = trace.terminal_gcd;
    let found = g.deg().unwrap();
    if found != k {
        return Err(Error::WrongCommonDegree { expected: k, found });
    }
    let fs = hs
        .iter()
        .map(|h| {
            let (f, r) = h.divrem(&g)?;
            debug_assert!(r.is_zero());
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((fs, g))
}

/// Exhaustively enumerates every signature that a run on monic inputs of the
/// given degrees can produce with a terminal entry of degree `terminal_degree`.
pub fn enumerate_signatures(degrees: &[usize], terminal_degree: usize) -> Vec<EuclidSignature> {
    fn recurse(rows: &mut Vec<Vec<Degree>>, pivots: &mut Vec<usize>, terminal: usize, out: &mut Vec<EuclidSignature>) {
        let row = rows.last().unwrap().clone();
        let nonzero: Vec<usize> = (0..row.len()).filter(|&i| row[i] != Degree::NegInfinity).collect();
        if nonzero.len() == 1 {
            if row[nonzero[0]] == Degree::Finite(terminal) {
                out.push(EuclidSignature { rows: rows.clone(), pivots: pivots.clone() });
            }
            return;
        }
        let c = *nonzero.iter().min_by_key(|&&i| (row[i], i)).unwrap();
        let pivot_deg = row[c].finite().unwrap();
        let reduced: Vec<usize> = nonzero.into_iter().filter(|&i| i != c).collect();
        // options per reduced entry: zero, or any degree below the pivot
        let radix = pivot_deg + 1;
        let combos = radix.pow(reduced.len() as u32);
        for mut code in 0..combos {
            let mut next = row.clone();
            for &i in &reduced {
                let choice = code % radix;
                code /= radix;
                next[i] = if choice == 0 { Degree::NegInfinity } else { Degree::Finite(choice - 1) };
            }
            rows.push(next);
            pivots.push(c);
            recurse(rows, pivots, terminal, out);
            rows.pop();
            pivots.pop();
        }
    }
    let mut out = Vec::new();
    if degrees.is_empty() {
        return out;
    }
    let start = degrees.iter().map(|&d| Degree::Finite(d)).collect();
    recurse(&mut vec![start], &mut Vec::new(), terminal_degree, &mut out);
    out.sort();
    out
}

/// Sum of the classes `(L-1)^a L^b` of all coprime cells of the given degrees.
pub fn cell_class_sum(degrees: &[usize]) -> MotiveClass {
    enumerate_signatures(degrees, 0).iter().fold(MotiveClass::zero(), |acc, s| &acc + &s.shape_unchecked().class())
}

/// Observed and predicted size of one cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellRecord {
    pub shape: CellShape,
    pub observed: u64,
    pub predicted: u128,
}

impl CellRecord {
    pub fn matches(&self) -> bool {
        self.observed as u128 == self.predicted
    }
}

#[derive(Clone, Debug)]
pub struct CellDecomposition {
    pub q: u32,
    pub degrees: Vec<usize>,
    pub cells: BTreeMap<EuclidSignature, CellRecord>,
    /// Number of coprime tuples seen.
    pub coprime_total: u64,
    /// Number of tuples enumerated, coprime or not.
    pub tuple_total: u64,
}

impl CellDecomposition {
    /// Every cell has exactly `(q-1)^a q^b` points and the cells add up to the coprime locus.
    pub fn verified(&self) -> bool {
        self.cells.values().all(CellRecord::matches)
            && self.cells.values().map(|c| c.observed).sum::<u64>() == self.coprime_total
    }

    pub fn class_sum(&self) -> MotiveClass {
        self.cells.values().fold(MotiveClass::zero(), |acc, c| &acc + &c.shape.class())
    }
}

/// Signature counts over every monic tuple of the given degrees (any gcd degree).
pub fn signature_census(
    ctx: &FqContext,
    degrees: &[usize],
    cfg: &EnumConfig,
) -> Result<BTreeMap<EuclidSignature, u64>> {
    let space = MonicTupleSpace::new(ctx, degrees);
    let total = cfg.admit(space.size())?;
    if degrees.is_empty() {
        return Err(Error::EmptyTuple);
    }
    Ok(map_reduce(
        total,
        cfg.workers,
        |range| {
            let mut counts: BTreeMap<EuclidSignature, u64> = BTreeMap::new();
            let mut buf = Vec::new();
            for idx in range {
                space.decode_into(idx, &mut buf);
                *counts.entry(signature_of_codes(ctx, &mut buf)).or_default() += 1;
            }
            counts
        },
        merge_counts,
    ))
}

fn merge_counts<K: Ord>(mut a: BTreeMap<K, u64>, b: BTreeMap<K, u64>) -> BTreeMap<K, u64> {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

/// Assigns every coprime monic tuple of the given degrees to its cell and
/// compares each cell's size with its predicted shape.
pub fn decompose(ctx: &FqContext, degrees: &[usize], cfg: &EnumConfig) -> Result<CellDecomposition> {
    let census = signature_census(ctx, degrees, cfg)?;
    let tuple_total = census.values().sum();
    let mut cells = BTreeMap::new();
    let mut coprime_total = 0;
    for (sig, observed) in census {
        if sig.terminal_degree() != 0 {
            continue;
        }
        coprime_total += observed;
        let shape = sig.shape_unchecked();
        cells.insert(sig, CellRecord { shape, observed, predicted: shape.point_count(ctx.q()) });
    }
    Ok(CellDecomposition { q: ctx.q(), degrees: degrees.to_vec(), cells, coprime_total, tuple_total })
}

/// Bijection certificate for one domain cell `C` under `C x A^k -> C'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiCellCertificate {
    pub signature: EuclidSignature,
    pub shape: CellShape,
    /// `|C|` over `F_q`.
    pub cell_count: u64,
    pub predicted: u128,
    /// Distinct images of `C x {monic g of degree k}`.
    pub image_count: u64,
    /// Size of the target cell labelled by the shifted signature.
    pub target_cell_count: u64,
    pub injective: bool,
    /// Every image lands in the exactly-`k` stratum with the shifted signature.
    pub shift_ok: bool,
    /// `psi_inverse` recovers every input.
    pub inverse_ok: bool,
}

impl PsiCellCertificate {
    pub fn passed(&self) -> bool {
        self.cell_count as u128 == self.predicted
            && self.injective
            && self.shift_ok
            && self.inverse_ok
            && self.image_count == self.target_cell_count
    }
}

#[derive(Clone, Debug)]
pub struct PsiReport {
    pub q: u32,
    pub degrees: Vec<usize>,
    pub k: usize,
    pub cells: Vec<PsiCellCertificate>,
    /// Distinct images over all cells.
    pub image_count: u64,
    /// `|R_k \ R_{k+1}|` by direct enumeration of the target.
    pub stratum_count: u64,
    pub injective: bool,
}

impl PsiReport {
    pub fn passed(&self) -> bool {
        self.injective && self.image_count == self.stratum_count && self.cells.iter().all(PsiCellCertificate::passed)
    }
}

#[derive(Default)]
struct PsiPartial {
    per_cell: BTreeMap<EuclidSignature, PsiCellPartial>,
}

#[derive(Default)]
struct PsiCellPartial {
    points: u64,
    images: Vec<u64>,
    shift_failures: u64,
    inverse_failures: u64,
}

/// Checks, cell by cell, that multiplication by monic `g` of degree `k` is a
/// bijection from `C x A^k` onto the target cell, where `degrees` are the
/// degrees of the products.
pub fn verify_psi(ctx: &FqContext, degrees: &[usize], k: usize, cfg: &EnumConfig) -> Result<PsiReport> {
    let min = *degrees.iter().min().ok_or(Error::EmptyTuple)?;
    if k > min {
        return Err(Error::StratumOutOfRange { k, max: min });
    }
    let domain_degrees: Vec<usize> = degrees.iter().map(|d| d - k).collect();
    let domain = MonicTupleSpace::new(ctx, &domain_degrees);
    let target = MonicTupleSpace::new(ctx, degrees);
    let g_count = power(ctx.q(), k);
    let total = cfg.admit(domain.size().saturating_mul(g_count))?;
    let domain_size = domain.size() as u64;

    let census = signature_census(ctx, degrees, cfg)?;
    let stratum_count: u64 = census.iter().filter(|(s, _)| s.terminal_degree() == k).map(|(_, c)| c).sum();

    let partial = map_reduce(
        total,
        cfg.workers,
        |range| {
            let mut out = PsiPartial::default();
            let mut buf = Vec::new();
            for idx in range {
                let (f_idx, g_idx) = (idx % domain_size, idx / domain_size);
                domain.decode_into(f_idx, &mut buf);
                let sig_f = signature_of_codes(ctx, &mut buf);
                if sig_f.terminal_degree() != 0 {
                    continue;
                }
                let fs = domain.tuple(f_idx);
                let g = crate::poly::monic_at(ctx, k, g_idx);
                let hs = psi_forward(&fs, &g).expect("coprime input");
                let entry = out.per_cell.entry(sig_f.clone()).or_default();
                entry.points += 1;
                entry.images.push(target.index_of(&hs).expect("products have the target degrees"));
                if signature_of(&hs).ok() != Some(sig_f.shifted(k)) {
                    entry.shift_failures += 1;
                }
                match psi_inverse(&hs, k) {
                    Ok((back, g_back)) if back == fs && g_back == g => {}
                    _ => entry.inverse_failures += 1,
                }
            }
            out
        },
        |mut a, b| {
            for (sig, p) in b.per_cell {
                let e = a.per_cell.entry(sig).or_default();
                e.points += p.points;
                e.images.extend(p.images);
                e.shift_failures += p.shift_failures;
                e.inverse_failures += p.inverse_failures;
            }
            a
        },
    );

    let mut all_images: Vec<u64> = Vec::new();
    let mut cells = Vec::new();
    for (sig, mut p) in partial.per_cell {
        p.images.sort_unstable();
        let before = p.images.len();
        p.images.dedup();
        let shape = sig.shape_unchecked();
        let cell_count = p.points / g_count as u64;
        cells.push(PsiCellCertificate {
            shape,
            cell_count,
            predicted: shape.point_count(ctx.q()),
            image_count: p.images.len() as u64,
            target_cell_count: census.get(&sig.shifted(k)).copied().unwrap_or(0),
            injective: before == p.images.len(),
            shift_ok: p.shift_failures == 0,
            inverse_ok: p.inverse_failures == 0,
            signature: sig,
        });
        all_images.extend(p.images);
    }
    all_images.sort_unstable();
    let before = all_images.len();
    all_images.dedup();
    Ok(PsiReport {
        q: ctx.q(),
        degrees: degrees.to_vec(),
        k,
        cells,
        image_count: all_images.len() as u64,
        stratum_count,
        injective: before == all_images.len(),
    })
}

/// Groups tuples by signature; handy for small interactive checks.
pub fn group_by_signature(
    tuples: impl IntoIterator<Item = Vec<Poly>>,
) -> Result<HashMap<EuclidSignature, Vec<Vec<Poly>>>> {
    let mut out: HashMap<EuclidSignature, Vec<Vec<Poly>>> = HashMap::new();
    for t in tuples {
        out.entry(signature_of(&t)?).or_default().push(t);
    }
    Ok(out)
}
