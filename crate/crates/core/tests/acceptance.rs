//! Acceptance criteria 1 to 8, each recomputed here from the public API with
//! its own brute-force enumeration and its own closed forms. Prints one
//! PASS/FAIL line per criterion and exits nonzero if any fails.

use std::collections::{BTreeMap, HashSet};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use polycell_core::motive::{assemble_t_class, gm_class};
use polycell_core::{
    assemble_hom_class, common_factor_degree, enumerate_monic, field_of_order, gcd_monic, psi_forward, psi_inverse,
    signature_of, sylvester_rank, Degree, EuclidSignature, FqContext, MotiveClass, Poly,
};

type Outcome = Result<String, String>;

/// Per-cell point count and the set of image tuples (as coefficient codes).
type CellImages = BTreeMap<EuclidSignature, (u64, HashSet<Vec<Vec<u32>>>)>;

fn field(q: u64) -> FqContext {
    field_of_order(q).unwrap()
}

fn pow(q: u64, e: usize) -> u64 {
    q.pow(e as u32)
}

fn poly1_pair(q: u64, d1: usize, d2: usize) -> u64 {
    if d1 > 0 && d2 > 0 {
        pow(q, d1 + d2) - pow(q, d1 + d2 - 1)
    } else {
        pow(q, d1 + d2)
    }
}

/// Gcd-degree histograms of all monic pairs, keyed by `(q, d1, d2)`.
fn pair_histograms() -> BTreeMap<(u64, usize, usize), Vec<u64>> {
    let mut out = BTreeMap::new();
    for q in [2, 3, 4, 5] {
        let ctx = field(q);
        let monics: Vec<Vec<Poly>> = (0..=4).map(|d| enumerate_monic(&ctx, d).collect()).collect();
        for d1 in 0..=4 {
            for d2 in 0..=4 {
                let mut hist = vec![0u64; d1.min(d2) + 1];
                for f in &monics[d1] {
                    for g in &monics[d2] {
                        hist[gcd_monic(f, g).unwrap().deg().unwrap()] += 1;
                    }
                }
                out.insert((q, d1, d2), hist);
            }
        }
    }
    out
}

fn criterion_1(hists: &BTreeMap<(u64, usize, usize), Vec<u64>>) -> Outcome {
    for (&(q, d1, d2), hist) in hists {
        if hist[0] != poly1_pair(q, d1, d2) {
            return Err(format!("q={q} ({d1},{d2}): observed {} expected {}", hist[0], poly1_pair(q, d1, d2)));
        }
    }
    Ok(format!("{} (q, d1, d2) cases", hists.len()))
}

fn criterion_2(hists: &BTreeMap<(u64, usize, usize), Vec<u64>>) -> Outcome {
    for (&(q, d1, d2), hist) in hists {
        if hist.iter().sum::<u64>() != pow(q, d1 + d2) {
            return Err(format!("q={q} ({d1},{d2}): strata do not sum to q^(d1+d2)"));
        }
        for (k, &c) in hist.iter().enumerate() {
            let base = hists[&(q, d1 - k, d2 - k)][0];
            if c != pow(q, k) * base {
                return Err(format!("q={q} ({d1},{d2}) k={k}: {c} != q^k * {base}"));
            }
        }
    }
    Ok(format!("{} filtrations", hists.len()))
}

/// Cell shape read straight off the signature rows: a reduction of entry `i`
/// at step `j` contributes a torus factor when entry `i` is nonzero in row
/// `j + 1`, and `deg f_i - deg pivot` affine coordinates in every case.
fn shape_from_rows(sig: &EuclidSignature) -> (usize, usize) {
    let rows = sig.rows();
    let (mut gm, mut affine) = (0, 0);
    for (j, pivot) in sig.pivots().iter().enumerate() {
        let pdeg = rows[j][*pivot].finite().unwrap();
        for (i, d) in rows[j].iter().enumerate() {
            if i == *pivot || *d == Degree::NegInfinity {
                continue;
            }
            affine += d.finite().unwrap() - pdeg;
            if rows[j + 1][i] != Degree::NegInfinity {
                gm += 1;
            }
        }
    }
    let terminal = rows.last().unwrap().iter().filter_map(|d| d.finite()).next().unwrap();
    (gm, affine + terminal)
}

fn tuples(ctx: &FqContext, degrees: &[usize]) -> Vec<Vec<Poly>> {
    let mut out = vec![vec![]];
    for &d in degrees {
        let monics: Vec<Poly> = enumerate_monic(ctx, d).collect();
        out = out
            .into_iter()
            .flat_map(|t| {
                monics.iter().map(move |f| {
                    let mut t = t.clone();
                    t.push(f.clone());
                    t
                })
            })
            .collect();
    }
    out
}

fn psi_instances() -> Vec<(u64, Vec<usize>, usize)> {
    let mut out = Vec::new();
    for q in [2, 3] {
        for d1 in 0..=4 {
            for d2 in 0..=4 {
                for k in 0..=d1.min(d2).min(2) {
                    out.push((q, vec![d1, d2], k));
                }
            }
        }
        for d1 in 0..=6usize {
            for d2 in 0..=6 - d1 {
                for d3 in 0..=6 - d1 - d2 {
                    for k in 0..=d1.min(d2).min(d3).min(1) {
                        out.push((q, vec![d1, d2, d3], k));
                    }
                }
            }
        }
    }
    out
}

struct PsiTally {
    cells: usize,
    shift_failures: Vec<String>,
}

fn codes(t: &[Poly]) -> Vec<Vec<u32>> {
    t.iter().map(|f| f.codes().to_vec()).collect()
}

/// Criteria 3 and 4 share the enumeration.
fn psi_criteria() -> (Outcome, Outcome) {
    let mut tally = PsiTally { cells: 0, shift_failures: Vec::new() };
    let instances = psi_instances();
    for (q, degrees, k) in &instances {
        let ctx = field(*q);
        let domain: Vec<usize> = degrees.iter().map(|d| d - k).collect();
        let gs: Vec<Poly> = enumerate_monic(&ctx, *k).collect();

        let mut target_cells: BTreeMap<EuclidSignature, u64> = BTreeMap::new();
        for t in tuples(&ctx, degrees) {
            if common_factor_degree(&t).unwrap() == *k {
                *target_cells.entry(signature_of(&t).unwrap()).or_default() += 1;
            }
        }
        let stratum: u64 = target_cells.values().sum();

        let mut cells = CellImages::new();
        let mut all_images = HashSet::new();
        for fs in tuples(&ctx, &domain) {
            if common_factor_degree(&fs).unwrap() != 0 {
                continue;
            }
            let sig = signature_of(&fs).unwrap();
            for g in &gs {
                let hs = psi_forward(&fs, g).unwrap();
                let (back, g_back) = psi_inverse(&hs, *k).unwrap();
                if back != fs || &g_back != g {
                    return (Err(format!("q={q} {degrees:?} k={k}: inverse fails at {fs:?}")), Err("not run".into()));
                }
                let shifted = signature_of(&hs).unwrap();
                if shifted != sig.shifted(*k) && tally.shift_failures.len() < 3 {
                    tally.shift_failures.push(format!("q={q} {degrees:?} k={k}: {sig} -> {shifted}"));
                }
                let entry = cells.entry(sig.clone()).or_default();
                if !entry.1.insert(codes(&hs)) {
                    return (
                        Err(format!("q={q} {degrees:?} k={k}: not injective on cell {sig}")),
                        Err("not run".into()),
                    );
                }
                all_images.insert(codes(&hs));
            }
            cells.entry(sig).or_default().0 += 1;
        }
        for (sig, (count, images)) in &cells {
            let (a, b) = shape_from_rows(sig);
            let predicted = pow(q - 1, a) * pow(*q, b);
            if *count != predicted {
                return (
                    Err(format!("q={q} {degrees:?}: cell {sig} has {count}, predicted {predicted}")),
                    Err("not run".into()),
                );
            }
            if images.len() as u64 != target_cells.get(&sig.shifted(*k)).copied().unwrap_or(0) {
                return (
                    Err(format!("q={q} {degrees:?} k={k}: image of {sig} is not the whole target cell")),
                    Err("not run".into()),
                );
            }
        }
        if all_images.len() as u64 != stratum {
            return (
                Err(format!("q={q} {degrees:?} k={k}: {} images, stratum has {stratum}", all_images.len())),
                Err("not run".into()),
            );
        }
        tally.cells += cells.len();
    }
    let c3 = Ok(format!("{} instances, {} cells", instances.len(), tally.cells));
    let c4 = if tally.shift_failures.is_empty() {
        Ok(format!("{} instances", instances.len()))
    } else {
        Err(tally.shift_failures.join("; "))
    };
    (c3, c4)
}

const HOM_CASES: [(usize, usize, usize, u64); 7] =
    [(1, 1, 1, 2), (1, 1, 1, 3), (1, 2, 1, 2), (1, 2, 1, 3), (2, 3, 1, 2), (4, 6, 1, 2), (4, 6, 1, 3)];

/// Nonzero polynomials of degree at most `d`, grouped by exact degree.
fn bounded(ctx: &FqContext, d: usize) -> Vec<Vec<Poly>> {
    let units: Vec<_> = ctx.elements().filter(|x| !x.is_zero()).collect();
    (0..=d)
        .map(|e| {
            enumerate_monic(ctx, e)
                .flat_map(|f| units.iter().map(move |c| f.scale(*c).unwrap()).collect::<Vec<_>>())
                .collect()
        })
        .collect()
}

/// `|T| / (q-1)` by brute force, after checking the stratum counts.
fn hom_weighted(a: usize, b: usize, n: usize, q: u64) -> Result<u64, String> {
    let ctx = field(q);
    let (an, bn) = (a * n, b * n);
    let (us, vs) = (bounded(&ctx, an), bounded(&ctx, bn));
    let mut t = 0u64;
    let mut strata_sum = 0u64;
    for (k, u_k) in us.iter().enumerate() {
        for (l, v_l) in vs.iter().enumerate() {
            let legal = k == an || l == bn;
            let mut coprime = 0u64;
            for u in u_k {
                for v in v_l {
                    if gcd_monic(u, v).unwrap().deg() == Some(0) {
                        coprime += 1;
                    }
                }
            }
            if legal {
                if coprime != (q - 1) * (q - 1) * poly1_pair(q, k, l) {
                    return Err(format!("T_{{{k},{l}}} has {coprime} points"));
                }
                t += coprime;
                strata_sum += coprime;
            }
        }
    }
    if !t.is_multiple_of(q - 1) || t != strata_sum {
        return Err(format!("|T| = {t} fails divisibility or the strata sum"));
    }
    Ok(t / (q - 1))
}

fn criterion_5(counts: &[Result<u64, String>]) -> Outcome {
    for (&(a, b, n, q), c) in HOM_CASES.iter().zip(counts) {
        let top = (a + b) * n;
        let expected = pow(q, top + 1) - pow(q, top - 1);
        match c {
            Ok(c) if *c == expected => {}
            Ok(c) => return Err(format!("({a},{b},{n},{q}): {c} != {expected}")),
            Err(e) => return Err(format!("({a},{b},{n},{q}): {e}")),
        }
    }
    Ok(format!("{} parameter sets", HOM_CASES.len()))
}

fn criterion_6() -> Outcome {
    let l_minus_1 = MotiveClass::from_terms([(1, 1), (0, -1)]);
    let torus = &l_minus_1 * &l_minus_1;
    for a in 1..=6usize {
        for b in 1..=6usize {
            for n in 1..=4usize {
                let (an, bn) = ((a * n) as i64, (b * n) as i64);
                let poly1 = |k: i64, l: i64| {
                    if k > 0 && l > 0 {
                        MotiveClass::from_terms([(k + l, 1), (k + l - 1, -1)])
                    } else {
                        MotiveClass::monomial(1, k + l)
                    }
                };
                let mut t = &torus * &poly1(an, bn);
                for k in 0..an {
                    t = &t + &(&torus * &poly1(k, bn));
                }
                for l in 0..bn {
                    t = &t + &(&torus * &poly1(an, l));
                }
                if assemble_t_class(a, b, n).as_ref() != Ok(&t) {
                    return Err(format!("[T] differs at ({a},{b},{n})"));
                }
                let Some(quotient) = t.div_exact(&gm_class()) else {
                    return Err(format!("[T] not divisible by L-1 at ({a},{b},{n})"));
                };
                let top = an + bn;
                let expected = MotiveClass::from_terms([(top + 1, 1), (top - 1, -1)]);
                if quotient != expected || assemble_hom_class(a, b, n).as_ref() != Ok(&expected) {
                    return Err(format!("({a},{b},{n}): {quotient} != {expected}"));
                }
            }
        }
    }
    Ok("144 (a, b, n) triples".into())
}

fn criterion_7(counts: &[Result<u64, String>]) -> Outcome {
    for (&(a, b, n, q), c) in HOM_CASES.iter().zip(counts) {
        let class = assemble_hom_class(a, b, n).map_err(|e| e.to_string())?;
        let measured = class.count_measure(q).map_err(|e| e.to_string())?;
        let brute = c.as_ref().map_err(Clone::clone)?;
        if measured != BigRational::from_integer(BigInt::from(*brute)) {
            return Err(format!("({a},{b},{n},{q}): #_q = {measured}, brute force {brute}"));
        }
    }
    Ok(format!("{} parameter sets", HOM_CASES.len()))
}

fn criterion_8() -> Outcome {
    for q in [2, 3, 4, 5, 7, 8, 9] {
        let ctx = field(q);
        let els: Vec<_> = ctx.elements().collect();
        let add = |x, y| ctx.add(x, y).unwrap();
        let mul = |x, y| ctx.mul(x, y).unwrap();
        for &x in &els {
            if add(x, ctx.zero()) != x || mul(x, ctx.one()) != x {
                return Err(format!("F_{q}: identities fail"));
            }
            if add(x, ctx.neg(x).unwrap()) != ctx.zero() {
                return Err(format!("F_{q}: additive inverse fails"));
            }
            if !x.is_zero() && mul(x, ctx.inv(x).unwrap()) != ctx.one() {
                return Err(format!("F_{q}: multiplicative inverse fails"));
            }
            for &y in &els {
                if add(x, y) != add(y, x) || mul(x, y) != mul(y, x) {
                    return Err(format!("F_{q}: commutativity fails"));
                }
                for &z in &els {
                    if add(add(x, y), z) != add(x, add(y, z))
                        || mul(mul(x, y), z) != mul(x, mul(y, z))
                        || mul(x, add(y, z)) != add(mul(x, y), mul(x, z))
                    {
                        return Err(format!("F_{q}: ring law fails"));
                    }
                }
            }
        }
    }
    for q in [2, 3] {
        let ctx = field(q);
        let units: Vec<_> = ctx.elements().filter(|x| !x.is_zero()).collect();
        let monics: Vec<Poly> = (0..=3).flat_map(|d| enumerate_monic(&ctx, d)).collect();
        for u in &monics {
            for v in &monics {
                for c in &units {
                    let a = u.scale(*c).unwrap();
                    let (quot, rem) = a.divrem(v).unwrap();
                    if &(&quot * v) + &rem != a || rem.degree() >= v.degree() {
                        return Err(format!("divrem fails for {a} / {v} over F_{q}"));
                    }
                }
                let (du, dv) = (u.deg().unwrap(), v.deg().unwrap());
                if du >= 1 && dv >= 1 {
                    let rank = sylvester_rank(u, v).unwrap();
                    if du + dv - rank != gcd_monic(u, v).unwrap().deg().unwrap() {
                        return Err(format!("rank {rank} disagrees with gcd for ({u}, {v}) over F_{q}"));
                    }
                }
            }
        }
    }
    Ok("axioms for q <= 9, division and rank for q in {2, 3}, degrees <= 3".into())
}

fn report(id: u8, title: &str, start: Instant, outcome: &Outcome) -> bool {
    let (tag, detail) = match outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("[{tag}] criterion {id}: {title} ({detail}) [{:.2?}]", start.elapsed());
    outcome.is_ok()
}

fn main() -> ExitCode {
    let mut all = true;

    let start = Instant::now();
    let hists = pair_histograms();
    all &= report(1, "Poly1 pair counts", start, &criterion_1(&hists));
    let start = Instant::now();
    all &= report(2, "filtration identities", start, &criterion_2(&hists));

    let start = Instant::now();
    let (c3, c4) = psi_criteria();
    all &= report(3, "cell-wise bijection", start, &c3);
    all &= report(4, "signature shift law", start, &c4);

    let start = Instant::now();
    let counts: Vec<_> = HOM_CASES.iter().map(|&(a, b, n, q)| hom_weighted(a, b, n, q)).collect();
    all &= report(5, "Hom stack weighted counts", start, &criterion_5(&counts));
    let start = Instant::now();
    all &= report(6, "symbolic assembly", start, &criterion_6());
    let start = Instant::now();
    all &= report(7, "measure compatibility", start, &criterion_7(&counts));
    let start = Instant::now();
    all &= report(8, "algebra property suites", start, &criterion_8());

    if all {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
