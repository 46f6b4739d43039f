//! Brute-force point counts of coprime loci, the common-factor filtration,
//! the degree strata of coprime pairs and the weighted count of the Hom stack.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::FqContext;
use crate::partition::map_reduce;
use crate::poly::gcd_degree_in_place;
use crate::space::{decode_bounded_into, power, EnumConfig, MonicTupleSpace};

/// Which locus a count refers to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StratumName {
    Poly1 {
        degrees: Vec<usize>,
    },
    /// Tuples whose common factor has degree exactly `k`.
    CommonFactor {
        degrees: Vec<usize>,
        k: usize,
    },
    TStratum {
        a: usize,
        b: usize,
        n: usize,
        k: usize,
        l: usize,
    },
    T {
        a: usize,
        b: usize,
        n: usize,
    },
    Hom {
        a: usize,
        b: usize,
        n: usize,
    },
}

fn join(ds: &[usize]) -> String {
    ds.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

impl StratumName {
    pub fn kind(&self) -> &'static str {
        match self {
            StratumName::Poly1 { .. } => "poly1",
            StratumName::CommonFactor { .. } => "r_stratum",
            StratumName::TStratum { .. } => "t_stratum",
            StratumName::T { .. } => "t",
            StratumName::Hom { .. } => "hom",
        }
    }

    pub fn params(&self) -> String {
        match self {
            StratumName::Poly1 { degrees } => format!("degrees={}", join(degrees)),
            StratumName::CommonFactor { degrees, k } => format!("degrees={};k={k}", join(degrees)),
            StratumName::TStratum { a, b, n, k, l } => format!("a={a};b={b};n={n};k={k};l={l}"),
            StratumName::T { a, b, n } | StratumName::Hom { a, b, n } => format!("a={a};b={b};n={n}"),
        }
    }
}

impl fmt::Display for StratumName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StratumName::Poly1 { degrees } => write!(f, "Poly1^({})", join(degrees)),
            StratumName::CommonFactor { degrees, k } => {
                write!(f, "R_{k}\\R_{}^({})", k + 1, join(degrees))
            }
            StratumName::TStratum { k, l, .. } => write!(f, "T_{{{k},{l}}}"),
            StratumName::T { .. } => f.write_str("T"),
            StratumName::Hom { a, b, n } => write!(f, "Hom_{n}(P1,P({a},{b}))"),
        }
    }
}

/// Exact cardinality of a named locus over `F_q`, with its predicted value when one exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumCount {
    pub name: StratumName,
    pub q: u32,
    pub count: BigRational,
    pub predicted: Option<BigRational>,
    /// Set when the characteristic hypothesis was overridden for this run.
    pub forced: bool,
}

impl StratumCount {
    fn new(name: StratumName, q: u32, count: impl Into<BigInt>, predicted: Option<BigRational>) -> Self {
        StratumCount { name, q, count: BigRational::from_integer(count.into()), predicted, forced: false }
    }

    /// `None` when there is no prediction to compare against.
    pub fn matches(&self) -> Option<bool> {
        self.predicted.as_ref().map(|p| *p == self.count)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name.to_string(),
            "kind": self.name.kind(),
            "q": self.q,
            "params": self.name.params(),
            "count": self.count.to_string(),
            "predicted": self.predicted.as_ref().map(ToString::to_string),
            "match": self.matches(),
            "forced": self.forced,
        })
    }

    /// `name, q, params, count, predicted, match`.
    pub fn csv_row(&self) -> [String; 6] {
        [
            self.name.to_string(),
            self.q.to_string(),
            self.name.params(),
            self.count.to_string(),
            self.predicted.as_ref().map_or_else(String::new, ToString::to_string),
            self.matches().map_or_else(String::new, |m| m.to_string()),
        ]
    }
}

pub const CSV_HEADER: [&str; 6] = ["name", "q", "params", "count", "predicted", "match"];

fn int(n: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `q^{d1+d2} - q^{d1+d2-1}` when both degrees are positive, `q^{d1+d2}` otherwise.
pub fn poly1_pair_closed_form(q: u32, d1: usize, d2: usize) -> u128 {
    let n = d1 + d2;
    if d1 > 0 && d2 > 0 {
        power(q, n) - power(q, n - 1)
    } else {
        power(q, n)
    }
}

/// Degree of the gcd of a tuple of nonzero code vectors; consumes the buffers.
fn tuple_gcd_degree(ctx: &FqContext, state: &mut [Vec<u32>]) -> usize {
    let (head, rest) = state.split_first_mut().expect("nonempty tuple");
    let mut acc = std::mem::take(head);
    for f in rest {
        if acc.len() == 1 {
            break;
        }
        gcd_degree_in_place(ctx, &mut acc, f);
    }
    acc.len() - 1
}

/// `hist[k]` = number of monic tuples of the given degrees whose gcd has degree exactly `k`.
pub fn gcd_degree_histogram(ctx: &FqContext, degrees: &[usize], cfg: &EnumConfig) -> Result<Vec<u64>> {
    if degrees.is_empty() {
        return Err(Error::EmptyTuple);
    }
    let space = MonicTupleSpace::new(ctx, degrees);
    let total = cfg.admit(space.size())?;
    let len = degrees.iter().min().unwrap() + 1;
    Ok(map_reduce(
        total,
        cfg.workers,
        |range| {
            let mut hist = vec![0u64; len];
            let mut buf = Vec::new();
            for idx in range {
                space.decode_into(idx, &mut buf);
                hist[tuple_gcd_degree(ctx, &mut buf)] += 1;
            }
            hist
        },
        |a, b| {
            if a.is_empty() {
                return b;
            }
            a.iter().zip(&b).map(|(x, y)| x + y).collect()
        },
    ))
}

/// Number of coprime monic tuples of the given degrees. Pairs carry the
/// closed-form prediction; longer tuples have none.
pub fn count_poly1(ctx: &FqContext, degrees: &[usize], cfg: &EnumConfig) -> Result<StratumCount> {
    let hist = gcd_degree_histogram(ctx, degrees, cfg)?;
    let predicted = match degrees {
        [d1, d2] => Some(int(poly1_pair_closed_form(ctx.q(), *d1, *d2))),
        _ => None,
    };
    Ok(StratumCount::new(StratumName::Poly1 { degrees: degrees.to_vec() }, ctx.q(), hist[0], predicted))
}

fn check_k(degrees: &[usize], k: usize) -> Result<usize> {
    let min = *degrees.iter().min().ok_or(Error::EmptyTuple)?;
    if k > min + 1 {
        return Err(Error::StratumOutOfRange { k, max: min + 1 });
    }
    Ok(min)
}

/// Number of monic tuples whose common factor has degree exactly `k`.
/// The prediction is `q^k |Poly_1^{(d-k)}|`, using the closed form for pairs
/// and an independent enumeration of the smaller space otherwise.
pub fn count_r_stratum(ctx: &FqContext, degrees: &[usize], k: usize, cfg: &EnumConfig) -> Result<StratumCount> {
    let min = check_k(degrees, k)?;
    let hist = gcd_degree_histogram(ctx, degrees, cfg)?;
    let count = hist.get(k).copied().unwrap_or(0);
    let predicted = if k > min {
        0
    } else {
        let shifted: Vec<usize> = degrees.iter().map(|d| d - k).collect();
        let base = match shifted[..] {
            [d1, d2] => poly1_pair_closed_form(ctx.q(), d1, d2),
            _ => gcd_degree_histogram(ctx, &shifted, cfg)?[0] as u128,
        };
        power(ctx.q(), k) * base
    };
    let name = StratumName::CommonFactor { degrees: degrees.to_vec(), k };
    Ok(StratumCount::new(name, ctx.q(), count, Some(int(predicted))))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationReport {
    pub q: u32,
    pub degrees: Vec<usize>,
    /// `strata[k] = |R_k \ R_{k+1}|` for `k = 0..=min(degrees)`.
    pub strata: Vec<u64>,
    /// `q^k |Poly_1^{(d-k)}|`, each by its own enumeration.
    pub shifted_poly1: Vec<u128>,
    pub total: u128,
}

/// Checks that the strata exhaust the ambient space, that each stratum has
/// `q^k |Poly_1^{(d-k)}|` points, and that nothing has a common factor of
/// degree above `min(degrees)`. Any failure is an error.
pub fn verify_filtration(ctx: &FqContext, degrees: &[usize], cfg: &EnumConfig) -> Result<FiltrationReport> {
    let hist = gcd_degree_histogram(ctx, degrees, cfg)?;
    let total = MonicTupleSpace::new(ctx, degrees).size();
    let sum: u128 = hist.iter().map(|&c| c as u128).sum();
    if sum != total {
        return Err(Error::IdentityFailed(format!("strata of {degrees:?} sum to {sum}, expected {total}")));
    }
    let min = hist.len() - 1;
    let mut shifted_poly1 = Vec::with_capacity(min + 1);
    for (k, &count) in hist.iter().enumerate() {
        let shifted: Vec<usize> = degrees.iter().map(|d| d - k).collect();
        let base = gcd_degree_histogram(ctx, &shifted, cfg)?[0] as u128;
        let expected = power(ctx.q(), k) * base;
        if count as u128 != expected {
            return Err(Error::IdentityFailed(format!(
                "stratum k={k} of {degrees:?} has {count} points, expected q^k * {base} = {expected}"
            )));
        }
        shifted_poly1.push(expected);
    }
    // hist has no slot beyond min(degrees): a gcd cannot exceed the smallest degree
    debug_assert_eq!(min, *degrees.iter().min().unwrap());
    Ok(FiltrationReport { q: ctx.q(), degrees: degrees.to_vec(), strata: hist, shifted_poly1, total })
}

/// Weights, degree and field of a Hom stack count.
#[derive(Clone, Debug)]
pub struct HomStackParams {
    pub ctx: FqContext,
    pub a: usize,
    pub b: usize,
    pub n: usize,
    /// Compute even when the characteristic divides a weight.
    pub force: bool,
}

impl HomStackParams {
    pub fn new(ctx: &FqContext, a: usize, b: usize, n: usize) -> Result<Self> {
        if a == 0 || b == 0 || n == 0 {
            return Err(Error::BadWeights { a, b, n });
        }
        Ok(HomStackParams { ctx: ctx.clone(), a, b, n, force: false })
    }

    pub fn forced(mut self, force: bool) -> Self {
        self.force = force;
        self
    }

    /// Whether the characteristic divides neither weight.
    pub fn hypothesis_holds(&self) -> bool {
        let p = self.ctx.p() as usize;
        !self.a.is_multiple_of(p) && !self.b.is_multiple_of(p)
    }

    fn gate(&self) -> Result<()> {
        if self.hypothesis_holds() || self.force {
            Ok(())
        } else {
            Err(Error::Hypothesis { p: self.ctx.p(), a: self.a, b: self.b })
        }
    }

    pub fn degree_bounds(&self) -> (usize, usize) {
        (self.a * self.n, self.b * self.n)
    }

    /// Projected number of pairs enumerated by [`count_hom_weighted`].
    pub fn t_space_size(&self) -> u128 {
        let (an, bn) = self.degree_bounds();
        let q = self.ctx.q();
        (power(q, an + 1) - 1) * (power(q, bn + 1) - 1)
    }

    pub fn is_legal_stratum(&self, k: usize, l: usize) -> bool {
        let (an, bn) = self.degree_bounds();
        (k == an && l <= bn) || (l == bn && k <= an)
    }

    /// `q^{(a+b)n+1} - q^{(a+b)n-1}`.
    pub fn closed_form(&self) -> u128 {
        let top = (self.a + self.b) * self.n;
        power(self.ctx.q(), top + 1) - power(self.ctx.q(), top - 1)
    }
}

/// Points of `T_{k,l}`: coprime pairs, not necessarily monic, of exact degrees
/// `(k, l)`, enumerated directly. Predicted `(q-1)^2 |Poly_1^{(k,l)}|`.
pub fn count_t_stratum(params: &HomStackParams, k: usize, l: usize, cfg: &EnumConfig) -> Result<StratumCount> {
    if !params.is_legal_stratum(k, l) {
        return Err(Error::IllegalStratum { k, l, a: params.a, b: params.b, n: params.n });
    }
    let ctx = &params.ctx;
    let q = ctx.q();
    let u_count = (q as u128 - 1) * power(q, k);
    let v_count = (q as u128 - 1) * power(q, l);
    let total = cfg.admit(u_count * v_count)?;
    let (u_count, lower_u, lower_v) = (u_count as u64, power(q, k) as u64, power(q, l) as u64);
    let count = map_reduce(
        total,
        cfg.workers,
        |range| {
            let (mut u, mut v) = (Vec::new(), Vec::new());
            let mut found = 0u64;
            for idx in range {
                let (ui, vi) = (idx % u_count, idx / u_count);
                exact_degree_into(q, k, ui, lower_u, &mut u);
                exact_degree_into(q, l, vi, lower_v, &mut v);
                if gcd_degree_in_place(ctx, &mut u, &mut v) == Some(0) {
                    found += 1;
                }
            }
            found
        },
        |a, b| a + b,
    );
    let predicted = (q as u128 - 1).pow(2) * poly1_pair_closed_form(q, k, l);
    let name = StratumName::TStratum { a: params.a, b: params.b, n: params.n, k, l };
    Ok(StratumCount::new(name, q, count, Some(int(predicted))))
}

/// Index `idx` in `0..(q-1) q^d`: lower coefficients from `idx % q^d`, leading
/// coefficient code `1 + idx / q^d`.
fn exact_degree_into(q: u32, d: usize, idx: u64, lower: u64, out: &mut Vec<u32>) {
    decode_bounded_into(q, d, idx % lower, out);
    out.resize(d, 0);
    out.push(1 + (idx / lower) as u32);
}

#[derive(Clone, Debug)]
pub struct HomCount {
    /// `|T(F_q)|` by direct enumeration.
    pub t: StratumCount,
    /// `|T| / (q-1)` against the closed form.
    pub hom: StratumCount,
    /// Each `T_{k,l}` by its own enumeration.
    pub strata: Vec<StratumCount>,
    /// `|T|` is a multiple of `q - 1`.
    pub divisible: bool,
    /// `|T|` equals the sum of the strata counts.
    pub strata_sum_ok: bool,
}

impl HomCount {
    pub fn passed(&self) -> bool {
        self.divisible
            && self.strata_sum_ok
            && self.hom.matches() == Some(true)
            && self.strata.iter().all(|s| s.matches() == Some(true))
    }
}

/// Weighted point count of the Hom stack as `|T(F_q)| / (q-1)`, where `T` is
/// the set of coprime pairs `(u, v)` of nonzero polynomials with
/// `deg u <= an`, `deg v <= bn` and at least one bound attained (so the
/// homogenized pair has no common zero at infinity).
pub fn count_hom_weighted(params: &HomStackParams, cfg: &EnumConfig) -> Result<HomCount> {
    params.gate()?;
    let ctx = &params.ctx;
    let q = ctx.q();
    let (an, bn) = params.degree_bounds();
    let total = cfg.admit(params.t_space_size())?;
    let u_nonzero = power(q, an + 1) as u64 - 1;
    let (u_top, v_top) = (power(q, an) as u64, power(q, bn) as u64);
    let t_count = map_reduce(
        total,
        cfg.workers,
        |range| {
            let (mut u, mut v) = (Vec::new(), Vec::new());
            let mut found = 0u64;
            for idx in range {
                let (ui, vi) = (1 + idx % u_nonzero, 1 + idx / u_nonzero);
                // indices at or above q^{an} are exactly the polynomials of degree an
                if ui < u_top && vi < v_top {
                    continue;
                }
                decode_bounded_into(q, an, ui, &mut u);
                decode_bounded_into(q, bn, vi, &mut v);
                if gcd_degree_in_place(ctx, &mut u, &mut v) == Some(0) {
                    found += 1;
                }
            }
            found
        },
        |a, b| a + b,
    );

    let mut strata = Vec::new();
    for (k, l) in crate::motive::hom_strata_indices(params.a, params.b, params.n) {
        let mut s = count_t_stratum(params, k, l, cfg)?;
        s.forced = !params.hypothesis_holds();
        strata.push(s);
    }
    let strata_sum = strata.iter().fold(BigRational::zero(), |acc, s| acc + &s.count);
    let t_rational = int(t_count as u128);
    let divisible = t_count % (q as u64 - 1) == 0;
    let forced = !params.hypothesis_holds();

    let (a, b, n) = (params.a, params.b, params.n);
    let mut t = StratumCount::new(StratumName::T { a, b, n }, q, t_count, None);
    t.predicted = Some(int(params.closed_form() * (q as u128 - 1)));
    t.forced = forced;
    let mut hom = StratumCount::new(StratumName::Hom { a, b, n }, q, 0, Some(int(params.closed_form())));
    hom.count = BigRational::new(BigInt::from(t_count), BigInt::from(q - 1));
    hom.forced = forced;
    Ok(HomCount { strata_sum_ok: strata_sum == t_rational, t, hom, strata, divisible })
}
