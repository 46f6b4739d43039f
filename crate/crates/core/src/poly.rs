//! Dense univariate polynomials over `F_q`.
//!
//! Coefficients are stored in ascending degree order with no trailing zeros,
//! so the zero polynomial is the empty vector. Text and JSON forms use the
//! descending (monic-first) order: `z^2+3z+2` is `[1,3,2]`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{FqContext, FqElement};

/// Degree of a polynomial; the zero polynomial sits below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Finite(d) => write!(f, "{d}"),
            Degree::NegInfinity => f.write_str("-"),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    ctx: FqContext,
    coeffs: Vec<u32>,
}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ctx.q().hash(state);
        self.coeffs.hash(state);
    }
}

pub(crate) fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

impl Poly {
    pub fn zero(ctx: &FqContext) -> Self {
        Poly { ctx: ctx.clone(), coeffs: Vec::new() }
    }

    pub fn one(ctx: &FqContext) -> Self {
        Poly { ctx: ctx.clone(), coeffs: vec![1] }
    }

    /// The polynomial `z`.
    pub fn z(ctx: &FqContext) -> Self {
        Poly { ctx: ctx.clone(), coeffs: vec![0, 1] }
    }

    /// `c z^d`.
    pub fn monomial(ctx: &FqContext, c: FqElement, d: usize) -> Result<Self> {
        if c.field_order() != ctx.q() {
            return Err(Error::FieldMismatch(ctx.q(), c.field_order()));
        }
        let mut coeffs = vec![0; d + 1];
        coeffs[d] = c.code();
        trim(&mut coeffs);
        Ok(Poly { ctx: ctx.clone(), coeffs })
    }

    /// From ascending element codes. Codes must be below `q`.
    pub fn from_codes(ctx: &FqContext, mut coeffs: Vec<u32>) -> Self {
        assert!(coeffs.iter().all(|&c| c < ctx.q()), "code out of range for {ctx}");
        trim(&mut coeffs);
        Poly { ctx: ctx.clone(), coeffs }
    }

    pub fn from_elements(ctx: &FqContext, coeffs: &[FqElement]) -> Result<Self> {
        let mut codes = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            if c.field_order() != ctx.q() {
                return Err(Error::FieldMismatch(ctx.q(), c.field_order()));
            }
            codes.push(c.code());
        }
        trim(&mut codes);
        Ok(Poly { ctx: ctx.clone(), coeffs: codes })
    }

    /// From integer coefficients in descending order, mapped into the prime subfield.
    pub fn from_descending(ctx: &FqContext, coeffs: &[i64]) -> Self {
        let mut codes: Vec<u32> = coeffs.iter().rev().map(|&c| ctx.from_int(c).code()).collect();
        trim(&mut codes);
        Poly { ctx: ctx.clone(), coeffs: codes }
    }

    pub fn ctx(&self) -> &FqContext {
        &self.ctx
    }

    /// Ascending coefficient codes.
    pub fn codes(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FqElement {
        self.ctx.from_code(self.coeffs.get(i).copied().unwrap_or(0)).unwrap()
    }

    pub fn coefficients(&self) -> Vec<FqElement> {
        self.coeffs.iter().map(|&c| self.ctx.from_code(c).unwrap()).collect()
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    /// Degree of a nonzero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.degree().finite()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn leading(&self) -> Option<FqElement> {
        self.coeffs.last().map(|&c| self.ctx.from_code(c).unwrap())
    }

    fn same_field(&self, other: &Poly) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.ctx.q(), other.ctx.q()))
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        let ctx = &self.ctx;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out: Vec<u32> = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                ctx.add_code(a, b)
            })
            .collect();
        trim(&mut out);
        Ok(Poly { ctx: ctx.clone(), coeffs: out })
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        let ctx = &self.ctx;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(ctx));
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = ctx.add_code(out[i + j], ctx.mul_code(a, b));
            }
        }
        trim(&mut out);
        Ok(Poly { ctx: ctx.clone(), coeffs: out })
    }

    pub fn scale(&self, c: FqElement) -> Result<Poly> {
        if c.field_order() != self.ctx.q() {
            return Err(Error::FieldMismatch(self.ctx.q(), c.field_order()));
        }
        let mut out: Vec<u32> = self.coeffs.iter().map(|&a| self.ctx.mul_code(a, c.code())).collect();
        trim(&mut out);
        Ok(Poly { ctx: self.ctx.clone(), coeffs: out })
    }

    /// The monic associate; `None` for the zero polynomial.
    pub fn monic(&self) -> Option<Poly> {
        let lead = *self.coeffs.last()?;
        let inv = self.ctx.inv_code(lead).ok()?;
        let coeffs = self.coeffs.iter().map(|&a| self.ctx.mul_code(a, inv)).collect();
        Some(Poly { ctx: self.ctx.clone(), coeffs })
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn divrem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.same_field(divisor)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let ctx = &self.ctx;
        let dl = divisor.coeffs.len();
        if self.coeffs.len() < dl {
            return Ok((Poly::zero(ctx), self.clone()));
        }
        let inv_lead = ctx.inv_code(*divisor.coeffs.last().unwrap())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0; rem.len() - dl + 1];
        for top in (dl - 1..rem.len()).rev() {
            let c = rem[top];
            if c == 0 {
                continue;
            }
            let factor = ctx.mul_code(c, inv_lead);
            let shift = top + 1 - dl;
            quot[shift] = factor;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] = ctx.sub_code(rem[shift + j], ctx.mul_code(factor, b));
            }
        }
        rem.truncate(dl - 1);
        trim(&mut rem);
        trim(&mut quot);
        Ok((Poly { ctx: ctx.clone(), coeffs: quot }, Poly { ctx: ctx.clone(), coeffs: rem }))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly> {
        Ok(self.divrem(divisor)?.1)
    }

    /// `self^exp mod modulus`.
    pub fn pow_mod(&self, mut exp: u64, modulus: &Poly) -> Result<Poly> {
        let mut base = self.rem(modulus)?;
        let mut acc = Poly::one(&self.ctx).rem(modulus)?;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.checked_mul(&base)?.rem(modulus)?;
            }
            base = base.checked_mul(&base)?.rem(modulus)?;
            exp >>= 1;
        }
        Ok(acc)
    }

    /// Ben-Or irreducibility test: `gcd(f, z^{q^i} - z) = 1` for `1 <= i <= deg/2`.
    pub fn is_irreducible(&self) -> bool {
        let Some(d) = self.deg() else { return false };
        if d == 0 {
            return false;
        }
        let z = Poly::z(&self.ctx);
        let q = self.ctx.q() as u64;
        let mut h = z.clone();
        for _ in 0..d / 2 {
            h = h.pow_mod(q, self).unwrap();
            let diff = h.checked_sub(&z).unwrap();
            if gcd_monic(self, &diff).unwrap().deg() != Some(0) {
                return false;
            }
        }
        true
    }

    /// Evaluation at a field element (Horner).
    pub fn eval(&self, x: FqElement) -> Result<FqElement> {
        if x.field_order() != self.ctx.q() {
            return Err(Error::FieldMismatch(self.ctx.q(), x.field_order()));
        }
        let v = self.coeffs.iter().rev().fold(0, |acc, &c| self.ctx.add_code(self.ctx.mul_code(acc, x.code()), c));
        self.ctx.from_code(v)
    }

    fn format_coeff(&self, code: u32) -> String {
        if self.ctx.e() == 1 {
            code.to_string()
        } else {
            let coords = self.ctx.coords(self.ctx.from_code(code).unwrap());
            let parts: Vec<String> = coords.iter().map(u32::to_string).collect();
            format!("({})", parts.join(","))
        }
    }

    /// Descending coefficient list: integers for prime fields, comma-joined
    /// power-basis coordinates for extension fields.
    pub fn to_json(&self) -> Value {
        let items = self.coeffs.iter().rev().map(|&c| {
            if self.ctx.e() == 1 {
                Value::from(c)
            } else {
                let coords = self.ctx.coords(self.ctx.from_code(c).unwrap());
                let parts: Vec<String> = coords.iter().map(u32::to_string).collect();
                Value::from(parts.join(","))
            }
        });
        Value::Array(items.collect())
    }

    pub fn from_json(ctx: &FqContext, value: &Value) -> Result<Poly> {
        let bad = |why: &str| Error::Parse(value.to_string(), why.to_string());
        let items = value.as_array().ok_or_else(|| bad("expected an array"))?;
        let mut codes = Vec::with_capacity(items.len());
        for item in items.iter().rev() {
            let el = match item {
                Value::Number(n) => {
                    let n = n.as_u64().ok_or_else(|| bad("negative or fractional coefficient"))?;
                    ctx.element(&[n])?
                }
                Value::String(s) => parse_coords(ctx, s).map_err(|_| bad("bad coordinates"))?,
                _ => return Err(bad("coefficient must be a number or coordinate string")),
            };
            codes.push(el.code());
        }
        trim(&mut codes);
        Ok(Poly { ctx: ctx.clone(), coeffs: codes })
    }

    /// Parses `z^2+3z+2`, `2z^3-z`, `(1,1)z+(0,1)` or a descending list `[1,3,2]`.
    pub fn parse(ctx: &FqContext, text: &str) -> Result<Poly> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.starts_with('[') {
            let v: Value = serde_json::from_str(&s).map_err(|e| Error::Parse(text.into(), e.to_string()))?;
            return Poly::from_json(ctx, &v);
        }
        let err = |why: &str| Error::Parse(text.to_string(), why.to_string());
        if s.is_empty() {
            return Err(err("empty input"));
        }
        let mut acc = Poly::zero(ctx);
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut negative = false;
            match bytes[i] {
                b'+' => i += 1,
                b'-' => {
                    negative = true;
                    i += 1;
                }
                _ if i > 0 => return Err(err("expected + or -")),
                _ => {}
            }
            // coefficient
            let coeff = if bytes.get(i) == Some(&b'(') {
                let close = s[i..].find(')').ok_or_else(|| err("unclosed ("))? + i;
                let el = parse_coords(ctx, &s[i + 1..close]).map_err(|_| err("bad coordinates"))?;
                i = close + 1;
                Some(el)
            } else {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if start == i {
                    None
                } else {
                    let n: u64 = s[start..i].parse().map_err(|_| err("bad integer"))?;
                    Some(ctx.element(&[n])?)
                }
            };
            let mut degree = 0;
            if bytes.get(i) == Some(&b'z') {
                i += 1;
                degree = 1;
                if bytes.get(i) == Some(&b'^') {
                    i += 1;
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    degree = s[start..i].parse().map_err(|_| err("bad exponent"))?;
                }
            } else if coeff.is_none() {
                return Err(err("term without coefficient or z"));
            }
            let mut c = coeff.unwrap_or_else(|| ctx.one());
            if negative {
                c = ctx.neg(c)?;
            }
            acc = acc.checked_add(&Poly::monomial(ctx, c, degree)?)?;
        }
        Ok(acc)
    }
}

fn parse_coords(ctx: &FqContext, s: &str) -> Result<FqElement> {
    let coords: Vec<u64> = s
        .split(',')
        .map(|p| p.trim().parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(s.to_string(), e.to_string()))?;
    ctx.element(&coords)
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (d, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            let coeff = if c == 1 && d > 0 { String::new() } else { self.format_coeff(c) };
            match d {
                0 => write!(f, "{coeff}")?,
                1 => write!(f, "{coeff}z")?,
                _ => write!(f, "{coeff}z^{d}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({self})", self.ctx)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs).expect("polynomials over different fields")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_sub(rhs).expect("polynomials over different fields")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).expect("polynomials over different fields")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let coeffs = self.coeffs.iter().map(|&c| self.ctx.neg_code(c)).collect();
        Poly { ctx: self.ctx.clone(), coeffs }
    }
}

/// Monic greatest common divisor.
pub fn gcd_monic(f: &Poly, g: &Poly) -> Result<Poly> {
    f.same_field(g)?;
    if f.is_zero() && g.is_zero() {
        return Err(Error::AllZero);
    }
    let (mut a, mut b) = (f.clone(), g.clone());
    while !b.is_zero() {
        let r = a.rem(&b)?;
        a = b;
        b = r;
    }
    Ok(a.monic().expect("nonzero"))
}

/// Degree of the monic gcd of a tuple; 0 means the tuple is coprime.
pub fn common_factor_degree(fs: &[Poly]) -> Result<usize> {
    let first = fs.first().ok_or(Error::EmptyTuple)?;
    let mut g = Poly::zero(first.ctx());
    for f in fs {
        if f.is_zero() {
            f.same_field(first)?;
            continue;
        }
        g = if g.is_zero() { f.monic().unwrap() } else { gcd_monic(&g, f)? };
    }
    g.deg().ok_or(Error::AllZero)
}

/// Which input polynomial a Sylvester row is a shift of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SylvesterSource {
    U,
    V,
}

/// Row `z^shift * source`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SylvesterRow {
    pub source: SylvesterSource,
    pub shift: usize,
}

/// Sylvester matrix of monic `u`, `v` of degrees `d1`, `d2`: `d1 + d2` square,
/// rows `z^j v` for `j < d1` followed by `z^j u` for `j < d2`; column `c`
/// holds the coefficient of `z^c`.
#[derive(Clone, Debug)]
pub struct SylvesterMatrix {
    ctx: FqContext,
    entries: Vec<Vec<u32>>,
    rows: Vec<SylvesterRow>,
}

impl SylvesterMatrix {
    pub fn new(u: &Poly, v: &Poly) -> Result<Self> {
        u.same_field(v)?;
        for f in [u, v] {
            if !f.is_monic() {
                return Err(Error::NotMonic(f.to_string()));
            }
        }
        let (d1, d2) = (u.deg().unwrap(), v.deg().unwrap());
        let n = d1 + d2;
        let mut entries = Vec::with_capacity(n);
        let mut rows = Vec::with_capacity(n);
        for (src, poly, count) in [(SylvesterSource::V, v, d1), (SylvesterSource::U, u, d2)] {
            for shift in 0..count {
                let mut row = vec![0; n];
                row[shift..shift + poly.coeffs.len()].copy_from_slice(&poly.coeffs);
                entries.push(row);
                rows.push(SylvesterRow { source: src, shift });
            }
        }
        Ok(SylvesterMatrix { ctx: u.ctx.clone(), entries, rows })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> FqElement {
        self.ctx.from_code(self.entries[row][col]).unwrap()
    }

    pub fn row_labels(&self) -> &[SylvesterRow] {
        &self.rows
    }

    /// Rank by Gaussian elimination over `F_q`.
    pub fn rank(&self) -> usize {
        let ctx = &self.ctx;
        let mut m = self.entries.clone();
        let n = m.len();
        let mut rank = 0;
        for col in 0..n {
            let Some(pivot) = (rank..n).find(|&r| m[r][col] != 0) else { continue };
            m.swap(rank, pivot);
            let inv = ctx.inv_code(m[rank][col]).unwrap();
            for x in &mut m[rank][col..] {
                *x = ctx.mul_code(*x, inv);
            }
            let pivot_row = m[rank].clone();
            for (r, row) in m.iter_mut().enumerate() {
                let factor = row[col];
                if r == rank || factor == 0 {
                    continue;
                }
                for (x, &p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x = ctx.sub_code(*x, ctx.mul_code(factor, p));
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Rank of the Sylvester matrix of monic `u`, `v` of positive degree.
pub fn sylvester_rank(u: &Poly, v: &Poly) -> Result<usize> {
    for f in [u, v] {
        if f.is_zero() || !f.is_monic() {
            return Err(Error::NotMonic(f.to_string()));
        }
        if f.deg() == Some(0) {
            return Err(Error::NotMonic(format!("{f} (degree 0)")));
        }
    }
    Ok(SylvesterMatrix::new(u, v)?.rank())
}

/// Number of monic polynomials of degree `d`, i.e. `q^d`, if it fits in `u64`.
pub fn monic_count(ctx: &FqContext, d: usize) -> Option<u64> {
    (ctx.q() as u64).checked_pow(d as u32)
}

/// Decodes index `idx` in `0..q^d` into the ascending codes of a monic
/// degree-`d` polynomial: base-`q` digit `j` is the coefficient of `z^j`.
pub(crate) fn decode_monic_into(q: u32, d: usize, mut idx: u64, out: &mut Vec<u32>) {
    out.clear();
    for _ in 0..d {
        out.push((idx % q as u64) as u32);
        idx /= q as u64;
    }
    out.push(1);
}

pub fn monic_at(ctx: &FqContext, d: usize, idx: u64) -> Poly {
    let mut codes = Vec::with_capacity(d + 1);
    decode_monic_into(ctx.q(), d, idx, &mut codes);
    Poly { ctx: ctx.clone(), coeffs: codes }
}

/// Iterator over a contiguous index range of the monic polynomials of degree `d`.
pub struct MonicIter {
    ctx: FqContext,
    d: usize,
    range: std::ops::Range<u64>,
}

impl Iterator for MonicIter {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        let idx = self.range.next()?;
        Some(monic_at(&self.ctx, self.d, idx))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.range.size_hint()
    }
}

impl ExactSizeIterator for MonicIter {}

/// All `q^d` monic polynomials of degree `d` in deterministic order.
pub fn enumerate_monic(ctx: &FqContext, d: usize) -> MonicIter {
    let total = monic_count(ctx, d).expect("q^d overflows u64");
    MonicIter { ctx: ctx.clone(), d, range: 0..total }
}

/// Worker `worker`'s share of [`enumerate_monic`]; shares are disjoint and
/// concatenate in worker order to the full sequence.
pub fn enumerate_monic_slice(ctx: &FqContext, d: usize, worker: usize, workers: usize) -> MonicIter {
    let total = monic_count(ctx, d).expect("q^d overflows u64");
    let range = crate::partition::slice_bounds(total, worker, workers);
    MonicIter { ctx: ctx.clone(), d, range }
}

// In-place kernels on raw ascending codes for the enumeration hot loops.

/// `a <- a mod b`, `b` nonzero and trimmed.
pub(crate) fn rem_in_place(ctx: &FqContext, a: &mut Vec<u32>, b: &[u32]) {
    let bl = b.len();
    let lead = *b.last().unwrap();
    let inv = if lead == 1 { 1 } else { ctx.inv_code(lead).unwrap() };
    while a.len() >= bl {
        let top = a.len() - 1;
        let c = a[top];
        if c != 0 {
            let factor = ctx.mul_code(c, inv);
            let shift = top + 1 - bl;
            for (j, &bc) in b.iter().enumerate() {
                a[shift + j] = ctx.sub_code(a[shift + j], ctx.mul_code(factor, bc));
            }
        }
        a.pop();
        trim(a);
    }
}

/// Degree of `gcd(a, b)`, destroying both buffers. `None` if both are zero.
pub(crate) fn gcd_degree_in_place(ctx: &FqContext, a: &mut Vec<u32>, b: &mut Vec<u32>) -> Option<usize> {
    trim(a);
    trim(b);
    loop {
        if b.is_empty() {
            return a.len().checked_sub(1);
        }
        rem_in_place(ctx, a, b);
        std::mem::swap(a, b);
    }
}
