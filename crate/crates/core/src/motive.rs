//! Classes in the subring `Z[L, L^-1]` of the Grothendieck ring of stacks,
//! where `L` is the class of the affine line.
//!
//! Every class computed here is a Laurent polynomial in `L` with integer
//! coefficients. The point-counting measure sends `L` to `q`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Integer Laurent polynomial in `L`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MotiveClass {
    terms: BTreeMap<i64, BigInt>,
}

impl MotiveClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `L`.
    pub fn lefschetz() -> Self {
        Self::monomial(1, 1)
    }

    /// `coeff * L^exp`.
    pub fn monomial(coeff: impl Into<BigInt>, exp: i64) -> Self {
        let mut out = Self::zero();
        out.add_term(exp, coeff.into());
        out
    }

    pub fn from_terms<C: Into<BigInt>>(terms: impl IntoIterator<Item = (i64, C)>) -> Self {
        let mut out = Self::zero();
        for (exp, c) in terms {
            out.add_term(exp, c.into());
        }
        out
    }

    fn add_term(&mut self, exp: i64, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    /// Terms in descending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().rev().map(|(&e, c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn top_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn bottom_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// No negative powers of `L`.
    pub fn is_polynomial(&self) -> bool {
        self.bottom_exponent().is_none_or(|e| e >= 0)
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &MotiveClass) -> Option<MotiveClass> {
        let (div_top, div_low) = (divisor.top_exponent()?, divisor.bottom_exponent()?);
        let lead = divisor.coeff(div_top);
        let floor = self.bottom_exponent().unwrap_or(0);
        let mut rem = self.clone();
        let mut quot = MotiveClass::zero();
        while let Some(top) = rem.top_exponent() {
            let shift = top - div_top;
            if shift + div_low < floor {
                return None;
            }
            let c = rem.coeff(top);
            if !(&c % &lead).is_zero() {
                return None;
            }
            let term = MotiveClass::monomial(c / &lead, shift);
            rem = &rem - &(&term * divisor);
            quot = &quot + &term;
        }
        Some(quot)
    }

    /// The point-counting measure: evaluate at `L = q`.
    pub fn count_measure(&self, q: u64) -> Result<BigRational> {
        if q < 2 {
            return Err(Error::BadMeasureBase(q));
        }
        let base = BigRational::from_integer(BigInt::from(q));
        let mut total = BigRational::zero();
        for (&exp, c) in &self.terms {
            let power = if exp >= 0 {
                num_traits::pow(base.clone(), exp as usize)
            } else {
                num_traits::pow(base.recip(), exp.unsigned_abs() as usize)
            };
            total += BigRational::from_integer(c.clone()) * power;
        }
        Ok(total)
    }

    /// JSON form: `[[exp, coeff], ...]` in descending exponent order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms()
                .map(|(e, c)| {
                    let c = c.to_i64().map_or_else(|| Value::from(c.to_string()), Value::from);
                    Value::Array(vec![Value::from(e), c])
                })
                .collect(),
        )
    }
}

impl fmt::Display for MotiveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (exp, c)) in self.terms().enumerate() {
            let mag = c.abs();
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let unit = mag.is_one();
            match exp {
                0 => write!(f, "{mag}")?,
                1 if unit => f.write_str("L")?,
                1 => write!(f, "{mag}*L")?,
                _ if unit => write!(f, "L^{exp}")?,
                _ => write!(f, "{mag}*L^{exp}")?,
            }
        }
        Ok(())
    }
}

impl Add for &MotiveClass {
    type Output = MotiveClass;
    fn add(self, rhs: &MotiveClass) -> MotiveClass {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &MotiveClass {
    type Output = MotiveClass;
    fn sub(self, rhs: &MotiveClass) -> MotiveClass {
        self + &-rhs
    }
}

impl Neg for &MotiveClass {
    type Output = MotiveClass;
    fn neg(self) -> MotiveClass {
        MotiveClass { terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect() }
    }
}

impl Mul for &MotiveClass {
    type Output = MotiveClass;
    fn mul(self, rhs: &MotiveClass) -> MotiveClass {
        let mut out = MotiveClass::zero();
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

/// `L - 1`, the class of the multiplicative group.
pub fn gm_class() -> MotiveClass {
    MotiveClass::from_terms([(1, 1), (0, -1)])
}

/// Class of the space of coprime monic pairs of degrees `(d1, d2)`.
pub fn poly1_class(d1: i64, d2: i64) -> Result<MotiveClass> {
    for d in [d1, d2] {
        if d < 0 {
            return Err(Error::NegativeDegree(d));
        }
    }
    let n = d1 + d2;
    Ok(if d1 > 0 && d2 > 0 { MotiveClass::from_terms([(n, 1), (n - 1, -1)]) } else { MotiveClass::monomial(1, n) })
}

/// The index set `(k, l)` of the degree stratification of coprime pairs
/// `(u, v)` with `deg u <= an`, `deg v <= bn` not both below their bound:
/// `(an, bn)`, then `(k, bn)` for `k < an`, then `(an, l)` for `l < bn`.
pub fn hom_strata_indices(a: usize, b: usize, n: usize) -> Vec<(usize, usize)> {
    let (an, bn) = (a * n, b * n);
    let mut out = vec![(an, bn)];
    out.extend((0..an).map(|k| (k, bn)));
    out.extend((0..bn).map(|l| (an, l)));
    out
}

/// `L^{(a+b)n+1} - L^{(a+b)n-1}`.
pub fn hom_class_closed_form(a: usize, b: usize, n: usize) -> MotiveClass {
    let top = ((a + b) * n) as i64;
    MotiveClass::from_terms([(top + 1, 1), (top - 1, -1)])
}

/// Class of the space of coprime pairs, summed over the degree strata, with
/// each stratum contributing `(L-1)^2 [Poly_1^{(k,l)}]` for the two scalings.
pub fn assemble_t_class(a: usize, b: usize, n: usize) -> Result<MotiveClass> {
    if a == 0 || b == 0 || n == 0 {
        return Err(Error::BadWeights { a, b, n });
    }
    let torus = gm_class().pow(2);
    let mut total = MotiveClass::zero();
    for (k, l) in hom_strata_indices(a, b, n) {
        total = &total + &(&torus * &poly1_class(k as i64, l as i64)?);
    }
    Ok(total)
}

/// Class of the Hom stack: the assembled `[T]` divided by `L - 1` for the
/// free scaling action. Fails if the division is inexact or the result
/// disagrees with `L^{(a+b)n+1} - L^{(a+b)n-1}`.
pub fn assemble_hom_class(a: usize, b: usize, n: usize) -> Result<MotiveClass> {
    let t = assemble_t_class(a, b, n)?;
    let quotient = t
        .div_exact(&gm_class())
        .ok_or_else(|| Error::IdentityFailed(format!("[T] = {t} is not divisible by L - 1")))?;
    let expected = hom_class_closed_form(a, b, n);
    if quotient != expected || !quotient.is_polynomial() {
        return Err(Error::IdentityFailed(format!("assembled class {quotient} differs from {expected}")));
    }
    Ok(quotient)
}
