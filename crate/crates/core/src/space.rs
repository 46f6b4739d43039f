//! Index spaces of polynomial tuples used by the exhaustive counters.
//!
//! A tuple of monic polynomials of degrees `(d_1, ..., d_m)` over `F_q` is
//! identified with an index in `0..q^{d_1+...+d_m}`: the lower coefficients
//! of `f_1` are the least significant base-`q` digits, then those of `f_2`,
//! and so on.

use crate::error::{Error, Result};
use crate::field::FqContext;
use crate::poly::{decode_monic_into, Poly};

/// Default bound on the number of tuples a single run may enumerate.
pub const DEFAULT_CAP: u64 = 200_000_000;

/// Enumeration limits shared by every counting job.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumConfig {
    pub cap: u64,
    pub workers: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig { cap: DEFAULT_CAP, workers: crate::partition::default_workers() }
    }
}

impl EnumConfig {
    pub fn with_workers(workers: usize) -> Self {
        EnumConfig { workers, ..Self::default() }
    }

    /// Refuses a job whose projected size exceeds the cap.
    pub fn admit(&self, projected: u128) -> Result<u64> {
        if projected > self.cap as u128 {
            Err(Error::CapExceeded { projected, cap: self.cap })
        } else {
            Ok(projected as u64)
        }
    }
}

/// `q^exp` without overflow, saturating at `u128::MAX`.
pub fn power(q: u32, exp: usize) -> u128 {
    (q as u128).checked_pow(exp as u32).unwrap_or(u128::MAX)
}

#[derive(Clone, Debug)]
pub struct MonicTupleSpace {
    ctx: FqContext,
    degrees: Vec<usize>,
}

impl MonicTupleSpace {
    pub fn new(ctx: &FqContext, degrees: &[usize]) -> Self {
        MonicTupleSpace { ctx: ctx.clone(), degrees: degrees.to_vec() }
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// `q^{sum of degrees}`.
    pub fn size(&self) -> u128 {
        power(self.ctx.q(), self.degrees.iter().sum())
    }

    /// Writes the ascending codes of tuple `idx` into `out` (resized to `m`).
    pub fn decode_into(&self, mut idx: u64, out: &mut Vec<Vec<u32>>) {
        let q = self.ctx.q() as u64;
        out.resize_with(self.degrees.len(), Vec::new);
        for (slot, &d) in out.iter_mut().zip(&self.degrees) {
            let block = q.pow(d as u32);
            decode_monic_into(q as u32, d, idx % block, slot);
            idx /= block;
        }
    }

    pub fn tuple(&self, idx: u64) -> Vec<Poly> {
        let mut codes = Vec::new();
        self.decode_into(idx, &mut codes);
        codes.into_iter().map(|c| Poly::from_codes(&self.ctx, c)).collect()
    }

    /// Inverse of [`Self::tuple`] for monic polynomials of the space's degrees.
    pub fn index_of(&self, tuple: &[Poly]) -> Option<u64> {
        if tuple.len() != self.degrees.len() {
            return None;
        }
        let q = self.ctx.q() as u64;
        let mut idx = 0u64;
        for (f, &d) in tuple.iter().zip(&self.degrees).rev() {
            if f.deg() != Some(d) || !f.is_monic() {
                return None;
            }
            let local = f.codes()[..d].iter().rev().fold(0u64, |acc, &c| acc * q + c as u64);
            idx = idx * q.pow(d as u32) + local;
        }
        Some(idx)
    }
}

/// Nonzero polynomials of degree at most `max_degree`, indexed by `1..q^{max_degree+1}`
/// with index `i` holding the polynomial whose ascending codes are the base-`q`
/// digits of `i`.
pub(crate) fn decode_bounded_into(q: u32, max_degree: usize, mut idx: u64, out: &mut Vec<u32>) {
    out.clear();
    for _ in 0..=max_degree {
        out.push((idx % q as u64) as u32);
        idx /= q as u64;
    }
    crate::poly::trim(out);
}
