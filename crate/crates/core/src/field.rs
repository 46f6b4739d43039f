//! Arithmetic in finite fields `F_q`, `q = p^e`.
//!
//! Elements are stored as packed power-basis coordinate vectors: the
//! element `c_0 + c_1 z + ... + c_{e-1} z^{e-1}` has code
//! `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`. Code order is therefore the
//! lexicographic order on `(c_0, c_1, ...)` with `c_0` varying fastest,
//! and code 0 is the zero element.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest field order supported. Codes and products stay inside `u64`.
pub const MAX_FIELD_ORDER: u64 = 1 << 16;

/// Extension fields up to this order get precomputed addition and
/// multiplication tables.
const TABLE_ORDER: u32 = 256;

const MAX_EXT: usize = 16;

/// An element of `F_q`. Carries the field order as a tag so that elements
/// of different fields never compare equal and mixing them is detected.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqElement {
    q: u32,
    code: u32,
}

impl FqElement {
    pub fn code(self) -> u32 {
        self.code
    }

    pub fn field_order(self) -> u32 {
        self.q
    }

    pub fn is_zero(self) -> bool {
        self.code == 0
    }
}

impl fmt::Debug for FqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}#{}", self.q, self.code)
    }
}

struct Inner {
    p: u32,
    e: u32,
    q: u32,
    /// Ascending coefficients of the monic modulus, length `e + 1`. Empty for prime fields.
    modulus: Vec<u32>,
    add_table: Vec<u32>,
    mul_table: Vec<u32>,
}

/// Description of `F_q`. Immutable and cheap to clone; safe to share across threads.
#[derive(Clone)]
pub struct FqContext(Arc<Inner>);

impl PartialEq for FqContext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.e == other.0.e && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FqContext {}

impl fmt::Debug for FqContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FqContext")
            .field("p", &self.0.p)
            .field("e", &self.0.e)
            .field("modulus", &self.0.modulus)
            .finish()
    }
}

impl fmt::Display for FqContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.e == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{}", self.0.p, self.0.e)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, e)` with `q = p^e`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// Builds `F_{p^e}`. For `e > 1` the modulus is the first monic irreducible
/// polynomial of degree `e` in code order of its lower coefficients.
pub fn make_field(p: u64, e: u32) -> Result<FqContext> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if e < 1 {
        return Err(Error::BadExtensionDegree(e));
    }
    let q = (p as u128).checked_pow(e).unwrap_or(u128::MAX);
    if q > MAX_FIELD_ORDER as u128 {
        return Err(Error::FieldTooLarge { p, e, bound: MAX_FIELD_ORDER });
    }
    let p = p as u32;
    let prime =
        FqContext(Arc::new(Inner { p, e: 1, q: p, modulus: Vec::new(), add_table: Vec::new(), mul_table: Vec::new() }));
    if e == 1 {
        return Ok(prime);
    }
    let modulus = find_modulus(&prime, e).ok_or(Error::NoModulus { p, e })?;
    let mut inner = Inner { p, e, q: q as u32, modulus, add_table: Vec::new(), mul_table: Vec::new() };
    if inner.q <= TABLE_ORDER {
        let n = inner.q as usize;
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for x in 0..inner.q {
            for y in 0..inner.q {
                add[x as usize * n + y as usize] = inner.add_slow(x, y);
                mul[x as usize * n + y as usize] = inner.mul_slow(x, y);
            }
        }
        inner.add_table = add;
        inner.mul_table = mul;
    }
    Ok(FqContext(Arc::new(inner)))
}

/// Builds the field of order `q`.
pub fn field_of_order(q: u64) -> Result<FqContext> {
    let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
    make_field(p, e)
}

fn find_modulus(prime: &FqContext, e: u32) -> Option<Vec<u32>> {
    use crate::poly::Poly;
    let p = prime.p() as u64;
    let lower = p.pow(e);
    (0..lower).find_map(|idx| {
        let mut coeffs = Vec::with_capacity(e as usize + 1);
        let mut rest = idx;
        for _ in 0..e {
            coeffs.push((rest % p) as u32);
            rest /= p;
        }
        coeffs.push(1);
        let f = Poly::from_codes(prime, coeffs.clone());
        f.is_irreducible().then_some(coeffs)
    })
}

impl Inner {
    fn decode(&self, code: u32) -> [u32; MAX_EXT] {
        let mut out = [0; MAX_EXT];
        let mut rest = code;
        for c in out.iter_mut().take(self.e as usize) {
            *c = rest % self.p;
            rest /= self.p;
        }
        out
    }

    fn encode(&self, coords: &[u32]) -> u32 {
        coords[..self.e as usize].iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add_slow(&self, x: u32, y: u32) -> u32 {
        let (a, b) = (self.decode(x), self.decode(y));
        let mut c = [0; MAX_EXT];
        for i in 0..self.e as usize {
            c[i] = (a[i] + b[i]) % self.p;
        }
        self.encode(&c)
    }

    fn mul_slow(&self, x: u32, y: u32) -> u32 {
        let e = self.e as usize;
        let p = self.p as u64;
        let (a, b) = (self.decode(x), self.decode(y));
        let mut prod = [0u64; 2 * MAX_EXT];
        for i in 0..e {
            for j in 0..e {
                prod[i + j] = (prod[i + j] + a[i] as u64 * b[j] as u64) % p;
            }
        }
        for top in (e..2 * e - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for j in 0..e {
                let sub = c * self.modulus[j] as u64 % p;
                prod[top - e + j] = (prod[top - e + j] + p - sub) % p;
            }
        }
        let mut coords = [0; MAX_EXT];
        for i in 0..e {
            coords[i] = prod[i] as u32;
        }
        self.encode(&coords)
    }
}

impl FqContext {
    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn e(&self) -> u32 {
        self.0.e
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Ascending coefficients of the defining modulus; `None` for prime fields.
    pub fn modulus(&self) -> Option<&[u32]> {
        (self.0.e > 1).then_some(self.0.modulus.as_slice())
    }

    pub fn zero(&self) -> FqElement {
        self.wrap(0)
    }

    pub fn one(&self) -> FqElement {
        self.wrap(1)
    }

    /// The power-basis generator `z`. Prime fields have none.
    pub fn generator(&self) -> Option<FqElement> {
        (self.0.e > 1).then(|| self.wrap(self.0.p))
    }

    pub(crate) fn wrap(&self, code: u32) -> FqElement {
        debug_assert!(code < self.0.q);
        FqElement { q: self.0.q, code }
    }

    /// Element with the given power-basis coordinates `(c_0, ..., c_{e-1})`,
    /// each reduced modulo `p`. Missing trailing coordinates are zero.
    pub fn element(&self, coords: &[u64]) -> Result<FqElement> {
        if coords.len() > self.0.e as usize {
            return Err(Error::BadElement(format!("{coords:?}"), self.0.q));
        }
        let mut c = [0; MAX_EXT];
        for (dst, &src) in c.iter_mut().zip(coords) {
            *dst = (src % self.0.p as u64) as u32;
        }
        Ok(self.wrap(self.0.encode(&c)))
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FqElement {
        self.wrap(n.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn from_code(&self, code: u32) -> Result<FqElement> {
        if code < self.0.q {
            Ok(self.wrap(code))
        } else {
            Err(Error::BadElement(code.to_string(), self.0.q))
        }
    }

    pub fn coords(&self, x: FqElement) -> Vec<u32> {
        self.0.decode(x.code)[..self.0.e as usize].to_vec()
    }

    fn check(&self, x: FqElement) -> Result<()> {
        if x.q == self.0.q {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.0.q, x.q))
        }
    }

    pub fn add(&self, x: FqElement, y: FqElement) -> Result<FqElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.wrap(self.add_code(x.code, y.code)))
    }

    pub fn sub(&self, x: FqElement, y: FqElement) -> Result<FqElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.wrap(self.sub_code(x.code, y.code)))
    }

    pub fn mul(&self, x: FqElement, y: FqElement) -> Result<FqElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.wrap(self.mul_code(x.code, y.code)))
    }

    pub fn neg(&self, x: FqElement) -> Result<FqElement> {
        self.check(x)?;
        Ok(self.wrap(self.neg_code(x.code)))
    }

    pub fn inv(&self, x: FqElement) -> Result<FqElement> {
        self.check(x)?;
        self.inv_code(x.code).map(|c| self.wrap(c))
    }

    pub fn pow(&self, x: FqElement, exp: u64) -> Result<FqElement> {
        self.check(x)?;
        Ok(self.wrap(self.pow_code(x.code, exp)))
    }

    /// All `q` elements in code order, starting with zero.
    pub fn elements(&self) -> impl Iterator<Item = FqElement> + '_ {
        (0..self.0.q).map(|c| self.wrap(c))
    }

    // Code-level kernels used by the polynomial layer. Callers guarantee codes < q.

    #[inline]
    pub(crate) fn add_code(&self, x: u32, y: u32) -> u32 {
        let f = &*self.0;
        if f.e == 1 {
            let s = x + y;
            if s >= f.p {
                s - f.p
            } else {
                s
            }
        } else if !f.add_table.is_empty() {
            f.add_table[(x * f.q + y) as usize]
        } else {
            f.add_slow(x, y)
        }
    }

    #[inline]
    pub(crate) fn neg_code(&self, x: u32) -> u32 {
        let f = &*self.0;
        if x == 0 {
            0
        } else if f.e == 1 {
            f.p - x
        } else {
            let mut c = f.decode(x);
            for v in c.iter_mut().take(f.e as usize) {
                *v = (f.p - *v) % f.p;
            }
            f.encode(&c)
        }
    }

    #[inline]
    pub(crate) fn sub_code(&self, x: u32, y: u32) -> u32 {
        self.add_code(x, self.neg_code(y))
    }

    #[inline]
    pub(crate) fn mul_code(&self, x: u32, y: u32) -> u32 {
        let f = &*self.0;
        if f.e == 1 {
            ((x as u64 * y as u64) % f.p as u64) as u32
        } else if !f.mul_table.is_empty() {
            f.mul_table[(x * f.q + y) as usize]
        } else {
            f.mul_slow(x, y)
        }
    }

    pub(crate) fn pow_code(&self, x: u32, mut exp: u64) -> u32 {
        let mut base = x;
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_code(acc, base);
            }
            base = self.mul_code(base, base);
            exp >>= 1;
        }
        acc
    }

    pub(crate) fn inv_code(&self, x: u32) -> Result<u32> {
        if x == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow_code(x, self.0.q as u64 - 2))
    }
}

/// `enumerate_field`: every element of the field in deterministic order.
pub fn enumerate_field(ctx: &FqContext) -> Vec<FqElement> {
    ctx.elements().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_fields() {
        let f2 = make_field(2, 1).unwrap();
        assert_eq!(f2.q(), 2);
        assert!(f2.modulus().is_none());
        let f5 = make_field(5, 1).unwrap();
        let (a, b) = (f5.from_int(3), f5.from_int(4));
        assert_eq!(f5.add(a, b).unwrap(), f5.from_int(2));
        assert_eq!(f2.add(f2.one(), f2.one()).unwrap(), f2.zero());
    }

    #[test]
    fn f4_modulus_and_products() {
        let f4 = make_field(2, 2).unwrap();
        assert_eq!(f4.modulus(), Some(&[1, 1, 1][..]));
        let z = f4.generator().unwrap();
        let z_plus_1 = f4.element(&[1, 1]).unwrap();
        assert_eq!(f4.mul(z, z).unwrap(), z_plus_1);
        assert_eq!(f4.inv(z).unwrap(), z_plus_1);
    }

    #[test]
    fn standard_moduli() {
        assert_eq!(make_field(2, 3).unwrap().modulus(), Some(&[1, 1, 0, 1][..]));
        assert_eq!(make_field(3, 2).unwrap().modulus(), Some(&[1, 0, 1][..]));
    }

    #[test]
    fn inverses() {
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(f5.inv(f5.from_int(2)).unwrap(), f5.from_int(3));
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(f7.inv(f7.from_int(3)).unwrap(), f7.from_int(5));
        assert_eq!(f7.inv(f7.zero()), Err(Error::ZeroInverse));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(make_field(4, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(make_field(3, 0).unwrap_err(), Error::BadExtensionDegree(0));
        assert!(matches!(make_field(2, 17), Err(Error::FieldTooLarge { .. })));
        assert_eq!(field_of_order(6).unwrap_err(), Error::NotPrimePower(6));
    }

    #[test]
    fn mixing_fields_is_an_error() {
        let f4 = make_field(2, 2).unwrap();
        let f5 = make_field(5, 1).unwrap();
        let x = f5.from_int(2);
        assert_eq!(f4.add(f4.one(), x), Err(Error::FieldMismatch(4, 5)));
    }

    #[test]
    fn enumeration_order() {
        let codes = |q| {
            let ctx = field_of_order(q).unwrap();
            enumerate_field(&ctx).iter().map(|x| ctx.coords(*x)).collect::<Vec<_>>()
        };
        assert_eq!(codes(2), vec![vec![0], vec![1]]);
        assert_eq!(codes(3), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(codes(4), vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn slow_path_matches_tables() {
        let ctx = make_field(3, 2).unwrap();
        for x in 0..9 {
            for y in 0..9 {
                assert_eq!(ctx.mul_code(x, y), ctx.0.mul_slow(x, y));
                assert_eq!(ctx.add_code(x, y), ctx.0.add_slow(x, y));
            }
        }
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
