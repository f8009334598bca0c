//! Arithmetic in F_q for q = p^e.
//!
//! Elements are stored by their integer encoding `Σ c_i p^i`, where
//! `(c_0, …, c_{e-1})` are the coordinates in the basis `1, β, …, β^{e-1}`
//! and β is a root of the field modulus. For small fields the operations are
//! served from precomputed Cayley tables; larger fields fall back to
//! schoolbook multiplication followed by reduction.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field cardinality accepted by [`FieldSpec::new`].
pub const DEFAULT_FIELD_LIMIT: u64 = 1 << 16;

/// Fields up to this size get full addition and multiplication tables.
const TABLE_LIMIT: u32 = 256;

/// Integer encoding of an element of some field, in `[0, q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

struct Inner {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus, little-endian, length e + 1.
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

/// A concrete finite field F_{p^e}. Cheap to clone; immutable.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.0.p)
            .field("e", &self.0.e)
            .field("modulus", &self.0.modulus)
            .finish()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldSpecRepr {
    p: u32,
    e: u32,
    modulus: Vec<u32>,
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldSpecRepr {
            p: self.0.p,
            e: self.0.e,
            modulus: self.0.modulus.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FieldSpecRepr::deserialize(d)?;
        if repr.modulus.len() != repr.e as usize + 1 {
            return Err(serde::de::Error::custom("modulus length must be e + 1"));
        }
        FieldSpec::with_modulus(repr.p, &repr.modulus).map_err(serde::de::Error::custom)
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

/// `(p, e)` with `p^e = q`, if q is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
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
    (rest == 1).then_some((p as u32, e))
}

// Dense little-endian polynomials over F_p, used only for modulus handling.

fn fp_trim(mut f: Vec<u32>) -> Vec<u32> {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

/// Remainder of `f` modulo the monic polynomial `g`.
fn fp_rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let p = p as u64;
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let shift = r.len() - dg;
            for (i, &gi) in g[..dg].iter().enumerate() {
                let t = lead * gi as u64 % p;
                r[shift + i] = (r[shift + i] + p - t) % p;
            }
        }
    }
    fp_trim(r.into_iter().map(|c| c as u32).collect())
}

/// Exhaustive irreducibility check: trial division by every monic
/// polynomial of degree `1..=deg/2`.
pub fn is_irreducible_over_prime(f: &[u32], p: u32) -> bool {
    let f = fp_trim(f.to_vec());
    if f.len() < 2 {
        return false;
    }
    let deg = f.len() - 1;
    if deg == 1 {
        return true;
    }
    for dd in 1..=deg / 2 {
        let count = (p as u64).pow(dd as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(dd + 1);
            let mut t = idx;
            for _ in 0..dd {
                g.push((t % p as u64) as u32);
                t /= p as u64;
            }
            g.push(1);
            if fp_rem(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible of degree `e` over F_p, ordered by the
/// integer encoding of its lower coefficients.
pub fn canonical_modulus(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for idx in 0..count {
        let mut f = Vec::with_capacity(e as usize + 1);
        let mut t = idx;
        for _ in 0..e {
            f.push((t % p as u64) as u32);
            t /= p as u64;
        }
        f.push(1);
        if is_irreducible_over_prime(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldSpec {
    /// The field F_{p^e} with its canonical modulus.
    pub fn new(p: u32, e: u32) -> Result<Self> {
        Self::with_limit(p, e, DEFAULT_FIELD_LIMIT)
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    /// Field of size `q`, which must be a prime power.
    pub fn of_order(q: u64) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or(Error::NonPrimeCharacteristic(q))?;
        Self::new(p, e)
    }

    pub fn with_limit(p: u32, e: u32, limit: u64) -> Result<Self> {
        Self::check_params(p, e, limit)?;
        Ok(Self::build(p, e, canonical_modulus(p, e)))
    }

    /// A field with a caller-supplied monic irreducible modulus
    /// (little-endian, length e + 1).
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Self> {
        if modulus.len() < 2 {
            return Err(Error::InvalidModulus("degree must be at least 1".into()));
        }
        let e = (modulus.len() - 1) as u32;
        Self::check_params(p, e, DEFAULT_FIELD_LIMIT)?;
        if modulus.last() != Some(&1) {
            return Err(Error::InvalidModulus("modulus must be monic".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus("coefficient not reduced mod p".into()));
        }
        if !is_irreducible_over_prime(modulus, p) {
            return Err(Error::InvalidModulus(format!("{modulus:?} is reducible over F_{p}")));
        }
        Ok(Self::build(p, e, modulus.to_vec()))
    }

    fn check_params(p: u32, e: u32, limit: u64) -> Result<()> {
        if !is_prime(p as u64) {
            return Err(Error::NonPrimeCharacteristic(p as u64));
        }
        if e == 0 {
            return Err(Error::InvalidArgument("extension degree must be >= 1".into()));
        }
        let q = (p as u128).checked_pow(e).unwrap_or(u128::MAX);
        if q > limit as u128 || q > u32::MAX as u128 {
            return Err(Error::limit("field size", q, limit as u128));
        }
        Ok(())
    }

    fn build(p: u32, e: u32, modulus: Vec<u32>) -> Self {
        let q = p.pow(e);
        let mut inner = Inner {
            p,
            e,
            q,
            modulus,
            tables: None,
        };
        if q <= TABLE_LIMIT {
            let n = q as usize;
            let mut add = vec![0u16; n * n];
            let mut mul = vec![0u16; n * n];
            let mut neg = vec![0u16; n];
            let mut inv = vec![0u16; n];
            for a in 0..q {
                neg[a as usize] = inner.neg_slow(a) as u16;
                for b in 0..q {
                    add[a as usize * n + b as usize] = inner.add_slow(a, b) as u16;
                    let ab = inner.mul_slow(a, b);
                    mul[a as usize * n + b as usize] = ab as u16;
                    if ab == 1 {
                        inv[a as usize] = b as u16;
                    }
                }
            }
            inner.tables = Some(Tables { add, mul, neg, inv });
        }
        FieldSpec(Arc::new(inner))
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.0.e
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Monic modulus `[c_0, …, c_e]`. For prime fields this is `x`.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.0.q).map(Elem)
    }

    /// Checked conversion from an integer encoding.
    pub fn elem(&self, i: u64) -> Result<Elem> {
        if i < self.0.q as u64 {
            Ok(Elem(i as u32))
        } else {
            Err(Error::OutOfRange {
                value: i,
                bound: self.0.q as u64,
            })
        }
    }

    /// Image of an integer under Z → F_p ⊂ F_q.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.0.p as i64) as u32)
    }

    /// True when `a` lies in the prime subfield.
    pub fn in_prime_field(&self, a: Elem) -> bool {
        a.0 < self.0.p
    }

    /// Coordinates of `a` in the basis 1, β, …, β^{e-1}.
    pub fn coords(&self, a: Elem) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.0.e as usize);
        let mut t = a.0;
        for _ in 0..self.0.e {
            out.push(t % self.0.p);
            t /= self.0.p;
        }
        out
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<Elem> {
        if coords.len() != self.0.e as usize {
            return Err(Error::ArityMismatch {
                expected: self.0.e as usize,
                got: coords.len(),
            });
        }
        let mut v = 0u32;
        for &c in coords.iter().rev() {
            if c >= self.0.p {
                return Err(Error::OutOfRange {
                    value: c as u64,
                    bound: self.0.p as u64,
                });
            }
            v = v * self.0.p + c;
        }
        Ok(Elem(v))
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.0.tables {
            Some(t) => Elem(t.add[(a.0 * self.0.q + b.0) as usize] as u32),
            None => Elem(self.0.add_slow(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        match &self.0.tables {
            Some(t) => Elem(t.neg[a.0 as usize] as u32),
            None => Elem(self.0.neg_slow(a.0)),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.0.tables {
            Some(t) => Elem(t.mul[(a.0 * self.0.q + b.0) as usize] as u32),
            None => Elem(self.0.mul_slow(a.0, b.0)),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.0.tables {
            Some(t) => Elem(t.inv[a.0 as usize] as u32),
            None => self.pow(a, self.0.q as u64 - 2),
        })
    }

    /// `a^k` with the convention `0^0 = 1`.
    pub fn pow(&self, a: Elem, mut k: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn sum<I: IntoIterator<Item = Elem>>(&self, it: I) -> Elem {
        it.into_iter().fold(Elem::ZERO, |acc, x| self.add(acc, x))
    }

    /// Wraps an encoding into an owned element. Fails when `i >= q`.
    pub fn decode(&self, i: u64) -> Result<FieldElement> {
        Ok(FieldElement {
            field: self.clone(),
            value: self.elem(i)?,
        })
    }
}

impl Inner {
    fn add_slow(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn neg_slow(&self, a: u32) -> u32 {
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        if self.e == 1 {
            return (a as u64 * b as u64 % p) as u32;
        }
        let e = self.e as usize;
        let digits = |mut x: u32| {
            let mut d = vec![0u64; e];
            for slot in d.iter_mut() {
                *slot = (x % self.p) as u64;
                x /= self.p;
            }
            d
        };
        let (da, db) = (digits(a), digits(b));
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|c| c as u32).collect();
        let rem = fp_rem(&prod, &self.modulus, self.p);
        rem.iter().rev().fold(0u32, |acc, &c| acc * self.p + c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
}

/// An element together with the field it lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    pub field: FieldSpec,
    pub value: Elem,
}

impl FieldElement {
    pub fn encode(&self) -> u64 {
        self.value.0 as u64
    }

    pub fn coords(&self) -> Vec<u32> {
        self.field.coords(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn same_field(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Binary (or unary, for `Neg`, which ignores `b`) field operation.
    pub fn arith(op: ArithOp, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        a.same_field(b)?;
        let f = &a.field;
        let value = match op {
            ArithOp::Add => f.add(a.value, b.value),
            ArithOp::Sub => f.sub(a.value, b.value),
            ArithOp::Mul => f.mul(a.value, b.value),
            ArithOp::Neg => f.neg(a.value),
        };
        Ok(FieldElement {
            field: f.clone(),
            value,
        })
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(FieldElement {
            field: self.field.clone(),
            value: self.field.inv(self.value)?,
        })
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.e() == 1 {
            return write!(f, "{}", self.value.0);
        }
        let terms: Vec<String> = self
            .coords()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "β".to_string(),
                (1, c) => format!("{c}β"),
                (i, 1) => format!("β^{i}"),
                (i, c) => format!("{c}β^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_prime_powers(max: u64) -> Vec<u64> {
        (2..=max).filter(|&q| prime_power(q).is_some()).collect()
    }

    #[test]
    fn create_prime_and_extension_fields() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        assert_eq!(f2.q(), 2);
        assert_eq!(f2.modulus(), &[0, 1]);

        let f4 = FieldSpec::new(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);

        let f9 = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn canonical_modulus_matches_brute_force_scan() {
        // Independent check: a degree-2 or 3 polynomial is irreducible iff it has no root.
        for (p, e) in [(2u32, 2u32), (2, 3), (3, 2), (3, 3), (5, 2), (7, 2)] {
            let got = canonical_modulus(p, e);
            let first = (0..(p as u64).pow(e))
                .map(|idx| {
                    let mut f: Vec<u64> = (0..e).map(|i| idx / (p as u64).pow(i) % p as u64).collect();
                    f.push(1);
                    f
                })
                .find(|f| {
                    (0..p as u64).all(|x| {
                        f.iter().rev().fold(0u64, |acc, &c| (acc * x + c) % p as u64) != 0
                    })
                })
                .unwrap();
            let first: Vec<u32> = first.into_iter().map(|c| c as u32).collect();
            assert_eq!(got, first, "p={p} e={e}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(FieldSpec::new(4, 1), Err(Error::NonPrimeCharacteristic(4))));
        assert!(matches!(FieldSpec::new(2, 17), Err(Error::SizeLimitExceeded { .. })));
        assert!(matches!(FieldSpec::new(2, 0), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            FieldSpec::with_modulus(2, &[1, 0, 1]),
            Err(Error::InvalidModulus(_))
        ));
    }

    #[test]
    fn arithmetic_examples() {
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(f5.mul(Elem(2), Elem(3)), Elem(1));
        assert_eq!(f5.inv(Elem(2)).unwrap(), Elem(3));

        let f4 = FieldSpec::new(2, 2).unwrap();
        let beta = Elem(2);
        assert_eq!(f4.mul(beta, beta), Elem(3)); // β + 1
        assert_eq!(f4.inv(beta).unwrap(), Elem(3));

        let f2 = FieldSpec::prime(2).unwrap();
        assert_eq!(f2.inv(Elem(1)).unwrap(), Elem(1));
        assert!(matches!(f2.inv(Elem(0)), Err(Error::DivisionByZero)));
    }

    #[test]
    fn encode_decode() {
        let f4 = FieldSpec::new(2, 2).unwrap();
        assert_eq!(f4.from_coords(&[1, 1]).unwrap(), Elem(3));
        let f9 = FieldSpec::new(3, 2).unwrap();
        let x = f9.decode(5).unwrap();
        assert_eq!(x.coords(), vec![2, 1]);
        assert_eq!(x.to_string(), "2 + β");
        for i in 0..9 {
            assert_eq!(f9.decode(i).unwrap().encode(), i);
        }
        assert!(matches!(f9.decode(9), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn field_element_mismatch() {
        let a = FieldSpec::prime(3).unwrap().decode(1).unwrap();
        let b = FieldSpec::prime(5).unwrap().decode(1).unwrap();
        assert!(matches!(
            FieldElement::arith(ArithOp::Add, &a, &b),
            Err(Error::FieldMismatch)
        ));
        let n = FieldElement::arith(ArithOp::Neg, &a, &a).unwrap();
        assert!(FieldElement::arith(ArithOp::Add, &a, &n).unwrap().is_zero());
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for q in all_prime_powers(16) {
            let f = FieldSpec::of_order(q).unwrap();
            let els: Vec<Elem> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
                assert_eq!(f.pow(a, q), a, "Frobenius in F_{q}");
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn table_and_slow_paths_agree() {
        let f = FieldSpec::new(3, 3).unwrap();
        for a in 0..27 {
            for b in 0..27 {
                assert_eq!(f.mul(Elem(a), Elem(b)).0, f.0.mul_slow(a, b));
                assert_eq!(f.add(Elem(a), Elem(b)).0, f.0.add_slow(a, b));
            }
        }
        // Beyond the table limit.
        let big = FieldSpec::new(2, 10).unwrap();
        assert!(big.0.tables.is_none());
        for a in (1..1024).step_by(37) {
            let a = Elem(a);
            assert_eq!(big.mul(a, big.inv(a).unwrap()), Elem::ONE);
            assert_eq!(big.pow(a, 1024), a);
        }
    }

    #[test]
    fn independent_constructions_agree() {
        let a = FieldSpec::new(2, 4).unwrap();
        let b = FieldSpec::new(2, 4).unwrap();
        assert_eq!(a, b);
        for x in 0..16 {
            for y in 0..16 {
                assert_eq!(a.mul(Elem(x), Elem(y)), b.mul(Elem(x), Elem(y)));
            }
        }
    }

    #[test]
    fn serde_round_trip() {
        let f = FieldSpec::new(3, 2).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"p":3,"e":2,"modulus":[1,0,1]}"#);
        let back: FieldSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }
}
