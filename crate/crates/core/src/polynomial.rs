//! Univariate and sparse multivariate polynomials over F_q.
//!
//! Multivariate exponents are kept formal: nothing is reduced modulo
//! `x^q - x`, so degrees reported here are degrees of the polynomial as
//! written, not of the function it induces.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, FieldElement, FieldSpec};

/// Dense univariate polynomial, little-endian, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    field: FieldSpec,
    coeffs: Vec<Elem>,
}

impl UniPoly {
    pub fn new(field: FieldSpec, mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    /// From integer encodings; fails on values `>= q`.
    pub fn from_encodings(field: &FieldSpec, coeffs: &[u64]) -> Result<Self> {
        let coeffs = coeffs
            .iter()
            .map(|&c| field.elem(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(UniPoly::new(field.clone(), coeffs))
    }

    pub fn zero(field: &FieldSpec) -> Self {
        UniPoly::new(field.clone(), Vec::new())
    }

    /// `c·x^deg`.
    pub fn monomial(field: &FieldSpec, c: Elem, deg: usize) -> Self {
        let mut coeffs = vec![Elem::ZERO; deg + 1];
        coeffs[deg] = c;
        UniPoly::new(field.clone(), coeffs)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> Option<Elem> {
        self.coeffs.last().copied()
    }

    fn check(&self, other: &UniPoly) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, a: Elem) -> Elem {
        let f = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, &c| f.add(f.mul(acc, a), c))
    }

    pub fn eval_checked(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.field != self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(FieldElement {
            field: self.field.clone(),
            value: self.eval(a.value),
        })
    }

    pub fn add(&self, other: &UniPoly) -> Result<UniPoly> {
        self.check(other)?;
        let f = &self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| f.add(self.coeff(i), other.coeff(i)))
            .collect();
        Ok(UniPoly::new(f.clone(), coeffs))
    }

    pub fn mul(&self, other: &UniPoly) -> Result<UniPoly> {
        self.check(other)?;
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Ok(UniPoly::zero(f));
        }
        let mut out = vec![Elem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Ok(UniPoly::new(f.clone(), out))
    }

    pub fn scale(&self, c: Elem) -> UniPoly {
        let f = &self.field;
        UniPoly::new(f.clone(), self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// `self(h(x))`, by Horner's scheme over polynomials.
    pub fn compose(&self, h: &UniPoly) -> Result<UniPoly> {
        self.check(h)?;
        let mut acc = UniPoly::zero(&self.field);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(h)?.add(&UniPoly::new(self.field.clone(), vec![c]))?;
        }
        Ok(acc)
    }

    /// All roots in F_q, ascending by encoding.
    pub fn roots(&self) -> Vec<Elem> {
        self.field.elements().filter(|&a| self.eval(a).is_zero()).collect()
    }

    /// Comma-separated little-endian encodings, e.g. `0,1,1` for `x + x^2`.
    pub fn to_text(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .map(|c| c.0.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (c.0, i) {
                (c, 0) => write!(f, "{c}")?,
                (1, 1) => write!(f, "b")?,
                (c, 1) => write!(f, "{c}b")?,
                (1, i) => write!(f, "b^{i}")?,
                (c, i) => write!(f, "{c}b^{i}")?,
            }
        }
        Ok(())
    }
}

/// Exponent tuple, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize, exp: u32) -> Self {
        let mut v = vec![0; nvars];
        v[i] = exp;
        Monomial(v)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree with x-variables of weight 1 and a-variables of weight 1/d,
/// stored exactly as an integer count of 1/d units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightedDegree {
    pub value: u64,
    pub d: u32,
}

impl WeightedDegree {
    pub fn new(value: u64, d: u32) -> Self {
        WeightedDegree { value, d }
    }

    pub fn as_f64(&self) -> f64 {
        self.value as f64 / self.d as f64
    }

    /// Compares two weighted degrees on the same scale.
    pub fn le(&self, other: &WeightedDegree) -> bool {
        assert_eq!(self.d, other.d, "weighted degrees on different scales");
        self.value <= other.value
    }
}

impl fmt::Display for WeightedDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.value, self.d)
    }
}

/// Sparse polynomial in `nvars` variables. Never stores a zero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    field: FieldSpec,
    nvars: usize,
    terms: BTreeMap<Monomial, Elem>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exps: Vec<u32>,
    coeff: u32,
}

impl MultiPoly {
    pub fn zero(field: &FieldSpec, nvars: usize) -> Self {
        MultiPoly {
            field: field.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &FieldSpec, nvars: usize, c: Elem) -> Self {
        let mut p = MultiPoly::zero(field, nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    /// The variable `x_i` (0-based).
    pub fn var(field: &FieldSpec, nvars: usize, i: usize) -> Self {
        let mut p = MultiPoly::zero(field, nvars);
        p.add_term(Monomial::var(nvars, i, 1), Elem::ONE);
        p
    }

    pub fn from_terms<I>(field: &FieldSpec, nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Elem)>,
    {
        let mut p = MultiPoly::zero(field, nvars);
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::ArityMismatch {
                    expected: nvars,
                    got: exps.len(),
                });
            }
            p.add_term(Monomial(exps), c);
        }
        Ok(p)
    }

    /// Builds a polynomial from a dense tensor of coefficients indexed by
    /// `Σ α_i·base^i`, each exponent `α_i < base`.
    pub fn from_dense(field: &FieldSpec, nvars: usize, base: u32, dense: &[Elem]) -> Self {
        let mut p = MultiPoly::zero(field, nvars);
        for (idx, &c) in dense.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut exps = Vec::with_capacity(nvars);
            let mut t = idx as u64;
            for _ in 0..nvars {
                exps.push((t % base as u64) as u32);
                t /= base as u64;
            }
            p.terms.insert(Monomial(exps), c);
        }
        p
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Elem)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, m: &Monomial) -> Elem {
        self.terms.get(m).copied().unwrap_or(Elem::ZERO)
    }

    /// Adds `c·m` in place.
    pub fn add_term(&mut self, m: Monomial, c: Elem) {
        if c.is_zero() {
            return;
        }
        let f = &self.field;
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check(&self, other: &MultiPoly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.nvars != other.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> MultiPoly {
        self.scale(self.field.neg(Elem::ONE))
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Elem) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.field, self.nvars);
        if c.is_zero() {
            return out;
        }
        for (m, a) in self.terms() {
            out.terms.insert(m.clone(), self.field.mul(a, c));
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check(other)?;
        let f = &self.field;
        let mut out = MultiPoly::zero(f, self.nvars);
        for (ma, a) in self.terms() {
            for (mb, b) in other.terms() {
                out.add_term(ma.mul(mb), f.mul(a, b));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(&self.field, self.nvars, Elem::ONE);
        for _ in 0..k {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn max_exponent(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, point: &[Elem]) -> Result<Elem> {
        if point.len() != self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let f = &self.field;
        let mut acc = Elem::ZERO;
        for (m, c) in self.terms() {
            let mut t = c;
            for (&x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = f.mul(t, f.pow(x, e as u64));
                }
            }
            acc = f.add(acc, t);
        }
        Ok(acc)
    }

    pub fn eval_checked(&self, point: &[FieldElement]) -> Result<FieldElement> {
        if point.iter().any(|a| a.field != self.field) {
            return Err(Error::FieldMismatch);
        }
        let pts: Vec<Elem> = point.iter().map(|a| a.value).collect();
        Ok(FieldElement {
            field: self.field.clone(),
            value: self.eval(&pts)?,
        })
    }

    /// Values at every point of F_q^nvars, indexed by little-endian point
    /// encoding. Works axis by axis on a dense coefficient tensor, so the
    /// cost is `nvars·q^(nvars+1)` instead of `q^nvars·len()`.
    pub fn eval_all(&self) -> Vec<Elem> {
        let f = &self.field;
        let q = f.q() as usize;
        let size = q.pow(self.nvars as u32);
        let mut data = vec![Elem::ZERO; size];
        for (m, c) in self.terms() {
            // x^e and x^(((e-1) mod (q-1)) + 1) agree as functions on F_q.
            let idx = m.0.iter().rev().fold(0usize, |acc, &e| {
                let r = if e == 0 { 0 } else { (e as usize - 1) % (q - 1) + 1 };
                acc * q + r
            });
            data[idx] = f.add(data[idx], c);
        }
        let vander: Vec<Vec<Elem>> = f
            .elements()
            .map(|x| (0..q).map(|j| f.pow(x, j as u64)).collect())
            .collect();
        let mut stride = 1;
        let mut buf = vec![Elem::ZERO; q];
        for _ in 0..self.nvars {
            for block in (0..size).step_by(stride * q) {
                for offset in 0..stride {
                    let base = block + offset;
                    for (x, row) in vander.iter().enumerate() {
                        let mut s = Elem::ZERO;
                        for (j, &v) in row.iter().enumerate() {
                            let c = data[base + j * stride];
                            if !c.is_zero() {
                                s = f.add(s, f.mul(c, v));
                            }
                        }
                        buf[x] = s;
                    }
                    for (x, &v) in buf.iter().enumerate() {
                        data[base + x * stride] = v;
                    }
                }
            }
            stride *= q;
        }
        data
    }

    /// Weighted degree where variables `0..split` are a-variables (weight
    /// 1/d) and `split..nvars` are x-variables (weight 1), in 1/d units.
    pub fn weighted_degree(&self, split: usize, d: u32) -> Result<Option<WeightedDegree>> {
        if split > self.nvars {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: split,
            });
        }
        if d == 0 {
            return Err(Error::InvalidArgument("weight scale d must be positive".into()));
        }
        Ok(self
            .terms
            .keys()
            .map(|m| {
                let a: u64 = m.0[..split].iter().map(|&e| e as u64).sum();
                let x: u64 = m.0[split..].iter().map(|&e| e as u64).sum();
                d as u64 * x + a
            })
            .max()
            .map(|value| WeightedDegree::new(value, d)))
    }

    /// Renames variables: variable `i` of `self` becomes variable
    /// `map[i]` of a polynomial in `nvars` variables.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Result<MultiPoly> {
        if map.len() != self.nvars || map.iter().any(|&j| j >= nvars) {
            return Err(Error::ArityMismatch {
                expected: self.nvars,
                got: map.len(),
            });
        }
        let mut out = MultiPoly::zero(&self.field, nvars);
        for (m, c) in self.terms() {
            let mut e = vec![0; nvars];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] += x;
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }
}

impl Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = self
            .terms()
            .map(|(m, c)| TermRepr {
                exps: m.0.clone(),
                coeff: c.0,
            })
            .collect();
        terms.serialize(s)
    }
}

impl MultiPoly {
    /// Parses the `[{"exps": [...], "coeff": enc}]` JSON form.
    pub fn from_json(field: &FieldSpec, nvars: usize, json: &str) -> Result<MultiPoly> {
        let terms: Vec<TermRepr> = serde_json::from_str(json)?;
        let mut out = MultiPoly::zero(field, nvars);
        for t in terms {
            if t.exps.len() != nvars {
                return Err(Error::ArityMismatch {
                    expected: nvars,
                    got: t.exps.len(),
                });
            }
            out.add_term(Monomial(t.exps), field.elem(t.coeff as u64)?);
        }
        Ok(out)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            format!("x{}", i + 1)
                        } else {
                            format!("x{}^{}", i + 1, e)
                        }
                    })
                    .collect();
                match (c.0, vars.is_empty()) {
                    (c, true) => c.to_string(),
                    (1, false) => vars.join("*"),
                    (c, false) => format!("{c}*{}", vars.join("*")),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Σ_{x ∈ F_q} x^k` by direct summation, with `0^0 = 1`.
pub fn power_sum(field: &FieldSpec, k: u64) -> Elem {
    field.sum(field.elements().map(|x| field.pow(x, k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::prime_power;
    use proptest::prelude::*;

    fn fq(q: u64) -> FieldSpec {
        FieldSpec::of_order(q).unwrap()
    }

    fn uni(f: &FieldSpec, c: &[u64]) -> UniPoly {
        UniPoly::from_encodings(f, c).unwrap()
    }

    #[test]
    fn uni_eval_examples() {
        let f2 = fq(2);
        assert_eq!(uni(&f2, &[0, 1, 1]).eval(Elem(1)), Elem(0));
        let f3 = fq(3);
        assert_eq!(uni(&f3, &[0, 0, 1]).eval(Elem(2)), Elem(1));
        assert_eq!(UniPoly::zero(&f3).eval(Elem(2)), Elem(0));
        assert_eq!(UniPoly::zero(&f3).degree(), None);
    }

    #[test]
    fn uni_compose_examples() {
        let f2 = fq(2);
        let sq = uni(&f2, &[0, 0, 1]);
        assert_eq!(sq.compose(&uni(&f2, &[1, 1])).unwrap(), uni(&f2, &[1, 0, 1]));
        let g = uni(&f2, &[0, 1, 1]);
        assert_eq!(g.compose(&uni(&f2, &[0, 1])).unwrap(), g);
        assert!(sq.compose(&UniPoly::zero(&f2)).unwrap().is_zero());
        let f3 = fq(3);
        assert!(matches!(sq.compose(&uni(&f3, &[1])), Err(Error::FieldMismatch)));
    }

    #[test]
    fn uni_compose_respects_evaluation() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let f = fq(q);
            let outer = uni(&f, &[0, 1, q - 1, 1]);
            let inner = uni(&f, &[1, q - 1, 0, 1]);
            let comp = outer.compose(&inner).unwrap();
            assert_eq!(comp.degree(), Some(9));
            for a in f.elements() {
                assert_eq!(comp.eval(a), outer.eval(inner.eval(a)));
            }
        }
    }

    #[test]
    fn multi_arith_examples() {
        let f2 = fq(2);
        let x = MultiPoly::var(&f2, 1, 0);
        let one = MultiPoly::constant(&f2, 1, Elem::ONE);
        let s = x.add(&one).unwrap();
        let sq = s.mul(&s).unwrap();
        let expect = MultiPoly::from_terms(&f2, 1, [(vec![2], Elem(1)), (vec![0], Elem(1))]).unwrap();
        assert_eq!(sq, expect);
        assert!(s.add(&s.neg()).unwrap().is_zero());

        let f3 = fq(3);
        let x = MultiPoly::var(&f3, 1, 0);
        let one = MultiPoly::constant(&f3, 1, Elem::ONE);
        let got = one.sub(&x).unwrap().pow(2);
        let expect = MultiPoly::from_terms(
            &f3,
            1,
            [(vec![2], Elem(1)), (vec![1], Elem(1)), (vec![0], Elem(1))],
        )
        .unwrap();
        assert_eq!(got, expect);

        let y = MultiPoly::var(&f3, 2, 0);
        assert!(matches!(x.add(&y), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn multi_eval_examples() {
        let f2 = fq(2);
        let one = MultiPoly::constant(&f2, 2, Elem::ONE);
        assert_eq!(one.eval(&[Elem(1), Elem(0)]).unwrap(), Elem(1));
        let x1x2 = MultiPoly::from_terms(&f2, 2, [(vec![1, 1], Elem(1))]).unwrap();
        assert_eq!(x1x2.eval(&[Elem(1), Elem(0)]).unwrap(), Elem(0));
        let f3 = fq(3);
        let g = MultiPoly::from_terms(&f3, 2, [(vec![2, 0], Elem(1)), (vec![0, 1], Elem(1))]).unwrap();
        assert_eq!(g.eval(&[Elem(2), Elem(2)]).unwrap(), Elem(0));
        assert!(matches!(g.eval(&[Elem(1)]), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn weighted_degree_examples() {
        let f = fq(3);
        // variables: a_1 (index 0), x_1 (index 1)
        let t = MultiPoly::from_terms(&f, 2, [(vec![3, 2], Elem(1))]).unwrap();
        assert_eq!(t.weighted_degree(1, 2).unwrap(), Some(WeightedDegree::new(7, 2)));
        let pure = MultiPoly::from_terms(&f, 2, [(vec![0, 2], Elem(1)), (vec![0, 1], Elem(2))]).unwrap();
        assert_eq!(pure.weighted_degree(0, 1).unwrap().unwrap().value, 2);
        // x_1 − φ(a) with deg φ = 2 = d has deg* 1.
        let lin = MultiPoly::from_terms(&f, 2, [(vec![0, 1], Elem(1)), (vec![2, 0], Elem(2))]).unwrap();
        assert_eq!(lin.weighted_degree(1, 2).unwrap().unwrap().value, 2);
        assert!(MultiPoly::zero(&f, 2).weighted_degree(1, 2).unwrap().is_none());
    }

    #[test]
    fn power_sum_examples() {
        assert_eq!(power_sum(&fq(3), 1), Elem(0));
        assert_eq!(power_sum(&fq(4), 2), Elem(0));
        assert_eq!(power_sum(&fq(3), 2), Elem(2));
    }

    #[test]
    fn power_sums_vanish_below_q_minus_one() {
        for q in (2..=16u64).filter(|&q| prime_power(q).is_some()) {
            let f = fq(q);
            let minus_one = f.neg(Elem::ONE);
            for k in 0..3 * q {
                let s = power_sum(&f, k);
                if k < q - 1 || (k > 0 && k % (q - 1) != 0) {
                    assert!(s.is_zero(), "q={q} k={k}");
                } else if k > 0 {
                    assert_eq!(s, minus_one, "q={q} k={k}");
                }
            }
        }
    }

    #[test]
    fn eval_all_matches_pointwise() {
        let f = fq(4);
        let p = MultiPoly::from_terms(
            &f,
            3,
            [
                (vec![0, 0, 0], Elem(3)),
                (vec![5, 1, 0], Elem(2)),
                (vec![1, 3, 2], Elem(1)),
                (vec![0, 0, 4], Elem(1)),
            ],
        )
        .unwrap();
        let all = p.eval_all();
        let space = crate::space::Space::new(f.clone(), 3);
        for (code, v) in all.iter().enumerate() {
            assert_eq!(p.eval(&space.decode(code as u64)).unwrap(), *v);
        }
    }

    #[test]
    fn json_round_trip() {
        let f = fq(3);
        let p = MultiPoly::from_terms(&f, 2, [(vec![1, 0], Elem(2)), (vec![0, 0], Elem(1))]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[{"exps":[0,0],"coeff":1},{"exps":[1,0],"coeff":2}]"#);
        assert_eq!(MultiPoly::from_json(&f, 2, &s).unwrap(), p);
    }

    fn arb_poly(q: u32, nvars: usize) -> impl Strategy<Value = Vec<(Vec<u32>, u32)>> {
        prop::collection::vec(
            (prop::collection::vec(0u32..4, nvars), 1u32..q),
            0..6,
        )
    }

    proptest! {
        #[test]
        fn ring_laws_by_evaluation(
            qi in 0usize..3,
            a in arb_poly(16, 3), b in arb_poly(16, 3), c in arb_poly(16, 3),
        ) {
            let q = [2u64, 3, 4][qi];
            let f = fq(q);
            let mk = |t: &Vec<(Vec<u32>, u32)>| MultiPoly::from_terms(
                &f, 3, t.iter().map(|(e, c)| (e.clone(), Elem(*c % q as u32)))).unwrap();
            let (a, b, c) = (mk(&a), mk(&b), mk(&c));
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(&lhs, &rhs);
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            let ab = a.mul(&b).unwrap().eval_all();
            let (ea, eb) = (a.eval_all(), b.eval_all());
            for i in 0..ab.len() {
                prop_assert_eq!(ab[i], f.mul(ea[i], eb[i]));
            }
            // weighted degree is additive on nonzero products
            if !a.is_zero() && !b.is_zero() {
                let w = |p: &MultiPoly| p.weighted_degree(1, 3).unwrap().unwrap().value;
                prop_assert_eq!(w(&a.mul(&b).unwrap()), w(&a) + w(&b));
            }
        }
    }
}
