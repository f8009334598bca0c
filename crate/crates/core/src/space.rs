//! The coordinate space F_q^dim with a little-endian integer encoding of
//! points: `(c_0, …, c_{dim-1}) ↦ Σ enc(c_i)·q^i`.

use crate::error::{Error, Result};
use crate::field::{Elem, FieldSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Space {
    field: FieldSpec,
    dim: usize,
}

impl Space {
    pub fn new(field: FieldSpec, dim: usize) -> Self {
        Space { field, dim }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `q^dim`, saturating.
    pub fn size(&self) -> u128 {
        (self.field.q() as u128).saturating_pow(self.dim as u32)
    }

    /// `q^dim` as a usize, or `SizeLimitExceeded` if it is above `limit`.
    pub fn checked_size(&self, what: &'static str, limit: u64) -> Result<usize> {
        let size = self.size();
        if size > limit as u128 {
            return Err(Error::limit(what, size, limit as u128));
        }
        Ok(size as usize)
    }

    pub fn encode(&self, point: &[Elem]) -> u64 {
        let q = self.field.q() as u64;
        point.iter().rev().fold(0u64, |acc, c| acc * q + c.0 as u64)
    }

    pub fn decode(&self, mut code: u64) -> Vec<Elem> {
        let q = self.field.q() as u64;
        let mut out = Vec::with_capacity(self.dim);
        for _ in 0..self.dim {
            out.push(Elem((code % q) as u32));
            code /= q;
        }
        out
    }

    pub fn contains(&self, code: u64) -> bool {
        (code as u128) < self.size()
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let (pa, pb) = (self.decode(a), self.decode(b));
        let diff: Vec<Elem> = pa
            .iter()
            .zip(&pb)
            .map(|(&x, &y)| self.field.sub(x, y))
            .collect();
        self.encode(&diff)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (pa, pb) = (self.decode(a), self.decode(b));
        let sum: Vec<Elem> = pa
            .iter()
            .zip(&pb)
            .map(|(&x, &y)| self.field.add(x, y))
            .collect();
        self.encode(&sum)
    }

    pub fn neg(&self, a: u64) -> u64 {
        let p: Vec<Elem> = self.decode(a).into_iter().map(|x| self.field.neg(x)).collect();
        self.encode(&p)
    }

    /// All points in ascending encoding order.
    pub fn points(&self) -> impl Iterator<Item = Vec<Elem>> + '_ {
        let size = self.size().min(u64::MAX as u128) as u64;
        (0..size).map(move |c| self.decode(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_is_little_endian() {
        let s = Space::new(FieldSpec::prime(2).unwrap(), 2);
        // x ↦ (0, 1) ↦ 2
        assert_eq!(s.encode(&[Elem(0), Elem(1)]), 2);
        assert_eq!(s.decode(2), vec![Elem(0), Elem(1)]);
        assert_eq!(s.size(), 4);
    }

    #[test]
    fn group_operations() {
        let s = Space::new(FieldSpec::prime(3).unwrap(), 2);
        for a in 0..9 {
            assert_eq!(s.add(a, s.neg(a)), 0);
            for b in 0..9 {
                assert_eq!(s.add(s.sub(a, b), b), a);
            }
        }
    }
}
