//! The substitution map Φ: F_q^m → F_q^n sending the coefficient vector of
//! `b(x) = c_0 + c_1 x + … + c_{m-1} x^{m-1}` to the coefficient vector of
//! `F(b(x))`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elem, FieldSpec};
use crate::polynomial::{MultiPoly, UniPoly};
use crate::space::Space;

/// Sum of the base-q digits of `t`.
pub fn digit_sum(mut t: u64, q: u64) -> u64 {
    let mut s = 0;
    while t > 0 {
        s += t % q;
        t /= q;
    }
    s
}

/// `max_{1 ≤ t ≤ k} D_q(t)` by direct scan.
pub fn digit_sum_max(q: u64, k: u64) -> u64 {
    (1..=k).map(|t| digit_sum(t, q)).max().unwrap_or(0)
}

/// Checks that F is nonconstant with zero constant term; returns its degree.
pub fn validate_f(f: &UniPoly) -> Result<usize> {
    if !f.coeff(0).is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    match f.degree() {
        Some(k) if k >= 1 => Ok(k),
        _ => Err(Error::ZeroPolynomial),
    }
}

/// Polynomial in x whose coefficients are polynomials in the c-variables.
type XPoly = Vec<MultiPoly>;

fn xpoly_mul(a: &XPoly, b: &XPoly, field: &FieldSpec, nvars: usize) -> XPoly {
    let mut out = vec![MultiPoly::zero(field, nvars); a.len() + b.len() - 1];
    for (i, pa) in a.iter().enumerate() {
        if pa.is_zero() {
            continue;
        }
        for (j, pb) in b.iter().enumerate() {
            if pb.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&pa.mul(pb).expect("same ring")).expect("same ring");
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct PhiMap {
    field: FieldSpec,
    f: UniPoly,
    k: usize,
    n: usize,
    m: usize,
    phis: Vec<MultiPoly>,
}

impl PhiMap {
    /// Expands `F(c_0 + c_1 x + … + c_{m-1} x^{m-1})` symbolically.
    ///
    /// Each power `h^t` is formed through the base-q digits of t as
    /// `Π_j (Σ_i c_i x^{i q^j})^{t_j}`, which agrees with `h^t` on every
    /// point of F_q^m and has c-degree `D_q(t)`.
    pub fn build(field: &FieldSpec, f: &UniPoly, n: usize) -> Result<PhiMap> {
        if f.field() != field {
            return Err(Error::FieldMismatch);
        }
        let k = validate_f(f)?;
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let m = (n - 1) / k + 1;
        let q = field.q() as usize;
        let zero = MultiPoly::zero(field, m);
        let mut phis = vec![zero.clone(); n];

        for t in 1..=k {
            let ft = f.coeff(t);
            if ft.is_zero() {
                continue;
            }
            let mut power: XPoly = vec![MultiPoly::constant(field, m, Elem::ONE)];
            let (mut rest, mut place) = (t, 1usize);
            while rest > 0 {
                let digit = rest % q;
                if digit > 0 {
                    let mut g = vec![zero.clone(); (m - 1) * place + 1];
                    for (i, slot) in g.iter_mut().step_by(place).enumerate() {
                        *slot = MultiPoly::var(field, m, i);
                    }
                    for _ in 0..digit {
                        power = xpoly_mul(&power, &g, field, m);
                    }
                }
                rest /= q;
                place *= q;
            }
            debug_assert!(power.len() <= n, "deg F(b) ≤ k(m-1) ≤ n-1");
            for (i, c) in power.iter().enumerate() {
                phis[i] = phis[i].add(&c.scale(ft))?;
            }
        }

        Ok(PhiMap {
            field: field.clone(),
            f: f.clone(),
            k,
            n,
            m,
            phis,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn f(&self) -> &UniPoly {
        &self.f
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn phis(&self) -> &[MultiPoly] {
        &self.phis
    }

    pub fn domain(&self) -> Space {
        Space::new(self.field.clone(), self.m)
    }

    pub fn codomain(&self) -> Space {
        Space::new(self.field.clone(), self.n)
    }

    pub fn max_deg_phi(&self) -> u32 {
        self.phis.iter().filter_map(MultiPoly::degree).max().unwrap_or(0)
    }

    /// The polynomial `c_0 + c_1 x + …` for a point of F_q^m.
    pub fn input_poly(&self, a: &[Elem]) -> UniPoly {
        UniPoly::new(self.field.clone(), a.to_vec())
    }

    /// Φ(a) by evaluating each coordinate polynomial.
    pub fn eval(&self, a: &[Elem]) -> Result<Vec<Elem>> {
        self.phis.iter().map(|p| p.eval(a)).collect()
    }

    /// Φ(a) for every a ∈ F_q^m, as codomain encodings indexed by the
    /// domain encoding of a.
    pub fn eval_all(&self, limit: u64) -> Result<Vec<u64>> {
        let size = self.domain().checked_size("enumeration of F_q^m", limit)?;
        let q = self.field.q() as u64;
        let mut out = vec![0u64; size];
        for phi in self.phis.iter().rev() {
            let vals = phi.eval_all();
            for (slot, v) in out.iter_mut().zip(vals) {
                *slot = *slot * q + v.0 as u64;
            }
        }
        Ok(out)
    }

    /// Φ⁻¹(0) = {(r, 0, …, 0) : F(r) = 0}, ascending by encoding.
    pub fn preimage_zero(&self) -> Vec<Vec<Elem>> {
        self.f
            .roots()
            .into_iter()
            .map(|r| {
                let mut v = vec![Elem::ZERO; self.m];
                v[0] = r;
                v
            })
            .collect()
    }

    /// Φ⁻¹(0) by exhaustive evaluation over F_q^m.
    pub fn preimage_zero_exhaustive(&self, limit: u64) -> Result<Vec<Vec<Elem>>> {
        let dom = self.domain();
        Ok(self
            .eval_all(limit)?
            .into_iter()
            .enumerate()
            .filter(|&(_, v)| v == 0)
            .map(|(a, _)| dom.decode(a as u64))
            .collect())
    }

    /// im(Φ) as a set of codomain encodings.
    pub fn image(&self, limit: u64) -> Result<BTreeSet<u64>> {
        Ok(self.eval_all(limit)?.into_iter().collect())
    }

    /// For every monic b of degree m, checks `deg F(b) ≥ n`, i.e. inputs
    /// outside the domain of Φ never produce a difference of two
    /// polynomials of degree < n. Enumerates q^m inputs.
    pub fn domain_restriction_holds(&self, limit: u64) -> Result<bool> {
        let dom = self.domain();
        dom.checked_size("enumeration of monic inputs", limit)?;
        for a in dom.points() {
            let mut coeffs = a;
            coeffs.push(Elem::ONE);
            let fb = self.f.compose(&UniPoly::new(self.field.clone(), coeffs))?;
            if fb.degree().is_none_or(|d| d < self.n) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn report(&self) -> PhiReport {
        PhiReport {
            m: self.m,
            phis: self.phis.clone(),
            preimage_zero: self
                .preimage_zero()
                .into_iter()
                .map(|v| v.into_iter().map(|e| e.0).collect())
                .collect(),
            max_deg_phi: self.max_deg_phi(),
        }
    }
}

/// JSON shape emitted by the `phi` subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct PhiReport {
    pub m: usize,
    pub phis: Vec<MultiPoly>,
    pub preimage_zero: Vec<Vec<u32>>,
    pub max_deg_phi: u32,
}
