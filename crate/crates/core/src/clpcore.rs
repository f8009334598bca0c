//! The weight polynomial μ and the indicator polynomial
//!
//! ```text
//! P(x) = Σ_{a ∈ F_q^m} μ(a) Π_i (1 - (x_i - φ_i(a))^{q-1})
//! ```
//!
//! whose value at b is the μ-weighted number of Φ-preimages of b.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::field::{Elem, FieldSpec};
use crate::phimap::PhiMap;
use crate::polynomial::{power_sum, Monomial, MultiPoly, UniPoly, WeightedDegree};
use crate::space::Space;

/// μ together with the set it was built for.
#[derive(Clone, Debug)]
pub struct MuPolynomial {
    pub mu: MultiPoly,
    /// Sorted ascending by encoding; the first point is v^(1).
    pub target_set: Vec<Vec<Elem>>,
    pub witness_sum: Elem,
}

impl MuPolynomial {
    pub fn degree(&self) -> u32 {
        self.mu.degree().unwrap_or(0)
    }
}

/// Product of affine forms `x_i - v^(j)_i`, one per point after the
/// smallest, where i is the first coordinate at which v^(j) differs from
/// v^(1). Vanishes on every point except v^(1).
pub fn build_mu(field: &FieldSpec, set: &[Vec<Elem>]) -> Result<MuPolynomial> {
    let first = set.first().ok_or(Error::EmptySet)?;
    let m = first.len();
    if let Some(bad) = set.iter().find(|v| v.len() != m) {
        return Err(Error::ArityMismatch {
            expected: m,
            got: bad.len(),
        });
    }
    for v in set {
        for &c in v {
            field.elem(c.0 as u64)?;
        }
    }
    let space = Space::new(field.clone(), m);
    let mut sorted = set.to_vec();
    sorted.sort_by_key(|v| space.encode(v));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoints);
    }

    let v1 = &sorted[0];
    let mut mu = MultiPoly::constant(field, m, Elem::ONE);
    for vj in &sorted[1..] {
        let i = (0..m).find(|&i| vj[i] != v1[i]).expect("points are distinct");
        let ell = MultiPoly::var(field, m, i).add(&MultiPoly::constant(field, m, field.neg(vj[i])))?;
        mu = mu.mul(&ell)?;
    }
    let witness_sum = field.sum(sorted.iter().map(|v| mu.eval(v).expect("arity checked")));
    Ok(MuPolynomial {
        mu,
        target_set: sorted,
        witness_sum,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportMode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionChecks {
    pub p0_nonzero: bool,
    pub support: bool,
    pub support_mode: SupportMode,
    pub degree: bool,
}

#[derive(Clone, Debug)]
pub struct IndicatorPolynomial {
    pub p: MultiPoly,
    pub phi: PhiMap,
    pub mu: MuPolynomial,
    pub d: u32,
    /// `(q-1)(n - m/d) + deg(μ)/d` in 1/d units.
    pub claimed_degree_bound: WeightedDegree,
    pub checks: ConstructionChecks,
}

impl IndicatorPolynomial {
    pub fn degree(&self) -> Option<u32> {
        self.p.degree()
    }

    pub fn p_at_zero(&self) -> Elem {
        self.p.coeff(&Monomial::one(self.p.nvars()))
    }
}

/// `(q-1)(n - m/d) + deg_mu/d`, scaled by d.
pub fn degree_bound(q: u32, n: usize, m: usize, deg_mu: u32, d: u32) -> WeightedDegree {
    let value = (q as u64 - 1) * (n as u64 * d as u64 - m as u64) + deg_mu as u64;
    WeightedDegree::new(value, d)
}

/// Same bound for a real-valued d.
pub fn degree_bound_real(q: u32, n: usize, m: usize, deg_mu: u32, d: f64) -> f64 {
    (q as f64 - 1.0) * (n as f64 - m as f64 / d) + deg_mu as f64 / d
}

/// Coefficients of `1 - (x - c)^{q-1}` for every c ∈ F_q.
fn indicator_factors(field: &FieldSpec) -> Vec<Vec<Elem>> {
    let q = field.q() as usize;
    field
        .elements()
        .map(|c| {
            let lin = UniPoly::new(field.clone(), vec![field.neg(c), Elem::ONE]);
            let mut pw = UniPoly::new(field.clone(), vec![Elem::ONE]);
            for _ in 0..q - 1 {
                pw = pw.mul(&lin).expect("same field");
            }
            let mut out: Vec<Elem> = (0..q).map(|j| field.neg(pw.coeff(j))).collect();
            out[0] = field.add(out[0], Elem::ONE);
            out
        })
        .collect()
}

/// Builds P by literal summation over a ∈ F_q^m and verifies
/// `P(0) ≠ 0`, `supp(P) ⊆ im(Φ)` and the degree bound with scale `d`.
pub fn build_p(phi: &PhiMap, mu: &MuPolynomial, d: u32, limits: &Limits) -> Result<IndicatorPolynomial> {
    let field = phi.field();
    if mu.mu.field() != field {
        return Err(Error::FieldMismatch);
    }
    if mu.mu.nvars() != phi.m() {
        return Err(Error::ArityMismatch {
            expected: phi.m(),
            got: mu.mu.nvars(),
        });
    }
    if d == 0 || (d as u64) < phi.max_deg_phi() as u64 {
        return Err(Error::InvalidArgument(format!(
            "d = {d} is below max deg φ = {}",
            phi.max_deg_phi()
        )));
    }
    let q = field.q() as usize;
    let n = phi.n();
    let codomain = phi.codomain();
    let size = codomain.checked_size("dense P tensor", limits.dense)?;
    let images = phi.eval_all(limits.enumeration)?;
    let mu_vals = mu.mu.eval_all();

    let zero_fibre = field.sum(
        images
            .iter()
            .zip(&mu_vals)
            .filter(|(&img, _)| img == 0)
            .map(|(_, &w)| w),
    );
    if zero_fibre.is_zero() {
        return Err(Error::MuSumZero);
    }

    let factors = indicator_factors(field);
    let dense = images
        .par_iter()
        .zip(mu_vals.par_iter())
        .fold(
            || vec![Elem::ZERO; size],
            |mut acc, (&img, &w)| {
                if w.is_zero() {
                    return acc;
                }
                let coords = codomain.decode(img);
                // Tensor product of the n factors, most significant axis first.
                let mut buf = vec![w];
                for c in coords.iter().rev() {
                    let fac = &factors[c.0 as usize];
                    let mut next = Vec::with_capacity(buf.len() * q);
                    for &b in &buf {
                        for &f in fac {
                            next.push(if b.is_zero() { Elem::ZERO } else { field.mul(b, f) });
                        }
                    }
                    buf = next;
                }
                for (slot, v) in acc.iter_mut().zip(buf) {
                    *slot = field.add(*slot, v);
                }
                acc
            },
        )
        .reduce(
            || vec![Elem::ZERO; size],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = field.add(*x, y);
                }
                a
            },
        );
    let p = MultiPoly::from_dense(field, n, q as u32, &dense);

    let p0 = dense[0];
    let p0_nonzero = !p0.is_zero() && p0 == zero_fibre;

    let image: std::collections::BTreeSet<u64> = images.iter().copied().collect();
    let (support, support_mode) = if codomain.size() <= limits.exhaustive_support as u128 {
        let vals = p.eval_all();
        let ok = vals
            .iter()
            .enumerate()
            .all(|(b, v)| v.is_zero() || image.contains(&(b as u64)));
        (ok, SupportMode::Exhaustive)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
        let total = codomain.size().min(u64::MAX as u128) as u64;
        let mut ok = true;
        let mut drawn = 0;
        let mut attempts = 0usize;
        while drawn < limits.support_samples && attempts < 50 * limits.support_samples {
            attempts += 1;
            let b = rng.gen_range(0..total);
            if image.contains(&b) {
                continue;
            }
            drawn += 1;
            if !p.eval(&codomain.decode(b))?.is_zero() {
                ok = false;
                break;
            }
        }
        (ok, SupportMode::Sampled)
    };

    let claimed = degree_bound(field.q(), n, phi.m(), mu.degree(), d);
    let deg_p = p.degree().unwrap_or(0);
    let degree_ok = WeightedDegree::new(deg_p as u64 * d as u64, d).le(&claimed);

    let ind = IndicatorPolynomial {
        p,
        phi: phi.clone(),
        mu: mu.clone(),
        d,
        claimed_degree_bound: claimed,
        checks: ConstructionChecks {
            p0_nonzero,
            support,
            support_mode,
            degree: degree_ok,
        },
    };
    if !degree_ok {
        return Err(Error::DegreeBoundViolated(format!(
            "deg P = {deg_p} > {claimed}"
        )));
    }
    if !p0_nonzero || !support {
        return Err(Error::VerificationFailed(format!(
            "P(0) nonzero: {p0_nonzero}, support inside image: {support}"
        )));
    }
    Ok(ind)
}

/// Builds Φ, μ for Φ⁻¹(0) and P with `d = min{k, D*_q(k)}`.
pub fn construct(field: &FieldSpec, f: &UniPoly, n: usize, limits: &Limits) -> Result<IndicatorPolynomial> {
    let phi = PhiMap::build(field, f, n)?;
    let mu = build_mu(field, &phi.preimage_zero())?;
    let d = crate::bounds::d_exact(field.q() as u64, phi.k() as u64) as u32;
    build_p(&phi, &mu, d, limits)
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub point: u64,
    pub p_value: u32,
    pub fibre_sum: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub ok: bool,
    pub points_checked: usize,
    pub counterexample: Option<Counterexample>,
}

/// Checks `P(b) = Σ_{a ∈ Φ⁻¹(b)} μ(a)` at every b ∈ F_q^n. The fibre sums
/// are computed from `F(b_a(x))` directly, not from the φ_i.
pub fn pointwise_identity_check(ind: &IndicatorPolynomial, limits: &Limits) -> Result<IdentityReport> {
    let phi = &ind.phi;
    let field = phi.field();
    let codomain = phi.codomain();
    let size = codomain.checked_size("pointwise identity check", limits.dense)?;
    phi.domain().checked_size("pointwise identity check", limits.enumeration)?;

    let mut fibre = vec![Elem::ZERO; size];
    for a in phi.domain().points() {
        let w = ind.mu.mu.eval(&a)?;
        if w.is_zero() {
            continue;
        }
        let mut img = phi.f().compose(&phi.input_poly(&a))?.coeffs().to_vec();
        if img.len() > phi.n() {
            return Err(Error::VerificationFailed("F(b) has degree ≥ n".into()));
        }
        img.resize(phi.n(), Elem::ZERO);
        let b = codomain.encode(&img) as usize;
        fibre[b] = field.add(fibre[b], w);
    }
    let values = ind.p.eval_all();
    let counterexample = values
        .iter()
        .zip(&fibre)
        .enumerate()
        .find(|(_, (v, w))| v != w)
        .map(|(b, (v, w))| Counterexample {
            point: b as u64,
            p_value: v.0,
            fibre_sum: w.0,
        });
    Ok(IdentityReport {
        ok: counterexample.is_none(),
        points_checked: size,
        counterexample,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolicAudit {
    pub q_terms: usize,
    /// Every monomial of Σ_a Q with a-degree < (q-1)m has zero coefficient.
    pub low_monomials_vanish: bool,
    /// The surviving monomials sum to exactly P.
    pub reproduces_p: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeAudit {
    pub d: u32,
    pub deg_mu: u32,
    /// deg* of the summand Q(a, x), in 1/d units.
    pub deg_star_q: WeightedDegree,
    pub deg_star_q_bound: WeightedDegree,
    pub deg_p: u32,
    pub bound: WeightedDegree,
    /// `None` when q^m or the expansion size exceeds the audit limits.
    pub symbolic: Option<SymbolicAudit>,
    pub ok: bool,
}

/// Re-derives the degree bound through the weighted degree of
/// `Q(a, x) = μ(a) Π_i (1 - (x_i - φ_i(a))^{q-1})`.
pub fn degree_audit(ind: &IndicatorPolynomial, d: u32, limits: &Limits) -> Result<DegreeAudit> {
    let phi = &ind.phi;
    if d == 0 || d < phi.max_deg_phi() {
        return Err(Error::InvalidArgument(format!(
            "d = {d} is below max deg φ = {}",
            phi.max_deg_phi()
        )));
    }
    let field = phi.field();
    let (q, m, n) = (field.q(), phi.m(), phi.n());
    let deg_mu = ind.mu.degree();

    // Factor i lives in variables (a_1..a_m, x_i); x_i has index m.
    let a_map: Vec<usize> = (0..m).collect();
    let mut factors = Vec::with_capacity(n);
    let mut deg_star = deg_mu as u64;
    for phi_i in phi.phis() {
        let x = MultiPoly::var(field, m + 1, m);
        let lin = x.sub(&phi_i.embed(m + 1, &a_map)?)?;
        let one = MultiPoly::constant(field, m + 1, Elem::ONE);
        let factor = one.sub(&lin.pow(q - 1))?;
        let w = factor
            .weighted_degree(m, d)?
            .ok_or_else(|| Error::VerificationFailed("indicator factor vanished".into()))?;
        if w.value > d as u64 * (q as u64 - 1) {
            return Err(Error::DegreeBoundViolated(format!(
                "deg* of an indicator factor is {w}, above q - 1"
            )));
        }
        deg_star += w.value;
        factors.push(factor);
    }
    let deg_star_q = WeightedDegree::new(deg_star, d);
    let deg_star_q_bound = WeightedDegree::new(deg_mu as u64 + d as u64 * (q as u64 - 1) * n as u64, d);
    if !deg_star_q.le(&deg_star_q_bound) {
        return Err(Error::DegreeBoundViolated(format!(
            "deg* Q = {deg_star_q} > {deg_star_q_bound}"
        )));
    }

    let symbolic = if (q as u128).pow(m as u32) <= limits.symbolic_audit as u128 {
        symbolic_audit(ind, &factors, limits.symbolic_terms)?
    } else {
        None
    };
    if let Some(s) = &symbolic {
        if !s.low_monomials_vanish || !s.reproduces_p {
            return Err(Error::VerificationFailed(format!("symbolic audit failed: {s:?}")));
        }
    }

    let bound = degree_bound(q, n, m, deg_mu, d);
    let deg_p = ind.p.degree().unwrap_or(0);
    if !WeightedDegree::new(deg_p as u64 * d as u64, d).le(&bound) {
        return Err(Error::DegreeBoundViolated(format!("deg P = {deg_p} > {bound}")));
    }
    Ok(DegreeAudit {
        d,
        deg_mu,
        deg_star_q,
        deg_star_q_bound,
        deg_p,
        bound,
        symbolic,
        ok: true,
    })
}

/// Expands Q in all m + n variables and sums over a ∈ F_q^m monomial by
/// monomial using power sums. Returns `None` if the expansion exceeds
/// `max_terms`.
fn symbolic_audit(
    ind: &IndicatorPolynomial,
    factors: &[MultiPoly],
    max_terms: usize,
) -> Result<Option<SymbolicAudit>> {
    let phi = &ind.phi;
    let field = phi.field();
    let (q, m, n) = (field.q(), phi.m(), phi.n());
    let total = m + n;
    let a_map: Vec<usize> = (0..m).collect();
    let mut qpoly = ind.mu.mu.embed(total, &a_map)?;
    for (i, factor) in factors.iter().enumerate() {
        let mut map = a_map.clone();
        map.push(m + i);
        qpoly = qpoly.mul(&factor.embed(total, &map)?)?;
        if qpoly.len() > max_terms {
            return Ok(None);
        }
    }

    let max_exp = qpoly.max_exponent() as u64;
    let sums: Vec<Elem> = (0..=max_exp).map(|k| power_sum(field, k)).collect();
    let threshold = (q - 1) * m as u32;
    let mut low_vanish = true;
    let mut summed = MultiPoly::zero(field, n);
    for (mono, c) in qpoly.terms() {
        let (a_exps, x_exps) = mono.exps().split_at(m);
        let weight = a_exps
            .iter()
            .fold(Elem::ONE, |acc, &e| field.mul(acc, sums[e as usize]));
        let a_deg: u32 = a_exps.iter().sum();
        if a_deg < threshold {
            if !weight.is_zero() {
                low_vanish = false;
            }
            continue;
        }
        summed.add_term(Monomial(x_exps.to_vec()), field.mul(c, weight));
    }
    Ok(Some(SymbolicAudit {
        q_terms: qpoly.len(),
        low_monomials_vanish: low_vanish,
        reproduces_p: summed == ind.p,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;

    fn fq(q: u64) -> FieldSpec {
        FieldSpec::of_order(q).unwrap()
    }

    fn uni(f: &FieldSpec, c: &[u64]) -> UniPoly {
        UniPoly::from_encodings(f, c).unwrap()
    }

    fn pts(v: &[&[u32]]) -> Vec<Vec<Elem>> {
        v.iter().map(|p| p.iter().map(|&c| Elem(c)).collect()).collect()
    }

    #[test]
    fn mu_examples() {
        let f2 = fq(2);
        let mu = build_mu(&f2, &pts(&[&[0]])).unwrap();
        assert_eq!(mu.mu, MultiPoly::constant(&f2, 1, Elem::ONE));
        assert_eq!(mu.witness_sum, Elem::ONE);

        let mu = build_mu(&f2, &pts(&[&[1], &[0]])).unwrap();
        let want = MultiPoly::from_terms(&f2, 1, [(vec![1], Elem(1)), (vec![0], Elem(1))]).unwrap();
        assert_eq!(mu.mu, want);
        assert_eq!(mu.mu.eval(&[Elem(0)]).unwrap(), Elem(1));
        assert_eq!(mu.mu.eval(&[Elem(1)]).unwrap(), Elem(0));

        let f3 = fq(3);
        let set = pts(&[&[0, 0], &[1, 0], &[0, 1]]);
        let mu = build_mu(&f3, &set).unwrap();
        let l1 = MultiPoly::from_terms(&f3, 2, [(vec![1, 0], Elem(1)), (vec![0, 0], Elem(2))]).unwrap();
        let l2 = MultiPoly::from_terms(&f3, 2, [(vec![0, 1], Elem(1)), (vec![0, 0], Elem(2))]).unwrap();
        assert_eq!(mu.mu, l1.mul(&l2).unwrap());
        let vals: Vec<Elem> = set.iter().map(|v| mu.mu.eval(v).unwrap()).collect();
        assert_eq!(vals, vec![Elem(1), Elem(0), Elem(0)]);
        assert_eq!(mu.witness_sum, Elem(1));
    }

    #[test]
    fn mu_errors() {
        let f2 = fq(2);
        assert!(matches!(build_mu(&f2, &[]), Err(Error::EmptySet)));
        assert!(matches!(
            build_mu(&f2, &pts(&[&[1], &[1]])),
            Err(Error::DuplicatePoints)
        ));
    }

    #[test]
    fn mu_contract_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let q = [2u64, 3, 4][rng.gen_range(0..3)];
            let m = rng.gen_range(1..=3usize);
            let field = fq(q);
            let space = Space::new(field.clone(), m);
            let mut all: Vec<u64> = (0..space.size() as u64).collect();
            all.shuffle(&mut rng);
            let size = rng.gen_range(1..=10usize.min(all.len()));
            let set: Vec<Vec<Elem>> = all[..size].iter().map(|&c| space.decode(c)).collect();
            let mu = build_mu(&field, &set).unwrap();
            assert!((mu.degree() as usize) < size);
            let s = field.sum(set.iter().map(|v| mu.mu.eval(v).unwrap()));
            assert!(!s.is_zero());
            assert_eq!(s, mu.witness_sum);
        }
    }

    #[test]
    fn p_is_one_for_frobenius_on_constants() {
        let f2 = fq(2);
        let phi = PhiMap::build(&f2, &uni(&f2, &[0, 0, 1]), 1).unwrap();
        let mu = build_mu(&f2, &phi.preimage_zero()).unwrap();
        let ind = build_p(&phi, &mu, 2, &Limits::default()).unwrap();
        assert_eq!(ind.p, MultiPoly::constant(&f2, 1, Elem::ONE));
        assert_eq!(ind.claimed_degree_bound, WeightedDegree::new(1, 2));

        let report = pointwise_identity_check(&ind, &Limits::default()).unwrap();
        assert!(report.ok);
        let audit = degree_audit(&ind, 2, &Limits::default()).unwrap();
        assert_eq!(audit.deg_p, 0);
        assert!(audit.deg_star_q.value <= 2);
        assert_eq!(audit.deg_star_q_bound, WeightedDegree::new(2, 2));
        assert!(audit.symbolic.unwrap().reproduces_p);
    }

    #[test]
    fn p_supported_at_zero_when_image_trivial() {
        let f2 = fq(2);
        let phi = PhiMap::build(&f2, &uni(&f2, &[0, 1, 1]), 2).unwrap();
        let mu = build_mu(&f2, &phi.preimage_zero()).unwrap();
        let ind = build_p(&phi, &mu, 2, &Limits::default()).unwrap();
        let vals = ind.p.eval_all();
        assert!(!vals[0].is_zero());
        assert!(vals[1..].iter().all(|v| v.is_zero()));
        assert_eq!(vals[0], mu.witness_sum);
        assert!(pointwise_identity_check(&ind, &Limits::default()).unwrap().ok);
    }

    #[test]
    fn identity_map_gives_constant_p() {
        for q in [2u64, 3, 4] {
            let f = fq(q);
            let phi = PhiMap::build(&f, &uni(&f, &[0, 1]), 3).unwrap();
            let mu = build_mu(&f, &phi.preimage_zero()).unwrap();
            let ind = build_p(&phi, &mu, 1, &Limits::default()).unwrap();
            assert_eq!(ind.claimed_degree_bound.value, 0);
            assert_eq!(ind.p.degree(), Some(0));
            assert!(degree_audit(&ind, 1, &Limits::default()).unwrap().ok);
        }
    }

    #[test]
    fn mu_sum_zero_is_reported() {
        let f2 = fq(2);
        let phi = PhiMap::build(&f2, &uni(&f2, &[0, 1, 1]), 2).unwrap();
        // Constant 1 over both roots sums to 0 in characteristic 2.
        let bad = MuPolynomial {
            mu: MultiPoly::constant(&f2, 1, Elem::ONE),
            target_set: phi.preimage_zero(),
            witness_sum: Elem::ONE,
        };
        assert!(matches!(build_p(&phi, &bad, 2, &Limits::default()), Err(Error::MuSumZero)));
    }

    #[test]
    fn sampled_support_mode() {
        let f2 = fq(2);
        let limits = Limits {
            exhaustive_support: 8,
            ..Limits::default()
        };
        let ind = construct(&f2, &uni(&f2, &[0, 0, 1]), 5, &limits).unwrap();
        assert_eq!(ind.checks.support_mode, SupportMode::Sampled);
        assert!(ind.checks.support);
    }

    #[test]
    fn symbolic_audit_on_small_instances() {
        for (q, c, n) in [(2u64, vec![0u64, 1, 1], 3usize), (3, vec![0, 0, 1], 3), (2, vec![0, 1, 0, 1], 4), (4, vec![0, 2, 1], 2)] {
            let f = fq(q);
            let ind = construct(&f, &uni(&f, &c), n, &Limits::default()).unwrap();
            let audit = degree_audit(&ind, ind.d, &Limits::default()).unwrap();
            let s = audit.symbolic.expect("small instance is expanded");
            assert!(s.low_monomials_vanish && s.reproduces_p, "q={q} F={c:?} n={n}");
        }
    }
}
