//! Rank certificates for difference matrices `M_{uv} = P(u - v)`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::field::{Elem, FieldSpec};
use crate::polynomial::{Monomial, MultiPoly};
use crate::space::Space;

/// Coefficients of `(1 + x + … + x^{q-1})^n`, exactly.
pub fn digit_count_coefficients(n: usize, q: u64) -> Vec<BigUint> {
    let mut coeffs = vec![BigUint::from(1u32)];
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); coeffs.len() + q as usize - 1];
        // Sliding window sum of width q.
        let mut window = BigUint::zero();
        for (i, slot) in next.iter_mut().enumerate() {
            if i < coeffs.len() {
                window += &coeffs[i];
            }
            if i >= q as usize && (i - q as usize) < coeffs.len() {
                window -= &coeffs[i - q as usize];
            }
            *slot = window.clone();
        }
        coeffs = next;
    }
    coeffs
}

/// `|{α ∈ {0, …, q-1}^n : Σ α_i ≤ bound}|` for a rational bound.
pub fn count_monomials(n: usize, q: u64, bound: Ratio<i64>) -> BigUint {
    if bound < Ratio::from_integer(0) {
        return BigUint::zero();
    }
    let floor = bound.floor().to_integer() as usize;
    digit_count_coefficients(n, q)
        .into_iter()
        .take(floor + 1)
        .sum()
}

/// Dense row-major matrix over F_q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn new(field: &FieldSpec, rows: usize, cols: usize, data: Vec<Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ArityMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn identity(field: &FieldSpec, size: usize) -> Self {
        let mut data = vec![Elem::ZERO; size * size];
        for i in 0..size {
            data[i * size + i] = Elem::ONE;
        }
        Matrix {
            field: field.clone(),
            rows: size,
            cols: size,
            data,
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::ArityMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let f = &self.field;
        let mut data = vec![Elem::ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let slot = &mut data[i * other.cols + j];
                    *slot = f.add(*slot, f.mul(a, other.get(l, j)));
                }
            }
        }
        Matrix::new(f, self.rows, other.cols, data)
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Matrix {
            field: self.field.clone(),
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Exact rank by Gaussian elimination; the pivot is the first nonzero
    /// entry in the current column.
    pub fn rank(&self) -> usize {
        let f = &self.field;
        let mut a = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(piv) = (rank..rows).find(|&r| !a[r * cols + col].is_zero()) else {
                continue;
            };
            if piv != rank {
                for j in 0..cols {
                    a.swap(piv * cols + j, rank * cols + j);
                }
            }
            let inv = f.inv(a[rank * cols + col]).expect("pivot is nonzero");
            for j in col..cols {
                a[rank * cols + j] = f.mul(a[rank * cols + j], inv);
            }
            let pivot_row: Vec<Elem> = a[rank * cols..(rank + 1) * cols].to_vec();
            for r in rank + 1..rows {
                let factor = a[r * cols + col];
                if factor.is_zero() {
                    continue;
                }
                for j in col..cols {
                    let t = f.mul(factor, pivot_row[j]);
                    a[r * cols + j] = f.sub(a[r * cols + j], t);
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Values of P at every point of F_q^n when that table is affordable.
fn value_table(p: &MultiPoly, limits: &Limits) -> Option<Vec<Elem>> {
    let space = Space::new(p.field().clone(), p.nvars());
    (space.size() <= limits.dense as u128).then(|| p.eval_all())
}

/// `M[i][j] = P(points[i] - points[j])`, points given by encoding.
pub fn build_diff_matrix(p: &MultiPoly, points: &[u64], limits: &Limits) -> Result<Matrix> {
    let space = Space::new(p.field().clone(), p.nvars());
    let size = points.len();
    if size as u64 > limits.matrix_dim {
        return Err(Error::limit("difference matrix", size as u128, limits.matrix_dim as u128));
    }
    if let Some(&bad) = points.iter().find(|&&c| !space.contains(c)) {
        return Err(Error::ElementOutOfRange(bad));
    }
    if points.iter().collect::<BTreeSet<_>>().len() != size {
        return Err(Error::DuplicatePoints);
    }
    let table = value_table(p, limits);
    let rows: Vec<Vec<Elem>> = points
        .par_iter()
        .map(|&u| {
            points
                .iter()
                .map(|&v| {
                    let diff = space.sub(u, v);
                    match &table {
                        Some(t) => Ok(t[diff as usize]),
                        None => p.eval(&space.decode(diff)),
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Matrix::new(p.field(), size, size, rows.concat())
}

/// One side of the decomposition `P(u - v) = Σ_h h(u) Q_h(v) + Σ_h R_h(u) h(v)`.
#[derive(Clone, Debug)]
pub struct SplitFamily {
    /// `(h, cofactor)`; h is a monomial in n variables.
    pub members: Vec<(Monomial, MultiPoly)>,
}

#[derive(Clone, Debug)]
pub struct HalfDegreeSplit {
    pub deg_p: u32,
    /// Monomials with u-degree ≤ deg P / 2, grouped by their u-part h.
    pub u_side: SplitFamily,
    /// Remaining monomials, grouped by their v-part h.
    pub v_side: SplitFamily,
    /// Exhaustive reconstruction result, if q^(2n) was within limits.
    pub verified: Option<bool>,
}

impl HalfDegreeSplit {
    pub fn distinct_h(&self) -> usize {
        self.u_side.members.len() + self.v_side.members.len()
    }
}

fn binomial_row_mod(n: u32, p: u32) -> Vec<u32> {
    let mut row = vec![1u32];
    for _ in 0..n {
        let mut next = vec![1u32; row.len() + 1];
        for j in 1..row.len() {
            next[j] = (row[j - 1] + row[j]) % p;
        }
        row = next;
    }
    row
}

/// Expands P(u - v) and routes each monomial `u^a v^b` to the u-side when
/// `Σa ≤ deg P / 2`, otherwise to the v-side (then `Σb ≤ deg P / 2`).
pub fn half_degree_split(p: &MultiPoly, limits: &Limits) -> Result<HalfDegreeSplit> {
    let field = p.field();
    let n = p.nvars();
    let deg_p = p.degree().unwrap_or(0);
    let minus_one = field.neg(Elem::ONE);

    let mut u_side: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
    let mut v_side: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
    for (mono, c) in p.terms() {
        // Per coordinate: list of (j, coefficient of u^j v^(α-j)).
        let per_coord: Vec<Vec<(u32, Elem)>> = mono
            .exps()
            .iter()
            .map(|&alpha| {
                let row = binomial_row_mod(alpha, field.p());
                (0..=alpha)
                    .map(|j| {
                        let sign = field.pow(minus_one, (alpha - j) as u64);
                        (j, field.mul(field.from_int(row[j as usize] as i64), sign))
                    })
                    .filter(|(_, c)| !c.is_zero())
                    .collect()
            })
            .collect();
        let mut idx = vec![0usize; n];
        'outer: loop {
            let mut coeff = c;
            let mut a = Vec::with_capacity(n);
            let mut b = Vec::with_capacity(n);
            for i in 0..n {
                let (j, w) = per_coord[i][idx[i]];
                coeff = field.mul(coeff, w);
                a.push(j);
                b.push(mono.exps()[i] - j);
            }
            let a_deg: u32 = a.iter().sum();
            if 2 * a_deg <= deg_p {
                u_side
                    .entry(Monomial(a))
                    .or_insert_with(|| MultiPoly::zero(field, n))
                    .add_term(Monomial(b), coeff);
            } else {
                v_side
                    .entry(Monomial(b))
                    .or_insert_with(|| MultiPoly::zero(field, n))
                    .add_term(Monomial(a), coeff);
            }
            for i in 0..n {
                idx[i] += 1;
                if idx[i] < per_coord[i].len() {
                    continue 'outer;
                }
                idx[i] = 0;
            }
            break;
        }
    }
    let clean = |m: BTreeMap<Monomial, MultiPoly>| SplitFamily {
        members: m.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
    };
    let mut split = HalfDegreeSplit {
        deg_p,
        u_side: clean(u_side),
        v_side: clean(v_side),
        verified: None,
    };

    let space = Space::new(field.clone(), n);
    if space.size().saturating_mul(space.size()) <= limits.split_check as u128 {
        let size = space.size() as usize;
        let p_vals = p.eval_all();
        let mono_vals = |h: &Monomial| {
            MultiPoly::from_terms(field, n, [(h.exps().to_vec(), Elem::ONE)])
                .expect("arity")
                .eval_all()
        };
        let mut recon = vec![Elem::ZERO; size * size];
        for (h, qh) in &split.u_side.members {
            let (hv, qv) = (mono_vals(h), qh.eval_all());
            for u in 0..size {
                for v in 0..size {
                    recon[u * size + v] = field.add(recon[u * size + v], field.mul(hv[u], qv[v]));
                }
            }
        }
        for (h, rh) in &split.v_side.members {
            let (hv, rv) = (mono_vals(h), rh.eval_all());
            for u in 0..size {
                for v in 0..size {
                    recon[u * size + v] = field.add(recon[u * size + v], field.mul(rv[u], hv[v]));
                }
            }
        }
        let ok = (0..size).all(|u| {
            (0..size).all(|v| recon[u * size + v] == p_vals[space.sub(u as u64, v as u64) as usize])
        });
        split.verified = Some(ok);
    }
    Ok(split)
}

/// Factor matrices `(U, V)` with `M = U Vᵀ` on the given points: one column
/// per member of either family.
pub fn decomposition_factors(split: &HalfDegreeSplit, p: &MultiPoly, points: &[u64]) -> Result<(Matrix, Matrix)> {
    let field = p.field();
    let n = p.nvars();
    let space = Space::new(field.clone(), n);
    let decoded: Vec<Vec<Elem>> = points.iter().map(|&c| space.decode(c)).collect();
    let monomial = |h: &Monomial| MultiPoly::from_terms(field, n, [(h.exps().to_vec(), Elem::ONE)]);
    let mut cols_u: Vec<MultiPoly> = Vec::new();
    let mut cols_v: Vec<MultiPoly> = Vec::new();
    for (h, qh) in &split.u_side.members {
        cols_u.push(monomial(h)?);
        cols_v.push(qh.clone());
    }
    for (h, rh) in &split.v_side.members {
        cols_u.push(rh.clone());
        cols_v.push(monomial(h)?);
    }
    let build = |cols: &[MultiPoly]| -> Result<Matrix> {
        let mut data = Vec::with_capacity(points.len() * cols.len());
        for pt in &decoded {
            for c in cols {
                data.push(c.eval(pt)?);
            }
        }
        Matrix::new(field, points.len(), cols.len(), data)
    };
    Ok((build(&cols_u)?, build(&cols_v)?))
}

fn ser_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RankCertificate {
    #[serde(skip)]
    pub points: Vec<u64>,
    pub size: usize,
    pub deg_p: u32,
    pub rank: usize,
    #[serde(rename = "T", serialize_with = "ser_big")]
    pub t: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub bound: BigUint,
    /// M is diagonal with every diagonal entry nonzero.
    pub diagonal: bool,
    pub pass: bool,
}

/// Builds M on `points`, computes its rank and checks
/// `rank ≤ 2·|{α : Σα ≤ deg P / 2}|`.
pub fn certify(p: &MultiPoly, points: &[u64], limits: &Limits) -> Result<RankCertificate> {
    let m = build_diff_matrix(p, points, limits)?;
    let rank = m.rank();
    let deg_p = p.degree().unwrap_or(0);
    let t = count_monomials(p.nvars(), p.field().q() as u64, Ratio::new(deg_p as i64, 2));
    let bound = &t * 2u32;
    let diagonal = m.is_diagonal() && (0..m.rows()).all(|i| !m.get(i, i).is_zero());
    if BigUint::from(rank) > bound {
        return Err(Error::RankBoundViolated {
            rank,
            bound: bound.to_string(),
        });
    }
    Ok(RankCertificate {
        points: points.to_vec(),
        size: points.len(),
        deg_p,
        rank,
        t,
        bound,
        diagonal,
        pass: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fq(q: u64) -> FieldSpec {
        FieldSpec::of_order(q).unwrap()
    }

    fn brute_count(n: usize, q: u64, max: i64) -> u64 {
        (0..q.pow(n as u32))
            .filter(|&c| {
                let mut t = c;
                let mut s = 0;
                for _ in 0..n {
                    s += (t % q) as i64;
                    t /= q;
                }
                s <= max
            })
            .count() as u64
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_monomials(2, 2, Ratio::from_integer(1)), BigUint::from(3u32));
        assert_eq!(count_monomials(2, 3, Ratio::from_integer(2)), BigUint::from(6u32));
        assert_eq!(count_monomials(5, 3, Ratio::from_integer(10)), BigUint::from(243u32));
        assert_eq!(count_monomials(3, 2, Ratio::new(-1, 2)), BigUint::zero());
        assert_eq!(count_monomials(3, 2, Ratio::new(3, 2)), BigUint::from(4u32));
    }

    #[test]
    fn count_matches_enumeration_and_symmetry() {
        for q in 2..6u64 {
            for n in 1..6usize {
                let top = n as i64 * (q as i64 - 1);
                for dd in 0..=top {
                    let c = count_monomials(n, q, Ratio::from_integer(dd));
                    assert_eq!(c, BigUint::from(brute_count(n, q, dd)));
                    let mirror = count_monomials(n, q, Ratio::from_integer(top - dd - 1));
                    assert_eq!(c + mirror, BigUint::from(q.pow(n as u32)));
                }
            }
        }
        // exceeds u64
        let big = count_monomials(60, 3, Ratio::from_integer(120));
        assert_eq!(big, BigUint::from(3u32).pow(60));
    }

    #[test]
    fn rank_examples() {
        let f3 = fq(3);
        assert_eq!(Matrix::identity(&f3, 4).rank(), 4);
        let f2 = fq(2);
        let ones = Matrix::new(&f2, 3, 3, vec![Elem::ONE; 9]).unwrap();
        assert_eq!(ones.rank(), 1);
        let swap = Matrix::new(&f2, 2, 2, vec![Elem(0), Elem(1), Elem(1), Elem(0)]).unwrap();
        assert_eq!(swap.rank(), 2);
    }

    #[test]
    fn rank_matches_brute_force_over_f2() {
        // Rank over F_2 = log2 of the size of the row span.
        let f2 = fq(2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (r, c) = (rng.gen_range(1..6), rng.gen_range(1..6));
            let data: Vec<Elem> = (0..r * c).map(|_| Elem(rng.gen_range(0..2))).collect();
            let m = Matrix::new(&f2, r, c, data).unwrap();
            let rows: Vec<u32> = (0..r)
                .map(|i| m.row(i).iter().fold(0u32, |acc, e| acc << 1 | e.0))
                .collect();
            let mut span = BTreeSet::new();
            for mask in 0u32..(1 << r) {
                span.insert((0..r).filter(|i| mask >> i & 1 == 1).fold(0, |acc, i| acc ^ rows[i]));
            }
            assert_eq!(1usize << m.rank(), span.len());
            assert_eq!(m.rank(), m.transpose().rank());
        }
    }

    #[test]
    fn diff_matrix_examples() {
        let f2 = fq(2);
        let one = MultiPoly::constant(&f2, 2, Elem::ONE);
        let m = build_diff_matrix(&one, &[0, 1, 3], &Limits::default()).unwrap();
        assert_eq!(m, Matrix::new(&f2, 3, 3, vec![Elem::ONE; 9]).unwrap());
        let x = MultiPoly::var(&f2, 1, 0);
        let m = build_diff_matrix(&x, &[0, 1], &Limits::default()).unwrap();
        assert_eq!(m, Matrix::new(&f2, 2, 2, vec![Elem(0), Elem(1), Elem(1), Elem(0)]).unwrap());
        // P supported only at 0: 1 - x^2 over F_3.
        let f3 = fq(3);
        let ind = MultiPoly::from_terms(&f3, 1, [(vec![0], Elem(1)), (vec![2], Elem(2))]).unwrap();
        let m = build_diff_matrix(&ind, &[0, 1, 2], &Limits::default()).unwrap();
        assert_eq!(m, Matrix::identity(&f3, 3));
        assert!(matches!(
            build_diff_matrix(&ind, &[0, 0], &Limits::default()),
            Err(Error::DuplicatePoints)
        ));
    }

    #[test]
    fn split_examples() {
        let f2 = fq(2);
        let x = MultiPoly::var(&f2, 1, 0);
        let s = half_degree_split(&x, &Limits::default()).unwrap();
        assert_eq!(s.u_side.members.len(), 1);
        assert_eq!(s.u_side.members[0].0, Monomial(vec![0]));
        // deg P = 1: u^1 has u-degree 1 > 1/2 so it goes to the v-side with h = 1;
        // v^1 has u-degree 0 and goes to the u-side with h = 1, Q = v.
        assert_eq!(s.u_side.members[0].1, x);
        assert_eq!(s.v_side.members, vec![(Monomial(vec![0]), x.clone())]);
        assert_eq!(s.verified, Some(true));

        let c = MultiPoly::constant(&f2, 2, Elem::ONE);
        let s = half_degree_split(&c, &Limits::default()).unwrap();
        assert_eq!(s.u_side.members, vec![(Monomial(vec![0, 0]), c.clone())]);
        assert!(s.v_side.members.is_empty());
    }

    #[test]
    fn split_reconstructs_random_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let q = [2u64, 3, 4][rng.gen_range(0..3)];
            let n = rng.gen_range(1..=3usize);
            let field = fq(q);
            let terms: Vec<(Vec<u32>, Elem)> = (0..rng.gen_range(1..8))
                .map(|_| {
                    let e = (0..n).map(|_| rng.gen_range(0..q as u32)).collect();
                    (e, Elem(rng.gen_range(1..q as u32)))
                })
                .collect();
            let p = MultiPoly::from_terms(&field, n, terms).unwrap();
            if p.is_zero() {
                continue;
            }
            let limits = Limits::default();
            let s = half_degree_split(&p, &limits).unwrap();
            if (q as u128).pow(2 * n as u32) <= limits.split_check as u128 {
                assert_eq!(s.verified, Some(true));
            }
            let t = count_monomials(n, q, Ratio::new(s.deg_p as i64, 2));
            assert!(BigUint::from(s.distinct_h()) <= &t * 2u32);

            let points: Vec<u64> = (0..q.pow(n as u32)).collect();
            let m = build_diff_matrix(&p, &points, &limits).unwrap();
            let (u, v) = decomposition_factors(&s, &p, &points).unwrap();
            assert_eq!(u.mul(&v.transpose()).unwrap(), m);
            assert!(m.rank() <= u.cols());
            assert!(m.rank() <= u.rank());

            let cert = certify(&p, &points, &limits).unwrap();
            assert!(BigUint::from(cert.rank) <= cert.bound);
        }
    }

    #[test]
    fn certify_constant() {
        let f3 = fq(3);
        let one = MultiPoly::constant(&f3, 2, Elem::ONE);
        let pts: Vec<u64> = (0..9).collect();
        let cert = certify(&one, &pts, &Limits::default()).unwrap();
        assert_eq!(cert.rank, 1);
        assert_eq!(cert.bound, BigUint::from(2u32));
        assert!(!cert.diagonal);
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["T"], 1);
    }
}
