//! Exact extremal sizes of difference-free sets, as maximum independent
//! sets of Cayley graphs on F_q^n.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::{bound_value, BoundReport};
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::field::{Elem, FieldSpec};
use crate::phimap::{validate_f, PhiMap};
use crate::polynomial::UniPoly;
use crate::space::Space;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    /// Polynomials of degree < n over F_q, differences F(b) with deg b < m.
    #[value(name = "poly")]
    PolyRing,
    /// The field F_{p^n}, differences F(b) for every b in it.
    Field,
}

#[derive(Clone, Debug, Serialize)]
pub struct ForbiddenSet {
    pub setting: Setting,
    /// Base field F_q (poly ring) or the extension F_{p^n} (field).
    pub field: FieldSpec,
    #[serde(serialize_with = "ser_text")]
    pub f: UniPoly,
    pub n: usize,
    pub diffs: BTreeSet<u64>,
    /// Ambient group as F_q^n (poly ring) or F_p^n (field), by encoding.
    #[serde(skip)]
    pub group: Space,
}

fn ser_text<S: serde::Serializer>(f: &UniPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&f.to_text())
}

impl ForbiddenSet {
    /// Characteristic of the group structure: q for the poly ring, p for the field.
    pub fn q(&self) -> u64 {
        self.group.field().q() as u64
    }

    pub fn k(&self) -> usize {
        self.f.degree().unwrap_or(0)
    }

    pub fn size(&self) -> u128 {
        self.group.size()
    }

    /// Bypasses the constant-term check; used to study rejected F.
    pub fn with_diffs(setting: Setting, base: &FieldSpec, f: UniPoly, n: usize, diffs: BTreeSet<u64>) -> Self {
        let group = match setting {
            Setting::PolyRing => Space::new(base.clone(), n),
            Setting::Field => Space::new(FieldSpec::prime(base.p()).expect("prime"), n),
        };
        ForbiddenSet {
            setting,
            field: base.clone(),
            f,
            n,
            diffs,
            group,
        }
    }

    /// Symmetrized connection set `(diffs ∪ -diffs) \ {0}`.
    pub fn connection_set(&self) -> BTreeSet<u64> {
        self.diffs
            .iter()
            .flat_map(|&c| [c, self.group.neg(c)])
            .filter(|&c| c != 0)
            .collect()
    }
}

/// Builds the set of forbidden differences.
///
/// For the field setting `base` supplies the characteristic and F must have
/// coefficients in the prime field; the group is F_{p^n} under addition.
pub fn forbidden_set(setting: Setting, base: &FieldSpec, f: &UniPoly, n: usize, limits: &Limits) -> Result<ForbiddenSet> {
    if base != f.field() {
        return Err(Error::FieldMismatch);
    }
    validate_f(f)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    match setting {
        Setting::PolyRing => {
            let phi = PhiMap::build(base, f, n)?;
            let diffs = phi.image(limits.enumeration)?;
            Ok(ForbiddenSet {
                setting,
                field: base.clone(),
                f: f.clone(),
                n,
                diffs,
                group: Space::new(base.clone(), n),
            })
        }
        Setting::Field => {
            if !f.coeffs().iter().all(|&c| base.in_prime_field(c)) {
                return Err(Error::CoefficientsNotInPrimeField);
            }
            let size = (base.p() as u128).pow(n as u32);
            if size > limits.enumeration as u128 {
                return Err(Error::limit("extension field", size, limits.enumeration as u128));
            }
            let big = FieldSpec::new(base.p(), n as u32)?;
            // Prime-field elements share their encoding in every extension.
            let lifted = UniPoly::new(big.clone(), f.coeffs().to_vec());
            let diffs = big.elements().map(|b| lifted.eval(b).0 as u64).collect();
            Ok(ForbiddenSet {
                setting,
                field: big,
                f: lifted,
                n,
                diffs,
                group: Space::new(FieldSpec::prime(base.p())?, n),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreeCheck {
    pub free: bool,
    /// `(a1, a2)` with `a1 - a2` forbidden.
    pub violation: Option<(u64, u64)>,
}

pub fn verify_free(set: &[u64], fs: &ForbiddenSet) -> Result<FreeCheck> {
    if let Some(&bad) = set.iter().find(|&&a| !fs.group.contains(a)) {
        return Err(Error::ElementOutOfRange(bad));
    }
    let elems: Vec<u64> = set.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    for (i, &a) in elems.iter().enumerate() {
        for &b in &elems[..i] {
            let violation = if fs.diffs.contains(&fs.group.sub(a, b)) {
                Some((a, b))
            } else if fs.diffs.contains(&fs.group.sub(b, a)) {
                Some((b, a))
            } else {
                None
            };
            if violation.is_some() {
                return Ok(FreeCheck { free: false, violation });
            }
        }
    }
    Ok(FreeCheck {
        free: true,
        violation: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub alpha: usize,
    pub witness: Vec<u64>,
    pub nodes_explored: u64,
    pub elapsed_ms: f64,
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Bits::empty(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    fn and_not(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & !b).collect())
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    i * 64 + b
                })
            })
        })
    }
}

struct Graph {
    n: usize,
    adj: Vec<Bits>,
}

impl Graph {
    fn cayley(fs: &ForbiddenSet, limit: u64) -> Result<Graph> {
        let n = fs.group.checked_size("free set search", limit)?;
        let conn = fs.connection_set();
        let adj = (0..n as u64)
            .map(|v| {
                let mut b = Bits::empty(n);
                for &c in &conn {
                    b.insert(fs.group.add(v, c) as usize);
                }
                b
            })
            .collect();
        Ok(Graph { n, adj })
    }
}

struct BranchAndBound<'a> {
    g: &'a Graph,
    best: Vec<usize>,
    nodes: u64,
}

impl BranchAndBound<'_> {
    /// Partition of `p` into cliques of G, built greedily in ascending
    /// order; an independent set meets each clique at most once.
    fn clique_cover(&self, p: &Bits) -> usize {
        let mut rest = p.clone();
        let mut classes = 0;
        while let Some(v) = rest.first() {
            let mut cand = rest.and(&self.g.adj[v]);
            rest.remove(v);
            while let Some(w) = cand.first() {
                rest.remove(w);
                cand = cand.and(&self.g.adj[w]);
            }
            classes += 1;
        }
        classes
    }

    fn expand(&mut self, r: &mut Vec<usize>, mut p: Bits) {
        self.nodes += 1;
        loop {
            let Some(v) = p.first() else {
                if r.len() > self.best.len() {
                    self.best = r.clone();
                }
                return;
            };
            if r.len() + self.clique_cover(&p) <= self.best.len() {
                return;
            }
            let mut next = p.and_not(&self.g.adj[v]);
            next.remove(v);
            r.push(v);
            self.expand(r, next);
            r.pop();
            p.remove(v);
        }
    }
}

/// Exact maximum free set by branch-and-bound; include-first branching on
/// the smallest remaining encoding makes the witness deterministic.
pub fn max_free_set(fs: &ForbiddenSet, limits: &Limits) -> Result<SearchResult> {
    let start = Instant::now();
    let g = Graph::cayley(fs, limits.mis_vertices)?;
    let mut bb = BranchAndBound {
        g: &g,
        best: Vec::new(),
        nodes: 0,
    };
    bb.expand(&mut Vec::new(), Bits::full(g.n));
    let witness: Vec<u64> = bb.best.iter().map(|&v| v as u64).collect();
    if !verify_free(&witness, fs)?.free {
        return Err(Error::VerificationFailed("search witness is not free".into()));
    }
    Ok(SearchResult {
        alpha: witness.len(),
        witness,
        nodes_explored: bb.nodes,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Subset enumeration; ambient size at most 16.
pub fn max_free_set_naive(fs: &ForbiddenSet) -> Result<usize> {
    let g = Graph::cayley(fs, 16)?;
    let masks: Vec<u32> = g
        .adj
        .iter()
        .map(|b| b.iter().fold(0u32, |m, w| m | 1 << w))
        .collect();
    Ok((0u32..1 << g.n)
        .filter(|&s| (0..g.n).all(|v| s >> v & 1 == 0 || masks[v] & s == 0))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0))
}

/// Independence number by simplicial-vertex reduction, component
/// splitting and max-degree branching. Shares nothing with the
/// branch-and-bound search beyond the graph.
pub fn max_free_set_reduction(fs: &ForbiddenSet, limits: &Limits) -> Result<usize> {
    let g = Graph::cayley(fs, limits.mis_vertices)?;
    Ok(reduce_solve(&g, Bits::full(g.n)))
}

fn reduce_solve(g: &Graph, mut alive: Bits) -> usize {
    let mut taken = 0;
    // A vertex whose live neighbourhood is a clique belongs to some maximum
    // independent set.
    'reduce: loop {
        for v in alive.iter().collect::<Vec<_>>() {
            let nb: Vec<usize> = g.adj[v].and(&alive).iter().collect();
            let simplicial = nb
                .iter()
                .enumerate()
                .all(|(i, &a)| nb[i + 1..].iter().all(|&b| g.adj[a].contains(b)));
            if simplicial {
                taken += 1;
                alive.remove(v);
                for a in nb {
                    alive.remove(a);
                }
                continue 'reduce;
            }
        }
        break;
    }
    if alive.is_empty() {
        return taken;
    }
    // Split off the component of the first live vertex.
    let root = alive.first().expect("nonempty");
    let mut comp = Bits::empty(g.n);
    comp.insert(root);
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for w in g.adj[v].and(&alive).iter() {
            if !comp.contains(w) {
                comp.insert(w);
                stack.push(w);
            }
        }
    }
    if comp.len() < alive.len() {
        let rest = alive.and_not(&comp);
        return taken + reduce_solve(g, comp) + reduce_solve(g, rest);
    }
    let v = alive
        .iter()
        .max_by_key(|&v| (g.adj[v].and(&alive).len(), std::cmp::Reverse(v)))
        .expect("nonempty");
    let mut without = alive.clone();
    without.remove(v);
    let mut with = alive.and_not(&g.adj[v]);
    with.remove(v);
    taken + reduce_solve(g, without).max(1 + reduce_solve(g, with))
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonRow {
    pub q: u64,
    pub k: usize,
    pub n: usize,
    pub alpha: usize,
    pub bound: f64,
    pub ratio: f64,
}

/// Checks `alpha ≤ c·t^n` and `alpha ≤ q^n`.
pub fn bound_comparison(fs: &ForbiddenSet, result: &SearchResult, report: &BoundReport) -> Result<ComparisonRow> {
    let (q, k) = (fs.q(), fs.k());
    if report.q != q || report.k != k as u64 {
        return Err(Error::InvalidArgument(format!(
            "bound report is for (q, k) = ({}, {}), instance has ({q}, {k})",
            report.q, report.k
        )));
    }
    let bound = bound_value(report, fs.n as u64).bound;
    let alpha = result.alpha;
    if alpha as f64 > bound || alpha as u128 > fs.size() {
        return Err(Error::BoundViolated(format!(
            "alpha = {alpha} exceeds c*t^n = {bound} (q = {q}, k = {k}, n = {}, witness {:?})",
            fs.n, result.witness
        )));
    }
    Ok(ComparisonRow {
        q,
        k,
        n: fs.n,
        alpha,
        bound,
        ratio: alpha as f64 / bound,
    })
}

/// `F = b^k`, the default family for comparison tables.
pub fn power_map(field: &FieldSpec, k: usize) -> UniPoly {
    UniPoly::monomial(field, Elem::ONE, k)
}
