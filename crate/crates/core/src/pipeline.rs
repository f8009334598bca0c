//! End-to-end execution of the rank argument on a concrete instance.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_value, d_exact, d_paper, minimize, DMode};
use crate::clpcore::{build_mu, build_p, degree_audit, pointwise_identity_check, SupportMode};
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::extremal::{bound_comparison, forbidden_set, max_free_set, power_map, verify_free, Setting};
use crate::field::FieldSpec;
use crate::phimap::{validate_f, PhiMap};
use crate::polynomial::UniPoly;
use crate::rankcert::{certify, count_monomials};

pub const SCHEMA_VERSION: u32 = 1;

/// Relative slack when comparing an integer against a floating bound.
const FLOAT_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetChoice {
    Given(Vec<u64>),
    /// Use the witness of an exact maximum free-set search.
    Search,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Inputs {
    pub q: u64,
    pub modulus: Vec<u32>,
    #[serde(rename = "F")]
    pub f: String,
    pub n: usize,
    pub set_source: String,
    #[serde(rename = "A")]
    pub set: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MuSummary {
    pub deg: u32,
    pub witness_sum: u32,
    pub target_size: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PSummary {
    pub terms: usize,
    pub deg_p: u32,
    /// `(q-1)(n - m/d) + deg(μ)/d` with the exact d, as "value/d".
    pub bound: String,
    /// Same expression with the real-valued d.
    pub bound_paper_d: f64,
    pub support_mode: String,
    pub p0: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CertificateSummary {
    pub rank: usize,
    #[serde(rename = "T")]
    pub t: String,
    #[serde(rename = "2T")]
    pub two_t: String,
    pub diagonal: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SearchSummary {
    pub alpha: usize,
    pub nodes_explored: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BoundSummary {
    pub d_mode: DMode,
    pub d: f64,
    pub x_star: f64,
    pub t: f64,
    pub c: f64,
    /// `c·t^n`.
    pub bound: f64,
    /// Pre-relaxation expression at x*.
    pub witness_bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Verdicts {
    pub set_free: bool,
    pub p0_nonzero: bool,
    pub support: bool,
    pub degree: bool,
    pub pointwise_identity: bool,
    pub degree_audit: bool,
    pub diagonal: bool,
    pub rank_equals_size: bool,
    pub rank_le_2t: bool,
    pub count_threshold: bool,
    pub two_t_le_witness: bool,
    /// `|A| ≤ c·t^n` for both d modes.
    pub size_le_bound: bool,
}

impl Verdicts {
    pub fn all(&self) -> bool {
        [
            self.set_free,
            self.p0_nonzero,
            self.support,
            self.degree,
            self.pointwise_identity,
            self.degree_audit,
            self.diagonal,
            self.rank_equals_size,
            self.rank_le_2t,
            self.count_threshold,
            self.two_t_le_witness,
            self.size_le_bound,
        ]
        .iter()
        .all(|&b| b)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProofTranscript {
    pub schema_version: u32,
    pub inputs: Inputs,
    pub k: usize,
    pub m: usize,
    pub d_exact: u64,
    pub d_paper: f64,
    pub mu: MuSummary,
    #[serde(rename = "P")]
    pub p: PSummary,
    pub certificate: CertificateSummary,
    pub search: Option<SearchSummary>,
    pub bound_exact: BoundSummary,
    pub bound_paper: BoundSummary,
    pub verdicts: Verdicts,
    /// `|A| = rank ≤ 2T ≤ witness bound`, rendered with numbers.
    pub chain: String,
}

fn summarize_bound(q: u64, k: usize, n: usize, mode: DMode) -> Result<BoundSummary> {
    let r = minimize(q, k as u64, mode)?;
    let v = bound_value(&r, n as u64);
    Ok(BoundSummary {
        d_mode: mode,
        d: r.d,
        x_star: r.x_star,
        t: r.t,
        c: r.c,
        bound: v.bound,
        witness_bound: v.witness,
    })
}

fn le_float(a: f64, b: f64) -> bool {
    a <= b * (1.0 + FLOAT_SLACK)
}

/// Runs Φ → μ → P → M → rank on `A` and checks every intermediate claim.
/// Any failed check is returned as a theorem-violation error.
pub fn run_pipeline(field: &FieldSpec, f: &UniPoly, n: usize, choice: &SetChoice, limits: &Limits) -> Result<ProofTranscript> {
    let k = validate_f(f)?;
    let q = field.q() as u64;
    let phi = PhiMap::build(field, f, n)?;
    let fs = forbidden_set(Setting::PolyRing, field, f, n, limits)?;

    let (set, search) = match choice {
        SetChoice::Given(a) => {
            if a.is_empty() {
                return Err(Error::EmptySet);
            }
            let mut a = a.clone();
            a.sort_unstable();
            a.dedup();
            let check = verify_free(&a, &fs)?;
            if let Some((x, y)) = check.violation {
                return Err(Error::NotFree { a: x, b: y });
            }
            (a, None)
        }
        SetChoice::Search => {
            let r = max_free_set(&fs, limits)?;
            (r.witness.clone(), Some(r))
        }
    };

    let mu = build_mu(field, &phi.preimage_zero())?;
    let d = d_exact(q, k as u64) as u32;
    let ind = build_p(&phi, &mu, d, limits)?;
    let identity = pointwise_identity_check(&ind, limits)?;
    if !identity.ok {
        return Err(Error::VerificationFailed(format!(
            "pointwise identity fails: {:?}",
            identity.counterexample
        )));
    }
    let audit = degree_audit(&ind, d, limits)?;
    let cert = certify(&ind.p, &set, limits)?;

    let bound_exact = summarize_bound(q, k, n, DMode::Exact)?;
    let bound_paper = summarize_bound(q, k, n, DMode::Paper)?;
    if let Some(r) = &search {
        for mode in [DMode::Exact, DMode::Paper] {
            bound_comparison(&fs, r, &minimize(q, k as u64, mode)?)?;
        }
    }

    let threshold = Ratio::new(ind.claimed_degree_bound.value as i64, 2 * d as i64);
    let count_cap = count_monomials(n, q, threshold) * 2u32;
    let two_t = &cert.t * 2u32;
    let two_t_f = two_t.to_f64().unwrap_or(f64::INFINITY);
    let size = set.len();
    let verdicts = Verdicts {
        set_free: true,
        p0_nonzero: ind.checks.p0_nonzero,
        support: ind.checks.support,
        degree: ind.checks.degree,
        pointwise_identity: identity.ok,
        degree_audit: audit.ok,
        diagonal: cert.diagonal,
        rank_equals_size: cert.rank == size,
        rank_le_2t: BigUint::from(cert.rank) <= two_t,
        count_threshold: two_t <= count_cap,
        two_t_le_witness: le_float(two_t_f, bound_exact.witness_bound),
        size_le_bound: le_float(size as f64, bound_exact.bound) && le_float(size as f64, bound_paper.bound),
    };
    if !verdicts.all() {
        return Err(Error::VerificationFailed(format!("failed verdicts: {verdicts:?}")));
    }

    Ok(ProofTranscript {
        schema_version: SCHEMA_VERSION,
        inputs: Inputs {
            q,
            modulus: field.modulus().to_vec(),
            f: f.to_text(),
            n,
            set_source: match choice {
                SetChoice::Given(_) => "given",
                SetChoice::Search => "search",
            }
            .into(),
            set,
        },
        k,
        m: phi.m(),
        d_exact: d as u64,
        d_paper: d_paper(q, k as u64),
        mu: MuSummary {
            deg: mu.degree(),
            witness_sum: mu.witness_sum.0,
            target_size: mu.target_set.len(),
        },
        p: PSummary {
            terms: ind.p.len(),
            deg_p: ind.degree().unwrap_or(0),
            bound: ind.claimed_degree_bound.to_string(),
            bound_paper_d: crate::clpcore::degree_bound_real(field.q(), n, phi.m(), mu.degree(), d_paper(q, k as u64)),
            support_mode: match ind.checks.support_mode {
                SupportMode::Exhaustive => "exhaustive",
                SupportMode::Sampled => "sampled",
            }
            .into(),
            p0: ind.p_at_zero().0,
        },
        certificate: CertificateSummary {
            rank: cert.rank,
            t: cert.t.to_string(),
            two_t: two_t.to_string(),
            diagonal: cert.diagonal,
        },
        search: search.map(|r| SearchSummary {
            alpha: r.alpha,
            nodes_explored: r.nodes_explored,
        }),
        chain: format!(
            "|A| = {size} = rank {} <= 2T = {two_t} <= {:.6}",
            cert.rank, bound_exact.witness_bound
        ),
        bound_exact,
        bound_paper,
        verdicts,
    })
}

/// Grid for `sweep`: every (q, k, n) with F = b^k.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct SweepConfig {
    pub q: Vec<u64>,
    pub k: Vec<usize>,
    pub n: Vec<usize>,
    pub limits: Limits,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SweepEntry {
    pub q: u64,
    pub k: usize,
    pub n: usize,
    pub transcript: Option<ProofTranscript>,
    pub error: Option<String>,
    /// The error signals a failed check rather than bad input or limits.
    pub violation: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SweepSummaryRow {
    pub q: u64,
    pub k: usize,
    pub n: usize,
    pub gamma: Option<usize>,
    pub two_t: Option<String>,
    pub bound: Option<f64>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SweepOutput {
    pub schema_version: u32,
    pub entries: Vec<SweepEntry>,
}

impl SweepOutput {
    pub fn summary(&self) -> Vec<SweepSummaryRow> {
        self.entries
            .iter()
            .map(|e| SweepSummaryRow {
                q: e.q,
                k: e.k,
                n: e.n,
                gamma: e.transcript.as_ref().and_then(|t| t.search.as_ref()).map(|s| s.alpha),
                two_t: e.transcript.as_ref().map(|t| t.certificate.two_t.clone()),
                bound: e.transcript.as_ref().map(|t| t.bound_paper.bound),
                ok: e.transcript.is_some(),
            })
            .collect()
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("q,k,n,gamma,two_t,bound,ok\n");
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in self.summary() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.q,
                r.k,
                r.n,
                opt(r.gamma.map(|g| g.to_string())),
                opt(r.two_t),
                opt(r.bound.map(|b| format!("{b:.6}"))),
                r.ok
            ));
        }
        out
    }

    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| e.error.is_some()).count()
    }
}

/// Runs the pipeline with A = search on every grid point. Entries keep the
/// grid order regardless of scheduling; errors are recorded per entry.
pub fn sweep(config: &SweepConfig) -> Result<SweepOutput> {
    config.limits.validate()?;
    let grid: Vec<(u64, usize, usize)> = config
        .q
        .iter()
        .flat_map(|&q| config.k.iter().flat_map(move |&k| config.n.iter().map(move |&n| (q, k, n))))
        .collect();
    let entries = grid
        .into_par_iter()
        .map(|(q, k, n)| {
            let result = FieldSpec::of_order(q).and_then(|field| {
                let f = power_map(&field, k);
                run_pipeline(&field, &f, n, &SetChoice::Search, &config.limits)
            });
            match result {
                Ok(t) => SweepEntry {
                    q,
                    k,
                    n,
                    transcript: Some(t),
                    error: None,
                    violation: false,
                },
                Err(e) => SweepEntry {
                    q,
                    k,
                    n,
                    transcript: None,
                    error: Some(e.to_string()),
                    violation: e.is_theorem_violation(),
                },
            }
        })
        .collect();
    Ok(SweepOutput {
        schema_version: SCHEMA_VERSION,
        entries,
    })
}
