//! The explicit constants of the bound `c·t^n`.
//!
//! `t` is the minimum over 0 < x < 1 of
//! `(1 + x + … + x^{q-1}) / x^s` with `s = (q-1)(1 - 1/(kd))/2`, and
//! `c = 2 / x*^{(k-1)/(2d)}` at the minimizer x*.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phimap::digit_sum_max;

const GRID_POINTS: usize = 10_000;
const GOLDEN_TOL: f64 = 1e-12;
const WITNESS_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DMode {
    /// `min{k, (q-1)(1 + log_q k)}`, real-valued.
    #[default]
    Paper,
    /// `min{k, max_{t ≤ k} D_q(t)}`, the digit-sum bound on deg φ_i.
    Exact,
}

pub fn d_paper(q: u64, k: u64) -> f64 {
    let log = (k as f64).ln() / (q as f64).ln();
    (k as f64).min((q as f64 - 1.0) * (1.0 + log))
}

pub fn d_exact(q: u64, k: u64) -> u64 {
    k.min(digit_sum_max(q, k))
}

pub fn d_value(q: u64, k: u64, mode: DMode) -> f64 {
    match mode {
        DMode::Paper => d_paper(q, k),
        DMode::Exact => d_exact(q, k) as f64,
    }
}

/// Exponent `s = (q-1)(1 - 1/(kd))/2` of the denominator.
pub fn exponent(q: u64, k: u64, d: f64) -> f64 {
    (q as f64 - 1.0) * (1.0 - 1.0 / (k as f64 * d)) / 2.0
}

fn geometric(x: f64, q: u64) -> f64 {
    (0..q).fold(0.0, |acc, _| acc * x + 1.0)
}

fn objective_raw(x: f64, q: u64, s: f64) -> f64 {
    geometric(x, q) / x.powf(s)
}

/// `(1 + x + … + x^{q-1}) / x^s` on the open interval (0, 1).
pub fn objective(x: f64, q: u64, k: u64, d: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::DomainError {
            value: x,
            domain: "(0, 1)",
        });
    }
    if d <= 0.0 {
        return Err(Error::InvalidArgument("d must be positive".into()));
    }
    Ok(objective_raw(x, q, exponent(q, k, d)))
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    (lo + hi) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub q: u64,
    pub k: u64,
    pub d_mode: DMode,
    pub d: f64,
    pub x_star: f64,
    pub t: f64,
    pub c: f64,
    pub grid_argmin: f64,
    /// Refined minimizer lies within one grid step of the grid argmin.
    pub grid_agrees: bool,
    /// Objective at x* ∓ 10^-6, when inside (0, 1).
    pub witnesses: [Option<Witness>; 2],
}

/// Grid scan over (0, 1) followed by golden-section refinement.
pub fn minimize(q: u64, k: u64, mode: DMode) -> Result<BoundReport> {
    if q < 2 || crate::field::prime_power(q).is_none() {
        return Err(Error::NonPrimeCharacteristic(q));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let d = d_value(q, k, mode);
    let s = exponent(q, k, d);
    let f = |x: f64| objective_raw(x, q, s);

    let step = 1.0 / GRID_POINTS as f64;
    let (best_i, _) = (1..GRID_POINTS)
        .map(|i| (i, f(i as f64 * step)))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    if best_i == 0 {
        return Err(Error::ConvergenceFailure(format!("no finite grid value for q={q} k={k}")));
    }
    let grid_argmin = best_i as f64 * step;
    // When s = 0 the infimum sits at x → 0 and is not attained.
    let lo = if best_i == 1 { 1e-15 } else { (best_i - 1) as f64 * step };
    let hi = (best_i + 1) as f64 * step;
    let x_star = golden_section(f, lo, hi.min(1.0 - 1e-15), GOLDEN_TOL);
    let t = f(x_star);
    if !(x_star > 0.0 && x_star < 1.0) || !t.is_finite() {
        return Err(Error::ConvergenceFailure(format!("x* = {x_star}, t = {t}")));
    }
    if t >= q as f64 {
        return Err(Error::BoundViolated(format!("t = {t} is not below q = {q}")));
    }
    let c = 2.0 / x_star.powf((k as f64 - 1.0) / (2.0 * d));
    let witness = |x: f64| (x > 0.0 && x < 1.0).then(|| Witness { x, value: f(x) });
    Ok(BoundReport {
        q,
        k,
        d_mode: mode,
        d,
        x_star,
        t,
        c,
        grid_argmin,
        grid_agrees: (x_star - grid_argmin).abs() <= step,
        witnesses: [witness(x_star - WITNESS_STEP), witness(x_star + WITNESS_STEP)],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub n: u64,
    /// `c·t^n`.
    pub bound: f64,
    /// `2 (1 + … + x^{q-1})^n / x^{((q-1)(n - m/d) + (k-1)/d)/2}` at x*.
    pub witness: f64,
}

pub fn bound_value(report: &BoundReport, n: u64) -> BoundValue {
    let (q, k, d, x) = (report.q, report.k, report.d, report.x_star);
    let m = if n == 0 { 0 } else { (n - 1) / k + 1 };
    let expo = ((q as f64 - 1.0) * (n as f64 - m as f64 / d) + (k as f64 - 1.0) / d) / 2.0;
    BoundValue {
        n,
        bound: report.c * report.t.powi(n as i32),
        witness: 2.0 * geometric(x, q).powi(n as i32) / x.powf(expo),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub q: u64,
    pub k: u64,
    pub d_paper: f64,
    pub d_exact: u64,
    pub x_star: f64,
    pub t: f64,
    pub c: f64,
}

/// One row per prime power q ≤ qmax and 1 ≤ k ≤ kmax.
pub fn table(qmax: u64, kmax: u64, mode: DMode) -> Result<Vec<TableRow>> {
    let pairs: Vec<(u64, u64)> = (2..=qmax)
        .filter(|&q| crate::field::prime_power(q).is_some())
        .flat_map(|q| (1..=kmax).map(move |k| (q, k)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(q, k)| {
            let r = minimize(q, k, mode)?;
            Ok(TableRow {
                q,
                k,
                d_paper: d_paper(q, k),
                d_exact: d_exact(q, k),
                x_star: r.x_star,
                t: r.t,
                c: r.c,
            })
        })
        .collect()
}
