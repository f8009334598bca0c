//! Command-line front end: argument parsing, configuration and report
//! emission. `dispatch` never prints; the binary writes its outcome.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_value, d_exact, d_paper, minimize, table, BoundReport, BoundValue, DMode};
use crate::clpcore::{
    build_mu, build_p, degree_audit, degree_bound_real, pointwise_identity_check, DegreeAudit, IdentityReport,
};
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::extremal::{
    bound_comparison, forbidden_set, max_free_set, power_map, ComparisonRow, ForbiddenSet, Setting,
};
use crate::field::{prime_power, Elem, FieldSpec};
use crate::phimap::PhiMap;
use crate::pipeline::{run_pipeline, sweep, SetChoice, SweepConfig};
use crate::polynomial::{power_sum, MultiPoly, UniPoly};
use crate::rankcert::{certify, half_degree_split, RankCertificate};
use crate::space::Space;

/// Environment variable naming a JSON config file.
pub const CONFIG_ENV: &str = "SARKOZY_CONFIG";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    #[default]
    Pretty,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub limits: Limits,
    pub format: OutputFormat,
    pub d_mode: DMode,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let cfg: Config = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.limits.validate()?;
        Ok(cfg)
    }
}

#[derive(Parser, Debug)]
#[command(name = "sarkozy", version, about = "Polynomial-method bounds for difference-free sets over finite fields")]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Modulus of F_q as coefficients over F_p, lowest degree first.
    #[arg(long, global = true)]
    modulus: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Instance {
    #[arg(long)]
    q: u64,
    /// Polynomial F, e.g. "b^2+b" or "0,1,1".
    #[arg(long = "F")]
    f: String,
    #[arg(long)]
    n: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimizer, t and c for given (q, k).
    Bound {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, value_enum)]
        d: Option<DMode>,
    },
    /// CSV of the bound constants over prime powers q and degrees k.
    Table {
        #[arg(long)]
        qmax: u64,
        #[arg(long)]
        kmax: u64,
        #[arg(long, value_enum)]
        d: Option<DMode>,
    },
    /// Coordinate polynomials of Φ.
    Phi(Instance),
    /// Builds P and runs its checks.
    Construct {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, value_enum, default_value = "exact")]
        d: DMode,
    },
    /// Rank certificate for the difference matrix of P.
    Certify {
        #[command(flatten)]
        inst: Instance,
        /// File with point encodings; all of F_q^n when absent.
        #[arg(long, conflicts_with = "all")]
        set: Option<PathBuf>,
        #[arg(long)]
        all: bool,
    },
    /// Exact maximum free set.
    Search {
        #[arg(long, value_enum, default_value = "poly")]
        setting: Setting,
        #[arg(long, required_unless_present = "p")]
        q: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long = "F")]
        f: String,
        #[arg(long)]
        n: usize,
        /// Vertex limit for the search.
        #[arg(long)]
        limit: Option<u64>,
    },
    /// CSV of exact free-set sizes against c·t^n, with F = b^k.
    Compare {
        #[arg(long)]
        qmax: u64,
        #[arg(long)]
        kmax: usize,
        #[arg(long)]
        nmax: usize,
    },
    /// Full proof transcript for one instance.
    Prove {
        #[command(flatten)]
        inst: Instance,
        /// File with the set A; a maximum free set is used when absent.
        #[arg(long)]
        set: Option<PathBuf>,
    },
    /// Transcripts over a (q, k, n) grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Also write the summary CSV here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Runs the built-in invariant suites.
    Selftest,
}

/// Result of one CLI invocation.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses a polynomial over `field`.
///
/// Text without letters or operators is a comma-separated list of
/// coefficient encodings, constant term first. Otherwise it is a sum of
/// terms like `3b^2`, `2*x`, `-T` or `1` in a single variable named b, x or
/// T; integer coefficients are reduced mod p.
pub fn parse_polynomial(text: &str, field: &FieldSpec) -> Result<UniPoly> {
    if text.trim().is_empty() {
        return Err(parse_err(0, "empty polynomial"));
    }
    let symbolic = text.chars().any(|c| c.is_ascii_alphabetic() || "+^*".contains(c));
    if symbolic {
        Symbolic::new(text, field).parse()
    } else {
        parse_list(text, field)
    }
}

fn parse_err(pos: usize, msg: impl Into<String>) -> Error {
    Error::ParseError { pos, msg: msg.into() }
}

fn parse_list(text: &str, field: &FieldSpec) -> Result<UniPoly> {
    let q = field.q();
    let mut coeffs = Vec::new();
    let mut offset = 0;
    for piece in text.split(',') {
        let trimmed = piece.trim();
        let pos = offset + piece.len() - piece.trim_start().len();
        if trimmed.is_empty() {
            return Err(parse_err(pos, "missing coefficient"));
        }
        let value: i64 = trimmed.parse().map_err(|_| parse_err(pos, format!("not an integer: {trimmed}")))?;
        if value < 0 || value >= q as i64 {
            return Err(Error::CoefficientOutOfRange { value, q });
        }
        coeffs.push(Elem(value as u32));
        offset += piece.len() + 1;
    }
    Ok(UniPoly::new(field.clone(), coeffs))
}

struct Symbolic<'a> {
    s: &'a [u8],
    pos: usize,
    field: &'a FieldSpec,
    var: Option<u8>,
    coeffs: Vec<Elem>,
}

impl<'a> Symbolic<'a> {
    fn new(text: &'a str, field: &'a FieldSpec) -> Self {
        Symbolic {
            s: text.as_bytes(),
            pos: 0,
            field,
            var: None,
            coeffs: Vec::new(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(parse_err(start, "expected an integer"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| parse_err(start, "integer too large"))
    }

    fn variable(&mut self) -> Result<bool> {
        match self.peek() {
            Some(c @ (b'b' | b'x' | b'T')) => {
                if self.var.is_some_and(|v| v != c) {
                    return Err(parse_err(self.pos, "mixed variable names"));
                }
                self.var = Some(c);
                self.pos += 1;
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    fn term(&mut self, sign: i64) -> Result<()> {
        let start = self.pos;
        let mut coeff = 1i64;
        let mut has_coeff = false;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            coeff = self.int()?;
            has_coeff = true;
            if self.peek() == Some(b'*') {
                self.pos += 1;
                if !self.variable()? {
                    return Err(parse_err(self.pos, "expected b, x or T after '*'"));
                }
                return self.finish_term(sign * coeff, true);
            }
        }
        let has_var = self.variable()?;
        if !has_coeff && !has_var {
            return Err(parse_err(start.max(self.pos), "expected a term"));
        }
        self.finish_term(sign * coeff, has_var)
    }

    fn finish_term(&mut self, coeff: i64, has_var: bool) -> Result<()> {
        let mut exp = 0u64;
        if has_var {
            exp = 1;
            if self.peek() == Some(b'^') {
                self.pos += 1;
                let at = self.pos;
                exp = self.int()? as u64;
                if exp > 1 << 20 {
                    return Err(parse_err(at, "exponent too large"));
                }
            }
        }
        let e = exp as usize;
        if self.coeffs.len() <= e {
            self.coeffs.resize(e + 1, Elem::ZERO);
        }
        let c = self.field.from_int(coeff);
        self.coeffs[e] = self.field.add(self.coeffs[e], c);
        Ok(())
    }

    fn parse(mut self) -> Result<UniPoly> {
        let mut sign = 1;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            sign = -1;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        self.term(sign)?;
        loop {
            match self.peek() {
                None => break,
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                Some(c) => return Err(parse_err(self.pos, format!("unexpected '{}'", c as char))),
            }
            self.pos += 1;
            self.term(sign)?;
        }
        Ok(UniPoly::new(self.field.clone(), self.coeffs))
    }
}

/// Parses `"1,1,1"` into a modulus and builds F_q with it.
fn field_for(q: u64, modulus: Option<&str>) -> Result<FieldSpec> {
    let (p, _) = prime_power(q).ok_or(Error::NonPrimeCharacteristic(q))?;
    match modulus {
        None => FieldSpec::of_order(q),
        Some(text) => {
            let coeffs = text
                .split(',')
                .map(|c| c.trim().parse::<u32>().map_err(|_| Error::InvalidModulus(text.into())))
                .collect::<Result<Vec<_>>>()?;
            let field = FieldSpec::with_modulus(p, &coeffs)?;
            if field.q() as u64 != q {
                return Err(Error::InvalidModulus(format!("{text} does not define a field of order {q}")));
            }
            Ok(field)
        }
    }
}

/// Reads point encodings from a JSON array or a comma/whitespace list.
pub fn read_set(path: &Path) -> Result<Vec<u64>> {
    let text = std::fs::read_to_string(path)?;
    if let Ok(v) = serde_json::from_str::<Vec<u64>>(&text) {
        return Ok(v);
    }
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::InvalidArgument(format!("bad point encoding '{s}' in {}", path.display())))
        })
        .collect()
}

fn emit<T: Serialize>(value: &T, format: OutputFormat) -> Result<String> {
    let mut s = match format {
        OutputFormat::Json => serde_json::to_string(value)?,
        _ => serde_json::to_string_pretty(value)?,
    };
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct BoundOutput {
    #[serde(flatten)]
    report: BoundReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<BoundValue>,
}

#[derive(Serialize)]
struct ConstructOutput {
    q: u64,
    #[serde(rename = "F")]
    f: String,
    n: usize,
    m: usize,
    d_mode: DMode,
    d: f64,
    deg_mu: u32,
    deg_p: u32,
    degree_bound: f64,
    p0: u32,
    checks: crate::clpcore::ConstructionChecks,
    identity: IdentityReport,
    audit: DegreeAudit,
    #[serde(rename = "P")]
    p: MultiPoly,
}

#[derive(Serialize)]
struct CertifyOutput {
    #[serde(flatten)]
    cert: RankCertificate,
    split_families: usize,
    split_verified: Option<bool>,
}

#[derive(Serialize)]
struct SearchOutput<'a> {
    forbidden: &'a ForbiddenSet,
    #[serde(flatten)]
    result: crate::extremal::SearchResult,
}

/// Runs one invocation. `args` includes the program name.
pub fn dispatch<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let shown = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: shown,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: shown,
                },
            };
        }
    };
    let config = match std::env::var_os(CONFIG_ENV) {
        Some(path) => Config::load(Path::new(&path)),
        None => Ok(Config::default()),
    };
    let result = config.and_then(|mut cfg| {
        if let Some(f) = cli.format {
            cfg.format = f;
        }
        run(&cli, &cfg)
    });
    match result {
        Ok((stdout, stderr)) => Outcome { code: 0, stdout, stderr },
        Err(e) => Outcome {
            code: if e.is_theorem_violation() { 2 } else { 1 },
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn run(cli: &Cli, cfg: &Config) -> Result<(String, String)> {
    let limits = &cfg.limits;
    let fmt = cfg.format;
    let modulus = cli.modulus.as_deref();
    let load = |inst: &Instance| -> Result<(FieldSpec, UniPoly)> {
        let field = field_for(inst.q, modulus)?;
        let f = parse_polynomial(&inst.f, &field)?;
        Ok((field, f))
    };
    let mut diag = String::new();
    let out = match &cli.command {
        Command::Bound { q, k, n, d } => {
            let report = minimize(*q, *k, d.unwrap_or(cfg.d_mode))?;
            if !report.grid_agrees {
                diag.push_str("warning: refined minimizer differs from the grid argmin\n");
            }
            let value = n.map(|n| bound_value(&report, n));
            emit(&BoundOutput { report, value }, fmt)?
        }
        Command::Table { qmax, kmax, d } => {
            let rows = table(*qmax, *kmax, d.unwrap_or(cfg.d_mode))?;
            if fmt == OutputFormat::Csv || cli.format.is_none() {
                let mut s = String::from("q,k,d_paper,d_exact,x_star,t,c\n");
                for r in rows {
                    s.push_str(&format!(
                        "{},{},{:.9},{},{:.9},{:.9},{:.9}\n",
                        r.q, r.k, r.d_paper, r.d_exact, r.x_star, r.t, r.c
                    ));
                }
                s
            } else {
                emit(&rows, fmt)?
            }
        }
        Command::Phi(inst) => {
            let (field, f) = load(inst)?;
            emit(&PhiMap::build(&field, &f, inst.n)?.report(), fmt)?
        }
        Command::Construct { inst, d } => {
            let (field, f) = load(inst)?;
            emit(&construct_report(&field, &f, inst.n, *d, limits)?, fmt)?
        }
        Command::Certify { inst, set, .. } => {
            let (field, f) = load(inst)?;
            let ind = crate::clpcore::construct(&field, &f, inst.n, limits)?;
            let points = match set {
                Some(path) => read_set(path)?,
                None => {
                    let space = Space::new(field.clone(), inst.n);
                    let size = space.checked_size("certify over all points", limits.matrix_dim)?;
                    (0..size as u64).collect()
                }
            };
            let cert = certify(&ind.p, &points, limits)?;
            let split = half_degree_split(&ind.p, limits)?;
            if split.verified == Some(false) {
                return Err(Error::VerificationFailed("half-degree split does not reproduce P(u - v)".into()));
            }
            emit(
                &CertifyOutput {
                    cert,
                    split_families: split.distinct_h(),
                    split_verified: split.verified,
                },
                fmt,
            )?
        }
        Command::Search {
            setting,
            q,
            p,
            f,
            n,
            limit,
        } => {
            let order = match setting {
                Setting::PolyRing => q.or(*p),
                Setting::Field => p.or(*q),
            }
            .ok_or_else(|| Error::InvalidArgument("--q or --p is required".into()))?;
            let field = field_for(order, modulus)?;
            let poly = parse_polynomial(f, &field)?;
            let mut limits = limits.clone();
            if let Some(v) = limit {
                limits.mis_vertices = *v;
            }
            let fs = forbidden_set(*setting, &field, &poly, *n, &limits)?;
            let result = max_free_set(&fs, &limits)?;
            emit(&SearchOutput { forbidden: &fs, result }, fmt)?
        }
        Command::Compare { qmax, kmax, nmax } => {
            let (rows, skipped) = compare(*qmax, *kmax, *nmax, limits)?;
            for (q, k, n, why) in skipped {
                diag.push_str(&format!("skipped q={q} k={k} n={n}: {why}\n"));
            }
            if fmt == OutputFormat::Csv || cli.format.is_none() {
                let mut s = String::from("q,k,n,alpha,bound,ratio\n");
                for r in rows {
                    s.push_str(&format!("{},{},{},{},{:.6},{:.6}\n", r.q, r.k, r.n, r.alpha, r.bound, r.ratio));
                }
                s
            } else {
                emit(&rows, fmt)?
            }
        }
        Command::Prove { inst, set } => {
            let (field, f) = load(inst)?;
            let choice = match set {
                Some(path) => SetChoice::Given(read_set(path)?),
                None => SetChoice::Search,
            };
            emit(&run_pipeline(&field, &f, inst.n, &choice, limits)?, fmt)?
        }
        Command::Sweep { config, summary } => {
            let sweep_cfg: SweepConfig = serde_json::from_str(&std::fs::read_to_string(config)?)?;
            let result = sweep(&sweep_cfg)?;
            if let Some(path) = summary {
                std::fs::write(path, result.summary_csv())?;
            }
            for e in &result.entries {
                if let Some(err) = &e.error {
                    diag.push_str(&format!("q={} k={} n={}: {err}\n", e.q, e.k, e.n));
                }
            }
            let out = if fmt == OutputFormat::Csv {
                result.summary_csv()
            } else {
                emit(&result, fmt)?
            };
            if result.entries.iter().any(|e| e.violation) {
                return Err(Error::VerificationFailed(format!("sweep instance failed a check\n{diag}")));
            }
            out
        }
        Command::Selftest => {
            let suites = selftest(limits);
            let mut s = String::new();
            for r in &suites {
                match &r.failure {
                    None => s.push_str(&format!("ok   {} ({} cases)\n", r.name, r.cases)),
                    Some(f) => s.push_str(&format!("FAIL {}: {f}\n", r.name)),
                }
            }
            if suites.iter().any(|r| r.failure.is_some()) {
                return Err(Error::VerificationFailed(format!("selftest failed\n{s}")));
            }
            s
        }
    };
    Ok((out, diag))
}

fn construct_report(field: &FieldSpec, f: &UniPoly, n: usize, mode: DMode, limits: &Limits) -> Result<ConstructOutput> {
    let phi = PhiMap::build(field, f, n)?;
    let mu = build_mu(field, &phi.preimage_zero())?;
    let (q, k) = (field.q() as u64, phi.k() as u64);
    let de = d_exact(q, k) as u32;
    // P does not depend on d; d only enters the degree bound.
    let ind = build_p(&phi, &mu, de, limits)?;
    let identity = pointwise_identity_check(&ind, limits)?;
    let audit = degree_audit(&ind, de, limits)?;
    let deg_p = ind.degree().unwrap_or(0);
    let (d, degree_bound) = match mode {
        DMode::Exact => (de as f64, ind.claimed_degree_bound.as_f64()),
        DMode::Paper => {
            let dp = d_paper(q, k);
            (dp, degree_bound_real(field.q(), n, phi.m(), mu.degree(), dp))
        }
    };
    if deg_p as f64 > degree_bound + 1e-9 {
        return Err(Error::DegreeBoundViolated(format!("deg P = {deg_p} > {degree_bound}")));
    }
    if !identity.ok {
        return Err(Error::VerificationFailed(format!("pointwise identity: {:?}", identity.counterexample)));
    }
    Ok(ConstructOutput {
        q,
        f: f.to_text(),
        n,
        m: phi.m(),
        d_mode: mode,
        d,
        deg_mu: mu.degree(),
        deg_p,
        degree_bound,
        p0: ind.p_at_zero().0,
        checks: ind.checks.clone(),
        identity,
        audit,
        p: ind.p,
    })
}

type Skipped = Vec<(u64, usize, usize, String)>;

/// Exact free-set sizes against `c·t^n` (real-valued d) for F = b^k over every
/// prime power q ≤ qmax, k ≤ kmax, n ≤ nmax; instances beyond the search
/// limits are skipped.
pub fn compare(qmax: u64, kmax: usize, nmax: usize, limits: &Limits) -> Result<(Vec<ComparisonRow>, Skipped)> {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for q in (2..=qmax).filter(|&q| prime_power(q).is_some()) {
        let field = FieldSpec::of_order(q)?;
        for k in 1..=kmax {
            let report = minimize(q, k as u64, DMode::Paper)?;
            for n in 1..=nmax {
                if (q as u128).pow(n as u32) > limits.mis_vertices as u128 {
                    skipped.push((q, k, n, "ambient size above search limit".into()));
                    continue;
                }
                let fs = forbidden_set(Setting::PolyRing, &field, &power_map(&field, k), n, limits)?;
                let result = max_free_set(&fs, limits)?;
                rows.push(bound_comparison(&fs, &result, &report)?);
            }
        }
    }
    Ok((rows, skipped))
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failure: Option<String>,
}

fn suite(name: &'static str, body: impl FnOnce() -> Result<usize>) -> SuiteResult {
    match body() {
        Ok(cases) => SuiteResult {
            name,
            cases,
            failure: None,
        },
        Err(e) => SuiteResult {
            name,
            cases: 0,
            failure: Some(e.to_string()),
        },
    }
}

fn fail(msg: String) -> Error {
    Error::VerificationFailed(msg)
}

const SELFTEST_ORDERS: [u64; 10] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16];

/// Built-in invariant suites; each reports its case count or the first
/// failure.
pub fn selftest(limits: &Limits) -> Vec<SuiteResult> {
    vec![
        suite("field axioms, q <= 16", || {
            let mut cases = 0;
            for q in SELFTEST_ORDERS {
                let f = FieldSpec::of_order(q)?;
                let els: Vec<Elem> = f.elements().collect();
                for &a in &els {
                    if !a.is_zero() && f.mul(a, f.inv(a)?) != Elem::ONE {
                        return Err(fail(format!("inverse of {} in F_{q}", a.0)));
                    }
                    if f.add(a, f.neg(a)) != Elem::ZERO {
                        return Err(fail(format!("negation of {} in F_{q}", a.0)));
                    }
                    for &b in &els {
                        if f.add(a, b) != f.add(b, a) || f.mul(a, b) != f.mul(b, a) {
                            return Err(fail(format!("commutativity at ({}, {}) in F_{q}", a.0, b.0)));
                        }
                        for &c in &els {
                            cases += 1;
                            let dist = f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c));
                            let assoc = f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c)
                                && f.add(a, f.add(b, c)) == f.add(f.add(a, b), c);
                            if !dist || !assoc {
                                return Err(fail(format!("ring law at ({}, {}, {}) in F_{q}", a.0, b.0, c.0)));
                            }
                        }
                    }
                }
            }
            Ok(cases)
        }),
        suite("power sums vanish below q - 1", || {
            let mut cases = 0;
            for q in SELFTEST_ORDERS {
                let f = FieldSpec::of_order(q)?;
                for k in 0..q - 1 {
                    cases += 1;
                    if !power_sum(&f, k).is_zero() {
                        return Err(fail(format!("sum of x^{k} over F_{q} is nonzero")));
                    }
                }
                if power_sum(&f, q - 1) != f.neg(Elem::ONE) {
                    return Err(fail(format!("sum of x^(q-1) over F_{q} is not -1")));
                }
            }
            Ok(cases)
        }),
        suite("weight polynomial contract", || {
            let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
            for _ in 0..100 {
                let q = [2u64, 3, 4, 5][rng.gen_range(0..4)];
                let m = rng.gen_range(1..=3usize);
                let field = FieldSpec::of_order(q)?;
                let space = Space::new(field.clone(), m);
                let size = space.size() as u64;
                let want = rng.gen_range(1..=size.min(8));
                let mut codes: Vec<u64> = (0..size).collect();
                for i in 0..want as usize {
                    let j = rng.gen_range(i..size as usize);
                    codes.swap(i, j);
                }
                let set: Vec<Vec<Elem>> = codes[..want as usize].iter().map(|&c| space.decode(c)).collect();
                let mu = build_mu(&field, &set)?;
                if mu.degree() as u64 > want - 1 || mu.witness_sum.is_zero() {
                    return Err(fail(format!("weight polynomial for {set:?}")));
                }
                for v in &mu.target_set[1..] {
                    if !mu.mu.eval(v)?.is_zero() {
                        return Err(fail(format!("weight polynomial nonzero at {v:?}")));
                    }
                }
            }
            Ok(100)
        }),
        suite("pointwise identity on the built-in grid", || {
            let mut cases = 0;
            for (field, f, n) in builtin_grid()? {
                let ind = crate::clpcore::construct(&field, &f, n, limits)?;
                let rep = pointwise_identity_check(&ind, limits)?;
                if !rep.ok {
                    return Err(fail(format!("q={} F={} n={n}: {:?}", field.q(), f.to_text(), rep.counterexample)));
                }
                cases += rep.points_checked;
            }
            Ok(cases)
        }),
        suite("rank certificates on the built-in grid", || {
            let mut cases = 0;
            for (field, f, n) in builtin_grid()? {
                let ind = crate::clpcore::construct(&field, &f, n, limits)?;
                let size = Space::new(field.clone(), n).size() as u64;
                certify(&ind.p, &(0..size).collect::<Vec<_>>(), limits)?;
                if half_degree_split(&ind.p, limits)?.verified == Some(false) {
                    return Err(fail(format!("split fails for q={} n={n}", field.q())));
                }
                cases += 1;
            }
            Ok(cases)
        }),
        suite("free-set sizes against the bound", || {
            let (rows, _) = compare(3, 2, 4, limits)?;
            Ok(rows.len())
        }),
    ]
}

fn builtin_grid() -> Result<Vec<(FieldSpec, UniPoly, usize)>> {
    let mut grid = Vec::new();
    for q in [2u64, 3] {
        let field = FieldSpec::of_order(q)?;
        for k in 2..=3 {
            for n in 1..=4 {
                grid.push((field.clone(), power_map(&field, k), n));
            }
        }
    }
    Ok(grid)
}
