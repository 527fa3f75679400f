//! Verification suites, reports and report emission.

mod algebraic;
mod euclid;
mod sphere;

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::Multivector;
use crate::error::{Result, RsqError};
use crate::poly::{Exponent, MultiPoly};
use crate::scalar::{Rational, Scalar};

/// Relative error below which refinement studies count as converged.
pub const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    Exact,
    Float,
}

impl FromStr for Arithmetic {
    type Err = RsqError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Arithmetic::Exact),
            "float" => Ok(Arithmetic::Float),
            _ => Err(RsqError::Config(format!("unknown arithmetic `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Algebra,
    Spaces,
    Kernel,
    Stokes,
    BorelPompeiu,
    CompactSupport,
    Cauchy,
    QTk,
    Intertwining,
    CayleyIntertwining,
    SphereStokes,
    SphereBp,
    SphereCauchy,
    MonogenicCauchy,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::Algebra,
        Suite::Spaces,
        Suite::Kernel,
        Suite::Stokes,
        Suite::BorelPompeiu,
        Suite::CompactSupport,
        Suite::Cauchy,
        Suite::QTk,
        Suite::Intertwining,
        Suite::CayleyIntertwining,
        Suite::SphereStokes,
        Suite::SphereBp,
        Suite::SphereCauchy,
        Suite::MonogenicCauchy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Spaces => "spaces",
            Suite::Kernel => "kernel",
            Suite::Stokes => "stokes",
            Suite::BorelPompeiu => "borel_pompeiu",
            Suite::CompactSupport => "compact_support",
            Suite::Cauchy => "cauchy",
            Suite::QTk => "q_tk",
            Suite::Intertwining => "intertwining",
            Suite::CayleyIntertwining => "cayley_intertwining",
            Suite::SphereStokes => "sphere_stokes",
            Suite::SphereBp => "sphere_bp",
            Suite::SphereCauchy => "sphere_cauchy",
            Suite::MonogenicCauchy => "monogenic_cauchy",
        }
    }

    fn is_slow(self) -> bool {
        self == Suite::QTk
    }

    fn is_spherical(self) -> bool {
        matches!(self, Suite::CayleyIntertwining | Suite::SphereStokes | Suite::SphereBp | Suite::SphereCauchy)
    }
}

impl FromStr for Suite {
    type Err = RsqError;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| RsqError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: String,
    pub n: usize,
    pub k: usize,
    pub arithmetic: Arithmetic,
    /// Quadrature orders; empty selects the suite defaults.
    pub orders: Vec<usize>,
    /// Tolerance; `None` selects the suite default.
    pub tol: Option<f64>,
    pub seed: u64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub cap_angle: f64,
    pub base_point: Option<Vec<f64>>,
    pub slow: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: "algebra".into(),
            n: 3,
            k: 1,
            arithmetic: Arithmetic::Exact,
            orders: Vec::new(),
            tol: None,
            seed: 42,
            radius: 1.0,
            cap_angle: std::f64::consts::FRAC_PI_3,
            base_point: None,
            slow: false,
        }
    }
}

impl SuiteConfig {
    pub fn new(suite: &str, n: usize, k: usize) -> Self {
        SuiteConfig { suite: suite.into(), n, k, ..Default::default() }
    }

    pub fn validate(&self) -> Result<Suite> {
        let suite: Suite = self.suite.parse()?;
        if !(3..=5).contains(&self.n) {
            return Err(RsqError::Config(format!("n = {} outside 3..=5", self.n)));
        }
        if self.k > 3 {
            return Err(RsqError::Config(format!("k = {} outside 0..=3", self.k)));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(RsqError::Config("tolerance must be positive".into()));
            }
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(RsqError::Config("radius must be positive".into()));
        }
        if !(self.cap_angle > 0.0 && self.cap_angle < std::f64::consts::PI) {
            return Err(RsqError::Config("cap angle must lie in (0, π)".into()));
        }
        if self.orders.iter().any(|&o| o == 0) {
            return Err(RsqError::Config("quadrature orders must be positive".into()));
        }
        if let Some(p) = &self.base_point {
            let want = if suite.is_spherical() { self.n + 1 } else { self.n };
            if p.len() != want {
                return Err(RsqError::PointArity { block: "base_point".into(), arity: want, got: p.len() });
            }
        }
        if suite.is_spherical() {
            if self.k != 1 {
                return Err(RsqError::Config("spherical suites run with k = 1".into()));
            }
            if self.n > 3 && !self.slow {
                return Err(RsqError::Config("spherical suites above S^3 need --slow".into()));
            }
        }
        if suite.is_slow() && !self.slow {
            return Err(RsqError::Config(format!("suite `{}` is slow; pass --slow", suite.name())));
        }
        Ok(suite)
    }

    pub(crate) fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub(crate) fn orders_or(&self, default: &[usize]) -> Vec<usize> {
        if self.orders.is_empty() {
            default.to_vec()
        } else {
            self.orders.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub paper_anchor: String,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Tolerance test: relative when rhs is above the noise floor, absolute otherwise.
    pub fn from_norms(name: &str, anchor: &str, lhs_norm: f64, rhs_norm: f64, abs_err: f64, tol: f64) -> Self {
        let rel_err = if rhs_norm > NOISE_FLOOR { abs_err / rhs_norm } else { abs_err };
        let pass = rel_err.is_finite() && rel_err <= tol;
        Check {
            name: name.into(),
            paper_anchor: anchor.into(),
            lhs_norm,
            rhs_norm,
            abs_err,
            rel_err,
            tol,
            pass,
            detail: None,
        }
    }

    /// Exact equality; the norms are informational.
    pub fn exact(name: &str, anchor: &str, lhs_norm: f64, rhs_norm: f64, abs_err: f64, equal: bool) -> Self {
        let mut c = Check::from_norms(name, anchor, lhs_norm, rhs_norm, abs_err, 0.0);
        c.pass = equal;
        if equal {
            c.abs_err = 0.0;
            c.rel_err = 0.0;
        }
        c
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    /// Refinement study: `errs` at increasing resolution. Each ratio e_{i+1}/e_i must be at most
    /// `max_ratio` unless the finer error sits below the noise floor.
    pub fn refinement(name: &str, anchor: &str, errs: &[f64], max_ratio: f64) -> Self {
        let mut worst: f64 = 0.0;
        for w in errs.windows(2) {
            let (a, b) = (w[0].max(NOISE_FLOOR), w[1].max(NOISE_FLOOR));
            let r = if w[1] <= NOISE_FLOOR { 0.0 } else { b / a };
            worst = worst.max(r);
        }
        let first = errs.first().copied().unwrap_or(0.0);
        let last = errs.last().copied().unwrap_or(0.0);
        let mut c = Check::from_norms(name, anchor, last, first, 0.0, max_ratio);
        c.abs_err = (first - last).abs();
        c.rel_err = worst;
        c.pass = worst.is_finite() && worst <= max_ratio;
        c.with_detail(format!("errors {errs:?}, worst ratio {worst:.3e}"))
    }
}

/// Accumulates many comparisons into one check, keeping the worst relative error.
#[derive(Debug, Default)]
pub(crate) struct Acc {
    count: usize,
    worst: Option<(f64, f64, f64)>,
    all_equal: bool,
    exact: bool,
}

impl Acc {
    pub fn exact() -> Self {
        Acc { all_equal: true, exact: true, ..Default::default() }
    }

    pub fn float() -> Self {
        Acc { all_equal: true, exact: false, ..Default::default() }
    }

    fn push_norms(&mut self, ln: f64, rn: f64, err: f64, equal: bool) {
        self.count += 1;
        self.all_equal &= equal;
        let rel = |(_, r, e): (f64, f64, f64)| if r > 0.0 { e / r } else { e };
        let cand = (ln, rn, err);
        match self.worst {
            Some(w) if rel(w) >= rel(cand) || rel(cand).is_nan() && !rel(w).is_nan() => {}
            _ => self.worst = Some(cand),
        }
    }

    pub fn poly<S: Scalar>(&mut self, lhs: &MultiPoly<S>, rhs: &MultiPoly<S>) {
        let (ln, rn, err, eq) = poly_compare(lhs, rhs);
        self.push_norms(ln, rn, err, eq);
    }

    pub fn mv<S: Scalar>(&mut self, lhs: &Multivector<S>, rhs: &Multivector<S>) {
        let (ln, rn, err, eq) = mv_compare(lhs, rhs);
        self.push_norms(ln, rn, err, eq);
    }

    pub fn values(&mut self, ln: f64, rn: f64, err: f64) {
        self.push_norms(ln, rn, err, err == 0.0);
    }

    pub fn finish(self, name: &str, anchor: &str, tol: f64) -> Check {
        let (ln, rn, err) = self.worst.unwrap_or((0.0, 0.0, 0.0));
        let c = if self.exact {
            Check::exact(name, anchor, ln, rn, err, self.all_equal)
        } else {
            Check::from_norms(name, anchor, ln, rn, err, tol)
        };
        c.with_detail(format!("{} comparisons", self.count))
    }
}

fn sq_norm<S: Scalar>(m: &Multivector<S>) -> f64 {
    m.coeffs().iter().map(|c| c.to_f64() * c.to_f64()).sum()
}

pub(crate) fn mv_compare<S: Scalar>(a: &Multivector<S>, b: &Multivector<S>) -> (f64, f64, f64, bool) {
    let d = a.sub(b);
    (sq_norm(a).sqrt(), sq_norm(b).sqrt(), sq_norm(&d).sqrt(), d.coeffs().iter().all(|c| c.is_zero()))
}

pub(crate) fn poly_norm<S: Scalar>(p: &MultiPoly<S>) -> f64 {
    p.terms().values().map(sq_norm).sum::<f64>().sqrt()
}

/// Norms of both sides and of their difference, plus exact equality.
pub(crate) fn poly_compare<S: Scalar>(a: &MultiPoly<S>, b: &MultiPoly<S>) -> (f64, f64, f64, bool) {
    match a.try_add(&b.neg()) {
        Ok(d) => (poly_norm(a), poly_norm(b), poly_norm(&d), d.is_zero()),
        Err(_) => (poly_norm(a), poly_norm(b), f64::INFINITY, false),
    }
}

pub(crate) fn rng_for(seed: u64, suite: Suite) -> ChaCha8Rng {
    let mix = suite.name().bytes().fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64));
    ChaCha8Rng::seed_from_u64(seed ^ mix)
}

pub(crate) fn rand_rational<R: Rng>(rng: &mut R) -> Rational {
    Rational::from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3))
}

pub(crate) fn rand_mv<R: Rng>(rng: &mut R, dim: usize, density: f64) -> Multivector<Rational> {
    let coeffs = (0..1usize << dim)
        .map(|_| if rng.gen_bool(density) { rand_rational(rng) } else { Rational::from_i64(0) })
        .collect();
    Multivector::from_coeffs(dim, coeffs).expect("length matches")
}

/// Random rational point on the unit sphere of ℝ^m (inverse stereographic image of a rational point).
pub(crate) fn rational_unit_vector<R: Rng>(rng: &mut R, m: usize) -> Vec<Rational> {
    let t: Vec<Rational> = (0..m - 1).map(|_| Rational::from_ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3))).collect();
    let s: Rational = t.iter().fold(Rational::from_i64(0), |a, x| a + x.clone() * x.clone());
    let d = Rational::from_i64(1) + s.clone();
    let mut v: Vec<Rational> = t.iter().map(|x| Rational::from_i64(2) * x.clone() / d.clone()).collect();
    v.push((s - Rational::from_i64(1)) / d);
    v
}

/// Random homogeneous polynomial of the given degree in `block`, other blocks untouched.
pub(crate) fn rand_homogeneous<R: Rng>(
    rng: &mut R,
    dim: usize,
    blocks: &[(&str, usize)],
    block: &str,
    degree: usize,
    nterms: usize,
) -> MultiPoly<Rational> {
    let mut p = MultiPoly::zero(dim, blocks);
    let (off, ar) = p.block_range(block).expect("known block");
    let mons = crate::spaces::monomials(ar, degree);
    for _ in 0..nterms {
        let m = &mons[rng.gen_range(0..mons.len())];
        let mut e: Exponent = vec![0; p.nvars()];
        e[off..off + ar].copy_from_slice(m);
        p.add_term(e, rand_mv(rng, dim, 0.3));
    }
    p
}

pub(crate) fn random_unit_f64<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 0.1 && r <= 1.0 {
            return v.iter().map(|x| x / r).collect();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    let suite = config.validate()?;
    let start = Instant::now();
    let mut rng = rng_for(config.seed, suite);
    let checks = match suite {
        Suite::Algebra => algebraic::algebra(config, &mut rng)?,
        Suite::Spaces => algebraic::spaces(config, &mut rng)?,
        Suite::Kernel => algebraic::kernel(config, &mut rng)?,
        Suite::MonogenicCauchy => algebraic::monogenic_cauchy(config, &mut rng)?,
        Suite::Stokes => euclid::stokes(config, &mut rng)?,
        Suite::Intertwining => euclid::intertwining(config, &mut rng)?,
        Suite::BorelPompeiu => euclid::borel_pompeiu(config, &mut rng)?,
        Suite::CompactSupport => euclid::compact_support(config, &mut rng)?,
        Suite::Cauchy => euclid::cauchy(config, &mut rng)?,
        Suite::QTk => euclid::q_tk(config, &mut rng)?,
        Suite::CayleyIntertwining => sphere::cayley_intertwining(config, &mut rng)?,
        Suite::SphereStokes => sphere::sphere_stokes(config, &mut rng)?,
        Suite::SphereBp => sphere::sphere_bp(config, &mut rng)?,
        Suite::SphereCauchy => sphere::sphere_cauchy(config, &mut rng)?,
    };
    let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        suite: suite.name().into(),
        config: config.clone(),
        checks,
        pass,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl FromStr for ReportFormat {
    type Err = RsqError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "text" => Ok(ReportFormat::Text),
            _ => Err(RsqError::Config(format!("unknown report format `{s}`"))),
        }
    }
}

pub fn emit_report(report: &VerificationReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut v = serde_json::to_vec_pretty(report)?;
            v.push(b'\n');
            Ok(v)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["suite", "name", "paper_anchor", "lhs_norm", "rhs_norm", "abs_err", "rel_err", "tol", "pass"])
                .map_err(|e| RsqError::Io(e.to_string()))?;
            for c in &report.checks {
                w.write_record([
                    report.suite.clone(),
                    c.name.clone(),
                    c.paper_anchor.clone(),
                    format!("{:e}", c.lhs_norm),
                    format!("{:e}", c.rhs_norm),
                    format!("{:e}", c.abs_err),
                    format!("{:e}", c.rel_err),
                    format!("{:e}", c.tol),
                    c.pass.to_string(),
                ])
                .map_err(|e| RsqError::Io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| RsqError::Io(e.to_string()))
        }
        ReportFormat::Text => {
            let mut s = String::new();
            for c in &report.checks {
                let _ = writeln!(
                    s,
                    "{} {}/{}  rel_err={:.3e} abs_err={:.3e} tol={:.1e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    report.suite,
                    c.name,
                    c.rel_err,
                    c.abs_err,
                    c.tol
                );
            }
            let failed = report.failures().count();
            let _ = writeln!(
                s,
                "{} {}: {} checks, {} failed",
                if report.pass { "PASS" } else { "FAIL" },
                report.suite,
                report.checks.len(),
                failed
            );
            Ok(s.into_bytes())
        }
    }
}

pub fn report_from_json(bytes: &[u8]) -> Result<VerificationReport> {
    Ok(serde_json::from_slice(bytes)?)
}
