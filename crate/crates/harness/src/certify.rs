//! Randomized certificate sweeps over the scalar test-function catalog.
//!
//! Every sample draws a terminal `c` and a point `x` from the entry's window
//! and an order `α`. Margins are `bound - observed`, so a certificate passes
//! when its worst margin is at least `-tol`. First-order margins are divided
//! by `1 + |x-c|^(1+p-α)` so one tolerance covers the whole window; the
//! integer-order limits are measured relative to `1 + |target|` against an
//! allowance of `1e-2`.

use std::io::Write;

use fracgd::bounds::{
    certify_order2_bound, certify_sandwich, certify_smooth_bound, certify_uniform_convex_bound,
    default_tolerance, k_constants,
};
use fracgd::caputo::{relation_residual, CaputoEvaluator};
use fracgd::catalog::{scalar_catalog, CatalogEntry};
use fracgd::oracle::ScalarOracle;
use fracgd::quadrature::QuadratureConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HarnessError, Result};
use crate::output::fmt_f64;

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-6;
/// Order offset used for the integer-order limit checks.
pub const LIMIT_OFFSET: f64 = 1e-4;
/// Relative allowance for the integer-order limit checks.
pub const LIMIT_ALLOWANCE: f64 = 1e-2;

pub const CERTIFY_COLUMNS: [&str; 6] = [
    "function",
    "certificate",
    "checks",
    "worst_margin",
    "tol",
    "pass",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyRow {
    pub function: String,
    pub certificate: &'static str,
    pub checks: usize,
    pub worst_margin: f64,
    pub tol: f64,
}

impl CertifyRow {
    pub fn pass(&self) -> bool {
        self.worst_margin >= -self.tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyReport {
    pub catalog: String,
    pub rows: Vec<CertifyRow>,
}

impl CertifyReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(CertifyRow::pass)
    }

    pub fn total_checks(&self) -> usize {
        self.rows.iter().map(|r| r.checks).sum()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CERTIFY_COLUMNS)?;
        for r in &self.rows {
            w.write_record([
                r.function.clone(),
                r.certificate.to_string(),
                r.checks.to_string(),
                fmt_f64(r.worst_margin),
                fmt_f64(r.tol),
                r.pass().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Tally {
    certificate: &'static str,
    checks: usize,
    worst: f64,
}

impl Tally {
    fn new(certificate: &'static str) -> Self {
        Self {
            certificate,
            checks: 0,
            worst: f64::INFINITY,
        }
    }

    fn add(&mut self, margin: f64) {
        self.checks += 1;
        // NaN margins must fail.
        self.worst = if margin.is_nan() {
            f64::NEG_INFINITY
        } else {
            self.worst.min(margin)
        };
    }
}

fn sample_pair(rng: &mut ChaCha8Rng, e: &CatalogEntry) -> (f64, f64) {
    let (lo, hi) = (e.window.lo(), e.window.hi());
    loop {
        let c = rng.random_range(lo..hi);
        let x = rng.random_range(lo..hi);
        if (x - c).abs() > 1e-3 {
            return (c, x);
        }
    }
}

fn core_err(name: &str, e: fracgd::Error) -> HarnessError {
    HarnessError::Config(format!("{name}: {e}"))
}

fn certify_entry(
    e: &CatalogEntry,
    samples: usize,
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> Result<Vec<CertifyRow>> {
    let q = QuadratureConfig::default();
    let f = &e.function;
    let smooth_order = e.profile.p() == 1.0;
    let has_second = f.deriv2(0.5 * (e.window.lo() + e.window.hi())).is_some();
    let near_one = CaputoEvaluator::new(1.0 - LIMIT_OFFSET, q).map_err(|x| core_err(&e.name, x))?;
    let near_zero = CaputoEvaluator::new(LIMIT_OFFSET, q).map_err(|x| core_err(&e.name, x))?;

    let mut smooth = Tally::new("holder-smooth");
    let mut convex = Tally::new("uniform-convex");
    let mut order2 = Tally::new("order2-sandwich");
    let mut sandwich = Tally::new("k1-k2-sandwich");
    let mut lim1 = Tally::new("limit-order-one");
    let mut lim0 = Tally::new("limit-order-zero");
    let mut relation = Tally::new("relation-identity");
    let err = |x| core_err(&e.name, x);
    for _ in 0..samples {
        let (c, x) = sample_pair(rng, e);
        let alpha = rng.random_range(0.05..0.95);
        let scale = default_tolerance(&e.profile, alpha, c, x) / 1e-6;
        smooth.add(certify_smooth_bound(f, &e.profile, alpha, c, x, q).map_err(err)? / scale);
        convex
            .add(certify_uniform_convex_bound(f, &e.profile, alpha, c, x, q).map_err(err)? / scale);

        let s = if x > c { 1.0 } else { -1.0 };
        let want = s * f.deriv1(x);
        let got = near_one.eval(f, c, x).map_err(err)?;
        lim1.add(LIMIT_ALLOWANCE - (got - want).abs() / (1.0 + want.abs()));
        let want = f.value(x) - f.value(c);
        let got = near_zero.eval(f, c, x).map_err(err)?;
        lim0.add(LIMIT_ALLOWANCE - (got - want).abs() / (1.0 + want.abs()));

        if smooth_order {
            let a2 = rng.random_range(1.05..2.0);
            let (up, lo) = certify_order2_bound(f, &e.profile, a2, c, x, q).map_err(err)?;
            order2.add(up.min(lo));
            let beta = rng.random_range(-1.0..1.0);
            let k = k_constants(&e.profile, alpha, beta).map_err(err)?;
            sandwich.add(certify_sandwich(f, &k, alpha, beta, c, x, q).map_err(err)?);
        }
        if has_second {
            let r = relation_residual(f, alpha, c, x, q).map_err(err)?;
            relation.add(-r.gap());
        }
    }
    Ok([smooth, convex, order2, sandwich, lim1, lim0, relation]
        .into_iter()
        .filter(|t| t.checks > 0)
        .map(|t| CertifyRow {
            function: e.name.clone(),
            certificate: t.certificate,
            checks: t.checks,
            worst_margin: t.worst,
            tol,
        })
        .collect())
}

/// Sweeps catalog `name` with `samples` draws per function from a ChaCha
/// stream seeded by `seed`. Unknown and empty catalogs are config errors.
pub fn certify_catalog(name: &str, samples: usize, seed: u64, tol: f64) -> Result<CertifyReport> {
    let entries = scalar_catalog(name).ok_or_else(|| {
        HarnessError::Config(format!(
            "unknown catalog {name:?} (expected quadratics, polynomials, holder or all)"
        ))
    })?;
    if entries.is_empty() {
        return Err(HarnessError::Config(format!(
            "catalog {name:?} has no functions"
        )));
    }
    if samples == 0 {
        return Err(HarnessError::Config("samples must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for e in &entries {
        rows.extend(certify_entry(e, samples, &mut rng, tol)?);
    }
    Ok(CertifyReport {
        catalog: name.to_string(),
        rows,
    })
}
