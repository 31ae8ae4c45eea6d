//! Samples of rescaled circulant diameters and covering radii over `R_q`,
//! and convergence reports between moduli.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::derive_seed;
use super::distribution::{ks_two_sample, EmpiricalDistribution};
use crate::circulant::CirculantGraph;
use crate::error::{Error, Result};
use crate::lattices::{covering_radius_l1, unimodular_from_residue};
use crate::residues::sample_rq;

/// One sampled `a in R_q` with both routes to `Psi_d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiSample {
    pub q: u64,
    pub a: Vec<u64>,
    pub diam: u16,
    /// `diam / q^{1/d}`
    pub rescaled: f64,
    pub rho_lo: f64,
    pub rho_hi: f64,
}

impl PsiSample {
    /// Whether `q^{1/d} rho - d/2 <= diam <= q^{1/d} rho` holds within `eps`.
    pub fn sandwich_ok(&self, eps: f64) -> bool {
        let d = self.a.len() as f64;
        let root = (self.q as f64).powf(1.0 / d);
        let diam = self.diam as f64;
        root * self.rho_lo - d / 2.0 - eps * root <= diam && diam <= root * self.rho_hi + eps * root
    }

    pub fn value(&self, route: PsiRoute) -> f64 {
        match route {
            PsiRoute::Diameter => self.rescaled,
            PsiRoute::CoveringRadius => 0.5 * (self.rho_lo + self.rho_hi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiRoute {
    /// `diam(C_q(a)) / q^{1/d}`
    Diameter,
    /// `rho(P, L_{q,a})`
    CoveringRadius,
}

/// Seed of sample `i` at modulus `q`.
fn sample_seed(master: u64, q: u64, i: u64) -> u64 {
    derive_seed(derive_seed(master, q), i)
}

/// `n` seeded samples at modulus `q`, evaluated in parallel, returned in index order.
pub fn psi_samples(q: u64, d: usize, n: u64, seed: u64, eps: f64) -> Result<Vec<PsiSample>> {
    if q < 2 {
        return Err(Error::OutOfRange { value: q as i128, min: 2, max: crate::numtheory::MAX_MODULUS as i128 });
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let a = sample_rq(q, d, sample_seed(seed, q, i))?;
            let diam = CirculantGraph::from_residue(&a).diameter()?;
            let rho = covering_radius_l1(&unimodular_from_residue(&a)?, eps)?;
            Ok(PsiSample {
                q,
                a: a.coords().to_vec(),
                diam,
                rescaled: diam as f64 / (q as f64).powf(1.0 / d as f64),
                rho_lo: rho.lo,
                rho_hi: rho.hi,
            })
        })
        .collect()
}

/// Empirical distribution of the chosen route at modulus `q`.
pub fn psi_empirical(q: u64, d: usize, n: u64, seed: u64, eps: f64, route: PsiRoute) -> Result<EmpiricalDistribution> {
    let samples = psi_samples(q, d, n, seed, eps)?;
    Ok(EmpiricalDistribution::new(samples.iter().map(|s| s.value(route)).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CcdfPoint {
    #[serde(rename = "R")]
    pub r: f64,
    pub ccdf: f64,
}

/// CCDF on the grid `0, step, 2 step, ...` up to the first point where it vanishes.
pub fn ccdf_grid(dist: &EmpiricalDistribution, step: f64) -> Vec<CcdfPoint> {
    let max = dist.samples().last().copied().unwrap_or(0.0);
    let n = (max / step).floor() as usize + 1;
    (0..=n)
        .map(|k| {
            // strip the representation noise of k * step
            let r = (k as f64 * step * 1e12).round() / 1e12;
            CcdfPoint { r, ccdf: dist.ccdf(r) }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceConfig {
    pub d: usize,
    pub q_list: Vec<u64>,
    pub n_samples: u64,
    pub eps: f64,
    pub route: PsiRoute,
    pub ccdf_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub version: String,
    pub seed: u64,
    pub config: ConvergenceConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QResult {
    pub q: u64,
    pub n: u64,
    /// filled in by callers that write the raw samples to disk
    pub samples_file: Option<String>,
    pub mean: f64,
    pub ccdf_grid: Vec<CcdfPoint>,
    /// KS distance to the largest-q ensemble
    pub ks_to_ref: f64,
    /// KS distance to the previous modulus in the list
    pub ks_to_prev: Option<f64>,
    pub sandwich_violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub meta: ReportMeta,
    pub results: Vec<QResult>,
    /// number of `i < j` (both below the reference) with `ks_to_ref[i] <= ks_to_ref[j]`
    pub ks_inversions: usize,
    pub ks_decreasing: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
    #[serde(skip)]
    pub samples: Vec<Vec<PsiSample>>,
}

/// Empirical distributions at each `q` in `config.q_list`, compared by KS
/// distance with each other and with the largest modulus. A single modulus
/// gives a plain distribution report.
pub fn convergence_report(config: &ConvergenceConfig, seed: u64) -> Result<ExperimentReport> {
    let start = Instant::now();
    if config.q_list.is_empty() || config.q_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("q_list must be non-empty and ascending".into()));
    }
    if !(config.ccdf_step > 0.0) {
        return Err(Error::InvalidArgument("ccdf_step must be positive".into()));
    }
    let mut samples = Vec::with_capacity(config.q_list.len());
    let mut dists = Vec::with_capacity(config.q_list.len());
    for &q in &config.q_list {
        let s = psi_samples(q, config.d, config.n_samples, seed, config.eps)?;
        dists.push(EmpiricalDistribution::new(s.iter().map(|x| x.value(config.route)).collect()));
        samples.push(s);
    }
    let reference = dists.last().expect("non-empty q_list");
    let mut results = Vec::new();
    for (i, &q) in config.q_list.iter().enumerate() {
        results.push(QResult {
            q,
            n: dists[i].len() as u64,
            samples_file: None,
            mean: dists[i].mean(),
            ccdf_grid: ccdf_grid(&dists[i], config.ccdf_step),
            ks_to_ref: ks_two_sample(&dists[i], reference),
            ks_to_prev: (i > 0).then(|| ks_two_sample(&dists[i - 1], &dists[i])),
            sandwich_violations: samples[i].iter().filter(|s| !s.sandwich_ok(config.eps)).count() as u64,
        });
    }
    let ks: Vec<f64> = results[..results.len() - 1].iter().map(|r| r.ks_to_ref).collect();
    let mut inversions = 0;
    for i in 0..ks.len() {
        for j in i + 1..ks.len() {
            if ks[i] <= ks[j] {
                inversions += 1;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    Ok(ExperimentReport {
        meta: ReportMeta { version: env!("CARGO_PKG_VERSION").to_string(), seed, config: config.clone() },
        results,
        ks_inversions: inversions,
        ks_decreasing: inversions == 0,
        runtime_seconds: Some(elapsed),
        samples,
    })
}
