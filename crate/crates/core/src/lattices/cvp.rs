//! Exact closest vectors in the l1 norm by depth-first enumeration on the
//! triangular basis.

use serde::Serialize;

use super::SublatticeBasis;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvpResult {
    /// Closest lattice point (scaled coordinates).
    pub point: Vec<f64>,
    /// Its coefficients with respect to the HNF basis.
    pub coeffs: Vec<i128>,
    /// l1 distance from the target (scaled).
    pub dist: f64,
}

struct Search<'a> {
    h: &'a crate::matrix::IntMatrix,
    y: &'a [f64],
    d: usize,
    tol: f64,
    coeffs: Vec<i128>,
    best: f64,
    best_coeffs: Vec<i128>,
}

impl Search<'_> {
    /// Coordinate `j` of the target minus the contribution of levels above `j`.
    fn target(&self, j: usize) -> f64 {
        let mut t = self.y[j];
        for i in j + 1..self.d {
            t -= self.coeffs[i] as f64 * self.h[(i, j)] as f64;
        }
        t
    }

    fn offer(&mut self, dist: f64) {
        let better = dist < self.best - self.tol
            || (dist <= self.best + self.tol && self.coeffs < self.best_coeffs);
        if better {
            self.best = dist;
            self.best_coeffs.clone_from(&self.coeffs);
        }
    }

    fn descend(&mut self, level: usize, partial: f64) {
        let j = level - 1;
        let t = self.target(j);
        let p = self.h[(j, j)] as f64;
        let room = self.best + self.tol - partial;
        if room < 0.0 {
            return;
        }
        let lo = ((t - room) / p).ceil() as i128;
        let hi = ((t + room) / p).floor() as i128;
        for c in lo..=hi {
            let cost = partial + (t - c as f64 * p).abs();
            if cost > self.best + self.tol {
                continue;
            }
            self.coeffs[j] = c;
            if j == 0 {
                self.offer(cost);
            } else {
                self.descend(j, cost);
            }
        }
    }
}

/// Lattice point nearest to `x` in the l1 norm. Ties go to the
/// lexicographically smallest coefficient vector.
pub fn cvp_l1(lat: &SublatticeBasis, x: &[f64]) -> Result<CvpResult> {
    let d = lat.dim();
    if x.len() != d {
        return Err(Error::InvalidArgument(format!("point has dimension {}, lattice {d}", x.len())));
    }
    if lat.pivots().contains(&0) {
        return Err(Error::SingularBasis);
    }
    let h = lat.basis();
    let y: Vec<f64> = x.iter().map(|v| v / lat.scale()).collect();
    let scale_y = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * scale_y * d as f64;

    // Greedy rounding from the top level gives the initial bound.
    let mut s = Search { h, y: &y, d, tol, coeffs: vec![0; d], best: f64::INFINITY, best_coeffs: vec![] };
    let mut dist = 0.0;
    for j in (0..d).rev() {
        let t = s.target(j);
        let c = (t / h[(j, j)] as f64).round() as i128;
        s.coeffs[j] = c;
        dist += (t - c as f64 * h[(j, j)] as f64).abs();
    }
    s.best = dist;
    s.best_coeffs = s.coeffs.clone();
    s.descend(d, 0.0);

    let v = lat.combine(&s.best_coeffs);
    let point: Vec<f64> = v.iter().map(|&c| c as f64 * lat.scale()).collect();
    let dist = y.iter().zip(&v).map(|(a, &b)| (a - b as f64).abs()).sum::<f64>() * lat.scale();
    Ok(CvpResult { point, coeffs: s.best_coeffs, dist })
}

/// l1 distance from `x` to the lattice.
pub fn dist_l1(lat: &SublatticeBasis, x: &[f64]) -> Result<f64> {
    cvp_l1(lat, x).map(|r| r.dist)
}
