//! Counting lattice points in balls by triangular enumeration.

use serde::{Deserialize, Serialize};

use super::SublatticeBasis;
use crate::error::{Error, Result};
use crate::numtheory::gcd;

/// Centered ball in scaled coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "norm", content = "radius", rename_all = "snake_case")]
pub enum Region {
    LInf(f64),
    L2(f64),
}

impl Region {
    pub fn radius(&self) -> f64 {
        match *self {
            Region::LInf(r) | Region::L2(r) => r,
        }
    }

    /// Lebesgue measure of the region in `R^d`.
    pub fn volume(&self, d: usize) -> f64 {
        match *self {
            Region::LInf(r) => (2.0 * r).powi(d as i32),
            Region::L2(r) => {
                let n = d as f64;
                std::f64::consts::PI.powf(n / 2.0) / gamma_half_integer(d + 2) * r.powi(d as i32)
            }
        }
    }
}

/// `Gamma(k / 2)` for a positive integer `k`.
fn gamma_half_integer(k: usize) -> f64 {
    let mut g = if k % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut x = if k % 2 == 0 { 1.0 } else { 0.5 };
    while x < k as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountKind {
    /// nonzero lattice points
    All,
    /// primitive lattice points
    Primitive,
}

/// Cap on the number of points visited by one count.
pub const MAX_COUNT_VISITS: u64 = 50_000_000;

struct Counter<'a> {
    lat: &'a SublatticeBasis,
    rho: f64,
    l2: bool,
    kind: CountKind,
    coeffs: Vec<i128>,
    count: u64,
    visits: u64,
}

impl Counter<'_> {
    fn walk(&mut self, level: usize, partial_sq: f64) -> Result<()> {
        let j = level - 1;
        let h = self.lat.basis();
        let d = self.lat.dim();
        let s: f64 = (j + 1..d).map(|i| self.coeffs[i] as f64 * h[(i, j)] as f64).sum();
        let p = h[(j, j)] as f64;
        let room = if self.l2 { (self.rho * self.rho - partial_sq).max(0.0).sqrt() } else { self.rho };
        let lo = ((-room - s) / p).ceil() as i128;
        let hi = ((room - s) / p).floor() as i128;
        for c in lo..=hi {
            self.visits += 1;
            if self.visits > MAX_COUNT_VISITS {
                return Err(Error::TooLarge { what: "lattice points visited", size: self.visits as u128, cap: MAX_COUNT_VISITS as u128 });
            }
            let y = c as f64 * p + s;
            let sq = partial_sq + y * y;
            if self.l2 && sq > self.rho * self.rho {
                continue;
            }
            self.coeffs[j] = c;
            if j == 0 {
                let nonzero = self.coeffs.iter().any(|&x| x != 0);
                let ok = match self.kind {
                    CountKind::All => nonzero,
                    CountKind::Primitive => self.coeffs.iter().fold(0, |g, &x| gcd(g, x)) == 1,
                };
                if ok {
                    self.count += 1;
                }
            } else {
                self.walk(j, sq)?;
            }
        }
        self.coeffs[j] = 0;
        Ok(())
    }
}

/// Number of nonzero (or primitive) points of the scaled lattice in `region`.
pub fn count_points(lat: &SublatticeBasis, region: Region, kind: CountKind) -> Result<u64> {
    let r = region.radius();
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let d = lat.dim();
    let mut counter = Counter {
        lat,
        rho: r / lat.scale(),
        l2: matches!(region, Region::L2(_)),
        kind,
        coeffs: vec![0; d],
        count: 0,
        visits: 0,
    };
    counter.walk(d, 0.0)?;
    Ok(counter.count)
}
