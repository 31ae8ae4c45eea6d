//! Word-metric distances on the finite group `Z^d / L` with generators
//! `+-e_i`, by breadth-first search over box representatives.

use std::collections::VecDeque;

use super::SublatticeBasis;
use crate::error::{Error, Result};

/// Largest index for which the quotient graph is materialized.
pub const MAX_QUOTIENT_SIZE: u128 = 1 << 26;

/// Distances from the identity in the Cayley graph of `Z^d / L`.
///
/// Vertices are the integer points of the box `prod [0, h_ii)`, indexed in
/// mixed radix with the first coordinate varying slowest.
#[derive(Debug, Clone)]
pub struct QuotientGraph {
    lat: SublatticeBasis,
    radix: Vec<i64>,
    dist: Vec<u16>,
}

impl QuotientGraph {
    pub fn new(lat: &SublatticeBasis) -> Result<Self> {
        let size = lat.index();
        if size <= 0 {
            return Err(Error::SingularBasis);
        }
        if size as u128 > MAX_QUOTIENT_SIZE {
            return Err(Error::TooLarge { what: "quotient group order", size: size as u128, cap: MAX_QUOTIENT_SIZE });
        }
        let d = lat.dim();
        let radix: Vec<i64> = lat.pivots().iter().map(|&h| h as i64).collect();
        let n = size as usize;
        let mut dist = vec![u16::MAX; n];
        let mut queue = VecDeque::with_capacity(n.min(1 << 20));
        dist[0] = 0;
        queue.push_back(0usize);
        let mut g = QuotientGraph { lat: lat.clone(), radix, dist: Vec::new() };
        let mut v = vec![0i64; d];
        while let Some(idx) = queue.pop_front() {
            let next = dist[idx].checked_add(1).ok_or(Error::TooLarge {
                what: "word-metric distance",
                size: u16::MAX as u128 + 1,
                cap: u16::MAX as u128,
            })?;
            for i in 0..d {
                for step in [1i64, -1] {
                    g.decode_into(idx, &mut v);
                    v[i] += step;
                    g.reduce_from(&mut v, i);
                    let j = g.encode(&v);
                    if dist[j] == u16::MAX {
                        dist[j] = next;
                        queue.push_back(j);
                    }
                }
            }
        }
        g.dist = dist;
        Ok(g)
    }

    pub fn lattice(&self) -> &SublatticeBasis {
        &self.lat
    }

    pub fn order(&self) -> usize {
        self.dist.len()
    }

    /// Reduces coordinates `0..=top` into the box, assuming the rest already are.
    fn reduce_from(&self, v: &mut [i64], top: usize) {
        let h = self.lat.basis();
        for j in (0..=top).rev() {
            let k = v[j].div_euclid(self.radix[j]);
            if k != 0 {
                for (c, x) in v.iter_mut().enumerate().take(j + 1) {
                    *x -= k * h[(j, c)] as i64;
                }
            }
        }
    }

    fn encode(&self, v: &[i64]) -> usize {
        v.iter().zip(&self.radix).fold(0usize, |acc, (&x, &r)| acc * r as usize + x as usize)
    }

    fn decode_into(&self, mut idx: usize, v: &mut [i64]) {
        for j in (0..v.len()).rev() {
            let r = self.radix[j] as usize;
            v[j] = (idx % r) as i64;
            idx /= r;
        }
    }

    /// Word-metric length of the class of the integer vector `m`.
    pub fn distance(&self, m: &[i128]) -> u16 {
        let r = self.lat.reduce(m);
        let v: Vec<i64> = r.iter().map(|&x| x as i64).collect();
        self.dist[self.encode(&v)]
    }

    pub fn distance_of_index(&self, idx: usize) -> u16 {
        self.dist[idx]
    }

    /// Box representative for a vertex index.
    pub fn vertex(&self, idx: usize) -> Vec<i64> {
        let mut v = vec![0i64; self.radix.len()];
        self.decode_into(idx, &mut v);
        v
    }

    /// Vertex index of the class of an integer vector.
    pub fn index_of(&self, m: &[i64]) -> usize {
        let mut v = m.to_vec();
        let top = v.len() - 1;
        self.reduce_from(&mut v, top);
        self.encode(&v)
    }

    pub fn diameter(&self) -> u16 {
        self.dist.iter().copied().max().unwrap_or(0)
    }
}
