//! Multiplicative number theory and exponential sums.
//!
//! Everything here is exact integer arithmetic except the Kloosterman sum,
//! which is evaluated in `f64` with a tracked error bound.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted by the factorization and exponential-sum routines.
pub const MAX_MODULUS: u64 = 1 << 31;

/// Largest dimension accepted by [`count_rq`].
pub const MAX_COUNT_DIM: usize = 8;

/// Rational lower bounds `num / den < zeta(d)` for `d = 2, 3`.
///
/// zeta(2) = 1.6449340..., zeta(3) = 1.2020569...
pub const ZETA_LOWER_BOUNDS: [(usize, u128, u128); 2] = [(2, 16449, 10000), (3, 12020, 10000)];

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// gcd of a slice, with gcd of the empty slice equal to 0.
pub fn gcd_slice(xs: &[i128]) -> i128 {
    xs.iter().fold(0, |g, &x| gcd(g, x))
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let quot = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
        (old_t, t) = (t, old_t - quot * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `q` in `[0, q)`, if it exists. For `q = 1` this is 0.
pub fn mod_inv(a: i128, q: u64) -> Option<u64> {
    let m = q as i128;
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m) as u64)
}

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactoredInt {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInt {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Factorization of a divisor `m` of `self`, derived without trial division.
    pub fn divisor(&self, m: u64) -> Option<FactoredInt> {
        if m == 0 || self.value % m != 0 {
            return None;
        }
        let mut rest = m;
        let mut factors = Vec::new();
        for &(p, _) in &self.factors {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            if e > 0 {
                factors.push((p, e));
            }
        }
        debug_assert_eq!(rest, 1);
        Some(FactoredInt { value: m, factors })
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let current = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..current {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Factorizes `n` by trial division over a 2-3 wheel.
pub fn factorize(n: u64) -> Result<FactoredInt> {
    if n == 0 || n > MAX_MODULUS {
        return Err(Error::OutOfRange { value: n as i128, min: 1, max: MAX_MODULUS as i128 });
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut take = |p: u64, rest: &mut u64| {
        let mut e = 0;
        while *rest % p == 0 {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    take(2, &mut rest);
    take(3, &mut rest);
    let mut p = 5u64;
    while p * p <= rest {
        take(p, &mut rest);
        take(p + 2, &mut rest);
        p += 6;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(FactoredInt { value: n, factors })
}

pub fn euler_phi(q: &FactoredInt) -> u64 {
    q.factors.iter().fold(1, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
}

pub fn mobius(q: &FactoredInt) -> i64 {
    if q.factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if q.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Number of positive divisors.
pub fn divisor_count(q: &FactoredInt) -> u64 {
    q.factors.iter().map(|&(_, e)| e as u64 + 1).product()
}

fn checked_pow(base: u128, exp: u32, what: &'static str) -> Result<u128> {
    base.checked_pow(exp).ok_or(Error::Overflow(what))
}

/// `#R_q = q^d prod_{p | q} (1 - p^{-d})`, evaluated exactly as
/// `prod p^{(e-1)d} (p^d - 1)`.
pub fn count_rq(q: &FactoredInt, d: usize) -> Result<u128> {
    if d == 0 || d > MAX_COUNT_DIM {
        return Err(Error::OutOfRange { value: d as i128, min: 1, max: MAX_COUNT_DIM as i128 });
    }
    let cap = 1u128 << 127;
    let d = d as u32;
    let mut acc: u128 = 1;
    for &(p, e) in &q.factors {
        let pd = checked_pow(p as u128, d, "p^d")?;
        let head = checked_pow(p as u128, (e - 1) * d, "p^((e-1)d)")?;
        let term = head.checked_mul(pd - 1).ok_or(Error::Overflow("count_rq"))?;
        acc = acc.checked_mul(term).ok_or(Error::Overflow("count_rq"))?;
        if acc > cap {
            return Err(Error::Overflow("count_rq"));
        }
    }
    Ok(acc)
}

/// Index of the congruence subgroup `Gamma_{0,d}(q)` in `SL_d(Z)`:
/// `q^{d-1} prod_{p | q} (1 - p^{-d}) / (1 - p^{-1})`.
pub fn gamma0_index(q: &FactoredInt, d: usize) -> Result<u128> {
    if d == 0 {
        return Err(Error::DimensionTooSmall(0));
    }
    let d = d as u32;
    let mut acc: u128 = 1;
    for &(p, e) in &q.factors {
        let p = p as u128;
        let head = checked_pow(p, (e - 1) * (d - 1), "gamma0_index")?;
        // (p^d - 1) / (p - 1) = 1 + p + ... + p^{d-1}
        let geom = (0..d).try_fold(0u128, |s, k| {
            checked_pow(p, k, "gamma0_index").and_then(|pk| s.checked_add(pk).ok_or(Error::Overflow("gamma0_index")))
        })?;
        acc = acc
            .checked_mul(head)
            .and_then(|x| x.checked_mul(geom))
            .ok_or(Error::Overflow("gamma0_index"))?;
    }
    Ok(acc)
}

/// `[Gamma_{0,d}(q / ell) : Gamma_{0,d}(q)]` for a divisor `ell` of `q`.
pub fn gamma0_index_ratio(q: &FactoredInt, ell: u64, d: usize) -> Result<u128> {
    let Some(qm) = q.divisor(q.value / ell.max(1)).filter(|_| ell > 0 && q.value % ell == 0) else {
        return Err(Error::InvalidArgument(format!("{ell} does not divide {}", q.value)));
    };
    let num = gamma0_index(q, d)?;
    let den = gamma0_index(&qm, d)?;
    debug_assert_eq!(num % den, 0);
    Ok(num / den)
}

/// Checks `#R_q * zeta(d) > q^d` with a certified rational lower bound on zeta(d).
/// Returns `None` for dimensions without a tabulated bound.
pub fn rq_exceeds_zeta_bound(q: &FactoredInt, d: usize) -> Option<bool> {
    let &(_, num, den) = ZETA_LOWER_BOUNDS.iter().find(|b| b.0 == d)?;
    let count = count_rq(q, d).ok()?;
    let qd = (q.value as u128).checked_pow(d as u32)?;
    Some(count.checked_mul(num)? > qd.checked_mul(den)?)
}

/// Riemann zeta at an integer `s >= 2`, via Euler-Maclaurin with 64 terms.
pub fn zeta(s: u32) -> f64 {
    assert!(s >= 2, "zeta diverges at s = {s}");
    let n = 64.0f64;
    let sf = s as f64;
    let head: f64 = (1..64).map(|k| (k as f64).powf(-sf)).sum();
    let tail = n.powf(1.0 - sf) / (sf - 1.0) + 0.5 * n.powf(-sf) + sf * n.powf(-sf - 1.0) / 12.0
        - sf * (sf + 1.0) * (sf + 2.0) * n.powf(-sf - 3.0) / 720.0;
    head + tail
}

/// A complex exponential sum with a bound on its accumulated floating error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpSumValue {
    pub re: f64,
    pub im: f64,
    pub abs_err: f64,
}

impl ExpSumValue {
    pub fn exact(re: f64) -> Self {
        ExpSumValue { re, im: 0.0, abs_err: 0.0 }
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Per-summand error budget: argument reduction to (-pi, pi] plus one
/// libm call, plus compensated summation.
const TERM_ERR_ULPS: f64 = 12.0;

/// Neumaier-compensated accumulator for the real and imaginary parts.
#[derive(Default)]
struct CompensatedSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
    terms: u64,
}

impl CompensatedSum {
    fn add_angle(&mut self, k: u128, q: u128) {
        // centre the residue so the angle lies in (-pi, pi]
        let k = k as i128;
        let q = q as i128;
        let centred = if 2 * k > q { k - q } else { k };
        let theta = TAU * (centred as f64) / (q as f64);
        let (s, c) = theta.sin_cos();
        self.push(c, s);
    }

    fn push(&mut self, c: f64, s: f64) {
        neumaier(&mut self.re, &mut self.re_c, c);
        neumaier(&mut self.im, &mut self.im_c, s);
        self.terms += 1;
    }

    fn finish(self) -> ExpSumValue {
        ExpSumValue {
            re: self.re + self.re_c,
            im: self.im + self.im_c,
            abs_err: TERM_ERR_ULPS * f64::EPSILON * self.terms as f64,
        }
    }
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

/// `sum_k e(k / q)` over residues `k` in `[0, q)`, compensated and with a
/// tracked error bound.
pub(crate) fn exp_sum_residues<I: IntoIterator<Item = u128>>(ks: I, q: u128) -> ExpSumValue {
    let mut acc = CompensatedSum::default();
    for k in ks {
        acc.add_angle(k, q);
    }
    acc.finish()
}

/// Kloosterman sum `S(a, b; q) = sum_{u in (Z/qZ)^x} e((a u^{-1} + b u) / q)`.
pub fn kloosterman(a: i64, b: i64, q: u64) -> Result<ExpSumValue> {
    if q == 0 || q > MAX_MODULUS {
        return Err(Error::OutOfRange { value: q as i128, min: 1, max: MAX_MODULUS as i128 });
    }
    let qq = q as u128;
    let a = (a as i128).rem_euclid(q as i128) as u128;
    let b = (b as i128).rem_euclid(q as i128) as u128;
    let mut acc = CompensatedSum::default();
    for u in 1..=q {
        if gcd_u64(u, q) != 1 {
            continue;
        }
        let ubar = mod_inv(u as i128, q).expect("unit") as u128;
        let k = (a * ubar + b * (u as u128 % qq)) % qq;
        acc.add_angle(k, qq);
    }
    Ok(acc.finish())
}

/// Precomputed roots of unity and inverses for many sums at one modulus.
pub struct ExpSumTable {
    q: u64,
    units: Vec<(u64, u64)>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl ExpSumTable {
    pub const MAX_TABLE_MODULUS: u64 = 1 << 22;

    pub fn new(q: u64) -> Result<Self> {
        if q == 0 || q > Self::MAX_TABLE_MODULUS {
            return Err(Error::TooLarge { what: "table modulus", size: q as u128, cap: Self::MAX_TABLE_MODULUS as u128 });
        }
        let units = (1..=q)
            .filter(|&u| gcd_u64(u, q) == 1)
            .map(|u| (u % q, mod_inv(u as i128, q).expect("unit")))
            .collect();
        let (mut cos, mut sin) = (Vec::with_capacity(q as usize), Vec::with_capacity(q as usize));
        for k in 0..q as i128 {
            let centred = if 2 * k > q as i128 { k - q as i128 } else { k };
            let (s, c) = (TAU * centred as f64 / q as f64).sin_cos();
            cos.push(c);
            sin.push(s);
        }
        Ok(ExpSumTable { q, units, cos, sin })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn kloosterman(&self, a: i64, b: i64) -> ExpSumValue {
        // q <= 2^22 keeps a * ubar + b * u inside u64
        let q = self.q;
        let a = (a as i128).rem_euclid(q as i128) as u64;
        let b = (b as i128).rem_euclid(q as i128) as u64;
        let mut acc = CompensatedSum::default();
        for &(u, ubar) in &self.units {
            let k = ((a * ubar + b * u) % q) as usize;
            acc.push(self.cos[k], self.sin[k]);
        }
        acc.finish()
    }
}

/// Ramanujan sum `c_q(n) = mu(q/g) phi(q) / phi(q/g)` with `g = gcd(n, q)`.
pub fn ramanujan_sum(n: i64, q: &FactoredInt) -> i64 {
    let g = gcd(n as i128, q.value as i128) as u64;
    let m = q.divisor(q.value / g).expect("q/g divides q");
    mobius(&m) * (euler_phi(q) / euler_phi(&m)) as i64
}

/// Outcome of testing `|S(a,b;q)| <= sqrt(q) gcd(a,b,q)^{1/2} sigma_0(q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeilReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub holds: bool,
}

pub fn weil_rhs(a: i64, b: i64, q: &FactoredInt) -> f64 {
    let g = gcd(gcd(a as i128, b as i128), q.value as i128) as f64;
    (q.value as f64).sqrt() * g.sqrt() * divisor_count(q) as f64
}

pub fn check_weil(a: i64, b: i64, q: &FactoredInt) -> Result<WeilReport> {
    let s = kloosterman(a, b, q.value)?;
    Ok(weil_report(s, a, b, q))
}

pub fn weil_report(s: ExpSumValue, a: i64, b: i64, q: &FactoredInt) -> WeilReport {
    let lhs = s.abs();
    let rhs = weil_rhs(a, b, q);
    WeilReport { lhs, rhs, abs_err: s.abs_err, holds: lhs <= rhs + s.abs_err }
}

/// `sum_{r in R_q} e(n . r / q)` for `n in Z^d`, evaluated exactly as
/// `sum_{e | gcd(n, q)} mu(q/e) e^d`.
pub fn jordan_ramanujan_sum(n: &[i64], q: &FactoredInt) -> Result<i128> {
    let d = n.len() as u32;
    let g = n.iter().fold(q.value as i128, |g, &x| gcd(g, x as i128)) as u64;
    let gf = q.divisor(g).expect("gcd divides q");
    let mut total: i128 = 0;
    for e in gf.divisors() {
        let mu = mobius(&q.divisor(q.value / e).expect("divisor"));
        if mu == 0 {
            continue;
        }
        let ed = (e as i128).checked_pow(d).ok_or(Error::Overflow("jordan_ramanujan_sum"))?;
        total += mu as i128 * ed;
    }
    Ok(total)
}
