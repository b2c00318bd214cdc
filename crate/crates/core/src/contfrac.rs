//! Continued fraction of `sqrt(n)` and its convergents.
//!
//! Convergents are indexed from 1: `p_1/q_1 = a_0/1`. With this indexing the
//! odd convergents lie below `sqrt(n)` and the even ones above it, and
//! `p_k q_{k-1} - p_{k-1} q_k = (-1)^k`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bignum::{self, is_square_u64};
use crate::error::{Error, Result};
use crate::picard::{chi, Divisor};

/// `sqrt(n) = [a0; period, period, ...]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    pub a0: u64,
    pub period: Vec<u64>,
}

impl CfExpansion {
    /// Partial quotient `a_i` (0-based, `a_0` first).
    pub fn term(&self, i: usize) -> u64 {
        if i == 0 {
            self.a0
        } else {
            self.period[(i - 1) % self.period.len()]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    pub k: usize,
    #[serde(with = "bignum::string")]
    pub p: BigInt,
    #[serde(with = "bignum::string")]
    pub q: BigInt,
}

/// Periodic expansion of `sqrt(n)` through the `(m, d, a)` surd recurrence.
/// The period ends at the first repeated surd state.
pub fn sqrt_cf(n: u64) -> Result<CfExpansion> {
    if is_square_u64(n) {
        return Err(Error::PerfectSquare(n));
    }
    let a0 = n.isqrt();
    let (mut m, mut d, mut a) = (0u64, 1u64, a0);
    let mut seen: HashMap<(u64, u64), usize> = HashMap::new();
    let mut terms = Vec::new();
    loop {
        m = d * a - m;
        d = (n - m * m) / d;
        a = (a0 + m) / d;
        if let Some(&start) = seen.get(&(m, d)) {
            // purely periodic after a0 for sqrt(n)
            debug_assert_eq!(start, 0);
            break;
        }
        seen.insert((m, d), terms.len());
        terms.push(a);
    }
    debug_assert_eq!(*terms.last().unwrap(), 2 * a0);
    Ok(CfExpansion { a0, period: terms })
}

/// The first `count` convergents of `sqrt(n)`.
pub fn convergents(n: u64, count: usize) -> Result<Vec<Convergent>> {
    let cf = sqrt_cf(n)?;
    Ok(convergents_of(&cf, count))
}

pub(crate) fn convergents_of(cf: &CfExpansion, count: usize) -> Vec<Convergent> {
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (BigInt::from(cf.a0), BigInt::one());
    let mut out = Vec::with_capacity(count);
    for k in 1..=count {
        if k > 1 {
            let a = BigInt::from(cf.term(k - 1));
            let p_next = &a * &p + &p_prev;
            let q_next = &a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
        }
        out.push(Convergent {
            k,
            p: p.clone(),
            q: q.clone(),
        });
    }
    out
}

/// `D_k = ((p_k - 3)/2) H - ((q_k - 1)/2) E` for odd `k`, `10 <= n <= 12`.
pub fn divisor_from_convergent(n: u64, k: usize) -> Result<Divisor> {
    if !(10..=12).contains(&n) {
        return Err(Error::UnsupportedN(n as usize));
    }
    if k == 0 || k.is_even() {
        return Err(Error::Integrality(format!(
            "convergent index {k} must be a positive odd integer"
        )));
    }
    let c = convergents(n, k)?.pop().expect("k >= 1");
    if c.p.is_even() || c.q.is_even() {
        return Err(Error::Integrality(format!(
            "p_{k} = {}, q_{k} = {} are not both odd",
            c.p, c.q
        )));
    }
    let d = (&c.p - 3) / 2;
    let m = (&c.q - 1) / 2;
    let dv = Divisor::uniform(n as usize, d, m);
    let x = chi(&dv);
    if !x.is_one() {
        return Err(Error::Inconsistent(format!("chi(D_{k}) = {x}, expected 1")));
    }
    Ok(dv)
}
