//! Intersection theory on the Picard lattice `ZH + ZE_1 + ... + ZE_n` of the
//! blowup of the plane at `n` very general points.
//!
//! A class is stored as `dH - sum m_i E_i`, so the exceptional curve `E_1`
//! has `m_1 = -1`. All comparisons against `sqrt(n)` are done over the
//! integers by squaring after a sign split.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bignum;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Which conjecture, if any, a result depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conditionality {
    Unconditional,
    RequiresNagata,
    RequiresShgh,
}

impl Conditionality {
    pub fn as_str(self) -> &'static str {
        match self {
            Conditionality::Unconditional => "unconditional",
            Conditionality::RequiresNagata => "requires_nagata",
            Conditionality::RequiresShgh => "requires_shgh",
        }
    }
}

/// The blowup of the plane at `n` very general points, together with the
/// conjectures the caller is willing to assume.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Surface {
    n: usize,
    assume_shgh: bool,
    assume_nagata: bool,
}

impl Surface {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_assumptions(n, false, false)
    }

    pub fn with_assumptions(n: usize, assume_shgh: bool, assume_nagata: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoPoints);
        }
        if assume_shgh && !assume_nagata {
            return Err(Error::InconsistentAssumptions);
        }
        Ok(Surface {
            n,
            assume_shgh,
            assume_nagata,
        })
    }

    /// Assumes SHGH, and therefore Nagata.
    pub fn assuming_shgh(mut self) -> Self {
        self.assume_shgh = true;
        self.assume_nagata = true;
        self
    }

    pub fn assuming_nagata(mut self) -> Self {
        self.assume_nagata = true;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn assume_shgh(&self) -> bool {
        self.assume_shgh
    }

    pub fn assume_nagata(&self) -> bool {
        self.assume_nagata
    }

    /// Nagata is a theorem when `n` is a perfect square.
    pub fn is_square(&self) -> bool {
        bignum::is_square_u64(self.n as u64)
    }

    pub fn canonical(&self) -> Divisor {
        Divisor::canonical(self.n)
    }
}

/// The class `dH - sum m_i E_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Divisor {
    #[serde(with = "bignum::number")]
    d: BigInt,
    #[serde(with = "bignum::number::vec")]
    m: Vec<BigInt>,
}

impl Divisor {
    pub fn new(d: impl Into<BigInt>, m: Vec<BigInt>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::NoPoints);
        }
        Ok(Divisor { d: d.into(), m })
    }

    pub fn from_i64(d: i64, m: &[i64]) -> Result<Self> {
        Self::new(d, m.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// The trivial class `O`.
    pub fn zero(n: usize) -> Self {
        Self::uniform(n, 0, 0)
    }

    /// `dH - mE` with all multiplicities equal.
    pub fn uniform(n: usize, d: impl Into<BigInt>, m: impl Into<BigInt>) -> Self {
        assert!(n > 0, "divisor on zero points");
        Divisor {
            d: d.into(),
            m: vec![m.into(); n],
        }
    }

    /// The hyperplane class `H`.
    pub fn line(n: usize) -> Self {
        Self::uniform(n, 1, 0)
    }

    /// The exceptional curve `E_i`, 1-based.
    pub fn exceptional(n: usize, i: usize) -> Self {
        assert!((1..=n).contains(&i), "E_{i} out of range for n = {n}");
        let mut e = Self::zero(n);
        e.m[i - 1] = BigInt::from(-1);
        e
    }

    /// `K = -3H + E`.
    pub fn canonical(n: usize) -> Self {
        Self::uniform(n, -3, -1)
    }

    pub fn n(&self) -> usize {
        self.m.len()
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn m(&self) -> &[BigInt] {
        &self.m
    }

    pub fn multiplicity_sum(&self) -> BigInt {
        self.m.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.d.is_zero() && self.m.iter().all(Zero::is_zero)
    }

    /// True for the classes `E_i`.
    pub fn is_exceptional(&self) -> bool {
        self.d.is_zero()
            && self.m.iter().filter(|x| !x.is_zero()).count() == 1
            && self.m.iter().any(|x| *x == BigInt::from(-1))
    }

    fn check_same(&self, other: &Divisor) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Divisor) -> Result<Divisor> {
        self.check_same(other)?;
        Ok(Divisor {
            d: &self.d + &other.d,
            m: self.m.iter().zip(&other.m).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, other: &Divisor) -> Result<Divisor> {
        self.checked_add(&-other)
    }

    pub fn scaled(&self, k: impl Into<BigInt>) -> Divisor {
        let k = k.into();
        Divisor {
            d: &self.d * &k,
            m: self.m.iter().map(|x| x * &k).collect(),
        }
    }

    /// Multiplicities sorted non-increasing: the orbit representative.
    pub fn canonical_form(&self) -> Divisor {
        let mut m = self.m.clone();
        m.sort_unstable_by(|a, b| b.cmp(a));
        Divisor {
            d: self.d.clone(),
            m,
        }
    }

    /// Nonzero multiplicities in decreasing order, then the zeros. This is the
    /// order used when printing orbit representatives (`E_1`, `15H-5E_1-4E_{2..13}`).
    pub fn display_form(&self) -> Divisor {
        let mut m = self.m.clone();
        m.sort_unstable_by(|a, b| match (a.is_zero(), b.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => b.cmp(a),
        });
        Divisor {
            d: self.d.clone(),
            m,
        }
    }

    pub fn dot(&self, other: &Divisor) -> Result<BigInt> {
        intersect(self, other)
    }
}

impl Neg for &Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        Divisor {
            d: -&self.d,
            m: self.m.iter().map(|x| -x).collect(),
        }
    }
}

impl Add for &Divisor {
    type Output = Divisor;
    /// Panics on mismatched `n`; use [`Divisor::checked_add`] for a `Result`.
    fn add(self, rhs: &Divisor) -> Divisor {
        self.checked_add(rhs)
            .expect("divisors on different surfaces")
    }
}

impl Sub for &Divisor {
    type Output = Divisor;
    fn sub(self, rhs: &Divisor) -> Divisor {
        self.checked_sub(rhs)
            .expect("divisors on different surfaces")
    }
}

impl Mul<&Divisor> for i64 {
    type Output = Divisor;
    fn mul(self, rhs: &Divisor) -> Divisor {
        rhs.scaled(self)
    }
}

/// The intersection form `H^2 = 1`, `E_i^2 = -1`, all mixed products zero.
pub fn intersect(a: &Divisor, b: &Divisor) -> Result<BigInt> {
    a.check_same(b)?;
    let mut acc = &a.d * &b.d;
    for (x, y) in a.m.iter().zip(&b.m) {
        acc -= x * y;
    }
    Ok(acc)
}

pub fn canonical(s: &Surface) -> Divisor {
    Divisor::canonical(s.n())
}

/// Euler characteristic by Riemann-Roch, evaluated two ways.
pub fn chi(dv: &Divisor) -> BigInt {
    let k = Divisor::canonical(dv.n());
    let self_term = intersect(dv, &(dv - &k)).expect("same n");
    debug_assert!(self_term.is_even(), "D.(D-K) is always even");
    let via_form = BigInt::one() + (&self_term >> 1);

    let tri = |x: &BigInt| (x * (x + 1u32)) >> 1;
    let mut via_binomials = ((&dv.d + 1u32) * (&dv.d + 2u32)) >> 1;
    for x in &dv.m {
        via_binomials -= tri(x);
    }
    assert_eq!(via_form, via_binomials, "Riemann-Roch evaluations disagree");
    via_form
}

/// `K - D`.
pub fn serre_dual(dv: &Divisor) -> Divisor {
    &Divisor::canonical(dv.n()) - dv
}

pub fn is_balanced(dv: &Divisor) -> bool {
    let (lo, hi) = min_max(&dv.m);
    hi - lo <= BigInt::one()
}

fn min_max(m: &[BigInt]) -> (&BigInt, &BigInt) {
    let lo = m.iter().min().expect("nonempty");
    let hi = m.iter().max().expect("nonempty");
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rebalanced {
    pub steps: BigInt,
    pub balanced: Divisor,
}

/// Repeatedly lower one largest multiplicity and raise one smallest until the
/// multiplicities are balanced.
///
/// The step count equals the total excess of the sorted multiplicities over
/// the unique balanced vector with the same sum, which is what is computed
/// here; every step of the iterative procedure removes exactly one unit of
/// that excess.
pub fn rebalance(dv: &Divisor) -> Rebalanced {
    let n = BigInt::from(dv.n());
    let mut sorted = dv.m.clone();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let (q, r) = dv.multiplicity_sum().div_mod_floor(&n);
    let r = usize::try_from(&r).expect("remainder below n");

    let mut steps = BigInt::zero();
    let mut target = Vec::with_capacity(sorted.len());
    for (i, x) in sorted.iter().enumerate() {
        let t = if i < r { &q + 1u32 } else { q.clone() };
        if *x > t {
            steps += x - &t;
        }
        target.push(t);
    }
    Rebalanced {
        steps,
        balanced: Divisor {
            d: dv.d.clone(),
            m: target,
        },
    }
}

/// For balanced `D` with `k` entries at the larger multiplicity, `min(k, n - k)`.
pub fn steps_from_equal(dv: &Divisor) -> Result<usize> {
    if !is_balanced(dv) {
        return Err(Error::NotBalanced);
    }
    let (lo, hi) = min_max(&dv.m);
    if lo == hi {
        return Ok(0);
    }
    let k = dv.m.iter().filter(|x| *x == hi).count();
    Ok(k.min(dv.n() - k))
}

/// Decides `2B.D < B.K` for the nef ray `B = sqrt(n) H - E`, i.e.
/// `sqrt(n) (2d + 3) < n + 2 sum m_i`.
pub fn below_nef_wall(dv: &Divisor) -> bool {
    let n = BigInt::from(dv.n());
    let lhs_coeff = BigInt::from(2) * &dv.d + 3u32;
    let rhs = &n + BigInt::from(2) * dv.multiplicity_sum();
    sqrt_times_lt(&n, &lhs_coeff, &rhs)
}

/// `sqrt(n) * a < b`, decided over the integers.
pub(crate) fn sqrt_times_lt(n: &BigInt, a: &BigInt, b: &BigInt) -> bool {
    match (a.sign(), b.sign()) {
        (_, _) if a.is_zero() => b.is_positive(),
        (num_bigint::Sign::Minus, _) if !b.is_negative() => true,
        (num_bigint::Sign::Minus, _) => n * a * a > b * b,
        (_, _) if !b.is_positive() => false,
        _ => n * a * a < b * b,
    }
}

/// The unique `t` with `2 A_t.D = A_t.K`, namely `(n + 2 sum m_i) / (2d + 3)`.
pub fn wall_t(dv: &Divisor) -> Result<Rational> {
    let den = BigInt::from(2) * &dv.d + 3u32;
    if den.is_zero() {
        return Err(Error::DegenerateWall);
    }
    let num = BigInt::from(dv.n()) + BigInt::from(2) * dv.multiplicity_sum();
    Rational::new(num, den)
}

/// Size of the symmetric-group orbit of the multiplicity vector.
pub fn permutation_count(dv: &Divisor) -> BigUint {
    let mut counts: BTreeMap<&BigInt, usize> = BTreeMap::new();
    for x in &dv.m {
        *counts.entry(x).or_default() += 1;
    }
    // multinomial as a product of binomials
    let mut acc = BigUint::one();
    let mut placed = 0usize;
    for c in counts.values() {
        for j in 1..=*c {
            acc *= BigUint::from(placed + j);
            acc /= BigUint::from(j);
        }
        placed += c;
    }
    acc
}

/// The polarization `A_t = tH - E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polarization {
    pub t: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ampleness {
    NotAmple,
    Ample(Conditionality),
    /// Small `n`, where the `A_t` family is not analysed.
    Undecided,
}

impl Polarization {
    pub fn new(t: Rational) -> Self {
        Polarization { t }
    }

    /// `A_t . D = t d - sum m_i`.
    pub fn dot(&self, dv: &Divisor) -> Rational {
        let td = &self.t * &Rational::from_integer(dv.d.clone());
        &td - &Rational::from_integer(dv.multiplicity_sum())
    }

    pub fn ampleness(&self, s: &Surface) -> Ampleness {
        if self.t.cmp_sqrt(s.n() as u64) != Ordering::Greater {
            return Ampleness::NotAmple;
        }
        if s.n() < 10 {
            Ampleness::Undecided
        } else if s.is_square() {
            Ampleness::Ample(Conditionality::Unconditional)
        } else {
            Ampleness::Ample(Conditionality::RequiresNagata)
        }
    }
}
