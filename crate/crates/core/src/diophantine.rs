//! Pell-type equations behind the divisor classification.
//!
//! `x^2 - n y^2 = N` is solved by listing the fundamental solution of every
//! class inside the classical Nagell bounds and closing under the unit group.
//! The shape equation
//!
//! ```text
//! (2d + 3)^2 - n (2m + 1)^2 + 8 k m = C
//! ```
//!
//! reduces with `u = 2d + 3`, `v = 2m + 1`, `w = n v - 2k` to
//! `w^2 - n u^2 = 4k^2 - 4kn - nC` together with `u` odd and
//! `w = n - 2k (mod 2n)`. The automorphism of a solution chain is the
//! smallest power of the fundamental unit, up to sign, that preserves those
//! congruences.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bignum::{self, exact_sqrt, is_square_u64};
use crate::contfrac::{convergents_of, sqrt_cf};
use crate::error::{Error, Result};
use crate::par::{self, Execution};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PellSolution {
    #[serde(with = "bignum::string")]
    pub x: BigInt,
    #[serde(with = "bignum::string")]
    pub y: BigInt,
}

impl PellSolution {
    fn new(x: BigInt, y: BigInt) -> Self {
        PellSolution { x, y }
    }

    pub fn norm(&self, n: u64) -> BigInt {
        &self.x * &self.x - BigInt::from(n) * &self.y * &self.y
    }
}

/// Product in `Z[sqrt(n)]`.
fn unit_mul(n: &BigInt, a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    (&a.0 * &b.0 + n * &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

/// Least positive solution of `x^2 - n y^2 = 1`, read off the convergents.
pub fn pell_fundamental(n: u64) -> Result<PellSolution> {
    let cf = sqrt_cf(n)?;
    let len = cf.period.len();
    let idx = if len.is_even() { len } else { 2 * len };
    let c = convergents_of(&cf, idx).pop().expect("idx >= 1");
    let sol = PellSolution::new(c.p, c.q);
    assert!(
        sol.norm(n).is_one(),
        "convergent {idx} of sqrt({n}) is not a unit"
    );
    Ok(sol)
}

const SEARCH_CHUNK: u64 = 2048;

/// One representative per class of solutions of `x^2 - n y^2 = big_n`
/// (with both signs of `x`), found inside the Nagell bounds.
pub fn class_representatives(n: u64, big_n: &BigInt, exec: Execution) -> Result<Vec<PellSolution>> {
    if big_n.is_zero() {
        return Ok(vec![PellSolution::new(BigInt::zero(), BigInt::zero())]);
    }
    let unit = pell_fundamental(n)?;
    let nb = BigInt::from(n);
    let abs_n = big_n.abs();
    // y^2 <= y1^2 |N| / (2 (x1 +- 1))
    let denom = if big_n.is_positive() {
        BigInt::from(2) * (&unit.x + 1)
    } else {
        BigInt::from(2) * (&unit.x - 1)
    };
    let y_max_sq: BigInt = &unit.y * &unit.y * &abs_n / denom;
    let y_max = y_max_sq.sqrt();
    let y_min = if big_n.is_positive() {
        BigInt::zero()
    } else {
        // smallest y with n y^2 >= |N|
        let mut y = (&abs_n / &nb).sqrt();
        while &nb * &y * &y < abs_n {
            y += 1;
        }
        y
    };
    let (lo, hi) = match (y_min.to_u64(), y_max.to_u64()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "search range for x^2 - {n} y^2 = {big_n} is too large"
            )))
        }
    };
    let found = par::flat_map_range(exec, lo, hi, SEARCH_CHUNK, |a, b| {
        let mut out = Vec::new();
        for y in a..=b {
            let y = BigInt::from(y);
            let rhs = big_n + &nb * &y * &y;
            if let Some(x) = exact_sqrt(&rhs) {
                if !x.is_zero() {
                    out.push(PellSolution::new(-&x, y.clone()));
                }
                out.push(PellSolution::new(x, y));
            }
        }
        out
    });
    Ok(found)
}

/// The first `limit` solutions of `x^2 - n y^2 = big_n` with `x, y > 0`,
/// ascending in `y`.
pub fn gen_pell_positive_solutions(
    n: u64,
    big_n: &BigInt,
    limit: usize,
) -> Result<Vec<PellSolution>> {
    gen_pell_positive_solutions_with(n, big_n, limit, Execution::default())
}

pub fn gen_pell_positive_solutions_with(
    n: u64,
    big_n: &BigInt,
    limit: usize,
    exec: Execution,
) -> Result<Vec<PellSolution>> {
    if is_square_u64(n) {
        return Err(Error::PerfectSquare(n));
    }
    if big_n.is_zero() || limit == 0 {
        return Ok(Vec::new());
    }
    let unit = pell_fundamental(n)?;
    let nb = BigInt::from(n);
    let eps = (unit.x.clone(), unit.y.clone());
    let eps_inv = (unit.x.clone(), -unit.y.clone());
    let reps = class_representatives(n, big_n, exec)?;

    let mut found: BTreeSet<(BigInt, BigInt)> = BTreeSet::new();
    for r in &reps {
        for sign in [1i32, -1] {
            // start a few steps back so every positive member of the class is reached
            let mut p = (r.x.clone() * sign, r.y.clone() * sign);
            for _ in 0..3 {
                p = unit_mul(&nb, &p, &eps_inv);
            }
            for _ in 0..(limit + 6) {
                if p.0.is_positive() && p.1.is_positive() {
                    found.insert((p.1.clone(), p.0.clone()));
                }
                p = unit_mul(&nb, &p, &eps);
            }
        }
    }
    let out: Vec<PellSolution> = found
        .into_iter()
        .take(limit)
        .map(|(y, x)| PellSolution::new(x, y))
        .collect();
    for s in &out {
        assert_eq!(&s.norm(n), big_n, "emitted non-solution");
    }
    Ok(out)
}

/// `(d, m) -> (a d + b m + c, e d + f m + g)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineMap {
    #[serde(with = "bignum::string")]
    pub a: BigInt,
    #[serde(with = "bignum::string")]
    pub b: BigInt,
    #[serde(with = "bignum::string")]
    pub c: BigInt,
    #[serde(with = "bignum::string")]
    pub e: BigInt,
    #[serde(with = "bignum::string")]
    pub f: BigInt,
    #[serde(with = "bignum::string")]
    pub g: BigInt,
}

impl AffineMap {
    pub fn identity() -> Self {
        AffineMap {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            e: BigInt::zero(),
            f: BigInt::one(),
            g: BigInt::zero(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn apply(&self, p: &(BigInt, BigInt)) -> (BigInt, BigInt) {
        (
            &self.a * &p.0 + &self.b * &p.1 + &self.c,
            &self.e * &p.0 + &self.f * &p.1 + &self.g,
        )
    }

    /// Inverse of a map whose linear part has determinant 1.
    pub fn inverse(&self) -> AffineMap {
        debug_assert!((&self.a * &self.f - &self.b * &self.e).is_one());
        let (a, b, e, f) = (
            self.f.clone(),
            -self.b.clone(),
            -self.e.clone(),
            self.a.clone(),
        );
        let c = -(&a * &self.c + &b * &self.g);
        let g = -(&e * &self.c + &f * &self.g);
        AffineMap { a, b, c, e, f, g }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainPoint {
    #[serde(with = "bignum::string")]
    pub d: BigInt,
    #[serde(with = "bignum::string")]
    pub m: BigInt,
}

impl ChainPoint {
    pub fn new(d: impl Into<BigInt>, m: impl Into<BigInt>) -> Self {
        ChainPoint {
            d: d.into(),
            m: m.into(),
        }
    }

    fn pair(&self) -> (BigInt, BigInt) {
        (self.d.clone(), self.m.clone())
    }
}

/// Solutions of `(2d+3)^2 - n(2m+1)^2 + 8km = rhs` of the form
/// `transform^j (fundamental)`, `j` in `Z`. For square `n` the solution set
/// is finite and every chain is a single point with the identity transform.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionChain {
    pub n: u64,
    pub k: u64,
    #[serde(with = "bignum::string")]
    pub rhs: BigInt,
    pub fundamental: ChainPoint,
    pub transform: AffineMap,
}

impl SolutionChain {
    pub fn satisfies(&self, p: &(BigInt, BigInt)) -> bool {
        shape_residual(self.n, self.k, p) == self.rhs
    }

    pub fn is_finite(&self) -> bool {
        self.transform.is_identity()
    }

    /// Elements `transform^j (fundamental)` for `-depth <= j <= depth`, in
    /// increasing `j`. A finite chain yields just its fundamental point.
    pub fn window(&self, depth: usize) -> Vec<(i64, ChainPoint)> {
        let base = self.fundamental.pair();
        if self.is_finite() {
            return vec![(0, self.fundamental.clone())];
        }
        let inv = self.transform.inverse();
        let mut back = Vec::with_capacity(depth);
        let mut p = base.clone();
        for j in 1..=depth {
            p = inv.apply(&p);
            back.push((-(j as i64), ChainPoint::new(p.0.clone(), p.1.clone())));
        }
        back.reverse();
        back.push((0, self.fundamental.clone()));
        let mut p = base;
        for j in 1..=depth {
            p = self.transform.apply(&p);
            back.push((j as i64, ChainPoint::new(p.0.clone(), p.1.clone())));
        }
        back
    }
}

/// `(2d+3)^2 - n(2m+1)^2 + 8km`.
pub fn shape_residual(n: u64, k: u64, p: &(BigInt, BigInt)) -> BigInt {
    let u = BigInt::from(2) * &p.0 + 3;
    let v = BigInt::from(2) * &p.1 + 1;
    &u * &u - BigInt::from(n) * &v * &v + BigInt::from(8 * k) * &p.1
}

struct ShapeForm {
    n: BigInt,
    k: BigInt,
}

impl ShapeForm {
    /// `(w, u)` to `(d, m)` when the congruence and parity conditions hold.
    fn to_dm(&self, w: &BigInt, u: &BigInt) -> Option<(BigInt, BigInt)> {
        if u.is_even() {
            return None;
        }
        let (v, r) = (w + BigInt::from(2) * &self.k).div_rem(&self.n);
        if !r.is_zero() || v.is_even() {
            return None;
        }
        Some(((u - 3) / 2, (v - 1) / 2))
    }

    fn to_wu(&self, p: &(BigInt, BigInt)) -> (BigInt, BigInt) {
        let v = BigInt::from(2) * &p.1 + 1;
        (
            &self.n * v - BigInt::from(2) * &self.k,
            BigInt::from(2) * &p.0 + 3,
        )
    }
}

fn chain_key(p: &(BigInt, BigInt)) -> (BigInt, BigInt, BigInt, BigInt) {
    let u: BigInt = BigInt::from(2) * &p.0 + 3;
    let v: BigInt = BigInt::from(2) * &p.1 + 1;
    let (u, v) = (u.abs(), v.abs());
    (u, v, p.0.clone(), p.1.clone())
}

/// Smallest `j >= 1` and sign `s` such that `s * eps^j` fixes the residue
/// class `w = n - 2k (mod 2n)`, `u = 1 (mod 2)`. Returns `(s, X, Y)` with
/// `X + Y sqrt(n) = eps^j`.
fn stabilizer(n: u64, k: u64, unit: &PellSolution) -> (usize, i32, BigInt, BigInt) {
    let nb = BigInt::from(n);
    let two_n = BigInt::from(2 * n);
    let w0 = (BigInt::from(n) - BigInt::from(2 * k)).mod_floor(&two_n);
    let u0 = BigInt::one();
    let eps = (unit.x.clone(), unit.y.clone());
    let mut pow = eps.clone();
    // the unit group acts on Z/2n x Z/2 through a finite quotient
    for j in 1..=(16 * n * n) as usize {
        for s in [1i32, -1] {
            let (x, y) = (&pow.0 * s, &pow.1 * s);
            let w1 = (&x * &w0 + &nb * &y * &u0).mod_floor(&two_n);
            let u1 = (&y * &w0 + &x * &u0).mod_floor(&BigInt::from(2));
            if w1 == w0 && u1 == u0 {
                return (j, s, pow.0, pow.1);
            }
        }
        pow = unit_mul(&nb, &pow, &eps);
    }
    unreachable!("no stabilizing unit for n = {n}, k = {k}");
}

fn chain_transform(n: u64, k: u64, s: i32, x: &BigInt, y: &BigInt) -> AffineMap {
    let nb = BigInt::from(n);
    let kb = BigInt::from(k);
    let sx = x * s;
    let sy = y * s;
    let a = sx.clone();
    let b = &nb * &sy;
    let c2: BigInt = &sy * &nb - BigInt::from(2) * &kb * &sy + BigInt::from(3) * &sx - 3;
    let shift = BigInt::from(2) * &kb * (BigInt::one() - &sx);
    let (shift_q, shift_r) = shift.div_rem(&nb);
    assert!(shift_r.is_zero(), "stabilizer does not preserve w mod n");
    let g2: BigInt = &sx + BigInt::from(3) * &sy + shift_q - 1;
    assert!(
        c2.is_even() && g2.is_even(),
        "stabilizer does not preserve parity"
    );
    AffineMap {
        a,
        b,
        c: c2 / 2,
        e: sy.clone(),
        f: sx,
        g: g2 / 2,
    }
}

/// Every solution chain of `(2d+3)^2 - n(2m+1)^2 + 8km = rhs`, sorted by
/// `(|d|, |m|)` of the fundamental point, then `(d, m)`.
pub fn quad_with_linear(n: u64, k: u64, rhs: &BigInt) -> Result<Vec<SolutionChain>> {
    quad_with_linear_with(n, k, rhs, Execution::default())
}

pub fn quad_with_linear_with(
    n: u64,
    k: u64,
    rhs: &BigInt,
    exec: Execution,
) -> Result<Vec<SolutionChain>> {
    if n == 0 {
        return Err(Error::NoPoints);
    }
    let form = ShapeForm {
        n: BigInt::from(n),
        k: BigInt::from(k),
    };
    let kb = BigInt::from(k);
    let nb = BigInt::from(n);
    let reduced = BigInt::from(4) * &kb * &kb - BigInt::from(4) * &kb * &nb - &nb * rhs;

    let mut chains = if is_square_u64(n) {
        square_branch(n, k, rhs, &form, &reduced)?
    } else {
        pell_branch(n, k, rhs, &form, &reduced, exec)?
    };
    chains.sort_by(|x, y| {
        let kx = (
            x.fundamental.d.abs(),
            x.fundamental.m.abs(),
            &x.fundamental.d,
            &x.fundamental.m,
        );
        let ky = (
            y.fundamental.d.abs(),
            y.fundamental.m.abs(),
            &y.fundamental.d,
            &y.fundamental.m,
        );
        kx.cmp(&ky)
    });
    for ch in &chains {
        assert!(
            ch.satisfies(&ch.fundamental.pair()),
            "fundamental off the quadratic"
        );
    }
    Ok(chains)
}

fn square_branch(
    n: u64,
    k: u64,
    rhs: &BigInt,
    form: &ShapeForm,
    reduced: &BigInt,
) -> Result<Vec<SolutionChain>> {
    let root = BigInt::from(n.isqrt());
    if reduced.is_zero() {
        return Err(Error::InvalidArgument(format!(
            "shape equation for n = {n}, k = {k} degenerates to a pair of lines"
        )));
    }
    // (w - r u)(w + r u) = reduced
    let abs = reduced.abs();
    let mut divisors = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= abs {
        if (&abs % &i).is_zero() {
            divisors.push(i.clone());
            divisors.push(&abs / &i);
        }
        i += 1;
    }
    let mut points = BTreeSet::new();
    for a in divisors {
        for a in [a.clone(), -a] {
            let b = reduced / &a;
            let (w2, u2r) = (&a + &b, &b - &a);
            if w2.is_odd() {
                continue;
            }
            let (u, rem) = u2r.div_rem(&(BigInt::from(2) * &root));
            if !rem.is_zero() {
                continue;
            }
            if let Some(p) = form.to_dm(&(w2 / 2), &u) {
                points.insert(p);
            }
        }
    }
    Ok(points
        .into_iter()
        .map(|(d, m)| SolutionChain {
            n,
            k,
            rhs: rhs.clone(),
            fundamental: ChainPoint::new(d, m),
            transform: AffineMap::identity(),
        })
        .collect())
}

fn pell_branch(
    n: u64,
    k: u64,
    rhs: &BigInt,
    form: &ShapeForm,
    reduced: &BigInt,
    exec: Execution,
) -> Result<Vec<SolutionChain>> {
    if reduced.is_zero() {
        // only w = u = 0, and u must be odd
        return Ok(Vec::new());
    }
    let unit = pell_fundamental(n)?;
    let nb = BigInt::from(n);
    let (period, s, x, y) = stabilizer(n, k, &unit);
    let transform = chain_transform(n, k, s, &x, &y);
    let inverse = transform.inverse();
    let reps = class_representatives(n, reduced, exec)?;

    // all cosets of the stabilizer: sign * rep * eps^i, 0 <= i < j
    let eps = (unit.x.clone(), unit.y.clone());
    let mut starts = Vec::new();
    for r in &reps {
        for sign in [1i32, -1] {
            let mut p = (&r.x * sign, &r.y * sign);
            for _ in 0..period {
                if let Some(dm) = form.to_dm(&p.0, &p.1) {
                    starts.push(dm);
                }
                p = unit_mul(&nb, &p, &eps);
            }
        }
    }

    let mut fundamentals = BTreeSet::new();
    for p in starts {
        let mut cur = p;
        loop {
            let fwd = transform.apply(&cur);
            let back = inverse.apply(&cur);
            let key = chain_key(&cur);
            if chain_key(&fwd) < key {
                cur = fwd;
            } else if chain_key(&back) < key {
                cur = back;
            } else {
                break;
            }
        }
        debug_assert_eq!(
            form.to_dm(&form.to_wu(&cur).0, &form.to_wu(&cur).1),
            Some(cur.clone())
        );
        fundamentals.insert(cur);
    }
    Ok(fundamentals
        .into_iter()
        .map(|(d, m)| SolutionChain {
            n,
            k,
            rhs: rhs.clone(),
            fundamental: ChainPoint::new(d, m),
            transform: transform.clone(),
        })
        .collect())
}

/// Applies the chain transform `times` times; negative counts use the inverse.
pub fn chain_apply(chain: &SolutionChain, element: &ChainPoint, times: i64) -> Result<ChainPoint> {
    let mut p = element.pair();
    if !chain.satisfies(&p) {
        return Err(Error::OffQuadratic {
            d: element.d.to_string(),
            m: element.m.to_string(),
        });
    }
    let map = if times < 0 {
        chain.transform.inverse()
    } else {
        chain.transform.clone()
    };
    for _ in 0..times.unsigned_abs() {
        p = map.apply(&p);
    }
    debug_assert!(chain.satisfies(&p));
    Ok(ChainPoint::new(p.0, p.1))
}
