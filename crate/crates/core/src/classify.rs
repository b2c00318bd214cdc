//! Classes `D` with `chi(D) >= chi_target` lying strictly below the nef wall
//! `2B.D < B.K`, enumerated up to permutation of the exceptional curves.
//!
//! Balanced candidates `dH - mE' - (m-1)E''` with `|E''| = k` satisfy
//! `(2d+3)^2 - n(2m+1)^2 + 8km = 8 chi - 8 + (9 - n)`, which is handed to the
//! Pell solver. Unbalanced candidates are one rebalancing step away from a
//! balanced class of larger Euler characteristic.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::bignum;
use crate::diophantine::{quad_with_linear_with, ChainPoint, SolutionChain};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::picard::{
    below_nef_wall, chi, is_balanced, permutation_count, rebalance, steps_from_equal, wall_t,
    Conditionality, Divisor, Surface,
};
use crate::rational::Rational;

/// Where an orbit sits inside a solution chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRef {
    /// Number of entries carrying the smaller multiplicity.
    pub k: u64,
    pub fundamental: ChainPoint,
    /// Power of the chain transform taking the fundamental point here.
    pub index: i64,
}

/// One symmetric-group orbit of classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeOrbit {
    #[serde(rename = "divisor")]
    pub representative: Divisor,
    #[serde(with = "bignum::number")]
    pub copies: BigInt,
    pub family: Option<String>,
    pub conditionality: Conditionality,
    pub t_wall: Rational,
    #[serde(with = "bignum::number")]
    pub chi: BigInt,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chain: Option<ChainRef>,
}

impl TypeOrbit {
    fn new(
        representative: Divisor,
        conditionality: Conditionality,
        chain: Option<ChainRef>,
    ) -> Self {
        let representative = representative.canonical_form();
        TypeOrbit {
            copies: BigInt::from(permutation_count(&representative)),
            t_wall: wall_t(&representative).expect("2d + 3 is odd"),
            chi: chi(&representative),
            representative,
            family: None,
            conditionality,
            chain,
        }
    }

    /// The orbit member used for printing: nonzero multiplicities first.
    pub fn display_divisor(&self) -> Divisor {
        self.representative.display_form()
    }
}

/// Descending wall, then ascending Euler characteristic, then divisor.
pub fn orbit_order(a: &TypeOrbit, b: &TypeOrbit) -> Ordering {
    b.t_wall
        .cmp(&a.t_wall)
        .then_with(|| a.chi.cmp(&b.chi))
        .then_with(|| a.representative.cmp(&b.representative))
}

/// `(n - 1) / 8`; every admissible class has `chi` strictly below it.
pub fn chi_strict_bound(s: &Surface) -> Rational {
    Rational::new(s.n() as i64 - 1, 8).expect("nonzero denominator")
}

fn below_chi_bound(n: usize, c: u64) -> bool {
    8 * c + 1 < n as u64
}

/// Largest `l` with `l < (n - sqrt((8 chi + 1) n)) / 2`, or `None` when no
/// `l >= 0` qualifies.
pub fn max_steps_from_equal(s: &Surface, chi_d: u64) -> Option<usize> {
    let n = s.n() as i128;
    let prod = (8 * chi_d as i128 + 1) * n;
    // l qualifies iff n - 2l > 0 and prod < (n - 2l)^2
    (0..=(n / 2) as usize)
        .take_while(|&l| {
            let r = n - 2 * l as i128;
            r > 0 && prod < r * r
        })
        .last()
}

fn check_supported(n: usize) -> Result<()> {
    if (10..=17).contains(&n) || n == 25 {
        Ok(())
    } else {
        Err(Error::UnsupportedN(n))
    }
}

fn conditionality_for(s: &Surface) -> Conditionality {
    if s.is_square() {
        Conditionality::Unconditional
    } else {
        Conditionality::RequiresNagata
    }
}

fn shape_divisor(n: usize, k: u64, p: &ChainPoint) -> Divisor {
    let hi = p.m.clone();
    let lo = &p.m - 1;
    let k = k as usize;
    let mut m = vec![hi; n - k];
    m.extend(std::iter::repeat_n(lo, k));
    Divisor::new(p.d.clone(), m).expect("n > 0")
}

fn admissible(dv: &Divisor) -> bool {
    !dv.d().is_negative() && below_nef_wall(dv)
}

/// Family label for the six infinite families on thirteen points.
fn thirteen_label(k: u64, fundamental: &ChainPoint) -> Option<&'static str> {
    let f = (fundamental.d.to_i64()?, fundamental.m.to_i64()?);
    Some(match (k, f) {
        (0, (0, 0)) => "I",
        (0, (-3, 0)) => "II",
        (1, (-3, 0)) => "III",
        (1, (0, 0)) => "IV",
        (12, (0, 0)) => "V",
        (12, (-3, 0)) => "VI",
        _ => return None,
    })
}

struct ShapeJob {
    chi: u64,
    k: u64,
}

fn expand_chain(n: usize, k: u64, chain: &SolutionChain, depth: usize) -> Vec<(Divisor, ChainRef)> {
    let mut members: Vec<(Divisor, ChainRef)> = chain
        .window(2 * depth + 2)
        .into_iter()
        .filter_map(|(j, p)| {
            let dv = shape_divisor(n, k, &p);
            admissible(&dv).then(|| {
                (
                    dv,
                    ChainRef {
                        k,
                        fundamental: chain.fundamental.clone(),
                        index: j,
                    },
                )
            })
        })
        .collect();
    members.sort_by(|a, b| a.0.d().cmp(b.0.d()));
    members.truncate(depth);
    members
}

/// All admissible orbits with `chi >= chi_target`, each infinite chain cut
/// to its first `chain_depth` members by degree.
pub fn enumerate_types(s: &Surface, chi_target: u64, chain_depth: usize) -> Result<Vec<TypeOrbit>> {
    enumerate_types_with(s, chi_target, chain_depth, Execution::default())
}

pub fn enumerate_types_with(
    s: &Surface,
    chi_target: u64,
    chain_depth: usize,
    exec: Execution,
) -> Result<Vec<TypeOrbit>> {
    let n = s.n();
    check_supported(n)?;
    if chain_depth == 0 {
        return Err(Error::InvalidArgument(
            "chain depth must be positive".into(),
        ));
    }
    if chi_target == 0 {
        return Err(Error::InvalidArgument("chi target must be positive".into()));
    }
    let cond = conditionality_for(s);

    let mut jobs = Vec::new();
    let mut c = chi_target;
    while below_chi_bound(n, c) {
        if let Some(l) = max_steps_from_equal(s, c) {
            let ks: BTreeSet<u64> = (0..=l as u64)
                .chain((n - l) as u64..n as u64)
                .filter(|&k| k < n as u64)
                .collect();
            jobs.extend(ks.into_iter().map(|k| ShapeJob { chi: c, k }));
        }
        c += 1;
    }

    let per_job = par::map(exec, &jobs, |job| -> Result<Vec<TypeOrbit>> {
        let rhs = BigInt::from(8 * job.chi) - 8 + 9 - n as i64;
        let chains = quad_with_linear_with(n as u64, job.k, &rhs, Execution::Sequential)?;
        let mut out = Vec::new();
        for chain in &chains {
            let label = if n == 13 {
                thirteen_label(job.k, &chain.fundamental)
            } else {
                None
            };
            for (dv, cref) in expand_chain(n, job.k, chain, chain_depth) {
                let mut orbit = TypeOrbit::new(dv, cond, Some(cref));
                orbit.family = label.map(str::to_string);
                debug_assert_eq!(orbit.chi, BigInt::from(job.chi));
                out.push(orbit);
            }
        }
        Ok(out)
    });
    let mut orbits = Vec::new();
    for part in per_job {
        orbits.extend(part?);
    }

    // one step from a balanced orbit of larger chi
    let mut unbalanced = Vec::new();
    for t in &orbits {
        unbalanced.extend(one_step_unbalanced(t, chi_target, cond));
    }
    orbits.extend(unbalanced);

    orbits.sort_by(orbit_order);
    orbits.dedup_by(|a, b| a.representative == b.representative);
    for o in &orbits {
        assert!(o.chi >= BigInt::from(chi_target) && below_nef_wall(&o.representative));
    }
    Ok(orbits)
}

fn one_step_unbalanced(t: &TypeOrbit, chi_target: u64, cond: Conditionality) -> Vec<TypeOrbit> {
    let rep = &t.representative;
    let values: BTreeSet<&BigInt> = rep.m().iter().collect();
    let mut out = Vec::new();
    for &a in &values {
        for &b in &values {
            let i = rep.m().iter().position(|x| x == a).expect("present");
            let Some(j) = rep
                .m()
                .iter()
                .enumerate()
                .position(|(idx, x)| x == b && idx != i)
            else {
                continue;
            };
            let mut m = rep.m().to_vec();
            m[i] += 1;
            m[j] -= 1;
            let dv = Divisor::new(rep.d().clone(), m).expect("same n");
            if is_balanced(&dv) || rebalance(&dv).steps != BigInt::one() {
                continue;
            }
            if chi(&dv) >= BigInt::from(chi_target) && admissible(&dv) {
                out.push(TypeOrbit::new(dv, cond, None));
            }
        }
    }
    out
}

/// The six labelled families on thirteen points, `depth` members each.
pub fn classify_n13(depth: usize) -> Result<Vec<TypeOrbit>> {
    let s = Surface::new(13)?;
    let orbits = enumerate_types(&s, 1, depth)?;
    assert!(
        orbits.iter().all(|o| o.family.is_some()),
        "unlabelled orbit on 13 points"
    );
    Ok(orbits)
}

/// One row of the `chi >= 1` table on twenty-five points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct N25Row {
    pub orbit: TypeOrbit,
    /// `2B.D` for `B = 5H - E`.
    #[serde(with = "bignum::number")]
    pub two_b_dot_d: BigInt,
}

/// All orbits with `chi >= 1` on twenty-five points, by decreasing wall.
pub fn n25_chi1_table() -> Result<Vec<N25Row>> {
    let s = Surface::new(25)?;
    let orbits = enumerate_types(&s, 1, 1)?;
    let rows: Vec<N25Row> = orbits
        .into_iter()
        .map(|orbit| {
            let dv = &orbit.representative;
            let two_b_dot_d = BigInt::from(2) * (BigInt::from(5) * dv.d() - dv.multiplicity_sum());
            N25Row { orbit, two_b_dot_d }
        })
        .collect();
    for r in &rows {
        // B.K = 10 on twenty-five points, so every row sits at or below 8
        assert!(r.two_b_dot_d < BigInt::from(10));
    }
    Ok(rows)
}

/// Sufficient test for lying below the nef wall: balanced, effective,
/// multiplicities at least zero, `chi` in range and close enough to equal.
pub fn verify_sufficient(dv: &Divisor, chi_d: &BigInt) -> Result<bool> {
    if !is_balanced(dv) {
        return Err(Error::Precondition("divisor is not balanced".into()));
    }
    if dv.d().is_negative() || dv.m().iter().any(Signed::is_negative) {
        return Err(Error::Precondition(
            "degree and multiplicities must be nonnegative".into(),
        ));
    }
    let actual = chi(dv);
    if &actual != chi_d {
        return Err(Error::Precondition(format!(
            "chi(D) = {actual}, not {chi_d}"
        )));
    }
    if actual < BigInt::one() {
        return Err(Error::Precondition(format!("chi(D) = {actual} is below 1")));
    }
    let Some(c) = actual.to_u64() else {
        return Ok(false);
    };
    let s = Surface::new(dv.n())?;
    if !below_chi_bound(dv.n(), c) {
        return Ok(false);
    }
    let ok = match max_steps_from_equal(&s, c) {
        Some(l) => steps_from_equal(dv)? <= l,
        None => false,
    };
    if ok {
        assert!(
            below_nef_wall(dv),
            "sufficient condition held but D is not below the wall"
        );
    }
    Ok(ok)
}

/// `enumerate_types` over several surfaces at once.
pub fn enumerate_many(
    surfaces: &[Surface],
    chi_target: u64,
    chain_depth: usize,
    exec: Execution,
) -> Vec<Result<Vec<TypeOrbit>>> {
    par::map(exec, surfaces, |s| {
        enumerate_types_with(s, chi_target, chain_depth, Execution::Sequential)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(orbits: &[TypeOrbit]) -> Vec<String> {
        orbits
            .iter()
            .map(|o| o.display_divisor().to_string())
            .collect()
    }

    fn surface(n: usize) -> Surface {
        Surface::new(n).unwrap()
    }

    #[test]
    fn bounds() {
        assert_eq!(chi_strict_bound(&surface(17)), Rational::from_integer(2));
        assert_eq!(chi_strict_bound(&surface(25)), Rational::from_integer(3));
        assert_eq!(chi_strict_bound(&surface(9)), Rational::from_integer(1));
        for n in 10..=12 {
            assert_eq!(max_steps_from_equal(&surface(n), 1), Some(0));
        }
        assert_eq!(max_steps_from_equal(&surface(13), 1), Some(1));
        assert_eq!(max_steps_from_equal(&surface(25), 2), Some(2));
        assert_eq!(max_steps_from_equal(&surface(25), 1), Some(4));
        assert_eq!(max_steps_from_equal(&surface(9), 1), None);
    }

    #[test]
    fn sixteen_points() {
        let o = enumerate_types(&surface(16), 1, 4).unwrap();
        assert_eq!(names(&o), vec!["O", "E_1"]);
        assert_eq!(o[1].copies, BigInt::from(16));
        assert!(o
            .iter()
            .all(|x| x.conditionality == Conditionality::Unconditional));
    }

    #[test]
    fn twenty_five_points() {
        let o = enumerate_types(&surface(25), 2, 4).unwrap();
        assert_eq!(names(&o), vec!["H-E_1"]);
        assert_eq!(o[0].copies, BigInt::from(25));
    }

    #[test]
    fn ten_points() {
        let o = enumerate_types(&surface(10), 1, 4).unwrap();
        assert_eq!(
            names(&o),
            vec!["O", "57H-18E", "2220H-702E", "84357H-26676E"]
        );
    }

    #[test]
    fn thirteen_points_first_members() {
        let o = classify_n13(1).unwrap();
        let first = |label: &str| {
            o.iter()
                .find(|x| x.family.as_deref() == Some(label))
                .map(|x| x.display_divisor().to_string())
                .unwrap()
        };
        assert_eq!(first("I"), "O");
        assert_eq!(first("II"), "195H-54E");
        assert_eq!(first("III"), "21417H-5940E_{1..12}-5939E_13");
        assert_eq!(first("IV"), "E_1");
        assert_eq!(first("V"), "15H-5E_1-4E_{2..13}");
        assert_eq!(first("VI"), "1962H-545E_1-544E_{2..13}");
        let v = o.iter().find(|x| x.family.as_deref() == Some("V")).unwrap();
        assert_eq!(v.copies, BigInt::from(13));
    }

    #[test]
    fn twenty_five_table() {
        let rows = n25_chi1_table().unwrap();
        let got: Vec<(String, i64, i64, String)> = rows
            .iter()
            .map(|r| {
                (
                    r.orbit.display_divisor().to_string(),
                    r.two_b_dot_d.to_i64().unwrap(),
                    r.orbit.chi.to_i64().unwrap(),
                    r.orbit.t_wall.to_string(),
                )
            })
            .collect();
        let want = [
            ("O", 0, 1, "25/3"),
            ("E_1", 2, 1, "23/3"),
            ("E_{1,2}", 4, 1, "7"),
            ("E_{1..3}", 6, 1, "19/3"),
            ("H-E_{1,2}", 6, 1, "29/5"),
            ("E_{1..4}", 8, 1, "17/3"),
            ("H-E_{1,2}+E_3", 8, 1, "27/5"),
            ("H-E_1", 8, 2, "27/5"),
            ("6H-2E_1-E_{2..25}", 8, 1, "77/15"),
        ];
        let want: Vec<(String, i64, i64, String)> = want
            .iter()
            .map(|(a, b, c, d)| (a.to_string(), *b, *c, d.to_string()))
            .collect();
        assert_eq!(got, want);
        assert_eq!(rows[6].orbit.copies, BigInt::from(6900));
    }

    #[test]
    fn sufficient_condition() {
        let v = Divisor::parse("15H-5E_1-4E_{2..13}", 13)
            .unwrap()
            .canonical_form();
        assert!(verify_sufficient(&v, &BigInt::one()).unwrap());
        assert!(verify_sufficient(&Divisor::uniform(10, 57, 18), &BigInt::one()).unwrap());
        let bad = Divisor::uniform(16, 2, 1);
        assert!(matches!(
            verify_sufficient(&bad, &chi(&bad)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn unsupported() {
        assert_eq!(
            enumerate_types(&surface(9), 1, 1),
            Err(Error::UnsupportedN(9))
        );
        assert_eq!(
            enumerate_types(&surface(18), 1, 1),
            Err(Error::UnsupportedN(18))
        );
        assert!(enumerate_types(&surface(10), 1, 0).is_err());
    }

    #[test]
    fn schedules_agree() {
        let s = surface(13);
        let a = enumerate_types_with(&s, 1, 3, Execution::Sequential).unwrap();
        let b = enumerate_types_with(&s, 1, 3, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
