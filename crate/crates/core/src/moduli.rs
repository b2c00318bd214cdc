//! Components of the moduli of rank-two sheaves with `c1 = K` under the
//! polarizations `A_t = tH - E`, and how they appear as `t` decreases from
//! `n/3` towards `sqrt(n)`.
//!
//! Each admissible type `D` contributes a projective space of dimension
//! `-chi(2D - K) - 1` once `t` drops below its wall. The trivial type gives
//! `P^{n-11}`; for `13 <= n <= 16` that space is later blown up at the `n`
//! points coming from the exceptional types.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bignum;
use crate::classify::{enumerate_types, TypeOrbit};
use crate::contfrac::{convergents, divisor_from_convergent};
use crate::error::{Error, Result};
use crate::picard::{below_nef_wall, chi, wall_t, Conditionality, Divisor, Surface};
use crate::rational::Rational;

/// Depth used when the caller does not bound chain expansion.
pub const DEFAULT_MAX_DEPTH: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    EmptinessBoundary,
    NewComponent,
    BlowupModification,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::EmptinessBoundary => "emptiness_boundary",
            EventKind::NewComponent => "new_component",
            EventKind::BlowupModification => "blowup_modification",
        }
    }
}

/// Something that happens to the moduli space as `t` crosses `self.t`
/// from above.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallEvent {
    pub t: Rational,
    pub kind: EventKind,
    /// Printed member of the type orbit; absent for a bare emptiness wall.
    pub divisor: Option<Divisor>,
    /// Dimension of the new or modified component.
    #[serde(with = "bignum::number::option")]
    pub dim: Option<BigInt>,
    #[serde(with = "bignum::number::option")]
    pub copies: Option<BigInt>,
    pub conditionality: Conditionality,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtDims {
    #[serde(with = "bignum::number")]
    pub hom: BigInt,
    #[serde(with = "bignum::number")]
    pub ext1: BigInt,
    #[serde(with = "bignum::number")]
    pub ext2: BigInt,
}

impl ExtDims {
    pub fn euler_form(&self) -> BigInt {
        &self.hom - &self.ext1 + &self.ext2
    }
}

fn exceptional_or_trivial(dv: &Divisor) -> bool {
    dv.is_zero() || dv.is_exceptional()
}

/// Dimension of the component of type `D`: `n - 11` for the trivial and
/// exceptional types, `-chi(2D - K) - 1` otherwise.
pub fn component_dim(dv: &Divisor) -> Result<BigInt> {
    let n = dv.n();
    let k = Divisor::canonical(n);
    let dim = if exceptional_or_trivial(dv) {
        let dim = BigInt::from(n as i64 - 11);
        if dv.is_zero() {
            assert_eq!(
                -chi(&-&k) - 1,
                dim,
                "trivial-type dimension formulas disagree"
            );
        }
        dim
    } else {
        -chi(&(&dv.scaled(2) - &k)) - 1
    };
    if dim.is_negative() {
        return Err(Error::Inconsistent(format!(
            "type {dv} on {n} points has component dimension {dim}"
        )));
    }
    Ok(dim)
}

fn require_shgh(s: &Surface) -> Result<()> {
    if (10..=15).contains(&s.n()) && !s.assume_shgh() {
        return Err(Error::MissingAssumption("assume-shgh"));
    }
    Ok(())
}

fn nonnegative(v: BigInt, what: &str) -> Result<BigInt> {
    if v.is_negative() {
        return Err(Error::Inconsistent(format!("{what} = {v} is negative")));
    }
    Ok(v)
}

/// `hom`, `ext^1`, `ext^2` of a non-split extension bundle of type `D`.
pub fn ext_dims(dv: &Divisor, s: &Surface) -> Result<ExtDims> {
    if dv.n() != s.n() {
        return Err(Error::DimensionMismatch {
            left: dv.n(),
            right: s.n(),
        });
    }
    require_shgh(s)?;
    let dims = if exceptional_or_trivial(dv) {
        ExtDims {
            hom: BigInt::one(),
            ext1: component_dim(dv)?,
            ext2: BigInt::one(),
        }
    } else {
        let k = Divisor::canonical(s.n());
        ExtDims {
            hom: BigInt::one(),
            ext1: nonnegative(-chi(&(&dv.scaled(2) - &k)) - 1, "ext^1")?,
            ext2: nonnegative(chi(&dv.scaled(2)), "ext^2")?,
        }
    };
    Ok(dims)
}

/// `(h^0, h^1, h^2)` of a line bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cohomology {
    #[serde(with = "bignum::number")]
    pub h0: BigInt,
    #[serde(with = "bignum::number")]
    pub h1: BigInt,
    #[serde(with = "bignum::number")]
    pub h2: BigInt,
}

impl Cohomology {
    fn new(h0: BigInt, h1: BigInt, h2: BigInt) -> Self {
        Cohomology { h0, h1, h2 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub divisor: Divisor,
    pub d: Cohomology,
    pub twice_d: Cohomology,
    pub twice_d_minus_k: Cohomology,
    pub conditionality: Conditionality,
}

/// Cohomology of `D`, `2D` and `2D - K` for a type below the nef wall.
pub fn shgh_cohomology_report(dv: &Divisor, s: &Surface) -> Result<CohomologyReport> {
    let n = s.n();
    if !(10..=16).contains(&n) {
        return Err(Error::UnsupportedN(n));
    }
    if dv.n() != n {
        return Err(Error::DimensionMismatch {
            left: dv.n(),
            right: n,
        });
    }
    if !s.assume_shgh() && n != 16 {
        return Err(Error::MissingAssumption("assume-shgh"));
    }
    if !below_nef_wall(dv) {
        return Err(Error::Precondition(format!(
            "{dv} is not below the nef wall"
        )));
    }
    let zero = BigInt::zero;
    let chi_d = chi(dv);
    if chi_d != BigInt::from(1) {
        return Err(Error::Inconsistent(format!(
            "chi({dv}) = {chi_d}, expected 1"
        )));
    }
    let twice = dv.scaled(2);
    let twice_d = if dv.is_exceptional() {
        Cohomology::new(1.into(), 1.into(), zero())
    } else {
        Cohomology::new(chi(&twice), zero(), zero())
    };
    let h1 = -chi(&(&twice - &Divisor::canonical(n)));
    if h1.is_negative() || (h1.is_zero() && !(dv.is_zero() && n == 10)) {
        return Err(Error::Inconsistent(format!("h^1(2D-K) = {h1} for {dv}")));
    }
    let conditionality = if n == 16 {
        Conditionality::Unconditional
    } else {
        Conditionality::RequiresShgh
    };
    Ok(CohomologyReport {
        divisor: dv.display_form(),
        d: Cohomology::new(chi_d, zero(), zero()),
        twice_d,
        twice_d_minus_k: Cohomology::new(zero(), h1, zero()),
        conditionality,
    })
}

/// `chi(2 D_k - K)` in closed form: `(11 - n + floor(q_k (3 sqrt(n) - n))) / 2`.
pub fn growth_formula(n: u64, k: usize) -> Result<BigInt> {
    if !(10..=12).contains(&n) {
        return Err(Error::UnsupportedN(n as usize));
    }
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::Integrality(format!(
            "index {k} must be odd and at least 3"
        )));
    }
    let q = convergents(n, k)?.pop().expect("k >= 1").q;
    let nb = BigInt::from(n);
    let floor = (BigInt::from(9) * &q * &q * &nb).sqrt() - &q * &nb;
    let total = BigInt::from(11 - n as i64) + floor;
    if total.is_odd() {
        return Err(Error::Integrality(format!(
            "11 - n + floor(...) = {total} is odd"
        )));
    }
    Ok(total / 2)
}

fn check_timeline_args(s: &Surface, chi_v: u64) -> Result<u64> {
    let n = s.n();
    if !(10..=16).contains(&n) && n != 25 {
        return Err(Error::UnsupportedN(n));
    }
    let max_chi = if n == 25 { 4 } else { 2 };
    if chi_v != max_chi {
        return Err(Error::InvalidArgument(format!(
            "the wall timeline is available for chi = {max_chi} on {n} points, not {chi_v}"
        )));
    }
    require_shgh(s)?;
    Ok(chi_v / 2)
}

fn timeline_conditionality(s: &Surface) -> Conditionality {
    if s.is_square() {
        Conditionality::Unconditional
    } else {
        Conditionality::RequiresShgh
    }
}

/// Every surface with at most nine points has an empty moduli space for
/// all ample polarizations in the family.
pub fn empty_for_every_ample(n: usize) -> bool {
    n <= 9
}

fn events_from_orbits(s: &Surface, orbits: &[TypeOrbit]) -> Result<Vec<WallEvent>> {
    let n = s.n();
    let cond = timeline_conditionality(s);
    let top = Rational::new(n as i64, 3)?;
    let mut events = Vec::new();
    let mut saw_top = false;
    for o in orbits {
        let dv = &o.representative;
        let mut ev = WallEvent {
            t: o.t_wall.clone(),
            kind: EventKind::NewComponent,
            divisor: Some(o.display_divisor()),
            dim: None,
            copies: Some(o.copies.clone()),
            conditionality: cond,
            family: o.family.clone(),
        };
        if dv.is_zero() {
            saw_top = true;
            if n == 10 {
                ev.kind = EventKind::EmptinessBoundary;
                ev.copies = None;
            } else {
                ev.dim = Some(component_dim(dv)?);
            }
        } else if dv.is_exceptional() && (13..=16).contains(&n) {
            ev.kind = EventKind::BlowupModification;
            ev.dim = Some(component_dim(dv)?);
        } else {
            ev.dim = Some(component_dim(dv)?);
        }
        events.push(ev);
    }
    if !saw_top {
        events.push(WallEvent {
            t: top,
            kind: EventKind::EmptinessBoundary,
            divisor: None,
            dim: None,
            copies: None,
            conditionality: cond,
            family: None,
        });
    }
    events.sort_by(|a, b| b.t.cmp(&a.t));
    Ok(events)
}

/// Orbits expanded to `depth` members per chain, and the smallest wall among
/// the deepest members of chains that were cut off. Every orbit not yet
/// listed has its wall strictly below that value.
fn orbits_at_depth(
    s: &Surface,
    chi_d: u64,
    depth: usize,
) -> Result<(Vec<TypeOrbit>, Option<Rational>)> {
    let orbits = enumerate_types(s, chi_d, depth)?;
    let mut per_chain: BTreeMap<(u64, String, String), Vec<&TypeOrbit>> = BTreeMap::new();
    for o in &orbits {
        if let Some(c) = &o.chain {
            per_chain
                .entry((
                    c.k,
                    c.fundamental.d.to_string(),
                    c.fundamental.m.to_string(),
                ))
                .or_default()
                .push(o);
        }
    }
    let frontier = if s.is_square() {
        None
    } else {
        per_chain
            .values()
            .filter(|v| v.len() == depth)
            .filter_map(|v| v.iter().map(|o| &o.t_wall).min().cloned())
            .max()
    };
    Ok((orbits, frontier))
}

/// All events with `t > t_min`, by strictly decreasing `t`.
pub fn wall_events(s: &Surface, chi_v: u64, t_min: &Rational) -> Result<Vec<WallEvent>> {
    wall_events_capped(s, chi_v, t_min, DEFAULT_MAX_DEPTH)
}

pub fn wall_events_capped(
    s: &Surface,
    chi_v: u64,
    t_min: &Rational,
    max_depth: usize,
) -> Result<Vec<WallEvent>> {
    let mut events = events_from(s, chi_v, t_min, max_depth)?;
    events.retain(|e| &e.t > t_min);
    Ok(events)
}

/// Events with `t >= t_min`.
fn events_from(
    s: &Surface,
    chi_v: u64,
    t_min: &Rational,
    max_depth: usize,
) -> Result<Vec<WallEvent>> {
    if empty_for_every_ample(s.n()) {
        return Ok(Vec::new());
    }
    let chi_d = check_timeline_args(s, chi_v)?;
    let n = s.n();
    match t_min.cmp_sqrt(n as u64) {
        Ordering::Greater => {}
        Ordering::Equal if s.is_square() => {}
        _ if s.is_square() => {
            return Err(Error::OutOfRange {
                t: t_min.clone(),
                range: format!("t_min >= {}", n.isqrt()),
            })
        }
        _ => return Err(Error::NonTermination(n)),
    }
    let mut depth = 4.min(max_depth.max(1));
    loop {
        let (orbits, frontier) = orbits_at_depth(s, chi_d, depth)?;
        if frontier.as_ref().is_none_or(|f| f <= t_min) {
            let mut events = events_from_orbits(s, &orbits)?;
            events.retain(|e| &e.t >= t_min);
            return Ok(events);
        }
        if depth >= max_depth {
            return Err(Error::DepthExceeded(max_depth));
        }
        depth = (depth * 2).min(max_depth);
    }
}

/// The first `count` events in decreasing `t` (all of them when the
/// timeline is finite and shorter).
pub fn first_walls(
    s: &Surface,
    chi_v: u64,
    count: usize,
    max_depth: usize,
) -> Result<Vec<WallEvent>> {
    if empty_for_every_ample(s.n()) {
        return Ok(Vec::new());
    }
    let chi_d = check_timeline_args(s, chi_v)?;
    let mut depth = count.clamp(1, max_depth.max(1));
    loop {
        let (orbits, frontier) = orbits_at_depth(s, chi_d, depth)?;
        let mut events = events_from_orbits(s, &orbits)?;
        if let Some(f) = &frontier {
            events.retain(|e| &e.t >= f);
        }
        if events.len() >= count || frontier.is_none() {
            events.truncate(count);
            return Ok(events);
        }
        if depth >= max_depth {
            return Err(Error::DepthExceeded(max_depth));
        }
        depth = (depth * 2).min(max_depth);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentShape {
    ProjectiveSpace,
    BlowupOfProjectiveSpace,
}

/// `copies` disjoint copies of a projective space, possibly blown up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub divisor: Divisor,
    #[serde(with = "bignum::number")]
    pub dim: BigInt,
    #[serde(with = "bignum::number")]
    pub copies: BigInt,
    pub description: ComponentShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blown_up_points: Option<u64>,
    pub conditionality: Conditionality,
}

/// Components present at the polarization `A_t`, for `t` inside a chamber.
/// On twenty-five points the chamber below `27/5` is closed on the right.
pub fn snapshot(s: &Surface, chi_v: u64, t: &Rational) -> Result<Vec<Component>> {
    let n = s.n();
    if empty_for_every_ample(n) {
        return Ok(Vec::new());
    }
    check_timeline_args(s, chi_v)?;
    let top = Rational::new(n as i64, 3)?;
    if t.cmp_sqrt(n as u64) != Ordering::Greater || t > &top {
        return Err(Error::OutOfRange {
            t: t.clone(),
            range: format!("sqrt({n}) < t <= {top}"),
        });
    }
    let events = events_from(s, chi_v, t, DEFAULT_MAX_DEPTH)?;
    let closed_right = n == 25 && *t == Rational::new(27, 5)?;
    if !closed_right && events.iter().any(|e| &e.t == t) {
        return Err(Error::OnWall(t.clone()));
    }
    Ok(components_from(n, events.iter().collect()))
}

fn components_from(n: usize, events: Vec<&WallEvent>) -> Vec<Component> {
    let mut out: Vec<Component> = Vec::new();
    let mut blowup = None;
    for e in events {
        match e.kind {
            EventKind::EmptinessBoundary => {}
            EventKind::NewComponent => out.push(Component {
                divisor: e.divisor.clone().expect("component events carry a divisor"),
                dim: e.dim.clone().expect("component events carry a dimension"),
                copies: e.copies.clone().expect("component events carry a count"),
                description: ComponentShape::ProjectiveSpace,
                blown_up_points: None,
                conditionality: e.conditionality,
            }),
            EventKind::BlowupModification => blowup = Some(n as u64),
        }
    }
    if let Some(points) = blowup {
        let trivial = out
            .iter_mut()
            .find(|c| c.divisor.is_zero())
            .expect("blowup modifies the trivial-type component");
        trivial.description = ComponentShape::BlowupOfProjectiveSpace;
        trivial.blown_up_points = Some(points);
    }
    out
}

/// Dimension window for components of smaller Euler characteristic reached
/// by `steps` elementary modifications.
pub fn elem_mod_dim_bounds(base_dim: &BigInt, steps: u64) -> (BigInt, BigInt) {
    (base_dim + 3 * steps, base_dim + 4 * steps)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedOrbit {
    pub divisor: Divisor,
    pub t_wall: Rational,
    #[serde(with = "bignum::number")]
    pub dim: BigInt,
    #[serde(with = "bignum::number")]
    pub dim_lower: BigInt,
    #[serde(with = "bignum::number")]
    pub dim_upper: BigInt,
}

/// For `sqrt(n) < t < t_star` there are at least `orbits.len()` components
/// of dimension at least the requested bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCertificate {
    pub t_star: Rational,
    pub orbits: Vec<CertifiedOrbit>,
    pub conditionality: Conditionality,
}

const CONVERGENT_WALK_LIMIT: usize = 121;

/// Walks `D_3, D_5, ...` and keeps orbits whose dimension lower bound is at
/// least `r`, with consecutive dimensions more than `2 - chi` apart, until
/// `k` are found.
pub fn components_at_least(
    s: &Surface,
    chi_v: i64,
    k: usize,
    r: &BigInt,
) -> Result<ComponentCertificate> {
    let n = s.n();
    if !(10..=12).contains(&n) {
        return Err(Error::UnsupportedN(n));
    }
    require_shgh(s)?;
    if chi_v > 2 {
        return Err(Error::InvalidArgument(format!("chi = {chi_v} exceeds 2")));
    }
    if k == 0 || !r.is_positive() {
        return Err(Error::InvalidArgument("k and r must be positive".into()));
    }
    let steps = (2 - chi_v) as u64;
    let mut picked: Vec<CertifiedOrbit> = Vec::new();
    let mut idx = 3;
    while picked.len() < k {
        if idx > CONVERGENT_WALK_LIMIT {
            return Err(Error::DepthExceeded(CONVERGENT_WALK_LIMIT));
        }
        let dv = divisor_from_convergent(n as u64, idx)?;
        idx += 2;
        let dim = component_dim(&dv)?;
        let (lo, hi) = elem_mod_dim_bounds(&dim, steps);
        if &lo < r {
            continue;
        }
        if let Some(prev) = picked.last() {
            if &dim - &prev.dim <= BigInt::from(steps) {
                continue;
            }
        }
        picked.push(CertifiedOrbit {
            t_wall: wall_t(&dv)?,
            divisor: dv,
            dim,
            dim_lower: lo,
            dim_upper: hi,
        });
    }
    let t_star = picked.last().expect("k >= 1").t_wall.clone();
    Ok(ComponentCertificate {
        t_star,
        orbits: picked,
        conditionality: Conditionality::RequiresShgh,
    })
}
