//! Normalizers, centralizers, cores, Sylow subgroups, quotients and structure
//! flags.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd, p_part};
use crate::error::{Error, Result};
use crate::group::{perm_from_points, Elem, Group, GroupMap, Subgroup};
use crate::perm::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilizerKind {
    Normalizer,
    Centralizer,
    Core,
}

fn filter_ambient(ambient: &Subgroup, keep: impl Fn(Elem) -> bool) -> Subgroup {
    let mut m = FixedBitSet::with_capacity(ambient.parent().order());
    for g in ambient.elements() {
        if keep(g) {
            m.insert(g as usize);
        }
    }
    Subgroup::from_members(ambient.parent(), m)
}

/// `N_A(H) = {g ∈ A : H^g = H}`.
pub fn normalizer_in(ambient: &Subgroup, h: &Subgroup) -> Subgroup {
    debug_assert!(ambient.same_parent(h));
    filter_ambient(ambient, |g| h.is_normalized_by(g))
}

/// `C_A(H)`: elements of `A` commuting with every element of `H`.
pub fn centralizer_in(ambient: &Subgroup, h: &Subgroup) -> Subgroup {
    debug_assert!(ambient.same_parent(h));
    let parent = h.parent();
    let gens = h.generators();
    filter_ambient(ambient, |g| gens.iter().all(|&x| parent.commute(x, g)))
}

/// `Z(H)`.
pub fn center(h: &Subgroup) -> Subgroup {
    centralizer_in(h, h)
}

/// `∩_{g ∈ A} H^g`, the largest subgroup of `H` normalized by `A`.
pub fn core_in(ambient: &Subgroup, h: &Subgroup) -> Subgroup {
    debug_assert!(ambient.same_parent(h));
    let mut m = h.members().clone();
    for g in ambient.elements() {
        if h.is_normalized_by(g) {
            continue;
        }
        m.intersect_with(h.conjugate(g).members());
    }
    Subgroup::from_members(h.parent(), m)
}

/// Normalizer, centralizer or normal core of `H` in the whole group `G`.
pub fn stabilizer_subgroup(kind: StabilizerKind, g: &Arc<Group>, h: &Subgroup) -> Result<Subgroup> {
    if !Arc::ptr_eq(g, h.parent()) {
        return Err(Error::validation("subgroup does not belong to the given group"));
    }
    let whole = g.whole();
    Ok(match kind {
        StabilizerKind::Normalizer => normalizer_in(&whole, h),
        StabilizerKind::Centralizer => centralizer_in(&whole, h),
        StabilizerKind::Core => core_in(&whole, h),
    })
}

/// `H^g` for a permutation `g`, which must lie in `H`'s parent.
pub fn conjugate_subgroup(h: &Subgroup, g: &Permutation) -> Result<Subgroup> {
    let e = h
        .parent()
        .index_of(g)
        .ok_or_else(|| Error::validation(format!("{g} is not an element of the parent group")))?;
    Ok(h.conjugate(e))
}

/// Smallest `k ≥ 1` with `x^k ∈ P`.
pub(crate) fn order_modulo(parent: &Group, x: Elem, p: &Subgroup) -> usize {
    let mut y = x;
    let mut k = 1;
    while !p.contains(y) {
        y = parent.mul(y, x);
        k += 1;
    }
    k
}

fn check_prime(p: u64) -> Result<()> {
    if arith::is_prime(p) {
        Ok(())
    } else {
        Err(Error::validation(format!("{p} is not prime")))
    }
}

/// Grows a p-subgroup by adjoining p-elements of its normalizer, trying
/// candidates in the given order. Returns `None` if the climb stalls.
fn sylow_climb(parent: &Arc<Group>, p: u64, candidates: &[Elem]) -> Option<Subgroup> {
    let target = p_part(parent.order() as u64, p) as usize;
    let whole = parent.whole();
    let mut current = parent.trivial();
    while current.order() < target {
        let n = normalizer_in(&whole, &current);
        let step = candidates.iter().find_map(|&x| {
            if !n.contains(x) || current.contains(x) {
                return None;
            }
            let k = order_modulo(parent, x, &current);
            (k as u64).is_multiple_of(p).then(|| parent.pow(x, k / p as usize))
        })?;
        current = current.join_element(step);
    }
    Some(current)
}

/// Exhaustive fallback: breadth-first over p-subgroups generated by p-elements.
fn sylow_exhaustive(parent: &Arc<Group>, p: u64) -> Option<Subgroup> {
    let target = p_part(parent.order() as u64, p) as usize;
    let p_elements: Vec<Elem> = parent
        .elements()
        .filter(|&x| arith::log_p(parent.elem_order(x) as u64, p).is_some())
        .collect();
    let mut layer = vec![parent.trivial()];
    loop {
        if let Some(found) = layer.iter().find(|s| s.order() == target) {
            return Some(found.clone());
        }
        let mut next: Vec<Subgroup> = Vec::new();
        for s in &layer {
            for &x in &p_elements {
                let t = s.join_element(x);
                if t.order() > s.order() && arith::log_p(t.order() as u64, p).is_some() && !next.contains(&t) {
                    next.push(t);
                }
            }
        }
        if next.is_empty() {
            return None;
        }
        next.sort();
        layer = next;
    }
}

fn sylow_from_candidates(parent: &Arc<Group>, p: u64, candidates: &[Elem]) -> Result<Subgroup> {
    check_prime(p)?;
    if let Some(s) = sylow_climb(parent, p, candidates) {
        return Ok(s);
    }
    log::warn!("normalizer climb stalled for p = {p}; falling back to exhaustive search");
    sylow_exhaustive(parent, p).ok_or_else(|| Error::Invariant(format!("no Sylow {p}-subgroup found")))
}

/// A Sylow p-subgroup, grown deterministically from the lexicographically
/// least candidates. Returns the trivial subgroup when `p ∤ |G|`.
pub fn sylow_subgroup(parent: &Arc<Group>, p: u64) -> Result<Subgroup> {
    let candidates: Vec<Elem> = parent.elements().collect();
    sylow_from_candidates(parent, p, &candidates)
}

/// Like [`sylow_subgroup`] but with the candidate order shuffled by `seed`.
pub fn sylow_subgroup_seeded(parent: &Arc<Group>, p: u64, seed: u64) -> Result<Subgroup> {
    let mut candidates: Vec<Elem> = parent.elements().collect();
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    candidates.shuffle(&mut rng);
    sylow_from_candidates(parent, p, &candidates)
}

/// A Sylow p-subgroup of `G` containing the p-subgroup `H`.
pub fn sylow_containing(parent: &Arc<Group>, p: u64, h: &Subgroup) -> Result<Subgroup> {
    check_prime(p)?;
    if arith::log_p(h.order() as u64, p).is_none() {
        return Err(Error::validation(format!(
            "subgroup of order {} is not a {p}-group",
            h.order()
        )));
    }
    let target = p_part(parent.order() as u64, p) as usize;
    let whole = parent.whole();
    let mut current = h.clone();
    while current.order() < target {
        let n = normalizer_in(&whole, &current);
        let step = n.elements().find_map(|x| {
            if current.contains(x) {
                return None;
            }
            let k = order_modulo(parent, x, &current);
            (k as u64).is_multiple_of(p).then(|| parent.pow(x, k / p as usize))
        });
        match step {
            Some(y) => current = current.join_element(y),
            None => return Err(Error::Invariant("normalizer climb stalled".into())),
        }
    }
    Ok(current)
}

/// True when `S` has order equal to the p-part of `|G|` (and is therefore Sylow).
pub fn is_sylow(s: &Subgroup, p: u64) -> bool {
    s.order() as u64 == p_part(s.parent().order() as u64, p)
}

/// The least `g` (if any) with `N^g ≠ N`.
pub fn violating_conjugator(ambient: &Subgroup, n: &Subgroup) -> Option<Elem> {
    ambient.elements().find(|&g| !n.is_normalized_by(g))
}

/// `A/N` realized as the action of `A` on the right cosets of `N`, with the
/// projection map `A → A/N`.
pub fn quotient_of(ambient: &Subgroup, n: &Subgroup) -> Result<(Arc<Group>, GroupMap)> {
    ambient.check_same_parent(n)?;
    if !n.is_subgroup_of(ambient) {
        return Err(Error::validation("the kernel is not contained in the ambient group"));
    }
    if let Some(g) = violating_conjugator(ambient, n) {
        return Err(Error::validation(format!(
            "subgroup is not normal: conjugation by {} moves it",
            ambient.parent().perm(g)
        )));
    }
    let parent = ambient.parent();
    let index = ambient.order() / n.order();
    if index > crate::perm::Point::MAX as usize {
        return Err(Error::Capacity {
            what: "quotient degree",
            cap: crate::perm::Point::MAX as usize,
            reached: index,
        });
    }
    let mut coset_of = vec![usize::MAX; parent.order()];
    let mut reps = Vec::with_capacity(index);
    for x in ambient.elements() {
        if coset_of[x as usize] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(x);
        for k in n.elements() {
            coset_of[parent.mul(k, x) as usize] = c;
        }
    }
    let action = |x: Elem| -> Permutation {
        perm_from_points(reps.iter().map(|&r| coset_of[parent.mul(r, x) as usize]).collect())
    };
    let images: Vec<Permutation> = ambient.elements().map(action).collect();
    let mut elements = images.clone();
    elements.sort();
    elements.dedup();
    debug_assert_eq!(elements.len(), index);
    let gens: Vec<Permutation> = ambient.generators().iter().map(|&g| action(g)).collect();
    let quotient = Group::from_sorted_elements(index, elements, &gens, parent.caps());
    let assignment = images
        .iter()
        .map(|p| quotient.index_of(p).expect("image is in quotient"))
        .collect();
    let map = GroupMap::new(ambient.clone(), quotient.clone(), assignment, None);
    Ok((quotient, map))
}

/// `G/N` for the whole group `G`.
pub fn quotient_group(g: &Arc<Group>, n: &Subgroup) -> Result<(Arc<Group>, GroupMap)> {
    if !Arc::ptr_eq(g, n.parent()) {
        return Err(Error::validation("subgroup does not belong to the given group"));
    }
    quotient_of(&g.whole(), n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFlags {
    pub abelian: bool,
    pub cyclic: bool,
    pub elementary_abelian: bool,
    pub is_p_group: bool,
    pub exponent: usize,
}

/// Decides the structure flags by exhausting element orders.
pub fn structure_flags(h: &Subgroup, p: u64) -> StructureFlags {
    let parent = h.parent();
    let abelian = h.is_abelian();
    let mut exponent = 1usize;
    let mut cyclic = false;
    for x in h.elements() {
        let o = parent.elem_order(x);
        exponent = exponent / gcd(exponent as u64, o as u64) as usize * o;
        cyclic |= o == h.order();
    }
    StructureFlags {
        abelian,
        cyclic,
        elementary_abelian: abelian && (exponent == 1 || arith::is_prime(exponent as u64)),
        is_p_group: arith::log_p(h.order() as u64, p).is_some(),
        exponent,
    }
}

/// Short structural name for reports: `1`, `Cn`, `V4`, `Cp^k`, `D2n`, `Q2^n`,
/// `Ab{n}` for other abelian groups and `G{n}` otherwise. Dihedral groups are
/// named by their order, so the symmetry group of a square is `D8`.
pub fn structure_label(h: &Subgroup) -> String {
    let n = h.order();
    if n == 1 {
        return "1".into();
    }
    let parent = h.parent();
    let orders: Vec<usize> = h.elements().map(|x| parent.elem_order(x)).collect();
    let exponent = orders
        .iter()
        .fold(1usize, |e, &o| e / gcd(e as u64, o as u64) as usize * o);
    if exponent == n {
        return format!("C{n}");
    }
    if h.is_abelian() {
        if arith::is_prime(exponent as u64) {
            if n == 4 {
                return "V4".into();
            }
            let k = arith::log_p(n as u64, exponent as u64).unwrap_or(0);
            return format!("C{exponent}^{k}");
        }
        return format!("Ab{n}");
    }
    let involutions = orders.iter().filter(|&&o| o == 2).count();
    if exponent == n / 2 && arith::log_p(n as u64, 2).is_some() {
        if involutions == n / 2 + 1 {
            return format!("D{n}");
        }
        if involutions == 1 {
            return format!("Q{n}");
        }
    }
    if n.is_multiple_of(2) && involutions == n / 2 + 1 && orders.contains(&(n / 2)) {
        return format!("D{n}");
    }
    format!("G{n}")
}
