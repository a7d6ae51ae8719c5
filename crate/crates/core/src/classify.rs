//! Whole-group classification: p-nilpotency, p-closedness, supersolvability,
//! and strongly p-embedded subgroups.

use std::sync::Arc;

use serde::Serialize;

use crate::arith::{gcd, is_prime, p_part};
use crate::error::{Error, Result};
use crate::group::{Group, Subgroup};
use crate::lattice::{chief_series_below, lattice_of, normal_subgroups_by_closure};
use crate::ops::{is_sylow, sylow_subgroup};

#[derive(Clone, Debug, Serialize)]
pub struct GroupClassification {
    pub p: u64,
    pub order: usize,
    pub p_nilpotent: bool,
    pub p_closed: bool,
    pub supersolvable: bool,
    pub coprime_condition: bool,
    #[serde(skip)]
    pub normal_complement: Option<Subgroup>,
    pub notes: Vec<String>,
}

/// Re-checks a normal p-complement directly: normal in `G`, of order the
/// p′-part of `|G|`, and meeting the Sylow subgroup `S` trivially.
pub fn is_normal_p_complement(g: &Arc<Group>, s: &Subgroup, k: &Subgroup, p: u64) -> bool {
    let n = g.order() as u64;
    k.order() as u64 == n / p_part(n, p) && k.is_normal_in(&g.whole()) && k.intersection(s).is_trivial()
}

pub fn classify_group(g: &Arc<Group>, p: u64) -> Result<GroupClassification> {
    if !is_prime(p) {
        return Err(Error::validation(format!("{p} is not prime")));
    }
    let order = g.order();
    let mut notes = Vec::new();
    let s = sylow_subgroup(g, p)?;
    let normals = normal_subgroups_by_closure(g)?;
    let complement_order = order / p_part(order as u64, p) as usize;
    let normal_complement = if !(order as u64).is_multiple_of(p) {
        notes.push(format!(
            "{p} does not divide |G| = {order}; G is its own normal {p}-complement"
        ));
        Some(g.whole())
    } else {
        normals
            .iter()
            .find(|k| k.order() == complement_order)
            .filter(|k| is_normal_p_complement(g, &s, k, p))
            .cloned()
    };
    let whole = g.whole();
    let supersolvable = chief_series_below(g, &whole)?
        .iter()
        .all(|f| f.cyclic && is_prime(f.order as u64));
    Ok(GroupClassification {
        p,
        order,
        p_nilpotent: normal_complement.is_some(),
        p_closed: s.is_normal_in(&whole),
        supersolvable,
        coprime_condition: gcd(p - 1, order as u64) == 1,
        normal_complement,
        notes,
    })
}

/// Searches the lattice of `A` for `H < A` with `p | |H|` and `p ∤ |H ∩ H^g|`
/// for every `g ∈ A \ H`. Returns the first witness in lattice order.
pub fn has_strongly_p_embedded(a: &Arc<Group>, p: u64) -> Result<Option<Subgroup>> {
    if !is_prime(p) {
        return Err(Error::validation(format!("{p} is not prime")));
    }
    let lattice = lattice_of(a)?;
    let found = lattice
        .all()
        .iter()
        .filter(|h| h.order() < a.order() && (h.order() as u64).is_multiple_of(p))
        .find(|h| {
            a.elements()
                .filter(|&x| !h.contains(x))
                .all(|x| !(h.intersection(&h.conjugate(x)).order() as u64).is_multiple_of(p))
        })
        .cloned();
    Ok(found)
}

/// True when `S` is a Sylow p-subgroup of `G` (same parent, right order, a p-group).
pub fn check_sylow(g: &Arc<Group>, s: &Subgroup, p: u64) -> Result<()> {
    if !Arc::ptr_eq(g, s.parent()) {
        return Err(Error::validation("Sylow subgroup does not belong to the given group"));
    }
    if !is_sylow(s, p) {
        return Err(Error::validation(format!(
            "subgroup of order {} is not a Sylow {p}-subgroup of a group of order {}",
            s.order(),
            g.order()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin_group;
    use crate::group::Caps;

    fn g(s: &str) -> Arc<Group> {
        builtin_group(s, Caps::default()).unwrap()
    }

    #[test]
    fn classification_examples() {
        let c = classify_group(&g("S3"), 2).unwrap();
        assert!(c.p_nilpotent && c.supersolvable);
        assert_eq!(c.normal_complement.unwrap().order(), 3);
        let c = classify_group(&g("A4"), 2).unwrap();
        assert!(!c.p_nilpotent && c.p_closed && !c.supersolvable);
        let c = classify_group(&g("dicyclic(12)"), 2).unwrap();
        assert!(c.p_nilpotent && c.coprime_condition);
        let c = classify_group(&g("S4"), 5).unwrap();
        assert!(c.p_nilpotent && !c.notes.is_empty());
        assert!(!classify_group(&g("S4"), 2).unwrap().supersolvable);
        assert!(classify_group(&g("Heis3"), 3).unwrap().supersolvable);
    }

    #[test]
    fn strongly_embedded_examples() {
        let w = has_strongly_p_embedded(&g("S3"), 2).unwrap().unwrap();
        assert_eq!(w.order(), 2);
        assert!(has_strongly_p_embedded(&g("A4"), 2).unwrap().is_none());
        assert!(has_strongly_p_embedded(&g("C1"), 3).unwrap().is_none());
        assert!(has_strongly_p_embedded(&g("C2"), 2).unwrap().is_none());
    }
}
