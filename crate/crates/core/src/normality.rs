//! Generalized-normality predicates for subgroups of a Sylow subgroup, and
//! the cross-equivalence suite tying them to the fusion system.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::arith::{log_p, prime_divisors};
use crate::error::{Error, Result};
use crate::fusion::{ClosureKind, FusionContext};
use crate::group::{Elem, Group, Subgroup};
use crate::lattice::{all_subgroups, lattice_of, SubgroupLattice};
use crate::ops::{core_in, is_sylow, normalizer_in, structure_label};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PredicateKind {
    #[serde(rename = "pronormal")]
    Pronormal,
    #[serde(rename = "weakly_normal")]
    WeaklyNormal,
    #[serde(rename = "weakly_closed_in_S")]
    WeaklyClosedInS,
    #[serde(rename = "subnormalizer")]
    Subnormalizer,
    #[serde(rename = "s_subnormalizer")]
    SSubnormalizer,
    #[serde(rename = "c_supplemented")]
    CSupplemented,
}

impl PredicateKind {
    pub const ALL: [PredicateKind; 6] = [
        PredicateKind::Pronormal,
        PredicateKind::WeaklyNormal,
        PredicateKind::WeaklyClosedInS,
        PredicateKind::Subnormalizer,
        PredicateKind::SSubnormalizer,
        PredicateKind::CSupplemented,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PredicateKind::Pronormal => "pronormal",
            PredicateKind::WeaklyNormal => "weakly_normal",
            PredicateKind::WeaklyClosedInS => "weakly_closed_in_S",
            PredicateKind::Subnormalizer => "subnormalizer",
            PredicateKind::SSubnormalizer => "s_subnormalizer",
            PredicateKind::CSupplemented => "c_supplemented",
        }
    }
}

impl fmt::Display for PredicateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PredicateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PredicateKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::validation(format!("unknown predicate kind `{s}`")))
    }
}

/// Evidence attached to a predicate report.
#[derive(Debug, Clone)]
pub enum Witness {
    /// Pronormality holds: for each distinct conjugate `H^g`, a `k ∈ ⟨H, H^g⟩` with `H^k = H^g`.
    Conjugators(Vec<(Elem, Elem)>),
    /// An element `g` violating the condition.
    Conjugate(Elem),
    /// An intermediate subgroup `K` and some `g ∈ N_G(K) \ N_G(H)`.
    Intermediate { k: Subgroup, g: Elem },
    /// A supplement `T` with `G = HT` and `H ∩ T ≤ H_G`.
    Supplement(Subgroup),
}

#[derive(Debug, Clone)]
pub struct PredicateReport {
    pub kind: PredicateKind,
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl PredicateReport {
    /// Re-checks the witness against its definition.
    pub fn witness_is_valid(&self, g: &Arc<Group>, s: &Subgroup, h: &Subgroup) -> bool {
        let whole = g.whole();
        match (&self.witness, self.holds) {
            (None, holds) => match self.kind {
                PredicateKind::Pronormal => false,
                PredicateKind::CSupplemented => !holds,
                _ => holds,
            },
            (Some(Witness::Conjugators(pairs)), true) => pairs.iter().all(|&(x, k)| {
                let hx = h.conjugate(x);
                h.join(&hx).contains(k) && h.conjugate(k) == hx
            }),
            (Some(Witness::Supplement(t)), true) => {
                h.product_size(t) == g.order() && h.intersection(t).is_subgroup_of(&core_in(&whole, h))
            }
            (Some(Witness::Conjugate(x)), false) => {
                let hx = h.conjugate(*x);
                match self.kind {
                    PredicateKind::Pronormal => {
                        let j = h.join(&hx);
                        let found = j.elements().any(|k| h.conjugate(k) == hx);
                        !found
                    }
                    PredicateKind::WeaklyNormal => hx.is_subgroup_of(&normalizer_in(&whole, h)) && hx != *h,
                    PredicateKind::WeaklyClosedInS => hx.is_subgroup_of(s) && hx != *h,
                    _ => false,
                }
            }
            (Some(Witness::Intermediate { k, g: x }), false) => {
                h.is_subgroup_of(k) && k.is_normalized_by(*x) && !h.is_normalized_by(*x)
            }
            _ => false,
        }
    }
}

/// Evaluates predicates for subgroups of a fixed Sylow subgroup `S` of `G`,
/// caching the subgroup lattices of `G` and `S`.
pub struct NormalityEvaluator {
    g: Arc<Group>,
    s: Subgroup,
    lattice_g: OnceLock<Result<SubgroupLattice>>,
    lattice_s: OnceLock<Result<SubgroupLattice>>,
}

/// The prime of a nontrivial p-group order.
fn prime_of(order: usize) -> Option<u64> {
    let ps = prime_divisors(order as u64);
    (ps.len() == 1).then(|| ps[0])
}

impl NormalityEvaluator {
    /// Checks that `S` is a Sylow subgroup of `G`.
    pub fn new(g: &Arc<Group>, s: &Subgroup) -> Result<NormalityEvaluator> {
        if !Arc::ptr_eq(g, s.parent()) {
            return Err(Error::validation("S does not belong to G"));
        }
        if !s.is_trivial() {
            let p = prime_of(s.order())
                .ok_or_else(|| Error::validation(format!("S has order {}, not a prime power", s.order())))?;
            if !is_sylow(s, p) {
                return Err(Error::validation(format!(
                    "S is a {p}-subgroup but not a Sylow {p}-subgroup"
                )));
            }
        }
        Ok(NormalityEvaluator {
            g: g.clone(),
            s: s.clone(),
            lattice_g: OnceLock::new(),
            lattice_s: OnceLock::new(),
        })
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.g
    }

    pub fn sylow(&self) -> &Subgroup {
        &self.s
    }

    fn lattice_g(&self) -> Result<&SubgroupLattice> {
        self.lattice_g
            .get_or_init(|| lattice_of(&self.g))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn lattice_s(&self) -> Result<&SubgroupLattice> {
        self.lattice_s
            .get_or_init(|| all_subgroups(&self.s, self.g.caps().subgroups))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn evaluate(&self, h: &Subgroup, kind: PredicateKind) -> Result<PredicateReport> {
        self.s.check_same_parent(h)?;
        if !h.is_subgroup_of(&self.s) {
            return Err(Error::validation("H is not contained in S"));
        }
        let whole = self.g.whole();
        let violation = |w: Option<Witness>| PredicateReport {
            kind,
            holds: w.is_none(),
            witness: w,
        };
        Ok(match kind {
            PredicateKind::Pronormal => self.pronormal(h),
            PredicateKind::WeaklyNormal => {
                let n = normalizer_in(&whole, h);
                violation(
                    self.g
                        .elements()
                        .find(|&x| h.conjugate_lies_in(x, &n) && !h.is_normalized_by(x))
                        .map(Witness::Conjugate),
                )
            }
            PredicateKind::WeaklyClosedInS => violation(
                self.g
                    .elements()
                    .find(|&x| h.conjugate_lies_in(x, &self.s) && !h.is_normalized_by(x))
                    .map(Witness::Conjugate),
            ),
            PredicateKind::Subnormalizer => {
                let n = normalizer_in(&whole, h);
                let lattice = self.lattice_g()?;
                violation(self.intermediate_violation(&n, lattice.between(h, &n)))
            }
            PredicateKind::SSubnormalizer => {
                let n = normalizer_in(&whole, h);
                let lattice = self.lattice_s()?;
                violation(self.intermediate_violation(&n, lattice.between(h, &self.s)))
            }
            PredicateKind::CSupplemented => {
                let core = core_in(&whole, h);
                let lattice = self.lattice_g()?;
                let t = lattice
                    .all()
                    .iter()
                    .find(|t| h.product_size(t) == self.g.order() && h.intersection(t).is_subgroup_of(&core));
                PredicateReport {
                    kind,
                    holds: t.is_some(),
                    witness: t.cloned().map(Witness::Supplement),
                }
            }
        })
    }

    fn intermediate_violation<'a>(&self, nh: &Subgroup, ks: impl Iterator<Item = &'a Subgroup>) -> Option<Witness> {
        let whole = self.g.whole();
        for k in ks {
            let nk = normalizer_in(&whole, k);
            if !nk.is_subgroup_of(nh) {
                let g = nk
                    .elements()
                    .find(|&x| !nh.contains(x))
                    .expect("N_G(K) is not inside N_G(H)");
                return Some(Witness::Intermediate { k: k.clone(), g });
            }
        }
        None
    }

    fn pronormal(&self, h: &Subgroup) -> PredicateReport {
        let mut seen: HashSet<Subgroup> = HashSet::new();
        let mut pairs = Vec::new();
        for x in self.g.elements() {
            let hx = h.conjugate(x);
            if !seen.insert(hx.clone()) {
                continue;
            }
            let j = h.join(&hx);
            let found = j.elements().find(|&k| h.conjugate(k) == hx);
            match found {
                Some(k) => pairs.push((x, k)),
                None => {
                    return PredicateReport {
                        kind: PredicateKind::Pronormal,
                        holds: false,
                        witness: Some(Witness::Conjugate(x)),
                    }
                }
            }
        }
        PredicateReport {
            kind: PredicateKind::Pronormal,
            holds: true,
            witness: Some(Witness::Conjugators(pairs)),
        }
    }
}

/// Evaluates one predicate for `H ≤ S ≤ G`, `S` Sylow.
pub fn group_predicate(g: &Arc<Group>, s: &Subgroup, h: &Subgroup, kind: PredicateKind) -> Result<PredicateReport> {
    NormalityEvaluator::new(g, s)?.evaluate(h, kind)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceViolation {
    pub subgroup: String,
    pub rule: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub prime: u64,
    pub subgroups_checked: usize,
    pub violations: Vec<EquivalenceViolation>,
    /// Subgroups on which the classical and the S-relative subnormalizer
    /// conditions agree. Recorded only; the two are not equivalent in general.
    pub subnormalizer_agreement: usize,
}

/// Per-subgroup predicate values gathered by the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredicateRow {
    pub pronormal: bool,
    pub weakly_normal: bool,
    pub weakly_closed_in_s: bool,
    pub subnormalizer: bool,
    pub s_subnormalizer: bool,
    pub semi_invariant: bool,
    pub weakly_f_closed: bool,
}

/// Evaluates every predicate except c-supplementation on every `H ≤ S`.
pub fn predicate_rows(ctx: &FusionContext) -> Result<Vec<PredicateRow>> {
    let eval = NormalityEvaluator::new(ctx.group(), ctx.sylow())?;
    let subgroups = ctx.lattice().all();
    let rows = par::map(subgroups, |h| -> Result<PredicateRow> {
        let holds = |k| eval.evaluate(h, k).map(|r| r.holds);
        Ok(PredicateRow {
            pronormal: holds(PredicateKind::Pronormal)?,
            weakly_normal: holds(PredicateKind::WeaklyNormal)?,
            weakly_closed_in_s: holds(PredicateKind::WeaklyClosedInS)?,
            subnormalizer: holds(PredicateKind::Subnormalizer)?,
            s_subnormalizer: holds(PredicateKind::SSubnormalizer)?,
            semi_invariant: ctx.closure_predicate(h, ClosureKind::SemiInvariant)?.holds,
            weakly_f_closed: ctx.closure_predicate(h, ClosureKind::WeaklyClosed)?.holds,
        })
    });
    rows.into_iter().collect()
}

/// Checks, for every `H ≤ S`: pronormal ⇔ weakly normal ⇔ weakly closed in `S`;
/// `S`-subnormalizer condition ⇔ semi-invariance in the fusion system; and
/// weak closure ⇒ `S`-subnormalizer condition.
pub fn equivalence_suite_in(ctx: &FusionContext) -> Result<EquivalenceReport> {
    let rows = predicate_rows(ctx)?;
    let mut violations = Vec::new();
    let mut agreement = 0;
    for (i, (h, r)) in ctx.lattice().all().iter().zip(&rows).enumerate() {
        let name = format!("#{i} {}", structure_label(h));
        let mut flag = |rule: &str| {
            violations.push(EquivalenceViolation {
                subgroup: name.clone(),
                rule: rule.to_string(),
            })
        };
        if !(r.pronormal == r.weakly_normal && r.weakly_normal == r.weakly_closed_in_s) {
            flag("pronormal <=> weakly_normal <=> weakly_closed_in_S");
        }
        if r.s_subnormalizer != r.semi_invariant {
            flag("s_subnormalizer <=> semi_invariant");
        }
        if r.weakly_closed_in_s && !r.s_subnormalizer {
            flag("weakly_closed_in_S => s_subnormalizer");
        }
        if r.subnormalizer == r.s_subnormalizer {
            agreement += 1;
        }
    }
    Ok(EquivalenceReport {
        prime: ctx.prime(),
        subgroups_checked: rows.len(),
        violations,
        subnormalizer_agreement: agreement,
    })
}

/// Runs the equivalence suite for a Sylow subgroup `S` of `G`.
pub fn equivalence_suite(g: &Arc<Group>, s: &Subgroup) -> Result<EquivalenceReport> {
    let p = prime_of(s.order()).ok_or_else(|| Error::validation("S must be a nontrivial p-group"))?;
    debug_assert!(log_p(s.order() as u64, p).is_some());
    let ctx = FusionContext::with_sylow(g, s, p)?;
    equivalence_suite_in(&ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin_group;
    use crate::group::Caps;
    use crate::ops::sylow_subgroup;
    use crate::perm::Permutation;

    fn setup(name: &str, p: u64) -> (Arc<Group>, Subgroup) {
        let g = builtin_group(name, Caps::default()).unwrap();
        let s = sylow_subgroup(&g, p).unwrap();
        (g, s)
    }

    #[test]
    fn labels_round_trip() {
        for k in PredicateKind::ALL {
            assert_eq!(k.label().parse::<PredicateKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.label()));
        }
        assert!("weakly_pronormal".parse::<PredicateKind>().is_err());
    }

    #[test]
    fn sylow_of_s3_is_pronormal() {
        let (g, s) = setup("S3", 2);
        let r = group_predicate(&g, &s, &s, PredicateKind::Pronormal).unwrap();
        assert!(r.holds);
        assert!(r.witness_is_valid(&g, &s, &s));
    }

    #[test]
    fn normal_subgroups_are_c_supplemented() {
        let (g, s) = setup("S4", 2);
        let v4 = core_in(&g.whole(), &s);
        let r = group_predicate(&g, &s, &v4, PredicateKind::CSupplemented).unwrap();
        assert!(r.holds && r.witness_is_valid(&g, &s, &v4));
    }

    #[test]
    fn every_witness_reverifies() {
        for (name, p) in [("S4", 2), ("S4", 3), ("A4", 2), ("Dic12", 2), ("F21", 3), ("S3xC3", 3)] {
            let (g, s) = setup(name, p);
            let eval = NormalityEvaluator::new(&g, &s).unwrap();
            let lattice = crate::lattice::all_subgroups(&s, 1000).unwrap();
            for h in lattice.all() {
                for k in PredicateKind::ALL {
                    let r = eval.evaluate(h, k).unwrap();
                    if r.witness.is_some() || !r.holds {
                        assert!(r.witness_is_valid(&g, &s, h), "{name} {k} {h:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn containment_is_validated() {
        let (g, s) = setup("S4", 2);
        let c3 = g
            .subgroup_from_perms(&[Permutation::from_cycles(4, &[vec![0, 1, 2]]).unwrap()])
            .unwrap();
        assert!(matches!(
            group_predicate(&g, &s, &c3, PredicateKind::Pronormal),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            group_predicate(&g, &c3.join(&s), &s, PredicateKind::Pronormal),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn suites_have_no_violations() {
        for (name, p) in [("S4", 2), ("F21", 3), ("D8", 2), ("Q8", 2), ("PSL(2,7)", 2)] {
            let (g, s) = setup(name, p);
            let r = equivalence_suite(&g, &s).unwrap();
            assert!(r.violations.is_empty(), "{name}: {:?}", r.violations);
        }
    }
}
