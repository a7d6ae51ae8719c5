//! The fusion system `F_S(G)` of a group over a Sylow subgroup.
//!
//! Morphisms are the conjugation maps `x ↦ x^g` between subgroups of `S`,
//! identified by their pointwise assignment rather than by the inducing
//! element.

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::classify::{check_sylow, has_strongly_p_embedded};
use crate::error::{Error, Result};
use crate::group::{Elem, Group, GroupMap, Subgroup};
use crate::lattice::{all_subgroups, quotient_is_cyclic, SubgroupLattice};
use crate::ops::{
    centralizer_in, core_in, is_sylow, normalizer_in, quotient_group, quotient_of, structure_flags, sylow_subgroup,
};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionKind {
    FullyNormalized,
    Centric,
    Radical,
    Essential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureKind {
    StronglyClosed,
    WeaklyClosed,
    SemiInvariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalityMethod {
    Criterion,
    Oracle,
}

/// Evidence that a closure predicate fails: the least offending element (for
/// strong closure), conjugator, and intermediate subgroup (for semi-invariance).
#[derive(Debug, Clone)]
pub struct Counterwitness {
    pub element: Option<Elem>,
    pub conjugator: Elem,
    pub intermediate: Option<Subgroup>,
}

#[derive(Debug, Clone)]
pub struct ClosureReport {
    pub kind: ClosureKind,
    pub holds: bool,
    pub counterwitness: Option<Counterwitness>,
}

#[derive(Debug, Clone)]
pub struct FusionClass {
    pub representative: Subgroup,
    pub members: Vec<Subgroup>,
}

/// `Aut_F(P) = N_G(P)/C_G(P)` and `Out_F(P) = N_G(P)/P·C_G(P)`, each realized
/// by the action on cosets.
#[derive(Debug, Clone)]
pub struct AutOut {
    pub aut: Arc<Group>,
    pub out: Arc<Group>,
}

/// An ascending chain of strongly closed subgroups from `1` to `S` with cyclic quotients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupersolvableChain {
    pub links: Vec<Subgroup>,
}

impl SupersolvableChain {
    /// Re-verifies every link against the context: strongly closed, ascending,
    /// and with cyclic quotients checked on the materialized quotient group.
    pub fn verify(&self, ctx: &FusionContext) -> Result<()> {
        let first = self
            .links
            .first()
            .ok_or_else(|| Error::Invariant("empty chain".into()))?;
        if !first.is_trivial() || self.links.last() != Some(ctx.sylow()) {
            return Err(Error::Invariant("chain must run from 1 to S".into()));
        }
        for link in &self.links {
            if !ctx.closure_predicate(link, ClosureKind::StronglyClosed)?.holds {
                return Err(Error::Invariant("chain link is not strongly closed".into()));
            }
        }
        for w in self.links.windows(2) {
            if !w[0].is_subgroup_of(&w[1]) {
                return Err(Error::Invariant("chain is not ascending".into()));
            }
            let (q, _) = quotient_of(&w[1], &w[0])?;
            if !structure_flags(&q.whole(), ctx.prime()).cyclic {
                return Err(Error::Invariant("chain quotient is not cyclic".into()));
            }
        }
        Ok(())
    }
}

/// The triple `(G, S, p)` with caches for the subgroup lattice of `S`,
/// normalizers, F-classes, essentials and strongly closed subgroups. Every
/// cache is filled at most once and is safe to populate concurrently.
pub struct FusionContext {
    g: Arc<Group>,
    s: Subgroup,
    p: u64,
    lattice: SubgroupLattice,
    normalizers: Vec<OnceLock<Subgroup>>,
    classes: Vec<OnceLock<Vec<usize>>>,
    essentials: OnceLock<Result<Vec<usize>>>,
    strongly_closed: OnceLock<Vec<usize>>,
}

impl std::fmt::Debug for FusionContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FusionContext")
            .field("order", &self.g.order())
            .field("p", &self.p)
            .field("sylow_order", &self.s.order())
            .finish()
    }
}

impl FusionContext {
    /// Builds `F_S(G)` over the deterministic Sylow subgroup. `p` must divide `|G|`.
    pub fn new(g: &Arc<Group>, p: u64) -> Result<FusionContext> {
        if !is_prime(p) {
            return Err(Error::validation(format!("{p} is not prime")));
        }
        if !(g.order() as u64).is_multiple_of(p) {
            return Err(Error::validation(format!("{p} does not divide |G| = {}", g.order())));
        }
        let s = sylow_subgroup(g, p)?;
        FusionContext::build(g.clone(), s, p)
    }

    /// Builds `F_S(G)` over a given Sylow subgroup.
    pub fn with_sylow(g: &Arc<Group>, s: &Subgroup, p: u64) -> Result<FusionContext> {
        if !is_prime(p) {
            return Err(Error::validation(format!("{p} is not prime")));
        }
        if !(g.order() as u64).is_multiple_of(p) {
            return Err(Error::validation(format!("{p} does not divide |G| = {}", g.order())));
        }
        check_sylow(g, s, p)?;
        FusionContext::build(g.clone(), s.clone(), p)
    }

    /// No divisibility check, so quotients may yield a trivial `S`.
    fn build(g: Arc<Group>, s: Subgroup, p: u64) -> Result<FusionContext> {
        let lattice = all_subgroups(&s, g.caps().subgroups)?;
        let n = lattice.len();
        Ok(FusionContext {
            g,
            s,
            p,
            lattice,
            normalizers: (0..n).map(|_| OnceLock::new()).collect(),
            classes: (0..n).map(|_| OnceLock::new()).collect(),
            essentials: OnceLock::new(),
            strongly_closed: OnceLock::new(),
        })
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.g
    }

    pub fn sylow(&self) -> &Subgroup {
        &self.s
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn lattice(&self) -> &SubgroupLattice {
        &self.lattice
    }

    /// Lattice index of `P`, or a validation error if `P` is not a subgroup of `S`.
    pub fn index(&self, p: &Subgroup) -> Result<usize> {
        if !p.same_parent(&self.s) {
            return Err(Error::validation(
                "subgroup belongs to a different group than the context",
            ));
        }
        self.lattice
            .index_of(p)
            .ok_or_else(|| Error::validation("subgroup is not contained in the Sylow subgroup S"))
    }

    fn at(&self, i: usize) -> &Subgroup {
        self.lattice.get(i)
    }

    /// `N_G(P)`, cached.
    pub fn normalizer(&self, p: &Subgroup) -> Result<Subgroup> {
        let i = self.index(p)?;
        Ok(self.normalizer_at(i).clone())
    }

    fn normalizer_at(&self, i: usize) -> &Subgroup {
        self.normalizers[i].get_or_init(|| normalizer_in(&self.g.whole(), self.at(i)))
    }

    pub fn centralizer(&self, p: &Subgroup) -> Result<Subgroup> {
        self.index(p)?;
        Ok(centralizer_in(&self.g.whole(), p))
    }

    /// `N_S(P)`.
    pub fn s_normalizer(&self, p: &Subgroup) -> Result<Subgroup> {
        Ok(self.normalizer(p)?.intersection(&self.s))
    }

    /// Distinct maps `P → Q` induced by conjugation, each with its least inducing element.
    pub fn morphism_set(&self, p: &Subgroup, q: &Subgroup) -> Result<Vec<GroupMap>> {
        self.index(p)?;
        self.index(q)?;
        Ok(morphisms_into(p, q, &self.g.whole()))
    }

    /// `P^F = {P^g : g ∈ G, P^g ≤ S}`.
    pub fn f_conjugates(&self, p: &Subgroup) -> Result<FusionClass> {
        let i = self.index(p)?;
        Ok(FusionClass {
            representative: p.clone(),
            members: self.class_at(i).iter().map(|&j| self.at(j).clone()).collect(),
        })
    }

    fn class_at(&self, i: usize) -> &Vec<usize> {
        self.classes[i].get_or_init(|| {
            let p = self.at(i);
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for g in self.g.elements() {
                if p.conjugate_lies_in(g, &self.s) {
                    let j = self.lattice.index_of(&p.conjugate(g)).expect("conjugate lies in S");
                    if seen.insert(j) {
                        out.push(j);
                    }
                }
            }
            out.sort_unstable();
            out
        })
    }

    pub fn aut_out(&self, p: &Subgroup) -> Result<AutOut> {
        let n = self.normalizer(p)?;
        let c = centralizer_in(&self.g.whole(), p);
        let pc = c.join(p);
        let (aut, _) = quotient_of(&n, &c)?;
        let (out, _) = quotient_of(&n, &pc)?;
        Ok(AutOut { aut, out })
    }

    pub fn fusion_predicate(&self, p: &Subgroup, kind: FusionKind) -> Result<bool> {
        let i = self.index(p)?;
        match kind {
            FusionKind::FullyNormalized => Ok(self.fully_normalized_at(i)),
            FusionKind::Centric => Ok(self.centric_at(i)),
            FusionKind::Radical => {
                let out = self.aut_out(p)?.out;
                if !(out.order() as u64).is_multiple_of(self.p) {
                    return Ok(true);
                }
                let sylow = sylow_subgroup(&out, self.p)?;
                Ok(core_in(&out.whole(), &sylow).is_trivial())
            }
            FusionKind::Essential => self.essential_at(i),
        }
    }

    fn fully_normalized_at(&self, i: usize) -> bool {
        let own = self.normalizer_at(i).intersection(&self.s).order();
        self.class_at(i)
            .iter()
            .all(|&j| self.normalizer_at(j).intersection(&self.s).order() <= own)
    }

    fn centric_at(&self, i: usize) -> bool {
        self.class_at(i).iter().all(|&j| {
            let q = self.at(j);
            centralizer_in(&self.s, q).is_subgroup_of(q)
        })
    }

    fn essential_at(&self, i: usize) -> Result<bool> {
        let p = self.at(i);
        if p.order() == self.s.order() || !self.centric_at(i) || !self.fully_normalized_at(i) {
            return Ok(false);
        }
        let out = self.aut_out(p)?.out;
        Ok(has_strongly_p_embedded(&out, self.p)?.is_some())
    }

    fn essential_indices(&self) -> Result<&Vec<usize>> {
        self.essentials
            .get_or_init(|| {
                let flags = par::map_range(self.lattice.len(), |i| self.essential_at(i));
                let mut out = Vec::new();
                for (i, f) in flags.into_iter().enumerate() {
                    if f? {
                        out.push(i);
                    }
                }
                out.push(self.lattice.len() - 1);
                Ok(out)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Essential subgroups together with `S`, in lattice order.
    pub fn essential_star(&self) -> Result<Vec<Subgroup>> {
        Ok(self.essential_indices()?.iter().map(|&i| self.at(i).clone()).collect())
    }

    pub fn closure_predicate(&self, q: &Subgroup, kind: ClosureKind) -> Result<ClosureReport> {
        let i = self.index(q)?;
        let counterwitness = match kind {
            ClosureKind::StronglyClosed => self.strong_closure_violation(q),
            ClosureKind::WeaklyClosed => self
                .g
                .elements()
                .find(|&g| q.conjugate_lies_in(g, &self.s) && !q.is_normalized_by(g))
                .map(|g| Counterwitness {
                    element: None,
                    conjugator: g,
                    intermediate: None,
                }),
            ClosureKind::SemiInvariant => self.semi_invariance_violation(i),
        };
        Ok(ClosureReport {
            kind,
            holds: counterwitness.is_none(),
            counterwitness,
        })
    }

    fn strong_closure_violation(&self, q: &Subgroup) -> Option<Counterwitness> {
        q.elements().find_map(|x| {
            self.g.elements().find_map(|g| {
                let y = self.g.conj(x, g);
                (self.s.contains(y) && !q.contains(y)).then_some(Counterwitness {
                    element: Some(x),
                    conjugator: g,
                    intermediate: None,
                })
            })
        })
    }

    /// For each `K` with `Q ≤ K ≤ S`, runs through `Aut_F(K)` as the maps on `K`
    /// induced by elements normalizing `K`, and checks that each maps `Q` onto `Q`.
    fn semi_invariance_violation(&self, i: usize) -> Option<Counterwitness> {
        let q = self.at(i);
        let parent = &self.g;
        let members: Vec<Elem> = q.elements().collect();
        self.lattice.between(q, &self.s).find_map(|k| {
            parent.elements().find_map(|g| {
                if !k.is_normalized_by(g) {
                    return None;
                }
                let moves = members.iter().any(|&x| !q.contains(parent.conj(x, g)));
                moves.then(|| Counterwitness {
                    element: None,
                    conjugator: g,
                    intermediate: Some(k.clone()),
                })
            })
        })
    }

    fn strongly_closed_indices(&self) -> &Vec<usize> {
        self.strongly_closed.get_or_init(|| {
            let flags = par::map_range(self.lattice.len(), |i| {
                self.strong_closure_violation(self.at(i)).is_none()
            });
            flags
                .into_iter()
                .enumerate()
                .filter(|(_, f)| *f)
                .map(|(i, _)| i)
                .collect()
        })
    }

    /// All strongly closed subgroups of `S`, in lattice order.
    pub fn strongly_closed_subgroups(&self) -> Vec<Subgroup> {
        self.strongly_closed_indices()
            .iter()
            .map(|&i| self.at(i).clone())
            .collect()
    }

    pub fn is_normal_in_f(&self, q: &Subgroup, method: NormalityMethod) -> Result<bool> {
        self.index(q)?;
        if !q.is_normal_in(&self.s) {
            return Ok(false);
        }
        match method {
            NormalityMethod::Criterion => {
                if !self.closure_predicate(q, ClosureKind::StronglyClosed)?.holds {
                    return Ok(false);
                }
                for &r in self.essential_indices()? {
                    let r_sub = self.at(r);
                    if !q.is_subgroup_of(r_sub) {
                        return Ok(false);
                    }
                    if !self
                        .normalizer_at(r)
                        .generators()
                        .iter()
                        .all(|&g| q.is_normalized_by(g))
                    {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            NormalityMethod::Oracle => Ok(self.normal_by_extension(q)),
        }
    }

    /// Every morphism `φ: P → S` extends to some `ψ` on `PQ` with
    /// `ψ(Q) = Q` and `ψ(PQ) ≤ φ(P)Q`.
    fn normal_by_extension(&self, q: &Subgroup) -> bool {
        let whole = self.g.whole();
        (0..self.lattice.len()).all(|i| {
            let p = self.at(i);
            let pq = p.join(q);
            let c = centralizer_in(&whole, p);
            morphisms_into(p, &self.s, &whole).iter().all(|phi| {
                let g = phi.inducing_element().expect("conjugation map");
                let target = p.conjugate(g).join(q);
                c.elements().any(|z| {
                    let h = self.g.mul(z, g);
                    q.is_normalized_by(h) && pq.conjugate_lies_in(h, &target)
                })
            })
        })
    }

    /// The largest subgroup normal in the fusion system.
    pub fn op_f(&self) -> Result<Subgroup> {
        let mut normal = Vec::new();
        for q in self.lattice.normal_in(&self.s) {
            if self.is_normal_in_f(q, NormalityMethod::Criterion)? {
                normal.push(q.clone());
            }
        }
        let top = normal.last().cloned().expect("the trivial subgroup is normal");
        if normal.iter().any(|q| !q.is_subgroup_of(&top)) {
            return Err(Error::Invariant("normal subgroups of F have no largest element".into()));
        }
        Ok(top)
    }

    /// Least fully normalized member of `P`'s F-class.
    pub fn fully_normalized_representative(&self, p: &Subgroup) -> Result<Subgroup> {
        let i = self.index(p)?;
        let j = self
            .class_at(i)
            .iter()
            .copied()
            .find(|&j| self.fully_normalized_at(j))
            .ok_or_else(|| Error::Invariant("no fully normalized class member".into()))?;
        Ok(self.at(j).clone())
    }

    /// The context `(N_G(Q), N_S(Q), p)`. `Q` must be fully normalized.
    pub fn normalizer_system(&self, q: &Subgroup) -> Result<FusionContext> {
        let i = self.index(q)?;
        if !self.fully_normalized_at(i) {
            return Err(Error::Precondition(
                "subgroup is not fully normalized; pass its fully normalized representative instead".into(),
            ));
        }
        let n = self.normalizer_at(i);
        let ns = n.intersection(&self.s);
        let ng = n.to_group();
        let ns_in = ns.transfer(&ng)?;
        if !is_sylow(&ns_in, self.p) {
            return Err(Error::Invariant("N_S(Q) is not a Sylow subgroup of N_G(Q)".into()));
        }
        FusionContext::build(ng, ns_in, self.p)
    }

    /// The context `(G/Q, S/Q, p)` together with the projection `G → G/Q`.
    /// Only quotients by subgroups normal in `G` are supported.
    pub fn quotient_system_with_projection(&self, q: &Subgroup) -> Result<(FusionContext, GroupMap)> {
        self.index(q)?;
        if !q.is_normal_in(&self.g.whole()) {
            return Err(Error::Unsupported(
                "quotient systems are only built for subgroups normal in G".into(),
            ));
        }
        let (gq, map) = quotient_group(&self.g, q)?;
        let sq = map.image(&self.s);
        Ok((FusionContext::build(gq, sq, self.p)?, map))
    }

    pub fn quotient_system(&self, q: &Subgroup) -> Result<FusionContext> {
        Ok(self.quotient_system_with_projection(q)?.0)
    }

    /// Lexicographically least supersolvable chain, if one exists.
    pub fn supersolvable_chain(&self) -> Result<Option<SupersolvableChain>> {
        let closed = self.strongly_closed_indices();
        for &i in closed {
            if !self.at(i).is_normal_in(&self.s) {
                return Err(Error::Invariant("a strongly closed subgroup is not normal in S".into()));
            }
        }
        let bottom = 0;
        let top = self.lattice.len() - 1;
        Ok(self.chain_search(closed, bottom, top).map(|v| self.to_chain(&v)))
    }

    /// A supersolvable chain passing through `Q`, if one exists.
    pub fn chain_through(&self, q: &Subgroup) -> Result<Option<SupersolvableChain>> {
        let qi = self.index(q)?;
        let closed = self.strongly_closed_indices();
        if !closed.contains(&qi) {
            return Ok(None);
        }
        let lower = self.chain_search(closed, 0, qi);
        let upper = self.chain_search(closed, qi, self.lattice.len() - 1);
        Ok(match (lower, upper) {
            (Some(mut a), Some(b)) => {
                a.extend_from_slice(&b[1..]);
                Some(self.to_chain(&a))
            }
            _ => None,
        })
    }

    fn to_chain(&self, links: &[usize]) -> SupersolvableChain {
        SupersolvableChain {
            links: links.iter().map(|&i| self.at(i).clone()).collect(),
        }
    }

    /// Depth-first search over `nodes` from `from` to `to`, stepping only to
    /// strictly larger subgroups with cyclic quotient, candidates in lattice order.
    fn chain_search(&self, nodes: &[usize], from: usize, to: usize) -> Option<Vec<usize>> {
        let target = self.at(to);
        let mut dead: HashSet<usize> = HashSet::new();
        let mut path = vec![from];
        fn dfs(
            ctx: &FusionContext,
            nodes: &[usize],
            target: &Subgroup,
            to: usize,
            path: &mut Vec<usize>,
            dead: &mut HashSet<usize>,
        ) -> bool {
            let cur = *path.last().expect("path is never empty");
            if cur == to {
                return true;
            }
            let current = ctx.at(cur);
            for &n in nodes {
                let next = ctx.at(n);
                if dead.contains(&n)
                    || next.order() <= current.order()
                    || !current.is_subgroup_of(next)
                    || !next.is_subgroup_of(target)
                    || !quotient_is_cyclic(next, current)
                {
                    continue;
                }
                path.push(n);
                if dfs(ctx, nodes, target, to, path, dead) {
                    return true;
                }
                path.pop();
                dead.insert(n);
            }
            false
        }
        dfs(self, nodes, target, to, &mut path, &mut dead).then_some(path)
    }

    /// True when `F_S(G) = F_S(S)`: for every `P ≤ S`, the maps `P → S`
    /// induced by `G` are exactly those induced by `S`.
    pub fn fusion_equals_inner(&self) -> bool {
        let whole = self.g.whole();
        let flags = par::map_range(self.lattice.len(), |i| {
            let p = self.at(i);
            let key = |m: &GroupMap| morphism_key(p, m);
            let from_g: HashSet<Vec<Elem>> = morphisms_into(p, &self.s, &whole).iter().map(key).collect();
            let from_s: HashSet<Vec<Elem>> = morphisms_into(p, &self.s, &self.s).iter().map(key).collect();
            from_g == from_s
        });
        flags.into_iter().all(|f| f)
    }
}

fn morphism_key(p: &Subgroup, m: &GroupMap) -> Vec<Elem> {
    let g = m.inducing_element().expect("conjugation map");
    p.generators().iter().map(|&x| p.parent().conj(x, g)).collect()
}

/// Distinct conjugation maps `P → Q` induced by elements of `ambient`, each
/// recorded with its least inducing element.
pub fn morphisms_into(p: &Subgroup, q: &Subgroup, ambient: &Subgroup) -> Vec<GroupMap> {
    let parent = p.parent();
    let gens = p.generators();
    let mut seen: HashSet<Vec<Elem>> = HashSet::new();
    let mut out = Vec::new();
    for g in ambient.elements() {
        if !p.conjugate_lies_in(g, q) {
            continue;
        }
        let key: Vec<Elem> = gens.iter().map(|&x| parent.conj(x, g)).collect();
        if seen.insert(key) {
            out.push(GroupMap::conjugation(p, g));
        }
    }
    out
}
