//! Subgroup lattices, normal and maximal subgroups, chief series.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::Range;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Elem, Group, Subgroup};
use crate::ops::{order_modulo, violating_conjugator};
use crate::par;

/// Every subgroup of a group, sorted by order and then by member list.
#[derive(Clone, Debug)]
pub struct SubgroupLattice {
    top: Subgroup,
    all: Vec<Subgroup>,
    by_order: BTreeMap<usize, Range<usize>>,
    index: HashMap<FixedBitSet, usize>,
}

impl SubgroupLattice {
    fn from_set(top: Subgroup, set: HashSet<Subgroup>) -> SubgroupLattice {
        let mut all: Vec<Subgroup> = set.into_iter().collect();
        all.sort();
        let mut by_order = BTreeMap::new();
        let mut start = 0;
        for i in 1..=all.len() {
            if i == all.len() || all[i].order() != all[start].order() {
                by_order.insert(all[start].order(), start..i);
                start = i;
            }
        }
        let index = all.iter().enumerate().map(|(i, s)| (s.members().clone(), i)).collect();
        SubgroupLattice {
            top,
            all,
            by_order,
            index,
        }
    }

    /// The group whose subgroups are listed.
    pub fn top(&self) -> &Subgroup {
        &self.top
    }

    pub fn all(&self) -> &[Subgroup] {
        &self.all
    }

    pub fn len(&self) -> usize {
        self.all.len()
    }

    pub fn is_empty(&self) -> bool {
        self.all.is_empty()
    }

    pub fn get(&self, i: usize) -> &Subgroup {
        &self.all[i]
    }

    pub fn of_order(&self, n: usize) -> &[Subgroup] {
        match self.by_order.get(&n) {
            Some(r) => &self.all[r.clone()],
            None => &[],
        }
    }

    pub fn orders(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_order.keys().copied()
    }

    pub fn index_of(&self, h: &Subgroup) -> Option<usize> {
        if !h.same_parent(&self.top) {
            return None;
        }
        self.index.get(h.members()).copied()
    }

    /// Subgroups `K` with `lower ≤ K ≤ upper`, in lattice order.
    pub fn between<'a>(&'a self, lower: &'a Subgroup, upper: &'a Subgroup) -> impl Iterator<Item = &'a Subgroup> + 'a {
        self.all
            .iter()
            .filter(move |k| lower.is_subgroup_of(k) && k.is_subgroup_of(upper))
    }

    /// Subgroups normal in `ambient`.
    pub fn normal_in<'a>(&'a self, ambient: &'a Subgroup) -> impl Iterator<Item = &'a Subgroup> + 'a {
        self.all.iter().filter(move |k| k.is_normal_in(ambient))
    }
}

fn capacity(cap: usize, reached: usize) -> Error {
    Error::Capacity {
        what: "subgroup count",
        cap,
        reached,
    }
}

/// Grows a family of subgroups to its closure under joining with the
/// subgroups generated by `seeds`, starting from those seeds.
fn join_closure(
    top: &Subgroup,
    seeds: Vec<Subgroup>,
    count_cap: usize,
    join: impl Fn(&Subgroup, &Subgroup) -> Subgroup + Sync + Send,
) -> Result<HashSet<Subgroup>> {
    let mut found: HashSet<Subgroup> = HashSet::new();
    found.insert(top.parent().trivial().intersection(top));
    let mut frontier = Vec::new();
    for s in &seeds {
        if found.insert(s.clone()) {
            frontier.push(s.clone());
        }
    }
    if found.len() > count_cap {
        return Err(capacity(count_cap, found.len()));
    }
    while !frontier.is_empty() {
        let joined: Vec<Vec<Subgroup>> = par::map(&frontier, |k| {
            seeds
                .iter()
                .filter(|c| !c.is_subgroup_of(k))
                .map(|c| join(k, c))
                .collect()
        });
        let mut next = Vec::new();
        for j in joined.into_iter().flatten() {
            if !found.contains(&j) {
                found.insert(j.clone());
                next.push(j);
                if found.len() > count_cap {
                    return Err(capacity(count_cap, found.len()));
                }
            }
        }
        next.sort();
        frontier = next;
    }
    Ok(found)
}

/// All subgroups of `top`: cyclic subgroups first, then joins with cyclic
/// subgroups until nothing new appears.
pub fn all_subgroups(top: &Subgroup, count_cap: usize) -> Result<SubgroupLattice> {
    let parent = top.parent();
    let mut cyclic_set: HashSet<Subgroup> = HashSet::new();
    let mut cyclics = Vec::new();
    for x in top.elements() {
        if x == Group::IDENTITY {
            continue;
        }
        let c = parent.subgroup_generated(&[x]);
        if cyclic_set.insert(c.clone()) {
            cyclics.push(c);
        }
    }
    cyclics.sort();
    let found = join_closure(top, cyclics, count_cap, |k, c| k.join_element(c.generators()[0]))?;
    Ok(SubgroupLattice::from_set(top.clone(), found))
}

/// The lattice of a whole group under its own subgroup cap.
pub fn lattice_of(g: &Arc<Group>) -> Result<SubgroupLattice> {
    all_subgroups(&g.whole(), g.caps().subgroups)
}

/// Normal subgroups of `G`, filtered from the full lattice.
pub fn normal_subgroups(g: &Arc<Group>) -> Result<Vec<Subgroup>> {
    let lattice = lattice_of(g)?;
    let whole = g.whole();
    Ok(lattice.normal_in(&whole).cloned().collect())
}

/// Smallest subgroup of `ambient`'s parent containing `h` and normalized by `ambient`.
pub fn normal_closure(ambient: &Subgroup, h: &Subgroup) -> Subgroup {
    let parent = ambient.parent();
    let mut current = h.clone();
    loop {
        let outside = ambient.generators().iter().find_map(|&g| {
            current
                .generators()
                .iter()
                .map(|&x| parent.conj(x, g))
                .find(|&y| !current.contains(y))
        });
        match outside {
            Some(y) => current = current.join_element(y),
            None => return current,
        }
    }
}

/// Normal subgroups of `G` as joins of normal closures of single elements.
/// Avoids building the full lattice.
pub fn normal_subgroups_by_closure(g: &Arc<Group>) -> Result<Vec<Subgroup>> {
    let whole = g.whole();
    let mut seen_elems = FixedBitSet::with_capacity(g.order());
    let mut seeds: Vec<Subgroup> = Vec::new();
    for x in g.elements() {
        if x == Group::IDENTITY || seen_elems.contains(x as usize) {
            continue;
        }
        let c = normal_closure(&whole, &g.subgroup_generated(&[x]));
        // Conjugates of x have the same normal closure.
        for y in g.elements() {
            seen_elems.insert(g.conj(x, y) as usize);
        }
        if !seeds.contains(&c) {
            seeds.push(c);
        }
    }
    seeds.sort();
    let found = join_closure(&whole, seeds, g.caps().subgroups, |k, c| k.join(c))?;
    let mut out: Vec<Subgroup> = found.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Maximal proper subgroups of `lattice.top()`.
pub fn maximal_subgroups(lattice: &SubgroupLattice) -> Vec<Subgroup> {
    let top = lattice.top();
    lattice
        .all()
        .iter()
        .filter(|m| m.order() < top.order())
        .filter(|m| {
            top.elements()
                .filter(|&x| !m.contains(x))
                .all(|x| m.join_element(x).order() == top.order())
        })
        .cloned()
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ChiefFactor {
    #[serde(skip)]
    pub lower: Subgroup,
    #[serde(skip)]
    pub upper: Subgroup,
    pub order: usize,
    pub cyclic: bool,
}

/// True when `upper/lower` is cyclic.
pub fn quotient_is_cyclic(upper: &Subgroup, lower: &Subgroup) -> bool {
    let index = upper.order() / lower.order();
    index == 1
        || upper
            .elements()
            .any(|x| order_modulo(upper.parent(), x, lower) == index)
}

fn require_normal(g: &Arc<Group>, n: &Subgroup) -> Result<()> {
    if !Arc::ptr_eq(g, n.parent()) {
        return Err(Error::validation("subgroup does not belong to the given group"));
    }
    if let Some(x) = violating_conjugator(&g.whole(), n) {
        return Err(Error::validation(format!(
            "subgroup is not normal: conjugation by {} moves it",
            g.perm(x)
        )));
    }
    Ok(())
}

fn chief_series_with(
    normals: &[Subgroup],
    n: &Subgroup,
    choose: &mut dyn FnMut(&[&Subgroup]) -> usize,
) -> Vec<ChiefFactor> {
    let mut factors = Vec::new();
    let mut current = n.parent().trivial();
    while current.order() < n.order() {
        let candidates: Vec<&Subgroup> = normals
            .iter()
            .filter(|m| m.order() > current.order() && current.is_subgroup_of(m) && m.is_subgroup_of(n))
            .collect();
        let minimal: Vec<&Subgroup> = candidates
            .iter()
            .copied()
            .filter(|m| !candidates.iter().any(|k| k.order() < m.order() && k.is_subgroup_of(m)))
            .collect();
        let next = minimal[choose(&minimal)].clone();
        factors.push(ChiefFactor {
            order: next.order() / current.order(),
            cyclic: quotient_is_cyclic(&next, &current),
            lower: current,
            upper: next.clone(),
        });
        current = next;
    }
    factors
}

/// A `G`-chief series of the normal subgroup `N`, bottom-up, always stepping
/// to the least minimal normal subgroup above the current term.
pub fn chief_series_below(g: &Arc<Group>, n: &Subgroup) -> Result<Vec<ChiefFactor>> {
    require_normal(g, n)?;
    let normals = normal_subgroups_by_closure(g)?;
    // `normals` is sorted, so the first minimal candidate is the least one.
    Ok(chief_series_with(&normals, n, &mut |_| 0))
}

/// Factor labels `(order, cyclic)` of every chief series of `N`, one sorted
/// multiset per refinement path.
pub fn all_chief_label_sets(g: &Arc<Group>, n: &Subgroup) -> Result<Vec<Vec<(usize, bool)>>> {
    require_normal(g, n)?;
    let normals = normal_subgroups_by_closure(g)?;
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![vec![]];
    // Depth-first over choice sequences: replay a prefix, then branch on the next choice.
    while let Some(prefix) = stack.pop() {
        let mut step = 0;
        let mut branch_width = None;
        let factors = chief_series_with(&normals, n, &mut |mins| {
            let pick = if step < prefix.len() {
                prefix[step]
            } else {
                if branch_width.is_none() {
                    branch_width = Some((step, mins.len()));
                }
                0
            };
            step += 1;
            pick
        });
        match branch_width {
            Some((at, width)) if at == prefix.len() => {
                for choice in (0..width).rev() {
                    let mut p = prefix.clone();
                    p.push(choice);
                    stack.push(p);
                }
            }
            _ => {
                let mut labels: Vec<(usize, bool)> = factors.iter().map(|f| (f.order, f.cyclic)).collect();
                labels.sort();
                out.push(labels);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct HypercenterCertificate {
    pub holds: bool,
    pub factors: Vec<ChiefFactor>,
}

/// Decides `N ≤ Z_𝔘(G)` for normal `N`: every `G`-chief factor below `N` is cyclic.
#[allow(non_snake_case)]
pub fn lies_in_U_hypercenter(g: &Arc<Group>, n: &Subgroup) -> Result<HypercenterCertificate> {
    let factors = chief_series_below(g, n)?;
    Ok(HypercenterCertificate {
        holds: factors.iter().all(|f| f.cyclic),
        factors,
    })
}

/// All subgroups generated by at most two elements, by brute force.
pub fn two_generated_subgroups(top: &Subgroup) -> HashSet<Subgroup> {
    let parent = top.parent();
    let elems: Vec<Elem> = top.elements().collect();
    let mut out = HashSet::new();
    for (i, &a) in elems.iter().enumerate() {
        for &b in &elems[i..] {
            out.insert(parent.subgroup_generated(&[a, b]));
        }
    }
    out
}
