//! Materialized permutation groups, subgroups as element bitsets, and maps
//! between groups.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{Permutation, Point};

/// Index of an element inside its group's sorted element list.
pub type Elem = u32;

/// Groups up to this order get a full multiplication table on first use.
const TABLE_LIMIT: usize = 1024;

/// Resource caps. Every algorithm in the engine is exhaustive, so these are
/// what turn a runaway enumeration into a diagnosable error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub order: usize,
    pub degree: usize,
    pub subgroups: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            order: 5_000,
            degree: 64,
            subgroups: 20_000,
        }
    }
}

/// A finite permutation group with all of its elements materialized.
///
/// Elements are stored in lexicographic order of their image sequences, so
/// the identity is always element `0`.
pub struct Group {
    degree: usize,
    generators: Vec<Elem>,
    elements: Vec<Permutation>,
    lookup: HashMap<Permutation, Elem>,
    inverses: Vec<Elem>,
    caps: Caps,
    table: OnceLock<Option<Vec<Elem>>>,
    orders: OnceLock<Vec<u32>>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("generators", &self.generator_perms())
            .finish()
    }
}

impl Group {
    /// Closes `generators` under composition. Checks the degree and order caps.
    pub fn generate(degree: usize, generators: &[Permutation], caps: Caps) -> Result<Arc<Group>> {
        if degree == 0 {
            return Err(Error::validation("degree must be positive"));
        }
        if degree > caps.degree {
            return Err(Error::Capacity {
                what: "degree",
                cap: caps.degree,
                reached: degree,
            });
        }
        Group::generate_internal(degree, generators, caps)
    }

    /// Like [`Group::generate`] but without the degree cap, for derived actions
    /// (coset actions, automorphism actions) whose degree is bounded by the order cap.
    pub(crate) fn generate_internal(degree: usize, generators: &[Permutation], caps: Caps) -> Result<Arc<Group>> {
        for g in generators {
            if g.degree() != degree {
                return Err(Error::validation(format!(
                    "generator {g} has degree {} but the group degree is {degree}",
                    g.degree()
                )));
            }
        }
        let identity = Permutation::identity(degree);
        let mut seen: HashSet<Permutation> = HashSet::new();
        seen.insert(identity.clone());
        let mut queue = vec![identity];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head].clone();
            head += 1;
            for s in generators {
                let y = x.compose(s);
                if !seen.contains(&y) {
                    if seen.len() >= caps.order {
                        return Err(Error::Capacity {
                            what: "group order",
                            cap: caps.order,
                            reached: seen.len() + 1,
                        });
                    }
                    seen.insert(y.clone());
                    queue.push(y);
                }
            }
        }
        let mut elements = queue;
        elements.sort();
        Ok(Group::from_sorted_elements(degree, elements, generators, caps))
    }

    /// Wraps an element list already known to be a group, sorted lexicographically.
    pub(crate) fn from_sorted_elements(
        degree: usize,
        elements: Vec<Permutation>,
        generators: &[Permutation],
        caps: Caps,
    ) -> Arc<Group> {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        let lookup: HashMap<Permutation, Elem> = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as Elem))
            .collect();
        let inverses = elements.iter().map(|p| lookup[&p.inverse()]).collect();
        let mut gens: Vec<Elem> = generators.iter().map(|g| lookup[g]).filter(|&g| g != 0).collect();
        gens.dedup();
        Arc::new(Group {
            degree,
            generators: gens,
            elements,
            lookup,
            inverses,
            caps,
            table: OnceLock::new(),
            orders: OnceLock::new(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    pub fn generator_perms(&self) -> Vec<Permutation> {
        self.generators.iter().map(|&g| self.perm(g).clone()).collect()
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = Elem> + '_ {
        0..self.elements.len() as Elem
    }

    pub fn perm(&self, e: Elem) -> &Permutation {
        &self.elements[e as usize]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<Elem> {
        self.lookup.get(p).copied()
    }

    pub const IDENTITY: Elem = 0;

    fn table(&self) -> Option<&Vec<Elem>> {
        self.table
            .get_or_init(|| {
                let n = self.order();
                if n > TABLE_LIMIT {
                    return None;
                }
                let mut t = Vec::with_capacity(n * n);
                for a in &self.elements {
                    for b in &self.elements {
                        t.push(self.lookup[&a.compose(b)]);
                    }
                }
                Some(t)
            })
            .as_ref()
    }

    /// `a` followed by `b`.
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match self.table() {
            Some(t) => t[a as usize * self.order() + b as usize],
            None => self.lookup[&self.perm(a).compose(self.perm(b))],
        }
    }

    pub fn inv(&self, a: Elem) -> Elem {
        self.inverses[a as usize]
    }

    /// `g⁻¹ x g`.
    pub fn conj(&self, x: Elem, g: Elem) -> Elem {
        self.mul(self.mul(self.inv(g), x), g)
    }

    pub fn pow(&self, x: Elem, k: usize) -> Elem {
        let mut acc = Group::IDENTITY;
        for _ in 0..k {
            acc = self.mul(acc, x);
        }
        acc
    }

    pub fn commute(&self, a: Elem, b: Elem) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn elem_order(&self, x: Elem) -> usize {
        self.orders
            .get_or_init(|| self.elements.iter().map(|p| p.order() as u32).collect())[x as usize] as usize
    }

    pub fn whole(self: &Arc<Self>) -> Subgroup {
        let mut members = FixedBitSet::with_capacity(self.order());
        members.insert_range(..);
        Subgroup::from_parts(self.clone(), members, Some(self.generators.clone()))
    }

    pub fn trivial(self: &Arc<Self>) -> Subgroup {
        let mut members = FixedBitSet::with_capacity(self.order());
        members.insert(0);
        Subgroup::from_parts(self.clone(), members, Some(Vec::new()))
    }

    /// The subgroup generated by `gens`.
    pub fn subgroup_generated(self: &Arc<Self>, gens: &[Elem]) -> Subgroup {
        let mut members = FixedBitSet::with_capacity(self.order());
        members.insert(0);
        self.close_into(&mut members, vec![0], gens);
        let mut g: Vec<Elem> = gens.iter().copied().filter(|&x| x != 0).collect();
        g.dedup();
        Subgroup::from_parts(self.clone(), members, Some(g))
    }

    /// The subgroup generated by a list of permutations, which must all lie in the group.
    pub fn subgroup_from_perms(self: &Arc<Self>, perms: &[Permutation]) -> Result<Subgroup> {
        let gens = perms
            .iter()
            .map(|p| {
                self.index_of(p)
                    .ok_or_else(|| Error::validation(format!("{p} is not an element of the group")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.subgroup_generated(&gens))
    }

    /// Extends `members` (closed under nothing in particular) by right
    /// multiplication with `gens` starting from `frontier`.
    fn close_into(&self, members: &mut FixedBitSet, mut frontier: Vec<Elem>, gens: &[Elem]) {
        while let Some(x) = frontier.pop() {
            for &s in gens {
                let y = self.mul(x, s);
                if !members.put(y as usize) {
                    frontier.push(y);
                }
            }
        }
    }
}

/// A subgroup of a materialized group, stored as a bitset over the parent's elements.
///
/// Equality and hashing use the member set; subgroups of different parents
/// never compare equal. The ordering is by order, then lexicographically by
/// the sorted member list.
#[derive(Clone)]
pub struct Subgroup {
    parent: Arc<Group>,
    members: FixedBitSet,
    order: usize,
    gens: OnceLock<Vec<Elem>>,
}

impl Subgroup {
    fn from_parts(parent: Arc<Group>, members: FixedBitSet, gens: Option<Vec<Elem>>) -> Subgroup {
        let order = members.count_ones(..);
        let cell = OnceLock::new();
        if let Some(g) = gens {
            let _ = cell.set(g);
        }
        Subgroup {
            parent,
            members,
            order,
            gens: cell,
        }
    }

    /// Wraps a member set the caller knows to be closed.
    pub(crate) fn from_members(parent: &Arc<Group>, members: FixedBitSet) -> Subgroup {
        let s = Subgroup::from_parts(parent.clone(), members, None);
        debug_assert!(s.members.contains(0));
        s
    }

    /// Checks closure before wrapping an arbitrary member set.
    pub fn from_member_set(parent: &Arc<Group>, members: FixedBitSet) -> Result<Subgroup> {
        if members.len() != parent.order() || !members.contains(0) {
            return Err(Error::validation("member set does not contain the identity"));
        }
        for a in members.ones() {
            if !members.contains(parent.inv(a as Elem) as usize) {
                return Err(Error::validation("member set is not closed under inverses"));
            }
            for b in members.ones() {
                if !members.contains(parent.mul(a as Elem, b as Elem) as usize) {
                    return Err(Error::validation("member set is not closed under products"));
                }
            }
        }
        Ok(Subgroup::from_members(parent, members))
    }

    pub fn parent(&self) -> &Arc<Group> {
        &self.parent
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.members.contains(e as usize)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        self.members.ones().map(|i| i as Elem)
    }

    pub fn element_perms(&self) -> Vec<Permutation> {
        self.elements().map(|e| self.parent.perm(e).clone()).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// A small generating set: greedily adds the least element not yet generated.
    pub fn generators(&self) -> &[Elem] {
        self.gens.get_or_init(|| {
            let mut gens = Vec::new();
            let mut current = FixedBitSet::with_capacity(self.parent.order());
            current.insert(0);
            for x in self.elements() {
                if !current.contains(x as usize) {
                    gens.push(x);
                    // Regenerate from scratch: the new span needs all products with the old one.
                    let frontier: Vec<Elem> = current.ones().map(|i| i as Elem).collect();
                    self.parent.close_into(&mut current, frontier, &gens);
                }
            }
            gens
        })
    }

    pub fn generator_perms(&self) -> Vec<Permutation> {
        self.generators().iter().map(|&g| self.parent.perm(g).clone()).collect()
    }

    pub fn same_parent(&self, other: &Subgroup) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent)
    }

    /// Errors unless both subgroups live in the same parent group.
    pub fn check_same_parent(&self, other: &Subgroup) -> Result<()> {
        if self.same_parent(other) {
            Ok(())
        } else {
            Err(Error::validation(
                "subgroups belong to different parent groups and cannot be compared",
            ))
        }
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        debug_assert!(self.same_parent(other));
        self.order <= other.order && self.members.is_subset(&other.members)
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        debug_assert!(self.same_parent(other));
        let mut m = self.members.clone();
        m.intersect_with(&other.members);
        Subgroup::from_members(&self.parent, m)
    }

    pub fn join(&self, other: &Subgroup) -> Subgroup {
        debug_assert!(self.same_parent(other));
        let mut gens = self.generators().to_vec();
        gens.extend_from_slice(other.generators());
        self.parent.subgroup_generated(&gens)
    }

    /// `⟨self, x⟩`, reusing the current member set as the starting point.
    pub fn join_element(&self, x: Elem) -> Subgroup {
        if self.contains(x) {
            return self.clone();
        }
        let mut gens = self.generators().to_vec();
        gens.push(x);
        let mut members = self.members.clone();
        let frontier: Vec<Elem> = self.elements().collect();
        self.parent.close_into(&mut members, frontier, &gens);
        Subgroup::from_parts(self.parent.clone(), members, Some(gens))
    }

    /// `{g⁻¹ x g : x ∈ self}`.
    pub fn conjugate(&self, g: Elem) -> Subgroup {
        let mut m = FixedBitSet::with_capacity(self.parent.order());
        for x in self.elements() {
            m.insert(self.parent.conj(x, g) as usize);
        }
        let gens = self.generators().iter().map(|&x| self.parent.conj(x, g)).collect();
        Subgroup::from_parts(self.parent.clone(), m, Some(gens))
    }

    /// True when `self^g ≤ other`, checked on generators.
    pub fn conjugate_lies_in(&self, g: Elem, other: &Subgroup) -> bool {
        self.generators()
            .iter()
            .all(|&x| other.contains(self.parent.conj(x, g)))
    }

    pub fn is_normalized_by(&self, g: Elem) -> bool {
        self.conjugate_lies_in(g, self)
    }

    /// True when every element of `ambient` normalizes `self`.
    pub fn is_normal_in(&self, ambient: &Subgroup) -> bool {
        ambient.generators().iter().all(|&g| self.is_normalized_by(g))
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generators();
        gens.iter()
            .enumerate()
            .all(|(i, &a)| gens[i + 1..].iter().all(|&b| self.parent.commute(a, b)))
    }

    /// `|self · other|` as a set product.
    pub fn product_size(&self, other: &Subgroup) -> usize {
        self.order * other.order / self.intersection(other).order
    }

    /// Materializes this subgroup as a group in its own right, on the same points.
    pub fn to_group(&self) -> Arc<Group> {
        let elements = self.element_perms();
        Group::from_sorted_elements(
            self.parent.degree(),
            elements,
            &self.generator_perms(),
            self.parent.caps(),
        )
    }

    /// Re-expresses this subgroup inside another group on the same points.
    pub fn transfer(&self, target: &Arc<Group>) -> Result<Subgroup> {
        let mut m = FixedBitSet::with_capacity(target.order());
        for p in self.element_perms() {
            let e = target
                .index_of(&p)
                .ok_or_else(|| Error::validation(format!("{p} is not an element of the target group")))?;
            m.insert(e as usize);
        }
        Ok(Subgroup::from_members(target, m))
    }

    pub(crate) fn cmp_members(&self, other: &Subgroup) -> Ordering {
        self.order
            .cmp(&other.order)
            .then_with(|| self.members.ones().cmp(other.members.ones()))
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.same_parent(other) && self.members == other.members
    }
}

impl Eq for Subgroup {}

impl Hash for Subgroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.members.hash(state);
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_members(other)
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {}, gens {:?})", self.order, self.generator_perms())
    }
}

/// A map from a subgroup into a group, given pointwise.
#[derive(Clone, Debug)]
pub struct GroupMap {
    source: Subgroup,
    target: Arc<Group>,
    /// Images aligned with `source.elements()`.
    assignment: Vec<Elem>,
    inducing_element: Option<Elem>,
}

impl GroupMap {
    pub fn new(source: Subgroup, target: Arc<Group>, assignment: Vec<Elem>, inducing: Option<Elem>) -> Self {
        debug_assert_eq!(assignment.len(), source.order());
        GroupMap {
            source,
            target,
            assignment,
            inducing_element: inducing,
        }
    }

    /// The conjugation map `x ↦ g⁻¹ x g` restricted to `source`.
    pub fn conjugation(source: &Subgroup, g: Elem) -> GroupMap {
        let parent = source.parent().clone();
        let assignment = source.elements().map(|x| parent.conj(x, g)).collect();
        GroupMap::new(source.clone(), parent, assignment, Some(g))
    }

    pub fn source(&self) -> &Subgroup {
        &self.source
    }

    pub fn target(&self) -> &Arc<Group> {
        &self.target
    }

    pub fn assignment(&self) -> &[Elem] {
        &self.assignment
    }

    pub fn inducing_element(&self) -> Option<Elem> {
        self.inducing_element
    }

    pub fn apply(&self, x: Elem) -> Option<Elem> {
        if !self.source.contains(x) {
            return None;
        }
        let pos = self.source.members().ones().take_while(|&i| i < x as usize).count();
        Some(self.assignment[pos])
    }

    /// Pairs `(x, image)` in source order.
    pub fn pairs(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.source.elements().zip(self.assignment.iter().copied())
    }

    fn lookup_table(&self) -> HashMap<Elem, Elem> {
        self.pairs().collect()
    }

    /// Checks `f(xy) = f(x) f(y)` on all pairs.
    pub fn is_homomorphism(&self) -> bool {
        let f = self.lookup_table();
        let src = self.source.parent();
        f.iter()
            .all(|(&x, &fx)| f.iter().all(|(&y, &fy)| f[&src.mul(x, y)] == self.target.mul(fx, fy)))
    }

    /// Checks the recorded inducing element against the assignment.
    pub fn matches_inducing_element(&self) -> bool {
        match self.inducing_element {
            None => true,
            Some(g) => {
                Arc::ptr_eq(self.source.parent(), &self.target)
                    && self.pairs().all(|(x, fx)| self.target.conj(x, g) == fx)
            }
        }
    }

    /// Image of a subgroup of the source.
    pub fn image(&self, h: &Subgroup) -> Subgroup {
        let f = self.lookup_table();
        let mut m = FixedBitSet::with_capacity(self.target.order());
        for x in h.elements() {
            m.insert(f[&x] as usize);
        }
        Subgroup::from_members(&self.target, m)
    }

    /// Kernel, as a subgroup of the source's parent.
    pub fn kernel(&self) -> Subgroup {
        let mut m = FixedBitSet::with_capacity(self.source.parent().order());
        for (x, fx) in self.pairs() {
            if fx == Group::IDENTITY {
                m.insert(x as usize);
            }
        }
        Subgroup::from_members(self.source.parent(), m)
    }
}

/// Helper for callers that build permutations on derived point sets.
pub(crate) fn perm_from_points(points: Vec<usize>) -> Permutation {
    Permutation::from_points_unchecked(points.into_iter().map(|x| x as Point).collect())
}
