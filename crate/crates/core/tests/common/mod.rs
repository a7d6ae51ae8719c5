//! Brute-force oracles shared by the integration tests. Each one works from
//! the element lists and the multiplication of the group only, so that it does
//! not share code paths with the engine's decision procedures.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use fusionlab::arith::prime_divisors;
use fusionlab::fusion::FusionContext;
use fusionlab::io::builtin_corpus;
use fusionlab::{Caps, Elem, Group, Subgroup};

/// Every builtin corpus group with each of its prime divisors.
pub fn corpus_contexts() -> Vec<(String, Arc<Group>, u64)> {
    let mut out = Vec::new();
    for entry in builtin_corpus() {
        let g = entry.load(Caps::default()).expect("corpus entry loads");
        for p in prime_divisors(g.order() as u64) {
            out.push((entry.name.clone(), g.clone(), p));
        }
    }
    out
}

pub fn corpus_group(name: &str) -> Arc<Group> {
    builtin_corpus()
        .into_iter()
        .find(|e| e.name == name)
        .unwrap_or_else(|| panic!("{name} is not in the corpus"))
        .load(Caps::default())
        .unwrap()
}

pub fn conj(g: &Group, x: Elem, y: Elem) -> Elem {
    g.mul(g.mul(g.inv(y), x), y)
}

pub fn members(h: &Subgroup) -> BTreeSet<Elem> {
    h.elements().collect()
}

pub fn conjugate_set(g: &Group, h: &BTreeSet<Elem>, y: Elem) -> BTreeSet<Elem> {
    h.iter().map(|&x| conj(g, x, y)).collect()
}

pub fn normalizes(g: &Group, h: &BTreeSet<Elem>, y: Elem) -> bool {
    conjugate_set(g, h, y) == *h
}

pub fn normalizer(g: &Group, h: &BTreeSet<Elem>) -> BTreeSet<Elem> {
    g.elements().filter(|&y| normalizes(g, h, y)).collect()
}

/// `x^g ∈ S ⇒ x^g ∈ Q` for all `x ∈ Q`, `g ∈ G`.
pub fn strongly_closed(g: &Group, s: &BTreeSet<Elem>, q: &BTreeSet<Elem>) -> bool {
    q.iter().all(|&x| {
        g.elements()
            .all(|y| !s.contains(&conj(g, x, y)) || q.contains(&conj(g, x, y)))
    })
}

/// `Q^g ≤ S ⇒ Q^g = Q`.
pub fn weakly_closed(g: &Group, s: &BTreeSet<Elem>, q: &BTreeSet<Elem>) -> bool {
    g.elements().all(|y| {
        let c = conjugate_set(g, q, y);
        !c.is_subset(s) || c == *q
    })
}

/// `H` is mapped to itself by every element normalizing any `K` with `H ≤ K ≤ S`.
pub fn semi_invariant(g: &Group, ks: &[BTreeSet<Elem>], h: &BTreeSet<Elem>) -> bool {
    ks.iter()
        .filter(|k| h.is_subset(k))
        .all(|k| g.elements().all(|y| !normalizes(g, k, y) || normalizes(g, h, y)))
}

/// `G` has a normal p-complement iff its p′-elements form a subgroup of index `|S|`.
pub fn p_nilpotent_by_elements(g: &Group, p: u64) -> bool {
    let mut p_part = 1usize;
    let mut n = g.order();
    while n.is_multiple_of(p as usize) {
        n /= p as usize;
        p_part *= p as usize;
    }
    let pprime: BTreeSet<Elem> = g
        .elements()
        .filter(|&x| !(g.elem_order(x) as u64).is_multiple_of(p))
        .collect();
    pprime.len() == g.order() / p_part
        && pprime
            .iter()
            .all(|&a| pprime.iter().all(|&b| pprime.contains(&g.mul(a, b))))
}

/// `Hom_G(P, S) = Hom_S(P, S)` for every `P ≤ S`: each conjugation by `g ∈ G`
/// landing in `S` agrees on `P` with a conjugation by some element of `S`.
pub fn fusion_is_inner(ctx: &FusionContext) -> bool {
    let g = ctx.group();
    let s = members(ctx.sylow());
    ctx.lattice().all().iter().all(|p| {
        let pm = members(p);
        g.elements().all(|y| {
            let image: Vec<Elem> = pm.iter().map(|&x| conj(g, x, y)).collect();
            if !image.iter().all(|z| s.contains(z)) {
                return true;
            }
            s.iter()
                .any(|&t| pm.iter().zip(&image).all(|(&x, &z)| conj(g, x, t) == z))
        })
    })
}

/// `H ∩ H^g` has no element of order divisible by p, for every `g ∉ H`.
pub fn is_strongly_p_embedded(g: &Group, h: &BTreeSet<Elem>, p: u64) -> bool {
    let divisible = |set: &BTreeSet<Elem>| set.iter().any(|&x| (g.elem_order(x) as u64).is_multiple_of(p));
    h.len() < g.order()
        && divisible(h)
        && g.elements()
            .filter(|y| !h.contains(y))
            .all(|y| !divisible(&h.intersection(&conjugate_set(g, h, y)).copied().collect()))
}

pub fn lattice_sets(ctx: &FusionContext) -> Vec<BTreeSet<Elem>> {
    ctx.lattice().all().iter().map(members).collect()
}

fn product(g: &Group, a: &BTreeSet<Elem>, b: &BTreeSet<Elem>) -> BTreeSet<Elem> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| g.mul(x, y))).collect()
}

/// Every `g ∈ G` with `P^g ≤ S`.
fn s_resident_conjugators<'a>(
    g: &'a Group,
    s: &'a BTreeSet<Elem>,
    p: &'a BTreeSet<Elem>,
) -> impl Iterator<Item = Elem> + 'a {
    g.elements()
        .filter(move |&y| p.iter().all(|&x| s.contains(&conj(g, x, y))))
}

/// `Q ⊴ F`: every conjugation `c_g: P → S` agrees on `P` with some `c_h`
/// that normalizes `Q`.
pub fn normal_in_fusion(g: &Group, s: &BTreeSet<Elem>, ks: &[BTreeSet<Elem>], q: &BTreeSet<Elem>) -> bool {
    ks.iter().all(|p| {
        s_resident_conjugators(g, s, p).all(|y| {
            g.elements()
                .any(|h| normalizes(g, q, h) && p.iter().all(|&x| conj(g, x, h) == conj(g, x, y)))
        })
    })
}

/// A finite group given by its multiplication table on `0..n`, identity 0.
struct Table {
    n: usize,
    mul: Vec<usize>,
}

impl Table {
    fn m(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b]
    }

    fn order(&self, a: usize) -> usize {
        let (mut x, mut k) = (a, 1);
        while x != 0 {
            x = self.m(x, a);
            k += 1;
        }
        k
    }

    fn inv(&self, a: usize) -> usize {
        (0..self.n).find(|&b| self.m(a, b) == 0).unwrap()
    }

    fn close(&self, seed: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut set = seed.clone();
        set.insert(0);
        loop {
            let next: BTreeSet<usize> = set
                .iter()
                .flat_map(|&a| set.iter().map(move |&b| (a, b)))
                .map(|(a, b)| self.m(a, b))
                .collect();
            if next.len() == set.len() {
                return set;
            }
            set = next;
        }
    }

    fn subgroups(&self) -> Vec<BTreeSet<usize>> {
        let mut all: BTreeSet<BTreeSet<usize>> = (0..self.n).map(|a| self.close(&[a].into())).collect();
        loop {
            let joins: BTreeSet<BTreeSet<usize>> = all
                .iter()
                .flat_map(|a| all.iter().map(move |b| a | b))
                .map(|u| self.close(&u))
                .collect();
            if joins.is_subset(&all) {
                return all.into_iter().collect();
            }
            all.extend(joins);
        }
    }

    fn has_strongly_p_embedded(&self, p: u64) -> bool {
        let divisible = |h: &BTreeSet<usize>| (h.len() as u64).is_multiple_of(p);
        self.subgroups().iter().any(|h| {
            h.len() < self.n
                && divisible(h)
                && (0..self.n).filter(|x| !h.contains(x)).all(|x| {
                    let hx: BTreeSet<usize> = h.iter().map(|&a| self.m(self.m(self.inv(x), a), x)).collect();
                    !divisible(&h.intersection(&hx).copied().collect())
                })
        })
    }
}

/// `N_G(P)/P·C_G(P)` as a multiplication table over its cosets.
fn out_table(g: &Group, p: &BTreeSet<Elem>) -> Table {
    let n = normalizer(g, p);
    let c: BTreeSet<Elem> = g.elements().filter(|&y| p.iter().all(|&x| g.commute(x, y))).collect();
    let m = product(g, p, &c);
    let mut cosets: Vec<BTreeSet<Elem>> = vec![m.clone()];
    for &x in &n {
        if !cosets.iter().any(|k| k.contains(&x)) {
            cosets.push(m.iter().map(|&y| g.mul(y, x)).collect());
        }
    }
    let find = |x: Elem| cosets.iter().position(|k| k.contains(&x)).unwrap();
    let reps: Vec<Elem> = cosets.iter().map(|k| *k.iter().next().unwrap()).collect();
    let k = cosets.len();
    let mul = (0..k * k).map(|i| find(g.mul(reps[i / k], reps[i % k]))).collect();
    Table { n: k, mul }
}

/// Proper, centric, fully normalized, and `Out_F(P)` has a strongly p-embedded subgroup.
pub fn essential(g: &Group, s: &BTreeSet<Elem>, p: &BTreeSet<Elem>, prime: u64) -> bool {
    if p.len() == s.len() {
        return false;
    }
    let n_s = |q: &BTreeSet<Elem>| s.iter().filter(|&&y| normalizes(g, q, y)).count();
    let own = n_s(p);
    let conjugates: Vec<BTreeSet<Elem>> = s_resident_conjugators(g, s, p)
        .map(|y| conjugate_set(g, p, y))
        .collect();
    let fully_normalized = conjugates.iter().all(|q| n_s(q) <= own);
    let centric = conjugates.iter().all(|q| {
        s.iter()
            .filter(|&&y| q.iter().all(|&x| g.commute(x, y)))
            .all(|y| q.contains(y))
    });
    fully_normalized && centric && out_table(g, p).has_strongly_p_embedded(prime)
}

/// `lower ≤ upper` with `upper/lower` cyclic: some `x` has cosets `x^k·lower` covering `upper`.
pub fn cyclic_quotient(g: &Group, upper: &BTreeSet<Elem>, lower: &BTreeSet<Elem>) -> bool {
    lower.is_subset(upper)
        && upper.iter().any(|&x| {
            let mut covered = BTreeSet::new();
            let mut power = Group::IDENTITY;
            loop {
                let coset: BTreeSet<Elem> = lower.iter().map(|&l| g.mul(power, l)).collect();
                if coset.is_subset(&covered) {
                    break;
                }
                covered.extend(coset);
                power = g.mul(power, x);
            }
            covered.len() == upper.len()
        })
}

/// Whether strongly closed subgroups with cyclic successive quotients climb from `from` to `to`.
pub fn chain_exists(
    g: &Group,
    s: &BTreeSet<Elem>,
    ks: &[BTreeSet<Elem>],
    from: &BTreeSet<Elem>,
    to: &BTreeSet<Elem>,
) -> bool {
    if from == to {
        return true;
    }
    ks.iter().any(|next| {
        next.len() > from.len()
            && next.is_subset(to)
            && strongly_closed(g, s, next)
            && cyclic_quotient(g, next, from)
            && chain_exists(g, s, ks, next, to)
    })
}
