//! Closure and normality relations checked over the builtin corpus, each
//! against the brute-force oracles in `common`.

mod common;

use common::*;
use fusionlab::classify::{classify_group, has_strongly_p_embedded};
use fusionlab::fusion::{ClosureKind, FusionContext, NormalityMethod};
use fusionlab::normality::{equivalence_suite_in, predicate_rows, NormalityEvaluator, PredicateKind};

#[test]
fn closure_predicates_match_oracles() {
    for (name, g, p) in corpus_contexts() {
        let ctx = FusionContext::new(&g, p).unwrap();
        let s = members(ctx.sylow());
        let ks = lattice_sets(&ctx);
        for (h, hm) in ctx.lattice().all().iter().zip(&ks) {
            let strong = ctx.closure_predicate(h, ClosureKind::StronglyClosed).unwrap().holds;
            let weak = ctx.closure_predicate(h, ClosureKind::WeaklyClosed).unwrap().holds;
            let semi = ctx.closure_predicate(h, ClosureKind::SemiInvariant).unwrap().holds;
            assert_eq!(strong, strongly_closed(&g, &s, hm), "{name} p={p}");
            assert_eq!(weak, weakly_closed(&g, &s, hm), "{name} p={p}");
            assert_eq!(semi, semi_invariant(&g, &ks, hm), "{name} p={p}");
        }
    }
}

#[test]
fn weak_closure_implies_semi_invariance() {
    for (name, g, p) in corpus_contexts() {
        let ctx = FusionContext::new(&g, p).unwrap();
        for h in ctx.lattice().all() {
            if ctx.closure_predicate(h, ClosureKind::WeaklyClosed).unwrap().holds {
                assert!(
                    ctx.closure_predicate(h, ClosureKind::SemiInvariant).unwrap().holds,
                    "{name} p={p}"
                );
            }
        }
    }
}

#[test]
fn semi_invariance_matches_s_subnormalizer_condition() {
    for (name, g, p) in corpus_contexts() {
        let ctx = FusionContext::new(&g, p).unwrap();
        for r in predicate_rows(&ctx).unwrap() {
            assert_eq!(r.semi_invariant, r.s_subnormalizer, "{name} p={p}");
        }
    }
}

#[test]
fn pronormal_weakly_normal_and_weakly_closed_agree() {
    for (name, g, p) in corpus_contexts() {
        let ctx = FusionContext::new(&g, p).unwrap();
        let report = equivalence_suite_in(&ctx).unwrap();
        assert!(report.violations.is_empty(), "{name} p={p}: {:?}", report.violations);
        let s = members(ctx.sylow());
        for (h, r) in ctx.lattice().all().iter().zip(predicate_rows(&ctx).unwrap()) {
            assert_eq!(r.weakly_closed_in_s, weakly_closed(&g, &s, &members(h)), "{name} p={p}");
        }
    }
}

#[test]
fn predicate_witnesses_reverify() {
    for (name, g, p) in corpus_contexts() {
        let ctx = FusionContext::new(&g, p).unwrap();
        let eval = NormalityEvaluator::new(&g, ctx.sylow()).unwrap();
        for h in ctx.lattice().all() {
            for kind in PredicateKind::ALL {
                let r = eval.evaluate(h, kind).unwrap();
                assert!(r.witness_is_valid(&g, ctx.sylow(), h), "{name} p={p} {kind}");
            }
        }
    }
}

#[test]
fn supersolvable_systems_close_semi_invariant_subgroups_and_chain_through_them() {
    let mut supersolvable = 0;
    for (name, g, p) in corpus_contexts() {
        let ctx = FusionContext::new(&g, p).unwrap();
        let Some(chain) = ctx.supersolvable_chain().unwrap() else {
            continue;
        };
        supersolvable += 1;
        chain.verify(&ctx).unwrap();
        let s = members(ctx.sylow());
        for h in ctx.lattice().all() {
            let hm = members(h);
            if ctx.closure_predicate(h, ClosureKind::SemiInvariant).unwrap().holds {
                assert!(strongly_closed(&g, &s, &hm), "{name} p={p}");
            }
            if strongly_closed(&g, &s, &hm) {
                let through = ctx.chain_through(h).unwrap().unwrap_or_else(|| panic!("{name} p={p}"));
                through.verify(&ctx).unwrap();
                assert!(through.links.contains(h));
            }
        }
    }
    assert!(supersolvable >= 10);
}

#[test]
fn quotients_by_normal_subgroups_respect_closure() {
    let mut checked = 0;
    for (name, g, p) in corpus_contexts() {
        if g.order() > 200 {
            continue;
        }
        let ctx = FusionContext::new(&g, p).unwrap();
        let whole = g.whole();
        for q in ctx.lattice().all() {
            if q.is_trivial() || !q.is_normal_in(&whole) {
                continue;
            }
            let (bar, proj) = ctx.quotient_system_with_projection(q).unwrap();
            for r in ctx.lattice().between(q, ctx.sylow()) {
                let rbar = proj.image(r);
                let strong_bar = bar.closure_predicate(&rbar, ClosureKind::StronglyClosed).unwrap().holds;
                if strong_bar {
                    assert!(
                        ctx.closure_predicate(r, ClosureKind::StronglyClosed).unwrap().holds,
                        "{name} p={p}"
                    );
                }
                if ctx.closure_predicate(r, ClosureKind::SemiInvariant).unwrap().holds {
                    assert!(
                        bar.closure_predicate(&rbar, ClosureKind::SemiInvariant).unwrap().holds,
                        "{name} p={p}"
                    );
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 20);
}

#[test]
fn normality_criterion_agrees_with_extension_oracle() {
    for (name, g, p) in corpus_contexts() {
        if g.order() > 200 {
            continue;
        }
        let ctx = FusionContext::new(&g, p).unwrap();
        for q in ctx.lattice().all() {
            assert_eq!(
                ctx.is_normal_in_f(q, NormalityMethod::Criterion).unwrap(),
                ctx.is_normal_in_f(q, NormalityMethod::Oracle).unwrap(),
                "{name} p={p} order {}",
                q.order()
            );
        }
    }
}

#[test]
fn p_nilpotency_matches_element_oracle_and_inner_fusion() {
    for (name, g, p) in corpus_contexts() {
        let c = classify_group(&g, p).unwrap();
        assert_eq!(c.p_nilpotent, p_nilpotent_by_elements(&g, p), "{name} p={p}");
        let ctx = FusionContext::new(&g, p).unwrap();
        let inner = fusion_is_inner(&ctx);
        assert_eq!(ctx.fusion_equals_inner(), inner, "{name} p={p}");
        assert_eq!(inner, c.p_nilpotent, "{name} p={p}");
    }
}

#[test]
fn p_closed_groups_have_no_strongly_p_embedded_subgroup() {
    for (name, g, p) in corpus_contexts() {
        let c = classify_group(&g, p).unwrap();
        let found = has_strongly_p_embedded(&g, p).unwrap();
        if let Some(h) = &found {
            assert!(is_strongly_p_embedded(&g, &members(h), p), "{name} p={p}");
        }
        if c.p_closed {
            assert!(found.is_none(), "{name} p={p}");
        }
    }
}

#[test]
fn essentials_normality_and_chains_match_oracles() {
    for (name, g, p) in corpus_contexts() {
        if g.order() > 200 {
            continue;
        }
        let ctx = FusionContext::new(&g, p).unwrap();
        let s = members(ctx.sylow());
        let ks = lattice_sets(&ctx);
        let star: Vec<_> = ctx.essential_star().unwrap().iter().map(members).collect();
        let mut expected: Vec<_> = ks.iter().filter(|h| essential(&g, &s, h, p)).cloned().collect();
        expected.push(s.clone());
        assert_eq!(star, expected, "{name} p={p}");

        for (q, qm) in ctx.lattice().all().iter().zip(&ks) {
            let engine = ctx.is_normal_in_f(q, NormalityMethod::Criterion).unwrap();
            assert_eq!(engine, normal_in_fusion(&g, &s, &ks, qm), "{name} p={p}");
        }
        let trivial = members(&g.trivial());
        let engine_chain = ctx.supersolvable_chain().unwrap();
        assert_eq!(
            engine_chain.is_some(),
            chain_exists(&g, &s, &ks, &trivial, &s),
            "{name} p={p}"
        );
        for (q, qm) in ctx.lattice().all().iter().zip(&ks) {
            let expected = strongly_closed(&g, &s, qm)
                && chain_exists(&g, &s, &ks, &trivial, qm)
                && chain_exists(&g, &s, &ks, qm, &s);
            assert_eq!(ctx.chain_through(q).unwrap().is_some(), expected, "{name} p={p}");
        }
    }
}

#[test]
fn s4_centre_of_s_fails_the_s_subnormalizer_condition() {
    let g = corpus_group("S4");
    let ctx = FusionContext::new(&g, 2).unwrap();
    let centre = ctx
        .lattice()
        .of_order(2)
        .iter()
        .find(|h| h.is_normal_in(ctx.sylow()))
        .unwrap()
        .clone();
    let eval = NormalityEvaluator::new(&g, ctx.sylow()).unwrap();
    assert!(!eval.evaluate(&centre, PredicateKind::SSubnormalizer).unwrap().holds);
    let ks = lattice_sets(&ctx);
    assert!(!semi_invariant(&g, &ks, &members(&centre)));
    let op = ctx.op_f().unwrap();
    assert!(centre.is_subgroup_of(&op));
    assert!(!normalizer(&g, &members(&op)).is_subset(&normalizer(&g, &members(&centre))));
}
