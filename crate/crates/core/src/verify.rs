//! Theorem registry and verification harness.
//!
//! Each registered theorem is a hypothesis template over `(G, S, p)` plus a
//! conclusion (a supersolvable chain of `F_S(G)`, or p-nilpotency of `G`).
//! The harness evaluates both and classifies the pair as pass, vacuous or
//! counterexample.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{gcd, is_prime, prime_divisors};
use crate::classify::classify_group;
use crate::error::{Error, Result};
use crate::fusion::{ClosureKind, FusionContext};
use crate::group::{Group, Subgroup};
use crate::normality::{NormalityEvaluator, PredicateKind};
use crate::ops::structure_flags;
use crate::par;

/// Which orders `|D|` a template quantifies over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderPattern {
    /// `1 < |D| < |S|`.
    ExistsDStrict,
    /// `1 ≤ |D| < |S|`.
    ExistsDWeak,
    /// Only `|D| = p`.
    OrderPOnly,
    /// Only `|D| = |S|/p`, i.e. the maximal subgroups of `S`.
    MaximalSubgroups,
}

/// A pair of flags selecting the orders `|D|` and `p|D|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OrderSet {
    pub d: bool,
    pub pd: bool,
}

impl OrderSet {
    pub const NONE: OrderSet = OrderSet { d: false, pd: false };
    pub const D: OrderSet = OrderSet { d: true, pd: false };
    pub const BOTH: OrderSet = OrderSet { d: true, pd: true };
}

/// The per-subgroup condition of a template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplatePredicate {
    Group(PredicateKind),
    Fusion(ClosureKind),
}

impl fmt::Display for TemplatePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplatePredicate::Group(k) => write!(f, "{k}"),
            TemplatePredicate::Fusion(ClosureKind::SemiInvariant) => f.write_str("semi_invariant"),
            TemplatePredicate::Fusion(ClosureKind::StronglyClosed) => f.write_str("strongly_closed"),
            TemplatePredicate::Fusion(ClosureKind::WeaklyClosed) => f.write_str("weakly_closed"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchCondition {
    SNonAbelian,
    SNonCyclic,
    PIsTwo,
    DIsTwo,
    SOrderAboveFour,
    IndexOfDAboveTwo,
}

/// The additional subgroups a branch rule brings under the predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtraSubgroups {
    CyclicOfOrderFour,
    CyclicOfOrderTwiceD,
}

/// When every condition holds, the extra subgroups must satisfy the predicate too.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchRule {
    pub when: Vec<BranchCondition>,
    pub extra: ExtraSubgroups,
}

/// The twelve order/branch shapes for relations between subgroups and the
/// whole group: cases 1 to 9 quantify over a subgroup order `|D|`, the three
/// primed cases over subgroups of order p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EternalCase {
    Case1,
    Case2,
    Case3,
    Case4,
    Case5,
    Case6,
    Case7,
    Case8,
    Case9,
    Case1Prime,
    Case2Prime,
    Case3Prime,
}

impl EternalCase {
    pub const ALL: [EternalCase; 12] = [
        EternalCase::Case1,
        EternalCase::Case2,
        EternalCase::Case3,
        EternalCase::Case4,
        EternalCase::Case5,
        EternalCase::Case6,
        EternalCase::Case7,
        EternalCase::Case8,
        EternalCase::Case9,
        EternalCase::Case1Prime,
        EternalCase::Case2Prime,
        EternalCase::Case3Prime,
    ];

    pub fn order_pattern(self) -> OrderPattern {
        use EternalCase::*;
        match self {
            Case1 | Case2 | Case3 | Case4 | Case8 | Case9 => OrderPattern::ExistsDStrict,
            Case5 | Case6 | Case7 => OrderPattern::ExistsDWeak,
            Case1Prime | Case2Prime | Case3Prime => OrderPattern::OrderPOnly,
        }
    }

    pub fn predicate_orders(self) -> OrderSet {
        use EternalCase::*;
        match self {
            Case5 | Case7 | Case9 => OrderSet::BOTH,
            _ => OrderSet::D,
        }
    }

    pub fn odd_only(self) -> bool {
        matches!(self, EternalCase::Case5 | EternalCase::Case6)
    }

    pub fn branch_rule(self) -> Option<BranchRule> {
        use BranchCondition::*;
        use EternalCase::*;
        let four = |when: Vec<BranchCondition>| {
            Some(BranchRule {
                when,
                extra: ExtraSubgroups::CyclicOfOrderFour,
            })
        };
        match self {
            Case1 => four(vec![SNonAbelian, DIsTwo]),
            Case2 => four(vec![SNonAbelian, SOrderAboveFour, DIsTwo]),
            Case3 | Case1Prime => four(vec![SNonAbelian, PIsTwo]),
            Case4 | Case2Prime => four(vec![PIsTwo]),
            Case7 => four(vec![PIsTwo, DIsTwo]),
            Case8 => Some(BranchRule {
                when: vec![SNonAbelian, PIsTwo, IndexOfDAboveTwo],
                extra: ExtraSubgroups::CyclicOfOrderTwiceD,
            }),
            Case3Prime => four(vec![SNonCyclic, PIsTwo]),
            Case5 | Case6 | Case9 => None,
        }
    }

    /// The template obtained by applying this shape to `S` with the given
    /// predicate. Cases 1 to 9 also require subgroups of order `|D|` and
    /// `p|D|` to be abelian.
    pub fn template(self, predicate: TemplatePredicate) -> HypothesisTemplate {
        let primed = self.order_pattern() == OrderPattern::OrderPOnly;
        HypothesisTemplate {
            order_pattern: self.order_pattern(),
            abelian: if primed { OrderSet::NONE } else { OrderSet::BOTH },
            predicate_orders: self.predicate_orders(),
            predicate,
            branch_rules: self.branch_rule().into_iter().collect(),
            abelian_maximals_if_noncyclic: false,
            odd_only: self.odd_only(),
            coprime: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisTemplate {
    pub order_pattern: OrderPattern,
    /// Orders whose subgroups must all be abelian.
    pub abelian: OrderSet,
    /// Orders whose subgroups must all satisfy the predicate.
    pub predicate_orders: OrderSet,
    pub predicate: TemplatePredicate,
    pub branch_rules: Vec<BranchRule>,
    /// If `S` is not cyclic, `S` must have at least two abelian maximal subgroups.
    pub abelian_maximals_if_noncyclic: bool,
    pub odd_only: bool,
    /// Requires `(p − 1, |G|) = 1`.
    pub coprime: bool,
}

impl HypothesisTemplate {
    /// The same template with every branch rule and the abelian-maximal rule dropped.
    pub fn without_branches(&self) -> HypothesisTemplate {
        HypothesisTemplate {
            branch_rules: Vec::new(),
            abelian_maximals_if_noncyclic: false,
            ..self.clone()
        }
    }

    pub fn has_branches(&self) -> bool {
        !self.branch_rules.is_empty() || self.abelian_maximals_if_noncyclic
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    Supersolvable,
    PNilpotent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremSpec {
    pub id: String,
    pub template: HypothesisTemplate,
    pub conclusion: Conclusion,
}

fn cor1_shape(predicate: TemplatePredicate) -> HypothesisTemplate {
    EternalCase::Case1.template(predicate)
}

fn maximal_shape(predicate: TemplatePredicate) -> HypothesisTemplate {
    HypothesisTemplate {
        order_pattern: OrderPattern::MaximalSubgroups,
        abelian: OrderSet::NONE,
        predicate_orders: OrderSet::D,
        predicate,
        branch_rules: Vec::new(),
        abelian_maximals_if_noncyclic: true,
        odd_only: true,
        coprime: false,
    }
}

fn odd_strict_shape(predicate: TemplatePredicate) -> HypothesisTemplate {
    HypothesisTemplate {
        order_pattern: OrderPattern::ExistsDStrict,
        abelian: OrderSet::D,
        predicate_orders: OrderSet::D,
        predicate,
        branch_rules: Vec::new(),
        abelian_maximals_if_noncyclic: false,
        odd_only: true,
        coprime: false,
    }
}

fn coprime(t: HypothesisTemplate) -> HypothesisTemplate {
    HypothesisTemplate { coprime: true, ..t }
}

/// Every registered theorem, in a fixed order.
pub fn registry() -> Vec<TheoremSpec> {
    use Conclusion::*;
    let semi = TemplatePredicate::Fusion(ClosureKind::SemiInvariant);
    let ssub = TemplatePredicate::Group(PredicateKind::SSubnormalizer);
    let csup = TemplatePredicate::Group(PredicateKind::CSupplemented);
    let family = [
        PredicateKind::Pronormal,
        PredicateKind::WeaklyNormal,
        PredicateKind::WeaklyClosedInS,
        PredicateKind::SSubnormalizer,
    ];
    let mut out = vec![
        ("TheoremB".to_string(), cor1_shape(semi), Supersolvable),
        ("TheoremC".to_string(), maximal_shape(semi), Supersolvable),
        ("TheoremD1".to_string(), odd_strict_shape(semi), Supersolvable),
    ];
    for kind in family {
        out.push((
            format!("Thm3.1-family/{kind}"),
            cor1_shape(TemplatePredicate::Group(kind)),
            Supersolvable,
        ));
    }
    out.extend([
        ("Cor1-s-subnormalizer".to_string(), cor1_shape(ssub), Supersolvable),
        ("Cor2-s-subnormalizer".to_string(), maximal_shape(ssub), Supersolvable),
        (
            "Cor3-s-subnormalizer".to_string(),
            odd_strict_shape(ssub),
            Supersolvable,
        ),
        (
            "Cor-c-supplemented".to_string(),
            EternalCase::Case5.template(csup),
            Supersolvable,
        ),
        (
            "Sec5-s-subnormalizer".to_string(),
            coprime(cor1_shape(ssub)),
            PNilpotent,
        ),
        (
            "Sec5-s-subnormalizer-maximal".to_string(),
            coprime(maximal_shape(ssub)),
            PNilpotent,
        ),
        (
            "Sec5-s-subnormalizer-odd".to_string(),
            coprime(odd_strict_shape(ssub)),
            PNilpotent,
        ),
        (
            "Sec5-c-supplemented".to_string(),
            coprime(EternalCase::Case5.template(csup)),
            PNilpotent,
        ),
    ]);
    for kind in &family[..3] {
        out.push((
            format!("Sec5-{kind}"),
            coprime(cor1_shape(TemplatePredicate::Group(*kind))),
            PNilpotent,
        ));
    }
    out.into_iter()
        .map(|(id, template, conclusion)| TheoremSpec {
            id,
            template,
            conclusion,
        })
        .collect()
}

pub fn theorem(id: &str) -> Result<TheoremSpec> {
    registry()
        .into_iter()
        .find(|t| t.id == id)
        .ok_or_else(|| Error::validation(format!("unknown theorem id `{id}`")))
}

/// The subgroups quantified for one passing order `|D|`.
#[derive(Debug, Clone)]
pub struct OrderEvidence {
    pub order: usize,
    pub quantified: Vec<Subgroup>,
}

#[derive(Debug, Clone, Default)]
pub struct HypothesisScan {
    pub orders: Vec<usize>,
    pub evidence: Vec<OrderEvidence>,
    pub diagnostics: Vec<String>,
}

impl HypothesisScan {
    pub fn holds(&self) -> bool {
        !self.orders.is_empty()
    }
}

/// Summary of the least passing `|D|`: its order, how many subgroups were
/// quantified, and a SHA-256 digest of their member lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessD {
    pub order: usize,
    pub count: usize,
    pub digest: String,
}

impl WitnessD {
    fn from_evidence(e: &OrderEvidence) -> WitnessD {
        let mut hasher = Sha256::new();
        for h in &e.quantified {
            for x in h.elements() {
                hasher.update(x.to_le_bytes());
            }
            hasher.update(b";");
        }
        let digest = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
        WitnessD {
            order: e.order,
            count: e.quantified.len(),
            digest,
        }
    }
}

/// Evaluates template predicates on subgroups of `S`, remembering results by lattice index.
pub struct Scanner<'a> {
    ctx: &'a FusionContext,
    eval: NormalityEvaluator,
    memo: RefCell<HashMap<(usize, TemplatePredicate), bool>>,
}

impl<'a> Scanner<'a> {
    pub fn new(ctx: &'a FusionContext) -> Result<Scanner<'a>> {
        Ok(Scanner {
            ctx,
            eval: NormalityEvaluator::new(ctx.group(), ctx.sylow())?,
            memo: RefCell::new(HashMap::new()),
        })
    }

    fn predicate(&self, h: &Subgroup, predicate: TemplatePredicate) -> Result<bool> {
        let i = self.ctx.index(h)?;
        if let Some(&v) = self.memo.borrow().get(&(i, predicate)) {
            return Ok(v);
        }
        let v = match predicate {
            TemplatePredicate::Group(kind) => self.eval.evaluate(h, kind)?.holds,
            TemplatePredicate::Fusion(kind) => self.ctx.closure_predicate(h, kind)?.holds,
        };
        self.memo.borrow_mut().insert((i, predicate), v);
        Ok(v)
    }

    /// All passing orders `|D|` with their evidence. Arithmetic side
    /// conditions (odd p, coprimality) are reported as diagnostics and make
    /// the scan empty.
    pub fn scan(&self, template: &HypothesisTemplate) -> Result<HypothesisScan> {
        let ctx = self.ctx;
        let p = ctx.prime() as usize;
        let s = ctx.sylow();
        let n = s.order();
        let mut scan = HypothesisScan::default();
        if template.odd_only && p == 2 {
            scan.diagnostics.push("template requires an odd prime".into());
            return Ok(scan);
        }
        if template.coprime && gcd(p as u64 - 1, ctx.group().order() as u64) != 1 {
            scan.diagnostics
                .push(format!("(p-1, |G|) = ({}, {}) is not 1", p - 1, ctx.group().order()));
            return Ok(scan);
        }
        if n == 1 {
            scan.diagnostics.push("Sylow subgroup is trivial".into());
            return Ok(scan);
        }
        let flags = structure_flags(s, p as u64);
        let lattice = ctx.lattice();
        if template.abelian_maximals_if_noncyclic && !flags.cyclic {
            let abelian = lattice.of_order(n / p).iter().filter(|m| m.is_abelian()).count();
            if abelian < 2 {
                scan.diagnostics
                    .push(format!("S is not cyclic and has {abelian} abelian maximal subgroup(s)"));
                return Ok(scan);
            }
        }
        let candidates: Vec<usize> = match template.order_pattern {
            OrderPattern::ExistsDStrict => powers(p, n).filter(|&d| d > 1 && d < n).collect(),
            OrderPattern::ExistsDWeak => powers(p, n).filter(|&d| d < n).collect(),
            OrderPattern::OrderPOnly => vec![p],
            OrderPattern::MaximalSubgroups => vec![n / p],
        };
        'orders: for d in candidates {
            let mut quantified: Vec<Subgroup> = Vec::new();
            for (order, abelian, pred) in [
                (d, template.abelian.d, template.predicate_orders.d),
                (p * d, template.abelian.pd, template.predicate_orders.pd),
            ] {
                if order > n {
                    continue;
                }
                let subs = lattice.of_order(order);
                if abelian && !subs.iter().all(|h| h.is_abelian()) {
                    continue 'orders;
                }
                if pred {
                    for h in subs {
                        if !self.predicate(h, template.predicate)? {
                            continue 'orders;
                        }
                        quantified.push(h.clone());
                    }
                }
            }
            for rule in &template.branch_rules {
                if !rule_applies(rule, &flags, p, d, n) {
                    continue;
                }
                let target = match rule.extra {
                    ExtraSubgroups::CyclicOfOrderFour => 4,
                    ExtraSubgroups::CyclicOfOrderTwiceD => 2 * d,
                };
                for h in lattice.of_order(target) {
                    if !structure_flags(h, p as u64).cyclic || quantified.contains(h) {
                        continue;
                    }
                    if !self.predicate(h, template.predicate)? {
                        continue 'orders;
                    }
                    quantified.push(h.clone());
                }
            }
            scan.orders.push(d);
            scan.evidence.push(OrderEvidence { order: d, quantified });
        }
        Ok(scan)
    }
}

fn powers(p: usize, n: usize) -> impl Iterator<Item = usize> {
    std::iter::successors(Some(1usize), move |&d| (d * p <= n).then_some(d * p))
}

fn rule_applies(rule: &BranchRule, flags: &crate::ops::StructureFlags, p: usize, d: usize, n: usize) -> bool {
    rule.when.iter().all(|c| match c {
        BranchCondition::SNonAbelian => !flags.abelian,
        BranchCondition::SNonCyclic => !flags.cyclic,
        BranchCondition::PIsTwo => p == 2,
        BranchCondition::DIsTwo => d == 2,
        BranchCondition::SOrderAboveFour => n > 4,
        BranchCondition::IndexOfDAboveTwo => n / d > 2,
    })
}

/// All orders `|D|` at which the template's quantified conditions hold.
pub fn scan_hypothesis(ctx: &FusionContext, template: &HypothesisTemplate) -> Result<HypothesisScan> {
    Scanner::new(ctx)?.scan(template)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "vacuous")]
    Vacuous,
    #[serde(rename = "COUNTEREXAMPLE")]
    Counterexample,
}

impl Verdict {
    pub fn of(hypothesis: bool, conclusion: bool) -> Verdict {
        match (hypothesis, conclusion) {
            (false, _) => Verdict::Vacuous,
            (true, true) => Verdict::Pass,
            (true, false) => Verdict::Counterexample,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Vacuous => "vacuous",
            Verdict::Counterexample => "COUNTEREXAMPLE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationOutcome {
    pub theorem_id: String,
    pub group_name: String,
    pub prime: u64,
    pub hypothesis_holds: bool,
    pub witness_d: Option<WitnessD>,
    pub conclusion_holds: bool,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Everything the harness evaluates for one `(G, p)`, shared by all theorems.
struct Evaluation<'a> {
    name: String,
    g: Arc<Group>,
    p: u64,
    scanner: Option<Scanner<'a>>,
    supersolvable: Option<Result<bool>>,
    p_nilpotent: Option<Result<bool>>,
    setup_error: Option<Error>,
}

impl<'a> Evaluation<'a> {
    fn conclusion(&mut self, c: Conclusion) -> Result<bool> {
        match c {
            Conclusion::Supersolvable => {
                if self.supersolvable.is_none() {
                    let v = if !(self.g.order() as u64).is_multiple_of(self.p) {
                        Ok(true)
                    } else {
                        Err(self
                            .setup_error
                            .clone()
                            .unwrap_or(Error::Invariant("no context".into())))
                    };
                    self.supersolvable = Some(v);
                }
                self.supersolvable.clone().expect("set above")
            }
            Conclusion::PNilpotent => {
                if self.p_nilpotent.is_none() {
                    self.p_nilpotent = Some(classify_group(&self.g, self.p).map(|c| c.p_nilpotent));
                }
                self.p_nilpotent.clone().expect("set above")
            }
        }
    }
}

fn outcome_for(ev: &mut Evaluation<'_>, ctx: Option<&FusionContext>, spec: &TheoremSpec) -> VerificationOutcome {
    let mut out = VerificationOutcome {
        theorem_id: spec.id.clone(),
        group_name: ev.name.clone(),
        prime: ev.p,
        hypothesis_holds: false,
        witness_d: None,
        conclusion_holds: false,
        verdict: Verdict::Vacuous,
        diagnostics: Vec::new(),
        error: None,
    };
    let record_error = |out: &mut VerificationOutcome, e: &Error| {
        if out.error.is_none() {
            out.error = Some(e.to_string());
        }
    };
    match ev.conclusion(spec.conclusion) {
        Ok(v) => out.conclusion_holds = v,
        Err(e) => record_error(&mut out, &e),
    }
    if !(ev.g.order() as u64).is_multiple_of(ev.p) {
        out.diagnostics
            .push(format!("{} does not divide |G| = {}", ev.p, ev.g.order()));
        return out;
    }
    match (ctx, &ev.scanner, &ev.setup_error) {
        (Some(_), Some(scanner), _) => match scanner.scan(&spec.template) {
            Ok(scan) => {
                out.hypothesis_holds = scan.holds() && out.error.is_none();
                out.witness_d = scan.evidence.first().map(WitnessD::from_evidence);
                out.diagnostics = scan.diagnostics;
            }
            Err(e) => record_error(&mut out, &e),
        },
        (_, _, Some(e)) => record_error(&mut out, e),
        _ => record_error(&mut out, &Error::Invariant("evaluation has no context".into())),
    }
    out.verdict = Verdict::of(out.hypothesis_holds, out.conclusion_holds);
    out
}

/// Builds the shared state for `(G, p)` and evaluates each theorem in order.
fn evaluate_all(name: &str, g: &Arc<Group>, p: u64, specs: &[&TheoremSpec], fidelity: bool) -> PrimeResult {
    let ctx = if (g.order() as u64).is_multiple_of(p) {
        Some(FusionContext::new(g, p))
    } else {
        None
    };
    let (ctx, setup_error) = match ctx {
        Some(Ok(c)) => (Some(c), None),
        Some(Err(e)) => (None, Some(e)),
        None => (None, None),
    };
    let mut setup_error = setup_error;
    let scanner = match &ctx {
        Some(c) => match Scanner::new(c) {
            Ok(s) => Some(s),
            Err(e) => {
                setup_error = Some(e);
                None
            }
        },
        None => None,
    };
    let mut ev = Evaluation {
        name: name.to_string(),
        g: g.clone(),
        p,
        scanner,
        supersolvable: None,
        p_nilpotent: None,
        setup_error,
    };
    if let Some(c) = &ctx {
        ev.supersolvable = Some(c.supersolvable_chain().map(|c| c.is_some()));
    }
    let outcomes: Vec<VerificationOutcome> = specs.iter().map(|s| outcome_for(&mut ev, ctx.as_ref(), s)).collect();
    let mut branches = Vec::new();
    if fidelity {
        if let Some(scanner) = &ev.scanner {
            for (spec, out) in specs.iter().zip(&outcomes) {
                if !spec.template.has_branches() || out.error.is_some() {
                    continue;
                }
                if let Ok(weak) = scanner.scan(&spec.template.without_branches()) {
                    branches.push((spec.id.clone(), weak.holds(), weak.holds() && !out.hypothesis_holds));
                }
            }
        }
    }
    PrimeResult { outcomes, branches }
}

struct PrimeResult {
    outcomes: Vec<VerificationOutcome>,
    branches: Vec<(String, bool, bool)>,
}

/// Evaluates one registered theorem on `(G, p)`.
pub fn check_theorem(theorem_id: &str, group_name: &str, g: &Arc<Group>, p: u64) -> Result<VerificationOutcome> {
    if !is_prime(p) {
        return Err(Error::validation(format!("{p} is not prime")));
    }
    let spec = theorem(theorem_id)?;
    let mut r = evaluate_all(group_name, g, p, &[&spec], false);
    Ok(r.outcomes.remove(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Totals {
    pub pass: usize,
    pub vacuous: usize,
    pub counterexample: usize,
    pub errors: usize,
}

impl Totals {
    pub fn of(outcomes: &[VerificationOutcome]) -> Totals {
        let mut t = Totals::default();
        for o in outcomes {
            match o.verdict {
                Verdict::Pass => t.pass += 1,
                Verdict::Vacuous => t.vacuous += 1,
                Verdict::Counterexample => t.counterexample += 1,
            }
            if o.error.is_some() {
                t.errors += 1;
            }
        }
        t
    }
}

/// How often dropping a template's branch rules changed its verdict.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BranchFidelity {
    pub theorem_id: String,
    /// Cases where the hypothesis without branch rules holds.
    pub weakened_holds: usize,
    /// Cases where it holds but the full hypothesis does not.
    pub distinguished: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuarantinedEntry {
    pub name: String,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RuntimeStats {
    pub contexts: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SuiteReport {
    pub outcomes: Vec<VerificationOutcome>,
    pub totals: Totals,
    #[serde(default)]
    pub quarantined: Vec<QuarantinedEntry>,
    #[serde(default)]
    pub branch_fidelity: Vec<BranchFidelity>,
    pub runtime: RuntimeStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum PrimeSelection {
    #[default]
    AllDivisors,
    Only(Vec<u64>),
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub primes: PrimeSelection,
    /// Also scan every template with its branch rules dropped.
    pub branch_fidelity: bool,
}

/// A group to run the suite on, already loaded or failed to load.
pub struct SuiteInput {
    pub name: String,
    pub group: Result<Arc<Group>>,
}

/// Runs the given theorems over every input and prime. With
/// [`PrimeSelection::AllDivisors`], odd-only theorems skip p = 2; an explicit
/// prime list evaluates every theorem at every listed prime.
pub fn run_suite(inputs: &[SuiteInput], theorem_ids: &[String], options: &SuiteOptions) -> Result<SuiteReport> {
    let specs: Vec<TheoremSpec> = theorem_ids.iter().map(|id| theorem(id)).collect::<Result<_>>()?;
    if let PrimeSelection::Only(ps) = &options.primes {
        if let Some(q) = ps.iter().find(|&&q| !is_prime(q)) {
            return Err(Error::validation(format!("{q} is not prime")));
        }
    }
    let mut jobs: Vec<(usize, u64)> = Vec::new();
    let mut quarantined = Vec::new();
    for (i, input) in inputs.iter().enumerate() {
        match &input.group {
            Ok(g) => {
                let primes = match &options.primes {
                    PrimeSelection::AllDivisors => prime_divisors(g.order() as u64),
                    PrimeSelection::Only(ps) => ps.clone(),
                };
                jobs.extend(primes.into_iter().map(|p| (i, p)));
            }
            Err(e) => quarantined.push(QuarantinedEntry {
                name: input.name.clone(),
                error: e.to_string(),
            }),
        }
    }
    let results = par::map(&jobs, |&(i, p)| {
        let input = &inputs[i];
        let g = input.group.as_ref().expect("quarantined entries are skipped");
        let selected: Vec<&TheoremSpec> = specs
            .iter()
            .filter(|s| !(options.primes == PrimeSelection::AllDivisors && s.template.odd_only && p == 2))
            .collect();
        evaluate_all(&input.name, g, p, &selected, options.branch_fidelity)
    });
    let mut outcomes = Vec::new();
    let mut fidelity: Vec<BranchFidelity> = Vec::new();
    for r in results {
        outcomes.extend(r.outcomes);
        for (id, weak, distinguished) in r.branches {
            let slot = match fidelity.iter_mut().position(|f| f.theorem_id == id) {
                Some(k) => &mut fidelity[k],
                None => {
                    fidelity.push(BranchFidelity {
                        theorem_id: id,
                        ..Default::default()
                    });
                    fidelity.last_mut().expect("just pushed")
                }
            };
            slot.weakened_holds += weak as usize;
            slot.distinguished += distinguished as usize;
        }
    }
    fidelity.sort_by(|a, b| a.theorem_id.cmp(&b.theorem_id));
    Ok(SuiteReport {
        totals: Totals::of(&outcomes),
        runtime: RuntimeStats {
            contexts: jobs.len(),
            evaluations: outcomes.len(),
        },
        outcomes,
        quarantined,
        branch_fidelity: fidelity,
    })
}

/// All registered theorem ids.
pub fn all_theorem_ids() -> Vec<String> {
    registry().into_iter().map(|t| t.id).collect()
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
    fn registry_ids_are_unique_and_resolvable() {
        let ids = all_theorem_ids();
        let mut sorted = ids.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len());
        assert!(theorem("TheoremB").is_ok());
        assert!(theorem("Thm3.1-family/pronormal").is_ok());
        assert!(theorem("nope").is_err());
    }

    #[test]
    fn every_case_shape_has_a_template() {
        let pred = TemplatePredicate::Fusion(ClosureKind::SemiInvariant);
        let with_branch = EternalCase::ALL.iter().filter(|c| c.branch_rule().is_some()).count();
        assert_eq!(with_branch, 9);
        for c in EternalCase::ALL {
            let t = c.template(pred);
            assert_eq!(t.abelian == OrderSet::NONE, t.order_pattern == OrderPattern::OrderPOnly);
        }
    }

    #[test]
    fn theorem_b_scan_on_s4_is_empty() {
        let ctx = FusionContext::new(&g("S4"), 2).unwrap();
        let scan = scan_hypothesis(&ctx, &theorem("TheoremB").unwrap().template).unwrap();
        assert!(scan.orders.is_empty());
    }

    #[test]
    fn cor1_scan_on_dic12() {
        let ctx = FusionContext::new(&g("dicyclic(12)"), 2).unwrap();
        let scan = scan_hypothesis(&ctx, &theorem("Cor1-s-subnormalizer").unwrap().template).unwrap();
        assert_eq!(scan.orders, vec![2]);
        assert_eq!(scan.evidence[0].quantified.len(), 1);
    }

    #[test]
    fn theorem_c_on_f21_is_applicable() {
        let ctx = FusionContext::new(&g("F21"), 3).unwrap();
        let scan = scan_hypothesis(&ctx, &theorem("TheoremC").unwrap().template).unwrap();
        assert_eq!(scan.orders, vec![1]);
    }

    #[test]
    fn check_theorem_examples() {
        let o = check_theorem("Cor1-s-subnormalizer", "S4", &g("S4"), 2).unwrap();
        assert_eq!(
            (o.hypothesis_holds, o.conclusion_holds, o.verdict),
            (false, false, Verdict::Vacuous)
        );
        let o = check_theorem("Cor1-s-subnormalizer", "Dic12", &g("dicyclic(12)"), 2).unwrap();
        assert_eq!(
            (o.hypothesis_holds, o.conclusion_holds, o.verdict),
            (true, true, Verdict::Pass)
        );
        assert_eq!(o.witness_d.as_ref().unwrap().order, 2);
        let o = check_theorem("Sec5-s-subnormalizer", "Dic12", &g("dicyclic(12)"), 2).unwrap();
        assert_eq!(o.verdict, Verdict::Pass);
        let o = check_theorem("TheoremC", "S4", &g("S4"), 2).unwrap();
        assert_eq!(o.verdict, Verdict::Vacuous);
        assert!(!o.diagnostics.is_empty());
        let o = check_theorem("TheoremB", "S4", &g("S4"), 5).unwrap();
        assert!(o.conclusion_holds && !o.hypothesis_holds);
        assert!(check_theorem("TheoremB", "S4", &g("S4"), 4).is_err());
    }

    #[test]
    fn capacity_errors_are_recorded() {
        let caps = Caps {
            subgroups: 3,
            ..Caps::default()
        };
        let s4 = builtin_group("S4", caps).unwrap();
        let o = check_theorem("TheoremB", "S4", &s4, 2).unwrap();
        assert!(o.error.is_some());
        assert_eq!(o.verdict, Verdict::Vacuous);
    }

    #[test]
    fn suite_on_a4_and_empty() {
        let inputs = vec![SuiteInput {
            name: "A4".into(),
            group: Ok(g("A4")),
        }];
        let opts = SuiteOptions {
            primes: PrimeSelection::Only(vec![2]),
            branch_fidelity: false,
        };
        let r = run_suite(&inputs, &["TheoremB".to_string()], &opts).unwrap();
        assert_eq!(r.outcomes.len(), 1);
        assert_eq!(r.outcomes[0].verdict, Verdict::Vacuous);
        assert!(!r.outcomes[0].conclusion_holds);
        let r = run_suite(&[], &all_theorem_ids(), &SuiteOptions::default()).unwrap();
        assert!(r.outcomes.is_empty());
        assert_eq!(r.totals, Totals::default());
    }
}
