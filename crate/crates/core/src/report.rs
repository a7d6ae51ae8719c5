//! Report documents: a versioned envelope around a suite report or a single
//! analysis, written as canonical JSON or as a text summary.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classify::classify_group;
use crate::error::{Error, Result};
use crate::fusion::{FusionContext, NormalityMethod};
use crate::group::{Caps, Group, Subgroup};
use crate::normality::EquivalenceReport;
use crate::ops::structure_label;
use crate::verify::SuiteReport;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupSummary {
    pub order: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationFlags {
    pub p_nilpotent: bool,
    pub p_closed: bool,
    pub supersolvable: bool,
    pub coprime_condition: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// The fusion-system summary printed by `analyze`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub group_name: String,
    pub group_order: usize,
    pub prime: u64,
    pub sylow: SubgroupSummary,
    /// Labels of the essential subgroups together with `S` itself, which is labelled "S".
    pub essential_star: Vec<String>,
    pub op_f: SubgroupSummary,
    pub strongly_closed_orders: Vec<usize>,
    pub supersolvable_chain: Option<Vec<SubgroupSummary>>,
    pub fusion_equals_inner: bool,
    pub classification: ClassificationFlags,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceRecord {
    pub group_name: String,
    pub report: EquivalenceReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Payload {
    Suite(SuiteReport),
    Analysis(AnalysisRecord),
    Equivalences(EquivalenceRecord),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub generated_at: String,
    pub engine_caps: Caps,
    pub payload: Payload,
}

impl ReportDocument {
    pub fn new(caps: Caps, payload: Payload) -> ReportDocument {
        ReportDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            engine_caps: caps,
            payload,
        }
    }
}

fn summary(h: &Subgroup, s: &Subgroup) -> SubgroupSummary {
    SubgroupSummary {
        order: h.order(),
        label: if h == s { "S".to_string() } else { structure_label(h) },
    }
}

pub fn analyze(name: &str, g: &Arc<Group>, p: u64) -> Result<AnalysisRecord> {
    let ctx = FusionContext::new(g, p)?;
    let s = ctx.sylow();
    let essential_star = ctx.essential_star()?.iter().map(|h| summary(h, s).label).collect();
    let op = ctx.op_f()?;
    debug_assert!(ctx.is_normal_in_f(&op, NormalityMethod::Criterion)?);
    let chain = ctx
        .supersolvable_chain()?
        .map(|c| c.links.iter().map(|h| summary(h, s)).collect());
    let c = classify_group(g, p)?;
    Ok(AnalysisRecord {
        group_name: name.to_string(),
        group_order: g.order(),
        prime: p,
        sylow: SubgroupSummary {
            order: s.order(),
            label: structure_label(s),
        },
        essential_star,
        op_f: summary(&op, s),
        strongly_closed_orders: ctx.strongly_closed_subgroups().iter().map(|h| h.order()).collect(),
        supersolvable_chain: chain,
        fusion_equals_inner: ctx.fusion_equals_inner(),
        classification: ClassificationFlags {
            p_nilpotent: c.p_nilpotent,
            p_closed: c.p_closed,
            supersolvable: c.supersolvable,
            coprime_condition: c.coprime_condition,
            notes: c.notes,
        },
    })
}

pub fn to_json(doc: &ReportDocument) -> String {
    serde_json::to_string_pretty(doc).expect("report documents always serialize") + "\n"
}

fn labels(hs: &[SubgroupSummary]) -> String {
    hs.iter().map(|h| h.label.as_str()).collect::<Vec<_>>().join(" <= ")
}

pub fn to_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    match &doc.payload {
        Payload::Analysis(a) => {
            let _ = writeln!(out, "group            {} (order {})", a.group_name, a.group_order);
            let _ = writeln!(out, "prime            {}", a.prime);
            let _ = writeln!(out, "sylow            {} (order {})", a.sylow.label, a.sylow.order);
            let _ = writeln!(out, "essential_star   [{}]", a.essential_star.join(", "));
            let _ = writeln!(out, "O_p(F)           {} (order {})", a.op_f.label, a.op_f.order);
            let _ = writeln!(out, "strongly closed  orders {:?}", a.strongly_closed_orders);
            match &a.supersolvable_chain {
                Some(c) => {
                    let _ = writeln!(out, "chain            {}", labels(c));
                }
                None => {
                    let _ = writeln!(out, "chain            none (not supersolvable)");
                }
            }
            let _ = writeln!(out, "F_S(G) = F_S(S)  {}", a.fusion_equals_inner);
            let c = &a.classification;
            let _ = writeln!(
                out,
                "classification   p_nilpotent={} p_closed={} supersolvable={} coprime={}",
                c.p_nilpotent, c.p_closed, c.supersolvable, c.coprime_condition
            );
            for n in &c.notes {
                let _ = writeln!(out, "note             {n}");
            }
        }
        Payload::Suite(r) => {
            let _ = writeln!(
                out,
                "{:<34} {:<10} {:>3}  {:<5} {:<5} {:<4} verdict",
                "theorem", "group", "p", "hyp", "concl", "|D|"
            );
            for o in &r.outcomes {
                let d = o
                    .witness_d
                    .as_ref()
                    .map(|w| w.order.to_string())
                    .unwrap_or_else(|| "-".into());
                let _ = write!(
                    out,
                    "{:<34} {:<10} {:>3}  {:<5} {:<5} {:<4} {}",
                    o.theorem_id, o.group_name, o.prime, o.hypothesis_holds, o.conclusion_holds, d, o.verdict
                );
                if let Some(e) = &o.error {
                    let _ = write!(out, "  error: {e}");
                }
                let _ = writeln!(out);
            }
            for q in &r.quarantined {
                let _ = writeln!(out, "quarantined {}: {}", q.name, q.error);
            }
            for f in &r.branch_fidelity {
                let _ = writeln!(
                    out,
                    "branches {}: weakened hypothesis held {} time(s), {} distinguished",
                    f.theorem_id, f.weakened_holds, f.distinguished
                );
            }
            let t = &r.totals;
            let _ = writeln!(
                out,
                "totals: pass={} vacuous={} COUNTEREXAMPLE={} errors={}",
                t.pass, t.vacuous, t.counterexample, t.errors
            );
        }
        Payload::Equivalences(e) => {
            let r = &e.report;
            let _ = writeln!(
                out,
                "{} at p={}: {} subgroups checked, {} violation(s), subnormalizer agreement on {}",
                e.group_name,
                r.prime,
                r.subgroups_checked,
                r.violations.len(),
                r.subnormalizer_agreement
            );
            for v in &r.violations {
                let _ = writeln!(out, "violation {}: {}", v.subgroup, v.rule);
            }
        }
    }
    out
}

pub fn write_report(doc: &ReportDocument, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    let text = match format {
        Format::Json => to_json(doc),
        Format::Text => to_text(doc),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_report(path: impl AsRef<Path>) -> Result<ReportDocument> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}
