//! Group description files and corpora.
//!
//! A group file is a JSON document:
//!
//! ```json
//! {"name": "S4", "degree": 4, "generators": [[[0, 1]], [[0, 1, 2, 3]]],
//!  "expected": {"order": 24, "sylow": {"2": 8}}}
//! ```
//!
//! Each generator is a list of cycles over 0-based points.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::builtin::builtin_group;
use crate::error::{Error, Result};
use crate::group::{Caps, Group};
use crate::ops::sylow_subgroup;
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ExpectedFacts {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// Sylow subgroup order per prime.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sylow: BTreeMap<u64, usize>,
}

impl ExpectedFacts {
    pub fn is_empty(&self) -> bool {
        self.order.is_none() && self.sylow.is_empty()
    }

    pub fn check(&self, g: &Arc<Group>) -> Result<()> {
        if let Some(n) = self.order {
            if g.order() != n {
                return Err(Error::ExpectedFact {
                    fact: "order".into(),
                    expected: n.to_string(),
                    found: g.order().to_string(),
                });
            }
        }
        for (&p, &n) in &self.sylow {
            let found = sylow_subgroup(g, p)?.order();
            if found != n {
                return Err(Error::ExpectedFact {
                    fact: format!("sylow.{p}"),
                    expected: n.to_string(),
                    found: found.to_string(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "ExpectedFacts::is_empty")]
    pub expected: ExpectedFacts,
}

impl GroupFile {
    pub fn build(&self, caps: Caps) -> Result<Arc<Group>> {
        let gens = self
            .generators
            .iter()
            .map(|cycles| Permutation::from_cycles(self.degree, cycles))
            .collect::<Result<Vec<_>>>()?;
        let g = Group::generate(self.degree, &gens, caps)?;
        self.expected.check(&g)?;
        Ok(g)
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn parse_group_file(text: &str) -> Result<GroupFile> {
    serde_json::from_str(text).map_err(parse_error)
}

/// Reads, builds and sanity-checks the group described by the file at `path`.
pub fn load_group(path: impl AsRef<Path>, caps: Caps) -> Result<(String, Arc<Group>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file = parse_group_file(&text)?;
    let g = file.build(caps)?;
    Ok((file.name, g))
}

/// A file description of `g` using its stored generators.
pub fn group_to_file(name: &str, g: &Group) -> GroupFile {
    GroupFile {
        name: name.to_string(),
        degree: g.degree(),
        generators: g.generator_perms().iter().map(|p| p.cycles()).collect(),
        expected: ExpectedFacts {
            order: Some(g.order()),
            sylow: BTreeMap::new(),
        },
    }
}

pub fn save_group(path: impl AsRef<Path>, file: &GroupFile) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(file).map_err(|e| Error::Invariant(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusSource {
    Builtin(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub source: CorpusSource,
    #[serde(default, skip_serializing_if = "ExpectedFacts::is_empty")]
    pub expected: ExpectedFacts,
}

impl CorpusEntry {
    pub fn builtin(name: &str, spec: &str, order: usize, sylow: &[(u64, usize)]) -> CorpusEntry {
        CorpusEntry {
            name: name.to_string(),
            source: CorpusSource::Builtin(spec.to_string()),
            expected: ExpectedFacts {
                order: Some(order),
                sylow: sylow.iter().copied().collect(),
            },
        }
    }

    /// Builds the group and checks the entry's expected facts.
    pub fn load(&self, caps: Caps) -> Result<Arc<Group>> {
        let g = match &self.source {
            CorpusSource::Builtin(spec) => builtin_group(spec, caps)?,
            CorpusSource::File(path) => load_group(path, caps)?.1,
        };
        self.expected.check(&g)?;
        Ok(g)
    }
}

/// The builtin corpus of small groups.
pub fn builtin_corpus() -> Vec<CorpusEntry> {
    let b = CorpusEntry::builtin;
    vec![
        b("C2", "cyclic(2)", 2, &[(2, 2)]),
        b("C3", "cyclic(3)", 3, &[(3, 3)]),
        b("C4", "cyclic(4)", 4, &[(2, 4)]),
        b("C8", "cyclic(8)", 8, &[(2, 8)]),
        b("C12", "cyclic(12)", 12, &[(2, 4), (3, 3)]),
        b("C2^2", "elementary_abelian(2,2)", 4, &[(2, 4)]),
        b("C3^2", "elementary_abelian(3,2)", 9, &[(3, 9)]),
        b("S3", "symmetric(3)", 6, &[(2, 2), (3, 3)]),
        b("D8", "dihedral(8)", 8, &[(2, 8)]),
        b("Q8", "dicyclic(8)", 8, &[(2, 8)]),
        b("Dic12", "dicyclic(12)", 12, &[(2, 4), (3, 3)]),
        b("A4", "alternating(4)", 12, &[(2, 4), (3, 3)]),
        b("D12", "dihedral(12)", 12, &[(2, 4), (3, 3)]),
        b("D16", "dihedral(16)", 16, &[(2, 16)]),
        b("S3xC3", "direct_product(symmetric(3),cyclic(3))", 18, &[(2, 2), (3, 9)]),
        b("F21", "frobenius21", 21, &[(3, 3), (7, 7)]),
        b("S4", "symmetric(4)", 24, &[(2, 8), (3, 3)]),
        b("SL(2,3)", "sl2(3)", 24, &[(2, 8), (3, 3)]),
        b("Heis3", "heisenberg(3)", 27, &[(3, 27)]),
        b("A5", "alternating(5)", 60, &[(2, 4), (3, 3), (5, 5)]),
        b("PSL(2,7)", "psl2(7)", 168, &[(2, 8), (3, 3), (7, 7)]),
    ]
}

fn check_unique(entries: &[CorpusEntry]) -> Result<()> {
    let mut seen = HashSet::new();
    for e in entries {
        if !seen.insert(e.name.as_str()) {
            return Err(Error::validation(format!("duplicate corpus entry `{}`", e.name)));
        }
    }
    Ok(())
}

/// Reads a corpus file: a JSON array of entries. Relative file sources are
/// resolved against the corpus file's directory.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<CorpusEntry>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut entries: Vec<CorpusEntry> = serde_json::from_str(&text).map_err(parse_error)?;
    check_unique(&entries)?;
    let base = path.parent().unwrap_or(Path::new("."));
    for e in &mut entries {
        if let CorpusSource::File(p) = &mut e.source {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_build() {
        let f = parse_group_file(r#"{"degree": 4, "generators": [[[0,1]], [[0,1,2,3]]], "name": "S4"}"#).unwrap();
        assert_eq!(f.build(Caps::default()).unwrap().order(), 24);
        let f = parse_group_file(r#"{"degree": 3, "generators": [], "name": "triv"}"#).unwrap();
        assert_eq!(f.build(Caps::default()).unwrap().order(), 1);
    }

    #[test]
    fn expected_mismatch_names_the_fact() {
        let f = parse_group_file(r#"{"degree": 3, "generators": [[[0,1,2]]], "name": "c3", "expected": {"order": 4}}"#)
            .unwrap();
        match f.build(Caps::default()) {
            Err(Error::ExpectedFact { fact, .. }) => assert_eq!(fact, "order"),
            other => panic!("unexpected {other:?}"),
        }
        let f = parse_group_file(
            r#"{"degree": 3, "generators": [[[0,1,2]]], "name": "c3", "expected": {"sylow": {"3": 9}}}"#,
        )
        .unwrap();
        assert!(matches!(f.build(Caps::default()), Err(Error::ExpectedFact { .. })));
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_group_file("{\n  \"name\": \"x\",\n  \"degree\": oops\n}") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn corpus_names_unique() {
        assert!(check_unique(&builtin_corpus()).is_ok());
        let mut c = builtin_corpus();
        c.push(c[0].clone());
        assert!(check_unique(&c).is_err());
    }
}
