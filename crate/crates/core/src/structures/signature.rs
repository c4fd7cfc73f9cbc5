use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A relation symbol of arity at least two.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
}

impl Relation {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Relation {
            name: name.into(),
            arity,
        }
    }
}

/// A finite relational language: relation symbols of arity >= 2 plus unary
/// predicates. There are no constants or function symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SignatureDoc", into = "SignatureDoc")]
pub struct Signature {
    relations: Vec<Relation>,
    unaries: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct SignatureDoc {
    relations: Vec<Relation>,
    #[serde(default)]
    unaries: Vec<String>,
}

impl TryFrom<SignatureDoc> for Signature {
    type Error = Error;

    fn try_from(doc: SignatureDoc) -> Result<Self> {
        Signature::new(doc.relations, doc.unaries)
    }
}

impl From<Signature> for SignatureDoc {
    fn from(sig: Signature) -> Self {
        SignatureDoc {
            relations: sig.relations,
            unaries: sig.unaries,
        }
    }
}

/// Name of the edge/arc relation used by the built-in binary signatures.
pub const EDGE: &str = "E";
/// Name of the order relation used by linear and partial orders.
pub const LESS: &str = "<";

impl Signature {
    pub fn new(relations: Vec<Relation>, unaries: Vec<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for rel in &relations {
            if rel.arity < 2 {
                return Err(Error::input(format!(
                    "relation `{}` has arity {}; unary symbols belong in `unaries`",
                    rel.name, rel.arity
                )));
            }
            if !seen.insert(rel.name.as_str()) {
                return Err(Error::input(format!("duplicate symbol `{}`", rel.name)));
            }
        }
        for name in &unaries {
            if !seen.insert(name.as_str()) {
                return Err(Error::input(format!("duplicate symbol `{name}`")));
            }
        }
        Ok(Signature {
            relations,
            unaries,
        })
    }

    /// One binary relation named `name`, no unaries.
    pub fn binary(name: &str) -> Self {
        Signature {
            relations: vec![Relation::new(name, 2)],
            unaries: Vec::new(),
        }
    }

    /// Graphs, digraphs and tournaments all use a single relation `E`.
    pub fn graph() -> Self {
        Self::binary(EDGE)
    }

    pub fn order() -> Self {
        Self::binary(LESS)
    }

    /// `k` unary predicates `P0..P{k-1}` and nothing else.
    pub fn unary(k: usize) -> Self {
        Signature {
            relations: Vec::new(),
            unaries: (0..k).map(|i| format!("P{i}")).collect(),
        }
    }

    /// A single relation of the given arity, as used for uniform hypergraphs.
    pub fn hypergraph(arity: usize) -> Result<Self> {
        Signature::new(vec![Relation::new(EDGE, arity)], Vec::new())
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn unaries(&self) -> &[String] {
        &self.unaries
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn unary_index(&self, name: &str) -> Option<usize> {
        self.unaries.iter().position(|u| u == name)
    }

    pub fn arity(&self, relation: usize) -> usize {
        self.relations[relation].arity
    }

    /// True when the language is exactly one binary relation.
    pub fn is_single_binary(&self) -> bool {
        self.unaries.is_empty() && self.relations.len() == 1 && self.relations[0].arity == 2
    }

    pub fn max_arity(&self) -> usize {
        self.relations.iter().map(|r| r.arity).max().unwrap_or(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_arity_relation() {
        let err = Signature::new(vec![Relation::new("S", 1)], vec![]).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn names_are_unique_across_lists() {
        let err = Signature::new(vec![Relation::new("E", 2)], vec!["E".into()]).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
        assert!(Signature::new(vec![Relation::new("E", 2)], vec!["P".into()]).is_ok());
    }

    #[test]
    fn json_shape() {
        let sig = Signature::graph();
        let text = serde_json::to_string(&sig).unwrap();
        assert_eq!(text, r#"{"relations":[{"name":"E","arity":2}],"unaries":[]}"#);
        let back: Signature = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sig);
    }
}
