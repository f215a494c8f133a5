//! The instance file format: an encoding plus named relations.
//!
//! ```json
//! {
//!   "source":   { "states": ["s1"], "steps": [], "barbs": {}, "success": [] },
//!   "target":   { "states": ["t1"], "steps": [], "barbs": {}, "success": [] },
//!   "encoding": { "s1": "t1" },
//!   "relations": {
//!     "RT": { "over": "target", "pairs": [["t1", "t1"]], "closures": ["refl", "trans"] }
//!   }
//! }
//! ```
//!
//! Closures are applied left to right, so `trans(refl(X))` is written
//! `["refl", "trans"]`. Emitting always produces the canonical form: closed
//! pair lists and no closure directives.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_instance, EncodingInstance, InstanceSpec, SystemSpec};
use crate::rel::{Carrier, ClosureOp, Rel};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDocument {
    pub over: String,
    #[serde(default)]
    pub pairs: Vec<(String, String)>,
    #[serde(default)]
    pub closures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub source: SystemSpec,
    pub target: SystemSpec,
    pub encoding: BTreeMap<String, String>,
    #[serde(default)]
    pub relations: BTreeMap<String, RelationDocument>,
}

/// A validated instance with its named relations, closures applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bundle {
    pub instance: EncodingInstance,
    pub relations: BTreeMap<String, Rel>,
}

impl Bundle {
    pub fn new(instance: EncodingInstance) -> Self {
        Bundle { instance, relations: BTreeMap::new() }
    }

    pub fn relation(&self, name: &str) -> Result<&Rel> {
        self.relations.get(name).ok_or_else(|| Error::Usage(format!("no relation named `{name}` in the instance")))
    }

    pub fn to_document(&self) -> InstanceDocument {
        let InstanceSpec { source, target, encoding } = self.instance.to_spec();
        let relations = self
            .relations
            .iter()
            .map(|(name, rel)| {
                let names = self.instance.carrier_names(rel.carrier());
                let doc = RelationDocument {
                    over: rel.carrier().to_string(),
                    pairs: rel.named_pairs(names),
                    closures: Vec::new(),
                };
                (name.clone(), doc)
            })
            .collect();
        InstanceDocument { source, target, encoding, relations }
    }
}

impl InstanceDocument {
    pub fn into_bundle(self) -> Result<Bundle> {
        let instance =
            validate_instance(&InstanceSpec { source: self.source, target: self.target, encoding: self.encoding })?;
        let mut relations = BTreeMap::new();
        for (name, doc) in self.relations {
            let rel = build_relation(&instance, &name, &doc)?;
            relations.insert(name, rel);
        }
        Ok(Bundle { instance, relations })
    }
}

fn build_relation(enc: &EncodingInstance, name: &str, doc: &RelationDocument) -> Result<Rel> {
    let carrier: Carrier = doc.over.parse().map_err(|e: Error| Error::Parse(format!("relations.{name}.over: {e}")))?;
    let sys = enc.carrier_system(carrier);
    let mut rel = Rel::empty(carrier, sys.len());
    for (k, (a, b)) in doc.pairs.iter().enumerate() {
        let context = format!("relations.{name}.pairs[{k}]");
        let i = sys.index_of(a).ok_or_else(|| Error::unknown_state(a.as_str(), context.clone()))?;
        let j = sys.index_of(b).ok_or_else(|| Error::unknown_state(b.as_str(), context))?;
        rel.insert(i, j);
    }
    let ops = doc
        .closures
        .iter()
        .enumerate()
        .map(|(k, c)| c.parse::<ClosureOp>().map_err(|e| Error::Parse(format!("relations.{name}.closures[{k}]: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(rel.closed_under(&ops))
}

/// Parses and validates an instance document. Syntax errors carry the line,
/// column and field path.
pub fn parse_instance_str(text: &str) -> Result<Bundle> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: InstanceDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse(format!("line {}, column {}, at `{}`: {}", inner.line(), inner.column(), path, inner))
    })?;
    doc.into_bundle()
}

pub fn parse_instance(path: impl AsRef<Path>) -> Result<Bundle> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_instance_str(&text)
}

/// Canonical text of `bundle`, newline-terminated.
pub fn emit(bundle: &Bundle) -> String {
    let mut out = serde_json::to_string_pretty(&bundle.to_document()).expect("instance documents always serialize");
    out.push('\n');
    out
}

pub fn emit_to(bundle: &Bundle, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, emit(bundle)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fixtures::{fixture, FixtureName};

    const TINY: &str = r#"{
        "source": {"states": ["s"], "steps": [["s", "s"]]},
        "target": {"states": ["t", "u"], "steps": [["t", "u"]], "barbs": {"u": ["a"]}},
        "encoding": {"s": "t"},
        "relations": {"R": {"over": "target", "pairs": [["t", "u"]], "closures": ["refl"]}}
    }"#;

    #[test]
    fn parses_and_applies_closures() {
        let b = parse_instance_str(TINY).unwrap();
        assert_eq!(b.instance.target().len(), 2);
        assert_eq!(b.relations["R"].len(), 3);
    }

    #[test]
    fn closure_order_is_literal() {
        let doc = |closures: &str| {
            TINY.replace(r#"["t", "u"]], "closures": ["refl"]"#, &format!(r#"["t", "u"]], "closures": {closures}"#))
        };
        let sym_then_trans = parse_instance_str(&doc(r#"["sym", "trans"]"#)).unwrap();
        let trans_then_sym = parse_instance_str(&doc(r#"["trans", "sym"]"#)).unwrap();
        // trans(sym{(t,u)}) adds (t,t) and (u,u); sym(trans{(t,u)}) does not.
        assert_eq!(sym_then_trans.relations["R"].len(), 4);
        assert_eq!(trans_then_sym.relations["R"].len(), 2);
    }

    #[test]
    fn errors_carry_context() {
        let bad = TINY.replace(r#""pairs": [["t", "u"]]"#, r#""pairs": [["t", "zz"]]"#);
        match parse_instance_str(&bad) {
            Err(Error::UnknownState { state, context }) => {
                assert_eq!(state, "zz");
                assert_eq!(context, "relations.R.pairs[0]");
            }
            other => panic!("unexpected {other:?}"),
        }
        let syntax = TINY.replace(r#""steps": [["s", "s"]]"#, r#""steps": [["s"]]"#);
        let err = parse_instance_str(&syntax).unwrap_err().to_string();
        assert!(err.starts_with("E_PARSE: line 2"), "{err}");
        assert!(err.contains("source.steps[0]"), "{err}");
        let closure = TINY.replace(r#"["refl"]"#, r#"["reflexive"]"#);
        assert!(matches!(parse_instance_str(&closure), Err(Error::Parse(_))));
    }

    #[test]
    fn emit_is_canonical_and_round_trips() {
        for name in FixtureName::ALL {
            let b = fixture(name);
            let text = emit(&b);
            let again = parse_instance_str(&text).unwrap();
            assert_eq!(again, b);
            assert_eq!(emit(&again), text);
        }
    }
}
