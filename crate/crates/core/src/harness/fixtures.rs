//! The three figures, built exactly as printed.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::document::{Bundle, InstanceDocument, RelationDocument};
use crate::error::{Error, Result};
use crate::model::SystemSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FixtureName {
    Fig1,
    Fig2,
    Fig3,
}

impl FixtureName {
    pub const ALL: [FixtureName; 3] = [FixtureName::Fig1, FixtureName::Fig2, FixtureName::Fig3];
}

impl fmt::Display for FixtureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FixtureName::Fig1 => "fig1",
            FixtureName::Fig2 => "fig2",
            FixtureName::Fig3 => "fig3",
        })
    }
}

impl FromStr for FixtureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(FixtureName::Fig1),
            "fig2" => Ok(FixtureName::Fig2),
            "fig3" => Ok(FixtureName::Fig3),
            other => Err(Error::UnknownFixture(other.to_string())),
        }
    }
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn pairs(xs: &[(&str, &str)]) -> Vec<(String, String)> {
    xs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

fn system(states: &[&str], steps: &[(&str, &str)], barbs: &[(&str, &str)]) -> SystemSpec {
    let mut barb_map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (state, barb) in barbs {
        barb_map.entry(state.to_string()).or_default().push(barb.to_string());
    }
    SystemSpec { states: strings(states), steps: pairs(steps), barbs: barb_map, success: Vec::new() }
}

fn relation(over: &str, ps: &[(&str, &str)], closures: &[&str]) -> RelationDocument {
    RelationDocument { over: over.into(), pairs: pairs(ps), closures: strings(closures) }
}

fn encoding(xs: &[(&str, &str)]) -> BTreeMap<String, String> {
    xs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

/// The figure as an unvalidated document, relation closures not yet applied.
pub fn fixture_document(name: FixtureName) -> InstanceDocument {
    match name {
        FixtureName::Fig1 => InstanceDocument {
            source: system(&["s1", "s2"], &[("s1", "s1"), ("s1", "s2")], &[]),
            target: system(&["t1", "t2", "t3"], &[("t1", "t3"), ("t3", "t3")], &[]),
            encoding: encoding(&[("s1", "t1"), ("s2", "t2")]),
            relations: BTreeMap::from([("RT".into(), relation("target", &[("t2", "t3")], &["refl", "trans"]))]),
        },
        FixtureName::Fig2 => InstanceDocument {
            source: system(&["s1", "s2", "s3"], &[], &[]),
            target: system(&["t1", "t2", "t3"], &[("t2", "t3")], &[]),
            encoding: encoding(&[("s1", "t1"), ("s2", "t2"), ("s3", "t3")]),
            relations: BTreeMap::from([
                ("RS".into(), relation("source", &[("s1", "s2")], &["refl", "sym", "trans"])),
                ("RT".into(), relation("target", &[("t1", "t2")], &["refl", "sym", "trans"])),
            ]),
        },
        FixtureName::Fig3 => InstanceDocument {
            source: system(
                &["s1", "s2", "s_a", "s_c"],
                &[("s1", "s2"), ("s2", "s_a"), ("s2", "s_c")],
                &[("s_a", "a"), ("s_c", "c"), ("s2", "b")],
            ),
            target: system(
                &["t1", "t2", "t3", "t4", "t5", "t_a", "t_c"],
                &[("t1", "t3"), ("t2", "t4"), ("t2", "t_c"), ("t3", "t5"), ("t3", "t_a"), ("t4", "t_a"), ("t5", "t_c")],
                &[("t_a", "a"), ("t_c", "c"), ("t4", "b"), ("t5", "b")],
            ),
            encoding: encoding(&[("s1", "t1"), ("s2", "t2"), ("s_a", "t_a"), ("s_c", "t_c")]),
            relations: BTreeMap::from([(
                "R_corr_sim".into(),
                relation("combined", &[("s1", "t1"), ("s2", "t2"), ("s2", "t3"), ("s_a", "t_a"), ("s_c", "t_c")], &[]),
            )]),
        },
    }
}

pub fn fixture(name: FixtureName) -> Bundle {
    fixture_document(name).into_bundle().expect("figure fixtures are valid")
}

/// Figure 2 with the step `t2 -> t3` moved to `s2 -> s3`.
pub fn fig2_step_moved() -> Bundle {
    let mut doc = fixture_document(FixtureName::Fig2);
    doc.target.steps.clear();
    doc.source.steps = pairs(&[("s2", "s3")]);
    doc.into_bundle().expect("mutated figure is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rel::Carrier;

    #[test]
    fn figures_as_printed() {
        let f1 = fixture(FixtureName::Fig1);
        assert_eq!(f1.instance.source().step_count(), 2);
        assert_eq!(f1.relations["RT"].len(), 4);

        let f2 = fixture(FixtureName::Fig2);
        let rs = &f2.relations["RS"];
        assert_eq!(rs.carrier(), Carrier::Source);
        // all pairs over {s1,s2} plus (s3,s3)
        assert_eq!(rs.len(), 5);
        assert!(rs.contains(0, 1) && rs.contains(1, 0) && rs.contains(2, 2) && !rs.contains(0, 2));

        let f3 = fixture(FixtureName::Fig3);
        assert_eq!(f3.instance.target().len(), 7);
        assert_eq!(f3.instance.target().step_count(), 7);
        let barbed: Vec<_> = f3
            .instance
            .combined()
            .system()
            .names()
            .iter()
            .enumerate()
            .filter(|(i, _)| !f3.instance.combined().system().barbs_at(*i).is_empty())
            .map(|(_, n)| n.to_string())
            .collect();
        assert_eq!(barbed, ["s2", "s_a", "s_c", "t4", "t5", "t_a", "t_c"]);
    }

    #[test]
    fn unknown_fixture_is_reported() {
        assert_eq!("fig4".parse::<FixtureName>(), Err(Error::UnknownFixture("fig4".into())));
    }
}
