//! Encodability criteria decided directly on an encoding.

use std::fmt;
use std::str::FromStr;

use crate::document::Bundle;
use crate::error::{Error, Result};
use crate::model::EncodingInstance;
use crate::predicate::{Mode, Selector, Strength};
use crate::rel::{Carrier, Rel};
use crate::verdict::{Counterexample, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OcVariant {
    Strong,
    Standard,
    Weak,
}

impl OcVariant {
    pub const ALL: [OcVariant; 3] = [OcVariant::Strong, OcVariant::Standard, OcVariant::Weak];
}

impl fmt::Display for OcVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OcVariant::Strong => "strong",
            OcVariant::Standard => "standard",
            OcVariant::Weak => "weak",
        })
    }
}

impl FromStr for OcVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" => Ok(OcVariant::Strong),
            "standard" => Ok(OcVariant::Standard),
            "weak" => Ok(OcVariant::Weak),
            other => Err(Error::Usage(format!("unknown variant `{other}` (expected strong|standard|weak)"))),
        }
    }
}

pub(crate) fn require_carrier(rel: &Rel, carrier: Carrier, enc: &EncodingInstance, what: &str) -> Result<()> {
    if rel.carrier() != carrier || rel.size() != enc.carrier_size(carrier) {
        return Err(Error::Precondition(format!(
            "{what} must be a relation over the {carrier} states, got one over {}",
            rel.carrier()
        )));
    }
    Ok(())
}

/// Whether the encoding relates every source state and its translation as
/// `mode` requires for the selected predicate(s).
pub fn check_pred_criterion(enc: &EncodingInstance, selector: &Selector, mode: Mode) -> Verdict {
    let c = enc.combined();
    let sys = c.system();
    let preds = selector.expand(&enc.barb_alphabet());
    let mut out = Vec::new();
    for s in c.source_indices() {
        let t = enc.translate_combined(s);
        for pred in &preds {
            let (l, r) = (sys.holds(s, pred), sys.holds(t, pred));
            if !mode.admits(l, r) {
                let (sn, tn) = (sys.name(s), sys.name(t));
                let detail = if l {
                    format!("{pred} holds at {sn} but not at its translation {tn}")
                } else {
                    format!("{pred} holds at the translation {tn} but not at {sn}")
                };
                out.push(Counterexample::new(format!("{mode}-{pred}"), vec![sn.to_string(), tn.to_string()], detail));
            }
        }
    }
    Verdict::from_counterexamples(out)
}

pub fn divergence_reflection(enc: &EncodingInstance) -> Verdict {
    check_pred_criterion(enc, &Selector::Divergent, Mode::Reflect)
}

pub fn success_sensitiveness(enc: &EncodingInstance, strength: Strength) -> Verdict {
    check_pred_criterion(enc, &Selector::Success(strength), Mode::Respect)
}

pub fn barb_sensitiveness(enc: &EncodingInstance, mode: Mode, strength: Strength) -> Verdict {
    check_pred_criterion(enc, &Selector::all_barbs(strength), mode)
}

/// `(S1,S2) in rs` iff `([S1],[S2]) in rt`, for all source states.
pub fn full_abstraction(enc: &EncodingInstance, rs: &Rel, rt: &Rel) -> Result<Verdict> {
    require_carrier(rs, Carrier::Source, enc, "RS")?;
    require_carrier(rt, Carrier::Target, enc, "RT")?;
    let (src, tgt) = (enc.source(), enc.target());
    let mut out = Vec::new();
    for s1 in 0..src.len() {
        for s2 in 0..src.len() {
            let (t1, t2) = (enc.translate(s1), enc.translate(s2));
            let (in_s, in_t) = (rs.contains(s1, s2), rt.contains(t1, t2));
            if in_s == in_t {
                continue;
            }
            let names = vec![src.name(s1).to_string(), src.name(s2).to_string()];
            let cx = if in_s {
                Counterexample::new(
                    "fa-complete",
                    names,
                    format!(
                        "({},{}) in RS but ({},{}) not in RT",
                        src.name(s1),
                        src.name(s2),
                        tgt.name(t1),
                        tgt.name(t2)
                    ),
                )
            } else {
                Counterexample::new(
                    "fa-sound",
                    names,
                    format!(
                        "({},{}) in RT but ({},{}) not in RS",
                        tgt.name(t1),
                        tgt.name(t2),
                        src.name(s1),
                        src.name(s2)
                    ),
                )
            };
            out.push(cx);
        }
    }
    Ok(Verdict::from_counterexamples(out))
}

/// Operational correspondence of `variant` modulo `rt`. Soundness is
/// checked for every source state, not only for designated initial ones.
pub fn operational_correspondence(enc: &EncodingInstance, rt: &Rel, variant: OcVariant) -> Result<Verdict> {
    require_carrier(rt, Carrier::Target, enc, "RT")?;
    let (src, tgt) = (enc.source(), enc.target());
    let mut out = Vec::new();
    for s in 0..src.len() {
        let ts = enc.translate(s);
        // Completeness: S -> S' (strong) or S ==> S' is answered by [S] -> T
        // (strong) or [S] ==> T with ([S'],T) in RT.
        let source_moves: Vec<usize> = match variant {
            OcVariant::Strong => src.successors(s).to_vec(),
            _ => src.derivatives(s).ones().collect(),
        };
        for s1 in source_moves {
            let image = rt.image(enc.translate(s1));
            let answered = match variant {
                OcVariant::Strong => tgt.successors(ts).iter().any(|&t| image.contains(t)),
                _ => !image.is_disjoint(tgt.derivatives(ts)),
            };
            if !answered {
                let arrow = if variant == OcVariant::Strong { "->" } else { "==>" };
                out.push(
                    Counterexample::new(
                        "completeness",
                        vec![src.name(s).to_string(), src.name(s1).to_string()],
                        format!(
                            "{} {arrow} {} is not matched by its translation {}",
                            src.name(s),
                            src.name(s1),
                            tgt.name(ts)
                        ),
                    )
                    .with_challenge(src.name(s).to_string(), src.name(s1).to_string()),
                );
            }
        }
        // Soundness: every move of the translation belongs to the simulation
        // of a source move.
        let target_moves: Vec<usize> = match variant {
            OcVariant::Strong => tgt.successors(ts).to_vec(),
            _ => tgt.derivatives(ts).ones().collect(),
        };
        for t in target_moves {
            let related = |s1: usize| {
                let image = rt.image(enc.translate(s1));
                match variant {
                    OcVariant::Weak => !image.is_disjoint(tgt.derivatives(t)),
                    _ => image.contains(t),
                }
            };
            let answered = match variant {
                OcVariant::Strong => src.successors(s).iter().any(|&s1| related(s1)),
                _ => src.derivatives(s).ones().any(related),
            };
            if !answered {
                let arrow = if variant == OcVariant::Strong { "->" } else { "==>" };
                let needed = match variant {
                    OcVariant::Weak => format!("([S'],T') in RT for some T' with {} ==> T'", tgt.name(t)),
                    _ => format!("([S'],{}) in RT", tgt.name(t)),
                };
                out.push(
                    Counterexample::new(
                        "soundness",
                        vec![src.name(s).to_string(), tgt.name(t).to_string()],
                        format!(
                            "{} {arrow} {} but no S' with {} {arrow} S' and {needed}",
                            tgt.name(ts),
                            tgt.name(t),
                            src.name(s)
                        ),
                    )
                    .with_challenge(tgt.name(ts).to_string(), tgt.name(t).to_string()),
                );
            }
        }
    }
    Ok(Verdict::from_counterexamples(out))
}

pub fn is_surjective(enc: &EncodingInstance) -> Verdict {
    let tgt = enc.target();
    let mut hit = vec![false; tgt.len()];
    for &t in enc.mapping() {
        hit[t] = true;
    }
    (0..tgt.len())
        .filter(|&t| !hit[t])
        .map(|t| {
            Counterexample::new(
                "no-preimage",
                vec![tgt.name(t).to_string()],
                format!("{} is not the translation of any source state", tgt.name(t)),
            )
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    DivergenceReflection,
    SuccessSensitiveness,
    BarbSensitiveness,
    FullAbstraction,
    OperationalCorrespondence,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::DivergenceReflection => "divergence-reflection",
            Criterion::SuccessSensitiveness => "success-sensitiveness",
            Criterion::BarbSensitiveness => "barb-sensitiveness",
            Criterion::FullAbstraction => "full-abstraction",
            Criterion::OperationalCorrespondence => "oc",
        })
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "divergence-reflection" => Ok(Criterion::DivergenceReflection),
            "success-sensitiveness" => Ok(Criterion::SuccessSensitiveness),
            "barb-sensitiveness" => Ok(Criterion::BarbSensitiveness),
            "full-abstraction" => Ok(Criterion::FullAbstraction),
            "oc" => Ok(Criterion::OperationalCorrespondence),
            other => Err(Error::Usage(format!("unknown criterion `{other}`"))),
        }
    }
}

/// A criterion with its parameters; relation arguments are names resolved
/// in a [`Bundle`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionSpec {
    pub criterion: Criterion,
    pub variant: OcVariant,
    pub mode: Mode,
    pub strength: Strength,
    pub rel_source: String,
    pub rel_target: String,
}

impl CriterionSpec {
    pub fn new(criterion: Criterion) -> Self {
        CriterionSpec {
            criterion,
            variant: OcVariant::Standard,
            mode: Mode::Respect,
            strength: Strength::Reaches,
            rel_source: "RS".into(),
            rel_target: "RT".into(),
        }
    }

    pub fn evaluate(&self, bundle: &Bundle) -> Result<Verdict> {
        let enc = &bundle.instance;
        match self.criterion {
            Criterion::DivergenceReflection => Ok(divergence_reflection(enc)),
            Criterion::SuccessSensitiveness => Ok(success_sensitiveness(enc, self.strength)),
            Criterion::BarbSensitiveness => Ok(barb_sensitiveness(enc, self.mode, self.strength)),
            Criterion::FullAbstraction => {
                full_abstraction(enc, bundle.relation(&self.rel_source)?, bundle.relation(&self.rel_target)?)
            }
            Criterion::OperationalCorrespondence => {
                operational_correspondence(enc, bundle.relation(&self.rel_target)?, self.variant)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fixtures::{fig2_step_moved, fixture, FixtureName};
    use crate::model::{validate_instance, InstanceSpec, SystemSpec};
    use std::collections::BTreeMap;

    fn spec(states: &[&str], steps: &[(&str, &str)], success: &[&str]) -> SystemSpec {
        SystemSpec {
            states: states.iter().map(|s| s.to_string()).collect(),
            steps: steps.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            barbs: BTreeMap::new(),
            success: success.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn instance(source: SystemSpec, target: SystemSpec, map: &[(&str, &str)]) -> EncodingInstance {
        validate_instance(&InstanceSpec {
            source,
            target,
            encoding: map.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        })
        .unwrap()
    }

    fn states(v: &Verdict) -> Vec<Vec<String>> {
        v.counterexamples().iter().map(|c| c.states.clone()).collect()
    }

    #[test]
    fn divergence_reflection_on_figure_one() {
        let f = fixture(FixtureName::Fig1);
        assert!(divergence_reflection(&f.instance).holds());

        let mut doc = crate::harness::fixtures::fixture_document(FixtureName::Fig1);
        doc.source.steps.retain(|(a, b)| !(a == "s1" && b == "s1"));
        let edited = doc.into_bundle().unwrap();
        let v = divergence_reflection(&edited.instance);
        assert_eq!(states(&v), vec![vec!["s1", "t1"]]);

        let empty = instance(SystemSpec::default(), spec(&["t"], &[("t", "t")], &[]), &[]);
        for mode in Mode::ALL {
            assert!(check_pred_criterion(&empty, &Selector::Divergent, mode).holds());
        }
    }

    #[test]
    fn success_sensitiveness_examples() {
        let agree = instance(spec(&["s"], &[], &["s"]), spec(&["t"], &[], &["t"]), &[("s", "t")]);
        assert!(success_sensitiveness(&agree, Strength::Reaches).holds());
        let disagree = instance(spec(&["s"], &[], &["s"]), spec(&["t"], &[], &[]), &[("s", "t")]);
        assert!(!success_sensitiveness(&disagree, Strength::Reaches).holds());

        // s -> s' with s' successful; the image t reaches success only via
        // t -> u -> v, and s' is translated to the intermediate u.
        let delayed = instance(
            spec(&["s", "s'"], &[("s", "s'")], &["s'"]),
            spec(&["t", "u", "v"], &[("t", "u"), ("u", "v")], &["v"]),
            &[("s", "t"), ("s'", "u")],
        );
        assert!(success_sensitiveness(&delayed, Strength::Reaches).holds());
        let v = success_sensitiveness(&delayed, Strength::Has);
        assert_eq!(states(&v), vec![vec!["s'", "u"]]);
    }

    #[test]
    fn barb_sensitiveness_on_figure_three() {
        let f = fixture(FixtureName::Fig3);
        assert!(barb_sensitiveness(&f.instance, Mode::Respect, Strength::Reaches).holds());
        let v = barb_sensitiveness(&f.instance, Mode::Respect, Strength::Has);
        assert_eq!(states(&v), vec![vec!["s2", "t2"]]);
        assert_eq!(v.counterexamples()[0].kind, "respect-has-barb(b)");

        let f1 = fixture(FixtureName::Fig1);
        for mode in Mode::ALL {
            for strength in [Strength::Has, Strength::Reaches] {
                assert!(barb_sensitiveness(&f1.instance, mode, strength).holds());
            }
        }
    }

    #[test]
    fn full_abstraction_on_figure_two() {
        let f = fixture(FixtureName::Fig2);
        let (rs, rt) = (&f.relations["RS"], &f.relations["RT"]);
        assert!(full_abstraction(&f.instance, rs, rt).unwrap().holds());

        let id = Rel::identity(Carrier::Target, 3);
        let v = full_abstraction(&f.instance, rs, &id).unwrap();
        assert!(states(&v).contains(&vec!["s1".into(), "s2".into()]));
        assert!(v.counterexamples().iter().all(|c| c.kind == "fa-complete"));

        let moved = fig2_step_moved();
        assert!(full_abstraction(&moved.instance, &moved.relations["RS"], &moved.relations["RT"]).unwrap().holds());

        let empty = instance(SystemSpec::default(), spec(&["t"], &[], &[]), &[]);
        let rs0 = Rel::empty(Carrier::Source, 0);
        assert!(full_abstraction(&empty, &rs0, &Rel::full(Carrier::Target, 1)).unwrap().holds());
        assert!(matches!(full_abstraction(&f.instance, rt, rs), Err(Error::Precondition(_))));
    }

    #[test]
    fn operational_correspondence_on_figures() {
        let f1 = fixture(FixtureName::Fig1);
        let rt1 = &f1.relations["RT"];
        for variant in OcVariant::ALL {
            let v = operational_correspondence(&f1.instance, rt1, variant).unwrap();
            // Strong completeness fails: s1 -> s1 needs t1 -> T with (t1,T) in RT.
            assert_eq!(v.holds(), variant != OcVariant::Strong, "{variant}");
        }

        let f2 = fixture(FixtureName::Fig2);
        let v = operational_correspondence(&f2.instance, &f2.relations["RT"], OcVariant::Standard).unwrap();
        assert_eq!(states(&v), vec![vec!["s2", "t3"]]);
        assert_eq!(v.counterexamples()[0].kind, "soundness");
        assert_eq!(v.counterexamples()[0].challenge, Some(("t2".into(), "t3".into())));
    }

    #[test]
    fn strong_does_not_imply_standard_for_a_mere_preorder() {
        // t0 -> t1 is matched strongly via (t3,t1), but t1 -> t2 is nobody's
        // obligation, so the weak challenge t0 ==> t2 goes unanswered.
        let enc = instance(
            spec(&["s0", "s1"], &[("s0", "s1")], &[]),
            spec(&["t0", "t1", "t2", "t3"], &[("t0", "t1"), ("t1", "t2")], &[]),
            &[("s0", "t0"), ("s1", "t3")],
        );
        let rt = Rel::from_pairs(Carrier::Target, 4, [(3, 1)]).closure(crate::rel::ClosureOp::Refl);
        assert!(rt.is_preorder());
        assert!(operational_correspondence(&enc, &rt, OcVariant::Strong).unwrap().holds());
        let v = operational_correspondence(&enc, &rt, OcVariant::Standard).unwrap();
        assert_eq!(states(&v), vec![vec!["s0", "t2"]]);
    }

    #[test]
    fn surjectivity() {
        let f1 = fixture(FixtureName::Fig1);
        assert_eq!(states(&is_surjective(&f1.instance)), vec![vec!["t3"]]);
        let f3 = fixture(FixtureName::Fig3);
        assert_eq!(states(&is_surjective(&f3.instance)), vec![vec!["t3"], vec!["t4"], vec!["t5"]]);
        let id = instance(spec(&["a"], &[], &[]), spec(&["b"], &[], &[]), &[("a", "b")]);
        assert!(is_surjective(&id).holds());
    }

    #[test]
    fn criterion_spec_resolves_relations() {
        let f2 = fixture(FixtureName::Fig2);
        let mut spec = CriterionSpec::new(Criterion::OperationalCorrespondence);
        assert!(!spec.evaluate(&f2).unwrap().holds());
        spec.rel_target = "missing".into();
        assert!(matches!(spec.evaluate(&f2), Err(Error::Usage(_))));
        assert_eq!("oc".parse::<Criterion>().unwrap().to_string(), "oc");
    }
}
