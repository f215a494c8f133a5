//! Simulation-style relation checks, per-pair predicate respect, and the
//! greatest-fixpoint engine.
//!
//! All weak simulations are checked with finite challenge sets that are
//! equivalent to the `==>`-challenge definitions:
//!
//! * weak bisimulation: single-step challenges on both sides, weak answers;
//! * coupled simulation: single-step challenges on the left with weak
//!   answers, plus the coupling condition `exists Q'. Q ==> Q' and (Q',P) in R`
//!   that the zero-step challenge of the definition produces;
//! * correspondence simulation: single-step challenges on the left; on the
//!   right every weak derivative `Q'` of `Q` is a challenge, answered by some
//!   `P ==> P''`, `Q' ==> Q''` with `(P'',Q'')` related.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ReductionSystem;
use crate::predicate::{Constraint, Mode, Predicate, Selector, Strength};
use crate::rel::Rel;
use crate::verdict::{Counterexample, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SimKind {
    StrongBisim,
    WeakBisim,
    CoupledSim,
    CorrespondenceSim,
}

impl SimKind {
    pub const ALL: [SimKind; 4] =
        [SimKind::StrongBisim, SimKind::WeakBisim, SimKind::CoupledSim, SimKind::CorrespondenceSim];
}

impl fmt::Display for SimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimKind::StrongBisim => "strong-bisim",
            SimKind::WeakBisim => "weak-bisim",
            SimKind::CoupledSim => "coupled-sim",
            SimKind::CorrespondenceSim => "correspondence-sim",
        })
    }
}

impl FromStr for SimKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong-bisim" => Ok(SimKind::StrongBisim),
            "weak-bisim" => Ok(SimKind::WeakBisim),
            "coupled-sim" => Ok(SimKind::CoupledSim),
            "correspondence-sim" => Ok(SimKind::CorrespondenceSim),
            other => Err(Error::Usage(format!(
                "unknown relation kind `{other}` (expected strong-bisim|weak-bisim|coupled-sim|correspondence-sim)"
            ))),
        }
    }
}

/// A failed clause at one pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Unmatched {
    /// Left step `p -> p'` has no answer.
    Left(usize),
    /// Right step (or, for correspondence simulation, right weak
    /// derivative) `q -> q'` has no answer.
    Right(usize),
    /// No weak derivative of `q` is related back to `p`.
    Coupling,
}

fn exists_related(rel: &Rel, left: usize, answers: &fixedbitset::FixedBitSet) -> bool {
    !rel.image(left).is_disjoint(answers)
}

fn exists_related_rev(rel: &Rel, answers: &fixedbitset::FixedBitSet, right: usize) -> bool {
    answers.ones().any(|a| rel.contains(a, right))
}

/// Clause failures of `kind` at `(p, q)`. With `first_only` it stops at the
/// first failure.
pub(crate) fn pair_failures(
    kind: SimKind,
    sys: &ReductionSystem,
    rel: &Rel,
    p: usize,
    q: usize,
    first_only: bool,
) -> Vec<Unmatched> {
    let mut out = Vec::new();
    macro_rules! fail {
        ($e:expr) => {{
            out.push($e);
            if first_only {
                return out;
            }
        }};
    }
    match kind {
        SimKind::StrongBisim => {
            for &p1 in sys.successors(p) {
                if !sys.successors(q).iter().any(|&q1| rel.contains(p1, q1)) {
                    fail!(Unmatched::Left(p1));
                }
            }
            for &q1 in sys.successors(q) {
                if !sys.successors(p).iter().any(|&p1| rel.contains(p1, q1)) {
                    fail!(Unmatched::Right(q1));
                }
            }
        }
        SimKind::WeakBisim => {
            for &p1 in sys.successors(p) {
                if !exists_related(rel, p1, sys.derivatives(q)) {
                    fail!(Unmatched::Left(p1));
                }
            }
            for &q1 in sys.successors(q) {
                if !exists_related_rev(rel, sys.derivatives(p), q1) {
                    fail!(Unmatched::Right(q1));
                }
            }
        }
        SimKind::CoupledSim => {
            if !sys.derivatives(q).ones().any(|q1| rel.contains(q1, p)) {
                fail!(Unmatched::Coupling);
            }
            for &p1 in sys.successors(p) {
                if !exists_related(rel, p1, sys.derivatives(q)) {
                    fail!(Unmatched::Left(p1));
                }
            }
        }
        SimKind::CorrespondenceSim => {
            for &p1 in sys.successors(p) {
                if !exists_related(rel, p1, sys.derivatives(q)) {
                    fail!(Unmatched::Left(p1));
                }
            }
            let left_answers = sys.derivatives(p);
            for q1 in sys.derivatives(q).ones() {
                let answered = left_answers.ones().any(|p2| exists_related(rel, p2, sys.derivatives(q1)));
                if !answered {
                    fail!(Unmatched::Right(q1));
                }
            }
        }
    }
    out
}

fn describe(kind: SimKind, sys: &ReductionSystem, p: usize, q: usize, u: Unmatched) -> Counterexample {
    let (pn, qn) = (sys.name(p).to_string(), sys.name(q).to_string());
    let states = vec![pn.clone(), qn.clone()];
    match u {
        Unmatched::Left(p1) => {
            let answer = if kind == SimKind::StrongBisim { "->" } else { "==>" };
            Counterexample::new(
                "left-challenge",
                states,
                format!("{pn} -> {} has no answer {qn} {answer} q' with related derivatives", sys.name(p1)),
            )
            .with_challenge(pn, sys.name(p1).to_string())
        }
        Unmatched::Right(q1) if kind == SimKind::CorrespondenceSim => Counterexample::new(
            "right-weak-challenge",
            states,
            format!(
                "{qn} ==> {} is not answered by {pn} ==> p'' and {} ==> q'' with (p'',q'') related",
                sys.name(q1),
                sys.name(q1)
            ),
        )
        .with_challenge(qn, sys.name(q1).to_string()),
        Unmatched::Right(q1) => {
            let answer = if kind == SimKind::StrongBisim { "->" } else { "==>" };
            Counterexample::new(
                "right-challenge",
                states,
                format!("{qn} -> {} has no answer {pn} {answer} p' with related derivatives", sys.name(q1)),
            )
            .with_challenge(qn, sys.name(q1).to_string())
        }
        Unmatched::Coupling => {
            Counterexample::new("coupling", states, format!("no q' with {qn} ==> q' and (q',{pn}) related"))
        }
    }
}

pub fn is_simulation(kind: SimKind, sys: &ReductionSystem, rel: &Rel) -> Verdict {
    assert_eq!(sys.len(), rel.size(), "relation carrier does not match the system");
    rel.pairs()
        .flat_map(|(p, q)| {
            pair_failures(kind, sys, rel, p, q, false).into_iter().map(move |u| describe(kind, sys, p, q, u))
        })
        .collect()
}

/// Whether `(p, q)` satisfies the constraints in `sys`.
pub(crate) fn pair_admitted(sys: &ReductionSystem, predicates: &[(Predicate, Mode)], p: usize, q: usize) -> bool {
    predicates.iter().all(|(pred, mode)| mode.admits(sys.holds(p, pred), sys.holds(q, pred)))
}

/// Constraints expanded over the barb alphabet of `sys`.
pub(crate) fn expand_constraints(sys: &ReductionSystem, constraints: &[Constraint]) -> Vec<(Predicate, Mode)> {
    let alphabet = sys.barb_alphabet();
    constraints.iter().flat_map(|c| c.selector.expand(&alphabet).into_iter().map(move |p| (p, c.mode))).collect()
}

/// Whether every pair of `rel` relates its components as `mode` requires for
/// the selected predicate(s).
pub fn relation_respect(rel: &Rel, sys: &ReductionSystem, selector: &Selector, mode: Mode) -> Verdict {
    assert_eq!(sys.len(), rel.size(), "relation carrier does not match the system");
    let preds = selector.expand(&sys.barb_alphabet());
    let mut out = Vec::new();
    for (p, q) in rel.pairs() {
        for pred in &preds {
            let (l, r) = (sys.holds(p, pred), sys.holds(q, pred));
            if !mode.admits(l, r) {
                let (pn, qn) = (sys.name(p), sys.name(q));
                let detail = if l {
                    format!("{pred} holds at {pn} but not at {qn}")
                } else {
                    format!("{pred} holds at {qn} but not at {pn}")
                };
                out.push(Counterexample::new(format!("{mode}-{pred}"), vec![pn.to_string(), qn.to_string()], detail));
            }
        }
    }
    Verdict::from_counterexamples(out)
}

/// The greatest simulation of `kind` contained in `candidate`: repeatedly
/// deletes violating pairs in lexicographic order until none is left.
pub fn simulation_interior(kind: SimKind, sys: &ReductionSystem, candidate: &Rel) -> Rel {
    let mut rel = candidate.clone();
    loop {
        let mut changed = false;
        let pairs: Vec<_> = rel.pairs().collect();
        for (p, q) in pairs {
            if !pair_failures(kind, sys, &rel, p, q, true).is_empty() {
                rel.remove(p, q);
                changed = true;
            }
        }
        if !changed {
            return rel;
        }
    }
}

/// The largest relation over `sys` that is a simulation of `kind` and
/// whose pairs all satisfy `constraints`.
pub fn greatest_relation(kind: SimKind, sys: &ReductionSystem, constraints: &[Constraint]) -> Rel {
    let preds = expand_constraints(sys, constraints);
    let n = sys.len();
    let mut candidate = Rel::empty(crate::rel::Carrier::Combined, n);
    for p in 0..n {
        for q in 0..n {
            if pair_admitted(sys, &preds, p, q) {
                candidate.insert(p, q);
            }
        }
    }
    simulation_interior(kind, sys, &candidate)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RespectFlags {
    pub predicate: String,
    pub preserves: bool,
    pub reflects: bool,
    pub respects: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelKindReport {
    pub reflexive: bool,
    pub symmetric: bool,
    pub transitive: bool,
    pub preorder: bool,
    pub equivalence: bool,
    pub strong_bisimulation: bool,
    pub weak_bisimulation: bool,
    pub coupled_simulation: bool,
    pub correspondence_simulation: bool,
    pub respect: Vec<RespectFlags>,
}

pub fn relation_properties(rel: &Rel, sys: &ReductionSystem) -> RelKindReport {
    let reflexive = rel.is_reflexive();
    let symmetric = rel.is_symmetric();
    let transitive = rel.is_transitive();
    let mut predicates = vec![Predicate::Divergent, Predicate::HasSuccess, Predicate::ReachesSuccess];
    for barb in sys.barb_alphabet() {
        predicates.push(Predicate::HasBarb(barb.clone()));
        predicates.push(Predicate::ReachesBarb(barb));
    }
    let respect = predicates
        .into_iter()
        .map(|pred| {
            let admits = |mode: Mode| rel.pairs().all(|(p, q)| mode.admits(sys.holds(p, &pred), sys.holds(q, &pred)));
            RespectFlags {
                predicate: pred.to_string(),
                preserves: admits(Mode::Preserve),
                reflects: admits(Mode::Reflect),
                respects: admits(Mode::Respect),
            }
        })
        .collect();
    RelKindReport {
        reflexive,
        symmetric,
        transitive,
        preorder: reflexive && transitive,
        equivalence: reflexive && transitive && symmetric,
        strong_bisimulation: is_simulation(SimKind::StrongBisim, sys, rel).holds(),
        weak_bisimulation: is_simulation(SimKind::WeakBisim, sys, rel).holds(),
        coupled_simulation: is_simulation(SimKind::CoupledSim, sys, rel).holds(),
        correspondence_simulation: is_simulation(SimKind::CorrespondenceSim, sys, rel).holds(),
        respect,
    }
}

/// Every correspondence simulation is contained, in both orientations, in
/// some coupled simulation. Coupled simulations are closed under union, so
/// it suffices to test containment in the greatest one.
pub fn lemma5_containment(sys: &ReductionSystem, rel: &Rel) -> Result<Verdict> {
    lemma5_containment_respecting(sys, rel, &[])
}

/// Variant for correspondence simulations that respect `constraints`: the
/// coupled simulation then preserves the same predicates, so both
/// orientations of `rel` must lie in the greatest coupled simulation that
/// preserves them.
pub fn lemma5_containment_respecting(sys: &ReductionSystem, rel: &Rel, constraints: &[Constraint]) -> Result<Verdict> {
    if !is_simulation(SimKind::CorrespondenceSim, sys, rel).holds() {
        return Err(Error::Precondition("relation is not a correspondence simulation".into()));
    }
    let mut preserving = Vec::with_capacity(constraints.len());
    for c in constraints {
        if c.mode != Mode::Respect {
            return Err(Error::Precondition(format!("constraint {c} must use respect mode")));
        }
        if !relation_respect(rel, sys, &c.selector, c.mode).holds() {
            return Err(Error::Precondition(format!("relation does not satisfy {c}")));
        }
        preserving.push(Constraint::new(c.selector.clone(), Mode::Preserve));
    }
    let coupled = greatest_relation(SimKind::CoupledSim, sys, &preserving);
    let both: BTreeSet<(usize, usize)> = rel.pairs().chain(rel.pairs().map(|(a, b)| (b, a))).collect();
    Ok(both
        .into_iter()
        .filter(|&(a, b)| !coupled.contains(a, b))
        .map(|(a, b)| {
            Counterexample::new(
                "not-coupled",
                vec![sys.name(a).to_string(), sys.name(b).to_string()],
                "pair lies in no coupled simulation",
            )
        })
        .collect())
}

/// Convenience for callers that think in terms of predicates on both sides.
pub fn respects_all(rel: &Rel, sys: &ReductionSystem, strength: Strength) -> bool {
    relation_respect(rel, sys, &Selector::all_barbs(strength), Mode::Respect).holds()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fixtures::{fixture, FixtureName};
    use crate::model::{Side, SystemSpec};
    use crate::rel::Carrier;

    fn system(states: &[&str], steps: &[(&str, &str)]) -> ReductionSystem {
        ReductionSystem::from_spec(
            &SystemSpec {
                states: states.iter().map(|s| s.to_string()).collect(),
                steps: steps.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
                ..Default::default()
            },
            "test",
        )
        .unwrap()
    }

    fn pair(sys: &ReductionSystem, a: &str, b: &str) -> (usize, usize) {
        (sys.index_of(a).unwrap(), sys.index_of(b).unwrap())
    }

    #[test]
    fn figure_two_bisimulation_verdicts() {
        let f = fixture(FixtureName::Fig2);
        let rs = &f.relations["RS"];
        let rt = &f.relations["RT"];
        assert!(is_simulation(SimKind::WeakBisim, f.instance.source(), rs).holds());
        let v = is_simulation(SimKind::WeakBisim, f.instance.target(), rt);
        assert!(!v.holds());
        let at: Vec<_> = v.counterexamples().iter().map(|c| c.states.clone()).collect();
        assert!(at.contains(&vec!["t1".to_string(), "t2".to_string()]));
        assert!(at.contains(&vec!["t2".to_string(), "t1".to_string()]));
        assert!(v.counterexamples().iter().all(|c| c.challenge == Some(("t2".into(), "t3".into()))));
    }

    #[test]
    fn identity_passes_every_kind() {
        let f = fixture(FixtureName::Fig3);
        let sys = f.instance.combined().system();
        let id = Rel::identity(Carrier::Combined, sys.len());
        for kind in SimKind::ALL {
            assert!(is_simulation(kind, sys, &id).holds(), "{kind}");
            assert!(is_simulation(kind, sys, &Rel::empty(Carrier::Combined, sys.len())).holds());
        }
    }

    #[test]
    fn figure_three_correspondence_simulation() {
        let f = fixture(FixtureName::Fig3);
        let sys = f.instance.combined().system();
        let r = &f.relations["R_corr_sim"];
        assert!(is_simulation(SimKind::CorrespondenceSim, sys, r).holds());
        assert!(relation_respect(r, sys, &Selector::all_barbs(Strength::Reaches), Mode::Respect).holds());
        assert!(!is_simulation(SimKind::WeakBisim, sys, r).holds());
        assert!(lemma5_containment(sys, r).unwrap().holds());
        let reaches = Constraint::new(Selector::all_barbs(Strength::Reaches), Mode::Respect);
        assert!(lemma5_containment_respecting(sys, r, &[reaches]).unwrap().holds());
        assert_eq!(r.inverse().inverse(), *r);
    }

    #[test]
    fn figure_one_divergence_reflection_of_pair() {
        let f = fixture(FixtureName::Fig1);
        let c = f.instance.combined();
        let (s2, t3) = pair(c.system(), "s2", "t3");
        let r = Rel::from_pairs(Carrier::Combined, c.len(), [(s2, t3)]);
        let v = relation_respect(&r, c.system(), &Selector::Divergent, Mode::Reflect);
        assert!(!v.holds());
        assert_eq!(v.counterexamples()[0].states, vec!["s2", "t3"]);
        let empty = Rel::empty(Carrier::Combined, c.len());
        for mode in Mode::ALL {
            assert!(relation_respect(&empty, c.system(), &Selector::Divergent, mode).holds());
        }
    }

    #[test]
    fn greatest_on_step_free_system_is_full() {
        let sys = system(&["a", "b", "c"], &[]);
        for kind in SimKind::ALL {
            assert_eq!(greatest_relation(kind, &sys, &[]), Rel::full(Carrier::Combined, 3));
        }
    }

    #[test]
    fn greatest_on_figure_one() {
        let f = fixture(FixtureName::Fig1);
        let sys = f.instance.combined().system();
        let g = greatest_relation(SimKind::CorrespondenceSim, sys, &[]);
        let (s1, t1) = pair(sys, "s1", "t1");
        let (s2, t3) = pair(sys, "s2", "t3");
        assert!(g.contains(s1, t1));
        assert!(g.contains(s2, t3));
    }

    #[test]
    fn greatest_on_figure_three_targets() {
        let f = fixture(FixtureName::Fig3);
        let t = f.instance.target();
        let respect = [Constraint::new(Selector::all_barbs(Strength::Reaches), Mode::Respect)];
        let preserve = [Constraint::new(Selector::all_barbs(Strength::Reaches), Mode::Preserve)];
        let (t2, t3) = pair(t, "t2", "t3");

        for cs in [&respect, &preserve] {
            let corr = greatest_relation(SimKind::CorrespondenceSim, t, cs);
            assert!(!corr.contains(t2, t3) && !corr.contains(t3, t2));
        }
        // Coupled similarity: mutual barb-preserving coupled simulation.
        let coupled = greatest_relation(SimKind::CoupledSim, t, &preserve);
        assert!(coupled.contains(t2, t3) && coupled.contains(t3, t2));
        // Requiring equal barbs at every pair rules the pair out: t2 -> t4
        // needs a partner of t4 (reaching {a,b}) among derivatives of t3.
        let strict = greatest_relation(SimKind::CoupledSim, t, &respect);
        assert!(!strict.contains(t2, t3));
    }

    #[test]
    fn lemma5_requires_correspondence_simulation() {
        let f = fixture(FixtureName::Fig2);
        let c = f.instance.combined();
        let rt = c.lift(&f.relations["RT"]);
        assert!(matches!(lemma5_containment(c.system(), &rt), Err(Error::Precondition(_))));
        let id = Rel::identity(Carrier::Combined, c.len());
        assert!(lemma5_containment(c.system(), &id).unwrap().holds());
    }

    #[test]
    fn relation_properties_on_figures() {
        let f2 = fixture(FixtureName::Fig2);
        let rep = relation_properties(&f2.relations["RS"], f2.instance.source());
        assert!(rep.reflexive && rep.symmetric && rep.transitive && rep.equivalence);

        let f1 = fixture(FixtureName::Fig1);
        let rep = relation_properties(&f1.relations["RT"], f1.instance.target());
        assert!(rep.preorder && !rep.symmetric);

        let empty = Rel::empty(Carrier::Source, 2);
        let rep = relation_properties(&empty, f1.instance.source());
        assert!(!rep.reflexive && rep.symmetric && rep.transitive);
    }

    #[test]
    fn restriction_of_combined_to_targets_drops_sources() {
        let f = fixture(FixtureName::Fig1);
        let c = f.instance.combined();
        let full = Rel::full(Carrier::Combined, c.len());
        let r = full.restrict(|i| c.is_target(i));
        assert!(r.pairs().all(|(a, b)| c.is_target(a) && c.is_target(b)));
        assert_eq!(c.project(&r, Side::Target), Rel::full(Carrier::Target, 3));
        assert!(Rel::empty(Carrier::Combined, 5).restrict(|i| c.is_target(i)).is_empty());
    }
}
