//! Canonical witness relations for the lemma catalogue.
//!
//! Every lemma has the shape "criterion holds iff some relation over the
//! combined domain satisfies a list of conditions". [`verify_lemma`]
//! evaluates the criterion, builds the canonical witness, checks the
//! conditions on it and reports whether both sides agree. Lemma
//! relations always live on the combined carrier.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::criteria::{self, require_carrier, OcVariant};
use crate::document::Bundle;
use crate::error::{Error, Result};
use crate::model::{EncodingInstance, Side};
use crate::predicate::{Constraint, Mode, Selector, Strength};
use crate::rel::{Carrier, ClosureOp, Rel};
use crate::relations::{greatest_relation, is_simulation, relation_respect, SimKind};
use crate::verdict::{Counterexample, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LemmaId {
    PredPres,
    DivRefl,
    BarbSens,
    SuccSens,
    FaPreorder,
    FaEquiv,
    OcStrong,
    OcStandard,
    OcWeak,
    CombDivSucc,
    CombTwoPred,
    CombOcSucc,
    CombOcSuccBarb,
    CombTriple,
    FaRestrict,
    FaOc,
    FaOcRsBisim,
    FaOcSurj,
    Vg12,
}

impl LemmaId {
    pub const ALL: [LemmaId; 19] = [
        LemmaId::PredPres,
        LemmaId::DivRefl,
        LemmaId::BarbSens,
        LemmaId::SuccSens,
        LemmaId::FaPreorder,
        LemmaId::FaEquiv,
        LemmaId::OcStrong,
        LemmaId::OcStandard,
        LemmaId::OcWeak,
        LemmaId::CombDivSucc,
        LemmaId::CombTwoPred,
        LemmaId::CombOcSucc,
        LemmaId::CombOcSuccBarb,
        LemmaId::CombTriple,
        LemmaId::FaRestrict,
        LemmaId::FaOc,
        LemmaId::FaOcRsBisim,
        LemmaId::FaOcSurj,
        LemmaId::Vg12,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::PredPres => "PRED-PRES",
            LemmaId::DivRefl => "DIV-REFL",
            LemmaId::BarbSens => "BARB-SENS",
            LemmaId::SuccSens => "SUCC-SENS",
            LemmaId::FaPreorder => "FA-PREORDER",
            LemmaId::FaEquiv => "FA-EQUIV",
            LemmaId::OcStrong => "OC-STRONG",
            LemmaId::OcStandard => "OC-STANDARD",
            LemmaId::OcWeak => "OC-WEAK",
            LemmaId::CombDivSucc => "COMB-DIV-SUCC",
            LemmaId::CombTwoPred => "COMB-TWO-PRED",
            LemmaId::CombOcSucc => "COMB-OC-SUCC",
            LemmaId::CombOcSuccBarb => "COMB-OC-SUCC-BARB",
            LemmaId::CombTriple => "COMB-TRIPLE",
            LemmaId::FaRestrict => "FA-RESTRICT",
            LemmaId::FaOc => "FA-OC",
            LemmaId::FaOcRsBisim => "FA-OC-RS-BISIM",
            LemmaId::FaOcSurj => "FA-OC-SURJ",
            LemmaId::Vg12 => "VG12",
        }
    }

    /// Which relation arguments the lemma reads.
    pub fn uses_source_relation(self) -> bool {
        matches!(
            self,
            LemmaId::FaPreorder
                | LemmaId::FaEquiv
                | LemmaId::FaRestrict
                | LemmaId::FaOc
                | LemmaId::FaOcRsBisim
                | LemmaId::FaOcSurj
        )
    }

    pub fn uses_target_relation(self) -> bool {
        self.uses_source_relation() || self.oc_variant_default().is_some()
    }

    pub fn oc_variant_default(self) -> Option<OcVariant> {
        match self {
            LemmaId::OcStrong => Some(OcVariant::Strong),
            LemmaId::OcStandard | LemmaId::CombTriple => Some(OcVariant::Standard),
            LemmaId::OcWeak | LemmaId::CombOcSucc | LemmaId::CombOcSuccBarb => Some(OcVariant::Weak),
            _ => None,
        }
    }

    /// Whether the variant is a parameter of the lemma rather than fixed by it.
    pub fn takes_variant(self) -> bool {
        matches!(self, LemmaId::CombOcSucc | LemmaId::CombOcSuccBarb | LemmaId::CombTriple)
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL.into_iter().find(|l| l.as_str() == s).ok_or_else(|| Error::UnknownLemma(s.to_string()))
    }
}

impl Serialize for LemmaId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// The simulation kind and success/barb strength matching an operational
/// correspondence variant.
pub fn variant_profile(variant: OcVariant) -> (SimKind, Strength) {
    match variant {
        OcVariant::Strong => (SimKind::StrongBisim, Strength::Has),
        OcVariant::Standard => (SimKind::WeakBisim, Strength::Reaches),
        OcVariant::Weak => (SimKind::CorrespondenceSim, Strength::Reaches),
    }
}

/// Arguments of a lemma. Unset fields take the lemma's default.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LemmaArgs {
    /// Relation over the source states.
    pub rs: Option<Rel>,
    /// Relation over the target states. OC-family lemmas default to the
    /// greatest target relation admitted by their preconditions.
    pub rt: Option<Rel>,
    /// Combined relation for FA-RESTRICT; defaults to
    /// `trans(RS ∪ RT ∪ {(S,[S]),([S],S)})`.
    pub r: Option<Rel>,
    /// OC variant for COMB-OC-SUCC (default weak), COMB-OC-SUCC-BARB (weak)
    /// and COMB-TRIPLE (standard).
    pub variant: Option<OcVariant>,
    /// Mode for BARB-SENS (default respect).
    pub mode: Option<Mode>,
    /// Strength for BARB-SENS and SUCC-SENS (default reaches).
    pub strength: Option<Strength>,
    /// PRED-PRES uses the first (default `has-barb:preserve`), COMB-TWO-PRED
    /// the first two (default `divergent:reflect`, `reaches-barb:respect`),
    /// VG12 all of them.
    pub constraints: Vec<Constraint>,
    /// Relation kind for VG12 (default weak-bisim).
    pub kind: Option<SimKind>,
}

impl LemmaArgs {
    /// Takes `RS`, `RT` and `R` from the bundle when present.
    pub fn from_bundle(bundle: &Bundle) -> Self {
        LemmaArgs {
            rs: bundle.relations.get("RS").cloned(),
            rt: bundle.relations.get("RT").cloned(),
            r: bundle.relations.get("R").cloned(),
            ..Default::default()
        }
    }
}

/// A named verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: Verdict) -> Self {
        Check { name: name.into(), verdict }
    }

    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// lhs holds iff the rhs holds.
    Iff,
    /// lhs implies rhs.
    Implies,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub lemma: LemmaId,
    pub shape: Shape,
    #[serde(skip)]
    pub witness: Option<Rel>,
    #[serde(rename = "witness")]
    pub witness_pairs: Option<Vec<(String, String)>>,
    pub preconditions: Vec<Check>,
    pub lhs: Vec<Check>,
    pub rhs: Vec<Check>,
    pub lhs_holds: bool,
    pub rhs_holds: bool,
    /// Whether lhs and rhs are related as the lemma's shape claims.
    pub consistent: bool,
}

/// One right-hand-side condition on a combined relation `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `(S,[S]) in R` for every source state.
    ContainsEncoding,
    /// `(S,[S])` and `([S],S)` in R.
    ContainsBoth,
    /// `R` restricted to one side equals the given side relation.
    RestrictsTo(Side, Rel),
    /// `sym(R)` restricted to one side equals the given side relation.
    SymRestrictsTo(Side, Rel),
    /// `(S,T) in R` implies `([S],T) in RT` for source `S`, target `T`.
    TranslationBound(Rel),
    Transitive,
    Preorder,
    /// `sym(R)` is a preorder.
    SymPreorder,
    Simulation(SimKind),
    Respects(Constraint),
    /// `([S1],[S2]) in RT` iff `([S1],[S2]) in R`.
    Agreement(Rel),
    /// A fact that does not depend on `R`.
    Fixed(String, Verdict),
}

impl Condition {
    pub fn name(&self) -> String {
        match self {
            Condition::ContainsEncoding => "contains-encoding".into(),
            Condition::ContainsBoth => "contains-both-orientations".into(),
            Condition::RestrictsTo(side, _) => format!("restriction-to-{side}"),
            Condition::SymRestrictsTo(side, _) => format!("sym-restriction-to-{side}"),
            Condition::TranslationBound(_) => "translation-bound".into(),
            Condition::Transitive => "transitive".into(),
            Condition::Preorder => "preorder".into(),
            Condition::SymPreorder => "sym-preorder".into(),
            Condition::Simulation(kind) => format!("simulation({kind})"),
            Condition::Respects(c) => format!("respects({c})"),
            Condition::Agreement(_) => "agreement-on-translations".into(),
            Condition::Fixed(name, _) => name.clone(),
        }
    }

    pub fn evaluate(&self, enc: &EncodingInstance, r: &Rel) -> Verdict {
        let c = enc.combined();
        let sys = c.system();
        let name = |i: usize| sys.name(i).to_string();
        match self {
            Condition::ContainsEncoding | Condition::ContainsBoth => {
                let both = matches!(self, Condition::ContainsBoth);
                let mut out = Vec::new();
                for s in c.source_indices() {
                    let t = enc.translate_combined(s);
                    let mut missing = vec![];
                    if !r.contains(s, t) {
                        missing.push((s, t));
                    }
                    if both && !r.contains(t, s) {
                        missing.push((t, s));
                    }
                    for (a, b) in missing {
                        out.push(Counterexample::new(
                            "missing-pair",
                            vec![name(a), name(b)],
                            format!("({},{}) is not in R", name(a), name(b)),
                        ));
                    }
                }
                Verdict::from_counterexamples(out)
            }
            Condition::RestrictsTo(side, expected) | Condition::SymRestrictsTo(side, expected) => {
                let base =
                    if matches!(self, Condition::SymRestrictsTo(..)) { r.closure(ClosureOp::Sym) } else { r.clone() };
                let got = c.project(&base, *side);
                let lifted = c.lift(expected);
                let got_lifted = c.lift(&got);
                let (extra_rel, missing_rel) = (got_lifted.difference(&lifted), lifted.difference(&got_lifted));
                let extra = extra_rel.pairs().map(|(a, b)| {
                    Counterexample::new(
                        "extra-pair",
                        vec![name(a), name(b)],
                        format!("({},{}) is in the restriction but not in the {side} relation", name(a), name(b)),
                    )
                });
                let missing = missing_rel.pairs().map(|(a, b)| {
                    Counterexample::new(
                        "missing-pair",
                        vec![name(a), name(b)],
                        format!("({},{}) is in the {side} relation but not in the restriction", name(a), name(b)),
                    )
                });
                extra.chain(missing).collect()
            }
            Condition::TranslationBound(rt) => {
                let rt = c.lift(rt);
                r.pairs()
                    .filter(|&(s, t)| c.is_source(s) && c.is_target(t))
                    .filter(|&(s, t)| !rt.contains(enc.translate_combined(s), t))
                    .map(|(s, t)| {
                        let ts = enc.translate_combined(s);
                        Counterexample::new(
                            "unbounded-pair",
                            vec![name(s), name(t)],
                            format!("({},{}) in R but ({},{}) not in RT", name(s), name(t), name(ts), name(t)),
                        )
                    })
                    .collect()
            }
            Condition::Transitive => transitivity_failures(r, &name),
            Condition::Preorder => reflexivity_failures(r, &name).and(transitivity_failures(r, &name)),
            Condition::SymPreorder => {
                let s = r.closure(ClosureOp::Sym);
                reflexivity_failures(&s, &name).and(transitivity_failures(&s, &name))
            }
            Condition::Simulation(kind) => is_simulation(*kind, sys, r),
            Condition::Respects(con) => relation_respect(r, sys, &con.selector, con.mode),
            Condition::Agreement(rt) => {
                let rt = c.lift(rt);
                let mut out = Vec::new();
                for s1 in c.source_indices() {
                    for s2 in c.source_indices() {
                        let (t1, t2) = (enc.translate_combined(s1), enc.translate_combined(s2));
                        if rt.contains(t1, t2) != r.contains(t1, t2) {
                            out.push(Counterexample::new(
                                "disagreement",
                                vec![name(t1), name(t2)],
                                format!("RT and R disagree on ({},{})", name(t1), name(t2)),
                            ));
                        }
                    }
                }
                Verdict::from_counterexamples(out)
            }
            Condition::Fixed(_, v) => v.clone(),
        }
    }

    /// Whether the condition's value is the same for every relation.
    pub fn is_fixed(&self) -> bool {
        matches!(self, Condition::Fixed(..))
    }
}

fn reflexivity_failures(r: &Rel, name: &dyn Fn(usize) -> String) -> Verdict {
    (0..r.size())
        .filter(|&i| !r.contains(i, i))
        .map(|i| Counterexample::new("not-reflexive", vec![name(i)], format!("({},{}) missing", name(i), name(i))))
        .collect()
}

fn transitivity_failures(r: &Rel, name: &dyn Fn(usize) -> String) -> Verdict {
    let closed = r.closure(ClosureOp::Trans);
    closed
        .difference(r)
        .pairs()
        .map(|(a, b)| {
            Counterexample::new(
                "not-transitive",
                vec![name(a), name(b)],
                format!("({},{}) follows by transitivity but is missing", name(a), name(b)),
            )
        })
        .collect()
}

/// `{(S,[S])}` over the combined carrier.
pub fn minimal_witness(enc: &EncodingInstance) -> Rel {
    let c = enc.combined();
    Rel::from_pairs(Carrier::Combined, c.len(), c.source_indices().map(|s| (s, enc.translate_combined(s))))
}

/// `trans(refl(minimal ∪ RT))` over the combined carrier.
pub fn oc_witness(enc: &EncodingInstance, rt: &Rel) -> Result<Rel> {
    require_carrier(rt, Carrier::Target, enc, "RT")?;
    let base = minimal_witness(enc).union(&enc.combined().lift(rt));
    Ok(base.closed_under(&[ClosureOp::Refl, ClosureOp::Trans]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaVersion {
    Preorder,
    Equivalence,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaWitness {
    /// The witness the lemma's conditions are checked on.
    pub relation: Rel,
    /// `RS ∪ RT ∪ minimal` before any closure.
    pub core: Rel,
}

/// Preorder version: `trans(RS ∪ RT ∪ {(S,[S]),([S],S)})`. Equivalence
/// version: `trans(sym(refl(RS ∪ RT ∪ minimal)))`.
pub fn fa_witness(enc: &EncodingInstance, rs: &Rel, rt: &Rel, version: FaVersion) -> Result<FaWitness> {
    require_carrier(rs, Carrier::Source, enc, "RS")?;
    require_carrier(rt, Carrier::Target, enc, "RT")?;
    let ok = match version {
        FaVersion::Preorder => rs.is_preorder() && rt.is_preorder(),
        FaVersion::Equivalence => rs.is_equivalence() && rt.is_equivalence(),
    };
    if !ok {
        let what = if version == FaVersion::Preorder { "preorders" } else { "equivalences" };
        return Err(Error::Precondition(format!("RS and RT must be {what}")));
    }
    Ok(fa_witness_unchecked(enc, rs, rt, version))
}

fn fa_witness_unchecked(enc: &EncodingInstance, rs: &Rel, rt: &Rel, version: FaVersion) -> FaWitness {
    let c = enc.combined();
    let min = minimal_witness(enc);
    let core = c.lift(rs).union(&c.lift(rt)).union(&min);
    let relation = match version {
        FaVersion::Preorder => core.union(&min.inverse()).closure(ClosureOp::Trans),
        FaVersion::Equivalence => core.closed_under(&[ClosureOp::Refl, ClosureOp::Sym, ClosureOp::Trans]),
    };
    FaWitness { relation, core }
}

/// The default relation of FA-RESTRICT.
pub fn fa_restrict_default(enc: &EncodingInstance, rs: &Rel, rt: &Rel) -> Result<Rel> {
    require_carrier(rs, Carrier::Source, enc, "RS")?;
    require_carrier(rt, Carrier::Target, enc, "RT")?;
    Ok(fa_witness_unchecked(enc, rs, rt, FaVersion::Preorder).relation)
}

/// Both sides of the restriction lemma: `RS = R|source` and agreement of
/// `RT` and `R` on translated pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SidesAgreement {
    pub left: bool,
    pub right: bool,
}

impl SidesAgreement {
    pub fn agree(&self) -> bool {
        self.left == self.right
    }

    pub fn verdict(&self) -> Verdict {
        if self.agree() {
            Verdict::pass()
        } else {
            Verdict::fail(Counterexample::new(
                "sides-disagree",
                vec![],
                format!("left side {} but right side {}", self.left, self.right),
            ))
        }
    }
}

pub fn fa_restriction_equiv(enc: &EncodingInstance, rs: &Rel, rt: &Rel, r: &Rel) -> Result<SidesAgreement> {
    require_carrier(r, Carrier::Combined, enc, "R")?;
    if !criteria::full_abstraction(enc, rs, rt)?.holds() {
        return Err(Error::Precondition("the encoding is not fully abstract w.r.t. RS and RT".into()));
    }
    if !r.is_transitive() {
        return Err(Error::Precondition("R is not transitive".into()));
    }
    if !Condition::ContainsBoth.evaluate(enc, r).holds() {
        return Err(Error::Precondition("R lacks (S,[S]) or ([S],S) for some S".into()));
    }
    Ok(SidesAgreement {
        left: Condition::RestrictsTo(Side::Source, rs.clone()).evaluate(enc, r).holds(),
        right: Condition::Agreement(rt.clone()).evaluate(enc, r).holds(),
    })
}

/// Every source state is related to its translation by the greatest
/// relation of `kind` over the combined domain satisfying `constraints`.
pub fn vg12_check(enc: &EncodingInstance, kind: SimKind, constraints: &[Constraint]) -> Verdict {
    let c = enc.combined();
    let g = greatest_relation(kind, c.system(), constraints);
    c.source_indices()
        .filter(|&s| !g.contains(s, enc.translate_combined(s)))
        .map(|s| {
            let (sn, tn) = (c.system().name(s), c.system().name(enc.translate_combined(s)));
            Counterexample::new(
                "unrelated",
                vec![sn.to_string(), tn.to_string()],
                format!("no {kind} satisfying the constraints relates {sn} and {tn}"),
            )
        })
        .collect()
}

/// The target relation OC-family lemmas use when none is given: the
/// greatest target relation of the lemma's kind satisfying its constraints.
pub fn default_target_relation(lemma: LemmaId, enc: &EncodingInstance, variant: Option<OcVariant>) -> Option<Rel> {
    let variant = variant.or(lemma.oc_variant_default())?;
    let (kind, strength) = variant_profile(variant);
    let constraints = target_constraints(lemma, strength);
    let g = greatest_relation(kind, enc.target(), &constraints);
    Some(g.with_carrier(Carrier::Target))
}

pub(crate) fn target_constraints(lemma: LemmaId, strength: Strength) -> Vec<Constraint> {
    let mut cs = Vec::new();
    if matches!(lemma, LemmaId::CombOcSucc | LemmaId::CombOcSuccBarb | LemmaId::CombTriple) {
        cs.push(Constraint::new(Selector::success(strength), Mode::Respect));
    }
    if lemma == LemmaId::CombOcSuccBarb {
        cs.push(Constraint::new(Selector::all_barbs(strength), Mode::Respect));
    }
    if lemma == LemmaId::CombTriple {
        cs.push(Constraint::new(Selector::Divergent, Mode::Reflect));
    }
    cs
}

/// Everything needed to evaluate a lemma on an instance.
#[derive(Clone, Debug)]
pub struct LemmaPlan {
    pub lemma: LemmaId,
    pub shape: Shape,
    pub preconditions: Vec<Check>,
    pub lhs: Vec<Check>,
    pub witness: Option<Rel>,
    pub rhs: Vec<Condition>,
}

impl LemmaPlan {
    pub fn preconditions_hold(&self) -> bool {
        self.preconditions.iter().all(Check::holds)
    }

    pub fn lhs_holds(&self) -> bool {
        self.lhs.iter().all(Check::holds)
    }

    pub fn rhs_holds_for(&self, enc: &EncodingInstance, r: &Rel) -> bool {
        self.rhs.iter().all(|c| c.evaluate(enc, r).holds())
    }
}

fn bool_check(name: &str, ok: bool, detail: &str) -> Check {
    let v = if ok { Verdict::pass() } else { Verdict::fail(Counterexample::new(name, vec![], detail)) };
    Check::new(name, v)
}

fn kind_checks(label: &str, rel: &Rel, preorder: bool, equivalence: bool) -> Vec<Check> {
    let mut out = Vec::new();
    if preorder {
        out.push(bool_check(&format!("{label} preorder"), rel.is_preorder(), &format!("{label} is not a preorder")));
    }
    if equivalence {
        out.push(bool_check(
            &format!("{label} equivalence"),
            rel.is_equivalence(),
            &format!("{label} is not an equivalence"),
        ));
    }
    out
}

fn need<'a>(rel: &'a Option<Rel>, label: &str, lemma: LemmaId) -> Result<&'a Rel> {
    rel.as_ref().ok_or_else(|| Error::Usage(format!("{lemma} needs a relation {label}")))
}

fn respects(selector: Selector, mode: Mode) -> Condition {
    Condition::Respects(Constraint::new(selector, mode))
}

/// Builds the preconditions, lhs, canonical witness and rhs conditions of
/// `lemma` on `enc`. Precondition failures are recorded, not raised.
pub fn plan_lemma(lemma: LemmaId, enc: &EncodingInstance, args: &LemmaArgs) -> Result<LemmaPlan> {
    let c = enc.combined();
    let mut plan = LemmaPlan {
        lemma,
        shape: Shape::Iff,
        preconditions: Vec::new(),
        lhs: Vec::new(),
        witness: None,
        rhs: Vec::new(),
    };
    let strength = args.strength.unwrap_or(Strength::Reaches);
    match lemma {
        LemmaId::PredPres
        | LemmaId::DivRefl
        | LemmaId::BarbSens
        | LemmaId::SuccSens
        | LemmaId::CombDivSucc
        | LemmaId::CombTwoPred => {
            let constraints: Vec<Constraint> = match lemma {
                LemmaId::PredPres => vec![args
                    .constraints
                    .first()
                    .cloned()
                    .unwrap_or_else(|| Constraint::new(Selector::all_barbs(Strength::Has), Mode::Preserve))],
                LemmaId::DivRefl => vec![Constraint::new(Selector::Divergent, Mode::Reflect)],
                LemmaId::BarbSens => {
                    vec![Constraint::new(Selector::all_barbs(strength), args.mode.unwrap_or(Mode::Respect))]
                }
                LemmaId::SuccSens => vec![Constraint::new(Selector::success(strength), Mode::Respect)],
                LemmaId::CombDivSucc => vec![
                    Constraint::new(Selector::Divergent, Mode::Reflect),
                    Constraint::new(Selector::success(Strength::Reaches), Mode::Respect),
                ],
                _ => {
                    let mut cs: Vec<Constraint> = args.constraints.iter().take(2).cloned().collect();
                    let defaults = [
                        Constraint::new(Selector::Divergent, Mode::Reflect),
                        Constraint::new(Selector::all_barbs(Strength::Reaches), Mode::Respect),
                    ];
                    while cs.len() < 2 {
                        cs.push(defaults[cs.len()].clone());
                    }
                    cs
                }
            };
            for con in &constraints {
                plan.lhs.push(Check::new(
                    format!("encoding {} {}", con.mode, con.selector),
                    criteria::check_pred_criterion(enc, &con.selector, con.mode),
                ));
            }
            plan.witness = Some(minimal_witness(enc));
            plan.rhs.push(Condition::ContainsEncoding);
            plan.rhs.extend(constraints.into_iter().map(Condition::Respects));
        }
        LemmaId::FaPreorder | LemmaId::FaEquiv => {
            let rs = need(&args.rs, "RS", lemma)?;
            let rt = need(&args.rt, "RT", lemma)?;
            let version = if lemma == LemmaId::FaPreorder { FaVersion::Preorder } else { FaVersion::Equivalence };
            let eq = version == FaVersion::Equivalence;
            plan.preconditions.extend(kind_checks("RS", rs, !eq, eq));
            plan.preconditions.extend(kind_checks("RT", rt, !eq, eq));
            plan.lhs.push(Check::new("full abstraction", criteria::full_abstraction(enc, rs, rt)?));
            plan.witness = Some(fa_witness_unchecked(enc, rs, rt, version).relation);
            if eq {
                plan.rhs = vec![
                    Condition::ContainsEncoding,
                    Condition::SymRestrictsTo(Side::Source, rs.clone()),
                    Condition::SymRestrictsTo(Side::Target, rt.clone()),
                    Condition::SymPreorder,
                ];
            } else {
                plan.rhs = vec![
                    Condition::ContainsBoth,
                    Condition::RestrictsTo(Side::Source, rs.clone()),
                    Condition::RestrictsTo(Side::Target, rt.clone()),
                    Condition::Transitive,
                ];
            }
        }
        LemmaId::OcStrong
        | LemmaId::OcStandard
        | LemmaId::OcWeak
        | LemmaId::CombOcSucc
        | LemmaId::CombOcSuccBarb
        | LemmaId::CombTriple => {
            let variant = if lemma.takes_variant() {
                args.variant.or(lemma.oc_variant_default()).expect("OC lemmas have a variant")
            } else {
                lemma.oc_variant_default().expect("OC lemmas have a variant")
            };
            let (kind, strength) = variant_profile(variant);
            let rt = match &args.rt {
                Some(rt) => rt.clone(),
                None => default_target_relation(lemma, enc, Some(variant)).expect("OC lemma"),
            };
            require_carrier(&rt, Carrier::Target, enc, "RT")?;
            let tgt = enc.target();
            plan.preconditions.extend(kind_checks("RT", &rt, true, false));
            plan.preconditions.push(Check::new(format!("RT {kind}"), is_simulation(kind, tgt, &rt)));
            for con in target_constraints(lemma, strength) {
                plan.preconditions.push(Check::new(
                    format!("RT {} {}", con.mode, con.selector),
                    relation_respect(&rt, tgt, &con.selector, con.mode),
                ));
            }
            if lemma == LemmaId::CombTriple {
                plan.lhs.push(Check::new("divergence reflection", criteria::divergence_reflection(enc)));
            }
            if matches!(lemma, LemmaId::CombOcSucc | LemmaId::CombOcSuccBarb | LemmaId::CombTriple) {
                plan.lhs.push(Check::new(
                    format!("success sensitiveness ({strength})"),
                    criteria::success_sensitiveness(enc, strength),
                ));
            }
            if lemma == LemmaId::CombOcSuccBarb {
                plan.lhs.push(Check::new(
                    format!("barb sensitiveness (respect, {strength})"),
                    criteria::barb_sensitiveness(enc, Mode::Respect, strength),
                ));
            }
            plan.lhs.push(Check::new(
                format!("operational correspondence ({variant})"),
                criteria::operational_correspondence(enc, &rt, variant)?,
            ));
            plan.witness = Some(oc_witness(enc, &rt)?);
            plan.rhs = vec![
                Condition::ContainsEncoding,
                Condition::RestrictsTo(Side::Target, rt.clone()),
                Condition::TranslationBound(rt.clone()),
                Condition::Preorder,
                Condition::Simulation(kind),
            ];
            if lemma == LemmaId::CombTriple {
                plan.rhs.push(respects(Selector::Divergent, Mode::Reflect));
            }
            if matches!(lemma, LemmaId::CombOcSucc | LemmaId::CombOcSuccBarb | LemmaId::CombTriple) {
                plan.rhs.push(respects(Selector::success(strength), Mode::Respect));
            }
            if lemma == LemmaId::CombOcSuccBarb {
                plan.rhs.push(respects(Selector::all_barbs(strength), Mode::Respect));
            }
        }
        LemmaId::FaRestrict => {
            let rs = need(&args.rs, "RS", lemma)?;
            let rt = need(&args.rt, "RT", lemma)?;
            let r = match &args.r {
                Some(r) => r.clone(),
                None => fa_restrict_default(enc, rs, rt)?,
            };
            require_carrier(&r, Carrier::Combined, enc, "R")?;
            plan.preconditions.push(Check::new("full abstraction", criteria::full_abstraction(enc, rs, rt)?));
            plan.preconditions.push(Check::new("R transitive", Condition::Transitive.evaluate(enc, &r)));
            plan.preconditions
                .push(Check::new("R contains both orientations", Condition::ContainsBoth.evaluate(enc, &r)));
            plan.lhs.push(Check::new(
                "RS = R restricted to source",
                Condition::RestrictsTo(Side::Source, rs.clone()).evaluate(enc, &r),
            ));
            plan.witness = Some(r);
            plan.rhs = vec![Condition::Agreement(rt.clone())];
        }
        LemmaId::FaOc | LemmaId::FaOcRsBisim | LemmaId::FaOcSurj => {
            let rs = need(&args.rs, "RS", lemma)?;
            let rt = need(&args.rt, "RT", lemma)?;
            plan.preconditions.extend(kind_checks("RS", rs, false, true));
            plan.preconditions.extend(kind_checks("RT", rt, false, true));
            let fa = Check::new("full abstraction", criteria::full_abstraction(enc, rs, rt)?);
            let oc = Check::new(
                "operational correspondence (standard)",
                criteria::operational_correspondence(enc, rt, OcVariant::Standard)?,
            );
            let rs_bisim = Check::new("RS weak-bisim", is_simulation(SimKind::WeakBisim, enc.source(), rs));
            let rt_bisim = Check::new("RT weak-bisim", is_simulation(SimKind::WeakBisim, enc.target(), rt));
            match lemma {
                LemmaId::FaOc => {
                    plan.lhs = vec![fa, oc, rt_bisim];
                    let both = minimal_witness(enc).union(&minimal_witness(enc).inverse());
                    let w = both.union(&c.lift(rt)).closed_under(&[ClosureOp::Refl, ClosureOp::Trans]);
                    plan.witness = Some(w);
                    plan.rhs = vec![
                        Condition::ContainsBoth,
                        Condition::RestrictsTo(Side::Source, rs.clone()),
                        Condition::RestrictsTo(Side::Target, rt.clone()),
                        Condition::Transitive,
                        Condition::Simulation(SimKind::WeakBisim),
                    ];
                }
                LemmaId::FaOcRsBisim => {
                    plan.shape = Shape::Implies;
                    plan.preconditions.extend([fa, oc]);
                    plan.lhs = vec![rt_bisim];
                    plan.rhs = vec![Condition::Fixed(rs_bisim.name, rs_bisim.verdict)];
                }
                _ => {
                    plan.preconditions.push(Check::new("surjective", criteria::is_surjective(enc)));
                    plan.preconditions.extend([fa, oc]);
                    plan.lhs = vec![rs_bisim];
                    plan.rhs = vec![Condition::Fixed(rt_bisim.name, rt_bisim.verdict)];
                }
            }
        }
        LemmaId::Vg12 => {
            let kind = args.kind.unwrap_or(SimKind::WeakBisim);
            let cs = &args.constraints;
            plan.preconditions.push(bool_check(
                "constraints use respect mode",
                cs.iter().all(|c| c.mode == Mode::Respect),
                "every VG12 constraint must use respect mode",
            ));
            plan.lhs.push(Check::new(format!("source related to translation by {kind}"), vg12_check(enc, kind, cs)));
            plan.witness = Some(greatest_relation(kind, c.system(), cs));
            plan.rhs.push(Condition::ContainsEncoding);
            plan.rhs.push(Condition::Simulation(kind));
            plan.rhs.extend(cs.iter().cloned().map(Condition::Respects));
            if let Some(cond) = vg12_consequence(enc, kind, cs)? {
                plan.rhs.push(cond);
            }
        }
    }
    Ok(plan)
}

/// The operational correspondence VG12 yields for `kind`: strong OC w.r.t.
/// strong bisimilarity, standard OC w.r.t. weak bisimilarity, weak OC w.r.t.
/// coupled similarity. Coupled similarity is the symmetric part of the
/// greatest coupled simulation preserving the constraints' predicates.
fn vg12_consequence(enc: &EncodingInstance, kind: SimKind, cs: &[Constraint]) -> Result<Option<Condition>> {
    let tgt = enc.target();
    let (variant, rt, label) = match kind {
        SimKind::StrongBisim => {
            (OcVariant::Strong, greatest_relation(kind, tgt, cs), "strong OC w.r.t. strong bisimilarity")
        }
        SimKind::WeakBisim => {
            (OcVariant::Standard, greatest_relation(kind, tgt, cs), "standard OC w.r.t. weak bisimilarity")
        }
        SimKind::CorrespondenceSim => {
            let preserving: Vec<Constraint> =
                cs.iter().map(|c| Constraint::new(c.selector.clone(), Mode::Preserve)).collect();
            let g = greatest_relation(SimKind::CoupledSim, tgt, &preserving);
            (OcVariant::Weak, g.intersection(&g.inverse()), "weak OC w.r.t. coupled similarity")
        }
        SimKind::CoupledSim => return Ok(None),
    };
    let rt = rt.with_carrier(Carrier::Target);
    let verdict = criteria::operational_correspondence(enc, &rt, variant)?;
    Ok(Some(Condition::Fixed(format!("consequence: {label}"), verdict)))
}

/// Checks the lemma's preconditions, evaluates both sides on the
/// canonical witness and reports whether they agree.
pub fn verify_lemma(lemma: LemmaId, enc: &EncodingInstance, args: &LemmaArgs) -> Result<WitnessReport> {
    let plan = plan_lemma(lemma, enc, args)?;
    if !plan.preconditions_hold() {
        let failed: Vec<String> = plan.preconditions.iter().filter(|c| !c.holds()).map(|c| c.name.clone()).collect();
        return Err(Error::Precondition(format!("{lemma}: {} failed", failed.join(", "))));
    }
    Ok(report_from_plan(enc, plan))
}

pub(crate) fn report_from_plan(enc: &EncodingInstance, plan: LemmaPlan) -> WitnessReport {
    let placeholder = Rel::empty(Carrier::Combined, enc.combined().len());
    let on = plan.witness.as_ref().unwrap_or(&placeholder);
    let rhs: Vec<Check> = plan.rhs.iter().map(|c| Check::new(c.name(), c.evaluate(enc, on))).collect();
    let lhs_holds = plan.lhs_holds();
    let rhs_holds = rhs.iter().all(Check::holds);
    let consistent = match plan.shape {
        Shape::Iff => lhs_holds == rhs_holds,
        Shape::Implies => !lhs_holds || rhs_holds,
    };
    let names = enc.carrier_names(Carrier::Combined);
    WitnessReport {
        lemma: plan.lemma,
        shape: plan.shape,
        witness_pairs: plan.witness.as_ref().map(|w| w.named_pairs(names)),
        witness: plan.witness,
        preconditions: plan.preconditions,
        lhs: plan.lhs,
        rhs,
        lhs_holds,
        rhs_holds,
        consistent,
    }
}

/// Checks the lemma's right-hand side on a user-supplied combined relation.
/// Preconditions are not gated: the if-direction needs none.
pub fn verify_rhs_only(lemma: LemmaId, enc: &EncodingInstance, args: &LemmaArgs, r: &Rel) -> Result<Verdict> {
    require_carrier(r, Carrier::Combined, enc, "R")?;
    let plan = plan_lemma(lemma, enc, args)?;
    if plan.witness.is_none() {
        return Err(Error::Precondition(format!("{lemma} has no relational right-hand side")));
    }
    Ok(plan
        .rhs
        .iter()
        .flat_map(|cond| {
            let name = cond.name();
            cond.evaluate(enc, r).counterexamples().to_vec().into_iter().map(move |mut cx| {
                cx.kind = format!("{name}/{}", cx.kind);
                cx
            })
        })
        .collect())
}
