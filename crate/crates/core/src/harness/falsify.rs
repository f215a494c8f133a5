//! Randomized falsification of the lemma catalogue.
//!
//! For each instance the lemma's arguments are drawn from a stream of their
//! own, preconditions are checked, and the bi-implication is evaluated on
//! the canonical witness. Lemmas with a relational right-hand side are also
//! probed in the if-direction: perturbed witnesses that satisfy the
//! right-hand side must imply the left-hand side.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::OcVariant;
use crate::document::{emit, Bundle};
use crate::error::Result;
use crate::harness::generate::{generate, pullback, repair, GenConfig, Generated};
use crate::predicate::{Constraint, Mode, Selector, Strength};
use crate::rel::{Carrier, ClosureOp, Rel};
use crate::relations::{greatest_relation, SimKind};
use crate::witness::{plan_lemma, report_from_plan, target_constraints, variant_profile, LemmaArgs, LemmaId, Shape};

const PRE: &[ClosureOp] = &[ClosureOp::Refl, ClosureOp::Trans];
const EQ: &[ClosureOp] = &[ClosureOp::Refl, ClosureOp::Sym, ClosureOp::Trans];

/// Perturbed witnesses tried per instance when the left-hand side fails.
const PERTURBATIONS: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub index: u64,
    /// `bi-implication` or `if-direction`.
    pub check: String,
    pub detail: String,
    /// Non-relational lemma arguments, as CLI flags.
    pub flags: String,
    /// The instance with the relations used, in the instance file format.
    pub dump: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FalsifyReport {
    pub lemma: LemmaId,
    pub attempted: u64,
    /// Instances whose relation candidates could not be repaired.
    pub skipped: u64,
    pub preconditions_held: u64,
    pub lhs_true: u64,
    /// Perturbed witnesses checked in the if-direction.
    pub if_direction_checks: u64,
    pub discrepancies: Vec<Discrepancy>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl FalsifyReport {
    fn new(lemma: LemmaId) -> Self {
        FalsifyReport {
            lemma,
            attempted: 0,
            skipped: 0,
            preconditions_held: 0,
            lhs_true: 0,
            if_direction_checks: 0,
            discrepancies: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }
}

enum Outcome {
    Skipped,
    PreconditionFailed,
    Checked { lhs: bool, if_checks: u64, discrepancies: Vec<Discrepancy> },
}

fn random_selector(rng: &mut impl Rng, barbs: &[String]) -> Selector {
    let strength = if rng.gen_bool(0.5) { Strength::Has } else { Strength::Reaches };
    match rng.gen_range(0..4) {
        0 => Selector::Divergent,
        1 => Selector::Success(strength),
        2 if !barbs.is_empty() => Selector::Barb(strength, Some(barbs.choose(rng).expect("non-empty").clone())),
        _ => Selector::Barb(strength, None),
    }
}

fn random_mode(rng: &mut impl Rng) -> Mode {
    *Mode::ALL.choose(rng).expect("non-empty")
}

fn random_constraint(rng: &mut impl Rng, barbs: &[String]) -> Constraint {
    Constraint::new(random_selector(rng, barbs), random_mode(rng))
}

/// CLI flags reproducing the non-relational arguments.
fn flags(args: &LemmaArgs) -> String {
    let mut out = Vec::new();
    if let Some(v) = args.variant {
        out.push(format!("--variant {v}"));
    }
    if let Some(m) = args.mode {
        out.push(format!("--mode {m}"));
    }
    if let Some(s) = args.strength {
        out.push(format!("--strength {s}"));
    }
    if let Some(k) = args.kind {
        out.push(format!("--kind {k}"));
    }
    for c in &args.constraints {
        out.push(format!("--respect {c}"));
    }
    out.join(" ")
}

fn dump(g: &Generated, args: &LemmaArgs, r: Option<&Rel>) -> String {
    let mut b = Bundle::new(g.bundle.instance.clone());
    for (name, rel) in [("RS", args.rs.as_ref()), ("RT", args.rt.as_ref()), ("R", r.or(args.r.as_ref()))] {
        if let Some(rel) = rel {
            b.relations.insert(name.into(), rel.clone());
        }
    }
    emit(&b)
}

/// Draws the lemma's arguments for instance `g`. `None` when repair fails.
pub fn draw_args(lemma: LemmaId, g: &Generated, config: &GenConfig, rng: &mut impl Rng) -> Option<LemmaArgs> {
    let enc = &g.bundle.instance;
    let tgt = enc.target();
    let rs_cand = &g.bundle.relations["RS"];
    let rt_cand = &g.bundle.relations["RT"];
    let barbs = &config.barbs;
    let mut args = LemmaArgs::default();
    let strength = if rng.gen_bool(0.5) { Strength::Has } else { Strength::Reaches };
    match lemma {
        LemmaId::PredPres => args.constraints = vec![random_constraint(rng, barbs)],
        LemmaId::DivRefl | LemmaId::CombDivSucc => {}
        LemmaId::BarbSens => {
            args.mode = Some(random_mode(rng));
            args.strength = Some(strength);
        }
        LemmaId::SuccSens => args.strength = Some(strength),
        LemmaId::CombTwoPred => {
            args.constraints = vec![random_constraint(rng, barbs), random_constraint(rng, barbs)];
        }
        LemmaId::FaPreorder | LemmaId::FaEquiv | LemmaId::FaRestrict => {
            let ops = match lemma {
                LemmaId::FaPreorder => PRE,
                LemmaId::FaEquiv => EQ,
                _ => *[PRE, EQ].choose(rng).expect("non-empty"),
            };
            let rt = rt_cand.closed_under(ops);
            let rs = if rng.gen_bool(0.6) { pullback(enc.mapping(), &rt) } else { rs_cand.closed_under(ops) };
            if lemma == LemmaId::FaRestrict && rng.gen_bool(0.5) {
                // a perturbed default: one extra pair, then transitivity
                let c = enc.combined();
                let mut r = c.lift(&rs).union(&c.lift(&rt));
                for s in c.source_indices() {
                    let t = enc.translate_combined(s);
                    r.insert(s, t);
                    r.insert(t, s);
                }
                let n = c.len();
                r.insert(rng.gen_range(0..n), rng.gen_range(0..n));
                args.r = Some(r.closure(ClosureOp::Trans));
            }
            args.rs = Some(rs);
            args.rt = Some(rt);
        }
        LemmaId::FaOc | LemmaId::FaOcRsBisim | LemmaId::FaOcSurj => {
            let rt = match rng.gen_range(0..5) {
                0 | 1 => greatest_relation(SimKind::WeakBisim, tgt, &[]).with_carrier(Carrier::Target),
                2 | 3 => repair(rt_cand, EQ, SimKind::WeakBisim, tgt, &[])?,
                _ => rt_cand.closed_under(EQ),
            };
            let rs = if rng.gen_bool(0.8) { pullback(enc.mapping(), &rt) } else { rs_cand.closed_under(EQ) };
            args.rs = Some(rs);
            args.rt = Some(rt);
        }
        LemmaId::OcStrong
        | LemmaId::OcStandard
        | LemmaId::OcWeak
        | LemmaId::CombOcSucc
        | LemmaId::CombOcSuccBarb
        | LemmaId::CombTriple => {
            let variant = if lemma.takes_variant() {
                *OcVariant::ALL.choose(rng).expect("non-empty")
            } else {
                lemma.oc_variant_default().expect("OC lemma")
            };
            if lemma.takes_variant() {
                args.variant = Some(variant);
            }
            let (kind, strength) = variant_profile(variant);
            if rng.gen_bool(0.7) {
                let cs = target_constraints(lemma, strength);
                args.rt = Some(repair(rt_cand, PRE, kind, tgt, &cs)?);
            }
        }
        LemmaId::Vg12 => {
            args.kind = Some(*SimKind::ALL.choose(rng).expect("non-empty"));
            let k = rng.gen_range(0..3);
            args.constraints = (0..k)
                .map(|_| {
                    let mode = if rng.gen_bool(0.9) { Mode::Respect } else { random_mode(rng) };
                    Constraint::new(random_selector(rng, barbs), mode)
                })
                .collect();
        }
    }
    Some(args)
}

fn toggle_random_pair(rng: &mut impl Rng, r: &Rel) -> Rel {
    let n = r.size();
    let mut out = r.clone();
    if n == 0 {
        return out;
    }
    let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
    out.set(a, b, !r.contains(a, b));
    if rng.gen_bool(0.5) {
        out = out.closure(ClosureOp::Trans);
    }
    out
}

fn run_one(lemma: LemmaId, g: &Generated, config: &GenConfig) -> Result<Outcome> {
    let rng = &mut config.rng(g.index, lemma as u64 + 1);
    let Some(args) = draw_args(lemma, g, config, rng) else {
        return Ok(Outcome::Skipped);
    };
    let enc = &g.bundle.instance;
    let plan = plan_lemma(lemma, enc, &args)?;
    if !plan.preconditions_hold() {
        return Ok(Outcome::PreconditionFailed);
    }
    let lhs = plan.lhs_holds();
    let witness = plan.witness.clone();
    let rhs = plan.rhs.clone();
    let report = report_from_plan(enc, plan);
    let mut discrepancies = Vec::new();
    if !report.consistent {
        let failing: Vec<String> =
            report.lhs.iter().chain(report.rhs.iter()).filter(|c| !c.holds()).map(|c| c.name.clone()).collect();
        discrepancies.push(Discrepancy {
            index: g.index,
            check: "bi-implication".into(),
            detail: format!(
                "lhs {} but rhs {} on the canonical witness; failing: {}",
                report.lhs_holds,
                report.rhs_holds,
                failing.join(", ")
            ),
            flags: flags(&args),
            dump: dump(g, &args, None),
        });
    }
    let mut if_checks = 0;
    if let (Some(w), Shape::Iff, false) = (witness, report.shape, lhs) {
        for _ in 0..PERTURBATIONS {
            let r = toggle_random_pair(rng, &w);
            if_checks += 1;
            let violated = if lemma == LemmaId::FaRestrict {
                // the left-hand side depends on R itself
                let again = LemmaArgs { r: Some(r.clone()), ..args.clone() };
                let plan = plan_lemma(lemma, enc, &again)?;
                plan.preconditions_hold() && !report_from_plan(enc, plan).consistent
            } else {
                rhs.iter().all(|c| c.evaluate(enc, &r).holds())
            };
            if violated {
                discrepancies.push(Discrepancy {
                    index: g.index,
                    check: "if-direction".into(),
                    detail: "a perturbed witness satisfies the right-hand side while the left-hand side fails".into(),
                    flags: flags(&args),
                    dump: dump(g, &args, Some(&r)),
                });
            }
        }
    }
    Ok(Outcome::Checked { lhs, if_checks, discrepancies })
}

/// Runs `iterations` instances against each selected lemma (all when
/// `lemma` is `None`). Reports come back in catalogue order and are
/// independent of the number of worker threads.
pub fn falsify(lemma: Option<LemmaId>, config: &GenConfig, iterations: u64) -> Result<Vec<FalsifyReport>> {
    config.validate()?;
    let lemmas: Vec<LemmaId> = match lemma {
        Some(l) => vec![l],
        None => LemmaId::ALL.to_vec(),
    };
    let started = Instant::now();
    let per_index: Vec<Vec<Outcome>> = (0..iterations)
        .into_par_iter()
        .map(|i| {
            let g = generate(config, i);
            lemmas.iter().map(|&l| run_one(l, &g, config)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let elapsed = started.elapsed();
    let mut reports: Vec<FalsifyReport> = lemmas.iter().map(|&l| FalsifyReport::new(l)).collect();
    for outcomes in per_index {
        for (report, outcome) in reports.iter_mut().zip(outcomes) {
            report.attempted += 1;
            match outcome {
                Outcome::Skipped => report.skipped += 1,
                Outcome::PreconditionFailed => {}
                Outcome::Checked { lhs, if_checks, discrepancies } => {
                    report.preconditions_held += 1;
                    report.lhs_true += u64::from(lhs);
                    report.if_direction_checks += if_checks;
                    report.discrepancies.extend(discrepancies);
                }
            }
        }
    }
    for r in &mut reports {
        r.elapsed = elapsed;
    }
    Ok(reports)
}

/// `falsify` for a lemma name or `all`.
pub fn falsify_named(lemma: &str, config: &GenConfig, iterations: u64) -> Result<Vec<FalsifyReport>> {
    let selected = if lemma == "all" { None } else { Some(lemma.parse::<LemmaId>()?) };
    falsify(selected, config, iterations)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oc_weak_has_no_discrepancies() {
        let reports = falsify(Some(LemmaId::OcWeak), &GenConfig::with_seed(11), 300).unwrap();
        let r = &reports[0];
        assert!(r.discrepancies.is_empty(), "{:#?}", r.discrepancies.first());
        assert!(r.preconditions_held > 0 && r.lhs_true > 0 && r.lhs_true < r.preconditions_held);
    }

    #[test]
    fn degenerate_config_is_trivial() {
        let c = GenConfig {
            step_density: 0.0,
            barb_prob: 0.0,
            success_prob: 0.0,
            rel_density: 0.0,
            ..GenConfig::with_seed(2)
        };
        let r = &falsify(Some(LemmaId::OcStandard), &c, 100).unwrap()[0];
        assert_eq!(r.preconditions_held, 100);
        assert!(r.discrepancies.is_empty());
    }

    #[test]
    fn reports_do_not_depend_on_thread_count() {
        let c = GenConfig::with_seed(4);
        let many = falsify(None, &c, 30).unwrap();
        let one =
            rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| falsify(None, &c, 30).unwrap());
        assert_eq!(serde_json::to_string(&many).unwrap(), serde_json::to_string(&one).unwrap());
    }
}
