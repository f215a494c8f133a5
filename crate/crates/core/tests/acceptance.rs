//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use encodability::cli;
use encodability::criteria::{divergence_reflection, full_abstraction, operational_correspondence, OcVariant};
use encodability::document::{emit, emit_to, parse_instance, Bundle};
use encodability::harness::falsify::{draw_args, falsify_named};
use encodability::harness::fixtures::{fig2_step_moved, fixture, FixtureName};
use encodability::harness::generate::{generate, GenConfig};
use encodability::harness::oracle::{brute_force_exists_rhs, brute_force_greatest, literal_is_simulation};
use encodability::model::ReductionSystem;
use encodability::predicate::{Constraint, Mode, Selector, Strength};
use encodability::rel::{Carrier, Rel};
use encodability::relations::{
    greatest_relation, is_simulation, lemma5_containment, relation_respect, simulation_interior, SimKind,
};
use encodability::witness::{plan_lemma, verify_lemma, vg12_check, LemmaArgs, LemmaId, Shape};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn pair(sys: &ReductionSystem, a: &str, b: &str) -> (usize, usize) {
    (sys.index_of(a).unwrap(), sys.index_of(b).unwrap())
}

fn under_a_second(start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(1), "fixture checks took {took:?}");
    Ok(took)
}

fn figure_one() -> Outcome {
    let start = Instant::now();
    let f = fixture(FixtureName::Fig1);
    let enc = &f.instance;
    let rt = f.relation("RT").unwrap();
    ensure!(operational_correspondence(enc, rt, OcVariant::Standard).unwrap().holds(), "standard OC fails");
    ensure!(divergence_reflection(enc).holds(), "divergence reflection fails");
    let report = verify_lemma(LemmaId::OcStandard, enc, &LemmaArgs::from_bundle(&f)).unwrap();
    ensure!(report.consistent, "OC-STANDARD bi-implication is false");
    let div = Constraint::new(Selector::Divergent, Mode::Reflect);
    ensure!(!vg12_check(enc, SimKind::CorrespondenceSim, &[div]).holds(), "vG12 with divergence reflection holds");
    Ok(format!("{:?}", under_a_second(start)?))
}

fn figure_two() -> Outcome {
    let start = Instant::now();
    let f = fixture(FixtureName::Fig2);
    let enc = &f.instance;
    let (rs, rt) = (f.relation("RS").unwrap(), f.relation("RT").unwrap());
    ensure!(full_abstraction(enc, rs, rt).unwrap().holds(), "full abstraction fails");
    let oc = operational_correspondence(enc, rt, OcVariant::Standard).unwrap();
    let cx = oc.counterexamples().first().ok_or("standard OC holds")?;
    ensure!(
        cx.states == ["s2", "t3"] && cx.challenge == Some(("t2".into(), "t3".into())),
        "unexpected counterexample {cx:?}"
    );
    ensure!(is_simulation(SimKind::WeakBisim, enc.source(), rs).holds(), "RS is not a weak bisimulation");
    ensure!(!is_simulation(SimKind::WeakBisim, enc.target(), rt).holds(), "RT is a weak bisimulation");

    let m = fig2_step_moved();
    let (rs, rt) = (m.relation("RS").unwrap(), m.relation("RT").unwrap());
    ensure!(full_abstraction(&m.instance, rs, rt).unwrap().holds(), "mutant loses full abstraction");
    ensure!(!is_simulation(SimKind::WeakBisim, m.instance.source(), rs).holds(), "mutant RS still a bisimulation");
    ensure!(is_simulation(SimKind::WeakBisim, m.instance.target(), rt).holds(), "mutant RT not a bisimulation");
    Ok(format!("{:?}", under_a_second(start)?))
}

fn figure_three() -> Outcome {
    let start = Instant::now();
    let f = fixture(FixtureName::Fig3);
    let enc = &f.instance;
    let sys = enc.combined().system();
    let r = f.relation("R_corr_sim").unwrap();
    let reaches = Selector::all_barbs(Strength::Reaches);
    ensure!(is_simulation(SimKind::CorrespondenceSim, sys, r).holds(), "R_corr_sim is not a correspondence simulation");
    ensure!(relation_respect(r, sys, &reaches, Mode::Respect).holds(), "R_corr_sim does not respect barbs");
    for s in enc.combined().source_indices() {
        ensure!(r.contains(s, enc.translate_combined(s)), "R_corr_sim misses {}", sys.name(s).as_str());
    }

    let t = enc.target();
    let (t2, t3) = pair(t, "t2", "t3");
    let corr = greatest_relation(SimKind::CorrespondenceSim, t, &[Constraint::new(reaches.clone(), Mode::Respect)]);
    ensure!(!corr.contains(t2, t3) && !corr.contains(t3, t2), "t2, t3 related by correspondence similarity");
    // coupled similarity: barbs of the challenger stay reachable for the answer
    let coupled = greatest_relation(SimKind::CoupledSim, t, &[Constraint::new(reaches, Mode::Preserve)]);
    ensure!(coupled.contains(t2, t3) && coupled.contains(t3, t2), "t2, t3 not coupled similar");

    let report = verify_lemma(LemmaId::CombOcSuccBarb, enc, &LemmaArgs::from_bundle(&f)).unwrap();
    ensure!(!report.lhs_holds, "COMB-OC-SUCC-BARB lhs holds");
    Ok(format!("{:?}", under_a_second(start)?))
}

fn oracle_equivalence() -> Outcome {
    let config = GenConfig { max_src: 2, max_tgt: 2, step_density: 0.35, ..GenConfig::with_seed(7) };
    let constraint_sets = [
        vec![],
        vec![Constraint::new(Selector::all_barbs(Strength::Reaches), Mode::Respect)],
        vec![Constraint::new(Selector::Divergent, Mode::Reflect)],
        vec![Constraint::new(Selector::success(Strength::Has), Mode::Preserve)],
    ];
    let (mut instances, mut decisions) = (0, 0);
    for i in 0..100 {
        let g = generate(&config, i);
        let enc = &g.bundle.instance;
        let sys = enc.combined().system();
        ensure!(sys.len() <= 4, "instance {i} has {} states", sys.len());
        instances += 1;
        for kind in SimKind::ALL {
            for cs in &constraint_sets {
                let fast = greatest_relation(kind, sys, cs);
                ensure!(fast == brute_force_greatest(kind, sys, cs).unwrap(), "instance {i}: {kind} under {cs:?}");
            }
        }
        for lemma in LemmaId::ALL {
            let rng = &mut config.rng(i, lemma as u64 + 1);
            let Some(args) = draw_args(lemma, &g, &config, rng) else { continue };
            if !plan_lemma(lemma, enc, &args).unwrap().preconditions_hold() {
                continue;
            }
            let report = verify_lemma(lemma, enc, &args).unwrap();
            let exists = brute_force_exists_rhs(lemma, enc, &args).unwrap();
            let agrees = match report.shape {
                Shape::Iff => exists == report.lhs_holds,
                Shape::Implies => !report.lhs_holds || exists,
            };
            ensure!(exists == report.rhs_holds && agrees, "{lemma} on instance {i}");
            decisions += 1;
        }
    }
    Ok(format!("{instances} instances, {decisions} lemma decisions"))
}

fn falsification() -> Outcome {
    let start = Instant::now();
    let reports = falsify_named("all", &GenConfig::with_seed(7), 1000).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure!(reports.len() == LemmaId::ALL.len(), "{} lemmas checked", reports.len());
    let found: usize = reports.iter().map(|r| r.discrepancies.len()).sum();
    ensure!(found == 0, "{found} discrepancies");
    ensure!(took < Duration::from_secs(60), "took {took:?}");
    Ok(format!("{} lemmas, {took:?}", reports.len()))
}

/// A symmetric coupled simulation inside `candidate`.
fn symmetric_coupled(sys: &ReductionSystem, candidate: &Rel) -> Rel {
    let mut r = candidate.clone();
    loop {
        let next = simulation_interior(SimKind::CoupledSim, sys, &r.intersection(&r.inverse()));
        if next == r {
            return r;
        }
        r = next;
    }
}

fn hierarchy() -> Outcome {
    let config = GenConfig::with_seed(7);
    let (mut relations, mut literal) = (0, 0);
    for i in 0..1000 {
        let g = generate(&config, i);
        let enc = &g.bundle.instance;
        let combined = enc.combined();
        let sys = combined.system();
        let mut corpus: Vec<Rel> = g.bundle.relations.values().map(|r| combined.lift(r)).collect();
        corpus.push(Rel::full(Carrier::Combined, sys.len()));
        corpus.extend(SimKind::ALL.map(|k| greatest_relation(k, sys, &[])));

        for r in &corpus {
            let interiors = SimKind::ALL.map(|k| simulation_interior(k, sys, r));
            for (k, inside) in SimKind::ALL.iter().zip(&interiors) {
                let strong = is_simulation(SimKind::StrongBisim, sys, inside).holds();
                let weak = is_simulation(SimKind::WeakBisim, sys, inside).holds();
                let corr = is_simulation(SimKind::CorrespondenceSim, sys, inside).holds();
                ensure!(!strong || weak, "instance {i}: strong but not weak ({k} interior)");
                ensure!(!weak || corr, "instance {i}: weak but not correspondence ({k} interior)");
                if corr {
                    ensure!(
                        lemma5_containment(sys, inside).unwrap().holds(),
                        "instance {i}: correspondence simulation escapes coupled similarity"
                    );
                }
                relations += 1;
            }
            let sym = symmetric_coupled(sys, &r.union(&r.inverse()));
            ensure!(is_simulation(SimKind::WeakBisim, sys, &sym).holds(), "instance {i}: symmetric coupled");

            for s in [enc.source(), enc.target(), sys] {
                if s.len() > 5 || s.len() != r.size() {
                    continue;
                }
                for kind in SimKind::ALL {
                    let fast = is_simulation(kind, s, r).holds();
                    ensure!(fast == literal_is_simulation(kind, s, r), "instance {i}: literal {kind} disagrees");
                    literal += 1;
                }
            }
        }
        for r in g.bundle.relations.values() {
            let s = enc.carrier_system(r.carrier());
            if s.len() <= 5 {
                for kind in SimKind::ALL {
                    let fast = is_simulation(kind, s, r).holds();
                    ensure!(fast == literal_is_simulation(kind, s, r), "instance {i}: literal {kind} disagrees");
                    literal += 1;
                }
            }
        }
    }
    Ok(format!("{relations} relations, {literal} literal comparisons"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = GenConfig::with_seed(7);
    let mut files = 0;
    for i in 0..120 {
        let bundle = generate(&config, i).bundle;
        let path = dir.path().join(format!("corpus{i:03}.instance"));
        emit_to(&bundle, &path).unwrap();
        let parsed: Bundle = parse_instance(&path).unwrap();
        ensure!(parsed == bundle, "instance {i} changes on parse");
        let again = dir.path().join(format!("corpus{i:03}.again"));
        emit_to(&parsed, &again).unwrap();
        ensure!(parse_instance(&again).unwrap() == parsed, "instance {i} changes on second round trip");
        ensure!(emit(&parsed) == std::fs::read_to_string(&path).unwrap(), "instance {i} emits differently");
        files += 1;
    }

    let fig3 = dir.path().join("fig3.instance");
    emit_to(&fixture(FixtureName::Fig3), &fig3).unwrap();
    let f = fig3.to_str().unwrap();
    for args in [
        vec!["--format", "machine", "greatest", "coupled-sim", "-i", f],
        vec!["--format", "machine", "witness", "VG12", "-i", f],
        vec!["relprops", "R_corr_sim", "-i", f],
        vec!["falsify", "--seed", "7", "--iters", "100"],
    ] {
        let run = || cli::run(std::iter::once("encodability").chain(args.iter().copied()));
        let (a, b) = (run(), run());
        ensure!(a.code == b.code && a.stdout == b.stdout, "{args:?} differs between runs");
    }
    Ok(format!("{files} corpus files round-tripped"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("figure 1 caption", figure_one),
        ("figure 2 caption and step-moved mutant", figure_two),
        ("figure 3 caption and footnotes", figure_three),
        ("oracle equivalence", oracle_equivalence),
        ("lemma falsification, seed 7, 1000 iterations", falsification),
        ("simulation hierarchy over the falsifier corpus", hierarchy),
        ("determinism and round-trip", determinism),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.into_iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}  {name} ({detail})", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}  {name}: {why}", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
