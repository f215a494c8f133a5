//! Decides the encodability criteria on the first two figures and prints
//! the diagnostics of every failing check.

use encodability::criteria::{
    barb_sensitiveness, divergence_reflection, full_abstraction, operational_correspondence, success_sensitiveness,
    OcVariant,
};
use encodability::harness::fixtures::{fig2_step_moved, fixture, FixtureName};
use encodability::predicate::{Mode, Strength};
use encodability::verdict::Verdict;

fn show(label: &str, v: &Verdict) {
    println!("  {label:<28} {}", if v.holds() { "holds" } else { "fails" });
    for cx in v.counterexamples() {
        match &cx.challenge {
            Some((from, to)) => println!("    at {:?}: {from} ==> {to}, {}", cx.states, cx.detail),
            None => println!("    at {:?}: {}", cx.states, cx.detail),
        }
    }
}

fn main() {
    let f1 = fixture(FixtureName::Fig1);
    let enc = &f1.instance;
    println!("figure 1");
    show("divergence reflection", &divergence_reflection(enc));
    show("success sensitiveness", &success_sensitiveness(enc, Strength::Reaches));
    show("barb sensitiveness", &barb_sensitiveness(enc, Mode::Respect, Strength::Reaches));
    for variant in [OcVariant::Strong, OcVariant::Standard, OcVariant::Weak] {
        let v = operational_correspondence(enc, &f1.relations["RT"], variant).unwrap();
        show(&format!("{variant} OC w.r.t. RT"), &v);
    }

    for (name, bundle) in [("figure 2", fixture(FixtureName::Fig2)), ("figure 2, step moved", fig2_step_moved())] {
        let enc = &bundle.instance;
        let (rs, rt) = (&bundle.relations["RS"], &bundle.relations["RT"]);
        println!("{name}");
        show("full abstraction", &full_abstraction(enc, rs, rt).unwrap());
        show("standard OC w.r.t. RT", &operational_correspondence(enc, rt, OcVariant::Standard).unwrap());
    }
}
