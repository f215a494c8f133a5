//! Canonical witnesses for a few catalogue lemmas on the figures.
//!
//! cargo run --example lemma_witness

use encodability::harness::fixtures::{fixture, FixtureName};
use encodability::witness::{verify_lemma, verify_rhs_only, LemmaArgs, LemmaId};

fn main() {
    for (name, lemma) in [
        (FixtureName::Fig1, LemmaId::OcStandard),
        (FixtureName::Fig1, LemmaId::DivRefl),
        (FixtureName::Fig2, LemmaId::FaEquiv),
        (FixtureName::Fig3, LemmaId::CombOcSuccBarb),
    ] {
        let f = fixture(name);
        let report = verify_lemma(lemma, &f.instance, &LemmaArgs::from_bundle(&f)).unwrap();
        println!("{name} {lemma}: lhs {} rhs {} consistent {}", report.lhs_holds, report.rhs_holds, report.consistent);
        for check in report.lhs.iter().chain(&report.rhs).filter(|c| !c.holds()) {
            println!("  failing {}", check.name);
        }
        if let Some(pairs) = &report.witness_pairs {
            let shown: Vec<_> = pairs.iter().filter(|(a, b)| a != b).map(|(a, b)| format!("({a},{b})")).collect();
            println!("  witness {}", shown.join(" "));
        }
    }

    // the relation drawn in figure 3 relates s2 to t3, which no translation
    // bound allows; the other failures are missing closure pairs
    let f = fixture(FixtureName::Fig3);
    let v =
        verify_rhs_only(LemmaId::CombOcSuccBarb, &f.instance, &LemmaArgs::from_bundle(&f), &f.relations["R_corr_sim"])
            .unwrap();
    for cx in v.counterexamples().iter().filter(|c| c.kind.starts_with("translation-bound")) {
        println!("R_corr_sim: {} at {:?}", cx.kind, cx.states);
    }
}
