//! Compares the fixpoint engine and the canonical witnesses with exhaustive
//! enumeration on tiny generated instances.
//!
//! cargo run --release --example brute_force_oracle -- [SEED] [INSTANCES]

use encodability::harness::falsify::draw_args;
use encodability::harness::generate::{generate, GenConfig};
use encodability::harness::oracle::{brute_force_exists_rhs, brute_force_greatest};
use encodability::relations::{greatest_relation, SimKind};
use encodability::witness::{plan_lemma, verify_lemma, LemmaId};

fn main() {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map_or(7, |s| s.parse().expect("seed"));
    let count = args.next().map_or(200, |s| s.parse().expect("instances"));
    let config = GenConfig { max_src: 2, max_tgt: 2, step_density: 0.35, ..GenConfig::with_seed(seed) };

    let (mut relations, mut decisions, mut mismatches) = (0, 0, 0);
    for i in 0..count {
        let g = generate(&config, i);
        let enc = &g.bundle.instance;
        let sys = enc.combined().system();
        for kind in SimKind::ALL {
            relations += 1;
            if greatest_relation(kind, sys, &[]) != brute_force_greatest(kind, sys, &[]).unwrap() {
                mismatches += 1;
                println!("instance {i}: greatest {kind} differs");
            }
        }
        for lemma in LemmaId::ALL {
            let Some(args) = draw_args(lemma, &g, &config, &mut config.rng(i, lemma as u64 + 1)) else { continue };
            if !plan_lemma(lemma, enc, &args).unwrap().preconditions_hold() {
                continue;
            }
            decisions += 1;
            let canonical = verify_lemma(lemma, enc, &args).unwrap().rhs_holds;
            if canonical != brute_force_exists_rhs(lemma, enc, &args).unwrap() {
                mismatches += 1;
                println!("instance {i}: {lemma} canonical witness disagrees with enumeration");
            }
        }
    }
    println!("{relations} greatest relations, {decisions} lemma decisions, {mismatches} mismatches");
}
