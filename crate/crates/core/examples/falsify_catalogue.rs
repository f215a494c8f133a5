//! Runs every catalogue lemma against seeded random instances and prints
//! one summary line per lemma.
//!
//! cargo run --release --example falsify_catalogue -- [SEED] [ITERATIONS]

use encodability::harness::falsify::falsify;
use encodability::harness::generate::GenConfig;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map_or(7, |s| s.parse().expect("seed"));
    let iterations = args.next().map_or(1000, |s| s.parse().expect("iterations"));
    let reports = falsify(None, &GenConfig::with_seed(seed), iterations).expect("valid config");
    for r in &reports {
        println!(
            "{:<18} attempted {:>5}  skipped {:>4}  preconditions {:>5}  lhs {:>5}  if-checks {:>5}  discrepancies {}",
            r.lemma.to_string(),
            r.attempted,
            r.skipped,
            r.preconditions_held,
            r.lhs_true,
            r.if_direction_checks,
            r.discrepancies.len()
        );
    }
    if let Some(r) = reports.first() {
        eprintln!("elapsed {:.2?}", r.elapsed);
    }
    for d in reports.iter().flat_map(|r| r.discrepancies.iter().map(move |d| (r.lemma, d))).take(3) {
        println!("\n{} #{} {}: {} {}\n{}", d.0, d.1.index, d.1.check, d.1.detail, d.1.flags, d.1.dump);
    }
}
