//! Greatest simulation-style relations over the targets of figure 3.
//!
//! The targets t2 and t3 are coupled similar but no correspondence
//! simulation relates them, whichever way barbs are constrained.

use encodability::harness::fixtures::{fixture, FixtureName};
use encodability::predicate::{Constraint, Mode, Selector, Strength};
use encodability::relations::{greatest_relation, SimKind};

fn main() {
    let f = fixture(FixtureName::Fig3);
    let t = f.instance.target();
    let (t2, t3) = (t.index_of("t2").unwrap(), t.index_of("t3").unwrap());
    for mode in [Mode::Preserve, Mode::Respect] {
        let cs = [Constraint::new(Selector::all_barbs(Strength::Reaches), mode)];
        println!("reaches-barb:{mode}");
        for kind in SimKind::ALL {
            let r = greatest_relation(kind, t, &cs);
            let off_diagonal: Vec<_> = r
                .named_pairs(t.names())
                .into_iter()
                .filter(|(a, b)| a != b)
                .map(|(a, b)| format!("{a}<={b}"))
                .collect();
            println!(
                "  {:<20} (t2,t3) {:<5} (t3,t2) {:<5} {}",
                kind.to_string(),
                r.contains(t2, t3),
                r.contains(t3, t2),
                off_diagonal.join(" ")
            );
        }
    }
}
