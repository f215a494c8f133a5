//! Builds an instance in code, writes it in the instance file format and
//! reads it back.

use std::collections::BTreeMap;

use encodability::criteria::divergence_reflection;
use encodability::document::{emit, parse_instance_str, InstanceDocument, RelationDocument};
use encodability::model::SystemSpec;

fn system(states: &[&str], steps: &[(&str, &str)]) -> SystemSpec {
    SystemSpec {
        states: states.iter().map(|s| s.to_string()).collect(),
        steps: steps.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        barbs: BTreeMap::new(),
        success: Vec::new(),
    }
}

fn main() {
    // a source that terminates, encoded into a target with a busy loop
    let doc = InstanceDocument {
        source: system(&["p", "done"], &[("p", "done")]),
        target: system(&["q", "spin", "ok"], &[("q", "spin"), ("spin", "spin"), ("q", "ok")]),
        encoding: BTreeMap::from([("p".into(), "q".into()), ("done".into(), "ok".into())]),
        relations: BTreeMap::from([(
            "RT".into(),
            RelationDocument {
                over: "target".into(),
                pairs: vec![("spin".into(), "ok".into())],
                closures: vec!["refl".into()],
            },
        )]),
    };
    let bundle = doc.into_bundle().expect("valid instance");
    let text = emit(&bundle);
    println!("{text}");

    let again = parse_instance_str(&text).expect("emitted text parses");
    assert_eq!(again, bundle);
    let v = divergence_reflection(&again.instance);
    println!("divergence reflection: {}", if v.holds() { "holds" } else { "fails" });
    for cx in v.counterexamples() {
        println!("  at {:?}: {}", cx.states, cx.detail);
    }

    match parse_instance_str(r#"{"source": {"states": ["x"]}, "target": {"states": ["y"]}, "encoding": {}}"#) {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => println!("rejected: {e}"),
    }
}
