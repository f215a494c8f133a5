//! Drives the command-line front end in process, the way the binary does.

use encodability::cli;
use encodability::harness::fixtures::{fixture, FixtureName};

fn main() {
    let dir = std::env::temp_dir().join(format!("encodability-session-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let fig2 = dir.join("fig2.instance");
    encodability::document::emit_to(&fixture(FixtureName::Fig2), &fig2).expect("write fixture");
    let input = fig2.to_str().unwrap();

    for args in [
        vec!["check", "full-abstraction", "--rel-source", "RS", "--rel-target", "RT", "-i", input],
        vec!["check", "oc", "--variant", "standard", "-i", input],
        vec!["--format", "machine", "relprops", "RT", "-i", input],
        vec!["check", "oc", "--variant", "sideways", "-i", input],
    ] {
        println!("$ encodability {}", args.join(" "));
        let out = cli::run(std::iter::once("encodability").chain(args));
        print!("{}", out.stdout);
        eprint!("{}", out.stderr);
        println!("[exit {}]\n", out.code);
    }
    let _ = std::fs::remove_dir_all(&dir);
}
