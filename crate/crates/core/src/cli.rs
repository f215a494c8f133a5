//! The command-line front end.
//!
//! [`run`] never touches the process: it returns the exit code and the text
//! destined for stdout and stderr, which keeps every command testable
//! in-process. Exit codes: 0 when the printed verdict holds (or there is no
//! verdict), 1 when it fails, 2 on usage or input errors, which never come
//! with a verdict.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::criteria::{Criterion, CriterionSpec, OcVariant};
use crate::document::{emit, emit_to, parse_instance, Bundle};
use crate::error::{Error, Result};
use crate::harness::falsify::{falsify_named, FalsifyReport};
use crate::harness::fixtures::{fixture, FixtureName};
use crate::harness::generate::GenConfig;
use crate::predicate::{Constraint, Mode, Strength};
use crate::rel::{Carrier, Rel};
use crate::relations::{greatest_relation, relation_properties, SimKind};
use crate::verdict::{Counterexample, Verdict};
use crate::witness::{verify_lemma, verify_rhs_only, LemmaArgs, LemmaId, WitnessReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "encodability", version, about = "Decide encodability criteria and check the lemma catalogue")]
pub struct Cli {
    /// Instance file.
    #[arg(short = 'i', long = "input", global = true, value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a criterion on the instance.
    Check {
        /// divergence-reflection, success-sensitiveness, barb-sensitiveness,
        /// full-abstraction or oc
        #[arg(value_parser = parse::<Criterion>)]
        criterion: Criterion,
        #[arg(long, value_parser = parse::<OcVariant>, default_value = "standard")]
        variant: OcVariant,
        #[arg(long, value_parser = parse::<Mode>, default_value = "respect")]
        mode: Mode,
        #[arg(long, value_parser = parse::<Strength>, default_value = "reaches")]
        strength: Strength,
        #[arg(long, default_value = "RS", value_name = "NAME")]
        rel_source: String,
        #[arg(long, default_value = "RT", value_name = "NAME")]
        rel_target: String,
    },
    /// Structural and simulation properties of a named relation.
    Relprops { name: String },
    /// The greatest relation of a kind satisfying respect constraints.
    Greatest {
        /// strong-bisim, weak-bisim, coupled-sim or correspondence-sim
        #[arg(value_parser = parse::<SimKind>)]
        kind: SimKind,
        /// Constraint `pred:mode`, e.g. `reaches-barb:respect`; repeatable.
        #[arg(long = "respect", value_parser = parse::<Constraint>, value_name = "PRED:MODE")]
        respect: Vec<Constraint>,
        /// Which system to compute over.
        #[arg(long, value_parser = parse::<Carrier>, default_value = "combined")]
        over: Carrier,
    },
    /// Build a lemma's canonical witness and evaluate both sides.
    Witness {
        #[arg(value_parser = parse::<LemmaId>)]
        lemma: LemmaId,
        #[command(flatten)]
        args: LemmaFlags,
    },
    /// Evaluate a lemma's right-hand side on a named combined relation.
    VerifyRhs {
        #[arg(value_parser = parse::<LemmaId>)]
        lemma: LemmaId,
        #[arg(long, value_name = "NAME")]
        rel: String,
        #[command(flatten)]
        args: LemmaFlags,
    },
    /// Search for counterexamples to the lemmas on random instances.
    Falsify {
        /// Lemma id or `all`.
        #[arg(long, default_value = "all")]
        lemma: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        iters: u64,
        #[arg(long, default_value_t = 4)]
        max_src: usize,
        #[arg(long, default_value_t = 5)]
        max_tgt: usize,
    },
    /// Write a figure fixture in the instance format.
    Fixture {
        #[arg(value_parser = parse::<FixtureName>)]
        name: FixtureName,
        /// Destination; stdout when absent.
        #[arg(long, value_name = "PATH")]
        emit: Option<PathBuf>,
    },
}

/// Lemma parameters shared by `witness` and `verify-rhs`.
#[derive(Debug, Args)]
pub struct LemmaFlags {
    #[arg(long, value_parser = parse::<OcVariant>)]
    variant: Option<OcVariant>,
    #[arg(long, value_parser = parse::<Mode>)]
    mode: Option<Mode>,
    #[arg(long, value_parser = parse::<Strength>)]
    strength: Option<Strength>,
    #[arg(long, value_parser = parse::<SimKind>)]
    kind: Option<SimKind>,
    #[arg(long = "respect", value_parser = parse::<Constraint>, value_name = "PRED:MODE")]
    respect: Vec<Constraint>,
    /// Source relation; `RS` if present.
    #[arg(long, value_name = "NAME")]
    rel_source: Option<String>,
    /// Target relation; `RT` if present.
    #[arg(long, value_name = "NAME")]
    rel_target: Option<String>,
    /// Combined relation for FA-RESTRICT; `R` if present.
    #[arg(long = "rel-combined", value_name = "NAME")]
    rel_combined: Option<String>,
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T> {
    s.parse()
}

impl LemmaFlags {
    fn to_args(&self, bundle: &Bundle) -> Result<LemmaArgs> {
        let pick = |flag: &Option<String>, default: &str| -> Result<Option<Rel>> {
            match flag {
                Some(name) => bundle.relation(name).cloned().map(Some),
                None => Ok(bundle.relations.get(default).cloned()),
            }
        };
        Ok(LemmaArgs {
            rs: pick(&self.rel_source, "RS")?,
            rt: pick(&self.rel_target, "RT")?,
            r: pick(&self.rel_combined, "R")?,
            variant: self.variant,
            mode: self.mode,
            strength: self.strength,
            constraints: self.respect.clone(),
            kind: self.kind,
        })
    }
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    verdict: Option<bool>,
    text: String,
    machine: Value,
    /// Diagnostics that must not affect stdout, such as timings.
    note: String,
}

/// Parses `argv` (program name first) and executes the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: rendered, stderr: String::new() }
                }
                _ => Outcome { code: 2, stdout: String::new(), stderr: format!("E_USAGE: {rendered}") },
            };
        }
    };
    let name = command_name(&cli.command);
    match execute(&cli) {
        Ok(report) => {
            let code = match report.verdict {
                Some(false) => 1,
                _ => 0,
            };
            let stdout = match cli.format {
                Format::Text => report.text,
                Format::Machine => {
                    let mut doc = report.machine;
                    doc["command"] = json!(name);
                    if let Some(v) = report.verdict {
                        doc["verdict"] = json!(v);
                    }
                    let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
                    s.push('\n');
                    s
                }
            };
            Outcome { code, stdout, stderr: report.note }
        }
        Err(e) => {
            let stdout = match cli.format {
                Format::Text => String::new(),
                Format::Machine => {
                    let doc = json!({"command": name, "error": {"code": e.code(), "message": e.to_string()}});
                    format!("{}\n", serde_json::to_string_pretty(&doc).expect("errors serialize"))
                }
            };
            Outcome { code: 2, stdout, stderr: format!("{e}\n") }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Relprops { .. } => "relprops",
        Command::Greatest { .. } => "greatest",
        Command::Witness { .. } => "witness",
        Command::VerifyRhs { .. } => "verify-rhs",
        Command::Falsify { .. } => "falsify",
        Command::Fixture { .. } => "fixture",
    }
}

fn load(cli: &Cli) -> Result<Bundle> {
    match &cli.input {
        Some(path) => parse_instance(path),
        None => Err(Error::Usage("this command needs an instance file (-i FILE)".into())),
    }
}

fn write_counterexamples(out: &mut String, cxs: &[Counterexample]) {
    for cx in cxs {
        let _ = write!(out, "  {} [{}]", cx.kind, cx.states.join(", "));
        if let Some((a, b)) = &cx.challenge {
            let _ = write!(out, " ({a} ==> {b})");
        }
        let _ = writeln!(out, ": {}", cx.detail);
    }
}

fn verdict_text(label: &str, v: &Verdict) -> String {
    let mut out = format!("{label}: {}\n", if v.holds() { "holds" } else { "fails" });
    write_counterexamples(&mut out, v.counterexamples());
    out
}

fn pairs_value(rel: &Rel, bundle: &Bundle) -> Value {
    json!({
        "over": rel.carrier().to_string(),
        "pairs": rel.named_pairs(bundle.instance.carrier_names(rel.carrier())),
    })
}

fn execute(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Check { criterion, variant, mode, strength, rel_source, rel_target } => {
            let bundle = load(cli)?;
            let spec = CriterionSpec {
                criterion: *criterion,
                variant: *variant,
                mode: *mode,
                strength: *strength,
                rel_source: rel_source.clone(),
                rel_target: rel_target.clone(),
            };
            let v = spec.evaluate(&bundle)?;
            let label = match criterion {
                Criterion::OperationalCorrespondence => format!("oc ({variant})"),
                Criterion::BarbSensitiveness => format!("{criterion} ({mode}, {strength})"),
                Criterion::SuccessSensitiveness => format!("{criterion} ({strength})"),
                _ => criterion.to_string(),
            };
            Ok(Report {
                verdict: Some(v.holds()),
                text: verdict_text(&label, &v),
                machine: json!({"criterion": label, "counterexamples": v.counterexamples()}),
                note: String::new(),
            })
        }
        Command::Relprops { name } => {
            let bundle = load(cli)?;
            let rel = bundle.relation(name)?;
            let report = relation_properties(rel, bundle.instance.carrier_system(rel.carrier()));
            let mut text = format!("{name} over {} ({} pairs)\n", rel.carrier(), rel.len());
            for (k, v) in [
                ("reflexive", report.reflexive),
                ("symmetric", report.symmetric),
                ("transitive", report.transitive),
                ("preorder", report.preorder),
                ("equivalence", report.equivalence),
                ("strong-bisim", report.strong_bisimulation),
                ("weak-bisim", report.weak_bisimulation),
                ("coupled-sim", report.coupled_simulation),
                ("correspondence-sim", report.correspondence_simulation),
            ] {
                let _ = writeln!(text, "  {k:<19} {v}");
            }
            for f in &report.respect {
                let _ = writeln!(
                    text,
                    "  {:<19} preserve {} reflect {} respect {}",
                    f.predicate, f.preserves, f.reflects, f.respects
                );
            }
            Ok(Report {
                verdict: None,
                text,
                machine: json!({"relation": name, "report": report}),
                note: String::new(),
            })
        }
        Command::Greatest { kind, respect, over } => {
            let bundle = load(cli)?;
            let sys = bundle.instance.carrier_system(*over);
            let g = greatest_relation(*kind, sys, respect).with_carrier(*over);
            let names = bundle.instance.carrier_names(*over);
            let constraints: Vec<String> = respect.iter().map(ToString::to_string).collect();
            let mut text = format!("greatest {kind} over {over}");
            if !constraints.is_empty() {
                let _ = write!(text, " respecting {}", constraints.join(", "));
            }
            let _ = writeln!(text, ": {} pairs", g.len());
            for (a, b) in g.named_pairs(names) {
                let _ = writeln!(text, "  ({a}, {b})");
            }
            Ok(Report {
                verdict: None,
                text,
                machine: json!({"kind": kind.to_string(), "constraints": constraints, "relation": pairs_value(&g, &bundle)}),
                note: String::new(),
            })
        }
        Command::Witness { lemma, args } => {
            let bundle = load(cli)?;
            let largs = args.to_args(&bundle)?;
            let report = verify_lemma(*lemma, &bundle.instance, &largs)?;
            Ok(Report {
                verdict: Some(report.consistent),
                text: witness_text(&report),
                machine: json!({"report": report}),
                note: String::new(),
            })
        }
        Command::VerifyRhs { lemma, rel, args } => {
            let bundle = load(cli)?;
            let largs = args.to_args(&bundle)?;
            let r = bundle.relation(rel)?;
            let v = verify_rhs_only(*lemma, &bundle.instance, &largs, r)?;
            Ok(Report {
                verdict: Some(v.holds()),
                text: verdict_text(&format!("{lemma} right-hand side on {rel}"), &v),
                machine: json!({"lemma": lemma, "relation": rel, "counterexamples": v.counterexamples()}),
                note: String::new(),
            })
        }
        Command::Falsify { lemma, seed, iters, max_src, max_tgt } => {
            let config = GenConfig { seed: *seed, max_src: *max_src, max_tgt: *max_tgt, ..Default::default() };
            let reports = falsify_named(lemma, &config, *iters)?;
            let total: usize = reports.iter().map(|r| r.discrepancies.len()).sum();
            let note =
                reports.first().map(|r| format!("elapsed {:.3}s\n", r.elapsed.as_secs_f64())).unwrap_or_default();
            Ok(Report {
                verdict: Some(total == 0),
                text: falsify_text(&reports, total),
                machine: json!({"config": config, "iterations": iters, "discrepancies": total, "reports": reports}),
                note,
            })
        }
        Command::Fixture { name, emit: path } => {
            let bundle = fixture(*name);
            match path {
                Some(path) => {
                    emit_to(&bundle, path)?;
                    Ok(Report {
                        verdict: None,
                        text: format!("wrote {name} to {}\n", path.display()),
                        machine: json!({"fixture": name.to_string(), "path": path.display().to_string()}),
                        note: String::new(),
                    })
                }
                None => Ok(Report {
                    verdict: None,
                    text: emit(&bundle),
                    machine: json!({"fixture": name.to_string(), "instance": bundle.to_document()}),
                    note: String::new(),
                }),
            }
        }
    }
}

fn witness_text(r: &WitnessReport) -> String {
    let mut out = format!("{} ({:?})\n", r.lemma, r.shape);
    let section = |out: &mut String, title: &str, checks: &[crate::witness::Check]| {
        if checks.is_empty() {
            return;
        }
        let _ = writeln!(out, "{title}:");
        for c in checks {
            let _ = writeln!(out, "  {}: {}", c.name, if c.holds() { "holds" } else { "fails" });
            let mut cx = String::new();
            write_counterexamples(&mut cx, c.verdict.counterexamples());
            for line in cx.lines() {
                let _ = writeln!(out, "  {line}");
            }
        }
    };
    section(&mut out, "preconditions", &r.preconditions);
    section(&mut out, "lhs", &r.lhs);
    if let Some(pairs) = &r.witness_pairs {
        let shown: Vec<String> = pairs.iter().map(|(a, b)| format!("({a}, {b})")).collect();
        let _ = writeln!(out, "witness: {}", shown.join(" "));
    }
    section(&mut out, "rhs", &r.rhs);
    let _ = writeln!(out, "lhs {}, rhs {}, bi-implication {}", r.lhs_holds, r.rhs_holds, r.consistent);
    out
}

fn falsify_text(reports: &[FalsifyReport], total: usize) -> String {
    let mut out = String::new();
    for r in reports {
        let _ = writeln!(
            out,
            "{:<18} attempted {:>5}  skipped {:>4}  preconditions {:>5}  lhs {:>5}  discrepancies {}",
            r.lemma.to_string(),
            r.attempted,
            r.skipped,
            r.preconditions_held,
            r.lhs_true,
            r.discrepancies.len()
        );
        for d in &r.discrepancies {
            let _ = writeln!(out, "  #{} {}: {} [{}]\n{}", d.index, d.check, d.detail, d.flags, d.dump);
        }
    }
    let _ = writeln!(out, "total discrepancies: {total}");
    out
}
