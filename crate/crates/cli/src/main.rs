//! Command-line entry point: load a document, run checks, emit a report.
//!
//! Exit codes: 0 when every check passes, 1 when a violation was found
//! (witnesses are in the report), 2 on malformed documents, guard limits,
//! or usage errors.

mod document;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use document::{load, Loaded};
use gqp::{
    canonical_structure, check_derived_lemmas, check_gqp, check_gqp_lemmas, check_postulate_with,
    classify_family, conjecture_check, derive_plausibility, enumerate_total_extensions,
    roundtrip_check, search_counterexample, CheckOptions, CheckReport,
    ConditionalPreferenceStructure, EventRelation, PostulateId, SearchBounds, SearchMode,
};
use output::{relation_pairs_named, Ctx, JsonSearch, JsonSearchWitness, MachineReport};

#[derive(Parser)]
#[command(name = "gqp", version, about = "Workbench for partially ordered preferences and event plausibility")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Path to a workbench JSON document.
    input: PathBuf,
    /// Emit the machine-readable JSON report on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RelationArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Apply reflexive-transitive closure to an event-relation document
    /// before checking (default is pure verification).
    #[arg(long)]
    close: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check postulates on a preference document.
    Check {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated subset of q0..q7,q'4,r or `all`.
        #[arg(long, default_value = "all")]
        postulates: String,
        /// Condition the constant-acts postulate on non-empty rather than
        /// non-null events.
        #[arg(long)]
        q5_nonempty: bool,
    },
    /// Run the derived-lemma suite on a preference document.
    Lemmas {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Derive and print the plausibility relation on events.
    Derive {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Check the event-relation axioms and the derived-property suite.
    Gqp {
        #[command(flatten)]
        args: RelationArgs,
    },
    /// Classify the relation into families.
    Classify {
        #[command(flatten)]
        args: RelationArgs,
    },
    /// Build the canonical structure and verify the round trip.
    Canonical {
        #[command(flatten)]
        args: RelationArgs,
    },
    /// Enumerate total extensions and check their intersection.
    Extensions {
        #[command(flatten)]
        args: RelationArgs,
    },
    /// Search small structure spaces for an equal-partition counterexample.
    Search {
        /// Emit the machine-readable JSON report on stdout.
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 2)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        consequences: usize,
        /// Sweep the whole space (guarded); otherwise sampling is used.
        #[arg(long)]
        exhaustive: bool,
        /// Number of sampled structures when not exhaustive.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    message: String,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_workers();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(2)
        }
    }
}

/// Worker count for the internal parallelism, from GQP_THREADS.
fn configure_workers() {
    if let Ok(text) = std::env::var("GQP_THREADS") {
        if let Ok(n) = text.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn emit(report: &MachineReport, json: bool) -> bool {
    if json {
        println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
    } else {
        print!("{}", output::render_human(report));
    }
    report.passed
}

fn require_structure(loaded: Loaded, command: &str) -> Result<ConditionalPreferenceStructure, Failure> {
    match loaded {
        Loaded::Structure(p) => Ok(p),
        Loaded::Relation(_) => Err(Failure {
            message: format!("`{command}` needs a preference document, not an event relation"),
        }),
    }
}

/// Event-relation documents are used as-is (optionally closed first);
/// preference documents are run through the plausibility derivation.
fn obtain_relation(
    loaded: Loaded,
    close: bool,
) -> Result<(EventRelation, Option<ConditionalPreferenceStructure>), Failure> {
    match loaded {
        Loaded::Relation(r) => {
            let r = if close { r.reflexive_transitive_closure() } else { r };
            Ok((r, None))
        }
        Loaded::Structure(p) => {
            let r = derive_plausibility(&p)?;
            Ok((r, Some(p)))
        }
    }
}

fn parse_postulates(text: &str) -> Result<Vec<PostulateId>, Failure> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(PostulateId::ALL.to_vec());
    }
    text.split(',')
        .map(|token| PostulateId::from_str(token.trim()).map_err(|e| Failure { message: e }))
        .collect()
}

fn run(command: Command) -> Result<bool, Failure> {
    match command {
        Command::Check { input, postulates, q5_nonempty } => {
            let doc = load(&input.input)?;
            let p = require_structure(doc.loaded, "check")?;
            let ids = parse_postulates(&postulates)?;
            let opts = CheckOptions { q5_nonempty };
            let reports: Vec<Result<CheckReport, gqp::Error>> = ids
                .par_iter()
                .map(|&id| check_postulate_with(&p, id, opts))
                .collect();
            let mut machine = MachineReport::new("check");
            machine.document_sha256 = Some(doc.sha256);
            machine.option("postulates", ids.iter().map(|i| i.as_str()).collect::<Vec<_>>());
            machine.option("q5_nonempty", q5_nonempty);
            let ctx = Ctx::Structure(&p);
            for report in reports {
                machine.push_report(&report?, &ctx);
            }
            Ok(emit(&machine, input.json))
        }
        Command::Lemmas { input } => {
            let doc = load(&input.input)?;
            let p = require_structure(doc.loaded, "lemmas")?;
            let reports = check_derived_lemmas(&p)?;
            let mut machine = MachineReport::new("lemmas");
            machine.document_sha256 = Some(doc.sha256);
            let ctx = Ctx::Structure(&p);
            for report in &reports {
                machine.push_report(report, &ctx);
            }
            Ok(emit(&machine, input.json))
        }
        Command::Derive { input } => {
            let doc = load(&input.input)?;
            let p = require_structure(doc.loaded, "derive")?;
            let r = derive_plausibility(&p)?;
            let mut machine = MachineReport::new("derive");
            machine.document_sha256 = Some(doc.sha256);
            machine.relation = Some(relation_pairs_named(&r));
            machine.chain = r.render_chain();
            Ok(emit(&machine, input.json))
        }
        Command::Gqp { args } => {
            let doc = load(&args.input.input)?;
            let (r, source) = obtain_relation(doc.loaded, args.close)?;
            let mut machine = MachineReport::new("gqp");
            machine.document_sha256 = Some(doc.sha256);
            machine.option("close", args.close);
            let ctx = Ctx::Relation(r.space());
            machine.push_report(&check_gqp(&r), &ctx);
            for report in check_gqp_lemmas(&r, source.as_ref())? {
                machine.push_report(&report, &ctx);
            }
            Ok(emit(&machine, args.input.json))
        }
        Command::Classify { args } => {
            let doc = load(&args.input.input)?;
            let (r, _) = obtain_relation(doc.loaded, args.close)?;
            let mut machine = MachineReport::new("classify");
            machine.document_sha256 = Some(doc.sha256);
            machine.option("close", args.close);
            let ctx = Ctx::Relation(r.space());
            let axioms = check_gqp(&r);
            machine.push_report(&axioms, &ctx);
            machine.families = Some(classify_family(&r).into());
            Ok(emit(&machine, args.input.json))
        }
        Command::Canonical { args } => {
            let doc = load(&args.input.input)?;
            let (r, _) = obtain_relation(doc.loaded, args.close)?;
            let canonical = canonical_structure(&r)?;
            let mut machine = MachineReport::new("canonical");
            machine.document_sha256 = Some(doc.sha256);
            machine.option("close", args.close);
            let sctx = Ctx::Structure(&canonical);
            for id in [
                PostulateId::Q1,
                PostulateId::Q2,
                PostulateId::Q3,
                PostulateId::Q4,
                PostulateId::Q5,
                PostulateId::Q6,
                PostulateId::R,
            ] {
                machine.push_report(&check_postulate_with(&canonical, id, CheckOptions::default())?, &sctx);
            }
            let rctx = Ctx::Relation(r.space());
            machine.push_report(&roundtrip_check(&r)?, &rctx);
            Ok(emit(&machine, args.input.json))
        }
        Command::Extensions { args } => {
            let doc = load(&args.input.input)?;
            let (r, _) = obtain_relation(doc.loaded, args.close)?;
            let ext = enumerate_total_extensions(&r)?;
            let mut machine = MachineReport::new("extensions");
            machine.document_sha256 = Some(doc.sha256);
            machine.option("close", args.close);
            machine.extension_count = Some(ext.extensions.len());
            machine.extensions =
                Some(ext.extensions.iter().map(relation_pairs_named).collect());
            let ctx = Ctx::Relation(r.space());
            machine.push_report(&conjecture_check(&r)?, &ctx);
            Ok(emit(&machine, args.input.json))
        }
        Command::Search { json, states, consequences, exhaustive, samples, seed } => {
            let bounds = SearchBounds { n_states: states, n_consequences: consequences };
            let mode = if exhaustive {
                SearchMode::Exhaustive
            } else {
                SearchMode::Sampled { seed, samples }
            };
            let outcome = search_counterexample(bounds, mode)?;
            let mut machine = MachineReport::new("search");
            machine.option("states", states as u64);
            machine.option("consequences", consequences as u64);
            machine.option("exhaustive", exhaustive);
            if !exhaustive {
                machine.seed = Some(seed);
                machine.option("samples", samples);
            }
            let witness = outcome.witness.as_ref().map(|w| {
                let p = &w.structure;
                let ctx = Ctx::Structure(p);
                let act_map = |id| match &ctx {
                    Ctx::Structure(p) => (0..p.space().len())
                        .map(|s| {
                            (
                                p.space().name(s).to_string(),
                                p.scale().name(p.acts().get(id).value_at(s)).to_string(),
                            )
                        })
                        .collect(),
                    _ => unreachable!(),
                };
                JsonSearchWitness {
                    event: w
                        .event
                        .states()
                        .filter(|&s| s < p.space().len())
                        .map(|s| p.space().name(s).to_string())
                        .collect(),
                    f: act_map(w.f),
                    g: act_map(w.g),
                    relation: p
                        .relation_pairs()
                        .into_iter()
                        .map(|(e, x, y)| {
                            (
                                e.states()
                                    .filter(|&s| s < p.space().len())
                                    .map(|s| p.space().name(s).to_string())
                                    .collect(),
                                act_map(x),
                                act_map(y),
                            )
                        })
                        .collect(),
                }
            });
            machine.passed = outcome.witness.is_none();
            machine.search = Some(JsonSearch {
                states,
                consequences,
                mode: if exhaustive { "exhaustive".into() } else { "sampled".into() },
                examined: outcome.examined,
                satisfying: outcome.satisfying,
                exhausted: outcome.exhausted,
                witness_found: witness.is_some(),
                witness,
            });
            Ok(emit(&machine, json))
        }
    }
}
