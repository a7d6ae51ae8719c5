use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use fusionlab::arith::prime_divisors;
use fusionlab::builtin::builtin_group;
use fusionlab::classify::check_sylow;
use fusionlab::fusion::{ClosureKind, FusionContext};
use fusionlab::io::{builtin_corpus, load_corpus, load_group, CorpusEntry};
use fusionlab::normality::{equivalence_suite_in, NormalityEvaluator, PredicateKind, Witness};
use fusionlab::ops::{structure_label, sylow_containing, sylow_subgroup};
use fusionlab::report::{analyze, to_text, write_report, EquivalenceRecord, Format, Payload, ReportDocument};
use fusionlab::verify::{all_theorem_ids, run_suite, PrimeSelection, SuiteInput, SuiteOptions};
use fusionlab::{Caps, Error, Group, Permutation, Result};

/// Fusion systems of small permutation groups.
#[derive(Parser, Debug)]
#[command(name = "fusionlab", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Largest group order that will be enumerated.
    #[arg(long, global = true, default_value_t = Caps::default().order)]
    order_cap: usize,
    /// Largest number of subgroups held in one lattice.
    #[arg(long, global = true, default_value_t = Caps::default().subgroups)]
    subgroup_cap: usize,
    /// Worker threads (0 uses the default pool size).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Accepted for script compatibility; every algorithm is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the Sylow subgroup, essentials, O_p, chain and classification.
    Analyze {
        #[arg(long)]
        group: String,
        #[arg(long)]
        prime: u64,
        /// Also write the JSON report to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Evaluate one predicate on a subgroup given by generators.
    Predicate {
        #[arg(long)]
        group: String,
        #[arg(long)]
        prime: u64,
        /// JSON list of generators, each a list of cycles, e.g. '[[[0,1],[2,3]]]'.
        #[arg(long)]
        subgroup: String,
        /// A predicate label, or semi_invariant, strongly_closed, weakly_closed.
        #[arg(long)]
        kind: String,
    },
    /// Run registered theorems on a group or a corpus.
    Check {
        /// A theorem id, or `all`.
        #[arg(long, default_value = "all")]
        theorem: String,
        #[arg(long, conflicts_with = "corpus")]
        group: Option<String>,
        /// A corpus file, or `builtin`.
        #[arg(long)]
        corpus: Option<String>,
        /// A prime, or `all` for every prime divisor.
        #[arg(long, default_value = "all")]
        prime: String,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also write a text summary to this path.
        #[arg(long)]
        text: Option<PathBuf>,
        /// Rescan each template with its branch rules dropped and report the difference.
        #[arg(long)]
        branch_fidelity: bool,
        /// Print only the totals line.
        #[arg(long)]
        quiet: bool,
    },
    /// Run the predicate equivalence suite over every subgroup of S.
    Equivalences {
        #[arg(long)]
        group: String,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Capacity { .. } => 3,
        Error::Io { .. } | Error::Invariant(_) => 1,
        _ => 2,
    }
}

fn load(spec: &str, caps: Caps) -> Result<(String, Arc<Group>)> {
    match spec.strip_prefix("builtin:") {
        Some(name) => {
            let entry = builtin_corpus().into_iter().find(|e| e.name == name);
            let g = match &entry {
                Some(e) => e.load(caps)?,
                None => builtin_group(name, caps)?,
            };
            Ok((name.to_string(), g))
        }
        None => load_group(spec, caps),
    }
}

fn parse_generators(text: &str, degree: usize) -> Result<Vec<Permutation>> {
    let cycles: Vec<Vec<Vec<usize>>> = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cycles.iter().map(|c| Permutation::from_cycles(degree, c)).collect()
}

fn print_witness(g: &Group, w: &Option<Witness>) {
    let show = |e| g.perm(e).to_string();
    match w {
        None => println!("witness: none"),
        Some(Witness::Conjugators(pairs)) => {
            println!("witness: {} conjugate(s) realised inside <H, H^g>", pairs.len());
            for (x, k) in pairs {
                println!("  g = {}  k = {}", show(*x), show(*k));
            }
        }
        Some(Witness::Conjugate(x)) => println!("witness: violating g = {}", show(*x)),
        Some(Witness::Intermediate { k, g: x }) => {
            println!(
                "witness: K = {} (order {}), g = {} normalizes K but not H",
                structure_label(k),
                k.order(),
                show(*x)
            )
        }
        Some(Witness::Supplement(t)) => {
            println!("witness: supplement T of order {} generated by", t.order());
            for p in t.generator_perms() {
                println!("  {p}");
            }
        }
    }
}

fn emit(doc: &ReportDocument, json: &Option<PathBuf>) -> Result<()> {
    if let Some(path) = json {
        write_report(doc, path, Format::Json)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    let caps = Caps {
        order: cli.global.order_cap,
        subgroups: cli.global.subgroup_cap,
        ..Caps::default()
    };
    if cli.global.threads > 0 {
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
            .map_err(|e| Error::Invariant(e.to_string()))?;
    }
    if let Some(seed) = cli.global.seed {
        log::debug!("seed {seed} ignored: all algorithms are deterministic");
    }
    match cli.command {
        Command::Analyze { group, prime, json } => {
            let (name, g) = load(&group, caps)?;
            let record = analyze(&name, &g, prime)?;
            let doc = ReportDocument::new(caps, Payload::Analysis(record));
            print!("{}", to_text(&doc));
            emit(&doc, &json)?;
            Ok(0)
        }
        Command::Predicate {
            group,
            prime,
            subgroup,
            kind,
        } => {
            let (_, g) = load(&group, caps)?;
            let gens = parse_generators(&subgroup, g.degree())?;
            let h = g.subgroup_from_perms(&gens)?;
            let s = if h.is_trivial() {
                sylow_subgroup(&g, prime)?
            } else {
                sylow_containing(&g, prime, &h)?
            };
            check_sylow(&g, &s, prime)?;
            println!(
                "H: {} (order {}), S order {}",
                structure_label(&h),
                h.order(),
                s.order()
            );
            let closure = match kind.as_str() {
                "semi_invariant" => Some(ClosureKind::SemiInvariant),
                "strongly_closed" => Some(ClosureKind::StronglyClosed),
                "weakly_closed" => Some(ClosureKind::WeaklyClosed),
                _ => None,
            };
            match closure {
                Some(ck) => {
                    let ctx = FusionContext::with_sylow(&g, &s, prime)?;
                    let r = ctx.closure_predicate(&h, ck)?;
                    println!("{kind}: {}", r.holds);
                    if let Some(w) = r.counterwitness {
                        if let Some(x) = w.element {
                            println!("witness: element {}", g.perm(x));
                        }
                        println!("witness: conjugator {}", g.perm(w.conjugator));
                        if let Some(k) = w.intermediate {
                            println!("witness: intermediate K of order {}", k.order());
                        }
                    }
                }
                None => {
                    let pk: PredicateKind = kind.parse()?;
                    let r = NormalityEvaluator::new(&g, &s)?.evaluate(&h, pk)?;
                    println!("{pk}: {}", r.holds);
                    print_witness(&g, &r.witness);
                }
            }
            Ok(0)
        }
        Command::Check {
            theorem,
            group,
            corpus,
            prime,
            json,
            text,
            branch_fidelity,
            quiet,
        } => {
            let ids = if theorem == "all" {
                all_theorem_ids()
            } else {
                vec![theorem]
            };
            let inputs: Vec<SuiteInput> = match (group, corpus) {
                (Some(spec), None) => {
                    let (name, g) = load(&spec, caps)?;
                    vec![SuiteInput { name, group: Ok(g) }]
                }
                (None, Some(c)) => {
                    let entries: Vec<CorpusEntry> = if c == "builtin" {
                        builtin_corpus()
                    } else {
                        load_corpus(&c)?
                    };
                    entries
                        .iter()
                        .map(|e| SuiteInput {
                            name: e.name.clone(),
                            group: e.load(caps),
                        })
                        .collect()
                }
                _ => return Err(Error::Validation("give exactly one of --group or --corpus".into())),
            };
            let primes = if prime == "all" {
                PrimeSelection::AllDivisors
            } else {
                let p = prime
                    .parse::<u64>()
                    .map_err(|_| Error::Validation(format!("`{prime}` is neither a prime nor `all`")))?;
                PrimeSelection::Only(vec![p])
            };
            let start = Instant::now();
            let report = run_suite(
                &inputs,
                &ids,
                &SuiteOptions {
                    primes,
                    branch_fidelity,
                },
            )?;
            log::info!("suite finished in {:.2?}", start.elapsed());
            let totals = report.totals;
            let quarantined = !report.quarantined.is_empty();
            let doc = ReportDocument::new(caps, Payload::Suite(report));
            let rendered = to_text(&doc);
            if quiet {
                print!(
                    "{}",
                    rendered.lines().last().map(|l| format!("{l}\n")).unwrap_or_default()
                );
            } else {
                print!("{rendered}");
            }
            emit(&doc, &json)?;
            if let Some(path) = text {
                write_report(&doc, path, Format::Text)?;
            }
            Ok(if totals.counterexample > 0 {
                4
            } else if totals.errors > 0 {
                3
            } else if quarantined {
                2
            } else {
                0
            })
        }
        Command::Equivalences { group, prime, json } => {
            let (name, g) = load(&group, caps)?;
            if !(g.order() as u64).is_multiple_of(prime) {
                let divisors = prime_divisors(g.order() as u64);
                return Err(Error::Validation(format!(
                    "{prime} does not divide |G| = {}; prime divisors are {divisors:?}",
                    g.order()
                )));
            }
            let ctx = FusionContext::new(&g, prime)?;
            let report = equivalence_suite_in(&ctx)?;
            let violations = report.violations.len();
            let doc = ReportDocument::new(
                caps,
                Payload::Equivalences(EquivalenceRecord {
                    group_name: name,
                    report,
                }),
            );
            print!("{}", to_text(&doc));
            emit(&doc, &json)?;
            Ok(if violations > 0 { 4 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
