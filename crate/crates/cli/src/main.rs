//! Command-line front end: one subcommand per library operation family,
//! gallery digraphs and bundled algebras behind `@` names, and the
//! `paper-check` verification suite.
//!
//! Exit codes: 0 success or positive answer, 1 negative answer, 2 usage
//! or input error, 3 budget exhaustion.

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use convar::algebra::{
    free_algebra, freely_generated_digraph, generated_digraph, is_compatible, is_congruence,
    parse_algebra, parse_term_table, subuniverse_closure, term_tables, FiniteAlgebra, TermTable,
};
use convar::conditions::{
    check_identity_system, collapse_report, parse_witness, rho_digraph, search_identity_witness,
    Endpoint,
};
use convar::connectivity::{
    equivalence, find_path, h_equivalence, hm_bound, radical, verify_chain, EquivalenceKind,
    PathMode,
};
use convar::digraph::{
    enumerate_homomorphisms, gallery, induced, is_retract, parse_digraph, power, quotient, Digraph,
};
use convar::polymorph::{
    filter_check, find_polymorphisms, is_projection, major_subsets, meet_restriction_check,
    olsak_check, olsak_search, PolymorphismQuery,
};
use convar::suite::run_suite;
use convar::{Budget, Error, Partition, StopReason};

#[derive(Parser)]
#[command(
    name = "convar",
    version,
    about = "Connectivity equivalences and polymorphism analysis of finite digraphs over finite algebras",
    after_help = "Digraph arguments accept a file path, `-` for stdin, or a gallery name: \
                  @D @K @N @C<n> @fig3. Algebra arguments accept a file path, `-`, or a bundled \
                  name: @sl2 @z2aff @chain3meet."
)]
struct Cli {
    /// Node-expansion budget for searches.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget: u64,
    /// Element cap for free-algebra closures.
    #[arg(long, global = true, default_value_t = 50_000)]
    max_elements: usize,
    /// Table cap for term-operation closures.
    #[arg(long, global = true, default_value_t = 200_000)]
    max_terms: usize,
    /// Vertex cap for the partition-enumeration oracle.
    #[arg(long, global = true, default_value_t = 8)]
    oracle_cap: usize,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Weak,
    Strong,
    Extreme,
    Radical,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Oriented,
    Directed,
    Symmetric,
}

#[derive(Clone, Copy, ValueEnum)]
enum EndpointArg {
    Y,
    Z,
}

#[derive(Args)]
struct DigraphInput {
    /// Digraph: file path, `-`, or @gallery name.
    #[arg(short = 'i', long = "input")]
    input: String,
}

#[derive(Subcommand)]
enum Command {
    /// Connectivity equivalence classes of a digraph.
    Components {
        #[command(flatten)]
        digraph: DigraphInput,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Print every radical stage, not just the result.
        #[arg(long)]
        trace: bool,
    },
    /// Quotient digraph by a partition such as '{{0,1},{2}}'.
    Quotient {
        #[command(flatten)]
        digraph: DigraphInput,
        #[arg(long)]
        partition: String,
    },
    /// Componentwise power of a digraph.
    Power {
        #[command(flatten)]
        digraph: DigraphInput,
        #[arg(long, short = 'k')]
        exponent: usize,
    },
    /// Subdigraph induced by a vertex subset.
    Induced {
        #[command(flatten)]
        digraph: DigraphInput,
        /// Vertices to keep, e.g. --keep "0 2".
        #[arg(long)]
        keep: String,
    },
    /// Enumerate homomorphisms from a pattern digraph into the input.
    Homs {
        #[command(flatten)]
        digraph: DigraphInput,
        #[arg(long)]
        pattern: String,
        /// Pre-assign pattern vertices, e.g. --fix 0:2 --fix 1:0.
        #[arg(long = "fix")]
        fixed: Vec<String>,
        #[arg(long, default_value_t = usize::MAX)]
        limit: usize,
    },
    /// Test whether the input digraph retracts onto a smaller one.
    Retract {
        #[command(flatten)]
        digraph: DigraphInput,
        /// The candidate retract.
        #[arg(long)]
        onto: String,
    },
    /// Equivalence generated by ranges of homomorphisms from a template.
    Hequiv {
        #[command(flatten)]
        digraph: DigraphInput,
        #[arg(long)]
        pattern: String,
    },
    /// Shortest oriented/directed/symmetric path between two vertices.
    Path {
        #[command(flatten)]
        digraph: DigraphInput,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, value_enum)]
        mode: ModeArg,
    },
    /// Least n such that every edge has a return path of length ≤ n−1.
    Hmbound {
        #[command(flatten)]
        digraph: DigraphInput,
    },
    /// Subuniverse generated by a set of elements.
    Closure {
        #[arg(long)]
        algebra: String,
        /// Seed elements, e.g. --seed "0 2".
        #[arg(long)]
        seed: String,
    },
    /// Test whether a digraph's edge relation is closed under an algebra.
    Compatible {
        #[command(flatten)]
        digraph: DigraphInput,
        #[arg(long)]
        algebra: String,
    },
    /// Test whether a partition is a congruence of an algebra.
    Congruence {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        partition: String,
    },
    /// Digraph generated inside an algebra from an embedded seed digraph.
    Generate {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        seed: String,
        /// Universe elements for the seed vertices, e.g. --embed "0 1 2"
        /// (defaults to the identity embedding).
        #[arg(long)]
        embed: Option<String>,
    },
    /// Free algebra on k generators, or the digraph freely generated by a
    /// seed digraph.
    Free {
        #[arg(long)]
        algebra: String,
        #[arg(long, conflicts_with = "rank")]
        seed: Option<String>,
        #[arg(long)]
        rank: Option<usize>,
    },
    /// All k-ary term operations of an algebra as tables.
    Terms {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        idempotent: bool,
    },
    /// Enumerate polymorphisms of a digraph.
    Polymorphisms {
        #[command(flatten)]
        digraph: DigraphInput,
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        idempotent: bool,
        #[arg(long, default_value_t = usize::MAX)]
        limit: usize,
    },
    /// Major-subset family of an idempotent operation on three elements.
    Major {
        /// Term table file or `-` for stdin.
        #[arg(long)]
        term: String,
    },
    /// Check a 6-ary table for the bracket identities, or search an
    /// algebra's terms for one.
    Olsak {
        #[arg(long, conflicts_with = "term")]
        algebra: Option<String>,
        #[arg(long)]
        term: Option<String>,
    },
    /// Validate a serialized identity witness against an algebra.
    IdentityCheck {
        #[arg(long)]
        algebra: String,
        /// Witness file or `-` for stdin.
        #[arg(long)]
        witness: String,
    },
    /// Search for an identity witness in the freely generated 3-cycle.
    IdentitySearch {
        #[arg(long)]
        algebra: String,
        #[arg(long, value_enum)]
        endpoint: EndpointArg,
        #[arg(long, default_value_t = 16)]
        max_n: usize,
    },
    /// One-step relation x→y iff ∃u: x→u and u↔y.
    Rho {
        #[command(flatten)]
        digraph: DigraphInput,
    },
    /// Which of the four connectivity equivalences coincide.
    Collapse {
        #[command(flatten)]
        digraph: DigraphInput,
    },
    /// Run the bundled verification suite.
    PaperCheck {
        /// Only run checks whose name contains this substring.
        #[arg(long)]
        only: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = Budget {
        expansions: cli.budget,
        free_elements: cli.max_elements,
        term_tables: cli.max_terms,
        oracle_cap: cli.oracle_cap,
    };
    match run(&cli.command, &budget, cli.format) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Budget { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn read_input(arg: &str) -> convar::Result<String> {
    if arg == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Precondition(format!("cannot read stdin: {e}")))?;
        return Ok(buf);
    }
    std::fs::read_to_string(arg)
        .map_err(|e| Error::Precondition(format!("cannot read {arg}: {e}")))
}

fn load_digraph(arg: &str) -> convar::Result<Digraph> {
    if let Some(name) = arg.strip_prefix('@') {
        return gallery(name);
    }
    parse_digraph(&read_input(arg)?)
}

fn load_algebra(arg: &str) -> convar::Result<FiniteAlgebra> {
    if let Some(name) = arg.strip_prefix('@') {
        return FiniteAlgebra::bundled(name)
            .ok_or_else(|| Error::Precondition(format!("no bundled algebra named `{name}`")));
    }
    parse_algebra(&read_input(arg)?)
}

fn load_term(arg: &str) -> convar::Result<TermTable> {
    parse_term_table(&read_input(arg)?)
}

fn parse_usize_list(s: &str) -> convar::Result<Vec<usize>> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse()
                .map_err(|_| Error::Precondition(format!("expected a number, got `{tok}`")))
        })
        .collect()
}

fn parse_partition(s: &str) -> convar::Result<Partition> {
    s.parse()
}

fn print_digraph(g: &Digraph, format: Format) {
    if format == Format::Human {
        println!("# {} vertices, {} edges", g.n(), g.edge_count());
    }
    print!("{}", g.to_text());
}

fn image_words(map: &convar::VertexMap) -> String {
    map.image()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn stop_code(stop: StopReason, expansions: u64, found: usize) -> convar::Result<()> {
    if stop == StopReason::BudgetExhausted {
        return Err(Error::Budget {
            spent: expansions,
            found,
        });
    }
    Ok(())
}

fn run(command: &Command, budget: &Budget, format: Format) -> convar::Result<ExitCode> {
    let ok = ExitCode::SUCCESS;
    let negative = ExitCode::from(1);
    match command {
        Command::Components { digraph, kind, trace } => {
            let g = load_digraph(&digraph.input)?;
            match kind {
                KindArg::Radical => {
                    let t = radical(&g);
                    if *trace {
                        for (i, stage) in t.stages.iter().enumerate() {
                            println!("stage{i}={stage}");
                        }
                    }
                    println!("{}", machine_or(format, format!("partition={}", t.result), t.result.to_string()));
                }
                other => {
                    let kind = match other {
                        KindArg::Weak => EquivalenceKind::Weak,
                        KindArg::Strong => EquivalenceKind::Strong,
                        KindArg::Extreme => EquivalenceKind::Extreme,
                        KindArg::Radical => unreachable!(),
                    };
                    let p = equivalence(&g, kind);
                    println!("{}", machine_or(format, format!("partition={p}"), p.to_string()));
                }
            }
            Ok(ok)
        }
        Command::Quotient { digraph, partition } => {
            let g = load_digraph(&digraph.input)?;
            let p = parse_partition(partition)?;
            print_digraph(&quotient(&g, &p)?, format);
            Ok(ok)
        }
        Command::Power { digraph, exponent } => {
            let g = load_digraph(&digraph.input)?;
            print_digraph(&power(&g, *exponent, budget)?, format);
            Ok(ok)
        }
        Command::Induced { digraph, keep } => {
            let g = load_digraph(&digraph.input)?;
            let keep = parse_usize_list(keep)?;
            print_digraph(&induced(&g, &keep)?, format);
            Ok(ok)
        }
        Command::Homs { digraph, pattern, fixed, limit } => {
            let g = load_digraph(&digraph.input)?;
            let h = load_digraph(pattern)?;
            let mut fixed_pairs = Vec::new();
            for f in fixed {
                let (a, b) = f.split_once(':').ok_or_else(|| {
                    Error::Precondition(format!("--fix wants <vertex>:<image>, got `{f}`"))
                })?;
                let a = a.trim().parse().map_err(|_| {
                    Error::Precondition(format!("bad vertex in --fix `{f}`"))
                })?;
                let b = b.trim().parse().map_err(|_| {
                    Error::Precondition(format!("bad image in --fix `{f}`"))
                })?;
                fixed_pairs.push((a, b));
            }
            let homs = enumerate_homomorphisms(&h, &g, &fixed_pairs, *limit, budget.expansions)?;
            stop_code(homs.stop, homs.expansions, homs.items.len())?;
            for map in &homs.items {
                println!("{}", machine_or(format, format!("map={}", image_words(map)), map.to_string()));
            }
            println!(
                "{}",
                machine_or(
                    format,
                    format!("count={} complete={}", homs.items.len(), homs.is_complete()),
                    format!(
                        "{} homomorphisms{}",
                        homs.items.len(),
                        if homs.is_complete() { "" } else { " (limit reached)" }
                    ),
                )
            );
            Ok(ok)
        }
        Command::Retract { digraph, onto } => {
            let g = load_digraph(&digraph.input)?;
            let h = load_digraph(onto)?;
            match is_retract(&h, &g, budget)? {
                Some((beta, alpha)) => {
                    println!(
                        "{}",
                        machine_or(
                            format,
                            format!(
                                "found=true coretraction={} retraction={}",
                                image_words(&beta),
                                image_words(&alpha)
                            ),
                            format!("coretraction {beta}\nretraction   {alpha}"),
                        )
                    );
                    Ok(ok)
                }
                None => {
                    println!("{}", machine_or(format, "found=false".into(), "no retraction".into()));
                    Ok(negative)
                }
            }
        }
        Command::Hequiv { digraph, pattern } => {
            let g = load_digraph(&digraph.input)?;
            let h = load_digraph(pattern)?;
            let p = h_equivalence(&g, &h, budget)?;
            println!("{}", machine_or(format, format!("partition={p}"), p.to_string()));
            Ok(ok)
        }
        Command::Path { digraph, from, to, mode } => {
            let g = load_digraph(&digraph.input)?;
            let mode = match mode {
                ModeArg::Oriented => PathMode::Oriented,
                ModeArg::Directed => PathMode::Directed,
                ModeArg::Symmetric => PathMode::Symmetric,
            };
            match find_path(&g, *from, *to, mode)? {
                Some(path) => {
                    let words: Vec<String> = path.iter().map(|v| v.to_string()).collect();
                    println!(
                        "{}",
                        machine_or(
                            format,
                            format!("path={}", words.join(" ")),
                            words.join(" -> "),
                        )
                    );
                    Ok(ok)
                }
                None => {
                    println!("{}", machine_or(format, "path=none".into(), "no path".into()));
                    Ok(negative)
                }
            }
        }
        Command::Hmbound { digraph } => {
            let g = load_digraph(&digraph.input)?;
            match hm_bound(&g)? {
                Some(bound) => {
                    println!("{}", machine_or(format, format!("bound={bound}"), bound.to_string()));
                    Ok(ok)
                }
                None => {
                    println!("{}", machine_or(format, "bound=none".into(), "no finite bound".into()));
                    Ok(negative)
                }
            }
        }
        Command::Closure { algebra, seed } => {
            let a = load_algebra(algebra)?;
            let seed = parse_usize_list(seed)?;
            let closed = subuniverse_closure(&a, &seed)?;
            let words: Vec<String> = closed.iter().map(|v| v.to_string()).collect();
            println!(
                "{}",
                machine_or(format, format!("closure={}", words.join(" ")), format!("{{{}}}", words.join(",")))
            );
            Ok(ok)
        }
        Command::Compatible { digraph, algebra } => {
            let g = load_digraph(&digraph.input)?;
            let a = load_algebra(algebra)?;
            bool_result(is_compatible(&g, &a)?, format)
        }
        Command::Congruence { algebra, partition } => {
            let a = load_algebra(algebra)?;
            let p = parse_partition(partition)?;
            bool_result(is_congruence(&a, &p)?, format)
        }
        Command::Generate { algebra, seed, embed } => {
            let a = load_algebra(algebra)?;
            let seed = load_digraph(seed)?;
            let embedding = match embed {
                Some(e) => parse_usize_list(e)?,
                None => (0..seed.n()).collect(),
            };
            print_digraph(&generated_digraph(&a, &seed, &embedding)?, format);
            Ok(ok)
        }
        Command::Free { algebra, seed, rank } => {
            let a = load_algebra(algebra)?;
            match (seed, rank) {
                (Some(seed), _) => {
                    let seed = load_digraph(seed)?;
                    let fg = freely_generated_digraph(&a, &seed, budget)?;
                    let gens: Vec<String> =
                        fg.generators.iter().map(|v| v.to_string()).collect();
                    println!(
                        "{}",
                        machine_or(
                            format,
                            format!("generators={}", gens.join(" ")),
                            format!("# generators at {}", gens.join(" ")),
                        )
                    );
                    print_digraph(&fg.digraph, format);
                }
                (None, Some(rank)) => {
                    let fr = free_algebra(&a, *rank, budget)?;
                    println!(
                        "{}",
                        machine_or(
                            format,
                            format!("elements={}", fr.algebra.size()),
                            format!("free algebra on {rank} generators: {} elements", fr.algebra.size()),
                        )
                    );
                    for t in &fr.element_tables {
                        print!("{}", t.to_text());
                    }
                }
                (None, None) => {
                    return Err(Error::Precondition("free needs --seed or --rank".into()));
                }
            }
            Ok(ok)
        }
        Command::Terms { algebra, arity, idempotent } => {
            let a = load_algebra(algebra)?;
            let tables = term_tables(&a, *arity, *idempotent, budget)?;
            println!(
                "{}",
                machine_or(
                    format,
                    format!("count={}", tables.len()),
                    format!("{} term tables", tables.len()),
                )
            );
            for t in &tables {
                print!("{}", t.to_text());
            }
            Ok(ok)
        }
        Command::Polymorphisms { digraph, arity, idempotent, limit } => {
            let g = load_digraph(&digraph.input)?;
            let query = PolymorphismQuery::new(g, *arity)
                .idempotent(*idempotent)
                .limit(*limit)
                .budget(budget.expansions);
            let found = find_polymorphisms(&query)?;
            stop_code(found.stop, found.expansions, found.items.len())?;
            for t in &found.items {
                print!("{}", t.to_text());
                match is_projection(t) {
                    Some(i) => println!("{}", machine_or(format, format!("projection={i}"), format!("# projection {i}"))),
                    None => {
                        if format == Format::Machine {
                            println!("projection=none");
                        }
                    }
                }
            }
            println!(
                "{}",
                machine_or(
                    format,
                    format!("count={} complete={}", found.items.len(), found.is_complete()),
                    format!(
                        "{} polymorphisms{}",
                        found.items.len(),
                        if found.is_complete() { "" } else { " (limit reached)" }
                    ),
                )
            );
            Ok(ok)
        }
        Command::Major { term } => {
            let t = load_term(term)?;
            let fam = major_subsets(&t)?;
            let filter = filter_check(&fam);
            println!(
                "{}",
                machine_or(
                    format,
                    format!("family={fam} filter={filter}"),
                    format!("major subsets {fam}\nfilter: {filter}"),
                )
            );
            if let Some(least) = fam.least_members() {
                let words: Vec<String> = least.iter().map(|v| v.to_string()).collect();
                let meet = meet_restriction_check(&t, &fam)?;
                println!(
                    "{}",
                    machine_or(
                        format,
                        format!("least={} meet={meet}", words.join(" ")),
                        format!("least {{{}}}, meet restriction: {meet}", words.join(",")),
                    )
                );
            }
            Ok(ok)
        }
        Command::Olsak { algebra, term } => match (algebra, term) {
            (Some(algebra), None) => {
                let a = load_algebra(algebra)?;
                match olsak_search(&a, budget)? {
                    Some(t) => {
                        println!("{}", machine_or(format, "found=true".into(), "term found".into()));
                        print!("{}", t.to_text());
                        Ok(ok)
                    }
                    None => {
                        println!("{}", machine_or(format, "found=false".into(), "no term".into()));
                        Ok(negative)
                    }
                }
            }
            (None, Some(term)) => {
                let t = load_term(term)?;
                bool_result(olsak_check(&t)?, format)
            }
            _ => Err(Error::Precondition("olsak needs exactly one of --algebra or --term".into())),
        },
        Command::IdentityCheck { algebra, witness } => {
            let a = load_algebra(algebra)?;
            let w = parse_witness(&read_input(witness)?)?;
            bool_result(check_identity_system(&a, &w)?, format)
        }
        Command::IdentitySearch { algebra, endpoint, max_n } => {
            let a = load_algebra(algebra)?;
            let endpoint = match endpoint {
                EndpointArg::Y => Endpoint::Y,
                EndpointArg::Z => Endpoint::Z,
            };
            match search_identity_witness(&a, endpoint, *max_n, budget)? {
                Some(w) => {
                    print!("{}", w.to_text());
                    Ok(ok)
                }
                None => {
                    println!("{}", machine_or(format, "found=false".into(), "no witness".into()));
                    Ok(negative)
                }
            }
        }
        Command::Rho { digraph } => {
            let g = load_digraph(&digraph.input)?;
            print_digraph(&rho_digraph(&g), format);
            Ok(ok)
        }
        Command::Collapse { digraph } => {
            let g = load_digraph(&digraph.input)?;
            let r = collapse_report(&g);
            if format == Format::Machine {
                println!("weak={}", r.weak);
                println!("strong={}", r.strong);
                println!("radical={}", r.radical);
                println!("extreme={}", r.extreme);
                println!(
                    "weak_eq_strong={} strong_eq_radical={} radical_eq_extreme={} weak_eq_extreme={} strong_eq_extreme={}",
                    r.weak_eq_strong,
                    r.strong_eq_radical,
                    r.radical_eq_extreme,
                    r.weak_eq_extreme,
                    r.strong_eq_extreme
                );
            } else {
                println!("{r}");
                let chain = verify_chain(&g);
                println!(
                    "chain inclusions: {}",
                    if chain.all_hold() { "hold" } else { "VIOLATED" }
                );
            }
            Ok(ok)
        }
        Command::PaperCheck { only } => {
            let results = run_suite(only.as_deref(), budget);
            if results.is_empty() {
                return Err(Error::Precondition(format!(
                    "no check matches `{}`",
                    only.as_deref().unwrap_or("")
                )));
            }
            let mut all = true;
            for r in &results {
                all &= r.pass;
                if format == Format::Machine {
                    println!("check={} pass={}", r.name, r.pass);
                } else {
                    println!("{}", r.line());
                }
            }
            Ok(if all { ok } else { negative })
        }
    }
}

fn bool_result(value: bool, format: Format) -> convar::Result<ExitCode> {
    println!(
        "{}",
        machine_or(format, format!("result={value}"), value.to_string())
    );
    Ok(if value { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn machine_or(format: Format, machine: String, human: String) -> String {
    match format {
        Format::Machine => machine,
        Format::Human => human,
    }
}

