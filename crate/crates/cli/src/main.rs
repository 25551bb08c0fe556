mod harness;
mod output;

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use betadiv::antichain::{
    covering_witness, extend_antichain, is_n_free, lcm_extension, max_strong_antichain,
};
use betadiv::chain::{ad_family, build_chain, verify_chain, ChainSpec};
use betadiv::filter::{d_member, divides_tilde, interpolation_check, make_filter, product_member};
use betadiv::structural::is_upward_closed;
use betadiv::{
    arith, AntichainMode, Error, FilterPresentation, FilterSpec, ProofState, Scheme, SetExpr,
};
use clap::{Parser, Subcommand};
use serde_json::Value;

use crate::output::{Report, EXIT_ERROR, EXIT_USAGE};

const GRAMMAR_HINT: &str =
    "expressions: N | P | empty | factorials | {a,b,...} | mult(n) | level(n) | \
primesIdx(r,m) | pow(e,n) | prodset(e,...) | comp(e) | union(e,e) | inter(e,e) | up(e) | down(e) | \
quot(e,n) | scale(e,n); filters: principal:<n> | gen:[e1;e2;...]";

#[derive(Parser)]
#[command(
    name = "betadiv",
    version,
    about = "Divisibility of ultrafilters through finite shadows"
)]
struct Cli {
    /// Print results as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prime factorization of a natural number.
    Factor { m: u64 },
    /// Three-valued membership of m in a set expression.
    Member {
        expr: String,
        m: u64,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Members up to a bound.
    Enumerate {
        expr: String,
        #[arg(long, default_value_t = 100)]
        bound: u64,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Whether the set is closed under taking multiples.
    Upclosed {
        expr: String,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Largest pairwise-coprime subset up to a bound, or an extension of a given one.
    Antichain {
        expr: String,
        #[arg(long, default_value_t = 1000)]
        bound: u64,
        #[arg(long, conflicts_with = "greedy")]
        exact: bool,
        #[arg(long)]
        greedy: bool,
        /// Extend this pairwise-coprime set instead of searching from scratch.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        extend: Option<Vec<u64>>,
        /// With --extend: extend inside the intersection via an lcm.
        #[arg(long, requires = "extend")]
        lcm_with: Option<String>,
    },
    /// Cover of the members up to a bound by at most k sets nN.
    Cover {
        expr: String,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 30)]
        n_max: u64,
        #[arg(long, default_value_t = 10_000)]
        bound: u64,
    },
    /// Whether no finite union of sets nN (n >= 2) contains the set.
    Nfree {
        expr: String,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Tilde-divisibility F |~ G of two filters.
    Divides {
        f: String,
        g: String,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Membership of a set in the product filter F·G.
    ProductMember {
        f: String,
        g: String,
        expr: String,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Membership of a set in D(F).
    DMember {
        f: String,
        expr: String,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Search for a | c | b with a, b in core(F) and c in core(G).
    Interp {
        f: String,
        g: String,
        #[arg(long, default_value_t = 1000)]
        bound: u64,
    },
    /// Chain of k+1 filters over an almost disjoint family.
    ChainBuild {
        #[arg(long, default_value_t = 12)]
        k: usize,
        #[arg(long, default_value = "residue")]
        scheme: String,
    },
    /// Check the separation matrix and the chain links.
    ChainVerify {
        #[arg(long, conflicts_with = "chain")]
        k: Option<usize>,
        #[arg(long, default_value = "residue")]
        scheme: String,
        /// Chain JSON as written by chain-build --json.
        #[arg(long)]
        chain: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
        /// Print every pair, not only the failures.
        #[arg(long)]
        all: bool,
    },
    /// Run verification suites by id (all when none given).
    Harness {
        ids: Vec<String>,
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        /// Seed for sampled cases; also adds seeded random expressions to the corpus.
        #[arg(long)]
        seed: Option<u64>,
        /// "default" or a file with one expression per line.
        #[arg(long, default_value = "default")]
        corpus: String,
        #[arg(long, default_value_t = 12)]
        k: usize,
        #[arg(long, default_value = "residue")]
        scheme: String,
    },
}

/// Bad input, reported with exit code 64.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn parse_expr(text: &str) -> anyhow::Result<SetExpr> {
    SetExpr::parse(text).map_err(|e| Usage(format!("cannot parse expression {text:?}: {e}")).into())
}

fn parse_scheme(text: &str) -> anyhow::Result<Scheme> {
    text.parse().map_err(|_| {
        Usage(format!(
            "unknown scheme {text:?} (expected residue or tree)"
        ))
        .into()
    })
}

fn load_filter(text: &str, budget: u64) -> anyhow::Result<FilterPresentation> {
    let spec: FilterSpec = text
        .parse()
        .map_err(|e| Usage(format!("cannot parse filter {text:?}: {e}")))?;
    Ok(make_filter(&spec, budget, false)?)
}

fn load_chain(path: &PathBuf) -> anyhow::Result<ChainSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let bad = |what: &str| Usage(format!("{}: missing or malformed {what}", path.display()));
    let family = v["family"]
        .as_array()
        .ok_or_else(|| bad("family"))?
        .iter()
        .map(|e| {
            e.as_str()
                .ok_or_else(|| bad("family entry"))
                .map_err(anyhow::Error::from)
                .and_then(parse_expr)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let links = v["links"]
        .as_array()
        .ok_or_else(|| bad("links"))?
        .iter()
        .map(|l| {
            let s = l["spec"].as_str().ok_or_else(|| bad("link spec"))?;
            s.parse::<FilterSpec>()
                .map_err(|e| Usage(format!("link {s:?}: {e}")).into())
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let scheme = v["scheme"].as_str().map(parse_scheme).transpose()?;
    Ok(ChainSpec::from_parts(family, &links, scheme)?)
}

fn with_filter(r: Report, key: &str, f: &FilterPresentation) -> Report {
    r.field(key, f.spec())
        .field(&format!("{key}_core"), f.core())
        .json_field(&format!("{key}_nonempty"), f.nonempty())
}

fn run(command: Command, json: bool) -> anyhow::Result<Report> {
    Ok(match command {
        Command::Factor { m } => {
            let f = arith::factorize(m)?;
            let shown: Vec<String> = f
                .factors
                .iter()
                .map(|&(p, e)| {
                    if e == 1 {
                        p.to_string()
                    } else {
                        format!("{p}^{e}")
                    }
                })
                .collect();
            Report::new("factor")
                .field("m", m)
                .field("factors", &f.factors)
                .field("product", shown.join(" · "))
                .field("omega", f.omega())
        }
        Command::Member { expr, m, budget } => {
            let e = parse_expr(&expr)?;
            let v = e.member(m, budget)?;
            Report::new("member")
                .field("expr", &e)
                .field("m", m)
                .verdict(&v)
        }
        Command::Enumerate {
            expr,
            bound,
            budget,
        } => {
            let e = parse_expr(&expr)?;
            let en = e.enumerate_upto(bound, budget.unwrap_or(bound))?;
            let code = if en.complete {
                0
            } else {
                ProofState::UnknownAtBound.exit_code()
            };
            Report::new("enumerate")
                .field("expr", &e)
                .field("bound", bound)
                .field("complete", en.complete)
                .field("count", en.members.len())
                .field("members", &en.members)
                .field("unknown", &en.unknown)
                .exit(code)
        }
        Command::Upclosed { expr, budget } => {
            let e = parse_expr(&expr)?;
            let v = is_upward_closed(&e, budget)?;
            Report::new("upclosed").field("expr", &e).verdict(&v)
        }
        Command::Antichain {
            expr,
            bound,
            exact,
            greedy: _,
            extend,
            lcm_with,
        } => {
            let e = parse_expr(&expr)?;
            match (extend, lcm_with) {
                (Some(x), Some(other)) => {
                    let b = parse_expr(&other)?;
                    let x: BTreeSet<u64> = x.into_iter().collect();
                    let ext = lcm_extension(&e, &b, &x, bound)?;
                    let state = ProofState::from_bool(ext.is_some());
                    Report::new("antichain")
                        .field("expr", &e)
                        .field("with", &b)
                        .field("antichain", &x)
                        .field("bound", bound)
                        .field("extension", ext)
                        .state(state)
                }
                (Some(x), None) => {
                    let x: BTreeSet<u64> = x.into_iter().collect();
                    let m = extend_antichain(&e, &x, bound)?;
                    Report::new("antichain")
                        .field("expr", &e)
                        .field("antichain", &x)
                        .field("bound", bound)
                        .field("extension", m)
                        .state(ProofState::from_bool(m.is_some()))
                }
                (None, _) => {
                    let mode = if exact {
                        AntichainMode::Exact
                    } else {
                        AntichainMode::Greedy
                    };
                    let a = max_strong_antichain(&e, bound, mode)?;
                    Report::new("antichain")
                        .field("size", a.size())
                        .field("certificate", &a)
                }
            }
        }
        Command::Cover {
            expr,
            k,
            n_max,
            bound,
        } => {
            let e = parse_expr(&expr)?;
            let c = covering_witness(&e, k, n_max, bound)?;
            let state = ProofState::from_bool(c.is_some());
            Report::new("cover")
                .field("expr", &e)
                .field("k_max", k)
                .field("n_max", n_max)
                .field("bound", bound)
                .field("cover", c)
                .state(state)
        }
        Command::Nfree { expr, budget } => {
            let e = parse_expr(&expr)?;
            let r = is_n_free(&e, budget)?;
            Report::new("nfree")
                .field("expr", &e)
                .field("cover", &r.cover)
                .field("antichain", &r.antichain)
                .verdict(&r.verdict)
        }
        Command::Divides { f, g, budget } => {
            let (f, g) = (load_filter(&f, budget)?, load_filter(&g, budget)?);
            let v = divides_tilde(&f, &g, budget)?;
            let r = with_filter(Report::new("divides"), "f", &f);
            with_filter(r, "g", &g).verdict(&v)
        }
        Command::ProductMember { f, g, expr, budget } => {
            let (f, g) = (load_filter(&f, budget)?, load_filter(&g, budget)?);
            let e = parse_expr(&expr)?;
            let v = product_member(&f, &g, &e, budget)?;
            let r = with_filter(Report::new("product-member"), "f", &f);
            with_filter(r, "g", &g).field("expr", &e).verdict(&v)
        }
        Command::DMember { f, expr, budget } => {
            let f = load_filter(&f, budget)?;
            let e = parse_expr(&expr)?;
            let v = d_member(&f, &e, budget)?;
            with_filter(Report::new("d-member"), "f", &f)
                .field("expr", &e)
                .verdict(&v)
        }
        Command::Interp { f, g, bound } => {
            let (f, g) = (load_filter(&f, bound)?, load_filter(&g, bound)?);
            let v = interpolation_check(&f, &g, bound)?;
            let r = with_filter(Report::new("interp"), "f", &f);
            with_filter(r, "g", &g).verdict(&v)
        }
        Command::ChainBuild { k, scheme } => {
            let scheme = parse_scheme(&scheme)?;
            let chain = build_chain(k, &ad_family(k, scheme)?)?.with_scheme(scheme);
            if json {
                Report::new("chain-build")
                    .field("k", chain.k)
                    .field("scheme", chain.scheme)
                    .field("family", &chain.family)
                    .field("links", &chain.links)
                    .field("prime_filters", &chain.prime_filters)
            } else {
                let mut r = Report::new("chain-build")
                    .field("k", k)
                    .field("scheme", scheme);
                for (i, a) in chain.family.iter().enumerate() {
                    r = r.text_line(format!("A{i:<3} {a}"));
                }
                for (j, l) in chain.links.iter().enumerate() {
                    r = r.text_line(format!("F{j:<3} {l}"));
                }
                r
            }
        }
        Command::ChainVerify {
            k,
            scheme,
            chain,
            bound,
            all,
        } => {
            let chain = match (chain, k) {
                (Some(path), _) => load_chain(&path)?,
                (None, k) => {
                    let k = k.unwrap_or(12);
                    let scheme = parse_scheme(&scheme)?;
                    build_chain(k, &ad_family(k, scheme)?)?.with_scheme(scheme)
                }
            };
            let report = verify_chain(&chain, bound)?;
            let decided_wrong = report.failures().any(|p| !p.verdict.is_unknown())
                || report.links.iter().any(|l| l.verdict.is_refuted());
            let code = if report.pass {
                0
            } else if decided_wrong {
                1
            } else {
                2
            };
            let failures: Vec<_> = report.failures().collect();
            let mut r = Report::new("chain-verify")
                .field("k", report.k)
                .field("bound", bound)
                .field("pass", report.pass)
                .field("failures", &failures);
            if json {
                r = r.field("links", &report.links);
                if all {
                    r = r.field("pairs", &report.pairs);
                }
                r = r.field("matrix", &report.matrix);
            } else {
                r = r.text_line("matrix (row α, column β; P proved, R refuted, ? unknown):");
                for (alpha, row) in report.matrix.iter().enumerate() {
                    let cells: String = row
                        .iter()
                        .map(|s| match s {
                            ProofState::Proved => 'P',
                            ProofState::Refuted => 'R',
                            ProofState::UnknownAtBound => '?',
                        })
                        .collect();
                    r = r.text_line(format!("  F{alpha:<3} {cells}"));
                }
                if all {
                    for p in &report.pairs {
                        r = r.text_line(format!(
                            "  β={:<3} α={:<3} {:?} {} {}",
                            p.beta,
                            p.alpha,
                            p.check,
                            p.verdict.state,
                            p.verdict
                                .certificate
                                .as_ref()
                                .map_or(String::new(), |c| c.to_string())
                        ));
                    }
                }
            }
            r.exit(code)
        }
        Command::Harness {
            ids,
            bound,
            budget,
            seed,
            corpus,
            k,
            scheme,
        } => {
            let params =
                harness::Params::load(bound, budget, seed, &corpus, k, parse_scheme(&scheme)?)?;
            let ids = harness::select(&ids)?;
            let cases = harness::run(&ids, &params);
            harness::report(&cases, &params)
        }
    })
}

fn exit_code_for(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<Usage>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::OutOfDomain(_)
            | Error::Syntax { .. }
            | Error::ParamOutOfRange(_)
            | Error::ZeroBudget
            | Error::FilterSpec(_)
            | Error::Corpus { .. }
            | Error::Precondition(_)
            | Error::NotPrime(_)
            | Error::FamilyTooSmall { .. },
        ) => EXIT_USAGE,
        _ => EXIT_ERROR,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.command, cli.json) {
        Ok(report) => {
            println!("{}", report.render(cli.json));
            ExitCode::from(report.exit as u8)
        }
        Err(err) => {
            let code = exit_code_for(&err);
            let kind = if code == EXIT_USAGE {
                "usage error"
            } else {
                "error"
            };
            if cli.json {
                let v = serde_json::json!({
                    "schema": output::SCHEMA,
                    "error": kind,
                    "message": format!("{err:#}"),
                    "exit_code": code,
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&v).expect("json renders")
                );
            } else {
                eprintln!("betadiv: {kind}: {err:#}");
            }
            if code == EXIT_USAGE {
                eprintln!("{GRAMMAR_HINT}");
            }
            ExitCode::from(code as u8)
        }
    }
}
