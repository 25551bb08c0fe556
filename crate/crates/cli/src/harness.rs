//! Verification suites, one per lemma id. Each suite runs many small cases
//! and reports counts plus replayable counterexamples.

use std::collections::BTreeSet;
use std::fs;
use std::thread;

use betadiv::antichain::{
    extend_antichain, greedy_antichain, is_n_free, lcm_extension, max_strong_antichain,
    structural_cover,
};
use betadiv::arith::{self, PrimeQuery};
use betadiv::chain::{ad_family, build_chain, verify_chain, PairCheck};
use betadiv::corpus::{augment, corpus_filters, default_corpus, parse_corpus};
use betadiv::filter::{
    d_member, divides_tilde, filter_member, interpolation_check, make_filter, product_member,
};
use betadiv::structural::{is_prime_set, is_upward_closed, quotient_case_rule};
use betadiv::{
    AntichainMode, Certificate, FilterPresentation, FilterSpec, ProofState, Scheme, SetExpr,
    Verdict,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{shell_line, Report};
use crate::Usage;

pub const LEMMA_IDS: [&str; 11] = [
    "L2.1a", "L2.1b", "T2.2", "T3.3", "L3.4-eq3", "E3.5b", "L3.7", "T4.2", "L5.3", "T5.4ii", "T5.5",
];

/// Random expressions added to the corpus when a seed is given.
const AUGMENT: usize = 20;
const MAX_COUNTEREXAMPLES: usize = 20;

pub struct Params {
    pub bound: Option<u64>,
    pub budget: u64,
    pub seed: u64,
    pub corpus: Vec<SetExpr>,
    pub corpus_name: String,
    pub k: usize,
    pub scheme: Scheme,
}

impl Params {
    pub fn load(
        bound: Option<u64>,
        budget: u64,
        seed: Option<u64>,
        corpus: &str,
        k: usize,
        scheme: Scheme,
    ) -> anyhow::Result<Self> {
        if budget == 0 || bound == Some(0) {
            return Err(Usage("--bound and --budget must be at least 1".into()).into());
        }
        let base = if corpus == "default" {
            default_corpus()
        } else {
            let text = fs::read_to_string(corpus)
                .map_err(|e| Usage(format!("reading corpus {corpus}: {e}")))?;
            parse_corpus(&text)?
        };
        let corpus_exprs = match seed {
            Some(s) => augment(&base, s, AUGMENT),
            None => base,
        };
        Ok(Params {
            bound,
            budget,
            seed: seed.unwrap_or(0),
            corpus: corpus_exprs,
            corpus_name: corpus.to_owned(),
            k,
            scheme,
        })
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
    }

    fn filters(&self) -> betadiv::Result<Vec<FilterPresentation>> {
        corpus_filters(&self.corpus, self.budget)
    }
}

pub fn select(ids: &[String]) -> anyhow::Result<Vec<&'static str>> {
    if ids.is_empty() || ids.iter().any(|i| i == "all") {
        return Ok(LEMMA_IDS.to_vec());
    }
    ids.iter()
        .map(|id| {
            LEMMA_IDS
                .iter()
                .find(|&&known| known == id)
                .copied()
                .ok_or_else(|| {
                    Usage(format!(
                        "unknown lemma id {id:?}; known ids: {}",
                        LEMMA_IDS.join(", ")
                    ))
                    .into()
                })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub what: String,
    /// The verdict the replay command reproduces, when it is a verdict.
    pub observed: Option<ProofState>,
    pub replay: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnessCase {
    pub lemma_id: &'static str,
    pub parameters: Value,
    pub outcome: Outcome,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub counterexamples: Vec<Counterexample>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub log: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Default)]
struct Tally {
    passed: usize,
    failed: usize,
    skipped: usize,
    counterexamples: Vec<Counterexample>,
    log: Vec<String>,
}

impl Tally {
    fn pass(&mut self) {
        self.passed += 1;
    }

    fn skip(&mut self) {
        self.skipped += 1;
    }

    fn fail(&mut self, what: String, observed: Option<ProofState>, replay: &[&str]) {
        self.failed += 1;
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            let mut argv = vec!["betadiv".to_owned()];
            argv.extend(replay.iter().map(|s| s.to_string()));
            self.counterexamples.push(Counterexample {
                what,
                observed,
                replay: argv,
            });
        }
    }

    /// Counts a check whose expected outcome is Proved.
    fn expect_proved(&mut self, v: &Verdict, what: impl FnOnce() -> String, replay: &[&str]) {
        match v.state {
            ProofState::Proved => self.pass(),
            ProofState::UnknownAtBound => self.skip(),
            ProofState::Refuted => self.fail(what(), Some(v.state), replay),
        }
    }

    fn finish(self, lemma_id: &'static str, parameters: Value) -> HarnessCase {
        let outcome = if self.failed > 0 {
            Outcome::Fail
        } else if self.passed > 0 {
            Outcome::Pass
        } else {
            Outcome::Skipped
        };
        HarnessCase {
            lemma_id,
            parameters,
            outcome,
            passed: self.passed,
            failed: self.failed,
            skipped: self.skipped,
            counterexamples: self.counterexamples,
            log: self.log,
            error: None,
        }
    }
}

type Suite = fn(&Params) -> betadiv::Result<HarnessCase>;

fn suite(id: &str) -> Suite {
    match id {
        "L2.1a" => quotient_rule,
        "L2.1b" => prime_up_fast_path,
        "T2.2" => euclid,
        "T3.3" => principal_divisibility,
        "L3.4-eq3" => interpolation,
        "E3.5b" => factorial_shadow,
        "L3.7" => scaling,
        "T4.2" => finite_chain,
        "L5.3" => duality,
        "T5.4ii" => antichain_extension,
        "T5.5" => lcm_closure,
        other => unreachable!("unvalidated lemma id {other}"),
    }
}

/// Runs the suites concurrently; results come back in the order of `ids`.
pub fn run(ids: &[&'static str], params: &Params) -> Vec<HarnessCase> {
    thread::scope(|s| {
        let handles: Vec<_> = ids
            .iter()
            .map(|&id| (id, s.spawn(move || suite(id)(params))))
            .collect();
        handles
            .into_iter()
            .map(|(id, h)| match h.join() {
                Ok(Ok(case)) => case,
                Ok(Err(err)) => errored(id, err.to_string()),
                Err(_) => errored(id, "suite panicked".into()),
            })
            .collect()
    })
}

fn errored(lemma_id: &'static str, message: String) -> HarnessCase {
    HarnessCase {
        lemma_id,
        parameters: Value::Null,
        outcome: Outcome::Fail,
        passed: 0,
        failed: 1,
        skipped: 0,
        counterexamples: Vec::new(),
        log: Vec::new(),
        error: Some(message),
    }
}

pub fn report(cases: &[HarnessCase], params: &Params) -> Report {
    let count = |o: Outcome| cases.iter().filter(|c| c.outcome == o).count();
    let (pass, fail, skipped) = (
        count(Outcome::Pass),
        count(Outcome::Fail),
        count(Outcome::Skipped),
    );
    let mut r = Report::new("harness")
        .field("corpus", &params.corpus_name)
        .field("corpus_size", params.corpus.len())
        .field("seed", params.seed)
        .field(
            "summary",
            json!({ "pass": pass, "fail": fail, "skipped": skipped }),
        )
        .json_field("cases", cases)
        .exit(i32::from(fail > 0));
    let mut lines = Vec::new();
    for c in cases {
        let outcome = match c.outcome {
            Outcome::Pass => "pass",
            Outcome::Fail => "FAIL",
            Outcome::Skipped => "skipped",
        };
        lines.push(format!(
            "{:<9} {:<8} passed {:>8}  failed {:>5}  skipped {:>6}  {}",
            c.lemma_id, outcome, c.passed, c.failed, c.skipped, c.parameters
        ));
        if let Some(e) = &c.error {
            lines.push(format!("    error: {e}"));
        }
        for line in &c.log {
            lines.push(format!("    {line}"));
        }
        for ce in &c.counterexamples {
            lines.push(format!("    counterexample: {}", ce.what));
            lines.push(format!("      replay: {}", shell_line(&ce.replay)));
        }
    }
    lines.push(format!("{pass} pass, {fail} fail, {skipped} skipped"));
    for line in lines {
        r = r.text_line(line);
    }
    r
}

fn quotient_rule(p: &Params) -> betadiv::Result<HarnessCase> {
    let bound = p.bound.unwrap_or(10_000);
    let primes = arith::prime_source(PrimeQuery::UpTo(50))?;
    let mut rng = p.rng(0x21a);
    let mut t = Tally::default();
    let mut sets = Vec::new();
    for _ in 0..200 {
        let size = rng.gen_range(0..=6);
        let b: BTreeSet<u64> = primes.choose_multiple(&mut rng, size).copied().collect();
        sets.push(b);
    }
    for b in &sets {
        let host = SetExpr::up(SetExpr::Lit(b.clone()));
        'm: for m in 1..=bound {
            let rule = quotient_case_rule(b, m)?;
            let direct = SetExpr::quot(host.clone(), m);
            for x in 1..=60 {
                let r = rule.member(x, p.budget)?;
                let d = direct.member(x, p.budget)?;
                match (r.state.decided(), d.state.decided()) {
                    (Some(a), Some(c)) if a != c => {
                        let rule_text = rule.to_string();
                        t.fail(
                            format!(
                                "{direct} at {x}: case rule {rule_text} gives {}, direct {}",
                                r.state, d.state
                            ),
                            Some(r.state),
                            &[
                                "member",
                                &rule_text,
                                &x.to_string(),
                                "--budget",
                                &p.budget.to_string(),
                            ],
                        );
                        continue 'm;
                    }
                    (Some(_), Some(_)) => {}
                    _ => {
                        t.skip();
                        continue 'm;
                    }
                }
            }
            t.pass();
        }
    }
    // Prime upsets in a product lie in one of the factors.
    let filters = p.filters()?;
    let mut targets: Vec<SetExpr> = p
        .corpus
        .iter()
        .filter(|e| is_prime_set(e))
        .map(|e| SetExpr::up(e.clone()))
        .collect();
    targets.extend(
        sets.iter()
            .filter(|b| !b.is_empty())
            .take(20)
            .map(|b| SetExpr::up(SetExpr::Lit(b.clone()))),
    );
    for e in &targets {
        for f in &filters {
            for g in &filters {
                let v = product_member(f, g, e, p.budget)?;
                if !v.is_proved() {
                    continue;
                }
                let (df, dg) = (d_member(f, e, p.budget)?, d_member(g, e, p.budget)?);
                if df.is_proved() || dg.is_proved() {
                    t.pass();
                } else if df.is_refuted() && dg.is_refuted() {
                    let (fs, es) = (f.to_string(), e.to_string());
                    t.fail(
                        format!("{e} ∈ {f}·{g} but in neither D({f}) nor D({g})"),
                        Some(ProofState::Refuted),
                        &["d-member", &fs, &es, "--budget", &p.budget.to_string()],
                    );
                } else {
                    t.skip();
                }
            }
        }
    }
    Ok(t.finish(
        "L2.1a",
        json!({ "sets": sets.len(), "m_max": bound, "x_max": 60, "prime_upsets": targets.len(), "budget": p.budget }),
    ))
}

fn prime_up_fast_path(p: &Params) -> betadiv::Result<HarnessCase> {
    let bound = p.bound.unwrap_or(100_000);
    let primes = arith::prime_source(PrimeQuery::UpTo(47))?;
    let mut rng = p.rng(0x21b);
    let upset = |s: &[u64]| -> Vec<u64> {
        (1..=bound)
            .filter(|m| s.iter().any(|d| m % d == 0))
            .collect()
    };
    let mut pairs = Vec::new();
    for _ in 0..50 {
        let mut pick = || -> Vec<u64> {
            let size = rng.gen_range(1..=3);
            let mut s: Vec<u64> = primes.choose_multiple(&mut rng, size).copied().collect();
            s.sort_unstable();
            s
        };
        let (s, t) = (pick(), pick());
        let spec =
            |s: &[u64]| FilterSpec::Generated(vec![SetExpr::up(SetExpr::lit(s.iter().copied()))]);
        let f = make_filter(&spec(&s), p.budget, false)?;
        let g = make_filter(&spec(&t), p.budget, false)?;
        pairs.push((upset(&s), upset(&t), f, g));
    }
    let mut targets = Vec::new();
    for i in 0..50 {
        let size = rng.gen_range(1..=8);
        let b: Vec<u64> = if i % 2 == 0 {
            primes.choose_multiple(&mut rng, size).copied().collect()
        } else {
            (0..size).map(|_| rng.gen_range(2..=60)).collect()
        };
        let mut bits = vec![false; bound as usize + 1];
        for &d in &b {
            for m in (d..=bound).step_by(d as usize) {
                bits[m as usize] = true;
            }
        }
        targets.push((SetExpr::up(SetExpr::lit(b)), bits));
    }
    let mut t = Tally::default();
    for (up_s, up_t, f, g) in &pairs {
        for (e, bits) in &targets {
            let brute = up_s.iter().all(|&n| {
                up_t.iter()
                    .take_while(|&&x| n * x <= bound)
                    .all(|&x| bits[(n * x) as usize])
            });
            let v = product_member(f, g, e, p.budget.max(10_000))?;
            match v.state.decided() {
                None => t.skip(),
                Some(got) if got == brute => t.pass(),
                Some(_) => {
                    let (fs, gs, es) = (f.to_string(), g.to_string(), e.to_string());
                    t.fail(
                        format!(
                            "{e} in {f}·{g}: {} but the product definition gives {brute}",
                            v.state
                        ),
                        Some(v.state),
                        &[
                            "product-member",
                            &fs,
                            &gs,
                            &es,
                            "--budget",
                            &p.budget.max(10_000).to_string(),
                        ],
                    );
                }
            }
        }
    }
    let total = t.passed + t.failed + t.skipped;
    let rate = t.skipped as f64 / total.max(1) as f64;
    t.log
        .push(format!("Unknown rate {:.1}% of {total}", rate * 100.0));
    let mut case = t.finish(
        "L2.1b",
        json!({ "pairs": 50, "targets": 50, "bound": bound }),
    );
    if rate >= 0.2 {
        case.outcome = Outcome::Fail;
        case.error = Some(format!(
            "Unknown rate {:.1}% is not below 20%",
            rate * 100.0
        ));
    }
    Ok(case)
}

fn euclid(p: &Params) -> betadiv::Result<HarnessCase> {
    let bound = p.bound.unwrap_or(300);
    let principals: Vec<FilterPresentation> = (1..=bound)
        .map(FilterPresentation::principal)
        .collect::<betadiv::Result<_>>()?;
    let mut t = Tally::default();
    for q in arith::prime_source(PrimeQuery::UpTo(100))? {
        let e = SetExpr::up(SetExpr::lit([q]));
        for f in 1..=bound {
            for g in 1..=bound {
                let v = product_member(
                    &principals[f as usize - 1],
                    &principals[g as usize - 1],
                    &e,
                    p.budget,
                )?;
                let expected = f % q == 0 || g % q == 0;
                match v.state.decided() {
                    None => t.skip(),
                    Some(got) if got == expected => t.pass(),
                    Some(_) => t.fail(
                        format!(
                            "{e} in ⟨{f}⟩·⟨{g}⟩ is {} but {q} | {f} or {q} | {g} is {expected}",
                            v.state
                        ),
                        Some(v.state),
                        &[
                            "product-member",
                            &format!("principal:{f}"),
                            &format!("principal:{g}"),
                            &e.to_string(),
                        ],
                    ),
                }
            }
        }
    }
    Ok(t.finish(
        "T2.2",
        json!({ "p_max": 100, "fg_max": bound, "budget": p.budget }),
    ))
}

fn principal_divisibility(p: &Params) -> betadiv::Result<HarnessCase> {
    let bound = p.bound.unwrap_or(500);
    let principals: Vec<FilterPresentation> = (1..=bound)
        .map(FilterPresentation::principal)
        .collect::<betadiv::Result<_>>()?;
    let mut t = Tally::default();
    for m in 1..=bound {
        for n in 1..=bound {
            let v = divides_tilde(
                &principals[m as usize - 1],
                &principals[n as usize - 1],
                p.budget,
            )?;
            let expected = n % m == 0;
            match v.state.decided() {
                None => t.skip(),
                Some(got) if got == expected => t.pass(),
                Some(_) => t.fail(
                    format!("⟨{m}⟩ |~ ⟨{n}⟩ is {} but {m} | {n} is {expected}", v.state),
                    Some(v.state),
                    &[
                        "divides",
                        &format!("principal:{m}"),
                        &format!("principal:{n}"),
                    ],
                ),
            }
        }
    }
    // Upward-closed members of F lie in D(F).
    let filters = p.filters()?;
    for e in &p.corpus {
        if !is_upward_closed(e, p.budget)?.is_proved() {
            continue;
        }
        for f in &filters {
            if !filter_member(f, e, p.budget)?.is_proved() {
                continue;
            }
            let v = d_member(f, e, p.budget)?;
            let (fs, es) = (f.to_string(), e.to_string());
            t.expect_proved(
                &v,
                || format!("{e} ∈ {f} is upward closed but not in D(F)"),
                &["d-member", &fs, &es, "--budget", &p.budget.to_string()],
            );
        }
    }
    Ok(t.finish(
        "T3.3",
        json!({ "mn_max": bound, "corpus_filters": filters.len(), "budget": p.budget }),
    ))
}

fn interpolation(p: &Params) -> betadiv::Result<HarnessCase> {
    let bound = p.bound.unwrap_or(1000);
    let mut t = Tally::default();
    let bound_text = bound.to_string();
    for m in 1..=50u64 {
        for n in 1..=50u64 {
            let (f, g) = (
                FilterPresentation::principal(m)?,
                FilterPresentation::principal(n)?,
            );
            let v = interpolation_check(&f, &g, bound)?;
            match v.state {
                ProofState::Refuted => t.pass(),
                ProofState::UnknownAtBound => t.skip(),
                ProofState::Proved => t.fail(
                    format!("singleton cores ⟨{m}⟩, ⟨{n}⟩ admit a triple"),
                    Some(v.state),
                    &[
                        "interp",
                        &format!("principal:{m}"),
                        &format!("principal:{n}"),
                        "--bound",
                        &bound_text,
                    ],
                ),
            }
        }
    }
    let filters = p.filters()?;
    for f in filters.iter().filter(|f| f.principal_point().is_none()) {
        for g in filters.iter().filter(|g| g.principal_point().is_none()) {
            let v = interpolation_check(f, g, bound)?;
            let (fs, gs) = (f.to_string(), g.to_string());
            let replay = [
                "interp",
                fs.as_str(),
                gs.as_str(),
                "--bound",
                bound_text.as_str(),
            ];
            match (&v.state, &v.certificate) {
                (ProofState::Proved, Some(Certificate::Triple { a, c, b })) => {
                    let (a, c, b) = (*a, *c, *b);
                    let inside = f.core().member(a, bound)?.is_proved()
                        && f.core().member(b, bound)?.is_proved()
                        && g.core().member(c, bound)?.is_proved();
                    if inside && a != c && c != b && c % a == 0 && b % c == 0 {
                        t.pass();
                    } else {
                        t.fail(
                            format!("triple ({a}, {c}, {b}) for {f}, {g} does not check"),
                            Some(v.state),
                            &replay,
                        );
                    }
                }
                (ProofState::Proved, _) => t.fail(
                    format!("{f}, {g}: proved without a triple"),
                    Some(v.state),
                    &replay,
                ),
                _ => {
                    // An antichain core admits no triple.
                    let en = f.core().enumerate_upto(bound, bound)?;
                    let antichain =
                        en.complete && greedy_antichain(&en.members)?.len() == en.members.len();
                    if f == g && antichain && v.is_proved() {
                        t.fail(
                            format!("{f} has an antichain core but a triple"),
                            Some(v.state),
                            &replay,
                        );
                    } else {
                        t.pass();
                    }
                }
            }
        }
    }
    Ok(t.finish("L3.4-eq3", json!({ "principal_max": 50, "bound": bound })))
}

fn factorial_shadow(p: &Params) -> betadiv::Result<HarnessCase> {
    let top = p
        .bound
        .unwrap_or(12)
        .min(betadiv::chain::MAX_FACTORIAL_ARG as u64);
    let mut t = Tally::default();
    for n in 2..=top {
        let base = arith::factorial(n - 1)?;
        let v = SetExpr::Factorials.member(n * base, p.budget)?;
        let value = (n * base).to_string();
        t.expect_proved(
            &v,
            || format!("n={n}: {n}·{}! not proved a factorial", n - 1),
            &["member", "factorials", &value],
        );
        for m in (1..=top).filter(|&m| m != n) {
            let Some(value) = m.checked_mul(base) else {
                continue;
            };
            let v = SetExpr::Factorials.member(value, p.budget)?;
            match v.state {
                ProofState::Refuted => t.pass(),
                ProofState::UnknownAtBound => t.skip(),
                ProofState::Proved => t.fail(
                    format!("n={n}, m={m}: {m}·{}! = {value} is a factorial", n - 1),
                    Some(v.state),
                    &["member", "factorials", &value.to_string()],
                ),
            }
        }
    }
    Ok(t.finish("E3.5b", json!({ "n_max": top, "m_max": top })))
}

fn scaling(p: &Params) -> betadiv::Result<HarnessCase> {
    let h_max = p.bound.unwrap_or(50);
    let filters = p.filters()?;
    let mut t = Tally::default();
    for f in &filters {
        for g in &filters {
            if !divides_tilde(f, g, p.budget)?.is_proved() {
                continue;
            }
            for h in 1..=h_max {
                let (fh, gh) = (f.scaled(h)?, g.scaled(h)?);
                let v = divides_tilde(&fh, &gh, p.budget)?;
                let (fs, gs) = (fh.to_string(), gh.to_string());
                t.expect_proved(
                    &v,
                    || format!("{f} |~ {g} but not after scaling by {h}"),
                    &["divides", &fs, &gs, "--budget", &p.budget.to_string()],
                );
            }
        }
    }
    Ok(t.finish(
        "L3.7",
        json!({ "h_max": h_max, "corpus_filters": filters.len(), "budget": p.budget }),
    ))
}

fn finite_chain(p: &Params) -> betadiv::Result<HarnessCase> {
    let bound = p.bound.unwrap_or(1_000_000);
    let chain = build_chain(p.k, &ad_family(p.k, p.scheme)?)?;
    let report = verify_chain(&chain, bound)?;
    let replay = [
        "chain-verify".to_owned(),
        "--k".into(),
        p.k.to_string(),
        "--scheme".into(),
        p.scheme.to_string(),
        "--bound".into(),
        bound.to_string(),
    ];
    let replay: Vec<&str> = replay.iter().map(String::as_str).collect();
    let mut t = Tally::default();
    for pair in &report.pairs {
        let what = || {
            let check = match pair.check {
                PairCheck::Divides => "P_β |~ F_α",
                PairCheck::Excludes => "up(A_β) ∉ F_α",
            };
            format!(
                "β={} α={}: {check} expected {}, got {}",
                pair.beta, pair.alpha, pair.expected, pair.verdict.state
            )
        };
        let witnessed = pair.check == PairCheck::Divides || pair.verdict.certificate.is_some();
        if pair.ok && witnessed {
            t.pass();
        } else if pair.verdict.is_unknown() {
            t.skip();
        } else {
            t.fail(what(), Some(pair.verdict.state), &replay);
        }
    }
    for link in &report.links {
        t.expect_proved(
            &link.verdict,
            || format!("F_{} |~ F_{} not proved", link.j, link.j + 1),
            &replay,
        );
    }
    Ok(t.finish(
        "T4.2",
        json!({ "k": p.k, "scheme": p.scheme, "bound": bound }),
    ))
}

fn duality(p: &Params) -> betadiv::Result<HarnessCase> {
    let bound = p.bound.unwrap_or(10_000);
    let wide = bound.saturating_mul(10);
    let mut t = Tally::default();
    for e in &p.corpus {
        let es = e.to_string();
        if let Some(cover) = structural_cover(e)? {
            let k = cover.covers.len();
            let mut sizes = Vec::new();
            for m in [(bound / 10).max(1), bound] {
                let a = max_strong_antichain(e, m, AntichainMode::Exact)?;
                sizes.push(a.size());
                if a.size() <= k {
                    t.pass();
                } else {
                    t.fail(
                        format!(
                            "{e}: cover {:?} but antichain {:?} up to {m}",
                            cover.covers, a.witness
                        ),
                        None,
                        &["antichain", &es, "--bound", &m.to_string(), "--exact"],
                    );
                }
            }
            t.log.push(format!(
                "{e}: cover {:?}; exact antichain sizes {sizes:?}",
                cover.covers
            ));
            continue;
        }
        let r = is_n_free(e, bound)?;
        if !r.verdict.is_proved() {
            t.log.push(format!("{e}: N-freeness {}", r.verdict.state));
            continue;
        }
        match max_strong_antichain(e, wide, AntichainMode::Greedy) {
            Ok(a) if a.size() >= 10 => {
                t.pass();
                t.log.push(format!(
                    "{e}: N-free; antichain of size {} up to {wide}, {:?}",
                    a.size(),
                    &a.witness[..10]
                ));
            }
            Ok(a) => t.fail(
                format!(
                    "{e}: N-free but only {} pairwise coprime members up to {wide}",
                    a.size()
                ),
                None,
                &["antichain", &es, "--bound", &wide.to_string()],
            ),
            Err(betadiv::Error::IncompleteEnumeration { .. }) => t.skip(),
            Err(err) => return Err(err),
        }
    }
    Ok(t.finish("L5.3", json!({ "corpus": p.corpus_name, "bounds": [(bound / 10).max(1), bound], "antichain_bound": wide })))
}

fn x_text(x: &BTreeSet<u64>) -> String {
    x.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn antichain_extension(p: &Params) -> betadiv::Result<HarnessCase> {
    let bound = p.bound.unwrap_or(10_000);
    let mut t = Tally::default();
    for e in &p.corpus {
        let nfree = is_n_free(e, bound)?;
        if nfree.verdict.state == ProofState::UnknownAtBound {
            continue;
        }
        let en = match e.enumerate_upto(bound, bound) {
            Ok(en) if en.complete => en,
            _ => continue,
        };
        let found = greedy_antichain(&en.members)?;
        let es = e.to_string();
        if nfree.verdict.is_refuted() {
            // A cover by k sets bounds every antichain by k.
            let k = nfree.cover.as_ref().map_or(usize::MAX, |c| c.covers.len());
            if found.len() <= k {
                t.pass();
            } else {
                t.fail(
                    format!("{e} is covered by {k} sets but has antichain {found:?}"),
                    None,
                    &["antichain", &es, "--bound", &bound.to_string()],
                );
            }
            continue;
        }
        let n = found.len().min(8);
        let windows = [&found[..n], &found[found.len() - n..]];
        for window in windows {
            for size in 0..=window.len() {
                let x: BTreeSet<u64> = window[..size].iter().copied().collect();
                let m = extend_antichain(e, &x, bound.saturating_mul(10))?;
                let xs = x_text(&x);
                match m {
                    Some(m) if x.iter().all(|&y| arith::coprime(y, m)) && !x.contains(&m) => {
                        t.pass()
                    }
                    _ => t.fail(
                        format!("{e} is N-free but {x:?} does not extend (got {m:?})"),
                        Some(ProofState::Refuted),
                        &[
                            "antichain",
                            &es,
                            "--bound",
                            &bound.saturating_mul(10).to_string(),
                            "--extend",
                            &xs,
                        ],
                    ),
                }
            }
        }
    }
    Ok(t.finish(
        "T5.4ii",
        json!({ "corpus": p.corpus_name, "bound": bound, "x_max": 8 }),
    ))
}

fn lcm_closure(p: &Params) -> betadiv::Result<HarnessCase> {
    let bound = p.bound.unwrap_or(100_000);
    let mut pool = Vec::new();
    for e in &p.corpus {
        if is_upward_closed(e, p.budget)?.is_proved() && is_n_free(e, p.budget)?.verdict.is_proved()
        {
            pool.push(e.clone());
        }
    }
    let mut t = Tally::default();
    if pool.len() < 2 {
        t.log.push(format!(
            "pool has {} expressions; nothing to pair",
            pool.len()
        ));
        return Ok(t.finish("T5.5", json!({ "pairs": 0, "bound": bound })));
    }
    let mut rng = p.rng(0x55);
    let scan = bound.min(10_000);
    for _ in 0..20 {
        let a = pool.choose(&mut rng).expect("pool is nonempty").clone();
        let b = pool.choose(&mut rng).expect("pool is nonempty").clone();
        let both = SetExpr::inter(a.clone(), b.clone());
        let en = both.enumerate_upto(scan, scan)?;
        let found = greedy_antichain(&en.members)?;
        let (as_, bs) = (a.to_string(), b.to_string());
        for size in 0..=found.len().min(8) {
            let x: BTreeSet<u64> = found[..size].iter().copied().collect();
            let xs = x_text(&x);
            let replay = [
                "antichain",
                &as_,
                "--lcm-with",
                &bs,
                "--extend",
                &xs,
                "--bound",
                &bound.to_string(),
            ];
            match lcm_extension(&a, &b, &x, bound) {
                Ok(Some(ext)) => {
                    let inside = both.member(ext.lcm, bound.max(ext.lcm))?.is_proved();
                    let coprime =
                        x.iter().all(|&y| arith::coprime(y, ext.lcm)) && !x.contains(&ext.lcm);
                    if inside && coprime {
                        t.pass();
                    } else {
                        t.fail(
                            format!("{a} ∩ {b}, X={x:?}: lcm {} fails the post-checks", ext.lcm),
                            None,
                            &replay,
                        );
                    }
                }
                Ok(None) => t.fail(
                    format!("{a} ∩ {b}, X={x:?}: no extension up to {bound}"),
                    Some(ProofState::Refuted),
                    &replay,
                ),
                Err(err) => t.fail(format!("{a} ∩ {b}, X={x:?}: {err}"), None, &replay),
            }
        }
    }
    Ok(t.finish(
        "T5.5",
        json!({ "pool": pool.len(), "pairs": 20, "bound": bound, "x_max": 8 }),
    ))
}
