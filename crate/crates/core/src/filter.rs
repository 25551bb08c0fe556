//! Finitely presented filters on N.
//!
//! A filter is either principal at `n` (all sets containing `n`) or generated
//! by finitely many sets, in which case it is exactly the family of supersets
//! of its core, the intersection of the generators. Everything below reduces
//! to subset questions about cores:
//!
//! * `E ∈ F` iff `core(F) ⊆ E`;
//! * `F |̃ G` iff every upward-closed member of `F` lies in `G`, iff
//!   `core(G) ⊆ up(core(F))`, since `up(core(F))` is the least upward-closed
//!   member of `F`;
//! * `E ∈ D(F)` iff `{n : nN ⊆ E} ∈ F`, iff `up(core(F)) ⊆ E`;
//! * `E ∈ F·G` iff `ab ∈ E` for all `a ∈ core(F)`, `b ∈ core(G)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::Membership;
use crate::expr::SetExpr;
use crate::structural::{self, find_member, is_empty_structural, is_prime_set, subset_verdict};
use crate::verdict::{Certificate, ProofState, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FilterSpec {
    Principal(u64),
    Generated(Vec<SetExpr>),
}

impl FromStr for FilterSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(n) = text.strip_prefix("principal:") {
            let n: u64 = n.trim().parse().map_err(|_| {
                Error::FilterSpec(format!(
                    "expected a natural number after 'principal:', got {n:?}"
                ))
            })?;
            if n == 0 {
                return Err(Error::OutOfDomain(0));
            }
            return Ok(FilterSpec::Principal(n));
        }
        if let Some(rest) = text.strip_prefix("gen:") {
            let inner = rest
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| {
                    Error::FilterSpec("generator list must be written [e1;e2;...]".into())
                })?;
            let gens = inner
                .split(';')
                .map(|g| {
                    SetExpr::parse(g)
                        .map_err(|e| Error::FilterSpec(format!("generator {:?}: {e}", g.trim())))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(FilterSpec::Generated(gens));
        }
        Err(Error::FilterSpec(format!(
            "expected 'principal:<n>' or 'gen:[<expr>;...]', got {text:?}"
        )))
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterSpec::Principal(n) => write!(f, "principal:{n}"),
            FilterSpec::Generated(gens) => {
                let parts: Vec<String> = gens.iter().map(SetExpr::to_string).collect();
                write!(f, "gen:[{}]", parts.join(";"))
            }
        }
    }
}

impl Serialize for FilterSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// How the core was shown to be nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Nonempty {
    Witness {
        value: u64,
    },
    Rule {
        name: String,
    },
    /// Accepted on the caller's say-so after the search came up empty.
    Assumed {
        budget: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilterPresentation {
    spec: FilterSpec,
    core: SetExpr,
    nonempty: Nonempty,
}

impl FilterPresentation {
    pub fn principal(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfDomain(0));
        }
        Ok(FilterPresentation {
            spec: FilterSpec::Principal(n),
            core: SetExpr::lit([n]),
            nonempty: Nonempty::Witness { value: n },
        })
    }

    pub(crate) fn from_parts(spec: FilterSpec, core: SetExpr, nonempty: Nonempty) -> Self {
        FilterPresentation {
            spec,
            core,
            nonempty,
        }
    }

    pub fn spec(&self) -> &FilterSpec {
        &self.spec
    }

    /// The least member of the filter.
    pub fn core(&self) -> &SetExpr {
        &self.core
    }

    pub fn nonempty(&self) -> &Nonempty {
        &self.nonempty
    }

    pub fn principal_point(&self) -> Option<u64> {
        match self.spec {
            FilterSpec::Principal(n) => Some(n),
            FilterSpec::Generated(_) => None,
        }
    }

    /// `F·⟨h⟩`, whose core is `h·core(F)`.
    pub fn scaled(&self, h: u64) -> Result<Self> {
        if h == 0 {
            return Err(Error::OutOfDomain(0));
        }
        if let Some(n) = self.principal_point() {
            let nh = n
                .checked_mul(h)
                .ok_or_else(|| Error::Overflow(format!("{n}·{h}")))?;
            return Self::principal(nh);
        }
        let core = SetExpr::scale(self.core.clone(), h);
        let nonempty = match &self.nonempty {
            Nonempty::Witness { value } => match value.checked_mul(h) {
                Some(v) => Nonempty::Witness { value: v },
                None => Nonempty::Rule {
                    name: "scaled nonempty core".into(),
                },
            },
            other => other.clone(),
        };
        Ok(FilterPresentation {
            spec: FilterSpec::Generated(vec![core.clone()]),
            core,
            nonempty,
        })
    }
}

impl fmt::Display for FilterPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.spec.fmt(f)
    }
}

/// Builds a presentation, checking that the core is nonempty. With
/// `allow_unknown`, a core for which no member is found up to `budget`
/// (and no rule applies) is accepted instead of rejected.
pub fn make_filter(
    spec: &FilterSpec,
    budget: u64,
    allow_unknown: bool,
) -> Result<FilterPresentation> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let gens = match spec {
        FilterSpec::Principal(n) => return FilterPresentation::principal(*n),
        FilterSpec::Generated(gens) => gens,
    };
    let core = SetExpr::inter_all(gens).ok_or_else(|| Error::FilterSpec("no generators".into()))?;
    core.validate()?;
    if is_empty_structural(&core, budget)? {
        return Err(Error::FipRefuted {
            core: core.to_string(),
            reason: "the generators have structurally empty intersection".into(),
        });
    }
    let nonempty = if let Some(w) = find_member(&core, budget)? {
        Nonempty::Witness { value: w }
    } else if structural::is_infinite(&core, 1)?.is_proved() {
        Nonempty::Rule {
            name: "infinite core".into(),
        }
    } else if allow_unknown {
        Nonempty::Assumed { budget }
    } else {
        return Err(Error::FipUnknown {
            core: core.to_string(),
            budget,
        });
    };
    Ok(FilterPresentation {
        spec: spec.clone(),
        core,
        nonempty,
    })
}

pub fn filter_member<S: Membership + ?Sized>(
    f: &FilterPresentation,
    e: &S,
    budget: u64,
) -> Result<Verdict> {
    if let Some(n) = f.principal_point() {
        let v = e.member(n, budget)?;
        return Ok(Verdict::new(v.state, budget, Some(Certificate::number(n))));
    }
    subset_verdict(&f.core, e, budget)
}

/// `F |̃ G`, decided as `core(G) ⊆ up(core(F))`.
pub fn divides_tilde(
    f: &FilterPresentation,
    g: &FilterPresentation,
    budget: u64,
) -> Result<Verdict> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    if let (Some(m), Some(n)) = (f.principal_point(), g.principal_point()) {
        return Ok(
            Verdict::exact(n % m == 0, budget).with_certificate(Certificate::Pair {
                first: m,
                second: n,
            }),
        );
    }
    subset_verdict(&g.core, &SetExpr::up(f.core.clone()), budget)
}

/// `E ∈ F·G`.
pub fn product_member(
    f: &FilterPresentation,
    g: &FilterPresentation,
    e: &SetExpr,
    budget: u64,
) -> Result<Verdict> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    match (f.principal_point(), g.principal_point()) {
        (Some(a), Some(b)) => {
            let ab = a
                .checked_mul(b)
                .ok_or_else(|| Error::Overflow(format!("{a}·{b}")))?;
            let v = e.member(ab, budget)?;
            Ok(Verdict::new(v.state, budget, Some(Certificate::number(ab))))
        }
        (Some(a), None) => filter_member(g, &SetExpr::quot(e.clone(), a), budget),
        (None, Some(b)) => filter_member(f, &SetExpr::quot(e.clone(), b), budget),
        (None, None) => {
            if let SetExpr::Up(base) = e {
                if is_prime_set(base) {
                    return prime_up_product(f, g, e, budget);
                }
            }
            let (a0, b0) = (f.core.clone(), g.core.clone());
            let products = SetExpr::union(
                SetExpr::ProdSet(vec![a0.clone(), b0.clone()]),
                SetExpr::pow(SetExpr::inter(a0, b0), 2),
            );
            subset_verdict(&products, e, budget)
        }
    }
}

/// For `E = up(B)` with `B` a set of primes, `E/m` is N when some prime of `B`
/// divides `m` and `E` otherwise, so `E ∈ F·G` iff `E ∈ F` or `E ∈ G`.
fn prime_up_product(
    f: &FilterPresentation,
    g: &FilterPresentation,
    e: &SetExpr,
    budget: u64,
) -> Result<Verdict> {
    let in_f = filter_member(f, e, budget)?;
    if in_f.is_proved() {
        return Ok(Verdict::proved(
            budget,
            Some(Certificate::rule("prime upset in first factor")),
        ));
    }
    let in_g = filter_member(g, e, budget)?;
    Ok(match (in_f.state, in_g.state) {
        (_, ProofState::Proved) => Verdict::proved(
            budget,
            Some(Certificate::rule("prime upset in second factor")),
        ),
        (ProofState::Refuted, ProofState::Refuted) => Verdict::refuted(
            budget,
            Some(Certificate::rule("prime upset in neither factor")),
        ),
        _ => Verdict::unknown(budget, None),
    })
}

/// `{n : nN ⊆ E}` as a membership predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplesInside {
    pub host: SetExpr,
}

impl Membership for MultiplesInside {
    fn member(&self, n: u64, budget: u64) -> Result<Verdict> {
        if n == 0 {
            return Err(Error::OutOfDomain(0));
        }
        if budget == 0 {
            return Err(Error::ZeroBudget);
        }
        subset_verdict(&SetExpr::Mult(n), &self.host, budget)
    }

    fn describe(&self) -> String {
        format!("{{n : nN ⊆ {}}}", self.host)
    }
}

/// `E ∈ D(F)`.
pub fn d_member(f: &FilterPresentation, e: &SetExpr, budget: u64) -> Result<Verdict> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    if f.principal_point().is_some() {
        return filter_member(f, &MultiplesInside { host: e.clone() }, budget);
    }
    subset_verdict(&SetExpr::up(f.core.clone()), e, budget)
}

/// `{m : E/m ∈ H}` as a membership predicate.
#[derive(Debug, Clone)]
pub struct QuotientsIn {
    pub host: SetExpr,
    pub filter: FilterPresentation,
}

pub fn a_sub_h(e: &SetExpr, h: &FilterPresentation) -> QuotientsIn {
    QuotientsIn {
        host: e.clone(),
        filter: h.clone(),
    }
}

impl Membership for QuotientsIn {
    fn member(&self, m: u64, budget: u64) -> Result<Verdict> {
        if m == 0 {
            return Err(Error::OutOfDomain(0));
        }
        if budget == 0 {
            return Err(Error::ZeroBudget);
        }
        filter_member(&self.filter, &SetExpr::quot(self.host.clone(), m), budget)
    }

    fn describe(&self) -> String {
        format!("{{m : {}/m ∈ {}}}", self.host, self.filter)
    }
}

/// Looks for `a | c | b` with `a, b ∈ core(F)`, `c ∈ core(G)`, all `<= bound`
/// and `a ≠ c ≠ b`. Refuted only when both cores are finite, listed, and
/// lie entirely below the bound.
pub fn interpolation_check(
    f: &FilterPresentation,
    g: &FilterPresentation,
    bound: u64,
) -> Result<Verdict> {
    if bound == 0 {
        return Err(Error::OutOfDomain(0));
    }
    let cf = f.core.enumerate_upto(bound, bound)?;
    let cg = g.core.enumerate_upto(bound, bound)?;
    for &a in &cf.members {
        for &c in cg.members.iter().filter(|&&c| c != a && c % a == 0) {
            if let Some(&b) = cf.members.iter().find(|&&b| b != c && b % c == 0) {
                return Ok(Verdict::proved(
                    bound,
                    Some(Certificate::Triple { a, c, b }),
                ));
            }
        }
    }
    if !cf.complete || !cg.complete {
        return Ok(Verdict::unknown(bound, None));
    }
    let within =
        |core: &SetExpr| -> Result<bool> {
            Ok(structural::finite_elements(core, bound)?
                .is_some_and(|s| s.iter().all(|&x| x <= bound)))
        };
    if within(&f.core)? && within(&g.core)? {
        return Ok(Verdict::refuted(
            bound,
            Some(Certificate::rule("finite cores exhausted")),
        ));
    }
    Ok(Verdict::unknown(bound, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(s: &str) -> SetExpr {
        SetExpr::parse(s).unwrap()
    }

    fn filter(s: &str) -> FilterPresentation {
        make_filter(&s.parse().unwrap(), 10_000, false).unwrap()
    }

    #[test]
    fn spec_text_round_trip() {
        for s in [
            "principal:6",
            "gen:[mult(2);mult(3)]",
            "gen:[up(primesIdx(1,2))]",
        ] {
            assert_eq!(s.parse::<FilterSpec>().unwrap().to_string(), s);
        }
        assert!("principal:x".parse::<FilterSpec>().is_err());
        assert!("gen:[mult(2)".parse::<FilterSpec>().is_err());
        assert!("gen:[frob]".parse::<FilterSpec>().is_err());
    }

    #[test]
    fn construction() {
        assert_eq!(filter("principal:6").core(), &expr("{6}"));
        let f = filter("gen:[mult(2);mult(3)]");
        assert_eq!(f.core(), &expr("inter(mult(2),mult(3))"));
        assert_eq!(f.nonempty(), &Nonempty::Witness { value: 6 });
        let err =
            make_filter(&"gen:[mult(2);comp(mult(2))]".parse().unwrap(), 100, false).unwrap_err();
        assert!(matches!(err, Error::FipRefuted { .. }));
    }

    #[test]
    fn fip_unknown_needs_override() {
        // empty, but no rule says so
        let spec: FilterSpec = "gen:[mult(4);level(1)]".parse().unwrap();
        assert!(matches!(
            make_filter(&spec, 100, false),
            Err(Error::FipUnknown { .. })
        ));
        let f = make_filter(&spec, 100, true).unwrap();
        assert_eq!(f.nonempty(), &Nonempty::Assumed { budget: 100 });
    }

    #[test]
    fn membership_examples() {
        assert!(filter_member(&filter("principal:6"), &expr("mult(3)"), 100)
            .unwrap()
            .is_proved());
        let v = filter_member(&filter("gen:[mult(6)]"), &expr("mult(2)"), 100).unwrap();
        assert!(v.is_proved());
        assert!(matches!(v.certificate, Some(Certificate::Rule { .. })));
        let v = filter_member(&filter("gen:[up(primesIdx(1,2))]"), &expr("{4}"), 100).unwrap();
        assert_eq!(v.certificate, Some(Certificate::number(2)));
    }

    #[test]
    fn divides_examples() {
        let d = |a: &str, b: &str| divides_tilde(&filter(a), &filter(b), 1000).unwrap();
        assert!(d("principal:6", "principal:18").is_proved());
        assert!(d("principal:6", "principal:8").is_refuted());
        assert!(d("gen:[mult(6)]", "gen:[mult(12)]").is_proved());
        let v = d("gen:[up(primesIdx(1,2))]", "gen:[up(primesIdx(2,2))]");
        assert_eq!(v.certificate, Some(Certificate::number(3)));
    }

    #[test]
    fn product_examples() {
        let p = |a: &str, b: &str, e: &str| {
            product_member(&filter(a), &filter(b), &expr(e), 1000).unwrap()
        };
        assert!(p("principal:4", "principal:9", "mult(6)").is_proved());
        assert!(p(
            "gen:[up(primesIdx(1,4))]",
            "gen:[up(primesIdx(2,4))]",
            "up(primesIdx(3,4))"
        )
        .is_refuted());
        assert!(p("principal:2", "gen:[mult(3)]", "mult(6)").is_proved());
        // core products 2·3: mult(6) is in the product of 2N and 3N
        assert!(p("gen:[mult(2)]", "gen:[mult(3)]", "mult(6)").is_proved());
        assert!(p("gen:[mult(2)]", "gen:[mult(3)]", "mult(12)").is_refuted());
    }

    #[test]
    fn derived_filter_examples() {
        assert!(d_member(&filter("principal:6"), &expr("mult(3)"), 100)
            .unwrap()
            .is_proved());
        let v = d_member(&filter("principal:6"), &expr("mult(4)"), 100).unwrap();
        assert!(v.is_refuted());
        assert!(d_member(&filter("principal:6"), &expr("mult(2)"), 100)
            .unwrap()
            .is_proved());
    }

    #[test]
    fn quotient_predicate_examples() {
        let check = |e: &str, h: &str, expected: &str| {
            let pred = a_sub_h(&expr(e), &filter(h));
            let want = expr(expected);
            for m in 1..=300 {
                assert_eq!(
                    pred.member(m, 1000).unwrap().state,
                    want.member(m, 1000).unwrap().state,
                    "{e} {h} at {m}"
                );
            }
        };
        check("mult(6)", "principal:2", "mult(3)");
        check("level(2)", "principal:1", "level(2)");
        check("up({4})", "principal:2", "mult(2)");
    }

    #[test]
    fn interpolation_examples() {
        let v = interpolation_check(&filter("gen:[mult(24)]"), &filter("gen:[mult(24)]"), 1000)
            .unwrap();
        assert_eq!(
            v.certificate,
            Some(Certificate::Triple {
                a: 24,
                c: 48,
                b: 96
            })
        );
        assert!(
            interpolation_check(&filter("principal:2"), &filter("principal:6"), 100)
                .unwrap()
                .is_refuted()
        );
        let f = filter("gen:[{2,3,5,7}]");
        assert!(interpolation_check(&f, &f, 10).unwrap().is_refuted());
        let p = filter("gen:[P]");
        assert!(interpolation_check(&p, &p, 100).unwrap().is_unknown());
    }

    #[test]
    fn scaling() {
        assert_eq!(
            filter("principal:3").scaled(5).unwrap().principal_point(),
            Some(15)
        );
        let f = filter("gen:[mult(2)]").scaled(3).unwrap();
        assert_eq!(f.core(), &expr("scale(mult(2),3)"));
        assert_eq!(f.nonempty(), &Nonempty::Witness { value: 6 });
    }
}
