//! Finite chains of filters ordered by `|̃`.
//!
//! From prime sets `A₀, …, A_{k−1}` with pairwise finite intersections, link
//! `F_j` is generated by `up(prodset(A₀, …, A_{j−1}))` and `P_i` by `up(A_i)`.
//! Each `F_α` is then divisible by every `P_β` with `β < α` and omits
//! `up(A_β)` for `β ≥ α`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::expr::SetExpr;
use crate::filter::{
    divides_tilde, filter_member, make_filter, FilterPresentation, FilterSpec, Nonempty,
};
use crate::structural::is_prime_set;
use crate::verdict::{ProofState, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `primesIdx(r, k)` for `r = 1..k`: pairwise disjoint.
    Residue,
    /// Overlapping prefix families over a binary tree on prime indices.
    Tree,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "residue" => Ok(Scheme::Residue),
            "tree" => Ok(Scheme::Tree),
            other => Err(Error::ParamOutOfRange(format!("unknown scheme {other:?}"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Residue => "residue",
            Scheme::Tree => "tree",
        })
    }
}

/// `k` prime sets with pairwise finite intersections.
///
/// Tree scheme: with `d = ⌈log₂ k⌉`, member `j` is the residue class
/// `primesIdx(j+1, 2^d)` together with the primes sitting at the heap
/// positions of the `d` proper prefixes of `j`'s `d`-bit expansion (the
/// root is position 1, a node at depth `ℓ` with prefix `q` is `2^ℓ + q`).
/// Members sharing a prefix share those primes, so the family is almost
/// disjoint without being disjoint.
pub fn ad_family(k: usize, scheme: Scheme) -> Result<Vec<SetExpr>> {
    if k == 0 {
        return Err(Error::ParamOutOfRange(
            "family size must be at least 1".into(),
        ));
    }
    let k64 = k as u64;
    match scheme {
        Scheme::Residue => Ok((1..=k64).map(|r| SetExpr::primes_idx(r, k64)).collect()),
        Scheme::Tree => {
            let depth = usize::BITS - (k - 1).leading_zeros();
            if depth == 0 {
                return Ok(vec![SetExpr::P]);
            }
            let width = 1u64 << depth;
            (0..k64)
                .map(|j| {
                    let mut branch = BTreeSet::new();
                    for level in 0..depth {
                        let heap = (1u64 << level) + (j >> (depth - level));
                        branch.insert(arith::nth_prime(heap)?);
                    }
                    Ok(SetExpr::union(
                        SetExpr::primes_idx(j + 1, width),
                        SetExpr::Lit(branch),
                    ))
                })
                .collect()
        }
    }
}

/// A prime set as residue classes of prime indices plus finitely many primes.
struct PrimeCover {
    classes: Vec<(u64, u64)>,
    finite: BTreeSet<u64>,
}

fn decompose(e: &SetExpr) -> Option<PrimeCover> {
    match e {
        SetExpr::P | SetExpr::Level(1) => Some(PrimeCover {
            classes: vec![(1, 1)],
            finite: BTreeSet::new(),
        }),
        SetExpr::PrimesIdx { r, m } => Some(PrimeCover {
            classes: vec![(*r, *m)],
            finite: BTreeSet::new(),
        }),
        SetExpr::Lit(s) if is_prime_set(e) => Some(PrimeCover {
            classes: Vec::new(),
            finite: s.clone(),
        }),
        SetExpr::Empty => Some(PrimeCover {
            classes: Vec::new(),
            finite: BTreeSet::new(),
        }),
        SetExpr::Union(a, b) => {
            let (mut x, y) = (decompose(a)?, decompose(b)?);
            x.classes.extend(y.classes);
            x.finite.extend(y.finite);
            Some(x)
        }
        _ => None,
    }
}

/// Proves pairwise finite intersections: no two residue classes may meet.
pub fn check_almost_disjoint(family: &[SetExpr]) -> Result<()> {
    let parts: Vec<PrimeCover> = family
        .iter()
        .enumerate()
        .map(|(i, e)| {
            decompose(e).ok_or_else(|| {
                Error::Precondition(format!(
                    "family member {i} ({e}) is not a union of prime classes and primes"
                ))
            })
        })
        .collect::<Result<_>>()?;
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            for &(r1, m1) in &parts[i].classes {
                for &(r2, m2) in &parts[j].classes {
                    let g = arith::gcd(m1, m2);
                    if r1 % g == r2 % g {
                        return Err(Error::NotAlmostDisjoint { left: i, right: j });
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainSpec {
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    pub family: Vec<SetExpr>,
    pub links: Vec<FilterPresentation>,
    pub prime_filters: Vec<FilterPresentation>,
}

/// Budget for locating a nonempty-core witness of each link.
const LINK_BUDGET: u64 = 1_000;

fn prime_filter(a: &SetExpr) -> Result<FilterPresentation> {
    make_filter(
        &FilterSpec::Generated(vec![SetExpr::up(a.clone())]),
        LINK_BUDGET,
        false,
    )
}

pub fn build_chain(k: usize, family: &[SetExpr]) -> Result<ChainSpec> {
    if family.len() < k {
        return Err(Error::FamilyTooSmall {
            needed: k,
            got: family.len(),
        });
    }
    let family = family[..k].to_vec();
    check_almost_disjoint(&family)?;
    let mut links = vec![FilterPresentation::principal(1)?];
    for j in 1..=k {
        let core = SetExpr::up(SetExpr::ProdSet(family[..j].to_vec()));
        links.push(make_filter(
            &FilterSpec::Generated(vec![core]),
            LINK_BUDGET,
            false,
        )?);
    }
    let prime_filters = family.iter().map(prime_filter).collect::<Result<_>>()?;
    Ok(ChainSpec {
        k,
        scheme: None,
        family,
        links,
        prime_filters,
    })
}

impl ChainSpec {
    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = Some(scheme);
        self
    }

    /// Rebuilds a chain from its serialized parts without checking that the
    /// links form a chain; [`verify_chain`] does that.
    pub fn from_parts(
        family: Vec<SetExpr>,
        links: &[FilterSpec],
        scheme: Option<Scheme>,
    ) -> Result<Self> {
        let k = family.len();
        if links.len() != k + 1 {
            return Err(Error::Precondition(format!(
                "a chain over {k} family members needs {} links, got {}",
                k + 1,
                links.len()
            )));
        }
        check_almost_disjoint(&family)?;
        let links = links
            .iter()
            .map(|s| make_filter(s, LINK_BUDGET, false))
            .collect::<Result<_>>()?;
        let prime_filters = family.iter().map(prime_filter).collect::<Result<_>>()?;
        Ok(ChainSpec {
            k,
            scheme,
            family,
            links,
            prime_filters,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairCheck {
    /// `P_β |̃ F_α`, expected for `β < α`.
    Divides,
    /// `up(A_β) ∉ F_α`, expected for `β ≥ α`.
    Excludes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairResult {
    pub beta: usize,
    pub alpha: usize,
    pub check: PairCheck,
    pub expected: ProofState,
    pub verdict: Verdict,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkResult {
    pub j: usize,
    pub verdict: Verdict,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub k: usize,
    pub bound: u64,
    pub pairs: Vec<PairResult>,
    /// `F_j |̃ F_{j+1}` for each `j < k`.
    pub links: Vec<LinkResult>,
    /// `matrix[α][β]`: verdict state of the pair check for `(β, α)`.
    pub matrix: Vec<Vec<ProofState>>,
    pub pass: bool,
}

impl ChainReport {
    pub fn failures(&self) -> impl Iterator<Item = &PairResult> {
        self.pairs.iter().filter(|p| !p.ok)
    }
}

pub fn verify_chain(chain: &ChainSpec, bound: u64) -> Result<ChainReport> {
    if bound == 0 {
        return Err(Error::ZeroBudget);
    }
    let k = chain.k;
    let mut pairs = Vec::new();
    let mut matrix = vec![vec![ProofState::UnknownAtBound; k]; k + 1];
    for alpha in 0..=k {
        for beta in 0..k {
            let (check, expected, verdict) = if beta < alpha {
                let v = divides_tilde(&chain.prime_filters[beta], &chain.links[alpha], bound)?;
                (PairCheck::Divides, ProofState::Proved, v)
            } else {
                let up = SetExpr::up(chain.family[beta].clone());
                let v = filter_member(&chain.links[alpha], &up, bound)?;
                (PairCheck::Excludes, ProofState::Refuted, v)
            };
            matrix[alpha][beta] = verdict.state;
            pairs.push(PairResult {
                beta,
                alpha,
                check,
                expected,
                ok: verdict.state == expected,
                verdict,
            });
        }
    }
    let mut links = Vec::new();
    for j in 0..k {
        let verdict = divides_tilde(&chain.links[j], &chain.links[j + 1], bound)?;
        links.push(LinkResult {
            j,
            ok: verdict.is_proved(),
            verdict,
        });
    }
    let pass = pairs.iter().all(|p| p.ok) && links.iter().all(|l| l.ok);
    Ok(ChainReport {
        k,
        bound,
        pairs,
        links,
        matrix,
        pass,
    })
}

/// Largest `k` with `k!` in a `u64`.
pub const MAX_FACTORIAL_ARG: usize = 20;

/// The filter generated by `mult(1!), …, mult(k!)`; its core is `mult(k!)`.
pub fn max_approx(k: usize) -> Result<FilterPresentation> {
    if k == 0 {
        return Err(Error::ParamOutOfRange("max_approx needs k >= 1".into()));
    }
    if k > MAX_FACTORIAL_ARG {
        return Err(Error::Overflow(format!("{k}! does not fit in 64 bits")));
    }
    let gens: Vec<SetExpr> = (1..=k as u64)
        .map(|i| arith::factorial(i).map(SetExpr::Mult))
        .collect::<Result<_>>()?;
    let top = arith::factorial(k as u64)?;
    Ok(FilterPresentation::from_parts(
        FilterSpec::Generated(gens),
        SetExpr::Mult(top),
        Nonempty::Witness { value: top },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antichain::is_n_free;

    #[test]
    fn residue_family() {
        let f = ad_family(4, Scheme::Residue).unwrap();
        assert_eq!(f[0].to_string(), "primesIdx(1,4)");
        assert_eq!(f[3].to_string(), "primesIdx(4,4)");
        assert_eq!(
            ad_family(1, Scheme::Residue).unwrap(),
            vec![SetExpr::primes_idx(1, 1)]
        );
        check_almost_disjoint(&f).unwrap();
    }

    #[test]
    fn tree_family_overlaps_finitely() {
        let f = ad_family(8, Scheme::Tree).unwrap();
        assert_eq!(f.len(), 8);
        check_almost_disjoint(&f).unwrap();
        // every member contains the root prime 2
        assert!(f.iter().all(|e| e.member(2, 10).unwrap().is_proved()));
        assert_eq!(ad_family(1, Scheme::Tree).unwrap(), vec![SetExpr::P]);
    }

    #[test]
    fn rejects_bad_families() {
        let err = build_chain(2, &[SetExpr::P, SetExpr::P]).unwrap_err();
        assert_eq!(err, Error::NotAlmostDisjoint { left: 0, right: 1 });
        let err = build_chain(3, &ad_family(2, Scheme::Residue).unwrap()).unwrap_err();
        assert_eq!(err, Error::FamilyTooSmall { needed: 3, got: 2 });
    }

    #[test]
    fn small_chains() {
        let c = build_chain(0, &[]).unwrap();
        assert_eq!(c.links.len(), 1);
        assert!(verify_chain(&c, 100).unwrap().pass);

        let fam = ad_family(3, Scheme::Residue).unwrap();
        let c = build_chain(3, &fam).unwrap();
        assert_eq!(
            c.links[2].to_string(),
            "gen:[up(prodset(primesIdx(1,3),primesIdx(2,3)))]"
        );
        let r = verify_chain(&c, 1_000_000).unwrap();
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.pairs.len(), 12);
    }

    #[test]
    fn permuted_links_fail() {
        let fam = ad_family(3, Scheme::Residue).unwrap();
        let c = build_chain(3, &fam).unwrap();
        let mut specs: Vec<FilterSpec> = c.links.iter().map(|l| l.spec().clone()).collect();
        specs.swap(1, 2);
        let bad = ChainSpec::from_parts(fam, &specs, None).unwrap();
        let r = verify_chain(&bad, 10_000).unwrap();
        assert!(!r.pass);
        assert!(r.failures().any(|p| p.alpha == 1 && p.beta == 1));
    }

    #[test]
    fn max_approx_examples() {
        let m = max_approx(4).unwrap();
        assert_eq!(m.core(), &SetExpr::Mult(24));
        let three = FilterPresentation::principal(3).unwrap();
        assert!(divides_tilde(&three, &m, 100).unwrap().is_proved());
        assert_eq!(max_approx(1).unwrap().core(), &SetExpr::Mult(1));
        let r = is_n_free(max_approx(2).unwrap().core(), 100).unwrap();
        assert_eq!(r.cover.unwrap().covers, vec![2]);
        assert!(matches!(max_approx(21), Err(Error::Overflow(_))));
    }
}
