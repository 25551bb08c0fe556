//! Strong antichains (pairwise-coprime subsets) and their covering dual.
//!
//! A set is covered by `n₁N ∪ … ∪ n_kN` (all `nᵢ ≥ 2`) exactly when its
//! strong antichains are bounded in size, so the two searches here certify
//! opposite sides of the same question: is the set N-free?

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::eval::Enumeration;
use crate::expr::SetExpr;
use crate::structural::{self, is_prime_set, is_upclosed, is_upward_closed, subset_structural};
use crate::verdict::{Certificate, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AntichainMode {
    Exact,
    Greedy,
}

impl std::str::FromStr for AntichainMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(AntichainMode::Exact),
            "greedy" => Ok(AntichainMode::Greedy),
            other => Err(Error::ParamOutOfRange(format!(
                "unknown antichain mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntichainCertificate {
    /// Pairwise coprime members of `host`, ascending.
    pub witness: Vec<u64>,
    pub host: SetExpr,
    pub bound: u64,
    pub mode: AntichainMode,
}

impl AntichainCertificate {
    pub fn size(&self) -> usize {
        self.witness.len()
    }

    /// 1 is coprime to everything, so it may sit in any antichain.
    pub fn contains_one(&self) -> bool {
        self.witness.first() == Some(&1)
    }
}

impl Serialize for AntichainCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Shape<'a> {
            kind: &'static str,
            host_expr: String,
            witness: &'a [u64],
            bound: u64,
            mode: AntichainMode,
            contains_one: bool,
        }
        Shape {
            kind: "antichain",
            host_expr: self.host.to_string(),
            witness: &self.witness,
            bound: self.bound,
            mode: self.mode,
            contains_one: self.contains_one(),
        }
        .serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringCertificate {
    /// Every member of `host` (up to `verified_bound`, or everywhere when
    /// `structural`) is divisible by one of these.
    pub covers: Vec<u64>,
    pub host: SetExpr,
    pub verified_bound: u64,
    /// True when `host ⊆ ⋃ mult(nᵢ)` is proved by rule, not just checked up to the bound.
    pub structural: bool,
}

impl Serialize for CoveringCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Shape<'a> {
            kind: &'static str,
            host_expr: String,
            covers: &'a [u64],
            bound: u64,
            mode: &'static str,
        }
        Shape {
            kind: "covering",
            host_expr: self.host.to_string(),
            covers: &self.covers,
            bound: self.verified_bound,
            mode: if self.structural {
                "structural"
            } else {
                "bound_verified"
            },
        }
        .serialize(s)
    }
}

fn complete_members(e: &SetExpr, bound: u64) -> Result<Vec<u64>> {
    let en: Enumeration = e.enumerate_upto(bound, bound.max(1))?;
    if !en.complete {
        return Err(Error::IncompleteEnumeration {
            expr: e.to_string(),
            bound,
            unknown: en.unknown.len(),
        });
    }
    Ok(en.members)
}

pub fn max_strong_antichain(
    e: &SetExpr,
    bound: u64,
    mode: AntichainMode,
) -> Result<AntichainCertificate> {
    if bound == 0 {
        return Err(Error::OutOfDomain(0));
    }
    let members = complete_members(e, bound)?;
    let witness = match mode {
        AntichainMode::Greedy => greedy_antichain(&members)?,
        AntichainMode::Exact => exact_antichain(&members)?,
    };
    Ok(AntichainCertificate {
        witness,
        host: e.clone(),
        bound,
        mode,
    })
}

/// Ascending scan keeping every element coprime to those already kept.
pub fn greedy_antichain(members: &[u64]) -> Result<Vec<u64>> {
    let mut used: HashSet<u64> = HashSet::new();
    let mut out = Vec::new();
    for &m in members {
        let primes: Vec<u64> = arith::factorize(m)?.primes().collect();
        if primes.iter().all(|p| !used.contains(p)) {
            used.extend(primes);
            out.push(m);
        }
    }
    Ok(out)
}

/// Maximum pairwise-coprime subset.
///
/// Coprimality only sees prime supports, and an element whose support
/// strictly contains another element's support can always be swapped for
/// it, so the search runs over the minimal supports (each represented by
/// its least element). The rest is a branch-and-bound maximum clique search
/// with a greedy-colouring bound, vertices ordered by smallest prime factor.
pub fn exact_antichain(members: &[u64]) -> Result<Vec<u64>> {
    let has_one = members.first() == Some(&1);
    let mut by_radical: HashMap<u64, (u64, Vec<u64>)> = HashMap::new();
    for &m in members.iter().filter(|&&m| m > 1) {
        let f = arith::factorize(m)?;
        let primes: Vec<u64> = f.primes().collect();
        let radical = primes.iter().product();
        by_radical.entry(radical).or_insert((m, primes));
    }
    let mut vertices: Vec<(u64, Vec<u64>)> = Vec::new();
    for (&radical, (rep, primes)) in &by_radical {
        let dominated = arith::divisors(radical)?
            .into_iter()
            .any(|d| d > 1 && d < radical && by_radical.contains_key(&d));
        if !dominated {
            vertices.push((*rep, primes.clone()));
        }
    }
    vertices.sort_by_key(|(rep, primes)| (primes[0], *rep));

    let n = vertices.len();
    let mut graph = BitGraph::new(n);
    let mut holders: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, (_, primes)) in vertices.iter().enumerate() {
        for &p in primes {
            holders.entry(p).or_default().push(i);
        }
    }
    graph.fill();
    for list in holders.values() {
        for &i in list {
            for &j in list {
                graph.unlink(i, j);
            }
        }
    }

    let mut best = Vec::new();
    let mut current = Vec::new();
    graph.expand(BitSet::full(n), &mut current, &mut best);

    let mut out: Vec<u64> = best.into_iter().map(|i| vertices[i].0).collect();
    if has_one {
        out.push(1);
    }
    out.sort_unstable();
    Ok(out)
}

#[derive(Clone)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn empty(n: usize) -> Self {
        BitSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn and(&self, other: &BitSet) -> BitSet {
        BitSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    fn and_not(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }
}

struct BitGraph {
    adj: Vec<BitSet>,
}

impl BitGraph {
    fn new(n: usize) -> Self {
        BitGraph {
            adj: vec![BitSet::empty(n); n],
        }
    }

    fn fill(&mut self) {
        let n = self.adj.len();
        for i in 0..n {
            self.adj[i] = BitSet::full(n);
            self.adj[i].remove(i);
        }
    }

    fn unlink(&mut self, i: usize, j: usize) {
        self.adj[i].remove(j);
        self.adj[j].remove(i);
    }

    /// Greedy colouring of `candidates` in index order; colours ascend.
    fn colour(&self, candidates: &BitSet) -> Vec<(usize, usize)> {
        let mut uncoloured = candidates.clone();
        let mut out = Vec::new();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.first() {
                uncoloured.remove(v);
                q.remove(v);
                q.and_not(&self.adj[v]);
                out.push((v, colour));
            }
        }
        out
    }

    fn expand(&self, mut candidates: BitSet, current: &mut Vec<usize>, best: &mut Vec<usize>) {
        let order = self.colour(&candidates);
        for &(v, colour) in order.iter().rev() {
            if current.len() + colour <= best.len() {
                return;
            }
            current.push(v);
            let next = candidates.and(&self.adj[v]);
            if next.is_empty() {
                if current.len() > best.len() {
                    *best = current.clone();
                }
            } else {
                self.expand(next, current, best);
            }
            current.pop();
            candidates.remove(v);
        }
    }
}

/// Least `m <= bound` in `e`, outside `x`, coprime to every element of `x`.
pub fn extend_antichain(e: &SetExpr, x: &BTreeSet<u64>, bound: u64) -> Result<Option<u64>> {
    check_pairwise_coprime(x)?;
    for m in 1..=bound {
        if x.contains(&m) || !x.iter().all(|&a| arith::coprime(a, m)) {
            continue;
        }
        let v = e.member(m, bound.max(1))?;
        if v.is_unknown() {
            return Err(Error::IncompleteEnumeration {
                expr: e.to_string(),
                bound,
                unknown: 1,
            });
        }
        if v.is_proved() {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

fn check_pairwise_coprime(x: &BTreeSet<u64>) -> Result<()> {
    for &a in x {
        if a == 0 {
            return Err(Error::OutOfDomain(0));
        }
        for &b in x.range(a + 1..) {
            if !arith::coprime(a, b) {
                return Err(Error::Precondition(format!("{a} and {b} are not coprime")));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LcmExtension {
    pub a: u64,
    pub b: u64,
    pub lcm: u64,
}

/// For upward-closed `a_set`, `b_set`: the least members `a`, `b` (≤ bound,
/// outside `x`) coprime to all of `x`, and their lcm, which lies in both sets
/// and extends `x` to a larger pairwise-coprime set.
pub fn lcm_extension(
    a_set: &SetExpr,
    b_set: &SetExpr,
    x: &BTreeSet<u64>,
    bound: u64,
) -> Result<Option<LcmExtension>> {
    for (name, s) in [("first", a_set), ("second", b_set)] {
        if !is_upward_closed(s, bound.max(1))?.is_proved() {
            return Err(Error::Precondition(format!(
                "{name} set {s} is not proved upward closed"
            )));
        }
    }
    check_pairwise_coprime(x)?;
    let least = |s: &SetExpr| -> Result<Option<u64>> {
        for m in 1..=bound {
            if !x.contains(&m)
                && x.iter().all(|&y| arith::coprime(y, m))
                && s.member(m, bound)?.is_proved()
            {
                return Ok(Some(m));
            }
        }
        Ok(None)
    };
    let (Some(a), Some(b)) = (least(a_set)?, least(b_set)?) else {
        return Ok(None);
    };
    let lcm = arith::lcm(a, b)?;
    let both = SetExpr::inter(a_set.clone(), b_set.clone());
    if !both.member(lcm, bound.max(lcm))?.is_proved() {
        return Err(Error::Postcondition(format!(
            "lcm {lcm} of {a} and {b} not in {both}"
        )));
    }
    if x.contains(&lcm) || !x.iter().all(|&y| arith::coprime(y, lcm)) {
        return Err(Error::Postcondition(format!(
            "lcm {lcm} does not extend the antichain"
        )));
    }
    Ok(Some(LcmExtension { a, b, lcm }))
}

/// The first cover (fewest sets, then lexicographically least) of all
/// members up to `bound` by `mult(n)` with `2 <= n <= n_max`.
pub fn covering_witness(
    e: &SetExpr,
    k_max: usize,
    n_max: u64,
    bound: u64,
) -> Result<Option<CoveringCertificate>> {
    if k_max == 0 || n_max == 0 || bound == 0 {
        return Err(Error::ParamOutOfRange(
            "k_max, n_max and bound must be at least 1".into(),
        ));
    }
    let members = complete_members(e, bound)?;
    if members.first() == Some(&1) {
        return Ok(None);
    }
    let pool: Vec<u64> = (2..=n_max).collect();
    for k in 0..=k_max.min(pool.len()) {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let covers: Vec<u64> = combo.iter().map(|&i| pool[i]).collect();
            if members.iter().all(|m| covers.iter().any(|c| m % c == 0)) {
                let structural = cover_is_structural(e, &covers)?;
                return Ok(Some(CoveringCertificate {
                    covers,
                    host: e.clone(),
                    verified_bound: bound,
                    structural,
                }));
            }
            if !next_combination(&mut combo, pool.len()) {
                break;
            }
        }
    }
    Ok(None)
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn cover_union(covers: &[u64]) -> SetExpr {
    covers
        .iter()
        .map(|&c| SetExpr::Mult(c))
        .reduce(SetExpr::union)
        .unwrap_or(SetExpr::Empty)
}

fn cover_is_structural(e: &SetExpr, covers: &[u64]) -> Result<bool> {
    Ok(subset_structural(e, &cover_union(covers), 1000)?.is_some())
}

/// A cover read off the expression tree, then confirmed by the subset prover.
pub fn structural_cover(e: &SetExpr) -> Result<Option<CoveringCertificate>> {
    let Some(covers) = cover_rule(e)? else {
        return Ok(None);
    };
    let covers: Vec<u64> = covers.into_iter().collect();
    if !cover_is_structural(e, &covers)? {
        return Ok(None);
    }
    Ok(Some(CoveringCertificate {
        covers,
        host: e.clone(),
        verified_bound: 0,
        structural: true,
    }))
}

fn cover_rule(e: &SetExpr) -> Result<Option<BTreeSet<u64>>> {
    use SetExpr::*;
    Ok(match e {
        Empty => Some(BTreeSet::new()),
        Mult(n) | Scale(_, n) if *n >= 2 => Some(BTreeSet::from([*n])),
        Scale(x, _) | Up(x) | Pow(x, _) => cover_rule(x)?,
        Union(a, b) => match (cover_rule(a)?, cover_rule(b)?) {
            (Some(mut x), Some(y)) => {
                x.extend(y);
                Some(x)
            }
            _ => None,
        },
        Inter(a, b) => match (cover_rule(a)?, cover_rule(b)?) {
            (Some(x), Some(y)) => Some(if y.len() < x.len() { y } else { x }),
            (x, y) => x.or(y),
        },
        ProdSet(args) => {
            let mut best: Option<BTreeSet<u64>> = None;
            for a in args {
                if let Some(c) = cover_rule(a)? {
                    if best.as_ref().is_none_or(|b| c.len() < b.len()) {
                        best = Some(c);
                    }
                }
            }
            best
        }
        Quot(x, n) => {
            // m ∈ quot(x,n) puts mn in some cN, hence m in (c / gcd(c,n))N.
            let divisors = match &**x {
                Lit(s) => {
                    return cover_rule(&Lit(s
                        .iter()
                        .filter(|&&a| a % n == 0)
                        .map(|&a| a / n)
                        .collect()))
                }
                Up(inner) => match &**inner {
                    Lit(s) => Some(s.clone()),
                    _ => cover_rule(x)?,
                },
                _ => cover_rule(x)?,
            };
            divisors.and_then(|d: BTreeSet<u64>| {
                let reduced: BTreeSet<u64> = d.into_iter().map(|c| c / arith::gcd(c, *n)).collect();
                (!reduced.contains(&1)).then_some(reduced)
            })
        }
        Lit(s) if !s.contains(&1) => {
            let mut out = BTreeSet::new();
            for &x in s {
                out.insert(arith::factorize(x)?.factors[0].0);
            }
            Some(out)
        }
        _ => None,
    })
}

/// Name of a rule showing `e` contains an infinite pairwise-coprime family.
pub fn infinite_antichain_rule(e: &SetExpr) -> Result<Option<&'static str>> {
    use SetExpr::*;
    if infinite_primes(e)? {
        return Ok(Some("infinitely many primes"));
    }
    Ok(match e {
        Level(n) if *n >= 1 => Some("prime powers"),
        Union(a, b) => match infinite_antichain_rule(a)? {
            Some(r) => Some(r),
            None => infinite_antichain_rule(b)?,
        },
        Up(x) | Down(x) | Pow(x, _) => infinite_antichain_rule(x)?,
        Quot(x, _) if is_upclosed(x) => infinite_antichain_rule(x)?,
        ProdSet(args) => {
            let mut all = true;
            for a in args {
                all &= infinite_primes(a)?;
            }
            all.then_some("products of fresh primes")
        }
        Quot(x, n) => match &**x {
            Level(k) if arith::omega(*n)? < *k => Some("prime powers"),
            _ => None,
        },
        Inter(a, b) if cofinite(a)? || cofinite(b)? => {
            let rest = if cofinite(a)? { b } else { a };
            infinite_antichain_rule(rest)?
        }
        Inter(a, b)
            if is_upclosed(a)
                && is_upclosed(b)
                && infinite_antichain_rule(a)?.is_some()
                && infinite_antichain_rule(b)?.is_some() =>
        {
            Some("lcm closure of upward-closed sets")
        }
        _ => None,
    })
}

/// `e` misses only finitely many numbers.
fn cofinite(e: &SetExpr) -> Result<bool> {
    Ok(match e {
        SetExpr::N => true,
        SetExpr::Comp(x) => structural::finite_elements(x, 1000)?.is_some(),
        _ => false,
    })
}

/// `e` provably contains infinitely many primes.
fn infinite_primes(e: &SetExpr) -> Result<bool> {
    use SetExpr::*;
    if cofinite_primes(e)? {
        return Ok(true);
    }
    Ok(match e {
        _ if is_prime_set(e) && structural::is_infinite(e, 1)?.is_proved() => true,
        Union(a, b) => infinite_primes(a)? || infinite_primes(b)?,
        Inter(a, b) => {
            (cofinite_primes(a)? && infinite_primes(b)?)
                || (cofinite_primes(b)? && infinite_primes(a)?)
                || (subset_structural(a, b, 1000)?.is_some() && infinite_primes(a)?)
                || (subset_structural(b, a, 1000)?.is_some() && infinite_primes(b)?)
        }
        Up(x) | Down(x) => infinite_primes(x)?,
        Quot(x, _) if is_upclosed(x) => infinite_primes(x)?,
        _ => false,
    })
}

/// `e` contains all but finitely many primes.
fn cofinite_primes(e: &SetExpr) -> Result<bool> {
    use SetExpr::*;
    Ok(match e {
        N | P | Level(1) | PrimesIdx { m: 1, .. } => true,
        // a covered or finite set holds only finitely many primes
        Comp(x) => structural::finite_elements(x, 1000)?.is_some() || cover_rule(x)?.is_some(),
        Union(a, b) => cofinite_primes(a)? || cofinite_primes(b)?,
        Inter(a, b) => cofinite_primes(a)? && cofinite_primes(b)?,
        Up(x) | Down(x) => cofinite_primes(x)?,
        _ => false,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NFreeReport {
    pub verdict: Verdict,
    pub cover: Option<CoveringCertificate>,
    /// Largest antichain found by bounded search (Unknown verdicts only).
    pub antichain: Option<AntichainCertificate>,
}

/// Search effort used when no rule decides N-freeness.
const NFREE_SCAN: u64 = 10_000;

/// Refuted by a structural cover, Proved by an infinite-antichain rule,
/// otherwise Unknown with the best bounded evidence either way.
///
/// A set containing 1 lies in no `nN`, so it is never covered; without an
/// infinite antichain rule such a set stays Unknown.
pub fn is_n_free(e: &SetExpr, budget: u64) -> Result<NFreeReport> {
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    if let Some(cover) = structural_cover(e)? {
        let verdict = Verdict::refuted(
            budget,
            Some(Certificate::Set {
                values: cover.covers.clone(),
            }),
        );
        return Ok(NFreeReport {
            verdict,
            cover: Some(cover),
            antichain: None,
        });
    }
    if let Some(rule) = infinite_antichain_rule(e)? {
        return Ok(NFreeReport {
            verdict: Verdict::proved(budget, Some(Certificate::rule(rule))),
            cover: None,
            antichain: None,
        });
    }
    let bound = budget.min(NFREE_SCAN);
    let antichain = match max_strong_antichain(e, bound, AntichainMode::Greedy) {
        Ok(a) => Some(a),
        Err(Error::IncompleteEnumeration { .. }) => None,
        Err(err) => return Err(err),
    };
    let cover = match covering_witness(e, 3, 30, bound) {
        Ok(c) => c,
        Err(Error::IncompleteEnumeration { .. }) => None,
        Err(err) => return Err(err),
    };
    let found = antichain.as_ref().map_or(0, |a| a.size() as u64);
    Ok(NFreeReport {
        verdict: Verdict::unknown(budget, Some(Certificate::Count { found })),
        cover,
        antichain,
    })
}
