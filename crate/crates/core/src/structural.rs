//! Structural reasoning over [`SetExpr`]: closure properties, finiteness,
//! emptiness, and a rule-based subset prover, plus the bounded searches that
//! back them up when no rule applies.
//!
//! The rule tables are deliberately closed. A rule either proves its
//! conclusion outright or does not fire; nothing here guesses.
//!
//! Upward closed (`E↑ = E`): `N`, `empty`, `mult(n)`, `up(·)`, union and
//! intersection of upward-closed sets, `scale`/`quot` of an upward-closed
//! set, and the complement of a downward-closed set.
//!
//! Downward closed: `down(·)`, `empty`, `N`, literals closed under divisors,
//! `level(0)`, union and intersection of downward-closed sets, `quot` of a
//! downward-closed set, and the complement of an upward-closed set.
//!
//! Subset rules (`X ⊆ Y`):
//!
//! | rule | condition |
//! |------|-----------|
//! | identity | `X` and `Y` are the same tree |
//! | empty / universe | `X` structurally empty, or `Y = N`, or `Y` upward closed and containing 1 |
//! | finite pointwise | `X` has a structurally finite element list, each a member of `Y` |
//! | meet / join | `Y = inter(A,B)` with `X ⊆ A, X ⊆ B`; `Y = union(A,B)` with `X ⊆ A` or `X ⊆ B`; dually for `X` |
//! | upward closure | `Y = up(Z)` with `X ⊆ Z`; `X = up(W)` with `Y` upward closed and `W ⊆ Y` |
//! | multiples | `X = mult(n)` (or `N`) with `Y` upward closed and `n ∈ Y` |
//! | common divisor | a number `c` read off `X` divides all its elements, and `Y = mult(s)` with `s | c` or `Y` is upward closed with `c ∈ Y` |
//! | complement | `Y = comp(Z)` with `X = comp(W)`, `Z ⊆ W`; or `X ∩ Z` structurally empty |
//! | product | `X = prodset(..)` with `Y` upward closed containing one argument; argumentwise inclusion into `prodset` or `up(prodset)` of fewer arguments |
//! | scaled | `X = scale(W,n)` with `Y` upward closed and `W ⊆ Y` or `n ∈ Y`; into `scale(Z,n)`, `up(scale(Z,n))`, `mult(s)`, `up({..})` by dividing out `n` |
//! | power | `X = pow(W,n)` with `Y` upward closed and `W ⊆ Y`; into `pow(Z,n)` with `W ⊆ Z` |
//! | quotient | `quot` is monotone; an upward-closed `Z` lies inside `quot(Z,n)` |
//! | downward closure | `X = down(W)` with `Y` downward closed (or `down(Z)`) and `W ⊆ Y` |
//! | residue refinement | `primesIdx(r,m) ⊆ primesIdx(r',m')` when `m' | m` and `r ≡ r' (mod m')`; all prime classes lie in `P = level(1)` |

use std::collections::BTreeSet;

use crate::arith;
use crate::error::Result;
use crate::eval::{eval, Membership};
use crate::expr::SetExpr;
use crate::verdict::{Certificate, ProofState, Verdict};

const MAX_DEPTH: usize = 24;
/// Largest finite set materialised by [`finite_elements`].
const FINITE_LIMIT: usize = 10_000;
/// Per-node sample size for [`sample_members`].
const SAMPLE: usize = 12;
/// Budget used when sampling needs to evaluate membership internally.
const SAMPLE_BUDGET: u64 = 10_000;

/// Sets whose every element is prime, recognised syntactically.
pub fn is_prime_set(e: &SetExpr) -> bool {
    use SetExpr::*;
    match e {
        P | Level(1) | PrimesIdx { .. } | Empty => true,
        Lit(s) => s.iter().all(|&x| arith::is_prime(x).unwrap_or(false)),
        Inter(a, b) => is_prime_set(a) || is_prime_set(b),
        Union(a, b) => is_prime_set(a) && is_prime_set(b),
        _ => false,
    }
}

pub fn is_upclosed(e: &SetExpr) -> bool {
    use SetExpr::*;
    match e {
        N | Empty | Mult(_) | Up(_) => true,
        Lit(s) => s.is_empty(),
        Union(a, b) | Inter(a, b) => is_upclosed(a) && is_upclosed(b),
        Scale(x, _) | Quot(x, _) => is_upclosed(x),
        Comp(x) => is_downclosed(x),
        _ => false,
    }
}

pub fn is_downclosed(e: &SetExpr) -> bool {
    use SetExpr::*;
    match e {
        N | Empty | Down(_) | Level(0) => true,
        Lit(s) => s
            .iter()
            .all(|&x| arith::divisors(x).is_ok_and(|ds| ds.iter().all(|d| s.contains(d)))),
        Union(a, b) | Inter(a, b) => is_downclosed(a) && is_downclosed(b),
        Quot(x, _) => is_downclosed(x),
        Comp(x) => is_upclosed(x),
        _ => false,
    }
}

/// The elements of `e` when it is structurally finite (and small enough to
/// list), decided exactly. `None` means "no finiteness rule applies".
pub fn finite_elements(e: &SetExpr, budget: u64) -> Result<Option<BTreeSet<u64>>> {
    use SetExpr::*;
    Ok(match e {
        Empty => Some(BTreeSet::new()),
        Lit(s) => Some(s.clone()),
        Level(0) => Some(BTreeSet::from([1])),
        Comp(x) if **x == N => Some(BTreeSet::new()),
        Up(x) => match finite_elements(x, budget)? {
            Some(s) if s.is_empty() => Some(s),
            _ => None,
        },
        Scale(x, n) => {
            finite_elements(x, budget)?.and_then(|s| s.iter().map(|a| a.checked_mul(*n)).collect())
        }
        Pow(x, n) => {
            finite_elements(x, budget)?.and_then(|s| s.iter().map(|a| a.checked_pow(*n)).collect())
        }
        Quot(x, n) => finite_elements(x, budget)?
            .map(|s| s.iter().filter(|&&a| a % n == 0).map(|a| a / n).collect()),
        Down(x) => match finite_elements(x, budget)? {
            Some(s) => {
                let mut out = BTreeSet::new();
                for a in s {
                    out.extend(arith::divisors(a)?);
                }
                (out.len() <= FINITE_LIMIT).then_some(out)
            }
            None => None,
        },
        Union(a, b) => match (finite_elements(a, budget)?, finite_elements(b, budget)?) {
            (Some(mut x), Some(y)) => {
                x.extend(y);
                Some(x)
            }
            _ => None,
        },
        Inter(a, b) => {
            if let Some(s) = finite_elements(a, budget)? {
                filter_exact(&s, b, budget)?
            } else if let Some(s) = finite_elements(b, budget)? {
                filter_exact(&s, a, budget)?
            } else {
                None
            }
        }
        ProdSet(args) => {
            let mut lists = Vec::with_capacity(args.len());
            for a in args {
                match finite_elements(a, budget)? {
                    Some(s) => lists.push(s.into_iter().collect::<Vec<_>>()),
                    None => return Ok(None),
                }
            }
            let total: usize = lists
                .iter()
                .map(Vec::len)
                .try_fold(1usize, |acc, n| acc.checked_mul(n))
                .unwrap_or(usize::MAX);
            if total > FINITE_LIMIT {
                return Ok(None);
            }
            let mut out = BTreeSet::new();
            let mut picked = Vec::new();
            if !distinct_products(&lists, &mut picked, &mut out) {
                return Ok(None);
            }
            Some(out)
        }
        _ => None,
    })
}

fn filter_exact(s: &BTreeSet<u64>, other: &SetExpr, budget: u64) -> Result<Option<BTreeSet<u64>>> {
    let mut out = BTreeSet::new();
    for &x in s {
        match eval(other, x, budget)?.state {
            ProofState::Proved => {
                out.insert(x);
            }
            ProofState::Refuted => {}
            ProofState::UnknownAtBound => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Products of pairwise-distinct picks, one per list. Returns false on overflow.
fn distinct_products(lists: &[Vec<u64>], picked: &mut Vec<u64>, out: &mut BTreeSet<u64>) -> bool {
    let Some((first, rest)) = lists.split_first() else {
        let mut p = 1u64;
        for &x in picked.iter() {
            match p.checked_mul(x) {
                Some(v) => p = v,
                None => return false,
            }
        }
        out.insert(p);
        return true;
    };
    for &x in first {
        if picked.contains(&x) {
            continue;
        }
        picked.push(x);
        let ok = distinct_products(rest, picked, out);
        picked.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// Emptiness by rule only.
pub fn is_empty_structural(e: &SetExpr, budget: u64) -> Result<bool> {
    use SetExpr::*;
    if let Some(s) = finite_elements(e, budget)? {
        return Ok(s.is_empty());
    }
    Ok(match e {
        Empty => true,
        Comp(x) => **x == N,
        Up(x) | Scale(x, _) | Pow(x, _) | Down(x) => is_empty_structural(x, budget)?,
        Quot(x, _) => is_empty_structural(x, budget)?,
        Union(a, b) => is_empty_structural(a, budget)? && is_empty_structural(b, budget)?,
        ProdSet(args) => {
            let mut any = false;
            for a in args {
                any |= is_empty_structural(a, budget)?;
            }
            any
        }
        Inter(a, b) => {
            if is_empty_structural(a, budget)? || is_empty_structural(b, budget)? {
                return Ok(true);
            }
            if let (PrimesIdx { r: r1, m: m1 }, PrimesIdx { r: r2, m: m2 }) = (&**a, &**b) {
                let g = arith::gcd(*m1, *m2);
                return Ok(r1 % g != r2 % g);
            }
            match (&**a, &**b) {
                (x, Comp(y)) | (Comp(y), x) => subset_rule(x, y, budget, 0)?.is_some(),
                _ => false,
            }
        }
        _ => false,
    })
}

/// The structural subset prover; returns the name of the rule that fired.
pub fn subset_structural(x: &SetExpr, y: &SetExpr, budget: u64) -> Result<Option<&'static str>> {
    subset_rule(x, y, budget, 0)
}

fn subset_rule(
    x: &SetExpr,
    y: &SetExpr,
    budget: u64,
    depth: usize,
) -> Result<Option<&'static str>> {
    use SetExpr::*;
    if depth > MAX_DEPTH {
        return Ok(None);
    }
    let d = depth + 1;
    let sub =
        |a: &SetExpr, b: &SetExpr| -> Result<bool> { Ok(subset_rule(a, b, budget, d)?.is_some()) };
    if x == y {
        return Ok(Some("identity"));
    }
    if *y == N || (is_upclosed(y) && eval(y, 1, budget)?.is_proved()) {
        return Ok(Some("universe"));
    }
    if let Some(s) = finite_elements(x, budget)? {
        let mut all = true;
        for &a in &s {
            if !eval(y, a, budget)?.is_proved() {
                all = false;
                break;
            }
        }
        if all {
            return Ok(Some("finite pointwise"));
        }
    }

    if let Some(c) = common_divisor(x) {
        let inside = match y {
            Mult(s) => c % s == 0,
            _ => is_upclosed(y) && y.member(c, budget)?.is_proved(),
        };
        if inside {
            return Ok(Some("common divisor"));
        }
    }

    match y {
        Inter(a, b) if sub(x, a)? && sub(x, b)? => return Ok(Some("meet")),
        Union(a, b) if sub(x, a)? || sub(x, b)? => return Ok(Some("join")),
        Up(z) if sub(x, z)? => return Ok(Some("upward closure")),
        Comp(z) => {
            if let Comp(w) = x {
                if sub(z, w)? {
                    return Ok(Some("complement"));
                }
            }
            if depth < MAX_DEPTH / 2
                && is_empty_structural(&SetExpr::inter(x.clone(), (**z).clone()), budget)?
            {
                return Ok(Some("disjoint"));
            }
        }
        Quot(z, _) if is_upclosed(z) && sub(x, z)? => return Ok(Some("quotient of upset")),
        _ => {}
    }

    Ok(match x {
        Union(a, b) if sub(a, y)? && sub(b, y)? => Some("join"),
        Inter(a, b) if sub(a, y)? || sub(b, y)? => Some("meet"),
        Up(w) if is_upclosed(y) && sub(w, y)? => Some("upward closure"),
        Mult(n) if is_upclosed(y) && eval(y, *n, budget)?.is_proved() => Some("multiples"),
        N if is_upclosed(y) && eval(y, 1, budget)?.is_proved() => Some("multiples"),
        ProdSet(args) => prodset_subset(args, y, budget, d)?,
        Scale(w, n) => scale_subset(w, *n, y, budget, d)?,
        Pow(w, n) => {
            if is_upclosed(y) && sub(w, y)? {
                Some("power of upset")
            } else {
                match y {
                    Pow(z, k) if k == n && sub(w, z)? => Some("power"),
                    _ => None,
                }
            }
        }
        Quot(w, n) => match y {
            Quot(z, k) if k == n && sub(w, z)? => Some("quotient"),
            _ => None,
        },
        Down(w) => {
            if let Down(z) = y {
                if sub(w, y)? || sub(w, z)? {
                    return Ok(Some("downward closure"));
                }
            }
            if is_downclosed(y) && sub(w, y)? {
                Some("downward closure")
            } else {
                None
            }
        }
        PrimesIdx { r, m } => match y {
            PrimesIdx { r: r2, m: m2 } if m % m2 == 0 && (r + m2 - r2 % m2) % m2 == 0 => {
                Some("residue refinement")
            }
            P | Level(1) => Some("primes"),
            _ => None,
        },
        P | Level(1) => match y {
            P | Level(1) | PrimesIdx { m: 1, .. } => Some("primes"),
            _ => None,
        },
        _ => None,
    })
}

/// A number dividing every element of `e`, read off the tree.
pub fn common_divisor(e: &SetExpr) -> Option<u64> {
    use SetExpr::*;
    match e {
        N | P | Level(_) | PrimesIdx { .. } | Factorials | Comp(_) | Down(_) => Some(1),
        Empty => None,
        Mult(n) => Some(*n),
        Lit(s) => s.iter().copied().reduce(arith::gcd),
        Up(x) => common_divisor(x),
        Scale(x, n) => common_divisor(x)?.checked_mul(*n),
        Pow(x, n) => common_divisor(x)?.checked_pow(*n),
        Quot(x, n) => common_divisor(x).map(|c| c / arith::gcd(c, *n)),
        ProdSet(args) => args
            .iter()
            .try_fold(1u64, |acc, a| acc.checked_mul(common_divisor(a)?)),
        Union(a, b) => Some(arith::gcd(common_divisor(a)?, common_divisor(b)?)),
        Inter(a, b) => arith::lcm(common_divisor(a)?, common_divisor(b)?).ok(),
    }
}

fn prodset_subset(
    args: &[SetExpr],
    y: &SetExpr,
    budget: u64,
    depth: usize,
) -> Result<Option<&'static str>> {
    let sub = |a: &SetExpr, b: &SetExpr| -> Result<bool> {
        Ok(subset_rule(a, b, budget, depth)?.is_some())
    };
    if is_upclosed(y) {
        for a in args {
            if sub(a, y)? {
                return Ok(Some("product into upset"));
            }
        }
    }
    let mut y = y;
    while let SetExpr::Up(inner) = y {
        match &**inner {
            SetExpr::Up(_) => y = inner,
            _ => break,
        }
    }
    let (targets, up) = match y {
        SetExpr::ProdSet(ys) => (ys, false),
        SetExpr::Up(inner) => match &**inner {
            SetExpr::ProdSet(ys) => (ys, true),
            _ => return Ok(None),
        },
        _ => return Ok(None),
    };
    if targets.len() > args.len() || (!up && targets.len() != args.len()) {
        return Ok(None);
    }
    if !up {
        for (a, t) in args.iter().zip(targets) {
            if !sub(a, t)? {
                return Ok(None);
            }
        }
        return Ok(Some("product monotone"));
    }
    // every target factor needs its own argument
    let mut fits = vec![vec![false; args.len()]; targets.len()];
    for (i, t) in targets.iter().enumerate() {
        for (j, a) in args.iter().enumerate() {
            fits[i][j] = sub(a, t)?;
        }
    }
    Ok(bool_matching(&fits).then_some("sub-product"))
}

fn bool_matching(fits: &[Vec<bool>]) -> bool {
    fn augment(
        row: usize,
        fits: &[Vec<bool>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for col in 0..seen.len() {
            if fits[row][col] && !seen[col] {
                seen[col] = true;
                if owner[col].is_none_or(|o| augment(o, fits, seen, owner)) {
                    owner[col] = Some(row);
                    return true;
                }
            }
        }
        false
    }
    let cols = fits.first().map_or(0, Vec::len);
    let mut owner = vec![None; cols];
    (0..fits.len()).all(|row| augment(row, fits, &mut vec![false; cols], &mut owner))
}

fn scale_subset(
    w: &SetExpr,
    n: u64,
    y: &SetExpr,
    budget: u64,
    depth: usize,
) -> Result<Option<&'static str>> {
    use SetExpr::*;
    let sub = |a: &SetExpr, b: &SetExpr| -> Result<bool> {
        Ok(subset_rule(a, b, budget, depth)?.is_some())
    };
    if is_upclosed(y) && (eval(y, n, budget)?.is_proved() || sub(w, y)?) {
        return Ok(Some("scaled upset"));
    }
    Ok(match y {
        Scale(z, k) if *k == n && sub(w, z)? => Some("scaled"),
        Up(inner) => match &**inner {
            Scale(z, k) if *k == n && sub(w, &SetExpr::up((**z).clone()))? => Some("scaled"),
            Lit(s) => {
                let reduced: BTreeSet<u64> =
                    s.iter().filter(|&&a| a % n == 0).map(|a| a / n).collect();
                (!reduced.is_empty() && sub(w, &SetExpr::up(Lit(reduced)))?).then_some("scaled")
            }
            _ => None,
        },
        Mult(s) => {
            let g = arith::gcd(n, *s);
            sub(w, &Mult(s / g))?.then_some("scaled multiples")
        }
        _ => None,
    })
}

/// Structured candidate members of `e`, ascending. Candidates are not
/// guaranteed members; callers verify them with exact membership.
pub fn sample_members(e: &SetExpr) -> Result<Vec<u64>> {
    let mut v = samples(e, SAMPLE, 0)?;
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

fn samples(e: &SetExpr, k: usize, depth: usize) -> Result<Vec<u64>> {
    use SetExpr::*;
    if depth > MAX_DEPTH {
        return Ok(Vec::new());
    }
    let d = depth + 1;
    let k64 = k as u64;
    Ok(match e {
        N | Comp(_) => (1..=4 * k64).collect(),
        Empty => Vec::new(),
        P | Level(1) => (1..=k64).filter_map(|i| arith::nth_prime(i).ok()).collect(),
        Lit(s) => s.iter().copied().take(4 * k).collect(),
        Mult(n) => (1..=k64).filter_map(|i| i.checked_mul(*n)).collect(),
        Level(0) => vec![1],
        Level(j) => {
            let mut out = Vec::new();
            for i in 1..=k64 {
                let p = arith::nth_prime(i)?;
                out.extend(p.checked_pow(*j));
                out.extend(2u64.checked_pow(j - 1).and_then(|t| t.checked_mul(p)));
            }
            out
        }
        PrimesIdx { r, m } => (0..k64)
            .filter_map(|t| arith::nth_prime(r + t * m).ok())
            .collect(),
        Factorials => (1..=20u64)
            .take(k)
            .filter_map(|n| arith::factorial(n).ok())
            .collect(),
        Pow(x, n) => samples(x, k, d)?
            .into_iter()
            .filter_map(|s| s.checked_pow(*n))
            .collect(),
        ProdSet(args) => {
            let lists: Vec<Vec<u64>> = args
                .iter()
                .map(|a| {
                    let mut v = samples(a, k, d)?;
                    v.sort_unstable();
                    v.dedup();
                    Ok(v)
                })
                .collect::<Result<_>>()?;
            product_samples(&lists, k)
        }
        Union(a, b) => {
            let mut v = samples(a, k, d)?;
            v.extend(samples(b, k, d)?);
            v
        }
        Inter(a, b) => {
            let sa = samples(a, k, d)?;
            let sb = samples(b, k, d)?;
            let mut pool: Vec<u64> = sa.iter().chain(&sb).copied().collect();
            for &s in sa.iter().take(k) {
                for &t in sb.iter().take(k) {
                    pool.extend(arith::lcm(s, t).ok());
                }
            }
            pool.sort_unstable();
            pool.dedup();
            let mut out = Vec::new();
            for x in pool {
                if eval(e, x, SAMPLE_BUDGET)?.is_proved() {
                    out.push(x);
                }
            }
            out
        }
        Up(x) => {
            let base = samples(x, k, d)?;
            let mut out = base.clone();
            for &s in base.iter().take(k) {
                out.extend([2, 3].iter().filter_map(|f| s.checked_mul(*f)));
            }
            out
        }
        Down(x) => {
            let mut out = Vec::new();
            for s in samples(x, k, d)?.into_iter().take(k) {
                out.extend(arith::divisors(s)?);
            }
            out
        }
        Quot(x, n) => {
            let base = samples(x, k, d)?;
            let mut out: Vec<u64> = base
                .iter()
                .filter(|&&s| s % n == 0)
                .map(|s| s / n)
                .collect();
            if is_upclosed(x) {
                out.extend(base);
            }
            out
        }
        Scale(x, n) => samples(x, k, d)?
            .into_iter()
            .filter_map(|s| s.checked_mul(*n))
            .collect(),
    })
}

/// Products with one pairwise-distinct pick per list: a diagonal sweep
/// (everyone takes their t-th candidate) plus single-coordinate variations.
fn product_samples(lists: &[Vec<u64>], k: usize) -> Vec<u64> {
    if lists.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut push = |picks: &[usize]| {
        let chosen: Vec<u64> = picks
            .iter()
            .zip(lists)
            .map(|(&i, l)| l[i.min(l.len() - 1)])
            .collect();
        let mut sorted = chosen.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != chosen.len() {
            return;
        }
        if let Some(p) = chosen.iter().try_fold(1u64, |acc, &x| acc.checked_mul(x)) {
            out.push(p);
        }
    };
    for t in 0..k {
        push(&vec![t; lists.len()]);
    }
    // arguments take consecutive candidates so shared small values are avoided
    push(&(0..lists.len()).collect::<Vec<_>>());
    for i in 0..lists.len() {
        for t in 0..k {
            let mut picks = vec![0; lists.len()];
            picks[i] = t;
            push(&picks);
            let mut picks = vec![k / 2; lists.len()];
            picks[i] = t;
            push(&picks);
        }
    }
    out
}

/// A proved member of `e`: structured candidates first, then a scan up to `budget`.
pub fn find_member(e: &SetExpr, budget: u64) -> Result<Option<u64>> {
    for c in sample_members(e)? {
        if eval(e, c, budget)?.is_proved() {
            return Ok(Some(c));
        }
    }
    for m in 1..=budget {
        if eval(e, m, budget)?.is_proved() {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Three-valued `X ⊆ Y`. Proved by exact pointwise check of a finite `X` or
/// by a structural rule; Refuted by a verified witness `x ∈ X ∖ Y` taken from
/// structured candidates or a scan up to `budget`.
pub fn subset_verdict<Y: Membership + ?Sized>(x: &SetExpr, y: &Y, budget: u64) -> Result<Verdict> {
    if let Some(s) = finite_elements(x, budget)? {
        let mut unknown = false;
        for &a in &s {
            match y.member(a, budget)?.state {
                ProofState::Refuted => {
                    return Ok(Verdict::refuted(budget, Some(Certificate::number(a))))
                }
                ProofState::UnknownAtBound => unknown = true,
                ProofState::Proved => {}
            }
        }
        return Ok(if unknown {
            Verdict::unknown(budget, None)
        } else {
            Verdict::proved(budget, Some(Certificate::rule("finite pointwise")))
        });
    }
    if let Some(ye) = y.as_expr() {
        if let Some(rule) = subset_structural(x, ye, budget)? {
            return Ok(Verdict::proved(budget, Some(Certificate::rule(rule))));
        }
    }
    for c in sample_members(x)? {
        if eval(x, c, budget)?.is_proved() && y.member(c, budget)?.is_refuted() {
            return Ok(Verdict::refuted(budget, Some(Certificate::number(c))));
        }
    }
    for m in 1..=budget {
        if eval(x, m, budget)?.is_proved() && y.member(m, budget)?.is_refuted() {
            return Ok(Verdict::refuted(budget, Some(Certificate::number(m))));
        }
    }
    Ok(Verdict::unknown(budget, None))
}

pub fn is_upward_closed(e: &SetExpr, budget: u64) -> Result<Verdict> {
    if is_upclosed(e) {
        return Ok(Verdict::proved(
            budget,
            Some(Certificate::rule("upward-closed constructor")),
        ));
    }
    for m in 1..=budget {
        if !eval(e, m, budget)?.is_proved() {
            continue;
        }
        let mut km = 2 * m;
        while km <= budget {
            if eval(e, km, budget)?.is_refuted() {
                return Ok(Verdict::refuted(
                    budget,
                    Some(Certificate::Pair {
                        first: m,
                        second: km,
                    }),
                ));
            }
            km += m;
        }
    }
    Ok(Verdict::unknown(budget, None))
}

/// Infinitude by rule; finiteness only from a structurally finite element list.
pub fn is_infinite(e: &SetExpr, budget: u64) -> Result<Verdict> {
    if infinite_rule(e, budget, 0)? {
        return Ok(Verdict::proved(
            budget,
            Some(Certificate::rule("infinite constructor")),
        ));
    }
    if let Some(s) = finite_elements(e, budget)? {
        return Ok(Verdict::refuted(
            budget,
            Some(Certificate::Set {
                values: s.into_iter().collect(),
            }),
        ));
    }
    let mut found = 0;
    for m in 1..=budget {
        if eval(e, m, budget)?.is_proved() {
            found += 1;
        }
    }
    Ok(Verdict::unknown(budget, Some(Certificate::Count { found })))
}

fn infinite_rule(e: &SetExpr, budget: u64, depth: usize) -> Result<bool> {
    use SetExpr::*;
    if depth > MAX_DEPTH {
        return Ok(false);
    }
    let d = depth + 1;
    let inf = |x: &SetExpr| infinite_rule(x, budget, d);
    Ok(match e {
        N | P | Mult(_) | PrimesIdx { .. } | Factorials => true,
        Level(n) => *n >= 1,
        Comp(x) => finite_elements(x, budget)?.is_some(),
        Up(x) => is_nonempty(x, budget, d)?,
        Down(x) | Scale(x, _) | Pow(x, _) => inf(x)?,
        Quot(x, _) => is_upclosed(x) && is_nonempty(x, budget, d)?,
        Union(a, b) => inf(a)? || inf(b)?,
        ProdSet(args) => {
            let mut all = true;
            for a in args {
                all &= inf(a)?;
            }
            all
        }
        Inter(a, b) => {
            if is_upclosed(e) {
                is_nonempty(e, budget, d)?
            } else {
                let cofinite = |x: &SetExpr| -> Result<bool> {
                    Ok(matches!(x, Comp(y) if finite_elements(y, budget)?.is_some()))
                };
                if (cofinite(b)? && inf(a)?) || (cofinite(a)? && inf(b)?) {
                    true
                } else if let (PrimesIdx { r: r1, m: m1 }, PrimesIdx { r: r2, m: m2 }) =
                    (&**a, &**b)
                {
                    let g = arith::gcd(*m1, *m2);
                    r1 % g == r2 % g
                } else {
                    (subset_rule(a, b, budget, d)?.is_some() && inf(a)?)
                        || (subset_rule(b, a, budget, d)?.is_some() && inf(b)?)
                }
            }
        }
        _ => false,
    })
}

/// Nonemptiness by rule or by a verified sample. Intersections of
/// nonempty upward-closed sets are nonempty (they contain an lcm).
fn is_nonempty(e: &SetExpr, budget: u64, depth: usize) -> Result<bool> {
    if infinite_rule(e, budget, depth)? && !matches!(e, SetExpr::Inter(..)) {
        return Ok(true);
    }
    if let SetExpr::Inter(a, b) = e {
        if is_upclosed(a)
            && is_upclosed(b)
            && is_nonempty(a, budget, depth + 1)?
            && is_nonempty(b, budget, depth + 1)?
        {
            return Ok(true);
        }
    }
    if let Some(s) = finite_elements(e, budget)? {
        return Ok(!s.is_empty());
    }
    for c in sample_members(e)? {
        if eval(e, c, budget)?.is_proved() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `up(B)/m` for a finite set of primes `B`: all of N if some `p ∈ B`
/// divides `m`, otherwise `up(B)` itself.
pub fn quotient_case_rule(b: &BTreeSet<u64>, m: u64) -> Result<SetExpr> {
    if m == 0 {
        return Err(crate::Error::OutOfDomain(0));
    }
    for &p in b {
        if !arith::is_prime(p)? {
            return Err(crate::Error::NotPrime(p));
        }
    }
    Ok(if b.iter().any(|p| m % p == 0) {
        SetExpr::N
    } else {
        SetExpr::up(SetExpr::Lit(b.clone()))
    })
}
