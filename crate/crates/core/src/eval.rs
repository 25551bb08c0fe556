//! Pointwise membership for [`SetExpr`].
//!
//! Every constructor except `down` is decided exactly. `down(E)` is an
//! unbounded existential ("some multiple of m lies in E"), so it is proved by
//! scanning multiples up to the budget and otherwise left undecided, unless
//! `E` is structurally finite, in which case its elements are checked
//! directly.

use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::expr::SetExpr;
use crate::structural;
use crate::verdict::{Certificate, ProofState, Verdict};

/// Anything that answers three-valued membership queries over N.
pub trait Membership {
    fn member(&self, m: u64, budget: u64) -> Result<Verdict>;

    fn describe(&self) -> String;

    /// The underlying expression, when there is one, so structural rules can apply.
    fn as_expr(&self) -> Option<&SetExpr> {
        None
    }
}

impl Membership for SetExpr {
    fn member(&self, m: u64, budget: u64) -> Result<Verdict> {
        SetExpr::member(self, m, budget)
    }

    fn describe(&self) -> String {
        self.to_string()
    }

    fn as_expr(&self) -> Option<&SetExpr> {
        Some(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Enumeration {
    /// Proved members, ascending.
    pub members: Vec<u64>,
    pub bound: u64,
    /// False iff some value up to the bound stayed undecided.
    pub complete: bool,
    pub unknown: Vec<u64>,
}

impl SetExpr {
    pub fn member(&self, m: u64, budget: u64) -> Result<Verdict> {
        if m == 0 {
            return Err(Error::OutOfDomain(0));
        }
        if budget == 0 {
            return Err(Error::ZeroBudget);
        }
        eval(self, m, budget)
    }

    /// Members `<= bound`, requiring `bound <= budget`.
    pub fn enumerate_upto(&self, bound: u64, budget: u64) -> Result<Enumeration> {
        if bound > budget {
            return Err(Error::Precondition(format!(
                "enumeration bound {bound} exceeds budget {budget}"
            )));
        }
        enumerate_membership(self, bound, budget)
    }
}

pub fn enumerate_membership<S: Membership + ?Sized>(
    set: &S,
    bound: u64,
    budget: u64,
) -> Result<Enumeration> {
    let mut members = Vec::new();
    let mut unknown = Vec::new();
    for m in 1..=bound {
        match set.member(m, budget)?.state {
            ProofState::Proved => members.push(m),
            ProofState::Refuted => {}
            ProofState::UnknownAtBound => unknown.push(m),
        }
    }
    Ok(Enumeration {
        members,
        bound,
        complete: unknown.is_empty(),
        unknown,
    })
}

pub(crate) fn eval(e: &SetExpr, m: u64, budget: u64) -> Result<Verdict> {
    use SetExpr::*;
    Ok(match e {
        N => Verdict::proved(budget, None),
        Empty => Verdict::refuted(budget, None),
        P => Verdict::exact(arith::is_prime(m)?, budget),
        Lit(s) => Verdict::exact(s.contains(&m), budget),
        Mult(n) => Verdict::exact(m % n == 0, budget),
        Level(n) => Verdict::exact(arith::omega(m)? == *n, budget),
        PrimesIdx { r, m: modulus } => {
            if arith::is_prime(m)? {
                let i = arith::prime_index(m)?;
                let v = Verdict::exact((i + modulus - r % modulus) % modulus == 0, budget);
                v.with_certificate(Certificate::number(i))
            } else {
                Verdict::refuted(budget, None)
            }
        }
        Factorials => {
            let (mut f, mut k) = (1u64, 1u64);
            while f < m {
                k += 1;
                match f.checked_mul(k) {
                    Some(next) => f = next,
                    None => break,
                }
            }
            let v = Verdict::exact(f == m, budget);
            if f == m {
                v.with_certificate(Certificate::number(k))
            } else {
                v
            }
        }
        Pow(x, n) => match arith::exact_root(m, *n) {
            Some(root) => {
                let v = eval(x, root, budget)?;
                Verdict::new(v.state, budget, Some(Certificate::number(root)))
            }
            None => Verdict::refuted(budget, None),
        },
        ProdSet(args) => prodset_member(args, m, budget)?,
        Comp(x) => eval(x, m, budget)?.negate(),
        Union(a, b) => {
            let va = eval(a, m, budget)?;
            if va.is_proved() {
                return Ok(va);
            }
            let vb = eval(b, m, budget)?;
            match (va.state, vb.state) {
                (_, ProofState::Proved) => vb,
                (ProofState::Refuted, ProofState::Refuted) => Verdict::refuted(budget, None),
                _ => Verdict::unknown(budget, None),
            }
        }
        Inter(a, b) => {
            let va = eval(a, m, budget)?;
            if va.is_refuted() {
                return Ok(va);
            }
            let vb = eval(b, m, budget)?;
            match (va.state, vb.state) {
                (_, ProofState::Refuted) => vb,
                (ProofState::Proved, ProofState::Proved) => Verdict::proved(budget, None),
                _ => Verdict::unknown(budget, None),
            }
        }
        Up(x) => up_member(x, m, budget)?,
        Down(x) => down_member(x, m, budget)?,
        Quot(x, n) => {
            let mn = m
                .checked_mul(*n)
                .ok_or_else(|| Error::Overflow(format!("{m}·{n}")))?;
            eval(x, mn, budget)?
        }
        Scale(x, n) => {
            if m % n == 0 {
                eval(x, m / n, budget)?
            } else {
                Verdict::refuted(budget, None)
            }
        }
    })
}

fn up_member(x: &SetExpr, m: u64, budget: u64) -> Result<Verdict> {
    match x {
        SetExpr::Lit(s) => {
            return Ok(match s.iter().find(|&&a| m % a == 0) {
                Some(&a) => Verdict::proved(budget, Some(Certificate::number(a))),
                None => Verdict::refuted(budget, None),
            })
        }
        SetExpr::Mult(n) => return Ok(Verdict::exact(m % n == 0, budget)),
        _ => {}
    }
    let mut unknown = false;
    for d in arith::divisors(m)? {
        match eval(x, d, budget)?.state {
            ProofState::Proved => return Ok(Verdict::proved(budget, Some(Certificate::number(d)))),
            ProofState::UnknownAtBound => unknown = true,
            ProofState::Refuted => {}
        }
    }
    Ok(if unknown {
        Verdict::unknown(budget, None)
    } else {
        Verdict::refuted(budget, None)
    })
}

fn down_member(x: &SetExpr, m: u64, budget: u64) -> Result<Verdict> {
    if let Some(elements) = structural::finite_elements(x, budget)? {
        return Ok(match elements.iter().find(|&&a| a % m == 0) {
            Some(&a) => Verdict::proved(budget, Some(Certificate::number(a))),
            None => Verdict::refuted(budget, Some(Certificate::rule("finite host"))),
        });
    }
    let mut km = m;
    while km <= budget {
        if eval(x, km, budget)?.is_proved() {
            return Ok(Verdict::proved(budget, Some(Certificate::number(km))));
        }
        km += m;
    }
    Ok(Verdict::unknown(budget, None))
}

fn prodset_member(args: &[SetExpr], m: u64, budget: u64) -> Result<Verdict> {
    if args.len() == 1 {
        return eval(&args[0], m, budget);
    }
    if args.iter().all(structural::is_prime_set) {
        return prime_product_member(args, m, budget);
    }
    let divisors = arith::divisors(m)?;
    let mut chosen = Vec::with_capacity(args.len());
    let mut unknown = false;
    if product_search(args, m, &divisors, &mut chosen, budget, &mut unknown)? {
        return Ok(Verdict::proved(
            budget,
            Some(Certificate::Factors { values: chosen }),
        ));
    }
    Ok(if unknown {
        Verdict::unknown(budget, None)
    } else {
        Verdict::refuted(budget, None)
    })
}

fn product_search(
    args: &[SetExpr],
    rem: u64,
    divisors: &[u64],
    chosen: &mut Vec<u64>,
    budget: u64,
    unknown: &mut bool,
) -> Result<bool> {
    let (arg, rest) = args.split_first().expect("non-empty argument list");
    if rest.is_empty() {
        if chosen.contains(&rem) {
            return Ok(false);
        }
        return Ok(match eval(arg, rem, budget)?.state {
            ProofState::Proved => {
                chosen.push(rem);
                true
            }
            ProofState::UnknownAtBound => {
                *unknown = true;
                false
            }
            ProofState::Refuted => false,
        });
    }
    for &d in divisors {
        if d > rem {
            break;
        }
        if rem % d != 0 || chosen.contains(&d) {
            continue;
        }
        match eval(arg, d, budget)?.state {
            ProofState::Proved => {
                chosen.push(d);
                if product_search(rest, rem / d, divisors, chosen, budget, unknown)? {
                    return Ok(true);
                }
                chosen.pop();
            }
            ProofState::UnknownAtBound => *unknown = true,
            ProofState::Refuted => {}
        }
    }
    Ok(false)
}

/// Product of k prime-valued arguments: `m` must be a product of k distinct
/// primes, and the primes must be matched one-to-one onto the arguments.
fn prime_product_member(args: &[SetExpr], m: u64, budget: u64) -> Result<Verdict> {
    let f = arith::factorize(m)?;
    let k = args.len();
    if f.factors.len() != k || f.factors.iter().any(|&(_, e)| e != 1) {
        return Ok(Verdict::refuted(budget, None));
    }
    let primes: Vec<u64> = f.primes().collect();
    // edges[i][j]: state of primes[j] ∈ args[i]
    let mut edges = vec![vec![ProofState::Refuted; k]; k];
    for (i, arg) in args.iter().enumerate() {
        for (j, &p) in primes.iter().enumerate() {
            edges[i][j] = eval(arg, p, budget)?.state;
        }
    }
    if let Some(assign) = perfect_matching(&edges, |s| s == ProofState::Proved) {
        let values = assign.iter().map(|&j| primes[j]).collect();
        return Ok(Verdict::proved(
            budget,
            Some(Certificate::Factors { values }),
        ));
    }
    if perfect_matching(&edges, |s| s != ProofState::Refuted).is_some() {
        return Ok(Verdict::unknown(budget, None));
    }
    Ok(Verdict::refuted(budget, None))
}

/// Kuhn's augmenting-path matching; returns, for each row, its column.
fn perfect_matching(
    edges: &[Vec<ProofState>],
    usable: impl Fn(ProofState) -> bool + Copy,
) -> Option<Vec<usize>> {
    let k = edges.len();
    let mut col_owner: Vec<Option<usize>> = vec![None; k];

    fn augment(
        row: usize,
        edges: &[Vec<ProofState>],
        usable: impl Fn(ProofState) -> bool + Copy,
        seen: &mut [bool],
        col_owner: &mut [Option<usize>],
    ) -> bool {
        for col in 0..edges[row].len() {
            if !usable(edges[row][col]) || seen[col] {
                continue;
            }
            seen[col] = true;
            let free = match col_owner[col] {
                None => true,
                Some(other) => augment(other, edges, usable, seen, col_owner),
            };
            if free {
                col_owner[col] = Some(row);
                return true;
            }
        }
        false
    }

    for row in 0..k {
        let mut seen = vec![false; k];
        if !augment(row, edges, usable, &mut seen, &mut col_owner) {
            return None;
        }
    }
    let mut assign = vec![0; k];
    for (col, owner) in col_owner.iter().enumerate() {
        assign[owner.expect("perfect matching")] = col;
    }
    Some(assign)
}
