//! Brute-force reference semantics for set expressions.
//!
//! Each node is evaluated to a characteristic vector over `1..=limit`, using
//! only trial division and direct reading of each constructor's definition.
//! `None` marks values the bounded search for `down` could not settle.

use std::collections::BTreeSet;

use betadiv::SetExpr;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn omega(mut n: u64) -> u32 {
    let mut count = 0;
    let mut d = 2;
    while d * d <= n {
        while n % d == 0 {
            n /= d;
            count += 1;
        }
        d += 1;
    }
    if n > 1 {
        count += 1;
    }
    count
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Primes `<= limit` by trial division.
pub fn primes_upto(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&n| is_prime(n)).collect()
}

pub struct Oracle {
    /// Search bound for `down`: a multiple must appear at or below it.
    pub down_budget: u64,
}

type Vector = Vec<Option<bool>>;

fn and(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn or(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

impl Oracle {
    pub fn new(down_budget: u64) -> Self {
        Oracle { down_budget }
    }

    /// `v[m]` for `m` in `1..=limit`; `v[0]` is unused.
    pub fn eval(&self, e: &SetExpr, limit: u64) -> Vector {
        let l = limit as usize;
        let from_fn = |f: &dyn Fn(u64) -> bool| -> Vector {
            let mut v = vec![Some(false); l + 1];
            for m in 1..=limit {
                v[m as usize] = Some(f(m));
            }
            v
        };
        match e {
            SetExpr::N => from_fn(&|_| true),
            SetExpr::Empty => from_fn(&|_| false),
            SetExpr::P => from_fn(&is_prime),
            SetExpr::Lit(s) => from_fn(&|m| s.contains(&m)),
            SetExpr::Mult(n) => from_fn(&|m| m % n == 0),
            SetExpr::Level(n) => from_fn(&|m| omega(m) == *n),
            SetExpr::PrimesIdx { r, m: modulus } => {
                let mut v = vec![Some(false); l + 1];
                let mut index = 0u64;
                for m in 2..=limit {
                    if is_prime(m) {
                        index += 1;
                        v[m as usize] = Some(index % modulus == r % modulus);
                    }
                }
                v
            }
            SetExpr::Factorials => {
                let mut facts = BTreeSet::new();
                let (mut f, mut n) = (1u64, 1u64);
                while f <= limit {
                    facts.insert(f);
                    n += 1;
                    f *= n;
                }
                from_fn(&|m| facts.contains(&m))
            }
            SetExpr::Pow(x, n) => {
                let mut root_limit = 1u64;
                while (root_limit + 1).checked_pow(*n).is_some_and(|p| p <= limit) {
                    root_limit += 1;
                }
                let xv = self.eval(x, root_limit);
                let mut v = vec![Some(false); l + 1];
                for r in 1..=root_limit {
                    v[r.pow(*n) as usize] = xv[r as usize];
                }
                v
            }
            SetExpr::ProdSet(args) => {
                let vs: Vec<Vector> = args.iter().map(|a| self.eval(a, limit)).collect();
                let mut sure = vec![false; l + 1];
                let mut maybe = vec![false; l + 1];
                let mut picked = Vec::new();
                products(&vs, limit, 1, &mut picked, true, &mut sure, &mut maybe);
                (0..=l)
                    .map(|i| {
                        if sure[i] {
                            Some(true)
                        } else if maybe[i] {
                            None
                        } else {
                            Some(false)
                        }
                    })
                    .collect()
            }
            SetExpr::Comp(x) => self
                .eval(x, limit)
                .into_iter()
                .map(|b| b.map(|t| !t))
                .collect(),
            SetExpr::Union(a, b) => {
                let (va, vb) = (self.eval(a, limit), self.eval(b, limit));
                va.into_iter().zip(vb).map(|(x, y)| or(x, y)).collect()
            }
            SetExpr::Inter(a, b) => {
                let (va, vb) = (self.eval(a, limit), self.eval(b, limit));
                va.into_iter().zip(vb).map(|(x, y)| and(x, y)).collect()
            }
            SetExpr::Up(x) => {
                let xv = self.eval(x, limit);
                let mut v = vec![Some(false); l + 1];
                for d in 1..=l {
                    if xv[d] == Some(false) {
                        continue;
                    }
                    let mut m = d;
                    while m <= l {
                        v[m] = or(v[m], xv[d]);
                        m += d;
                    }
                }
                v
            }
            SetExpr::Down(x) => {
                if let SetExpr::Lit(s) = &**x {
                    return from_fn(&|m| s.iter().any(|a| a % m == 0));
                }
                let b = self.down_budget.max(limit);
                let xv = self.eval(x, b);
                let mut v = vec![None; l + 1];
                for m in 1..=l {
                    let mut k = m;
                    while k as u64 <= self.down_budget {
                        if xv[k] == Some(true) {
                            v[m] = Some(true);
                            break;
                        }
                        k += m;
                    }
                }
                v
            }
            SetExpr::Quot(x, n) => {
                let xv = self.eval(x, limit * n);
                (0..=l)
                    .map(|m| if m == 0 { None } else { xv[m * *n as usize] })
                    .collect()
            }
            SetExpr::Scale(x, n) => {
                let xv = self.eval(x, limit / n);
                (0..=limit)
                    .map(|m| {
                        if m == 0 {
                            None
                        } else if m % n == 0 {
                            xv[(m / n) as usize]
                        } else {
                            Some(false)
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Marks every product `x₁⋯x_k <= limit` of pairwise distinct picks.
fn products(
    vs: &[Vector],
    limit: u64,
    acc: u64,
    picked: &mut Vec<u64>,
    certain: bool,
    sure: &mut [bool],
    maybe: &mut [bool],
) {
    let Some((first, rest)) = vs.split_first() else {
        if certain {
            sure[acc as usize] = true;
        } else {
            maybe[acc as usize] = true;
        }
        return;
    };
    for x in 1..=limit / acc {
        let state = first[x as usize];
        if state == Some(false) || picked.contains(&x) {
            continue;
        }
        picked.push(x);
        products(
            rest,
            limit,
            acc * x,
            picked,
            certain && state == Some(true),
            sure,
            maybe,
        );
        picked.pop();
    }
}
