//! Expression corpora: the shipped default list plus seeded random extras.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::SetExpr;
use crate::filter::{make_filter, FilterPresentation, FilterSpec};

pub const DEFAULT_CORPUS: &str = include_str!("../data/default_corpus.txt");

/// Points of the principal filters that join the corpus filters.
pub const PRINCIPAL_POINTS: [u64; 8] = [1, 2, 3, 4, 6, 8, 12, 30];

/// One expression per line; blank lines and `#` comments are skipped.
pub fn parse_corpus(text: &str) -> Result<Vec<SetExpr>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let e = SetExpr::parse(line).map_err(|e| Error::Corpus {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(e);
    }
    Ok(out)
}

pub fn default_corpus() -> Vec<SetExpr> {
    parse_corpus(DEFAULT_CORPUS).expect("shipped corpus parses")
}

fn random_atom(rng: &mut ChaCha8Rng) -> SetExpr {
    match rng.gen_range(0..6) {
        0 => SetExpr::Mult(rng.gen_range(2..=30)),
        1 => SetExpr::Level(rng.gen_range(1..=3)),
        2 => {
            let m = rng.gen_range(1..=4);
            SetExpr::primes_idx(rng.gen_range(1..=m), m)
        }
        3 => SetExpr::lit((0..rng.gen_range(1..=4)).map(|_| rng.gen_range(1..=60))),
        4 => SetExpr::P,
        _ => SetExpr::up(SetExpr::lit(
            (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(2..=40)),
        )),
    }
}

/// `base` followed by `extra` random expressions built from corpus members
/// and small atoms. Deterministic in `seed`.
pub fn augment(base: &[SetExpr], seed: u64, extra: usize) -> Vec<SetExpr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = base.to_vec();
    for _ in 0..extra {
        let left = base
            .choose(&mut rng)
            .cloned()
            .unwrap_or_else(|| random_atom(&mut rng));
        let right = random_atom(&mut rng);
        let e = match rng.gen_range(0..6) {
            0 => SetExpr::union(left, right),
            1 => SetExpr::inter(left, right),
            2 => SetExpr::up(left),
            3 => SetExpr::scale(left, rng.gen_range(2..=12)),
            4 => SetExpr::quot(left, rng.gen_range(2..=12)),
            _ => SetExpr::comp(right),
        };
        out.push(e);
    }
    out
}

/// Principal filters at [`PRINCIPAL_POINTS`] plus the filter generated by
/// each corpus expression whose nonemptiness is settled within `budget`.
pub fn corpus_filters(corpus: &[SetExpr], budget: u64) -> Result<Vec<FilterPresentation>> {
    let mut out: Vec<FilterPresentation> = PRINCIPAL_POINTS
        .iter()
        .map(|&n| FilterPresentation::principal(n))
        .collect::<Result<_>>()?;
    for e in corpus {
        match make_filter(&FilterSpec::Generated(vec![e.clone()]), budget, false) {
            Ok(f) => out.push(f),
            Err(Error::FipRefuted { .. } | Error::FipUnknown { .. }) => {}
            Err(err) => return Err(err),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_corpus_covers_every_constructor() {
        let corpus = default_corpus();
        assert!(corpus.len() >= 40);
        let rendered: Vec<String> = corpus.iter().map(|e| e.to_string()).collect();
        let all = rendered.join(" ");
        for word in [
            "N",
            "P",
            "empty",
            "factorials",
            "{",
            "mult(",
            "level(",
            "primesIdx(",
            "pow(",
            "prodset(",
            "comp(",
            "union(",
            "inter(",
            "up(",
            "down(",
            "quot(",
            "scale(",
        ] {
            assert!(all.contains(word), "missing {word}");
        }
    }

    #[test]
    fn corpus_errors_carry_line_numbers() {
        let err = parse_corpus("# c\nmult(2)\n\nup(\n").unwrap_err();
        assert!(matches!(err, Error::Corpus { line: 4, .. }));
    }

    #[test]
    fn augmentation_is_deterministic() {
        let base = default_corpus();
        let a = augment(&base, 7, 20);
        assert_eq!(a, augment(&base, 7, 20));
        assert_ne!(a, augment(&base, 8, 20));
        assert_eq!(a.len(), base.len() + 20);
        for e in &a {
            e.validate().unwrap();
        }
    }

    #[test]
    fn filters_skip_empty_cores() {
        let fs = corpus_filters(&default_corpus(), 1000).unwrap();
        assert!(fs.iter().all(|f| f.core() != &SetExpr::Empty));
        assert!(fs.len() > PRINCIPAL_POINTS.len() + 30);
    }
}
