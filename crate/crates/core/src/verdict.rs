//! Three-valued proof state carrying a certificate and the budget it was
//! decided (or abandoned) at.
//!
//! `Proved` and `Refuted` are final: every procedure that produces them does
//! so from an exact computation or a checked witness, so a larger budget can
//! only turn `UnknownAtBound` into a decided state, never flip a decided one.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofState {
    Proved,
    Refuted,
    UnknownAtBound,
}

impl ProofState {
    /// Exit-code convention shared by the command line: 0 / 1 / 2.
    pub fn exit_code(self) -> i32 {
        match self {
            ProofState::Proved => 0,
            ProofState::Refuted => 1,
            ProofState::UnknownAtBound => 2,
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            ProofState::Proved
        } else {
            ProofState::Refuted
        }
    }

    pub fn decided(self) -> Option<bool> {
        match self {
            ProofState::Proved => Some(true),
            ProofState::Refuted => Some(false),
            ProofState::UnknownAtBound => None,
        }
    }
}

impl fmt::Display for ProofState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProofState::Proved => "proved",
            ProofState::Refuted => "refuted",
            ProofState::UnknownAtBound => "unknown_at_bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// A single witness number (a divisor, a multiple, a member, ...).
    Number {
        value: u64,
    },
    /// A pair such as `(m, km)` for a failure of upward closure.
    Pair {
        first: u64,
        second: u64,
    },
    /// Ordered factors matched one per argument of a product set.
    Factors {
        values: Vec<u64>,
    },
    /// `a | c | b` with `a != c != b`.
    Triple {
        a: u64,
        c: u64,
        b: u64,
    },
    Set {
        values: Vec<u64>,
    },
    /// Name of the structural rule that decided the question.
    Rule {
        name: String,
    },
    /// Members found before the search stopped.
    Count {
        found: u64,
    },
}

impl Certificate {
    pub fn rule(name: impl Into<String>) -> Self {
        Certificate::Rule { name: name.into() }
    }

    pub fn number(value: u64) -> Self {
        Certificate::Number { value }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Number { value } => write!(f, "{value}"),
            Certificate::Pair { first, second } => write!(f, "({first}, {second})"),
            Certificate::Factors { values } => {
                let parts: Vec<String> = values.iter().map(u64::to_string).collect();
                write!(f, "{}", parts.join("·"))
            }
            Certificate::Triple { a, c, b } => write!(f, "{a} | {c} | {b}"),
            Certificate::Set { values } => write!(f, "{values:?}"),
            Certificate::Rule { name } => write!(f, "rule: {name}"),
            Certificate::Count { found } => write!(f, "{found} found"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub state: ProofState,
    pub budget: u64,
    pub certificate: Option<Certificate>,
}

impl Verdict {
    pub fn new(state: ProofState, budget: u64, certificate: Option<Certificate>) -> Self {
        Verdict {
            state,
            budget,
            certificate,
        }
    }

    pub fn proved(budget: u64, certificate: Option<Certificate>) -> Self {
        Self::new(ProofState::Proved, budget, certificate)
    }

    pub fn refuted(budget: u64, certificate: Option<Certificate>) -> Self {
        Self::new(ProofState::Refuted, budget, certificate)
    }

    pub fn unknown(budget: u64, certificate: Option<Certificate>) -> Self {
        Self::new(ProofState::UnknownAtBound, budget, certificate)
    }

    pub fn exact(holds: bool, budget: u64) -> Self {
        Self::new(ProofState::from_bool(holds), budget, None)
    }

    pub fn with_certificate(mut self, certificate: Certificate) -> Self {
        self.certificate = Some(certificate);
        self
    }

    pub fn is_proved(&self) -> bool {
        self.state == ProofState::Proved
    }

    pub fn is_refuted(&self) -> bool {
        self.state == ProofState::Refuted
    }

    pub fn is_unknown(&self) -> bool {
        self.state == ProofState::UnknownAtBound
    }

    /// Kleene negation. Certificates are kept: a witness for membership is a
    /// witness against membership in the complement.
    pub fn negate(self) -> Self {
        let state = match self.state {
            ProofState::Proved => ProofState::Refuted,
            ProofState::Refuted => ProofState::Proved,
            ProofState::UnknownAtBound => ProofState::UnknownAtBound,
        };
        Verdict { state, ..self }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (budget {})", self.state, self.budget)?;
        if let Some(c) = &self.certificate {
            write!(f, " [{c}]")?;
        }
        Ok(())
    }
}
