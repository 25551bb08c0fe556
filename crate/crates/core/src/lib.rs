//! Divisibility on N lifted to sets and finitely presented filters.
//!
//! The crate evaluates symbolic subsets of N ([`SetExpr`]) with exact or
//! budget-bounded three-valued membership ([`Verdict`]), searches for
//! pairwise-coprime antichains and their covering duals, decides divisibility
//! and products of finitely generated filters, and builds finite chains of
//! filters from almost disjoint families of primes.

pub mod antichain;
pub mod arith;
pub mod chain;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod expr;
pub mod filter;
pub mod structural;
pub mod verdict;

pub use antichain::{AntichainCertificate, AntichainMode, CoveringCertificate};
pub use chain::{ChainReport, ChainSpec, Scheme};
pub use error::{Error, Result};
pub use eval::{Enumeration, Membership};
pub use expr::SetExpr;
pub use filter::{FilterPresentation, FilterSpec};
pub use verdict::{Certificate, ProofState, Verdict};
