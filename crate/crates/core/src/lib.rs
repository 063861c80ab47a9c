//! Monoids with zero presented by collision tables, and the subshifts they
//! generate.
//!
//! A presentation consists of two disjoint generator alphabets `L` and `R`
//! together with a total table `T : L x R -> {0, 1} u L u R`. The relations
//! `l r = T(l, r)` form a finite, confluent, length-reducing string-rewriting
//! system, so every word over `L u R` has a unique normal form: either the
//! absorbing zero or a product of an `R*` word followed by an `L*` word.
//!
//! On top of the rewriting engine the crate provides
//!
//! * decision procedures for the structural hypotheses that make the monoid
//!   the syntactic monoid of a topologically transitive subshift with
//!   property (A) — annihilability, one-sided inverses, triviality of
//!   `M+ ∩ M-`, and context injectivity ([`structure`]),
//! * the subshift of admissible words itself: language counting, bounded
//!   follower/predecessor sets, window checks, periodic points, and the
//!   bounded property (A) verifier ([`subshift`]),
//! * reconstruction of the monoid from bounded block contexts together with
//!   an isomorphism certificate ([`reconstruction`]).

pub(crate) mod contexts;
pub mod error;
pub mod machine;
pub mod presentation;
pub mod reconstruction;
pub mod rewrite;
pub mod structure;
pub mod subshift;

pub use error::Error;
pub use presentation::{Gen, Outcome, Presentation, Side, ValidationReport};
pub use rewrite::{NormalForm, Word};
