//! Recursive path orders, term rewriting, and executable renditions of
//! abstract termination principles over finite carriers.
//!
//! The crate is organised bottom-up:
//!
//! * [`term`] and [`syntax`]: first-order terms, signatures, substitutions,
//!   contexts, concrete syntax and the TRS file format.
//! * [`relations`]: decidable relations, the multiset and lexicographic
//!   liftings, and well-foundedness on finite carriers.
//! * [`rpo`]: the recursive path order with per-symbol liftings, its
//!   decomposition, certificates, and precedence search.
//! * [`rewriting`]: rewrite steps, normalisation with loop detection, and
//!   the empirical link between orientation and termination.
//! * [`sequence`]: lazily evaluated infinite sequences.
//! * [`lab`]: finite-carrier checkers for the sequence-based termination
//!   principles and their proof constructions.
//! * [`openrec`]: an interpreter for open recursion over lazy sequences.

pub mod lab;
pub mod openrec;
pub mod relations;
pub mod rewriting;
pub mod rpo;
pub mod sequence;
pub mod syntax;
pub mod term;

pub use relations::{FiniteRelation, Lifting, RelationSpec};
pub use rewriting::{Normalization, Trs};
pub use rpo::{Certificate, PrecedenceStatus, RpoInstance};
pub use sequence::{Lasso, LazySequence};
pub use term::{Context, Position, Signature, Substitution, SymbolId, Term, TermError};
