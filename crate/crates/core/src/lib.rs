//! Finite digraphs, their connectivity equivalences, and the algebraic
//! machinery (polymorphism search, subuniverse closure, free algebras,
//! identity-system checks) needed to analyze compatible digraphs over
//! finitely generated varieties.
//!
//! The central objects are [`Digraph`], [`Partition`], [`FiniteAlgebra`]
//! and [`TermTable`]. Everything is immutable after construction, and all
//! searches are deterministic: solutions come out in lexicographic order
//! of the underlying image arrays or operation tables.

#![forbid(unsafe_code)]

pub mod algebra;
pub mod conditions;
pub mod connectivity;
pub mod digraph;
mod error;
pub mod partition;
pub mod polymorph;
mod search;
pub mod suite;

pub use algebra::{FiniteAlgebra, FreeAlgebraResult, FreelyGenerated, Operation, TermTable};
pub use conditions::{CollapseReport, Endpoint, IdentityWitness};
pub use connectivity::{ChainReport, EquivalenceKind, PathMode, RadicalTrace};
pub use digraph::{Digraph, VertexMap};
pub use error::{Error, Result};
pub use partition::Partition;
pub use polymorph::{MajorFamily, PolymorphismQuery};
pub use search::{Enumeration, StopReason};

/// Resource limits for the enumeration and closure operations.
///
/// Every search fails loudly when a limit is hit; nothing is truncated
/// silently.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    /// Node expansions allowed in backtracking searches.
    pub expansions: u64,
    /// Maximum number of elements a free-algebra closure may discover.
    pub free_elements: usize,
    /// Maximum number of tables a term-operation closure may discover.
    pub term_tables: usize,
    /// Largest vertex count accepted by the partition-enumeration oracle.
    pub oracle_cap: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            expansions: 10_000_000,
            free_elements: 50_000,
            term_tables: 200_000,
            oracle_cap: 8,
        }
    }
}

impl Budget {
    /// Same limits as the default, with a different expansion budget.
    pub fn with_expansions(expansions: u64) -> Self {
        Budget {
            expansions,
            ..Budget::default()
        }
    }
}
