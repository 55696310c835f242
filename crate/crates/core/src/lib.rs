//! Disclosure audits for tables with suppressed cells.
//!
//! A table with row and column totals and bounded cells is turned into a
//! bipartite mixed graph; whether withheld cells can be recovered, alone or
//! in combination, becomes a question of connectivity in that graph. See the
//! guide under `book/` for a walk through every module.

pub mod augment;
pub mod basic_sets;
pub mod connectivity;
pub mod flow;
pub mod gadgets;
pub mod graph;
pub(crate) mod linalg;
pub mod oracle;
pub mod rational;
pub mod security;
pub mod table;

// The guide's snippets run as doc-tests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/tables-and-graphs.md")]
    pub mod tables_and_graphs {}
    #[doc = include_str!("../../../book/src/protection-levels.md")]
    pub mod protection_levels {}
    #[doc = include_str!("../../../book/src/invariants.md")]
    pub mod invariants {}
    #[doc = include_str!("../../../book/src/planning.md")]
    pub mod planning {}
    #[doc = include_str!("../../../book/src/hard-instances.md")]
    pub mod hard_instances {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    pub mod command_line {}
}
