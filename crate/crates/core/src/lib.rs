//! Decide encodability criteria between finite reduction systems, compute
//! greatest simulation-style relations, and build the witness relations that
//! characterize each criterion over the combined source-plus-target domain.

pub mod cli;
pub mod criteria;
pub mod document;
pub mod error;
pub mod harness;
pub mod model;
pub mod predicate;
pub mod rel;
pub mod relations;
pub mod verdict;
pub mod witness;
