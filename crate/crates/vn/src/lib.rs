//! Tree-pair arithmetic in the Higman-Thompson groups V_n, revealing pairs,
//! flow graphs, centralizer descriptors and distortion of cyclic subgroups.

pub mod address;
pub mod centralizer;
pub mod distortion;
pub mod element;
pub mod flowgraph;
pub mod par;
pub mod point;
pub mod revealing;
pub mod samples;

pub use address::Address;
pub use element::{parse_element, serialize_element, Element};
pub use point::Point;
pub use revealing::{make_revealing, Order, RevealingPair};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("arity mismatch: {0} vs {1}")]
    Arity(usize, usize),
    #[error("iteration limit exceeded: {0}")]
    Guard(String),
    #[error("elements do not commute")]
    NotCommuting,
    #[error("support is not invariant: {0}")]
    NotInvariant(String),
}
