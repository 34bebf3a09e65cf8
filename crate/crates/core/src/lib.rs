//! Family-based quantitative analysis of featured weighted automata.
//!
//! A featured automaton carries, on each transition, one weight per product
//! of a software product line. Instead of analyzing every product on its
//! own, the values here are computed once over the featured lift `GP(K)` of
//! a Kleene algebra `K`: guard-partition-indexed tables whose projection to
//! any product is that product's value.

pub mod automata;
pub mod energy;
pub mod features;
pub mod fwalgo;
pub mod gplift;
pub mod kleene;
pub mod matrix;
pub mod number;
pub mod random;
