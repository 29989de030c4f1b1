//! Code listings of the guide, compiled and run as doctests.

#[doc = include_str!("../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../book/src/graphons.md")]
pub mod graphons {}

#[doc = include_str!("../../book/src/edge_cone.md")]
pub mod edge_cone {}

#[doc = include_str!("../../book/src/sampling.md")]
pub mod sampling {}

#[doc = include_str!("../../book/src/cycle_covers.md")]
pub mod cycle_covers {}

#[doc = include_str!("../../book/src/experiments.md")]
pub mod experiments {}
