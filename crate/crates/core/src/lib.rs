//! Exact-rational machinery for LP and SDP formulation complexity.

pub mod catalog;
pub mod error;
pub mod factor;
pub mod gadgets;
pub mod lp;
pub mod matrix;
pub mod problem;
pub mod psd;
pub mod rational;
pub mod reduce;
pub mod rounding;
pub mod slack;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use problem::{Guarantees, InstanceId, Problem, ProblemSpec, Sense, SolutionId};
pub use rational::Rational;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/problems.md")]
    mod problems {}
    #[doc = include_str!("../../../book/src/slack.md")]
    mod slack {}
    #[doc = include_str!("../../../book/src/factorizations.md")]
    mod factorizations {}
    #[doc = include_str!("../../../book/src/rank.md")]
    mod rank {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/gadgets.md")]
    mod gadgets {}
    #[doc = include_str!("../../../book/src/rounding.md")]
    mod rounding {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
