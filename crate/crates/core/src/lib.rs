//! Numerical toolkit for continuous-time quantum coding.

// Checks are written as `!(x >= 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod bounds;
pub mod channels;
pub mod contcode;
pub mod decoupling;
pub mod entropy;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lindblad;
pub mod pauli;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, PureState, C64};
pub use rng::Rng;

// The guide's snippets run as doctests, one module per chapter.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/lindblad.md")]
    mod lindblad {}
    #[doc = include_str!("../../../book/src/entropy.md")]
    mod entropy {}
    #[doc = include_str!("../../../book/src/capacity_bounds.md")]
    mod capacity_bounds {}
    #[doc = include_str!("../../../book/src/continuous_coding.md")]
    mod continuous_coding {}
    #[doc = include_str!("../../../book/src/decoupling.md")]
    mod decoupling {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
