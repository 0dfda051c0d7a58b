//! The chapters of the guide in `book/`, compiled so that their snippets
//! run as doctests.

#![doc = include_str!("../../../book/src/introduction.md")]

#[doc = include_str!("../../../book/src/alf.md")]
pub mod alf {}

#[doc = include_str!("../../../book/src/stability.md")]
pub mod stability {}

#[doc = include_str!("../../../book/src/kepler.md")]
pub mod kepler {}

#[doc = include_str!("../../../book/src/step-control.md")]
pub mod step_control {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
