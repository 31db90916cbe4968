//! The guide in `book/`, compiled so that its code listings run as doctests.

#![doc = include_str!("../../../book/src/introduction.md")]

#[doc = include_str!("../../../book/src/scenarios.md")]
pub mod scenarios {}

#[doc = include_str!("../../../book/src/complexes.md")]
pub mod complexes {}

#[doc = include_str!("../../../book/src/zigzag.md")]
pub mod zigzag {}

#[doc = include_str!("../../../book/src/stacked.md")]
pub mod stacked {}

#[doc = include_str!("../../../book/src/rotation.md")]
pub mod rotation {}

#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}

#[doc = include_str!("../../../book/src/reports.md")]
pub mod reports {}
