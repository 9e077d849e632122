//! The guide in book/ has no way to link against this workspace, so its
//! chapters are pulled in here and `cargo test` runs their listings.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}
#[doc = include_str!("../../../book/src/open-book.md")]
pub mod open_book {}
#[doc = include_str!("../../../book/src/multiplicities.md")]
pub mod multiplicities {}
#[doc = include_str!("../../../book/src/solver.md")]
pub mod solver {}
#[doc = include_str!("../../../book/src/lantern.md")]
pub mod lantern {}
#[doc = include_str!("../../../book/src/verify.md")]
pub mod verify {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
