//! The narrative guide, mirrored from the `book/` directory.
//!
//! Each chapter of the mdbook is included verbatim as the documentation of a
//! module below, so every ```rust snippet in the book runs under
//! `cargo test --doc` and can never drift out of sync with the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}

#[doc = include_str!("../../../book/src/chains.md")]
pub mod chains {}

#[doc = include_str!("../../../book/src/pools.md")]
pub mod pools {}

#[doc = include_str!("../../../book/src/counting.md")]
pub mod counting {}

#[doc = include_str!("../../../book/src/bounds.md")]
pub mod bounds {}

#[doc = include_str!("../../../book/src/rates.md")]
pub mod rates {}

#[doc = include_str!("../../../book/src/expurgation.md")]
pub mod expurgation {}

#[doc = include_str!("../../../book/src/concatenation.md")]
pub mod concatenation {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
