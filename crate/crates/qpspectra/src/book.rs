//! Doc-test anchors for the guide under `book/`: every chapter is included
//! as module documentation, so `cargo test --doc` compiles and runs the
//! book's code snippets and the guide cannot drift from the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/spaces.md")]
pub mod spaces {}

#[doc = include_str!("../../../book/src/symbols.md")]
pub mod symbols {}

#[doc = include_str!("../../../book/src/operators.md")]
pub mod operators {}

#[doc = include_str!("../../../book/src/series.md")]
pub mod series {}

#[doc = include_str!("../../../book/src/spectra.md")]
pub mod spectra {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
