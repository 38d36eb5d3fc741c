//! Doctest shim: each chapter of the book is attached here as module
//! documentation, so `cargo test` compiles and runs every Rust snippet the
//! book shows. mdBook itself cannot execute examples against external
//! crates; routing the Markdown through rustdoc keeps the guide honest.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/floor-plans.md")]
pub mod floor_plans {}

#[doc = include_str!("../../../book/src/ray-tracing.md")]
pub mod ray_tracing {}

#[doc = include_str!("../../../book/src/localization.md")]
pub mod localization {}

#[doc = include_str!("../../../book/src/accuracy.md")]
pub mod accuracy {}

#[doc = include_str!("../../../book/src/reporting.md")]
pub mod reporting {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
