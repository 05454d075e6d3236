// mdbook cannot run the listings of a book against a library crate, so every
// chapter is pulled into this crate as a module doc comment and `cargo test
// --doc` runs the listings instead. One module per chapter keeps a failing
// listing traceable to its chapter.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/duffing.md")]
pub mod duffing {}
#[doc = include_str!("src/floquet.md")]
pub mod floquet {}
#[doc = include_str!("src/criteria.md")]
pub mod criteria {}
#[doc = include_str!("src/tongues.md")]
pub mod tongues {}
#[doc = include_str!("src/beam.md")]
pub mod beam {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
#[doc = include_str!("src/charts.md")]
pub mod charts {}
