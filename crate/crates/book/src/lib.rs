// mdbook cannot run listings that depend on workspace crates, so every
// chapter is pulled in here as a module doc and `cargo test --doc` runs the
// listings. One module per chapter keeps failures traceable to a file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/materials.md")]
pub mod materials {}
#[doc = include_str!("../../../book/src/geometry.md")]
pub mod geometry {}
#[doc = include_str!("../../../book/src/rotation.md")]
pub mod rotation {}
#[doc = include_str!("../../../book/src/homogenization.md")]
pub mod homogenization {}
#[doc = include_str!("../../../book/src/shearography.md")]
pub mod shearography {}
#[doc = include_str!("../../../book/src/fringe-projection.md")]
pub mod fringe_projection {}
#[doc = include_str!("../../../book/src/comparisons.md")]
pub mod comparisons {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/file-formats.md")]
pub mod file_formats {}
