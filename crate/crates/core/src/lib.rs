pub mod arith;
pub mod bounds;
pub mod dd;
pub mod delta;
pub mod error;
pub mod forms;
pub mod jet;
pub mod quadrature;
pub mod special_fn;
pub mod sums;
pub mod windows;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/intro.md")]
pub mod book_intro {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/kernels.md")]
pub mod book_kernels {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/delta.md")]
pub mod book_delta {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/arith.md")]
pub mod book_arith {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/forms.md")]
pub mod book_forms {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/sums.md")]
pub mod book_sums {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/certify.md")]
pub mod book_certify {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub mod book_cli {}
