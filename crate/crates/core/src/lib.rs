pub mod approx;
pub mod closed_forms;
pub mod error;
pub mod io;
pub mod lab;
pub mod linalg;
pub mod optimizer;
pub mod quadrature;
pub mod roots;
pub mod search;
pub mod special;
pub mod stitching;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/gaussian-bound.md")]
    mod gaussian_bound {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/closed-forms.md")]
    mod closed_forms {}
    #[doc = include_str!("../../../book/src/matrix-lab.md")]
    mod matrix_lab {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
