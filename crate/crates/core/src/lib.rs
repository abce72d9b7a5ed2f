//! Price indices for dynamic item universes.
//!
//! Items appear and disappear between periods. This crate computes the GK,
//! MGK, GUV, WGM (Törnqvist, TPD), GEKS, RQ and RQP index families over such
//! data and checks them against a set of axiomatic tests for dynamic
//! universes: identity, fixed basket, upper and lower bounds, and
//! responsiveness to births and deaths.
//!
//! ```
//! use dynindex::{model::{ComparisonSpec, Dataset}, indices::mgk_index};
//!
//! let data = Dataset::builder()
//!     .observe(0, "A", 1.0, 1.0)
//!     .observe(0, "B", 1.0, 1.0)
//!     .observe(1, "A", 2.0, 1.0)
//!     .observe(1, "B", 1.0, 1.0)
//!     .build()
//!     .unwrap();
//! let mgk = mgk_index(&data, &ComparisonSpec::bilateral(0, 1)).unwrap();
//! assert!((mgk.value - 1.5).abs() < 1e-12);
//! ```

pub mod error;
pub mod frame;
pub mod harness;
pub mod indices;
pub mod io;
pub mod model;
pub mod reference;

pub use error::{IndexError, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/data-model.md")]
    mod data_model {}
    #[doc = include_str!("../../../book/src/reference-prices.md")]
    mod reference_prices {}
    #[doc = include_str!("../../../book/src/index-families.md")]
    mod index_families {}
    #[doc = include_str!("../../../book/src/axiomatic-tests.md")]
    mod axiomatic_tests {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
