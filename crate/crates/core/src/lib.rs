//! Uniform deviation bounds for weakly interacting statistics.
//!
//! A [`Statistic`] maps a configuration `x in U^n` to a real number. Its
//! interaction seminorms (see [`seminorms`]) measure how much `f` moves when
//! one row changes and how much that change depends on another row. Small
//! seminorms together with a Gaussian average of a function class (see
//! [`complexity`]) give a bound on the uniform deviation of `f` from its
//! expectation over the class (see [`bounds`]).
//!
//! The [`oracle`] module checks the algebraic identities behind these bounds
//! numerically, and [`applications`] holds a robust K-means variant and a
//! certified ranker selection.

pub mod applications;
pub mod bounds;
pub mod class;
pub mod cli;
pub mod complexity;
pub mod domain;
pub mod error;
pub mod oracle;
pub mod rng;
pub mod seminorms;
pub mod statistics;

pub use class::{FunctionClass, RawSampler};
pub use domain::{Configuration, Domain, FnStatistic, Statistic};
pub use error::{Error, Result};
pub use rng::SeededRng;
pub use seminorms::{SeminormMethod, SeminormReport};
