//! Cleansing, aggregation, consistency analysis and evaluation for
//! crowd-labeled argument quality data.
//!
//! The pipeline runs in this order:
//!
//! 1. [`ingest`] loads arguments, motions, pairs and raw judgments into a
//!    referentially consistent [`Corpus`].
//! 2. [`cleanse`] filters unreliable annotators (test questions, 'yes'
//!    prior, Annotator-kappa from [`agreement`]) and under-supported items.
//! 3. [`aggregate`] turns valid judgments into scored arguments and labeled
//!    pairs, and samples new candidate pairs.
//! 4. [`consistency`] checks the labels against each other.
//! 5. [`eval`] scores external predictions in leave-one-motion-out folds
//!    using the [`stats`] kernel.
//!
//! [`simulate`] produces synthetic campaigns with known answers for testing
//! all of the above.

pub mod aggregate;
pub mod agreement;
pub mod cleanse;
pub mod consistency;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod model;
pub mod simulate;
pub mod stats;

pub use corpus::Corpus;
pub use error::{Error, Result};
