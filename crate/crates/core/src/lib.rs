//! Exact computation and cross-validation of the descent-number distribution
//! on involutions and fixed-point-free involutions.
//!
//! Every quantity is computed by at least two independent routes:
//!
//! - [`recurrences`]: bottom-up linear recurrences with checked exact division,
//! - [`closed_forms`]: explicit binomial sums,
//! - [`oracle`]: brute-force enumeration of the involutions themselves,
//!
//! and [`polyseq`] supplies the row types together with the structural
//! predicates (symmetry, unimodality, log-concavity) and the gamma expansion.
//! [`conjectures`] ties everything together into scans and verification
//! reports, and [`tables`] holds the published reference tables.

pub mod closed_forms;
pub mod conjectures;
pub mod error;
pub mod oracle;
pub mod polyseq;
pub mod recurrences;
pub mod report;
pub mod tables;

pub use error::{Error, Result};
pub use polyseq::{BigCoeff, DescentRow, Family, GammaFamily, GammaRow};
pub use recurrences::{a_row, b_row, i_row, j_row, TriangleCache, TriangleKind};
pub use report::{Mismatch, VerificationReport};
