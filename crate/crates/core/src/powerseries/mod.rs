//! Truncated multivariate formal power series over Q(i).
//!
//! Invariants:
//! - a [`Series`] stores only nonzero coefficients of degree `<= order`;
//! - binary operations return the smaller of the two orders;
//! - differentiation by `nu` lowers the order by `|nu|`;
//! - composition requires the inner map to fix the origin.

pub mod ideal;
pub mod linalg;
pub mod map;
pub mod multiindex;
pub mod rank;
pub mod series;
pub mod solve;

pub use ideal::{ideal_membership, standard_monomials, Membership};
pub use linalg::Matrix;
pub use map::{sigma_conjugate, sigma_standard, SeriesMap, VariableSplit};
pub use multiindex::MultiIndex;
pub use rank::{generic_rank, matrix_generic_rank, series_det, RankMethod, RankReport};
pub use series::{first_difference, Series};
pub use solve::{implicit_solve, invert_map};
