//! Formal CR geometry toolkit: truncated power series over Q(i), generic
//! submanifold germs in normal form, Segre mappings, jet prolongation and
//! reflection ideals of formal maps.

pub mod coeff;
pub mod error;
pub mod fixtures;
pub mod jets;
pub mod manifolds;
pub mod powerseries;
pub mod reflection;

pub use coeff::{Coefficient, Rat};
pub use error::{CrError, CrResult};
pub use powerseries::{MultiIndex, Series, SeriesMap};
