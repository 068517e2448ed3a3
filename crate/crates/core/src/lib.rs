//! Compounded exponential-Lindley (CEL) lifetime distribution.

pub mod competitors;
pub mod data;
pub mod distribution;
pub mod error;
pub mod fitting;
pub mod gof;
pub mod numerics;
pub mod properties;
pub mod sampling;

pub use competitors::{CompetitorFamily, CompetitorParams};
pub use distribution::{CelDistribution, Theta};
pub use error::{Error, Result};
pub use fitting::{fit_cel, fit_competitor, Family, FitOptions, FitResult, Sample};
