pub mod contour;
pub mod elliptic;
pub mod error;
pub mod identities;
pub mod linalg;
pub mod params;
pub mod partition;
pub mod real;
pub mod scaled;
pub mod spectrum;

pub use error::{Error, Result};
pub use params::Couplings;
pub use partition::{PartitionResult, Route};
pub use real::{Precision, Real};
pub use scaled::LogScaledValue;
