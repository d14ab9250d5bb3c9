pub mod basis;
pub mod conv;
pub mod error;
pub mod fft;
pub mod irreps;
pub mod many_body;
pub mod oracle;
pub mod so3;
pub mod tp;

pub use error::{Error, Result};
pub use irreps::{DegreeWeights, FeatureBatch, IrrepsVector};
