pub mod channel;
pub mod complexity;
pub mod error;
pub mod experiments;
pub mod fda;
pub mod linalg;
pub mod precoder;
pub mod rng;

pub use error::{Error, Result};
