pub mod channel;
pub mod error;
pub mod experiment;
pub mod model;
pub mod multi_carrier;
pub mod ops;
pub mod scheduler;
pub mod single_carrier;

pub use error::{Error, Result};
