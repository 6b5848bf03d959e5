pub mod cli;
pub mod complex;
pub mod duality;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod hodge;
pub mod io;
pub mod locality;
pub mod metric;
pub mod operator;
pub mod subdivision;

pub use error::{Error, Result};
