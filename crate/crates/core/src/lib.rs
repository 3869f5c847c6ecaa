pub mod analysis;
pub mod checks;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod pulses;
pub mod scenarios;

pub use error::{Error, Result};
