pub mod capacity;
pub mod channels;
pub mod cli;
pub mod config;
pub mod entropics;
mod error;
pub mod indecomposability;
pub mod io;
pub mod linalg;
pub mod random;

pub use error::{Error, Result};
