pub mod analysis;
pub mod cli;
pub mod codes;
pub mod container;
pub mod error;
pub mod gf2;
pub mod grid;
pub mod repair;
pub mod simnet;

pub use error::{Error, Result};
