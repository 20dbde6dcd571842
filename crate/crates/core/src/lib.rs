pub mod error;
pub mod grid;
pub mod io;
pub mod kernels;
pub mod operators;
pub mod params;
pub mod quad;
pub mod qualitative;
pub mod solver;
pub mod special;
pub mod symbols;

pub use error::{Error, Result};
pub use params::Params;
