pub mod automorphic;
pub mod cli;
pub mod error;
pub mod fredholm;
pub mod induced;
pub mod linalg;
pub mod padic;
pub mod quaternion;
pub mod ring;
pub mod weight;

pub use error::{Error, Result};
