pub mod error;
pub mod inference;
pub mod linalg;
pub mod pipeline;
pub mod series;
pub mod synth;
pub mod tvvar;
pub mod unitroot;
pub mod var;

pub use error::{Error, ErrorKind, Result};
