pub mod error;
pub mod bounds;
pub mod decompose;
pub mod detrange;
pub mod gram;
pub mod io;
pub mod known;
pub mod linalg;
pub mod search;

pub use error::{Error, Result};
