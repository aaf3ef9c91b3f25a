pub mod charvar;
pub mod error;
pub mod json;
pub mod linalg;
pub mod moment_flow;
pub mod path_algebra;
pub mod quiver;
pub mod representation;
pub mod segre;
pub mod tensor_rep;

pub use error::{Error, Result};
