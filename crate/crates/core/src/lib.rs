pub mod arith;
pub mod characters;
pub mod error;
pub mod identities;
pub mod lfunction;
pub mod moments;
pub mod serde_complex;
pub mod special;
pub mod transforms;

pub use error::{Error, Result};
