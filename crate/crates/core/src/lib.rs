pub mod chsh;
pub mod corpus;
pub mod entanglement;
pub mod error;
pub mod higgs;
pub mod linalg;
pub mod par;
pub mod structure;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
