//! The soft lambda-calculus: syntax, termhood analysis, reduction with
//! complexity monitoring, the ISALF type checker and the encoded library.

pub mod calculus;
pub mod syntax;
pub mod types;
pub mod metrics;
pub mod reduction;
pub mod gen;
pub mod stdlib;
pub mod verify;
