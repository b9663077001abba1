//! Colored PROPs, the slice construction, propertopes and propertopic sets.

pub mod cli;
pub mod color;
pub mod error;
pub mod graph;
pub mod json;
pub mod perm;
pub mod presheaf;
pub mod prop;
pub mod propertope;
pub mod slice;
pub mod spec;

pub use color::{Color, Element, Name, Payload, Profile};
pub use error::{Error, Result};
pub use perm::Perm;
pub use prop::{PropImpl, PropRef};
