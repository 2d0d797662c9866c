//! Finite-scale computation with ideals on ω.

pub mod classifier;
pub mod cli;
pub mod egorovlab;
pub mod error;
pub mod ground;
pub mod ideals;
pub mod pathology;
pub mod reductions;
pub mod submeasures;
pub mod rational;

pub use error::{Error, Result};
