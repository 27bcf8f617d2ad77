pub mod cascade;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod maxleaf;
pub mod model;
pub mod oracle;
pub mod search;
pub mod strategy;

pub use error::{Error, Result};
