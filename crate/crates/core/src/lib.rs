pub mod analytic;
pub mod cli;
pub mod error;
pub mod frame;
pub mod generators;
pub mod io;
pub mod oracle;
pub mod quantum;
pub mod qubit;
pub mod qudit;
pub mod solve;
pub mod states;

pub use error::{MfefError, Result};
