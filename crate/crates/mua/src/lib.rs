//! File formats, mechanism selection, test harness and reports around
//! [`mua_core`].

pub mod error;
pub mod format;
pub mod mechanisms;
pub mod report;
pub mod testkit;

pub use error::{Error, Result};
pub use mua_core as core;
