pub mod error;
pub mod word;
pub mod pcp;
pub mod zlin;
pub mod subgroup;
pub mod section;
pub mod structure;
pub mod pgroup;
pub mod oracle;
pub mod witness;
pub mod dimension;
pub mod farb;
pub mod lab;
pub mod catalog;
pub mod format;
pub mod report;

pub use error::{Error, Result};
