//! File formats, canonical JSON, parallel corpus runs, the verification
//! suite and the command-line front end for `trilat_core`.

pub mod audit;
pub mod cli;
pub mod corpus;
pub mod format;
pub mod json;
pub mod verify;
