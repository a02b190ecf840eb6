//! Command-line front end for the moduli-of-smoothness toolkit:
//! configuration, result persistence, caching, and report emission.

pub mod cache;
pub mod config;
pub mod output;
pub mod runner;
