//! Shared by the core integration tests and the acceptance harness.
#![allow(dead_code)]

pub mod fixtures;
pub mod oracle;
