//! Reference implementations shared by integration tests.
#![allow(dead_code)]

pub mod gradients;
pub mod instances;
pub mod oracle;
