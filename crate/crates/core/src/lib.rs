#![cfg_attr(not(feature = "std"), no_std)]
extern crate alloc;

mod arma_poly;
pub mod dgp;
pub mod correlation;
pub mod error;
pub mod estimation;
pub mod montecarlo;
pub mod numeric;
pub mod portmanteau;
mod series;

pub use error::{Error, Result};
pub use series::TimeSeries;
