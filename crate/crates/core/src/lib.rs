//! Altitude and trajectory planning for a UAV that powers and reads passive
//! backscatter nodes with uplink power-domain NOMA.
//!
//! The pipeline runs from the tiling of the target area ([`geometry`]) over
//! the per-sub-region link budget and SIC decoding ([`link`]) to the outage
//! of each sub-region, computed in closed form ([`outage`]) or by Monte Carlo
//! ([`mc`]), and finally the throughput objective and its exhaustive search
//! over altitudes ([`optimizer`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod link;
pub mod mc;
pub mod network;
pub mod optimizer;
pub mod outage;
pub mod output;
pub mod validation;

pub use config::NetworkConfig;
pub use error::{Error, Result};
pub use optimizer::Mode;
