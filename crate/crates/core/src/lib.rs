//! Detection and corpus analysis of the strategies hearers use when they
//! verbalize the intended meaning of an ironic message.

pub mod alignment;
pub mod analysis;
pub mod corpus;
pub mod error;
pub mod lexicons;
pub mod markers;
pub mod rq;
pub mod strategies;

pub use error::{Error, Result};
