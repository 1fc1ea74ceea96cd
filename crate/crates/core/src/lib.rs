#![no_std]
//! Dense simulation of quantum transducers.

extern crate alloc;

pub mod error;
pub mod linalg;

pub use error::{Error, Result};
pub mod adversary;
pub mod majority;
pub mod nonboolean;
pub mod oracles;
pub mod purifier;
pub mod qsp;
pub mod query;
pub mod transducer;
