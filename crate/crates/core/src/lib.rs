#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Sequential maximum-likelihood decoders for block and convolutional codes
//! on the AWGN channel, with branch-metric complexity counting and
//! Berry-Esseen / Chernoff upper bounds on that complexity.

pub mod bounds;
pub mod channel;
pub mod codes;
pub mod decoders;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod trellis;

pub use error::{Error, Result};
