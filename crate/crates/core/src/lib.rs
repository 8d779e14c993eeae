//! Kripke semantics for intuitionistic and constructive modal logics.

pub mod birelational;
pub mod cli;
pub mod error;
pub mod formula;
pub mod general;
pub mod higher_order;
pub mod kripke;
pub mod modelfile;
pub mod pointset;
pub mod sample;
pub mod search;
pub mod semantics;
pub mod transform;

pub use error::{Error, Result};
pub use formula::Formula;
