//! Exact computational workbench for sum-product estimates over F_{p^n}.

pub mod cli;
pub mod error;
pub mod exact;
pub mod field;
pub mod lemmas;
pub mod search;
pub mod setalg;
pub mod tracer;

pub use error::{Error, Result};
pub use exact::Rational;
pub use field::{Elem, Field};
pub use setalg::FSet;
