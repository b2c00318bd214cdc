//! Exact arithmetic for nef walls, Pell-type divisor classification and
//! wall-crossing timelines on blow-ups of the plane at general points.

pub mod bignum;
pub mod classify;
pub mod contfrac;
pub mod diophantine;
pub mod error;
pub mod moduli;
pub mod par;
pub mod picard;
pub mod rational;
mod render;

pub use error::{Error, Result};
pub use par::Execution;
pub use picard::{Conditionality, Divisor, Surface};
pub use rational::Rational;
