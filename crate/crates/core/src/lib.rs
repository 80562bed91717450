//! Exact computations for non-reductive GIT with a graded unipotent radical.

pub mod blowup;
pub mod builtin;
pub mod error;
pub mod hull;
pub mod limits;
pub mod linalg;
pub mod loci;
pub mod point;
pub mod poly;
pub mod rational;
pub mod recursion;
pub mod report;
pub mod rep;
pub mod sample;
pub mod scenario;
pub mod stability;
pub mod text;
pub mod unipotent;

pub use error::{Error, Result};
pub use rational::Rat;
