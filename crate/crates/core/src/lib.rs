pub mod cli;
pub mod error;
pub mod exponents;
pub mod geometry;
pub mod rational;
pub mod records;
pub mod series;
pub mod transforms;
pub mod trees;
pub mod vlab;

pub use error::{Error, Result};
pub use exponents::{ExponentVector, VariableSignature};
pub use rational::Rational;
pub use series::{GenSeries, NormalDecomposition, Normality};
pub use transforms::{ElementaryTransform, TransformChain, TransformKind};
