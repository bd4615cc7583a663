//! Operator means, Hadamard-product algebra and operator fields, with
//! certified Chebyshev-type matrix inequalities.

pub mod campaign;
pub mod chebyshev;
pub mod error;
pub mod fields;
pub mod hermat;
pub mod means;
pub mod products;
pub mod sampling;

pub use campaign::{falsify, replay, Cell, CellRecord, FalsificationReport, Generator, Inequality};
pub use chebyshev::{GapReport, Verdict};
pub use error::{Error, Result};
pub use fields::{OperatorField, WeightVector};
pub use hermat::{hermitize, CMatrix, HermitianMatrix, SpectralDecomposition, Tolerances};
pub use means::{power_mean, MeanSpec};
