//! Decorated preprojective algebras over exact fields.

pub mod algebra;
pub mod degeneration;
pub mod error;
pub mod families;
pub mod linalg;
pub mod parse;
pub mod preprojective;
pub mod quiver;
pub mod repvariety;
pub mod rewriting;
pub mod scalar;
pub mod series;
pub mod standard;
pub mod tensor;

pub use error::{Error, Result};
pub use preprojective::{hilbert_series, total_dimension, PiAlgebra, SignConvention, TotalDimension};
pub use quiver::{ArrowKind, DecoratedQuiver, Decoration};
pub use scalar::{Field, Scalar};
pub use series::HilbertSeries;
