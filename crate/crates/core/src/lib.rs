//! Weighted reduced Bergman kernels of planar domains, their higher-order
//! versions and kernel functions, evaluated from truncated orthonormal
//! series.

pub mod basis;
pub mod domain;
pub mod error;
pub mod jet;
pub mod kernel;
pub mod linalg;
pub mod oracle;
pub mod path;
pub mod quadrature;
pub mod ramadanov;
pub mod testfn;
pub mod weight;

pub use basis::{BasisKind, BasisSet, OrthonormalBasis};
pub use domain::{Domain, DomainSpec};
pub use error::{KernelError, Result};
pub use kernel::{KernelEvaluator, KernelOptions};
pub use path::Path;
pub use quadrature::ResolutionSpec;
pub use testfn::{Polynomial, TestFunction};
pub use weight::{Weight, WeightSpec};
