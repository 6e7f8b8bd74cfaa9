//! Stationary infinitely divisible moving averages `X(t) = ∫ f(t - x) Λ(dx)`
//! and the limits of their window integrals.
//!
//! * [`levy`]: Lévy measures, their moments and truncated jump laws.
//! * [`kernel`]: kernels `f = g'` and their products.
//! * [`quadrature`]: adaptive Gauss-Kronrod rules on intervals, boxes and
//!   Lévy measures.
//! * [`analytic`]: characteristic functions, covariances and integrability
//!   conditions.
//! * [`simulate`]: shot-noise simulation with exact window integrals.
//! * [`verify`]: convergence, Monte Carlo consistency and hyperuniformity
//!   checks.
//!
//! ```
//! use idma::{FddSpec, Kernel1D, LevyMeasure, LimitVariant, MovingAverage};
//!
//! let model = MovingAverage::new(Kernel1D::gauss_deriv(), LevyMeasure::dickman());
//! let spec = FddSpec::single(vec![0.0], 1.0, 30.0)?;
//! let window = model.log_cf_window(&spec)?.cf();
//! let limit = model.log_cf_limit(&spec, LimitVariant::BoundaryAugmented)?.cf();
//! assert!((window - limit).norm() < 1e-6);
//! # Ok::<(), idma::Error>(())
//! ```

pub mod error;
pub mod kernel;
pub mod levy;
pub mod quadrature;

pub use error::{Error, Result};
pub use kernel::{Kernel1D, KernelKind, KernelNorms, ProductKernel};
pub use levy::{LevyKind, LevyMeasure};
pub use quadrature::{QuadOptions, QuadResult};
pub mod analytic;
pub use analytic::{CfEvaluation, CfPoint, CfValue, ConditionsReport, CovarianceIntegral, FddSpec, LimitVariant, MovingAverage};
pub mod simulate;
pub use simulate::{JumpSet, ReplicateMatrix, SimConfig, Window};
pub mod verify;
pub use verify::{ConvergenceReport, HyperReport, Winner};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/levy.md")]
    mod levy {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/characteristic-functions.md")]
    mod characteristic_functions {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/convergence.md")]
    mod convergence {}
    #[doc = include_str!("../../../book/src/hyperuniformity.md")]
    mod hyperuniformity {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
