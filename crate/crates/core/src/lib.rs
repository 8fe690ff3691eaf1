//! Certified lower bounds, and triangle-inequality upper bounds, on the total
//! variation distance between two equally weighted two-component Gaussian
//! mixtures with a shared covariance, plus the oracles used to check them.
//!
//! Everything is generic over the scalar type through [`Real`]; the aliases
//! at the crate root fix it to `f64` (and `…F32` to `f32`).
//!
//! ```
//! use tvgap::{tv_lower_1d, tv_oracle_1d, GridSpec, Mixture1D};
//!
//! let f = Mixture1D::new(0.1, -0.1, 1.0).unwrap();
//! let g = Mixture1D::new(0.2, -0.2, 1.0).unwrap();
//! let lower = tv_lower_1d(&f, &g, &GridSpec::default()).unwrap();
//! let tv = tv_oracle_1d(&f, &g, 1e-10).unwrap();
//! assert!(lower.value <= tv);
//! ```

// `!(a > b)` comparisons are used so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds1d;
pub mod boundsnd;
pub mod error;
pub mod linalg;
pub mod model;
pub mod oracles;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod special;

pub use bounds1d::{
    char_fn, char_gap, char_tv_lower, lemma_large_gap, lemma_sepmeans_bound, lemma_small_prec, small_prec_witness,
    trig_fact_residual, tv_lower_1d, tv_lower_1d_detailed, GridSpec, TrigFact,
};
pub use boundsnd::{case2_direction, project, sample_direction_z, tv_lower_nd, tv_lower_nd_detailed, whiten, Construction};
pub use error::{Error, Result};
pub use linalg::Tolerances;
pub use model::{canonicalize_1d, delta_stats, direction_vectors, BoundKind, BoundSource};
pub use oracles::{
    hellinger_sq_oracle_1d, moment_distance, tv_exact_gaussians, tv_oracle_1d, tv_oracle_nd, tv_upper_bound,
    tv_upper_bound_1d,
};
pub use rng::SeedStream;
pub use scalar::Real;

pub type Mixture1D = model::Mixture1D<f64>;
pub type MixtureND = model::MixtureND<f64>;
pub type CanonicalPair1D = model::CanonicalPair1D<f64>;
pub type DeltaStats = model::DeltaStats<f64>;
pub type DirectionData = model::DirectionData<f64>;
pub type BoundResult = model::BoundResult<f64>;
pub type SpdMatrix = linalg::SpdMatrix<f64>;
pub type Matrix = linalg::Matrix<f64>;
pub type Constants1D = bounds1d::Constants1D<f64>;
pub type LowerBound1D = bounds1d::LowerBound1D<f64>;
pub type LowerBoundNd = boundsnd::LowerBoundNd<f64>;
pub type ProjectionWitness = boundsnd::ProjectionWitness<f64>;
pub type McEstimate = oracles::McEstimate<f64>;

pub type Mixture1DF32 = model::Mixture1D<f32>;
pub type MixtureNDF32 = model::MixtureND<f32>;
pub type SpdMatrixF32 = linalg::SpdMatrix<f32>;
pub type BoundResultF32 = model::BoundResult<f32>;
