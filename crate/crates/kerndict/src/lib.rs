#![forbid(unsafe_code)]

//! Diversity measures, bound certificates, and entropy floors for
//! overcomplete kernel dictionaries.
//!
//! A dictionary is a finite set of points whose images under a kernel's
//! feature map serve as (generally non-orthogonal, possibly overcomplete)
//! building blocks. This crate quantifies how spread out those images are
//! and what that spread guarantees:
//!
//! * [`kernels`]: six kernel families with parameter validation, parsing,
//!   and the norm range `[r^2, R^2]` of their feature images;
//! * [`gram`]: Gram matrices and the regularized Cholesky solves behind
//!   the leave-one-out measures;
//! * [`diversity`]: the four measures on a dictionary, the minimum
//!   feature distance `delta_d`, the minimum leave-one-out approximation
//!   residual `delta_a`, the coherence `gamma`, and the Babel sum
//!   `gamma_B`;
//! * [`bounds`]: inequality certificates connecting the measures, for
//!   example that `(n-1) gamma R^2` caps the Babel sum;
//! * [`entropy`]: Parzen-window entropy estimators in input and feature
//!   space, discrete Renyi and Tsallis entropies, and the entropy floors
//!   each diversity measure implies;
//! * [`sparsify`]: greedy online dictionary construction under the four
//!   admission criteria the measures induce;
//! * [`synthetic`]: seeded generators for randomized verification.
//!
//! Measures come in pairs of entry points: from a [`Dictionary`] (points
//! plus kernel) or from a pre-built [`GramMatrix`], so externally supplied
//! Gram matrices get the same treatment as raw data.
//!
//! ```
//! use kerndict::{diversity_report, Dictionary, KernelSpec};
//!
//! let dict = Dictionary::new(
//!     vec![vec![0.0], vec![1.0], vec![2.5]],
//!     KernelSpec::gaussian(1.0)?,
//! )?;
//! let report = diversity_report(&dict, 0.0)?;
//! assert!(report.approximation_delta <= report.distance_delta + 1e-9);
//! assert!(report.coherence_gamma <= report.babel_gamma + 1e-9);
//! # Ok::<(), kerndict::Error>(())
//! ```
//!
//! Numerical conventions: squared quantities are clamped at zero before
//! square roots; comparisons in certificates carry a `1e-9` tolerance;
//! leave-one-out solves take an explicit jitter (`0.0` requests none) and
//! escalate through a fixed fallback ladder only when a factorization
//! fails outright, reporting what was used.

pub mod bounds;
pub mod diversity;
pub mod entropy;
mod error;
pub mod gram;
pub mod kernels;
pub mod sparsify;
pub mod synthetic;

pub use bounds::{
    babel_bound_from_coherence, bounds_from_approximation, certify, certify_gram,
    coherence_bound_from_babel, feature_distance_floor, BoundCertificate, Certification,
    Direction, FloorMeasure, SkippedBound, CERTIFICATE_TOLERANCE,
};
pub use diversity::{
    approximation_measure, babel, coherence, distance_measure, diversity_report,
    diversity_report_from_gram, min_feature_distance, DiversityReport,
};
pub use entropy::{
    entropy_floors_gram, entropy_floors_input, feature_entropy_floors, feature_plug_ins_loo,
    floors_from_quadratic, parzen_feature, parzen_input, quadratic_entropy_gaussian,
    quadratic_entropy_general, quadratic_entropy_general_from_gram, renyi_entropy,
    tsallis_entropy, EntropyFloor, EntropyReport, FeatureEntropyFloors, FloorCheck,
    FloorContext, WindowFamily, WindowSpec,
};
pub use error::{Error, Result};
pub use gram::{
    build_gram, kernel_vector, loo_solve, loo_solve_detailed, Dictionary, GramMatrix,
    DEFAULT_FALLBACK_JITTER,
};
pub use kernels::{KernelFamily, KernelSpec, NormBounds, Provenance};
pub use sparsify::{
    admit, run_stream, AdmitDecision, Criterion, CriterionKind, Rejection, SparsifyTrace,
};
