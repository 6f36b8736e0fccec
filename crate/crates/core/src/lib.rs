//! Linear extension operators from functions on a finite point set `K` of a
//! finite abelian group `Γ` into the Fourier algebra `A(Γ)`.
//!
//! The crate builds the peak-function extension operator, certifies operator
//! norms on phase grids with an explicit Lipschitz slack, searches for
//! operators of smaller norm, and checks the sign-averaging inequalities that
//! bound every extension operator from below by `√(n/2)`.

pub mod alpha;
pub mod certificates;
pub mod error;
pub mod extension;
pub mod group;
pub mod numeric;
pub mod peak;
pub mod spectral;

pub use alpha::{
    optimize_alpha, project_constraints, random_feasible_operator, theorem_bounds, AlphaOptions,
    AlphaReport, AlphaSearch,
};
pub use certificates::{chain_check, khinchin_average, khinchin_check, ChainReport, KhinchinReport};
pub use error::{Error, Result};
pub use extension::{
    apply, canonical_operator, norm_certified, norm_certified_with_budget, rademacher_average,
    sign_max, sign_stats, ExtensionOperator, NormCertificate, SignStats,
};
pub use group::{difference_set, ElementSet, GroupElement, GroupSpec, PointSet};
pub use num_complex::Complex64;
pub use peak::{build_peak, greedy_base_set, validate_peak, PeakFunction, PeakValidation};
pub use spectral::{a_norm, analyze, l1_time_norm, sup_norm, synthesize, GroupFunction, Side};
