//! Morrey norms of piecewise radial power functions, witness families
//! showing that Morrey spaces `M^p_q(R^d)` (`1 <= p < q < inf`) are not
//! uniformly non-`l^1_n` for any `n >= 2`, and lower-bound estimates of the
//! n-th James and Von Neumann-Jordan constants.
//!
//! * [`domain`]: validated value types shared by everything else.
//! * [`closedform`]: exact formulas and the centered-ball supremum.
//! * [`numeric`]: off-center supremum search, quadrature and Monte Carlo.
//! * [`constants`]: witness construction and constant estimators.
//! * [`cli`]: profile documents and the `morrey` command-line tool.

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closedform;
pub mod constants;
pub mod domain;
pub mod error;
pub mod numeric;

pub use closedform::{
    annulus_p_integral, centered_norm, chunk_lower_bound, epsilon_upper_bound, local_quantity,
    power_norm_exact,
};
pub use constants::{
    build_witnesses, constants_ladder, james_lower_bound, j_nj_inequality_check, min_signed_norm,
    nj_lower_bound, nj_ratio, verify_family, verify_non_ell1n, ConstantEstimate, ConstantKind, SignedCombinationReport,
    SignedTuple, WitnessVerification,
};
pub use domain::{
    sign_matrix, sphere_area, Annulus, Ball, FiniteVectorTuple, MorreyParams, NormMethod, NormReport,
    PiecewiseRadialPower, Segment, SignMatrix, VectorNorm, WitnessFamily,
};
pub use error::{MorreyError, Result};
pub use numeric::{ball_p_integral, monotone_profile_check, morrey_norm_numeric, SearchConfig};
