//! Pairs of orthogonal projections: the six-subspace canonical form, the
//! spectrum of the anticommutator `PQ + QP`, and synthesis of pairs with
//! prescribed spectra.
//!
//! ```
//! use twoproj::{decompose, predicted_anticommutator_spectrum, synth};
//!
//! let pair = synth::build_pair(&synth::SynthesisSpec::from_q0(vec![0.25])).unwrap();
//! let form = decompose(&pair, 1e-8).unwrap();
//! let spectrum = predicted_anticommutator_spectrum(&form);
//! assert_eq!(spectrum.values(), &[-0.25, 0.75]);
//! ```

pub mod error;
pub mod halmos;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod projection;
pub mod random;
pub mod spectral;
pub mod synth;

pub use error::{Error, ErrorKind, Result};
pub use halmos::{
    canonical_reassemble, decompose, reconstruction_residual, HalmosDims, HalmosForm,
};
pub use harness::{
    hausdorff_distance, multiset_match, run_campaign, CampaignConfig, PointSet, VerificationReport,
};
pub use linalg::{
    mat_mul, operator_norm, orthonormal_columns, sym_eigen, EigenDecomposition, Matrix,
};
pub use projection::{
    projection_from_basis, random_projection_pair, validate_projection, ProjectionPair,
};
pub use spectral::{
    check_bound, check_norm_formula, check_theorem_inclusions, forward_map, inverse_map,
    oracle_anticommutator_spectrum, predicted_anticommutator_spectrum, predicted_pqp_spectrum,
    schur_factorization_residual, SpectrumMultiset,
};
