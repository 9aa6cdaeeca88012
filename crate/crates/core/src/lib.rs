pub mod affine;
pub mod bundle;
pub mod classification;
pub mod deformability;
pub mod error;
pub mod iterates;
pub mod matrix;
pub mod oracles;
pub mod sample;
pub mod scalar;
pub mod serde_int;
pub mod solver;
pub mod verify;
pub mod words;

pub use bundle::{BundleSpec, FiberedMapSpec};
pub use classification::{classify, CaseTag, Classification};
pub use deformability::{
    deformability_report, deformable_f, deformable_fn, obstruction_report, quotient_member, realizable_fixed_point_free,
    ConditionContext, DeformabilityReport, DivisorRow, ObstructionReport, QuotientLattice, Realizability,
    RealizabilityVerdict, Verdict,
};
pub use error::{Error, ParseScalarError, Result};
pub use iterates::{geometric_sums, key_invariant, nielsen_fiber, power_exponents, GeometricSums, PowerExponents};
pub use matrix::{IntMatrix2, IntVec2};
pub use scalar::{ExactScalar, Rational};
pub use solver::{EmptinessKind, EmptinessProof};
pub use words::{validate_hom, Generator, GroupEngine, HomValidity, Letter, NormalForm, Word};
pub use affine::{
    build_case_one_g, build_main_theorem_g, check_gluing, find_periodic, iterate_closed_form, AffineParams, BundlePoint,
    LiftedPoint, PeriodicOutcome, PeriodicSolution, TwoPieceMap, WitnessMap,
};
