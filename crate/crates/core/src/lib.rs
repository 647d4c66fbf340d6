//! Rate regions, information measures and Gaussian scheme evaluation for
//! downlink cloud radio access networks with base-station cooperation.

pub mod atom;
pub mod discrete;
pub mod gap;
pub mod gaussian;
pub mod polytope;
pub mod regions;
pub mod schemes;
pub mod sweep;
pub mod verify;

pub use atom::{Atom, AtomError, VarSet};
pub use discrete::{binary_entropy, blahut_arimoto, BlahutArimoto, Channel, DiscreteError, InfoEvaluator, JointPmf};
pub use gaussian::{capacity_logdet, CranNetwork, GaussianError, JointCovariance, LinearGaussian};
pub use polytope::{
    fme_eliminate, fme_project, format_system, lp_maximize, max_uniform_slack, parse_system, regions_equal_sampled, AffineExpr,
    AtomValuation, ConstraintSystem, FmeOptions, LinearConstraint, NumericSystem, PolytopeError, Rational,
    SampleReport, Witness,
};
pub use regions::{gds_project, gds_theorem1_system, RegionError, RegionSpec, Substitution};
pub use schemes::{
    optimize_scheme, rsum_star, scheme_sumrate, Budget, Scheme, SchemeError, SchemeEvaluation, SchemeParams,
};
pub use gap::{audit, audit_random, cutset_outer_relaxed, ddf_inner_relaxed, AuditSummary, CutReport, GapAudit};
pub use sweep::{run_sweep, to_csv, SweepConfig, SweepError, SweepRow};
