//! Reflection ideals of formal maps between generic manifolds, the jet
//! systems their jets satisfy, and finite-order determination checks.
//!
//! Every verdict carries the order at which it was certified.

pub mod experiment;
pub mod germ;
pub mod key;
pub mod system;

pub use experiment::{
    determination_experiment, jets_agree, level_agreement, ExperimentConfig, ExperimentReport, PerturbationFamily,
};
pub use germ::{
    conj_map_on_segre, finite_determination_check, finite_map_check, ideal_compare, ideal_equal, nondegeneracy_certificate,
    not_totally_degenerate, reflection_generators, sends_into, DegeneracyReport, FiniteDetermination, FiniteMapVerdict,
    FormalMapGerm, IdealComparison, MapCheck, PulledCertificate, ReflectionIdeal,
};
pub use key::{key_identity_check, KeyIdentityReport, KeyIdentityVerdict};
pub use system::{
    assemble_from_tables, build_system, check_jet_solution, restrict_jet, CoefficientTables, ConstraintSystem,
    SolutionCheck, SystemEntry, SystemKind,
};
