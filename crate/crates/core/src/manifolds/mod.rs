//! Generic submanifold germs, Segre mappings, CR vector fields, finite type
//! and holomorphic nondegeneracy.

pub mod generic;
pub mod nondegeneracy;
pub mod segre;
pub mod vector_fields;

pub use generic::GenericManifold;
pub use nondegeneracy::{
    default_alpha_bound, degeneracy_field, holo_nondegeneracy_check, nondegeneracy_rows, q_coefficients,
    HoloNondegVerdict, NondegCertificate, QCoefficient,
};
pub use segre::{IdentityFailure, SegreMapping};
pub use vector_fields::{
    cr_vector_fields, finite_type, lie_span, segre_type, FiniteTypeReport, FiniteTypeRoute, LieReport, SegreTypeReport,
    VectorField,
};
