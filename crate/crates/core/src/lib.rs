//! Parabolic BMO seminorms, tent-map reflection extensions, and elliptic
//! matrix projections for grid-sampled fields on the unit parabolic box.

pub mod area;
pub mod classic;
pub mod corpus;
pub mod error;
pub mod field;
pub mod generate;
pub mod grid;
pub mod io;
pub mod mad;
pub mod matproj;
pub mod seminorm;
pub mod sigma;
pub mod tent;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Field, ValueKind};
pub use grid::{for_each_multi_index, reflect_index, GridSpec, ParabolicCylinder, MAX_DIM};
pub use tent::{preimage_count, tent, tent_point};

pub use classic::{classic_check, ClassicReport};
pub use corpus::{
    all_pass, corpus_to_csv, default_manifest, manifest_to_csv, parse_manifest, run_corpus,
    CorpusRow, ManifestRow,
};
pub use generate::{generate, GeneratorKind, ALL_KINDS};
pub use io::{read_field, write_field};
pub use mad::{matrix_mad, slice_mad};
pub use matproj::{band_violation, eigh, project_field, project_to_band, Eigen, SymMat};
pub use seminorm::{
    cylinder_oscillation, modulus, seminorm, seminorm_brute, seminorm_with_modulus, AccessMode,
    MatrixNorm, ModulusPoint, SeminormOptions, SeminormResult,
};
pub use sigma::{
    axis_multiplicities, multiplicity_bound, multiplicity_report, sigma_bounds_check,
    MultiplicityReport, SigmaTrialReport,
};
pub use verify::{
    check_restriction, extension_constant, propagation_check, small_cylinder_constant,
    verify_bounds, BoundReport, PropagationReport,
};

pub use area::{area_check, AreaCheck};
