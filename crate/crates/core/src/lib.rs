//! Orbifold atlases, coverings and holonomy.

pub mod atlas;
pub mod atlas_catalog;
pub mod covering;
pub mod deformation;
pub mod double_cover;
pub mod error;
pub mod geometry;
pub mod group;
pub mod perm;
pub mod rep;
pub mod subgroup;
pub mod todd_coxeter;
pub mod word;

pub use error::{Error, Result};
pub use group::{catalog_group, FiniteGroup, GroupSpec, CATALOG};
pub use perm::Perm;
pub use subgroup::{
    all_subgroups, conjugacy_classes_of_subgroups, conjugate_intersection, double_cosets, CosetSpace,
    QuotientGroup, Subgroup,
};
pub use word::{Abelianization, Presentation, Word};
pub use atlas::{AtlasSpec, OrbifoldAtlas, ValidationReport, Violation, ViolationKind};
pub use atlas_catalog::{builtin_atlas, CATALOG_ATLASES};
pub use covering::*;
pub use deformation::{
    intertwiner, preholonomy, roundtrip_experiment, section, ExperimentOptions, ExperimentReport, FiniteAction,
    GeometricStructure, Intertwiner, StructureFamily,
};
pub use double_cover::{orientation_double_cover, DoubleCover};
pub use geometry::{evaluate_word, Geometry, Isometry, LieVector};
pub use rep::{tangent_report, Representation, TangentOptions, TangentReport};
pub use todd_coxeter::{enumerate_cosets, group_order, CosetTable, DEFAULT_MAX_COSETS};
