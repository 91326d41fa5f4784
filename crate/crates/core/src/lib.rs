//! Geometry kernel for crooked planes and crooked surfaces in the
//! 3-dimensional Einstein Universe.

pub mod affine;
pub mod certify;
pub mod cone;
pub mod constructions;
pub mod einstein;
pub mod error;
pub mod exact;
pub mod export;
pub mod forms;
pub mod group;
pub mod mesh;
pub mod scalar;
pub mod surface;

pub use error::{GeomError, Result};
pub use forms::{causal_class, form21, form32, null_frame, orientation_det, CausalClass, NullFrame, Vec3, Vec5};
pub use scalar::{rat, Rational, Scalar};

pub use affine::{AllowablePair, CrookedHalfspace, CrookedPlane, Extension, Side};
pub use certify::{component_count, separation_margin, ComponentReport, SeparationReport};
pub use constructions::{
    cyclic_schottky, pingpong_check, pull_apart, word_images, DisjointPairSpec, PingPongReport, ReducedWord,
    SchottkySystem, WordImageReport,
};
pub use einstein::{embed, unembed, EinPoint, Photon};
pub use exact::{exact_intersection, ExactReport};
pub use group::{cartan_projection, classify_distortion, CartanPair, DistortionClass, Iso32, Mat3};
pub use mesh::{sample_surface, PartLabel, SurfaceMesh};
pub use surface::{CrookedSurface, Region};
