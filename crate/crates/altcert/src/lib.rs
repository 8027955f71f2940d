//! Certificates and constructions for link diagrams on closed orientable
//! surfaces: combinatorial maps, alternating diagrams, transverse-curve
//! decision procedures (reduced, obviously prime), generalized
//! augmentations with half-twist filling, the cage-graph rubber-band
//! pipeline with explicit volume bounds, and embroidery closures of
//! tangles.

pub mod augment;
pub mod cage;
pub mod corpus;
pub mod curve;
pub mod diagram;
pub mod embroidery;
pub mod io;
pub mod map;
pub mod report;

pub use augment::{certify_hyperbolic, insert_half_twists, validate_augmentations, AugmentedDiagram};
pub use cage::{derived_augmented, rubber_band_link, validate_cage, volume_bounds, CageGraph};
pub use curve::{
    bounds_disk, cut_along, enumerate_curves, is_obviously_prime, is_reduced,
    one_intersection_circle_exists, validate_curve, z2_class, TransverseCurve,
};
pub use diagram::LinkDiagram;
pub use embroidery::{embroider_annulus, embroider_disk, Tangle};
pub use map::SurfaceMap;
