//! Cage graphs and the rubber-band-link pipeline: medial diagram with the
//! canonical alternating assignment, one two-punctured augmentation per
//! cage edge, the 2-braid full-twist patch on the sphere, and the explicit
//! volume-bound formulas.

use serde::Serialize;
use thiserror::Error;

use crate::augment::{
    certify_hyperbolic, insert_half_twists, smooth_crossing, AugmentError, Augmentation,
    AugmentedDiagram, CheckItem, HyperbolicityCertificate, Witness,
};
use crate::curve::{one_intersection_circle_exists, PathSegment, TransversePath};
use crate::diagram::LinkDiagram;
use crate::map::{EdgeId, FaceId, SurfaceMap, VertexId};

/// Volume of the regular ideal octahedron.
pub const V_OCT: f64 = 3.66386237670888;
/// Volume of the regular ideal tetrahedron.
pub const V_TET: f64 = 1.01494160640965;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CageError {
    #[error("not a valid cage graph: {rule}")]
    Invalid { rule: String, witness: Option<Witness> },
    #[error(transparent)]
    Augment(#[from] AugmentError),
}

/// A validated cage graph: connected, simple (no loops or parallel edges),
/// cellular on its declared surface, with no trivial circle meeting it
/// exactly once.
#[derive(Clone, Debug)]
pub struct CageGraph {
    map: SurfaceMap,
}

impl CageGraph {
    pub fn new(map: SurfaceMap) -> Result<CageGraph, CageError> {
        let item = validate_cage(&map);
        if item.passed() {
            Ok(CageGraph { map })
        } else {
            Err(CageError::Invalid {
                rule: item.name.clone(),
                witness: item.witness,
            })
        }
    }

    pub fn map(&self) -> &SurfaceMap {
        &self.map
    }

    pub fn edge_count(&self) -> usize {
        self.map.edge_count()
    }

    pub fn genus(&self) -> usize {
        self.map.derived_genus()
    }

    pub fn euler(&self) -> i64 {
        self.map.euler_characteristic()
    }
}

/// Check every cage invariant; the failing rule name is the check name and
/// the witness identifies the offending structure.
pub fn validate_cage(map: &SurfaceMap) -> CheckItem {
    if map.is_empty() {
        return CheckItem::fail(
            "cage_nonempty",
            Witness::Note { note: "a cage graph needs at least one vertex".into() },
        );
    }
    for &e in map.edges() {
        let (a, b) = map.edge_endpoints(e);
        if a == b {
            return CheckItem::fail("cage_no_loops", Witness::Edge { edge: e });
        }
    }
    let mut pairs: Vec<((VertexId, VertexId), EdgeId)> = Vec::new();
    for &e in map.edges() {
        let (a, b) = map.edge_endpoints(e);
        let key = (a.min(b), a.max(b));
        if let Some((_, other)) = pairs.iter().find(|(k, _)| *k == key) {
            return CheckItem::fail(
                "cage_no_parallel_edges",
                Witness::Note { note: format!("edges {} and {} join the same vertices", other.0, e.0) },
            );
        }
        pairs.push((key, e));
    }
    if !map.is_cellular_on() {
        return CheckItem::fail(
            "cage_cellular",
            Witness::Note {
                note: format!(
                    "derived genus {} but declared genus {}",
                    map.derived_genus(),
                    map.declared_genus()
                ),
            },
        );
    }
    if let Some((edge, curve, _)) = one_intersection_circle_exists(map) {
        let _ = edge;
        return CheckItem::fail("cage_no_one_intersection_circle", Witness::Curve { segments: curve });
    }
    CheckItem::pass("cage_valid")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeComponent {
    pub edge: EdgeId,
    pub targets: (VertexId, VertexId),
}

/// Descriptive record of the rubber band link built on a cage graph: one
/// unknotted component per vertex and one per edge, each edge component
/// meeting the surface inside the two vertex regions at its ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RubberBandLink {
    pub vertex_components: Vec<VertexId>,
    pub edge_components: Vec<EdgeComponent>,
}

pub fn rubber_band_link(cage: &CageGraph) -> RubberBandLink {
    let map = cage.map();
    RubberBandLink {
        vertex_components: map.vertices().iter().map(|v| VertexId(v.rep)).collect(),
        edge_components: map
            .edges()
            .iter()
            .map(|&e| EdgeComponent { edge: e, targets: map.edge_endpoints(e) })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatchNote {
    /// Cage edge whose half twist was replaced by a full twist.
    pub edge: EdgeId,
}

#[derive(Clone, Debug)]
pub struct DerivedAugmented {
    pub augmented: AugmentedDiagram,
    pub two_braid_patch: Option<PatchNote>,
    pub mirrored: bool,
}

/// The canonical over flag at the medial crossing of cage edge `e`: the
/// over-strand darts see the black (vertex) faces on their
/// sigma-counterclockwise side.
fn medial_over_flag(cage_map: &SurfaceMap, e: EdgeId) -> bool {
    let a = e.0;
    let b = cage_map.alpha(a);
    // over pair is the even medial darts {2a, 2b}; the flag says whether the
    // minimum dart of the medial crossing belongs to it
    a.min(b) <= cage_map.sigma_inv(a).min(cage_map.sigma_inv(b))
}

/// Medial diagram of the cage with the canonical alternating assignment.
pub fn alternating_assignment(cage: &CageGraph, mirror: bool) -> LinkDiagram {
    let map = cage.map();
    let med = map.medial();
    let mut flags = Vec::with_capacity(med.vertex_count());
    for v in med.vertices() {
        // medial vertex rep dart identifies the cage edge
        let d = v.rep;
        let cage_dart = d / 2;
        let e = if d % 2 == 0 {
            map.edge_of(cage_dart)
        } else {
            map.edge_of(map.sigma(cage_dart))
        };
        flags.push(medial_over_flag(map, e) != mirror);
    }
    let diagram = LinkDiagram::new(med, flags).expect("medial maps are 4-valent");
    debug_assert!(diagram.is_alternating(), "medial assignment alternates by construction");
    diagram
}

/// A point an augmentation makes on an arc, anchored near one endpoint.
struct PointSpec {
    edge: EdgeId,
    near_dart: usize,
}

/// Execute the full rubber-band pipeline: medial base with the canonical
/// alternating assignment, the full-twist patch when the base is a 2-braid
/// on the sphere, and one two-punctured augmentation per cage edge between
/// the endpoint vertex-faces.
pub fn derived_augmented(cage: &CageGraph, mirror: bool) -> Result<DerivedAugmented, CageError> {
    let cage_map = cage.map();
    let base0 = alternating_assignment(cage, mirror);
    let med = base0.map().clone();

    let two_braid = base0.is_two_braid().unwrap_or(false);
    let (base, patch, relabel, clasp): (
        LinkDiagram,
        Option<PatchNote>,
        Vec<usize>,
        Option<(usize, usize)>,
    ) = if cage_map.declared_genus() == 0 && two_braid {
        let e_star = cage_map.edges()[0];
        let a = e_star.0;
        let b = cage_map.alpha(a);
        // edge-parallel smoothing of the designated crossing
        let crossing = cage_map.medial_vertex(&med, e_star);
        let at = 2 * cage_map.sigma_inv(a) + 1;
        let (smoothed, relabel) = smooth_crossing(&base0, crossing, at)?;
        let smap = smoothed.map();
        // merged arcs: M1 = {R(2 sigma^-1 a), R(2b+1)}, M2 = {R(2 sigma^-1 b), R(2a+1)}
        let m1_ff = relabel[2 * cage_map.sigma_inv(a)];
        let m1_vf = relabel[2 * b + 1];
        let m2_vf = relabel[2 * a + 1];
        let m2_ff = relabel[2 * cage_map.sigma_inv(b)];
        assert_eq!(smap.alpha(m1_ff), m1_vf, "smoothing merges the expected arcs");
        assert_eq!(smap.alpha(m2_ff), m2_vf);
        assert_eq!(smap.face_of(m1_vf), smap.face_of(m2_vf), "vertex faces merged");
        let temp_path = TransversePath {
            segments: vec![
                PathSegment {
                    face: smap.face_of(m1_ff),
                    entry: None,
                    exit: Some([smap.walk_pos_of(m1_ff), 0]),
                },
                PathSegment {
                    face: smap.face_of(m1_vf),
                    entry: Some([smap.walk_pos_of(m1_vf), 0]),
                    exit: Some([smap.walk_pos_of(m2_vf), 0]),
                },
                PathSegment {
                    face: smap.face_of(m2_ff),
                    entry: Some([smap.walk_pos_of(m2_ff), 0]),
                    exit: None,
                },
            ],
        };
        let temp = AugmentedDiagram {
            base: smoothed,
            augs: vec![Augmentation { path: temp_path }],
        };
        let fill = insert_half_twists(&temp, 0, 2)?;
        assert!(!fill.parity.conflict, "the full-twist patch keeps the base alternating");
        let patched = fill.augmented.base;
        let c0 = fill.new_crossings[0].0;
        let c1 = fill.new_crossings[1].0;
        (patched, Some(PatchNote { edge: e_star }), relabel, Some((c0, c1)))
    } else {
        let identity: Vec<usize> = (0..med.dart_count()).collect();
        (base0, None, identity, None)
    };

    let fmap = base.map().clone();
    let r = |d: usize| relabel[d];

    // Gather every augmentation's two points, then assign per-arc along
    // indices by anchor ends.
    let mut specs: Vec<PointSpec> = Vec::new();
    // each path: segments (face, entry point and side dart, exit likewise)
    type Seg = (FaceId, Option<(usize, usize)>, Option<(usize, usize)>);
    let mut paths: Vec<Vec<Seg>> = Vec::new();
    for &e in cage_map.edges() {
        if patch.as_ref().map(|p| p.edge) == Some(e) {
            // Route over the clasp: the split vertex faces flank its two
            // ends and the strand pieces entering the clasp carry the two
            // punctures, anchored at their clasp-side ends. Crossing darts
            // of the clasp: NW = c + 0, SW = +1, SE = +2, NE = +3.
            let (c0, c1) = clasp.unwrap();
            let vf_u = fmap.face_of(c0); // corner before NW of the first crossing
            let vf_v = fmap.face_of(c1 + 2); // corner before SE of the last
            assert_ne!(vf_u, vf_v, "the clasp separates the vertex faces");
            // north route via the NW/NE stub arcs, south via SW/SE
            let route = |d1: usize, d2: usize| -> (FaceId, usize, usize) {
                let z1 = if fmap.face_of(d1) == vf_u { fmap.face_of(fmap.alpha(d1)) } else { fmap.face_of(d1) };
                let z2 = if fmap.face_of(d2) == vf_v { fmap.face_of(fmap.alpha(d2)) } else { fmap.face_of(d2) };
                assert_eq!(z1, z2, "the clasp-side arcs share a face");
                (z1, d1, d2)
            };
            let north = route(c0, c1 + 3);
            let south = route(c0 + 1, c1 + 2);
            let (z, d1, d2) = if north.0 <= south.0 { north } else { south };
            let p1 = specs.len();
            specs.push(PointSpec { edge: fmap.edge_of(d1), near_dart: d1 });
            let p2 = specs.len();
            specs.push(PointSpec { edge: fmap.edge_of(d2), near_dart: d2 });
            let side = |d: usize, f: FaceId| -> usize {
                if fmap.face_of(d) == f {
                    d
                } else {
                    fmap.alpha(d)
                }
            };
            paths.push(vec![
                (vf_u, None, Some((p1, side(d1, vf_u)))),
                (z, Some((p1, side(d1, z))), Some((p2, side(d2, z)))),
                (vf_v, Some((p2, side(d2, vf_v))), None),
            ]);
            continue;
        }
        // Anchors that survive the patch: the odd corner dart before `a`
        // (vertex-face side of the first crossed arc) and the even corner
        // dart of `b` (face-face side of the second).
        let (a, b) = (e.0, cage_map.alpha(e.0));
        let va = r(2 * cage_map.sigma_inv(a) + 1);
        let ff2 = r(2 * b);
        let mid1 = fmap.alpha(va);
        let vb = fmap.alpha(ff2);
        assert_eq!(
            fmap.face_of(mid1),
            fmap.face_of(ff2),
            "the two crossed arcs share a face-face"
        );
        let p1 = specs.len();
        specs.push(PointSpec { edge: fmap.edge_of(va), near_dart: va });
        let p2 = specs.len();
        specs.push(PointSpec { edge: fmap.edge_of(ff2), near_dart: ff2 });
        paths.push(vec![
            (fmap.face_of(va), None, Some((p1, va))),
            (fmap.face_of(mid1), Some((p1, mid1)), Some((p2, ff2))),
            (fmap.face_of(vb), Some((p2, vb)), None),
        ]);
    }

    // Along assignment: points anchored at an arc's minimum-dart end come
    // first, in spec order; points at the other end follow in reverse.
    let mut per_edge: std::collections::BTreeMap<EdgeId, Vec<usize>> = Default::default();
    for (i, s) in specs.iter().enumerate() {
        per_edge.entry(s.edge).or_default().push(i);
    }
    let mut point_t = vec![0usize; specs.len()];
    let mut edge_k: std::collections::BTreeMap<EdgeId, usize> = Default::default();
    for (&e, ids) in &per_edge {
        let mut at_min: Vec<usize> = ids.iter().copied().filter(|&i| specs[i].near_dart == e.0).collect();
        let mut at_max: Vec<usize> = ids.iter().copied().filter(|&i| specs[i].near_dart != e.0).collect();
        at_max.reverse();
        at_min.extend(at_max);
        for (t, &i) in at_min.iter().enumerate() {
            point_t[i] = t;
        }
        edge_k.insert(e, ids.len());
    }
    let coord = |spec: usize, dart: usize| -> [usize; 2] {
        let s = &specs[spec];
        let k = edge_k[&s.edge];
        let t = point_t[spec];
        let along = if dart == s.edge.0 { t } else { k - 1 - t };
        [fmap.walk_pos_of(dart), along]
    };

    let mut augs = Vec::new();
    for segs in &paths {
        let mut out = Vec::new();
        for &(face, entry, exit) in segs {
            let to_coord = |p: Option<(usize, usize)>| -> Option<[usize; 2]> {
                p.map(|(spec, dart)| {
                    debug_assert_eq!(fmap.face_of(dart), face);
                    coord(spec, dart)
                })
            };
            out.push(PathSegment { face, entry: to_coord(entry), exit: to_coord(exit) });
        }
        augs.push(Augmentation { path: TransversePath { segments: out } });
    }

    let augmented = AugmentedDiagram { base, augs };
    Ok(DerivedAugmented { augmented, two_braid_patch: patch, mirrored: mirror })
}

/// Certify the derived augmented diagram of a cage.
pub fn certify_cage(cage: &CageGraph, mirror: bool) -> Result<(DerivedAugmented, HyperbolicityCertificate), CageError> {
    let derived = derived_augmented(cage, mirror)?;
    let cert = certify_hyperbolic(&derived.augmented);
    Ok((derived, cert))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundCase {
    ChiTwo,
    ChiZero,
    ChiNegative,
}

/// Explicit volume bounds for the rubber band link of a cage graph.
#[derive(Clone, Debug, Serialize)]
pub struct VolumeBounds {
    pub case: BoundCase,
    pub epsilon: usize,
    pub chi: i64,
    pub lower: f64,
    pub lower_strict: bool,
    pub upper: f64,
}

pub fn volume_bounds(cage: &CageGraph) -> VolumeBounds {
    let eps = cage.edge_count();
    let chi = cage.euler();
    let e = eps as f64;
    match chi {
        2 => VolumeBounds {
            case: BoundCase::ChiTwo,
            epsilon: eps,
            chi,
            lower: 2.0 * (e - 1.0) * V_OCT,
            lower_strict: false,
            upper: 10.0 * (e - 1.0) * V_TET,
        },
        0 => VolumeBounds {
            case: BoundCase::ChiZero,
            epsilon: eps,
            chi,
            lower: 2.0 * e * V_OCT,
            lower_strict: false,
            upper: 10.0 * e * V_TET,
        },
        _ => VolumeBounds {
            case: BoundCase::ChiNegative,
            epsilon: eps,
            chi,
            lower: V_OCT / 2.0 * (e - 3.0 * chi as f64),
            lower_strict: true,
            upper: 6.0 * e * V_OCT,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::curve::validate_paths;

    #[test]
    fn cage_validation() {
        // theta graph: parallel edges
        let item = validate_cage(&corpus::theta());
        assert_eq!(item.name, "cage_no_parallel_edges");
        // path graph: leaf gives a 1-intersection circle
        let item = validate_cage(&corpus::path_graph(3));
        assert_eq!(item.name, "cage_no_one_intersection_circle");
        // torus grid passes
        assert!(validate_cage(&corpus::torus_grid(3, 3)).passed());
        // K4, C3 pass
        assert!(validate_cage(&corpus::k4()).passed());
        assert!(validate_cage(&corpus::cycle_graph(3)).passed());
    }

    #[test]
    fn rubber_band_counts() {
        let grid = CageGraph::new(corpus::torus_grid(3, 3)).unwrap();
        let r = rubber_band_link(&grid);
        assert_eq!(r.vertex_components.len(), 9);
        assert_eq!(r.edge_components.len(), 18);
        let k4 = CageGraph::new(corpus::k4()).unwrap();
        let r = rubber_band_link(&k4);
        assert_eq!(r.vertex_components.len(), 4);
        assert_eq!(r.edge_components.len(), 6);
        let c3 = CageGraph::new(corpus::cycle_graph(3)).unwrap();
        let r = rubber_band_link(&c3);
        assert_eq!(r.vertex_components.len(), 3);
        assert_eq!(r.edge_components.len(), 3);
    }

    #[test]
    fn derived_augmented_torus_grid() {
        let grid = CageGraph::new(corpus::torus_grid(3, 3)).unwrap();
        let d = derived_augmented(&grid, false).unwrap();
        assert!(d.two_braid_patch.is_none());
        assert_eq!(d.augmented.base.crossing_count(), 18);
        assert_eq!(d.augmented.augs.len(), 18);
        assert!(d.augmented.base.is_alternating());
        let info = validate_paths(
            d.augmented.base.map(),
            &d.augmented.augs.iter().map(|a| a.path.clone()).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(info.punctures.iter().all(|p| p.len() == 2));
        let cert = certify_hyperbolic(&d.augmented);
        assert!(cert.overall, "{cert:?}");
    }

    #[test]
    fn derived_augmented_k4() {
        let k4 = CageGraph::new(corpus::k4()).unwrap();
        let d = derived_augmented(&k4, false).unwrap();
        assert!(d.two_braid_patch.is_none());
        assert_eq!(d.augmented.base.crossing_count(), 6);
        assert_eq!(d.augmented.augs.len(), 6);
        // no parallel edges and min degree 3: no bigons, twist number = edges
        assert_eq!(d.augmented.base.twist_number(), 6);
        let cert = certify_hyperbolic(&d.augmented);
        assert!(cert.overall, "{cert:?}");
    }

    #[test]
    fn derived_augmented_c3_patches() {
        let c3 = CageGraph::new(corpus::cycle_graph(3)).unwrap();
        let med = alternating_assignment(&c3, false);
        assert_eq!(med.is_two_braid(), Ok(true), "the C3 medial is the 2-braid trefoil");
        let d = derived_augmented(&c3, false).unwrap();
        assert!(d.two_braid_patch.is_some());
        assert_eq!(d.augmented.base.crossing_count(), 4);
        assert!(d.augmented.base.is_alternating());
        assert_eq!(d.augmented.base.is_two_braid(), Ok(false));
        assert_eq!(d.augmented.augs.len(), 3);
        let cert = certify_hyperbolic(&d.augmented);
        assert!(cert.overall, "{cert:?}");
    }

    #[test]
    fn volume_bound_values() {
        let k4 = CageGraph::new(corpus::k4()).unwrap();
        let b = volume_bounds(&k4);
        assert_eq!(b.case, BoundCase::ChiTwo);
        assert!((b.lower - 10.0 * V_OCT).abs() < 1e-9);
        assert!((b.upper - 50.0 * V_TET).abs() < 1e-9);
        assert!(!b.lower_strict);

        let grid = CageGraph::new(corpus::torus_grid(3, 3)).unwrap();
        let b = volume_bounds(&grid);
        assert_eq!(b.case, BoundCase::ChiZero);
        assert!((b.lower - 36.0 * V_OCT).abs() < 1e-9);
        assert!((b.upper - 180.0 * V_TET).abs() < 1e-9);

        let g2 = CageGraph::new(corpus::genus2_cage_eps8()).unwrap();
        let b = volume_bounds(&g2);
        assert_eq!(b.case, BoundCase::ChiNegative);
        assert_eq!(b.epsilon, 8);
        assert_eq!(b.chi, -2);
        assert!((b.lower - 7.0 * V_OCT).abs() < 1e-9);
        assert!((b.upper - 48.0 * V_OCT).abs() < 1e-9);
        assert!(b.lower_strict);
    }

    #[test]
    fn bounds_ordered_on_corpus() {
        for (name, map) in corpus::cage_corpus() {
            let cage = CageGraph::new(map).expect(&name);
            let b = volume_bounds(&cage);
            assert!(b.lower < b.upper, "{name}: {b:?}");
        }
    }
}
