//! Combinatorial maps: graphs cellularly embedded in closed orientable
//! surfaces, encoded as a rotation permutation `sigma` and an edge
//! involution `alpha` on a contiguous set of darts.
//!
//! Vertices are the orbits of `sigma`, edges the orbits of `alpha`, and
//! faces the orbits of `phi = sigma . alpha`. The derived genus comes out
//! of the Euler formula `V - E + F = 2 - 2g`; a map is cellular on its
//! declared surface exactly when derived and declared genus agree.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertex handle: the minimum dart id on the vertex's `sigma` orbit.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

/// Edge handle: the minimum of the two darts swapped by `alpha`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

/// Face handle: the minimum dart id on the face's `phi` orbit.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FaceId(pub usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("sigma and alpha must be permutations of the same dart range (lengths {0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("sigma is not a permutation: image {0} out of range or repeated")]
    NotPermutation(usize),
    #[error("alpha is not an involution at dart {0}")]
    NotInvolution(usize),
    #[error("alpha has a fixed point at dart {0}")]
    HasFixedPoint(usize),
    #[error("the map is not connected (dart {0} unreachable from dart 0)")]
    NotConnected(usize),
    #[error("Euler formula gives a non-integer or negative genus (V={v}, E={e}, F={f})")]
    GenusNegative { v: usize, e: usize, f: usize },
}

#[derive(Clone, Debug)]
pub struct VertexData {
    pub rep: usize,
    /// Darts around the vertex in sigma (counterclockwise) order, starting
    /// at the minimum dart.
    pub cycle: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct FaceData {
    pub rep: usize,
    /// Boundary walk: `walk[i+1] = phi(walk[i])`, starting at the minimum
    /// dart of the orbit. Step `i` traverses `edge(walk[i])` from
    /// `vertex(walk[i])` to `vertex(alpha(walk[i]))`.
    pub walk: Vec<usize>,
}

/// A connected graph cellularly embedded in a closed orientable surface.
///
/// Immutable after construction; all derived data (vertices, edges, faces,
/// genus) is precomputed by [`SurfaceMap::build`].
///
/// The empty map (zero darts) is admitted as the projection of a
/// crossingless diagram on the sphere: it has one (empty) face and derived
/// genus 0 by convention.
#[derive(Clone, Debug)]
pub struct SurfaceMap {
    sigma: Vec<usize>,
    alpha: Vec<usize>,
    sigma_inv: Vec<usize>,
    declared_genus: usize,
    derived_genus: usize,
    vertices: Vec<VertexData>,
    faces: Vec<FaceData>,
    edges: Vec<EdgeId>,
    vertex_rep: Vec<usize>,
    face_rep: Vec<usize>,
    /// Position of each dart on its face walk.
    walk_pos: Vec<usize>,
}

impl SurfaceMap {
    /// Validate `sigma`/`alpha` and derive all orbit structure.
    pub fn build(sigma: Vec<usize>, alpha: Vec<usize>, declared_genus: usize) -> Result<Self, MapError> {
        if sigma.len() != alpha.len() {
            return Err(MapError::LengthMismatch(sigma.len(), alpha.len()));
        }
        let n = sigma.len();
        let mut seen = vec![false; n];
        for &s in &sigma {
            if s >= n || seen[s] {
                return Err(MapError::NotPermutation(s));
            }
            seen[s] = true;
        }
        for d in 0..n {
            if alpha[d] >= n {
                return Err(MapError::NotPermutation(alpha[d]));
            }
            if alpha[d] == d {
                return Err(MapError::HasFixedPoint(d));
            }
            if alpha[alpha[d]] != d {
                return Err(MapError::NotInvolution(d));
            }
        }
        if n > 0 {
            // Connectivity under the group generated by sigma and alpha.
            let mut reach = vec![false; n];
            let mut stack = vec![0usize];
            reach[0] = true;
            while let Some(d) = stack.pop() {
                for nd in [sigma[d], alpha[d]] {
                    if !reach[nd] {
                        reach[nd] = true;
                        stack.push(nd);
                    }
                }
            }
            if let Some(d) = (0..n).find(|&d| !reach[d]) {
                return Err(MapError::NotConnected(d));
            }
        }

        let mut sigma_inv = vec![0usize; n];
        for d in 0..n {
            sigma_inv[sigma[d]] = d;
        }

        let (vertices, vertex_rep) = orbits(&sigma);
        let phi: Vec<usize> = (0..n).map(|d| sigma[alpha[d]]).collect();
        let (face_orbits, face_rep) = orbits(&phi);
        let mut walk_pos = vec![0usize; n];
        for f in &face_orbits {
            for (i, &d) in f.cycle.iter().enumerate() {
                walk_pos[d] = i;
            }
        }
        let edges: Vec<EdgeId> = (0..n).filter(|&d| d < alpha[d]).map(EdgeId).collect();

        let (v, e) = (vertices.len(), edges.len());
        let faces: Vec<FaceData> = if n == 0 {
            vec![FaceData { rep: 0, walk: Vec::new() }]
        } else {
            face_orbits.into_iter().map(|o| FaceData { rep: o.rep, walk: o.cycle }).collect()
        };
        let f = if n == 0 { 0 } else { faces.len() };
        let derived_genus = if n == 0 {
            0
        } else {
            let chi = v as i64 - e as i64 + f as i64;
            let two_g = 2 - chi;
            if two_g < 0 || two_g % 2 != 0 {
                return Err(MapError::GenusNegative { v, e, f });
            }
            (two_g / 2) as usize
        };

        Ok(SurfaceMap {
            sigma,
            alpha,
            sigma_inv,
            declared_genus,
            derived_genus,
            vertices: vertices
                .into_iter()
                .map(|o| VertexData { rep: o.rep, cycle: o.cycle })
                .collect(),
            faces,
            edges,
            vertex_rep,
            face_rep,
            walk_pos,
        })
    }

    pub fn dart_count(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn sigma(&self, d: usize) -> usize {
        self.sigma[d]
    }

    pub fn sigma_inv(&self, d: usize) -> usize {
        self.sigma_inv[d]
    }

    pub fn alpha(&self, d: usize) -> usize {
        self.alpha[d]
    }

    /// Face successor `phi = sigma . alpha`.
    pub fn phi(&self, d: usize) -> usize {
        self.sigma[self.alpha[d]]
    }

    pub fn sigma_perm(&self) -> &[usize] {
        &self.sigma
    }

    pub fn alpha_perm(&self) -> &[usize] {
        &self.alpha
    }

    pub fn declared_genus(&self) -> usize {
        self.declared_genus
    }

    pub fn derived_genus(&self) -> usize {
        self.derived_genus
    }

    /// Euler characteristic of the derived surface.
    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.derived_genus as i64
    }

    /// The rotation system always describes a cellular embedding in the
    /// surface of its derived genus, so cellularity on the intended surface
    /// is exactly genus agreement.
    pub fn is_cellular_on(&self) -> bool {
        self.derived_genus == self.declared_genus
    }

    pub fn vertices(&self) -> &[VertexData] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_of(&self, d: usize) -> VertexId {
        VertexId(self.vertex_rep[d])
    }

    pub fn vertex_cycle(&self, v: VertexId) -> &[usize] {
        let i = self.vertices.binary_search_by_key(&v.0, |x| x.rep).expect("vertex id");
        &self.vertices[i].cycle
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.vertex_cycle(v).len()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_of(&self, d: usize) -> EdgeId {
        EdgeId(d.min(self.alpha[d]))
    }

    /// The two darts of an edge, minimum first.
    pub fn edge_darts(&self, e: EdgeId) -> (usize, usize) {
        (e.0, self.alpha[e.0])
    }

    pub fn edge_endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        (self.vertex_of(e.0), self.vertex_of(self.alpha[e.0]))
    }

    pub fn faces(&self) -> &[FaceData] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_of(&self, d: usize) -> FaceId {
        FaceId(self.face_rep[d])
    }

    pub fn face_ids(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.faces.iter().map(|f| FaceId(f.rep))
    }

    pub fn face_walk(&self, f: FaceId) -> &[usize] {
        let i = self.faces.binary_search_by_key(&f.0, |x| x.rep).expect("face id");
        &self.faces[i].walk
    }

    /// Position of a dart on its own face walk.
    pub fn walk_pos_of(&self, d: usize) -> usize {
        self.walk_pos[d]
    }

    /// One adjacency record per edge of the map: the faces on the two sides
    /// (possibly equal, a self-adjacency).
    pub fn face_adjacency(&self) -> Vec<(EdgeId, FaceId, FaceId)> {
        self.edges
            .iter()
            .map(|&e| (e, self.face_of(e.0), self.face_of(self.alpha[e.0])))
            .collect()
    }

    /// Whether two faces share an edge.
    pub fn faces_adjacent(&self, a: FaceId, b: FaceId) -> bool {
        self.edges.iter().any(|&e| {
            let (f1, f2) = (self.face_of(e.0), self.face_of(self.alpha[e.0]));
            (f1 == a && f2 == b) || (f1 == b && f2 == a)
        })
    }

    /// Medial map: one 4-valent vertex per edge of `self`, with an arc for
    /// every corner joining consecutive edge-ends around each vertex.
    ///
    /// Dart `d` of the input yields medial darts `2d` (the end of the
    /// corner-arc `(d, sigma d)` at the midpoint of `edge(d)`) and `2d + 1`
    /// (its end at the midpoint of `edge(sigma d)`). Faces of the result
    /// split into vertex-faces (all darts odd) and face-faces (all even);
    /// the derived genus is preserved and the result is declared on it.
    pub fn medial(&self) -> SurfaceMap {
        let n = self.dart_count();
        let mut sigma = vec![0usize; 2 * n];
        let mut alpha = vec![0usize; 2 * n];
        for d in 0..n {
            sigma[2 * d] = 2 * self.sigma_inv[d] + 1;
            sigma[2 * d + 1] = 2 * self.alpha[self.sigma[d]];
            alpha[2 * d] = 2 * d + 1;
            alpha[2 * d + 1] = 2 * d;
        }
        SurfaceMap::build(sigma, alpha, self.derived_genus)
            .expect("medial of a valid map is a valid map")
    }

    /// Medial vertex sitting on the given input edge.
    pub fn medial_vertex(&self, medial: &SurfaceMap, e: EdgeId) -> VertexId {
        medial.vertex_of(2 * e.0)
    }

    /// Vertex-face of the medial corresponding to an input vertex: the face
    /// whose walk consists of the odd darts `2x + 1` for `x` around `v`.
    pub fn medial_vertex_face(&self, medial: &SurfaceMap, v: VertexId) -> FaceId {
        medial.face_of(2 * v.0 + 1)
    }

    /// Face-face of the medial corresponding to an input face.
    pub fn medial_face_face(&self, medial: &SurfaceMap, f: FaceId) -> FaceId {
        // Face f's walk contains dart d; the corresponding face-face orbit
        // (even darts under d -> alpha(sigma(d))) is conjugate via alpha.
        medial.face_of(2 * self.alpha[f.0])
    }

    /// Relabel darts by a permutation `relabel[old] = new`. Used by
    /// canonicalization; the permutation must be a bijection.
    pub fn relabeled(&self, relabel: &[usize]) -> SurfaceMap {
        let n = self.dart_count();
        let mut sigma = vec![0usize; n];
        let mut alpha = vec![0usize; n];
        for d in 0..n {
            sigma[relabel[d]] = relabel[self.sigma[d]];
            alpha[relabel[d]] = relabel[self.alpha[d]];
        }
        SurfaceMap::build(sigma, alpha, self.declared_genus).expect("relabeling preserves validity")
    }
}

struct Orbit {
    rep: usize,
    cycle: Vec<usize>,
}

/// Orbits of a permutation, each cycle starting at its minimum element,
/// listed in order of minimum element. Also returns the per-dart orbit
/// representative.
fn orbits(perm: &[usize]) -> (Vec<Orbit>, Vec<usize>) {
    let n = perm.len();
    let mut rep = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if rep[start] != usize::MAX {
            continue;
        }
        let mut cycle = Vec::new();
        let mut d = start;
        loop {
            rep[d] = start;
            cycle.push(d);
            d = perm[d];
            if d == start {
                break;
            }
        }
        out.push(Orbit { rep: start, cycle });
    }
    (out, rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn theta_graph_counts() {
        let m = corpus::theta();
        assert_eq!(m.vertex_count(), 2);
        assert_eq!(m.edge_count(), 3);
        assert_eq!(m.face_count(), 3);
        assert_eq!(m.derived_genus(), 0);
        assert!(m.is_cellular_on());
        for f in m.faces() {
            assert_eq!(f.walk.len(), 2);
        }
        // face_adjacency forms a triangle with doubled links
        let adj = m.face_adjacency();
        assert_eq!(adj.len(), 3);
        for (_, a, b) in adj {
            assert_ne!(a, b);
        }
    }

    #[test]
    fn theta_declared_genus_mismatch() {
        let m = SurfaceMap::build(
            corpus::theta().sigma_perm().to_vec(),
            corpus::theta().alpha_perm().to_vec(),
            1,
        )
        .unwrap();
        assert!(!m.is_cellular_on());
        assert_eq!(m.derived_genus(), 0);
    }

    #[test]
    fn torus_bouquet_interleaved() {
        // one vertex, two interleaved loops: rotation a b a' b'
        let sigma = vec![1, 2, 3, 0];
        let alpha = vec![2, 3, 0, 1];
        let m = SurfaceMap::build(sigma, alpha, 1).unwrap();
        assert_eq!(m.vertex_count(), 1);
        assert_eq!(m.edge_count(), 2);
        assert_eq!(m.face_count(), 1);
        assert_eq!(m.derived_genus(), 1);
        assert!(m.is_cellular_on());
        assert_eq!(m.faces()[0].walk.len(), 4);
        // both edges are self-adjacencies
        for (_, a, b) in m.face_adjacency() {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn planar_bouquet_nested() {
        // one vertex, two nested loops: rotation a a' b b'
        let sigma = vec![1, 2, 3, 0];
        let alpha = vec![1, 0, 3, 2];
        let m = SurfaceMap::build(sigma, alpha, 0).unwrap();
        assert_eq!(m.vertex_count(), 1);
        assert_eq!(m.edge_count(), 2);
        assert_eq!(m.face_count(), 3);
        assert_eq!(m.derived_genus(), 0);
    }

    #[test]
    fn single_planar_loop() {
        let m = SurfaceMap::build(vec![1, 0], vec![1, 0], 0).unwrap();
        assert_eq!(m.vertex_count(), 1);
        assert_eq!(m.edge_count(), 1);
        assert_eq!(m.face_count(), 2);
        for f in m.faces() {
            assert_eq!(f.walk.len(), 1);
        }
        let adj = m.face_adjacency();
        assert_eq!(adj.len(), 1);
        assert_ne!(adj[0].1, adj[0].2);
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            SurfaceMap::build(vec![0, 1], vec![0, 1], 0).err(),
            Some(MapError::HasFixedPoint(0))
        );
        assert_eq!(
            SurfaceMap::build(vec![0, 1, 2, 3], vec![1, 2, 3, 0], 0).err(),
            Some(MapError::NotInvolution(0))
        );
        // two disjoint loops
        assert_eq!(
            SurfaceMap::build(vec![1, 0, 3, 2], vec![1, 0, 3, 2], 0).err(),
            Some(MapError::NotConnected(2))
        );
        assert!(SurfaceMap::build(vec![2, 0], vec![1, 0], 0).is_err());
    }

    #[test]
    fn empty_map_convention() {
        let m = SurfaceMap::build(vec![], vec![], 0).unwrap();
        assert!(m.is_empty());
        assert_eq!(m.derived_genus(), 0);
        assert!(m.is_cellular_on());
        assert_eq!(m.faces().len(), 1);
        assert!(m.faces()[0].walk.is_empty());
    }

    #[test]
    fn medial_theta() {
        let m = corpus::theta();
        let med = m.medial();
        assert_eq!(med.vertex_count(), 3);
        assert_eq!(med.edge_count(), 6);
        assert_eq!(med.face_count(), 5);
        assert_eq!(med.derived_genus(), 0);
        medial_face_split_checks(&m, &med);
    }

    #[test]
    fn medial_c4() {
        let m = corpus::cycle_graph(4);
        let med = m.medial();
        assert_eq!(med.vertex_count(), 4);
        assert_eq!(med.edge_count(), 8);
        assert_eq!(med.face_count(), 6);
        assert_eq!(med.derived_genus(), 0);
        medial_face_split_checks(&m, &med);
    }

    #[test]
    fn medial_torus_grid() {
        let m = corpus::torus_grid(3, 3);
        assert_eq!(m.vertex_count(), 9);
        assert_eq!(m.edge_count(), 18);
        assert_eq!(m.face_count(), 9);
        assert_eq!(m.derived_genus(), 1);
        let med = m.medial();
        assert_eq!(med.vertex_count(), 18);
        assert_eq!(med.edge_count(), 36);
        assert_eq!(med.face_count(), 18);
        assert_eq!(med.derived_genus(), 1);
        medial_face_split_checks(&m, &med);
    }

    /// Faces of a medial partition into vertex-faces (odd darts) and
    /// face-faces (even darts), matching V and F of the input; vertex-faces
    /// are never mutually adjacent.
    fn medial_face_split_checks(m: &SurfaceMap, med: &SurfaceMap) {
        let mut vertex_faces = 0;
        let mut face_faces = 0;
        for f in med.faces() {
            if f.walk.iter().all(|d| d % 2 == 1) {
                vertex_faces += 1;
            } else if f.walk.iter().all(|d| d % 2 == 0) {
                face_faces += 1;
            } else {
                panic!("medial face mixes vertex-side and face-side darts");
            }
        }
        assert_eq!(vertex_faces, m.vertex_count());
        assert_eq!(face_faces, m.face_count());
        for (_, a, b) in med.face_adjacency() {
            let a_vf = med.face_walk(a)[0] % 2 == 1;
            let b_vf = med.face_walk(b)[0] % 2 == 1;
            assert!(!(a_vf && b_vf), "vertex-faces adjacent");
        }
        // correspondence helpers land on the right classes
        for v in m.vertices() {
            let vf = m.medial_vertex_face(med, VertexId(v.rep));
            assert!(med.face_walk(vf).iter().all(|d| d % 2 == 1));
            assert_eq!(med.face_walk(vf).len(), v.cycle.len());
        }
        for f in m.faces() {
            let ff = m.medial_face_face(med, FaceId(f.rep));
            assert!(med.face_walk(ff).iter().all(|d| d % 2 == 0));
            assert_eq!(med.face_walk(ff).len(), f.walk.len());
        }
    }

    #[test]
    fn rederivation_is_deterministic() {
        let m = corpus::torus_grid(3, 4);
        let m2 = SurfaceMap::build(m.sigma_perm().to_vec(), m.alpha_perm().to_vec(), 1).unwrap();
        let f1: Vec<_> = m.faces().iter().map(|f| f.walk.clone()).collect();
        let f2: Vec<_> = m2.faces().iter().map(|f| f.walk.clone()).collect();
        assert_eq!(f1, f2);
    }
}
