//! Fixed maps, diagrams and cages used across tests, the acceptance suite
//! and the CLI corpus generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::augment::{Augmentation, AugmentedDiagram};
use crate::cage::{alternating_assignment, validate_cage, CageGraph};
use crate::curve::{PathSegment, TransversePath};
use crate::diagram::LinkDiagram;
use crate::embroidery::{braid_tangle, Tangle};
use crate::map::{FaceId, SurfaceMap};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Theta graph: two vertices joined by three parallel edges, planar.
pub fn theta() -> SurfaceMap {
    let sigma = vec![2, 5, 4, 1, 0, 3];
    let alpha = vec![1, 0, 3, 2, 5, 4];
    SurfaceMap::build(sigma, alpha, 0).unwrap()
}

/// Path graph on n vertices (n = 2 or 3); has leaves.
pub fn path_graph(n: usize) -> SurfaceMap {
    match n {
        2 => SurfaceMap::build(vec![0, 1], vec![1, 0], 0).unwrap(),
        3 => SurfaceMap::build(vec![0, 2, 1, 3], vec![1, 0, 3, 2], 0).unwrap(),
        _ => panic!("only tiny paths are needed"),
    }
}

/// Cycle graph C_n embedded in the sphere.
pub fn cycle_graph(n: usize) -> SurfaceMap {
    assert!(n >= 3);
    let mut sigma = vec![0; 2 * n];
    let mut alpha = vec![0; 2 * n];
    for i in 0..n {
        sigma[2 * i] = 2 * i + 1;
        sigma[2 * i + 1] = 2 * i;
        let j = (i + 1) % n;
        alpha[2 * i] = 2 * j + 1;
        alpha[2 * j + 1] = 2 * i;
    }
    SurfaceMap::build(sigma, alpha, 0).unwrap()
}

/// r x c grid on the torus (r, c >= 3 keeps it simple).
pub fn torus_grid(r: usize, c: usize) -> SurfaceMap {
    assert!(r >= 3 && c >= 3);
    let v = |i: usize, j: usize| (i % r) * c + (j % c);
    let n = r * c;
    let mut sigma = vec![0; 4 * n];
    let mut alpha = vec![0; 4 * n];
    // darts per vertex: east, north, west, south (counterclockwise)
    for i in 0..r {
        for j in 0..c {
            let b = 4 * v(i, j);
            sigma[b] = b + 1;
            sigma[b + 1] = b + 2;
            sigma[b + 2] = b + 3;
            sigma[b + 3] = b;
            let east = 4 * v(i, j + 1) + 2;
            alpha[b] = east;
            alpha[east] = b;
            let north = 4 * v(i + 1, j) + 3;
            alpha[b + 1] = north;
            alpha[north] = b + 1;
        }
    }
    SurfaceMap::build(sigma, alpha, 1).unwrap()
}

/// K4 in the sphere: outer triangle with a central vertex.
pub fn k4() -> SurfaceMap {
    let sigma = vec![6, 2, 8, 4, 10, 0, 5, 9, 1, 11, 3, 7];
    let alpha = vec![1, 0, 3, 2, 5, 4, 7, 6, 9, 8, 11, 10];
    SurfaceMap::build(sigma, alpha, 0).unwrap()
}

/// Triangular prism in the sphere.
pub fn prism() -> SurfaceMap {
    let mut sigma = vec![0; 18];
    for cyc in [
        vec![0, 12, 5],
        vec![2, 14, 1],
        vec![4, 16, 3],
        vec![6, 11, 13],
        vec![8, 7, 15],
        vec![17, 10, 9],
    ] {
        for i in 0..cyc.len() {
            sigma[cyc[i]] = cyc[(i + 1) % cyc.len()];
        }
    }
    let alpha: Vec<usize> = (0..18).map(|d| d ^ 1).collect();
    SurfaceMap::build(sigma, alpha, 0).unwrap()
}

/// Wheel on four rim vertices in the sphere.
pub fn wheel4() -> SurfaceMap {
    let mut sigma = vec![0; 16];
    for cyc in [
        vec![8, 10, 12, 14],
        vec![0, 9, 7],
        vec![2, 11, 1],
        vec![4, 13, 3],
        vec![6, 15, 5],
    ] {
        for i in 0..cyc.len() {
            sigma[cyc[i]] = cyc[(i + 1) % cyc.len()];
        }
    }
    let alpha: Vec<usize> = (0..16).map(|d| d ^ 1).collect();
    SurfaceMap::build(sigma, alpha, 0).unwrap()
}

/// One crossing on the torus: a single vertex with two interleaved loops.
/// Its single face touches itself across both edges.
pub fn one_crossing_torus() -> LinkDiagram {
    let map = SurfaceMap::build(vec![1, 2, 3, 0], vec![2, 3, 0, 1], 1).unwrap();
    LinkDiagram::new(map, vec![true]).unwrap()
}

/// Closure of an alternating braid word (generator j positive for odd j).
/// Every position 1..=strands must be touched by some letter.
pub fn braid_closure_alternating(word: &[usize], strands: usize) -> LinkDiagram {
    let w = strands;
    assert!(word.iter().all(|&j| j >= 1 && j < w));
    let mut sigma = Vec::new();
    let mut alpha: Vec<usize> = Vec::new();
    let mut over = Vec::new();
    let mut pending: Vec<Option<usize>> = vec![None; w + 1];
    let mut tops: Vec<Option<usize>> = vec![None; w + 1];
    for (r, &j) in word.iter().enumerate() {
        let b = 4 * r;
        sigma.extend([b + 1, b + 2, b + 3, b]);
        alpha.extend([b, b + 1, b + 2, b + 3]);
        match pending[j] {
            Some(d) => {
                alpha[d] = b;
                alpha[b] = d;
            }
            None => tops[j] = Some(b),
        }
        match pending[j + 1] {
            Some(d) => {
                alpha[d] = b + 3;
                alpha[b + 3] = d;
            }
            None => tops[j + 1] = Some(b + 3),
        }
        pending[j] = Some(b + 1);
        pending[j + 1] = Some(b + 2);
        over.push(j % 2 == 1);
    }
    for p in 1..=w {
        let (t, bt) = (tops[p].expect("every strand crossed"), pending[p].unwrap());
        alpha[t] = bt;
        alpha[bt] = t;
    }
    let map = SurfaceMap::build(sigma, alpha, 0).unwrap();
    LinkDiagram::new(map, over).unwrap()
}

/// The standard (2, n) torus link diagram.
pub fn standard_two_braid(n: usize) -> LinkDiagram {
    braid_closure_alternating(&vec![1; n], 2)
}

pub fn trefoil() -> LinkDiagram {
    standard_two_braid(3)
}

pub fn figure_eight() -> LinkDiagram {
    braid_closure_alternating(&[1, 2, 1, 2], 3)
}

/// The 6_2 knot as an alternating 3-braid closure.
pub fn six_two() -> LinkDiagram {
    braid_closure_alternating(&[1, 1, 1, 2, 1, 2], 3)
}

/// Trefoil with one extra reducible kink on the edge of dart 0.
pub fn kinked_trefoil() -> LinkDiagram {
    let t = trefoil();
    let map = t.map();
    let (d, ad) = (0usize, map.alpha(0));
    let mut sigma = map.sigma_perm().to_vec();
    let mut alpha = map.alpha_perm().to_vec();
    let b = sigma.len();
    // cycle (in, loop1, loop2, out)
    sigma.extend([b + 1, b + 2, b + 3, b]);
    alpha.extend([b, b + 1, b + 2, b + 3]);
    alpha[d] = b;
    alpha[b] = d;
    alpha[ad] = b + 3;
    alpha[b + 3] = ad;
    alpha[b + 1] = b + 2;
    alpha[b + 2] = b + 1;
    let new_map = SurfaceMap::build(sigma, alpha, 0).unwrap();
    let mut over = Vec::new();
    for v in new_map.vertices() {
        if v.rep < b {
            over.push(t.over_flags()[t.crossing_index(t.map().vertex_of(v.rep))]);
        } else {
            over.push(!t.is_over(d));
        }
    }
    LinkDiagram::new(new_map, over).unwrap()
}

/// Connected sum of two trefoils along the edges of dart 0 in each factor.
pub fn trefoil_connect_sum() -> LinkDiagram {
    let t = trefoil();
    let n = t.map().dart_count();
    let mut sigma = t.map().sigma_perm().to_vec();
    let mut alpha = t.map().alpha_perm().to_vec();
    sigma.extend(t.map().sigma_perm().iter().map(|&x| x + n));
    alpha.extend(t.map().alpha_perm().iter().map(|&x| x + n));
    let (d1, a1) = (0usize, t.map().alpha(0));
    let (d2, a2) = (n, t.map().alpha(0) + n);
    // splice the strands: d1 ~ a2, d2 ~ a1
    alpha[d1] = a2;
    alpha[a2] = d1;
    alpha[d2] = a1;
    alpha[a1] = d2;
    let map = SurfaceMap::build(sigma, alpha, 0).unwrap();
    let mut over: Vec<bool> = Vec::new();
    for v in map.vertices() {
        let local = v.rep % n;
        over.push(t.over_flags()[t.crossing_index(t.map().vertex_of(local))]);
    }
    let d = LinkDiagram::new(map, over).unwrap();
    debug_assert!(d.is_alternating());
    d
}

/// An augmentation through a bigon face: the disk encircles the two strands
/// of the twist region there.
pub fn bigon_augmentation(diagram: &LinkDiagram, bigon: FaceId) -> Augmentation {
    let map = diagram.map();
    let walk = map.face_walk(bigon);
    assert_eq!(walk.len(), 2, "augmentation site must be a bigon");
    let (w0, w1) = (walk[0], walk[1]);
    let (f1, f2) = (map.face_of(map.alpha(w1)), map.face_of(map.alpha(w0)));
    assert_ne!(f1, f2);
    let path = TransversePath {
        segments: vec![
            PathSegment {
                face: f1,
                entry: None,
                exit: Some([map.walk_pos_of(map.alpha(w1)), 0]),
            },
            PathSegment {
                face: bigon,
                entry: Some([map.walk_pos_of(w1), 0]),
                exit: Some([map.walk_pos_of(w0), 0]),
            },
            PathSegment {
                face: f2,
                entry: Some([map.walk_pos_of(map.alpha(w0)), 0]),
                exit: None,
            },
        ],
    };
    Augmentation { path }
}

/// Figure-eight diagram with one valid augmentation around a twist region.
pub fn figure_eight_augmented() -> AugmentedDiagram {
    let base = figure_eight();
    let bigon = base
        .map()
        .faces()
        .iter()
        .find(|f| f.walk.len() == 2)
        .map(|f| FaceId(f.rep))
        .expect("the figure eight has bigons");
    let aug = bigon_augmentation(&base, bigon);
    AugmentedDiagram { base, augs: vec![aug] }
}

/// Medial of the torus grid with the canonical alternating assignment.
pub fn torus_grid_medial_diagram(r: usize, c: usize) -> LinkDiagram {
    let cage = CageGraph::new(torus_grid(r, c)).unwrap();
    alternating_assignment(&cage, false)
}

/// Random 4-valent diagram on whatever surface the rotation system gives.
pub fn random_diagram<R: Rng>(rng: &mut R, max_crossings: usize) -> LinkDiagram {
    loop {
        let k = rng.gen_range(1..=max_crossings.max(1));
        let n = 4 * k;
        let mut sigma = vec![0usize; n];
        for i in 0..k {
            let b = 4 * i;
            sigma[b] = b + 1;
            sigma[b + 1] = b + 2;
            sigma[b + 2] = b + 3;
            sigma[b + 3] = b;
        }
        let mut darts: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            darts.swap(i, j);
        }
        let mut alpha = vec![0usize; n];
        for pair in darts.chunks(2) {
            alpha[pair[0]] = pair[1];
            alpha[pair[1]] = pair[0];
        }
        let probe = match SurfaceMap::build(sigma.clone(), alpha.clone(), 0) {
            Ok(m) => m,
            Err(_) => continue,
        };
        let g = probe.derived_genus();
        let map = SurfaceMap::build(sigma, alpha, g).unwrap();
        let over = (0..k).map(|_| rng.gen_bool(0.5)).collect();
        return LinkDiagram::new(map, over).unwrap();
    }
}

/// Random simple graph with a random rotation system, declared on its
/// derived surface; `None` when the sample fails cage validation.
pub fn random_cage<R: Rng>(rng: &mut R) -> Option<SurfaceMap> {
    let nv = rng.gen_range(4..=7usize);
    let max_e = nv * (nv - 1) / 2;
    let target = rng.gen_range(nv + 1..=(2 * nv).min(max_e));
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for v in 1..nv {
        let u = rng.gen_range(0..v);
        edges.push((u, v));
    }
    let mut guard = 0;
    while edges.len() < target && guard < 200 {
        guard += 1;
        let a = rng.gen_range(0..nv);
        let b = rng.gen_range(0..nv);
        let key = (a.min(b), a.max(b));
        if a != b && !edges.contains(&key) {
            edges.push(key);
        }
    }
    // no leaves: a leaf always yields a one-intersection circle
    for v in 0..nv {
        if edges.iter().filter(|&&(a, b)| a == v || b == v).count() < 2 {
            let u = (0..nv).find(|&u| {
                u != v && !edges.contains(&(u.min(v), u.max(v)))
            })?;
            edges.push((u.min(v), u.max(v)));
        }
    }
    let map = rotation_system(&edges, nv, rng)?;
    if validate_cage(&map).passed() {
        Some(map)
    } else {
        None
    }
}

/// Build a map from an edge list with uniformly random rotations.
fn rotation_system<R: Rng>(edges: &[(usize, usize)], nv: usize, rng: &mut R) -> Option<SurfaceMap> {
    let ne = edges.len();
    let mut at_vertex: Vec<Vec<usize>> = vec![Vec::new(); nv];
    let mut alpha = vec![0usize; 2 * ne];
    for (i, &(a, b)) in edges.iter().enumerate() {
        at_vertex[a].push(2 * i);
        at_vertex[b].push(2 * i + 1);
        alpha[2 * i] = 2 * i + 1;
        alpha[2 * i + 1] = 2 * i;
    }
    let mut sigma = vec![0usize; 2 * ne];
    for darts in &mut at_vertex {
        if darts.is_empty() {
            return None;
        }
        for i in (1..darts.len()).rev() {
            let j = rng.gen_range(0..=i);
            darts.swap(i, j);
        }
        for i in 0..darts.len() {
            sigma[darts[i]] = darts[(i + 1) % darts.len()];
        }
    }
    let probe = SurfaceMap::build(sigma.clone(), alpha.clone(), 0).ok()?;
    let g = probe.derived_genus();
    Some(SurfaceMap::build(sigma, alpha, g).unwrap())
}

/// Deterministic genus-2 cage with 8 edges (C5 plus three chords), found by
/// seeded search over rotation systems.
pub fn genus2_cage_eps8() -> SurfaceMap {
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2), (1, 3), (2, 4)];
    seeded_genus_search(&edges, 5, 2, 101)
}

/// A second genus-2 cage: the octahedron minus two opposite equator edges.
pub fn genus2_cage_b() -> SurfaceMap {
    let edges = [
        (0, 2),
        (0, 3),
        (0, 4),
        (0, 5),
        (1, 2),
        (1, 3),
        (1, 4),
        (1, 5),
        (2, 3),
        (4, 5),
    ];
    seeded_genus_search(&edges, 6, 2, 77)
}

fn seeded_genus_search(edges: &[(usize, usize)], nv: usize, genus: usize, seed: u64) -> SurfaceMap {
    let mut rng = seeded_rng(seed);
    for _ in 0..100_000 {
        if let Some(map) = rotation_system(edges, nv, &mut rng) {
            if map.derived_genus() == genus && validate_cage(&map).passed() {
                return map;
            }
        }
    }
    panic!("no genus-{genus} embedding found for the fixed edge list");
}

/// The fixed cage corpus spanning genus 0, 1 and 2.
pub fn cage_corpus() -> Vec<(String, SurfaceMap)> {
    vec![
        ("c3".into(), cycle_graph(3)),
        ("c4".into(), cycle_graph(4)),
        ("c5".into(), cycle_graph(5)),
        ("k4".into(), k4()),
        ("prism".into(), prism()),
        ("wheel4".into(), wheel4()),
        ("grid3x3".into(), torus_grid(3, 3)),
        ("grid3x4".into(), torus_grid(3, 4)),
        ("grid4x4".into(), torus_grid(4, 4)),
        ("genus2_eps8".into(), genus2_cage_eps8()),
        ("genus2_b".into(), genus2_cage_b()),
    ]
}

/// Seeded random disk tangle (re-export point for the CLI).
pub fn random_tangle(seed: u64, strands: usize) -> Tangle {
    let mut rng = seeded_rng(seed);
    crate::embroidery::random_braid_tangle(&mut rng, strands)
}

/// A deterministic small tangle for examples.
pub fn example_tangle() -> Tangle {
    braid_tangle(&[1, 2, 3, 1, 2, 3], 4, false).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_builds() {
        for (name, map) in cage_corpus() {
            assert!(map.is_cellular_on(), "{name}");
        }
        assert_eq!(trefoil().crossing_count(), 3);
        assert_eq!(figure_eight().crossing_count(), 4);
        assert_eq!(six_two().crossing_count(), 6);
        assert!(six_two().is_alternating());
        assert_eq!(kinked_trefoil().crossing_count(), 4);
        assert!(kinked_trefoil().is_alternating());
        assert_eq!(trefoil_connect_sum().crossing_count(), 6);
    }

    #[test]
    fn genus2_examples() {
        let g = genus2_cage_eps8();
        assert_eq!(g.derived_genus(), 2);
        assert_eq!(g.edge_count(), 8);
        let g = genus2_cage_b();
        assert_eq!(g.derived_genus(), 2);
        assert_eq!(g.edge_count(), 10);
    }

    #[test]
    fn random_cages_mostly_valid() {
        let mut rng = seeded_rng(5);
        let mut found = 0;
        for _ in 0..200 {
            if random_cage(&mut rng).is_some() {
                found += 1;
            }
        }
        assert!(found >= 20, "only {found} valid cages in 200 samples");
    }
}
