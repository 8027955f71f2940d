//! Embroidery closures of tangles: close a 2n-endpoint tangle in a disk by
//! n nested arcs (endpoint i to endpoint n+i, alternating routing
//! direction), each pair of arcs crossing exactly once; and the annulus
//! variant that embroiders two boundaries separately and augments with one
//! more component through the hole.

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::augment::{Augmentation, AugmentedDiagram};
use crate::curve::{PathSegment, TransversePath};
use crate::diagram::{DiagramError, LinkDiagram};
use crate::map::{FaceId, MapError, SurfaceMap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TangleError {
    #[error("boundary {boundary} has {got} endpoints; at least 8 are required")]
    TooFewEndpoints { boundary: usize, got: usize },
    #[error("endpoint over/under roles do not alternate around boundary {0}")]
    EndpointParityViolation(usize),
    #[error("no over/under assignment of the new crossings keeps the diagram alternating")]
    ParityUnsolvable { cycle: Vec<usize> },
    #[error("boundary list does not match the tangle's own boundary walk: {0}")]
    BoundaryMismatch(String),
    #[error("tangle interior is not connected")]
    NotConnected,
    #[error("tangle interior is not alternating")]
    NotAlternatingInterior,
    #[error("malformed tangle: {0}")]
    BadStructure(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// A 4-valent map-with-boundary: `alpha[d] == d` marks a boundary stub.
/// `boundaries` lists the stub darts cyclically around each boundary circle
/// (one list for a disk tangle, two for an annulus tangle).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tangle {
    pub sigma: Vec<usize>,
    pub alpha: Vec<usize>,
    pub over: Vec<bool>,
    pub boundaries: Vec<Vec<usize>>,
}

struct TangleInfo {
    /// Per boundary: does the stored list run against the tangle's own
    /// boundary walk? Fixes the chirality of the embroidery frames.
    mirror: Vec<bool>,
    /// Slot (0..3 from the minimum dart) of each dart at its crossing.
    slot: Vec<u8>,
    /// Crossing index (minimum-dart order) of each dart.
    crossing: Vec<usize>,
}

impl Tangle {
    pub fn endpoint_count(&self, boundary: usize) -> usize {
        self.boundaries[boundary].len()
    }

    fn is_stub(&self, d: usize) -> bool {
        self.alpha[d] == d
    }

    /// Whether the strand leaving stub `s` runs over at its first crossing.
    pub fn stub_role(&self, info_slot: &[u8], crossing: &[usize], s: usize) -> bool {
        (info_slot[s] % 2 == 0) == self.over[crossing[s]]
    }

    fn validate(&self) -> Result<TangleInfo, TangleError> {
        let n = self.sigma.len();
        if self.alpha.len() != n {
            return Err(TangleError::BadStructure("sigma/alpha length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for &s in &self.sigma {
            if s >= n || seen[s] {
                return Err(TangleError::BadStructure("sigma is not a permutation".into()));
            }
            seen[s] = true;
        }
        for d in 0..n {
            if self.alpha[d] >= n || self.alpha[self.alpha[d]] != d {
                return Err(TangleError::BadStructure("alpha is not an involution".into()));
            }
        }
        // sigma orbits must be 4-cycles; compute slots and crossing indices
        let mut slot = vec![u8::MAX; n];
        let mut crossing = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for start in 0..n {
            if slot[start] != u8::MAX {
                continue;
            }
            let mut cyc = vec![start];
            let mut d = self.sigma[start];
            while d != start {
                cyc.push(d);
                d = self.sigma[d];
            }
            if cyc.len() != 4 {
                return Err(TangleError::BadStructure("a sigma orbit is not 4-valent".into()));
            }
            // rotate so the minimum dart leads; `start` is minimal already
            // because orbits are discovered in ascending order
            for (i, &x) in cyc.iter().enumerate() {
                slot[x] = i as u8;
                crossing[x] = reps.len();
            }
            reps.push(start);
        }
        if self.over.len() != reps.len() {
            return Err(TangleError::BadStructure(format!(
                "expected {} over flags, got {}",
                reps.len(),
                self.over.len()
            )));
        }
        // connectivity of the interior
        if n > 0 {
            let mut reach = vec![false; n];
            let mut stack = vec![0usize];
            reach[0] = true;
            while let Some(d) = stack.pop() {
                for x in [self.sigma[d], self.alpha[d]] {
                    if !reach[x] {
                        reach[x] = true;
                        stack.push(x);
                    }
                }
            }
            if reach.iter().any(|r| !r) {
                return Err(TangleError::NotConnected);
            }
        }
        // interior alternation on arcs with two crossing ends
        for d in 0..n {
            let a = self.alpha[d];
            if a > d {
                let r1 = (slot[d] % 2 == 0) == self.over[crossing[d]];
                let r2 = (slot[a] % 2 == 0) == self.over[crossing[a]];
                if r1 == r2 {
                    return Err(TangleError::NotAlternatingInterior);
                }
            }
        }
        // stubs must exactly fill the boundary lists
        let stubs: Vec<usize> = (0..n).filter(|&d| self.is_stub(d)).collect();
        let mut listed: Vec<usize> = self.boundaries.iter().flatten().copied().collect();
        listed.sort_unstable();
        if listed != stubs {
            return Err(TangleError::BoundaryMismatch(
                "boundary lists must contain exactly the alpha-free darts".into(),
            ));
        }
        if self.boundaries.is_empty() || self.boundaries.len() > 2 {
            return Err(TangleError::BadStructure("a tangle has one or two boundaries".into()));
        }
        for (b, list) in self.boundaries.iter().enumerate() {
            if list.len() % 2 != 0 {
                return Err(TangleError::BadStructure("odd endpoint count".into()));
            }
            if list.len() < 8 {
                return Err(TangleError::TooFewEndpoints { boundary: b, got: list.len() });
            }
        }
        // derive boundary walks: orbits of d -> sigma[alpha[d]] that visit stubs
        let phi = |d: usize| self.sigma[self.alpha[d]];
        let mut orbit_of = vec![usize::MAX; n];
        let mut stub_orbits: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let id = usize::MAX - 1; // provisional
            let mut cyc = Vec::new();
            let mut d = start;
            loop {
                orbit_of[d] = id;
                cyc.push(d);
                d = phi(d);
                if d == start {
                    break;
                }
            }
            let stubs_here: Vec<usize> = cyc.iter().copied().filter(|&x| self.is_stub(x)).collect();
            if !stubs_here.is_empty() {
                stub_orbits.push(stubs_here);
            }
        }
        if stub_orbits.len() != self.boundaries.len() {
            return Err(TangleError::BoundaryMismatch(format!(
                "{} boundary walks derived, {} boundary lists given",
                stub_orbits.len(),
                self.boundaries.len()
            )));
        }
        let mut mirror = Vec::new();
        let mut used = vec![false; stub_orbits.len()];
        for (b, list) in self.boundaries.iter().enumerate() {
            let mut matched = None;
            for (oi, orbit) in stub_orbits.iter().enumerate() {
                if used[oi] || orbit.len() != list.len() {
                    continue;
                }
                if let Some(m) = cyclic_match(list, orbit) {
                    matched = Some((oi, m));
                    break;
                }
            }
            match matched {
                Some((oi, m)) => {
                    used[oi] = true;
                    mirror.push(m);
                }
                None => {
                    return Err(TangleError::BoundaryMismatch(format!(
                        "boundary {b} does not match any boundary walk"
                    )))
                }
            }
        }
        // endpoint roles must alternate around every boundary
        for (b, list) in self.boundaries.iter().enumerate() {
            let roles: Vec<bool> =
                list.iter().map(|&s| self.stub_role(&slot, &crossing, s)).collect();
            if (0..roles.len()).any(|i| roles[i] == roles[(i + 1) % roles.len()]) {
                return Err(TangleError::EndpointParityViolation(b));
            }
        }
        Ok(TangleInfo { mirror, slot, crossing })
    }
}

/// Is `list` a rotation of `orbit` (returns Some(false)) or of its reversal
/// (Some(true))?
fn cyclic_match(list: &[usize], orbit: &[usize]) -> Option<bool> {
    let k = list.len();
    let check = |orb: &[usize]| -> bool {
        (0..k).any(|r| (0..k).all(|i| list[i] == orb[(i + r) % k]))
    };
    if check(orbit) {
        return Some(false);
    }
    let rev: Vec<usize> = orbit.iter().rev().copied().collect();
    if check(&rev) {
        return Some(true);
    }
    None
}

/// Dart roles at an embroidery crossing, offsets from the base dart.
const DEEP: usize = 0;
const FORWARD: usize = 1;
const SHALLOW: usize = 2;
const BACKWARD: usize = 3;

struct EmbroideryPatch {
    /// crossing base dart per arc pair (j, k), 1-indexed, j < k
    base: BTreeMap<(usize, usize), usize>,
    /// the two deep darts of the last arc's long stretch
    deep_out: usize,
    deep_in: usize,
    n_arcs: usize,
    mirror: bool,
}

/// Extend sigma/alpha with the embroidery of one boundary. Endpoint `i`
/// (1-indexed along the list) joins endpoint `n + i`; odd arcs run forward
/// along the numbering, even arcs backward; arcs j < k cross once, on k's
/// outward dive if j is odd and on k's inward dive if j is even.
fn add_embroidery(
    sigma: &mut Vec<usize>,
    alpha: &mut Vec<usize>,
    boundary: &[usize],
    mirror: bool,
) -> EmbroideryPatch {
    let n = boundary.len() / 2;
    let stub = |i: usize| boundary[i - 1]; // 1-indexed
    let mut base = BTreeMap::new();
    for j in 1..=n {
        for k in (j + 1)..=n {
            let b = sigma.len();
            base.insert((j, k), b);
            if mirror {
                sigma.extend([b + 3, b, b + 1, b + 2]);
            } else {
                sigma.extend([b + 1, b + 2, b + 3, b]);
            }
            alpha.extend([b, b + 1, b + 2, b + 3]); // patched below
        }
    }
    // chain every arc through its crossings
    for k in 1..=n {
        let mut hops: Vec<(usize, usize)> = Vec::new(); // (enter dart, exit dart)
        let mut odds: Vec<usize> = (1..k).filter(|j| j % 2 == 1).collect();
        odds.sort_unstable();
        for j in odds {
            let b = base[&(j, k)];
            hops.push((b + SHALLOW, b + DEEP));
        }
        if k % 2 == 1 {
            for m in (k + 1)..=n {
                let b = base[&(k, m)];
                hops.push((b + BACKWARD, b + FORWARD));
            }
        } else {
            for m in ((k + 1)..=n).rev() {
                let b = base[&(k, m)];
                hops.push((b + FORWARD, b + BACKWARD));
            }
        }
        let mut evens: Vec<usize> = (1..k).filter(|j| j % 2 == 0).collect();
        evens.sort_unstable_by(|a, b| b.cmp(a));
        for j in evens {
            let b = base[&(j, k)];
            hops.push((b + DEEP, b + SHALLOW));
        }
        let mut prev = stub(k);
        for (enter, exit) in hops {
            alpha[prev] = enter;
            alpha[enter] = prev;
            prev = exit;
        }
        alpha[prev] = stub(n + k);
        alpha[stub(n + k)] = prev;
    }
    let last_odd = if (n - 1) % 2 == 1 { n - 1 } else { n - 2 };
    let last_even = if (n - 1) % 2 == 0 { n - 1 } else { n - 2 };
    EmbroideryPatch {
        deep_out: base[&(last_odd, n)] + DEEP,
        deep_in: base[&(last_even, n)] + DEEP,
        base,
        n_arcs: n,
        mirror,
    }
}

impl EmbroideryPatch {
    /// The face beyond every embroidery arc: outward of the outer embroidery
    /// of a disk, or the central flower region when embroidering inward.
    fn deep_face(&self, map: &SurfaceMap) -> FaceId {
        let odd = self.n_arcs % 2 == 1;
        if odd != self.mirror {
            map.face_of(self.deep_out)
        } else {
            map.face_of(self.deep_in)
        }
    }
}

/// Solve the over/under flags of the new crossings so the whole diagram is
/// alternating: a forced propagation anchored at the tangle's own crossings.
fn solve_parity(
    tangle: &Tangle,
    info: &TangleInfo,
    sigma: &[usize],
    alpha: &[usize],
    first_new_dart: usize,
) -> Result<Vec<bool>, TangleError> {
    let new_crossing = |d: usize| (d - first_new_dart) / 4;
    let n_new = (sigma.len() - first_new_dart) / 4;
    // over(dart) = flag(crossing) xor odd_slot; slots 0..3 from the base dart
    let odd_slot = |d: usize| -> bool {
        let r = (d - first_new_dart) % 4;
        r == FORWARD || r == BACKWARD
    };
    let mut value: Vec<Option<bool>> = vec![None; n_new];
    let mut parent: Vec<Option<usize>> = vec![None; n_new];
    // constraints from every edge with at least one new end
    let mut forced: Vec<(usize, bool, Option<usize>)> = Vec::new(); // (crossing, flag, parent)
    let mut relations: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n_new]; // (other, same_flag?)
    for d in first_new_dart..sigma.len() {
        let a = alpha[d];
        if a >= first_new_dart {
            if a < d {
                continue;
            }
            // over(d) != over(a) forces equal flags exactly when the slot
            // parities differ
            let same = odd_slot(d) != odd_slot(a);
            relations[new_crossing(d)].push((new_crossing(a), same));
            relations[new_crossing(a)].push((new_crossing(d), same));
        } else {
            // anchored at a tangle dart
            let role_a = (info.slot[a] % 2 == 0) == tangle.over[info.crossing[a]];
            // over(d) = !role_a
            let flag = !role_a != odd_slot(d);
            forced.push((new_crossing(d), flag, None));
        }
    }
    let mut queue: std::collections::VecDeque<usize> = Default::default();
    for (c, flag, from) in forced {
        match value[c] {
            None => {
                value[c] = Some(flag);
                parent[c] = from;
                queue.push_back(c);
            }
            Some(v) if v != flag => {
                return Err(TangleError::ParityUnsolvable { cycle: vec![c] });
            }
            _ => {}
        }
    }
    while let Some(c) = queue.pop_front() {
        let v = value[c].unwrap();
        for &(other, same) in &relations[c] {
            let want = if same { v } else { !v };
            match value[other] {
                None => {
                    value[other] = Some(want);
                    parent[other] = Some(c);
                    queue.push_back(other);
                }
                Some(have) if have != want => {
                    // report the conflicting constraint cycle via tree paths
                    let mut cyc = vec![other];
                    let mut x = Some(c);
                    while let Some(p) = x {
                        cyc.push(p);
                        x = parent[p];
                    }
                    return Err(TangleError::ParityUnsolvable { cycle: cyc });
                }
                _ => {}
            }
        }
    }
    if value.iter().any(|v| v.is_none()) {
        return Err(TangleError::ParityUnsolvable { cycle: vec![] });
    }
    Ok(value.into_iter().map(|v| v.unwrap()).collect())
}

pub struct DiskEmbroidery {
    pub diagram: LinkDiagram,
    pub new_crossings: usize,
    pub arcs: usize,
    /// base dart of the crossing between each arc pair
    pub pair_crossing: BTreeMap<(usize, usize), usize>,
}

/// Close a disk tangle with its embroidery; the interior crossings are
/// never changed.
pub fn embroider_disk(tangle: &Tangle) -> Result<DiskEmbroidery, TangleError> {
    let info = tangle.validate()?;
    if tangle.boundaries.len() != 1 {
        return Err(TangleError::BadStructure("disk embroidery needs a single boundary".into()));
    }
    let mut sigma = tangle.sigma.clone();
    let mut alpha = tangle.alpha.clone();
    let first_new = sigma.len();
    let patch = add_embroidery(&mut sigma, &mut alpha, &tangle.boundaries[0], info.mirror[0]);
    let flags_new = solve_parity(tangle, &info, &sigma, &alpha, first_new)?;
    let map = SurfaceMap::build(sigma, alpha, 0)?;
    assert_eq!(map.derived_genus(), 0, "disk embroidery closes up in the sphere");
    let mut over = Vec::with_capacity(map.vertex_count());
    for v in map.vertices() {
        if v.rep < first_new {
            over.push(tangle.over[info.crossing[v.rep]]);
        } else {
            over.push(flags_new[(v.rep - first_new) / 4]);
        }
    }
    let diagram = LinkDiagram::new(map, over)?;
    debug_assert!(diagram.is_alternating());
    let n = patch.n_arcs;
    Ok(DiskEmbroidery {
        diagram,
        new_crossings: n * (n - 1) / 2,
        arcs: n,
        pair_crossing: patch.base,
    })
}

pub struct AnnulusEmbroidery {
    pub augmented: AugmentedDiagram,
    pub new_crossings_outer: usize,
    pub new_crossings_inner: usize,
    /// central face of the inner embroidery and the outer face
    pub core_faces: (FaceId, FaceId),
    pub core_punctures: usize,
}

/// Embroider both boundaries of an annulus tangle independently, then
/// augment with one more component through the hole of the annulus, from
/// the innermost region of the inner embroidery to the outer face.
pub fn embroider_annulus(tangle: &Tangle) -> Result<AnnulusEmbroidery, TangleError> {
    let info = tangle.validate()?;
    if tangle.boundaries.len() != 2 {
        return Err(TangleError::BadStructure("annulus embroidery needs two boundaries".into()));
    }
    let mut sigma = tangle.sigma.clone();
    let mut alpha = tangle.alpha.clone();
    let first_new = sigma.len();
    // each boundary is embroidered into its own stub face; the chirality
    // rule is relative to that face's walk, the same for outer and inner
    let outer = add_embroidery(&mut sigma, &mut alpha, &tangle.boundaries[0], info.mirror[0]);
    let inner = add_embroidery(&mut sigma, &mut alpha, &tangle.boundaries[1], info.mirror[1]);
    let flags_new = solve_parity(tangle, &info, &sigma, &alpha, first_new)?;
    let map = SurfaceMap::build(sigma, alpha, 0)?;
    assert_eq!(map.derived_genus(), 0, "annulus embroidery closes up in the sphere");
    let mut over = Vec::with_capacity(map.vertex_count());
    for v in map.vertices() {
        if v.rep < first_new {
            over.push(tangle.over[info.crossing[v.rep]]);
        } else {
            over.push(flags_new[(v.rep - first_new) / 4]);
        }
    }
    let diagram = LinkDiagram::new(map, over)?;
    debug_assert!(diagram.is_alternating());

    let inner_face = inner.deep_face(diagram.map());
    let outer_face = outer.deep_face(diagram.map());
    assert_ne!(inner_face, outer_face);
    assert!(
        diagram.map().face_walk(inner_face).len() > 2,
        "the central flower region is never a bigon"
    );
    let path = face_path(diagram.map(), inner_face, outer_face);
    let core_punctures = path.segments.len() - 1;
    let augmented =
        AugmentedDiagram { base: diagram, augs: vec![Augmentation { path }] };
    let (o, i) = (outer.n_arcs, inner.n_arcs);
    Ok(AnnulusEmbroidery {
        augmented,
        new_crossings_outer: o * (o - 1) / 2,
        new_crossings_inner: i * (i - 1) / 2,
        core_faces: (inner_face, outer_face),
        core_punctures,
    })
}

/// Shortest transverse path between two faces, crossing one arc per step;
/// deterministic BFS with minimum-id tie-breaking.
fn face_path(map: &SurfaceMap, from: FaceId, to: FaceId) -> TransversePath {
    let mut prev: BTreeMap<FaceId, (FaceId, usize)> = BTreeMap::new(); // face -> (previous, dart on this face's side)
    let mut queue = std::collections::VecDeque::from([from]);
    let mut seen = std::collections::BTreeSet::from([from]);
    'bfs: while let Some(f) = queue.pop_front() {
        // neighbors in edge order for determinism
        for &e in map.edges() {
            for (d, dn) in [(e.0, map.alpha(e.0)), (map.alpha(e.0), e.0)] {
                if map.face_of(d) != f {
                    continue;
                }
                let g = map.face_of(dn);
                if seen.insert(g) {
                    prev.insert(g, (f, dn));
                    queue.push_back(g);
                    if g == to {
                        break 'bfs;
                    }
                }
            }
        }
    }
    // reconstruct: list of (face, entry dart) from `to` back to `from`
    let mut hops: Vec<(FaceId, usize)> = Vec::new();
    let mut cur = to;
    while cur != from {
        let (p, dart) = prev[&cur];
        hops.push((cur, dart));
        cur = p;
    }
    hops.reverse();
    let mut segments = Vec::new();
    let mut entry: Option<[usize; 2]> = None;
    let mut face = from;
    for (next_face, dart_on_next) in hops {
        let dart_here = map.alpha(dart_on_next);
        segments.push(PathSegment {
            face,
            entry,
            exit: Some([map.walk_pos_of(dart_here), 0]),
        });
        entry = Some([map.walk_pos_of(dart_on_next), 0]);
        face = next_face;
    }
    segments.push(PathSegment { face, entry, exit: None });
    TransversePath { segments }
}

/// Random alternating tangle in a disk: an alternating braid word on
/// `strands` strands (odd generators positive, even negative). Braid
/// tangles always satisfy endpoint alternation and contain no reducible
/// configuration wholly inside the disk.
pub fn random_braid_tangle<R: Rng>(rng: &mut R, strands: usize) -> Tangle {
    assert!(strands >= 4, "disk tangles need at least 8 endpoints");
    loop {
        let len = rng.gen_range(2 * strands..4 * strands);
        let mut word: Vec<usize> = (1..strands).collect();
        while word.len() < len {
            word.push(rng.gen_range(1..strands));
        }
        // shuffle deterministically with the provided rng
        for i in (1..word.len()).rev() {
            let j = rng.gen_range(0..=i);
            word.swap(i, j);
        }
        if let Ok(t) = braid_tangle(&word, strands, false) {
            return t;
        }
    }
}

/// Random alternating tangle in an annulus: an annular braid word (the last
/// generator wraps around); `strands` must be even.
pub fn random_annular_tangle<R: Rng>(rng: &mut R, strands: usize) -> Tangle {
    assert!(strands >= 8 && strands % 2 == 0);
    loop {
        let len = rng.gen_range(2 * strands..3 * strands);
        let mut word: Vec<usize> = (1..=strands).collect();
        while word.len() < len {
            word.push(rng.gen_range(1..=strands));
        }
        for i in (1..word.len()).rev() {
            let j = rng.gen_range(0..=i);
            word.swap(i, j);
        }
        if let Ok(t) = braid_tangle(&word, strands, true) {
            return t;
        }
    }
}

/// Tangle of an alternating braid word. Letters are generator indices
/// (1-based); generator j crosses positions j and j+1, positive when j is
/// odd. With `wrap`, generator `strands` crosses the last and first
/// positions and the tangle lives in an annulus.
pub fn braid_tangle(word: &[usize], strands: usize, wrap: bool) -> Result<Tangle, TangleError> {
    let w = strands;
    let max_gen = if wrap { w } else { w - 1 };
    if word.iter().any(|&j| j == 0 || j > max_gen) {
        return Err(TangleError::BadStructure("generator out of range".into()));
    }
    let mut sigma = Vec::new();
    let mut alpha: Vec<usize> = Vec::new();
    let mut over = Vec::new();
    let mut pending: Vec<Option<usize>> = vec![None; w + 1];
    let mut tops: Vec<Option<usize>> = vec![None; w + 1];
    for (r, &j) in word.iter().enumerate() {
        let b = 4 * r;
        // darts: UL, DL, DR, UR, counterclockwise rotation (UL, DL, DR, UR)
        sigma.extend([b + 1, b + 2, b + 3, b]);
        alpha.extend([b, b + 1, b + 2, b + 3]);
        let (pl, pr) = (j, if j == w { 1 } else { j + 1 });
        match pending[pl] {
            Some(d) => {
                alpha[d] = b;
                alpha[b] = d;
            }
            None => tops[pl] = Some(b),
        }
        match pending[pr] {
            Some(d) => {
                alpha[d] = b + 3;
                alpha[b + 3] = d;
            }
            None => tops[pr] = Some(b + 3),
        }
        pending[pl] = Some(b + 1);
        pending[pr] = Some(b + 2);
        over.push(j % 2 == 1);
    }
    if (1..=w).any(|p| tops[p].is_none()) {
        return Err(TangleError::NotConnected);
    }
    let top_list: Vec<usize> = (1..=w).map(|p| tops[p].unwrap()).collect();
    let bottom_list: Vec<usize> = (1..=w).rev().map(|p| pending[p].unwrap()).collect();
    let boundaries = if wrap {
        vec![top_list, bottom_list]
    } else {
        let mut all = top_list;
        all.extend(bottom_list);
        vec![all]
    };
    let t = Tangle { sigma, alpha, over, boundaries };
    t.validate()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::certify_hyperbolic;
    use crate::corpus;
    use crate::curve::{is_obviously_prime, is_reduced, PrimenessVerdict, ReducednessVerdict};

    #[test]
    fn braid_tangles_validate() {
        let t = braid_tangle(&[1, 2, 3, 1, 2, 3, 2], 4, false).unwrap();
        assert_eq!(t.endpoint_count(0), 8);
        let mut rng = corpus::seeded_rng(3);
        for _ in 0..10 {
            let strands = 4 + (rng.gen_range(0..5usize));
            let t = random_braid_tangle(&mut rng, strands);
            assert_eq!(t.endpoint_count(0), 2 * strands);
        }
    }

    #[test]
    fn too_few_endpoints() {
        let err = braid_tangle(&[1, 2, 1], 3, false).unwrap_err();
        assert!(matches!(err, TangleError::TooFewEndpoints { got: 6, .. }));
    }

    #[test]
    fn disk_embroidery_counts_and_claim() {
        let t = braid_tangle(&[1, 2, 3, 1, 2, 3], 4, false).unwrap();
        let interior = t.over.clone();
        let out = embroider_disk(&t).unwrap();
        assert_eq!(out.arcs, 4);
        assert_eq!(out.new_crossings, 6);
        assert_eq!(out.diagram.crossing_count(), 6 + 6);
        // interior flags unchanged
        assert_eq!(&out.diagram.over_flags()[..interior.len()], &interior[..]);
        // arc pairs cross exactly once
        assert_eq!(out.pair_crossing.len(), 6);
        // the Claim
        assert!(out.diagram.is_alternating());
        assert_eq!(is_reduced(&out.diagram), ReducednessVerdict::Reduced);
        assert_eq!(is_obviously_prime(&out.diagram), PrimenessVerdict::ObviouslyPrime);
        assert_eq!(out.diagram.is_two_braid(), Ok(false));
    }

    #[test]
    fn randomized_claim_suite() {
        let mut rng = corpus::seeded_rng(11);
        for i in 0..8 {
            let strands = 4 + (i % 5);
            let t = random_braid_tangle(&mut rng, strands);
            let out = embroider_disk(&t).expect("embroidery succeeds");
            let d = &out.diagram;
            assert!(d.is_alternating(), "tangle {i}");
            assert_eq!(is_reduced(d), ReducednessVerdict::Reduced, "tangle {i}");
            assert_eq!(is_obviously_prime(d), PrimenessVerdict::ObviouslyPrime, "tangle {i}");
            assert_eq!(d.is_two_braid(), Ok(false), "tangle {i}");
        }
    }

    #[test]
    fn annulus_embroidery() {
        let t = braid_tangle(&[1, 2, 3, 4, 5, 6, 7, 8, 3, 6], 8, true).unwrap();
        assert_eq!(t.boundaries.len(), 2);
        let out = embroider_annulus(&t).unwrap();
        assert_eq!(out.new_crossings_outer, 6);
        assert_eq!(out.new_crossings_inner, 6);
        assert!(out.core_punctures >= 2);
        let base = &out.augmented.base;
        assert!(base.is_alternating());
        assert_eq!(is_reduced(base), ReducednessVerdict::Reduced);
        assert_eq!(is_obviously_prime(base), PrimenessVerdict::ObviouslyPrime);
        assert_eq!(base.is_two_braid(), Ok(false));
        let cert = certify_hyperbolic(&out.augmented);
        assert!(cert.overall, "{cert:?}");
    }
}
