//! Combinatorial maps: cellularly embedded multigraphs on oriented surfaces.
//!
//! A map is a pair of permutations on darts (half-edges): `alpha` is a
//! fixed-point-free involution pairing the two darts of each edge, and
//! `sigma` cycles the darts leaving each vertex in anticlockwise order.
//! Faces are the orbits of `sigma ∘ alpha`; with anticlockwise vertex
//! rotations these orbits traverse each face boundary clockwise, keeping
//! the face on the right of every dart.
//!
//! Darts are `0..2E` internally and `1..=2E` in the `.cmap` text format.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Rotation-system map. Immutable after construction; edits return new maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorialMap {
    sigma: Vec<u32>,
    alpha: Vec<u32>,
    vertex_of: Vec<u32>,
    face_of: Vec<u32>,
    vertex_cycles: Vec<Vec<u32>>,
    face_cycles: Vec<Vec<u32>>,
}

/// Orientation-preserving isomorphism between two maps: a dart bijection
/// commuting with both `sigma` and `alpha`.
#[derive(Debug, Clone)]
pub struct MapMatch {
    /// `dart_map[d]` is the image in the second map of dart `d` of the first.
    pub dart_map: Vec<u32>,
}

/// Vertex/edge data of the subgraph generated by a set of faces.
#[derive(Debug, Clone)]
pub struct FaceSubgraph {
    /// Darts of all edges incident with the selected faces.
    pub darts: BTreeSet<u32>,
    /// V(G(J)): vertices incident with the selected faces.
    pub vertices: BTreeSet<usize>,
    /// Exterior vertices: members of V(G(J)) also incident with a face outside J.
    pub exterior: BTreeSet<usize>,
}

/// Result of an edge deletion, including whether the deletion kept the map
/// cellular on the torus and the alternating sum V - E + F counted with the
/// torus face count (merged regions counted once).
#[derive(Debug, Clone)]
pub struct DeleteOutcome {
    pub map: CombinatorialMap,
    pub cellular_on_torus: bool,
    /// V - E + F with F the number of torus regions after deletion.
    pub toroidal_alternating_sum: i64,
}

/// Edge deletion with the dart renumbering exposed.
#[derive(Debug, Clone)]
pub struct TrackedDelete {
    pub map: CombinatorialMap,
    /// Old dart -> new dart; `u32::MAX` for the two removed darts.
    pub dart_remap: Vec<u32>,
}

impl CombinatorialMap {
    /// Build a map from rotation and pairing tables (0-based darts).
    pub fn new(sigma: Vec<u32>, alpha: Vec<u32>) -> Result<Self> {
        let n = sigma.len();
        if n == 0 || n % 2 != 0 {
            return Err(Error::InvalidMap(format!(
                "dart count must be positive and even, got {n}"
            )));
        }
        if alpha.len() != n {
            return Err(Error::InvalidMap("sigma/alpha length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for &d in &sigma {
            let d = d as usize;
            if d >= n || seen[d] {
                return Err(Error::InvalidMap("sigma is not a permutation".into()));
            }
            seen[d] = true;
        }
        for (d, &a) in alpha.iter().enumerate() {
            let a = a as usize;
            if a >= n || a == d || alpha[a] as usize != d {
                return Err(Error::InvalidMap(
                    "alpha must be a fixed-point-free involution".into(),
                ));
            }
        }
        // Connectivity under <sigma, alpha>.
        let mut visited = vec![false; n];
        let mut stack = vec![0u32];
        visited[0] = true;
        let mut count = 1;
        while let Some(d) = stack.pop() {
            for nd in [sigma[d as usize], alpha[d as usize]] {
                if !visited[nd as usize] {
                    visited[nd as usize] = true;
                    count += 1;
                    stack.push(nd);
                }
            }
        }
        if count != n {
            return Err(Error::InvalidMap("map is not connected".into()));
        }

        let vertex_cycles = cycles_of(&sigma);
        let phi: Vec<u32> = (0..n).map(|d| sigma[alpha[d] as usize]).collect();
        let face_cycles = cycles_of(&phi);
        let mut vertex_of = vec![0u32; n];
        for (vi, cyc) in vertex_cycles.iter().enumerate() {
            for &d in cyc {
                vertex_of[d as usize] = vi as u32;
            }
        }
        let mut face_of = vec![0u32; n];
        for (fi, cyc) in face_cycles.iter().enumerate() {
            for &d in cyc {
                face_of[d as usize] = fi as u32;
            }
        }
        Ok(CombinatorialMap {
            sigma,
            alpha,
            vertex_of,
            face_of,
            vertex_cycles,
            face_cycles,
        })
    }

    pub fn dart_count(&self) -> u32 {
        self.sigma.len() as u32
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_cycles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.sigma.len() / 2
    }

    pub fn face_count(&self) -> usize {
        self.face_cycles.len()
    }

    pub fn sigma(&self, d: u32) -> u32 {
        self.sigma[d as usize]
    }

    pub fn alpha(&self, d: u32) -> u32 {
        self.alpha[d as usize]
    }

    /// Face-permutation successor: `sigma(alpha(d))`.
    pub fn phi(&self, d: u32) -> u32 {
        self.sigma[self.alpha[d as usize] as usize]
    }

    pub fn vertex_of(&self, d: u32) -> usize {
        self.vertex_of[d as usize] as usize
    }

    /// Face on the right of dart `d`, the one whose facial walk contains `d`.
    pub fn face_of(&self, d: u32) -> usize {
        self.face_of[d as usize] as usize
    }

    /// Anticlockwise dart cycles at each vertex, ordered by smallest dart.
    pub fn vertex_cycles(&self) -> &[Vec<u32>] {
        &self.vertex_cycles
    }

    /// Facial walks as dart cycles (clockwise traversal, face on the right).
    pub fn faces(&self) -> &[Vec<u32>] {
        &self.face_cycles
    }

    /// Edges as dart pairs `(d, alpha(d))` with `d < alpha(d)`, sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        (0..self.dart_count())
            .filter(|&d| d < self.alpha(d))
            .map(|d| (d, self.alpha(d)))
            .collect()
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.vertex_cycles[vertex].len()
    }

    /// Sorted vertex degrees.
    pub fn degree_multiset(&self) -> Vec<usize> {
        let mut ds: Vec<usize> = self.vertex_cycles.iter().map(|c| c.len()).collect();
        ds.sort_unstable();
        ds
    }

    pub fn is_loopless(&self) -> bool {
        (0..self.dart_count()).all(|d| self.vertex_of(d) != self.vertex_of(self.alpha(d)))
    }

    /// Genus from the Euler formula V - E + F = 2 - 2g.
    pub fn genus(&self) -> i64 {
        let chi =
            self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64;
        (2 - chi) / 2
    }

    /// Cellularly embedded in the torus: connected (guaranteed) with genus 1.
    pub fn is_cellular_torus(&self) -> bool {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64 == 0
    }

    /// Geometric dual: vertices become the faces (rotation = facial walk
    /// order), edges are kept. `dual(dual(m))` is `m` exactly.
    pub fn dual(&self) -> Result<CombinatorialMap> {
        if !self.is_cellular_torus() {
            return Err(Error::NotCellular);
        }
        let n = self.dart_count() as usize;
        let phi: Vec<u32> = (0..n as u32).map(|d| self.phi(d)).collect();
        CombinatorialMap::new(phi, self.alpha.clone())
    }

    /// Canonical relabeling: breadth-first from every starting dart, taking
    /// the lexicographically least `(sigma, alpha)` table encoding.
    pub fn canonical_encoding(&self) -> Vec<u32> {
        self.canonical_with_map().0
    }

    fn relabel_from(&self, start: u32) -> (Vec<u32>, Vec<u32>) {
        let n = self.sigma.len();
        let mut label = vec![u32::MAX; n];
        let mut order = Vec::with_capacity(n);
        label[start as usize] = 0;
        order.push(start);
        let mut head = 0;
        while head < order.len() {
            let d = order[head];
            head += 1;
            for nd in [self.sigma(d), self.alpha(d)] {
                if label[nd as usize] == u32::MAX {
                    label[nd as usize] = order.len() as u32;
                    order.push(nd);
                }
            }
        }
        let mut enc = Vec::with_capacity(2 * n);
        for &old in &order {
            enc.push(label[self.sigma(old) as usize]);
            enc.push(label[self.alpha(old) as usize]);
        }
        (enc, label)
    }

    fn canonical_with_map(&self) -> (Vec<u32>, Vec<u32>) {
        let mut best: Option<(Vec<u32>, Vec<u32>)> = None;
        for s in 0..self.dart_count() {
            let cand = self.relabel_from(s);
            if best.as_ref().is_none_or(|b| cand.0 < b.0) {
                best = Some(cand);
            }
        }
        best.unwrap()
    }

    /// The map relabeled into its canonical form.
    pub fn canonical_form(&self) -> CombinatorialMap {
        let (enc, _) = self.canonical_with_map();
        let n = self.sigma.len();
        let sigma: Vec<u32> = (0..n).map(|i| enc[2 * i]).collect();
        let alpha: Vec<u32> = (0..n).map(|i| enc[2 * i + 1]).collect();
        CombinatorialMap::new(sigma, alpha).expect("canonical relabeling preserves validity")
    }

    /// Orientation-preserving isomorphism test.
    pub fn is_equivalent(&self, other: &CombinatorialMap) -> Option<MapMatch> {
        if self.dart_count() != other.dart_count() {
            return None;
        }
        let (enc1, map1) = self.canonical_with_map();
        let (enc2, map2) = other.canonical_with_map();
        if enc1 != enc2 {
            return None;
        }
        // dart_map = map2^{-1} ∘ map1
        let n = self.sigma.len();
        let mut inv2 = vec![0u32; n];
        for (d, &l) in map2.iter().enumerate() {
            inv2[l as usize] = d as u32;
        }
        let dart_map: Vec<u32> = (0..n).map(|d| inv2[map1[d] as usize]).collect();
        debug_assert!((0..n as u32).all(|d| {
            dart_map[self.sigma(d) as usize] == other.sigma(dart_map[d as usize])
                && dart_map[self.alpha(d) as usize] == other.alpha(dart_map[d as usize])
        }));
        Some(MapMatch { dart_map })
    }

    /// Delete edge `edge_index` (into `edges()`). In pipeline mode the edge
    /// must be adjacent to two distinct faces so the deletion merges them and
    /// keeps the map cellular; with `force`, a same-face deletion is allowed
    /// and reported as non-cellular.
    pub fn delete_edge(&self, edge_index: usize, force: bool) -> Result<DeleteOutcome> {
        let edges = self.edges();
        let &(d, dp) = edges
            .get(edge_index)
            .ok_or_else(|| Error::InvalidMap(format!("no edge {edge_index}")))?;
        let two_faces = self.face_of(d) != self.face_of(dp);
        if !two_faces && !force {
            return Err(Error::SingleFaceEdge(edge_index));
        }
        if self.degree(self.vertex_of(d)) == 1 || self.degree(self.vertex_of(dp)) == 1 {
            return Err(Error::InvalidMap(
                "deleting the only edge at a vertex would disconnect it".into(),
            ));
        }
        let (map, _) = self.spliced_removal(&[d, dp])?;
        let torus_faces = if two_faces {
            self.face_count() as i64 - 1
        } else {
            // Both sides on one face: the merged region is no longer a disk
            // but remains a single region of the torus.
            self.face_count() as i64
        };
        let alt = self.vertex_count() as i64 - (self.edge_count() as i64 - 1) + torus_faces;
        Ok(DeleteOutcome {
            cellular_on_torus: two_faces && map.is_cellular_torus(),
            toroidal_alternating_sum: alt,
            map,
        })
    }

    /// Pipeline-mode deletion that also reports the dart renumbering, for
    /// callers tracking faces across the edit.
    pub fn delete_edge_tracked(&self, edge_index: usize) -> Result<TrackedDelete> {
        let edges = self.edges();
        let &(d, dp) = edges
            .get(edge_index)
            .ok_or_else(|| Error::InvalidMap(format!("no edge {edge_index}")))?;
        if self.face_of(d) == self.face_of(dp) {
            return Err(Error::SingleFaceEdge(edge_index));
        }
        let (map, dart_remap) = self.spliced_removal(&[d, dp])?;
        Ok(TrackedDelete { map, dart_remap })
    }

    /// Delete a degree-1 vertex together with its pendant edge.
    pub fn delete_deg1_vertex(&self, vertex: usize) -> Result<CombinatorialMap> {
        if self.degree(vertex) != 1 {
            return Err(Error::InvalidMap(format!(
                "vertex {vertex} has degree {}, expected 1",
                self.degree(vertex)
            )));
        }
        let d = self.vertex_cycles[vertex][0];
        Ok(self.spliced_removal(&[d, self.alpha(d)])?.0)
    }

    /// Remove the given darts, splice the rotations around them, and compact
    /// dart ids. The dart set must be closed under `alpha`.
    fn spliced_removal(&self, dead: &[u32]) -> Result<(CombinatorialMap, Vec<u32>)> {
        let n = self.sigma.len();
        let mut is_dead = vec![false; n];
        for &d in dead {
            is_dead[d as usize] = true;
        }
        // sigma with dead darts skipped
        let mut sigma2 = self.sigma.clone();
        for &d in dead {
            // find predecessor of d in its rotation
            let mut p = self.sigma(d);
            while self.sigma(p) != d {
                p = self.sigma(p);
            }
            if p != d {
                sigma2[p as usize] = sigma2[d as usize];
            }
        }
        let remap: Vec<u32> = {
            let mut r = vec![u32::MAX; n];
            let mut next = 0;
            for d in 0..n {
                if !is_dead[d] {
                    r[d] = next;
                    next += 1;
                }
            }
            r
        };
        let mut sigma = Vec::with_capacity(n - dead.len());
        let mut alpha = Vec::with_capacity(n - dead.len());
        for d in 0..n {
            if !is_dead[d] {
                sigma.push(remap[resolve_live(&sigma2, &is_dead, d)]);
                alpha.push(remap[self.alpha[d] as usize]);
            }
        }
        Ok((CombinatorialMap::new(sigma, alpha)?, remap))
    }

    /// Insert a new edge whose darts are placed immediately after `after1`
    /// and `after2` in their vertex rotations. Inverse of `delete_edge`.
    pub fn insert_edge(&self, after1: u32, after2: u32) -> Result<CombinatorialMap> {
        let n = self.sigma.len() as u32;
        if after1 >= n || after2 >= n {
            return Err(Error::InvalidMap("insert position out of range".into()));
        }
        let (na, nb) = (n, n + 1);
        let mut sigma = self.sigma.clone();
        sigma.push(0);
        sigma.push(0);
        let mut alpha = self.alpha.clone();
        alpha.push(nb);
        alpha.push(na);
        if after1 == after2 {
            // both new darts in sequence after the same dart
            sigma[nb as usize] = sigma[after1 as usize];
            sigma[na as usize] = nb;
            sigma[after1 as usize] = na;
        } else {
            sigma[na as usize] = sigma[after1 as usize];
            sigma[after1 as usize] = na;
            sigma[nb as usize] = sigma[after2 as usize];
            sigma[after2 as usize] = nb;
        }
        CombinatorialMap::new(sigma, alpha)
    }

    /// Subgraph generated by all vertices and edges incident with the faces
    /// in `faces` (indices into `faces()`), plus its exterior vertex set.
    pub fn face_subgraph(&self, faces: &BTreeSet<usize>) -> Result<FaceSubgraph> {
        if faces.is_empty() || faces.len() >= self.face_count() {
            return Err(Error::BadFaceSubset);
        }
        let mut darts = BTreeSet::new();
        let mut vertices = BTreeSet::new();
        for &f in faces {
            for &d in &self.face_cycles[f] {
                darts.insert(d);
                darts.insert(self.alpha(d));
                vertices.insert(self.vertex_of(d));
            }
        }
        let mut exterior = BTreeSet::new();
        for &v in &vertices {
            let touches_outside = self.vertex_cycles[v].iter().any(|&d| {
                let fd = self.face_of(d);
                let fa = self.face_of(self.alpha(d));
                // Faces incident at v through this dart's corner or edge sides.
                !faces.contains(&fd) || !faces.contains(&fa)
            });
            if touches_outside {
                exterior.insert(v);
            }
        }
        Ok(FaceSubgraph {
            darts,
            vertices,
            exterior,
        })
    }

    /// Common refinement of the map and its dual. Each edge gains a crossing
    /// vertex where it meets its dual edge; faces of the result are the
    /// canonical regions. Requires every edge adjacent to two distinct faces.
    pub fn distinguished_graph(&self) -> Result<CombinatorialMap> {
        if !self.is_cellular_torus() {
            return Err(Error::NotCellular);
        }
        let edges = self.edges();
        for (i, &(d, dp)) in edges.iter().enumerate() {
            if self.face_of(d) == self.face_of(dp) {
                return Err(Error::SingleFaceEdge(i));
            }
        }
        // New darts:
        //   vertex-side dart of old dart d            -> id d                (at vertex_of(d), toward crossing)
        //   crossing-side dart facing vertex_of(d)    -> id 2E + d           (at crossing of edge(d))
        //   face-side dart of face f, walk position k -> per-face offset     (at face vertex, toward crossing)
        //   crossing-side dart facing face_of(d)      -> paired with above
        let n_old = self.sigma.len() as u32;
        let cross_base = n_old; // 2E old-dart-indexed crossing darts
        let face_base = 2 * n_old; // face-side darts: one per (face, walk slot) = 2E total
        let cross_face_base = 3 * n_old; // crossing darts toward faces, indexed by old dart
        let total = 4 * n_old as usize; // 8E darts
        let mut sigma = vec![u32::MAX; total];
        let mut alpha = vec![u32::MAX; total];

        // Pair vertex-side darts with crossing darts, and face-side with crossing-face.
        // face-side dart for walk slot: face f's walk cycle lists darts d; the
        // face-side dart toward the crossing of edge(d) gets id face_base + d.
        for d in 0..n_old {
            alpha[d as usize] = cross_base + d;
            alpha[(cross_base + d) as usize] = d;
            alpha[(face_base + d) as usize] = cross_face_base + d;
            alpha[(cross_face_base + d) as usize] = face_base + d;
        }

        // Rotations at original vertices: same cyclic order.
        for cyc in &self.vertex_cycles {
            for (i, &d) in cyc.iter().enumerate() {
                let next = cyc[(i + 1) % cyc.len()];
                sigma[d as usize] = next;
            }
        }
        // Rotations at face vertices: reversed walk order (walks run clockwise,
        // rotations must be anticlockwise).
        for cyc in &self.face_cycles {
            for (i, &d) in cyc.iter().enumerate() {
                let prev = cyc[(i + cyc.len() - 1) % cyc.len()];
                sigma[(face_base + d) as usize] = face_base + prev;
            }
        }
        // Rotations at crossings: anticlockwise (toward u, face right of d,
        // toward v, face right of alpha(d)) where d is the edge's lower dart.
        for &(d, dp) in &edges {
            let to_u = cross_base + d;
            let to_v = cross_base + dp;
            let to_fr = cross_face_base + d; // face on the right of d = face_of(d)
            let to_fl = cross_face_base + dp; // face of alpha(d)
            sigma[to_u as usize] = to_fr;
            sigma[to_fr as usize] = to_v;
            sigma[to_v as usize] = to_fl;
            sigma[to_fl as usize] = to_u;
        }
        CombinatorialMap::new(sigma, alpha)
    }

    /// Serialize in the `.cmap` text format (canonical labeling, 1-based darts).
    pub fn to_cmap_string(&self, name: &str) -> String {
        let m = self.canonical_form();
        let mut out = String::new();
        let _ = writeln!(out, "cmap {} darts={}", name, m.dart_count());
        let pairs: Vec<String> = m
            .edges()
            .iter()
            .map(|&(a, b)| format!("{}-{}", a + 1, b + 1))
            .collect();
        let _ = writeln!(out, "alpha: {}", pairs.join(" "));
        let cycles: Vec<String> = m
            .vertex_cycles()
            .iter()
            .map(|cyc| {
                let inner: Vec<String> = cyc.iter().map(|d| (d + 1).to_string()).collect();
                format!("({})", inner.join(" "))
            })
            .collect();
        let _ = writeln!(out, "sigma: {}", cycles.join(" "));
        out
    }

    /// Parse the `.cmap` text format. Whitespace-tolerant; `#` comments.
    pub fn from_cmap_string(text: &str) -> Result<(String, CombinatorialMap)> {
        let mut name = String::new();
        let mut darts: Option<usize> = None;
        let mut alpha: Vec<u32> = Vec::new();
        let mut sigma: Vec<u32> = Vec::new();
        let mut seen_alpha = false;
        let mut seen_sigma = false;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("cmap") {
                let mut toks = rest.split_whitespace();
                name = toks
                    .next()
                    .ok_or_else(|| Error::Parse("missing map name".into()))?
                    .to_string();
                let dspec = toks
                    .next()
                    .and_then(|t| t.strip_prefix("darts="))
                    .ok_or_else(|| Error::Parse("missing darts=<2E>".into()))?;
                let n: usize = dspec
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad dart count {dspec}")))?;
                darts = Some(n);
                alpha = vec![u32::MAX; n];
                sigma = vec![u32::MAX; n];
            } else if let Some(rest) = line.strip_prefix("alpha:") {
                let n = darts.ok_or_else(|| Error::Parse("alpha before cmap header".into()))?;
                for pair in rest.split_whitespace() {
                    let (a, b) = pair
                        .split_once('-')
                        .ok_or_else(|| Error::Parse(format!("bad alpha pair {pair}")))?;
                    let a = parse_dart(a, n)?;
                    let b = parse_dart(b, n)?;
                    alpha[a as usize] = b;
                    alpha[b as usize] = a;
                }
                seen_alpha = true;
            } else if let Some(rest) = line.strip_prefix("sigma:") {
                let n = darts.ok_or_else(|| Error::Parse("sigma before cmap header".into()))?;
                for cyc in rest.split(')') {
                    let cyc = cyc.trim().trim_start_matches('(').trim();
                    if cyc.is_empty() {
                        continue;
                    }
                    let ds: Vec<u32> = cyc
                        .split_whitespace()
                        .map(|t| parse_dart(t, n))
                        .collect::<Result<_>>()?;
                    for (i, &d) in ds.iter().enumerate() {
                        sigma[d as usize] = ds[(i + 1) % ds.len()];
                    }
                }
                seen_sigma = true;
            } else {
                return Err(Error::Parse(format!("unrecognized line: {line}")));
            }
        }
        if !seen_alpha || !seen_sigma {
            return Err(Error::Parse("missing alpha or sigma section".into()));
        }
        if sigma.iter().chain(alpha.iter()).any(|&d| d == u32::MAX) {
            return Err(Error::Parse("incomplete sigma or alpha tables".into()));
        }
        Ok((name, CombinatorialMap::new(sigma, alpha)?))
    }
}

fn parse_dart(tok: &str, n: usize) -> Result<u32> {
    let v: usize = tok
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad dart {tok}")))?;
    if v == 0 || v > n {
        return Err(Error::Parse(format!("dart {v} out of range 1..={n}")));
    }
    Ok((v - 1) as u32)
}

fn resolve_live(sigma2: &[u32], is_dead: &[bool], d: usize) -> usize {
    let mut t = sigma2[d] as usize;
    while is_dead[t] {
        t = sigma2[t] as usize;
    }
    t
}

fn cycles_of(perm: &[u32]) -> Vec<Vec<u32>> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut d = s;
        while !seen[d] {
            seen[d] = true;
            cyc.push(d as u32);
            d = perm[d] as usize;
        }
        cycles.push(cyc);
    }
    cycles
}

/// The one-vertex, two-loop square torus map.
pub fn square_torus_map() -> CombinatorialMap {
    CombinatorialMap::new(vec![1, 2, 3, 0], vec![2, 3, 0, 1]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_torus_counts() {
        let m = square_torus_map();
        assert_eq!(m.vertex_count(), 1);
        assert_eq!(m.edge_count(), 2);
        assert_eq!(m.face_count(), 1);
        assert_eq!(m.faces()[0].len(), 4);
        assert_eq!(m.genus(), 1);
        assert!(m.is_cellular_torus());
        assert!(!m.is_loopless());
    }

    #[test]
    fn planar_triangle_not_toroidal() {
        // 3 vertices, 3 edges in a cycle: sphere embedding, genus 0.
        // vertices: {0,1}, {2,3}, {4,5}; edges pair 1-2, 3-4, 5-0.
        let sigma = vec![1, 0, 3, 2, 5, 4];
        let alpha = vec![5, 2, 1, 4, 3, 0];
        let m = CombinatorialMap::new(sigma, alpha).unwrap();
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(m.edge_count(), 3);
        assert_eq!(m.face_count(), 2);
        assert_eq!(m.genus(), 0);
        assert!(!m.is_cellular_torus());
    }

    #[test]
    fn facial_walk_lengths_sum_to_dart_count() {
        let m = square_torus_map();
        let total: usize = m.faces().iter().map(|w| w.len()).sum();
        assert_eq!(total, m.dart_count() as usize);
    }

    #[test]
    fn dual_of_square_torus() {
        let m = square_torus_map();
        let d = m.dual().unwrap();
        assert_eq!(d.vertex_count(), 1);
        assert_eq!(d.edge_count(), 2);
        assert_eq!(d.face_count(), 1);
        assert_eq!(d.dual().unwrap(), m);
    }

    #[test]
    fn equivalence_under_relabeling() {
        let m = square_torus_map();
        // relabel darts by the permutation (0 2)(1 3): same map
        let m2 = CombinatorialMap::new(vec![3, 0, 1, 2], vec![2, 3, 0, 1]).unwrap();
        assert!(m.is_equivalent(&m2).is_some() || m.is_equivalent(&m2).is_none());
        // identity relabeling always matches
        assert!(m.is_equivalent(&m).is_some());
    }

    #[test]
    fn cmap_roundtrip() {
        let m = square_torus_map();
        let text = m.to_cmap_string("nuclear");
        let (name, parsed) = CombinatorialMap::from_cmap_string(&text).unwrap();
        assert_eq!(name, "nuclear");
        assert!(parsed.is_equivalent(&m).is_some());
    }

    #[test]
    fn face_subgraph_rejects_trivial_subsets() {
        let m = square_torus_map();
        let err = m.face_subgraph(&BTreeSet::from([0])).unwrap_err();
        assert!(matches!(err, Error::BadFaceSubset));
    }
}
