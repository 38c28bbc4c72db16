//! Reduction of Newton graphs to single-face pseudo graphs, structure
//! classification of the pruned results, and exhaustive enumeration of small
//! toroidal maps up to orientation-preserving equivalence.

use std::collections::BTreeMap;

use crate::batch::{self, ExecMode};
use crate::cmap::CombinatorialMap;
use crate::error::{Error, Result};
use crate::props::is_newton_graph;

/// Edge-choice handling for the merge phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReduceStrategy {
    /// Deterministic: always delete the lowest-indexed candidate edge.
    First,
    /// Branch over every candidate at every step; return one trace per
    /// distinct single-face result (up to equivalence).
    All,
}

/// Record of one complete reduction run.
#[derive(Debug, Clone)]
pub struct ReductionTrace {
    pub start: CombinatorialMap,
    /// Edge index deleted at each merge step, relative to the map current at
    /// that step.
    pub merged_edges: Vec<usize>,
    /// Vertex index pruned at each pendant step, relative to the current map.
    pub pruned_vertices: Vec<usize>,
    /// Single-face graph after the merge phase: r vertices, r+1 edges.
    pub gcheck: CombinatorialMap,
    /// Result after pendant pruning: rho vertices of degree >= 2, rho+1 edges.
    pub ghat: CombinatorialMap,
    pub rho: usize,
    /// Number of pruning steps L; rho = r - L.
    pub pruned: usize,
}

/// Run the merge-and-prune reduction on a Newton graph of order r.
pub fn reduce(m: &CombinatorialMap, strategy: ReduceStrategy) -> Result<Vec<ReductionTrace>> {
    let r = m.vertex_count();
    if !is_newton_graph(m, r).newtonian {
        return Err(Error::InvalidMap(
            "reduction requires a Newton graph".into(),
        ));
    }
    let mut traces = Vec::new();
    let mut seen = BTreeMap::new();
    merge_phase(
        m,
        m,
        None,
        &mut Vec::new(),
        strategy,
        &mut traces,
        &mut seen,
    )?;
    Ok(traces)
}

fn merge_phase(
    start: &CombinatorialMap,
    current: &CombinatorialMap,
    merged_face: Option<usize>,
    steps: &mut Vec<usize>,
    strategy: ReduceStrategy,
    traces: &mut Vec<ReductionTrace>,
    seen: &mut BTreeMap<Vec<u32>, ()>,
) -> Result<()> {
    let r = start.vertex_count();
    let k = steps.len();
    // count identities hold at every intermediate step
    debug_assert_eq!(current.vertex_count(), r);
    debug_assert_eq!(current.edge_count(), 2 * r - k);
    debug_assert_eq!(current.face_count(), r - k);

    if current.face_count() == 1 {
        let key = current.canonical_encoding();
        if strategy == ReduceStrategy::All && seen.contains_key(&key) {
            return Ok(());
        }
        seen.insert(key, ());
        traces.push(finish_trace(start, current, steps.clone())?);
        return Ok(());
    }

    // Candidate edges: adjacent to the merged face (any edge on the first
    // step, where the exterior-vertex argument locates one) and to a face not
    // yet merged. Every candidate's endpoints lie in Ext(G(J)).
    let edges = current.edges();
    let candidates: Vec<usize> = edges
        .iter()
        .enumerate()
        .filter(|(_, &(d, dp))| {
            let (f1, f2) = (current.face_of(d), current.face_of(dp));
            if f1 == f2 {
                return false;
            }
            match merged_face {
                None => true,
                Some(mf) => f1 == mf || f2 == mf,
            }
        })
        .map(|(i, _)| i)
        .collect();
    if candidates.is_empty() {
        return Err(Error::InvalidMap(
            "no eligible edge in merge phase; input cannot be Newtonian".into(),
        ));
    }
    let chosen: &[usize] = match strategy {
        ReduceStrategy::First => &candidates[..1],
        ReduceStrategy::All => &candidates[..],
    };
    for &e in chosen {
        let (d, dp) = edges[e];
        let outcome = current.delete_edge_tracked(e)?;
        // the merged face is the one now containing the old neighbors
        let probe = live_dart_near(current, d, dp, &outcome.dart_remap);
        let mf = outcome.map.face_of(probe);
        steps.push(e);
        merge_phase(start, &outcome.map, Some(mf), steps, strategy, traces, seen)?;
        steps.pop();
    }
    Ok(())
}

fn live_dart_near(
    old: &CombinatorialMap,
    d: u32,
    dp: u32,
    remap: &[u32],
) -> u32 {
    // A surviving dart of either merged face.
    for f in [old.face_of(d), old.face_of(dp)] {
        for &x in &old.faces()[f] {
            if remap[x as usize] != u32::MAX {
                return remap[x as usize];
            }
        }
    }
    unreachable!("merged faces of a Newton graph contain more than one edge")
}

fn finish_trace(
    start: &CombinatorialMap,
    gcheck: &CombinatorialMap,
    merged_edges: Vec<usize>,
) -> Result<ReductionTrace> {
    let r = start.vertex_count();
    debug_assert_eq!(gcheck.edge_count(), r + 1);
    let mut ghat = gcheck.clone();
    let mut pruned_vertices = Vec::new();
    loop {
        let v = (0..ghat.vertex_count()).find(|&v| ghat.degree(v) == 1);
        match v {
            Some(v) => {
                ghat = ghat.delete_deg1_vertex(v)?;
                pruned_vertices.push(v);
            }
            None => break,
        }
    }
    let pruned = pruned_vertices.len();
    if pruned >= r - 1 {
        return Err(Error::InvalidMap(format!(
            "pruned {pruned} vertices from an order-{r} graph; L < r-1 must hold"
        )));
    }
    Ok(ReductionTrace {
        start: start.clone(),
        merged_edges,
        pruned_vertices,
        rho: ghat.vertex_count(),
        pruned,
        gcheck: gcheck.clone(),
        ghat,
    })
}

/// Structure case of a pruned single-face graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HatCase {
    /// Two vertices of degree 3, the rest of degree 2.
    A1,
    /// One vertex of degree 4, the rest of degree 2.
    A2,
}

/// Facial-walk decomposition of a pruned single-face graph.
#[derive(Debug, Clone)]
pub struct HatClassification {
    pub case: HatCase,
    /// The single facial walk (darts), length 2(rho+1).
    pub walk: Vec<u32>,
    /// Subwalks between vertices of degree > 2, in walk order.
    pub subwalks: Vec<Vec<u32>>,
}

/// Verify the structure of a graph with one face, V+1 edges, minimum degree
/// at least 2 and no loops, and decompose its facial walk.
pub fn classify_hat(m: &CombinatorialMap) -> Result<HatClassification> {
    if !m.is_cellular_torus() || m.face_count() != 1 {
        return Err(Error::InvalidMap(
            "expected a single-face cellular toroidal map".into(),
        ));
    }
    let rho = m.vertex_count();
    if m.edge_count() != rho + 1 {
        return Err(Error::InvalidMap(format!(
            "expected {} edges for {} vertices, found {}",
            rho + 1,
            rho,
            m.edge_count()
        )));
    }
    if !m.is_loopless() {
        return Err(Error::InvalidMap("loops are excluded".into()));
    }
    let mut degrees = m.degree_multiset();
    if degrees.first().is_some_and(|&d| d < 2) {
        return Err(Error::InvalidMap("minimum degree must be 2".into()));
    }
    degrees.reverse();
    let case = if degrees[0] == 3 && degrees[1] == 3 && degrees[2..].iter().all(|&d| d == 2) {
        HatCase::A1
    } else if degrees[0] == 4 && degrees[1..].iter().all(|&d| d == 2) {
        HatCase::A2
    } else {
        return Err(Error::InvalidMap(format!(
            "degree multiset {degrees:?} violates the two-case dichotomy"
        )));
    };

    let walk = m.faces()[0].clone();
    if walk.len() != 2 * (rho + 1) {
        return Err(Error::InvalidMap(format!(
            "facial walk length {} != 2(rho+1) = {}",
            walk.len(),
            2 * (rho + 1)
        )));
    }

    // Cut the walk at every visit to a vertex of degree > 2.
    let n = walk.len();
    let cuts: Vec<usize> = (0..n)
        .filter(|&i| m.degree(m.vertex_of(walk[i])) > 2)
        .collect();
    let expected_subwalks = match case {
        HatCase::A1 => 6,
        HatCase::A2 => 4,
    };
    if cuts.len() != expected_subwalks {
        return Err(Error::InvalidMap(format!(
            "expected {} subwalks, found {} cut points",
            expected_subwalks,
            cuts.len()
        )));
    }
    let mut subwalks = Vec::with_capacity(cuts.len());
    for (ci, &c) in cuts.iter().enumerate() {
        let end = cuts[(ci + 1) % cuts.len()];
        let mut w = Vec::new();
        let mut i = c;
        loop {
            w.push(walk[i]);
            i = (i + 1) % n;
            if i == end {
                break;
            }
        }
        subwalks.push(w);
    }

    let inverse = |w: &[u32]| -> Vec<u32> {
        w.iter().rev().map(|&d| m.alpha(d)).collect()
    };
    let half = subwalks.len() / 2;
    for i in 0..half {
        if subwalks[(i + half) % subwalks.len()] != inverse(&subwalks[i]) {
            return Err(Error::InvalidMap(format!(
                "subwalk {} is not the inverse of subwalk {}",
                (i + half) % subwalks.len(),
                i
            )));
        }
    }
    // A subwalk and its inverse are never consecutive.
    for i in 0..subwalks.len() {
        let next = &subwalks[(i + 1) % subwalks.len()];
        if *next == inverse(&subwalks[i]) {
            return Err(Error::InvalidMap(format!(
                "subwalk {i} is followed by its own inverse"
            )));
        }
    }
    match case {
        HatCase::A1 => {
            // each subwalk connects the two distinct degree-3 vertices
            for w in &subwalks {
                let a = m.vertex_of(w[0]);
                let b = m.vertex_of(m.alpha(*w.last().unwrap()));
                if a == b {
                    return Err(Error::InvalidMap(
                        "degree-3 subwalk endpoints coincide".into(),
                    ));
                }
            }
        }
        HatCase::A2 => {
            // each subwalk passes through at least one degree-2 vertex
            for w in &subwalks {
                let interior_deg2 = w
                    .iter()
                    .skip(1)
                    .any(|&d| m.degree(m.vertex_of(d)) == 2);
                if !interior_deg2 {
                    return Err(Error::InvalidMap(
                        "degree-4 subwalk without an interior degree-2 vertex".into(),
                    ));
                }
            }
        }
    }
    Ok(HatClassification {
        case,
        walk,
        subwalks,
    })
}

/// Constraints for exhaustive map enumeration.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationSpec {
    pub vertices: u32,
    pub edges: u32,
    /// Required face count; `None` accepts any cellular toroidal map.
    pub faces: Option<u32>,
    pub loopless: bool,
    pub min_degree: u32,
    /// Keep only Newton graphs of order `vertices`.
    pub newtonian: bool,
}

const DART_BUDGET: u32 = 16;

/// All connected cellularly embedded toroidal maps with the given counts, one
/// canonical representative per equivalence class, in canonical-encoding order.
pub fn enumerate_maps(spec: EnumerationSpec) -> Result<Vec<CombinatorialMap>> {
    enumerate_maps_with(spec, ExecMode::default())
}

pub fn enumerate_maps_with(
    spec: EnumerationSpec,
    mode: ExecMode,
) -> Result<Vec<CombinatorialMap>> {
    let darts = 2 * spec.edges;
    if darts > DART_BUDGET {
        return Err(Error::BudgetExceeded {
            darts,
            limit: DART_BUDGET,
        });
    }
    if spec.vertices == 0 || spec.edges == 0 {
        return Err(Error::InvalidMap("need at least one vertex and edge".into()));
    }

    // Degree sequences: non-increasing, summing to 2E, each >= min degree.
    let mut sequences = Vec::new();
    degree_sequences(
        darts,
        spec.vertices,
        spec.min_degree.max(1),
        darts,
        &mut Vec::new(),
        &mut sequences,
    );

    // Every equivalence class has a representative in which each vertex's
    // rotation is a block of consecutive darts, so enumerating pairings over
    // block rotations with frozen sigma covers all classes.
    let mut jobs = Vec::new();
    for seq in &sequences {
        let mut sigma = Vec::with_capacity(darts as usize);
        let mut vertex_of = Vec::with_capacity(darts as usize);
        let mut start = 0u32;
        for (vi, &deg) in seq.iter().enumerate() {
            for i in 0..deg {
                sigma.push(start + (i + 1) % deg);
                vertex_of.push(vi as u32);
            }
            start += deg;
        }
        // branch on the partner of dart 0
        for partner in 1..darts {
            if spec.loopless && vertex_of[partner as usize] == vertex_of[0] {
                continue;
            }
            jobs.push((sigma.clone(), vertex_of.clone(), partner));
        }
    }

    let results = batch::map(mode, jobs, |(sigma, vertex_of, partner)| {
        let mut alpha = vec![u32::MAX; darts as usize];
        alpha[0] = partner;
        alpha[partner as usize] = 0;
        let mut found = BTreeMap::new();
        pair_remaining(&sigma, &vertex_of, &mut alpha, &spec, &mut found);
        found
    });

    let mut merged: BTreeMap<Vec<u32>, CombinatorialMap> = BTreeMap::new();
    for part in results {
        merged.extend(part);
    }
    Ok(merged.into_values().collect())
}

fn degree_sequences(
    remaining: u32,
    slots: u32,
    min: u32,
    max: u32,
    acc: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if slots == 0 {
        if remaining == 0 {
            out.push(acc.clone());
        }
        return;
    }
    let lo = min;
    let hi = max.min(remaining.saturating_sub(min * (slots - 1)));
    for d in lo..=hi {
        acc.push(d);
        degree_sequences(remaining - d, slots - 1, min, d, acc, out);
        acc.pop();
    }
}

fn pair_remaining(
    sigma: &[u32],
    vertex_of: &[u32],
    alpha: &mut Vec<u32>,
    spec: &EnumerationSpec,
    found: &mut BTreeMap<Vec<u32>, CombinatorialMap>,
) {
    let first_free = alpha.iter().position(|&a| a == u32::MAX);
    let Some(d) = first_free else {
        finalize_candidate(sigma, alpha, spec, found);
        return;
    };
    for p in (d + 1)..alpha.len() {
        if alpha[p] != u32::MAX {
            continue;
        }
        if spec.loopless && vertex_of[p] == vertex_of[d] {
            continue;
        }
        alpha[d] = p as u32;
        alpha[p] = d as u32;
        pair_remaining(sigma, vertex_of, alpha, spec, found);
        alpha[d] = u32::MAX;
        alpha[p] = u32::MAX;
    }
}

fn finalize_candidate(
    sigma: &[u32],
    alpha: &[u32],
    spec: &EnumerationSpec,
    found: &mut BTreeMap<Vec<u32>, CombinatorialMap>,
) {
    let Ok(m) = CombinatorialMap::new(sigma.to_vec(), alpha.to_vec()) else {
        return; // disconnected
    };
    if !m.is_cellular_torus() {
        return;
    }
    if let Some(f) = spec.faces {
        if m.face_count() != f as usize {
            return;
        }
    }
    if spec.newtonian && !is_newton_graph(&m, spec.vertices as usize).newtonian {
        return;
    }
    let key = m.canonical_encoding();
    found.entry(key).or_insert_with(|| m.canonical_form());
}

/// A two-face graph obtained from an order-3 Newton graph by one edge merge.
#[derive(Debug, Clone)]
pub struct MergedGraph {
    pub map: CombinatorialMap,
    /// Footnote dichotomy: merged faces leave either min degree >= 2 or one
    /// pendant vertex.
    pub has_degree1_vertex: bool,
    /// Per edge: whether the edge still borders two distinct faces.
    pub edges_on_two_faces: Vec<bool>,
}

/// All inequivalent two-face merges of an order-3 Newton graph.
pub fn merged_two_face_graphs(m: &CombinatorialMap) -> Result<Vec<MergedGraph>> {
    if !is_newton_graph(m, 3).newtonian {
        return Err(Error::InvalidMap(
            "two-face merges are defined for order-3 Newton graphs".into(),
        ));
    }
    let mut out: BTreeMap<Vec<u32>, MergedGraph> = BTreeMap::new();
    for e in 0..m.edge_count() {
        let res = m.delete_edge(e, false)?.map;
        debug_assert_eq!(res.vertex_count(), 3);
        debug_assert_eq!(res.edge_count(), 5);
        debug_assert_eq!(res.face_count(), 2);
        let key = res.canonical_encoding();
        out.entry(key).or_insert_with(|| MergedGraph {
            has_degree1_vertex: res.degree_multiset().contains(&1),
            edges_on_two_faces: res
                .edges()
                .iter()
                .map(|&(d, dp)| res.face_of(d) != res.face_of(dp))
                .collect(),
            map: res,
        });
    }
    Ok(out.into_values().collect())
}

/// Classify a single-face order-3 map into one of the three forms by its
/// degree multiset, the discriminating invariant.
pub fn single_face_form(m: &CombinatorialMap) -> Option<&'static str> {
    if m.vertex_count() != 3
        || m.edge_count() != 4
        || m.face_count() != 1
        || !m.is_cellular_torus()
        || !m.is_loopless()
    {
        return None;
    }
    match m.degree_multiset().as_slice() {
        [1, 3, 4] => Some("gcheck3.a"),
        [2, 3, 3] => Some("gcheck3.b"),
        [2, 2, 4] => Some("gcheck3.c"),
        _ => None,
    }
}

/// Maximal common-subwalk lengths between the boundaries of two faces.
///
/// A common subwalk is a sequence of edges consecutive in the walk of `f0`
/// whose reversal is consecutive in the walk of `f1` (the two walks traverse
/// shared boundary in opposite directions).
pub fn shared_boundary_runs(m: &CombinatorialMap, f0: usize, f1: usize) -> Vec<usize> {
    let borders = |d: u32| m.face_of(d) == f0 && m.face_of(m.alpha(d)) == f1;
    // run continues d -> phi(d) when both border f1 and the alpha images are
    // consecutive (in reverse) in f1's walk
    let extends = |d: u32| {
        let nd = m.phi(d);
        borders(nd) && m.phi(m.alpha(nd)) == m.alpha(d)
    };
    let walk = &m.faces()[f0];
    let starts: Vec<u32> = walk
        .iter()
        .copied()
        .filter(|&d| borders(d) && !(borders(prev_in_walk(m, d)) && extends(prev_in_walk(m, d))))
        .collect();
    if starts.is_empty() {
        if let Some(&d0) = walk.iter().find(|&&d| borders(d)) {
            // every bordering dart extends: single cyclic run
            let len = walk.iter().filter(|&&d| borders(d)).count();
            let _ = d0;
            return vec![len];
        }
        return Vec::new();
    }
    starts
        .into_iter()
        .map(|mut d| {
            let mut len = 1;
            while extends(d) {
                d = m.phi(d);
                len += 1;
            }
            len
        })
        .collect()
}

fn prev_in_walk(m: &CombinatorialMap, d: u32) -> u32 {
    // phi-predecessor
    let mut p = d;
    while m.phi(p) != d {
        p = m.phi(p);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_sequences_small() {
        let mut out = Vec::new();
        degree_sequences(6, 2, 2, 6, &mut Vec::new(), &mut out);
        // non-increasing sequences summing to 6
        assert_eq!(out, vec![vec![3, 3], vec![4, 2]]);
    }

    #[test]
    fn enumerate_ghat2_unique() {
        let spec = EnumerationSpec {
            vertices: 2,
            edges: 3,
            faces: Some(1),
            loopless: true,
            min_degree: 2,
            newtonian: false,
        };
        let classes = enumerate_maps(spec).unwrap();
        assert_eq!(classes.len(), 1);
        let m = &classes[0];
        assert_eq!(m.degree_multiset(), vec![3, 3]);
        let hat = classify_hat(m).unwrap();
        assert_eq!(hat.case, HatCase::A1);
        assert!(hat.subwalks.iter().all(|w| w.len() == 1));
    }

    #[test]
    fn budget_is_enforced() {
        let spec = EnumerationSpec {
            vertices: 5,
            edges: 9,
            faces: None,
            loopless: false,
            min_degree: 1,
            newtonian: false,
        };
        assert!(matches!(
            enumerate_maps(spec),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
