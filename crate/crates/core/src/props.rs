//! Decision procedures for the angle (A) and Euler (E) properties and full
//! Newton-graph verification.
//!
//! The A-property is decided by the Hall-type condition |J| < |V(G(J))| over
//! all proper nonempty face subsets J. An independent oracle decides the same
//! property as a feasibility question: do strictly positive corner weights
//! exist with every vertex's sectors summing to one full turn and every
//! face's sectors summing to at least one turn? That question is solved
//! exactly as an integer max-flow with lower bounds.

use std::collections::BTreeSet;

use crate::cmap::CombinatorialMap;
use crate::error::Result;

/// Outcome of the property checks on one map.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub order: usize,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub face_count: usize,
    pub counts_ok: bool,
    pub loopless: bool,
    pub cellular: bool,
    pub a_property: bool,
    /// Violating face subset when the A-property fails.
    pub a_witness: Option<Vec<usize>>,
    pub e_property: bool,
    /// Offending edge index when the E-property fails.
    pub e_witness: Option<usize>,
    pub newtonian: bool,
}

impl PropertyReport {
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("order={}\n", self.order));
        s.push_str(&format!("vertices={}\n", self.vertex_count));
        s.push_str(&format!("edges={}\n", self.edge_count));
        s.push_str(&format!("faces={}\n", self.face_count));
        s.push_str(&format!("counts_ok={}\n", self.counts_ok));
        s.push_str(&format!("loopless={}\n", self.loopless));
        s.push_str(&format!("cellular={}\n", self.cellular));
        s.push_str(&format!("a_property={}\n", self.a_property));
        if let Some(w) = &self.a_witness {
            let faces: Vec<String> = w.iter().map(|f| f.to_string()).collect();
            s.push_str(&format!("a_witness={}\n", faces.join(",")));
        }
        s.push_str(&format!("e_property={}\n", self.e_property));
        if let Some(e) = self.e_witness {
            s.push_str(&format!("e_witness={e}\n"));
        }
        s.push_str(&format!("newtonian={}\n", self.newtonian));
        s
    }
}

/// Hall condition: |J| < |V(G(J))| for every nonempty proper face subset J.
/// Returns the first violating subset (increasing size, then lexicographic).
pub fn hall_a_check(m: &CombinatorialMap) -> (bool, Option<Vec<usize>>) {
    let f = m.face_count();
    if f <= 1 {
        return (true, None); // vacuous
    }
    let mut subsets: Vec<u32> = (1..((1u32 << f) - 1)).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    for s in subsets {
        let faces: BTreeSet<usize> = (0..f).filter(|i| s >> i & 1 == 1).collect();
        let sub = m
            .face_subgraph(&faces)
            .expect("proper nonempty subset by construction");
        if faces.len() >= sub.vertices.len() {
            return (false, Some(faces.into_iter().collect()));
        }
    }
    (true, None)
}

/// Angle-feasibility oracle for the A-property.
///
/// Decides whether strictly positive rational sector weights exist with all
/// sectors at a vertex summing to 1 and all sectors of a face summing to at
/// least 1 (face totals are forced to the pole multiplicities, which sum to
/// the vertex count). Strict positivity is equivalent to feasibility with a
/// uniform lower bound of 1/(2E) per sector, so everything is scaled by 2E
/// and solved as an integer max-flow with lower bounds.
pub fn angle_feasibility(m: &CombinatorialMap) -> bool {
    let v_count = m.vertex_count();
    let f_count = m.face_count();
    let darts = m.dart_count() as usize; // one sector per dart
    let scale = darts as i64;

    // Nodes: 0 = S, 1..=V vertices, V+1..=V+F faces, V+F+1 = T.
    let s = 0usize;
    let t = v_count + f_count + 1;
    let node_count = t + 1;
    let vertex_node = |v: usize| 1 + v;
    let face_node = |f: usize| 1 + v_count + f;

    let inf: i64 = i64::MAX / 4;
    let mut net = MaxFlow::new(node_count);
    let mut excess = vec![0i64; node_count];

    // S -> vertex with bounds [scale, scale].
    for v in 0..v_count {
        add_bounded(&mut net, &mut excess, s, vertex_node(v), scale, scale);
    }
    // Sector arcs: corner at dart y sits at vertex_of(y) in face_of(alpha(y)),
    // bounds [1, inf].
    for y in 0..darts as u32 {
        let v = m.vertex_of(y);
        let f = m.face_of(m.alpha(y));
        add_bounded(&mut net, &mut excess, vertex_node(v), face_node(f), 1, inf);
    }
    // face -> T with bounds [scale, inf].
    for f in 0..f_count {
        add_bounded(&mut net, &mut excess, face_node(f), t, scale, inf);
    }
    // Close the circulation.
    net.add_edge(t, s, inf);

    // Standard lower-bound transformation: super source/sink absorb excesses.
    let ss = net.add_node();
    let tt = net.add_node();
    let mut need = 0i64;
    for (node, &e) in excess.iter().enumerate() {
        if e > 0 {
            net.add_edge(ss, node, e);
            need += e;
        } else if e < 0 {
            net.add_edge(node, tt, -e);
        }
    }
    net.max_flow(ss, tt) == need
}

fn add_bounded(
    net: &mut MaxFlow,
    excess: &mut [i64],
    from: usize,
    to: usize,
    low: i64,
    cap: i64,
) {
    net.add_edge(from, to, cap - low);
    excess[to] += low;
    excess[from] -= low;
}

/// E-property: every edge's two darts lie in two distinct facial walks.
/// Equivalently, the dual is loopless. Returns the first offending edge.
pub fn euler_e_check(m: &CombinatorialMap) -> (bool, Option<usize>) {
    for (i, (d, dp)) in m.edges().into_iter().enumerate() {
        if m.face_of(d) == m.face_of(dp) {
            return (false, Some(i));
        }
    }
    (true, None)
}

/// Full Newton-graph verification: r vertices, 2r edges, r faces, loopless,
/// cellular on the torus, with both the A- and E-properties.
pub fn is_newton_graph(m: &CombinatorialMap, r: usize) -> PropertyReport {
    let counts_ok = m.vertex_count() == r && m.edge_count() == 2 * r && m.face_count() == r;
    let loopless = m.is_loopless();
    let cellular = m.is_cellular_torus();
    let (a_property, a_witness) = hall_a_check(m);
    let (e_property, e_witness) = euler_e_check(m);
    PropertyReport {
        order: r,
        vertex_count: m.vertex_count(),
        edge_count: m.edge_count(),
        face_count: m.face_count(),
        counts_ok,
        loopless,
        cellular,
        a_property,
        a_witness,
        e_property,
        e_witness,
        newtonian: counts_ok && loopless && cellular && a_property && e_property,
    }
}

/// Convenience: true iff `is_newton_graph(m, r)` succeeds for r = V(m).
pub fn is_newtonian(m: &CombinatorialMap) -> bool {
    is_newton_graph(m, m.vertex_count()).newtonian
}

/// Exterior-set nonemptiness under the A-property: returns true when every
/// admissible face subset has a nonempty exterior vertex set.
pub fn exterior_nonempty_all(m: &CombinatorialMap) -> Result<bool> {
    let f = m.face_count();
    for s in 1..((1u32 << f) - 1) {
        let faces: BTreeSet<usize> = (0..f).filter(|i| s >> i & 1 == 1).collect();
        if m.face_subgraph(&faces)?.exterior.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Dense little max-flow (Edmonds-Karp); networks here have tens of nodes.
struct MaxFlow {
    first: Vec<i32>,
    to: Vec<usize>,
    next: Vec<i32>,
    cap: Vec<i64>,
}

impl MaxFlow {
    fn new(nodes: usize) -> Self {
        MaxFlow {
            first: vec![-1; nodes],
            to: Vec::new(),
            next: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add_node(&mut self) -> usize {
        self.first.push(-1);
        self.first.len() - 1
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64) {
        for (u, v, c) in [(from, to, cap), (to, from, 0)] {
            self.to.push(v);
            self.cap.push(c);
            self.next.push(self.first[u]);
            self.first[u] = (self.to.len() - 1) as i32;
        }
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        loop {
            let mut pred: Vec<i32> = vec![-1; self.first.len()];
            let mut queue = std::collections::VecDeque::from([s]);
            pred[s] = -2;
            'bfs: while let Some(u) = queue.pop_front() {
                let mut e = self.first[u];
                while e >= 0 {
                    let v = self.to[e as usize];
                    if pred[v] == -1 && self.cap[e as usize] > 0 {
                        pred[v] = e;
                        if v == t {
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                    e = self.next[e as usize];
                }
            }
            if pred[t] == -1 {
                return flow;
            }
            let mut push = i64::MAX;
            let mut v = t;
            while v != s {
                let e = pred[v] as usize;
                push = push.min(self.cap[e]);
                v = self.to[e ^ 1];
            }
            let mut v = t;
            while v != s {
                let e = pred[v] as usize;
                self.cap[e] -= push;
                self.cap[e ^ 1] += push;
                v = self.to[e ^ 1];
            }
            flow += push;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmap::square_torus_map;

    #[test]
    fn nuclear_map_properties() {
        let m = square_torus_map();
        let (a, _) = hall_a_check(&m);
        assert!(a, "single-face map satisfies the Hall condition vacuously");
        assert!(angle_feasibility(&m));
        let (e, w) = euler_e_check(&m);
        assert!(!e, "every edge of the one-face map repeats in its walk");
        assert!(w.is_some());
        assert!(!is_newton_graph(&m, 1).newtonian);
    }

    #[test]
    fn feasibility_matches_hall_on_sphere_map() {
        // planar triangle: V=3, E=3, F=2; every face meets all 3 vertices
        let m = crate::cmap::CombinatorialMap::new(
            vec![1, 0, 3, 2, 5, 4],
            vec![5, 2, 1, 4, 3, 0],
        )
        .unwrap();
        let (hall, _) = hall_a_check(&m);
        assert_eq!(hall, angle_feasibility(&m));
    }
}
