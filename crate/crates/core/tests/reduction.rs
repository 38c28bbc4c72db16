//! Reduction pipeline and enumeration counts over the full catalog.

use enf_core::catalog::{catalog, catalog_get, newton3_names};
use enf_core::props::{is_newton_graph, is_newtonian};
use enf_core::pseudo::{
    classify_hat, enumerate_maps, merged_two_face_graphs, reduce, shared_boundary_runs,
    EnumerationSpec, HatCase, ReduceStrategy,
};

#[test]
fn newton2_reduces_uniquely() {
    let m = &catalog_get("newton2").unwrap().map;
    let traces = reduce(m, ReduceStrategy::All).unwrap();
    assert_eq!(traces.len(), 1, "single reduction class for order 2");
    let t = &traces[0];
    assert_eq!((t.rho, t.pruned), (2, 0));
    assert!(t.gcheck.is_equivalent(&t.ghat).is_some());
    assert!(t.ghat.is_equivalent(&catalog_get("ghat2").unwrap().map).is_some());
    let hat = classify_hat(&t.ghat).unwrap();
    assert_eq!(hat.case, HatCase::A1);
    assert!(hat.subwalks.iter().all(|w| w.len() == 1));
}

#[test]
fn all_order3_reductions_satisfy_the_dichotomy() {
    let forms = [
        &catalog_get("gcheck3.a").unwrap().map,
        &catalog_get("gcheck3.b").unwrap().map,
        &catalog_get("gcheck3.c").unwrap().map,
    ];
    let mut some_graph_has_two_outcomes = false;
    for name in newton3_names() {
        let m = &catalog_get(name).unwrap().map;
        let traces = reduce(m, ReduceStrategy::All).unwrap();
        assert!(!traces.is_empty());
        if traces.len() >= 2 {
            some_graph_has_two_outcomes = true;
        }
        for t in &traces {
            assert!((t.rho, t.pruned) == (3, 0) || (t.rho, t.pruned) == (2, 1));
            assert_eq!(t.gcheck.vertex_count(), 3);
            assert_eq!(t.gcheck.edge_count(), 4);
            assert_eq!(t.gcheck.face_count(), 1);
            assert!(
                forms.iter().any(|f| f.is_equivalent(&t.gcheck).is_some()),
                "{name}: reduction not among the three single-face forms"
            );
            // facial walk of the pruned graph has length 2(rho+1) and the
            // decomposition matches the structure case
            let hat = classify_hat(&t.ghat).unwrap();
            assert_eq!(hat.walk.len(), 2 * (t.rho + 1));
            match hat.case {
                HatCase::A1 => assert_eq!(hat.subwalks.len(), 6),
                HatCase::A2 => {
                    assert_eq!(hat.subwalks.len(), 4);
                    for w in &hat.subwalks {
                        assert!(w.len() >= 2, "degree-4 subwalks pass a degree-2 vertex");
                    }
                }
            }
        }
    }
    assert!(
        some_graph_has_two_outcomes,
        "some order-3 Newton graph yields at least two reduction classes"
    );
}

#[test]
fn enumeration_counts_match_the_theory() {
    let count = |v, e, f, min_degree| {
        enumerate_maps(EnumerationSpec {
            vertices: v,
            edges: e,
            faces: Some(f),
            loopless: true,
            min_degree,
            newtonian: false,
        })
        .unwrap()
        .len()
    };
    assert_eq!(count(2, 3, 1, 2), 1, "one pruned order-2 graph");
    assert_eq!(count(3, 4, 1, 2), 2, "two pruned order-3 graphs");
    assert_eq!(count(3, 4, 1, 1), 3, "three single-face order-3 forms");

    let newtonian = |v, e, f| {
        enumerate_maps(EnumerationSpec {
            vertices: v,
            edges: e,
            faces: Some(f),
            loopless: true,
            min_degree: 1,
            newtonian: true,
        })
        .unwrap()
    };
    assert_eq!(newtonian(2, 4, 2).len(), 1, "the order-2 Newton graph is unique");
    assert_eq!(newtonian(3, 6, 3).len(), newton3_names().len());
}

#[test]
fn duals_of_newton_graphs_are_newtonian() {
    for entry in catalog() {
        if !entry.name.starts_with("newton") {
            continue;
        }
        let m = &entry.map;
        assert!(is_newtonian(m), "{} must be Newtonian", entry.name);
        let dual = m.dual().unwrap();
        assert!(
            is_newton_graph(&dual, m.vertex_count()).newtonian,
            "dual of {} must be Newtonian",
            entry.name
        );
    }
}

#[test]
fn pseudo_graphs_are_not_newton_graphs() {
    for name in ["ghat2", "ghat3.a1", "ghat3.a2", "gcheck3.a", "gcheck3.b", "gcheck3.c", "nuclear"] {
        let m = &catalog_get(name).unwrap().map;
        assert!(!is_newtonian(m), "{name} must not be Newtonian");
    }
}

#[test]
fn two_face_merges_of_order3_graphs() {
    for name in newton3_names() {
        let m = &catalog_get(name).unwrap().map;
        let merged = merged_two_face_graphs(m).unwrap();
        assert!(!merged.is_empty());
        for g in &merged {
            assert_eq!(g.map.vertex_count(), 3);
            assert_eq!(g.map.edge_count(), 5);
            assert_eq!(g.map.face_count(), 2);
            // at most one pendant vertex arises from a merge
            let pendants = g.map.degree_multiset().iter().filter(|&&d| d == 1).count();
            assert!(pendants <= 1);
            assert_eq!(g.has_degree1_vertex, pendants == 1);
            // common boundary runs of the two faces have length 1 or 2
            for (f0, f1) in [(0, 1), (1, 0)] {
                for run in shared_boundary_runs(&g.map, f0, f1) {
                    assert!(run <= 2, "{name}: shared run of length {run}");
                }
            }
        }
    }
}

#[test]
fn original_face_pairs_share_short_boundaries() {
    for name in newton3_names() {
        let m = &catalog_get(name).unwrap().map;
        for f0 in 0..m.face_count() {
            for f1 in 0..m.face_count() {
                if f0 == f1 {
                    continue;
                }
                for run in shared_boundary_runs(m, f0, f1) {
                    assert!(run <= 2);
                }
            }
        }
    }
}
