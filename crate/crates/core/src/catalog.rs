//! Named reference maps: the Newton graphs of order 2 and 3, the single-face
//! reductions, and the one-vertex nuclear graph.
//!
//! Entries are shipped as `.cmap` files under `data/catalog` and embedded at
//! compile time. Every entry is gated by its defining checks on first load:
//! counts, degree multiset, and the Newton/pseudo-Newton properties it is
//! supposed to satisfy.

use std::sync::OnceLock;

use crate::cmap::CombinatorialMap;
use crate::error::{Error, Result};
use crate::props::is_newton_graph;
use crate::pseudo::classify_hat;

/// One catalog entry.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub map: CombinatorialMap,
    pub description: &'static str,
}

macro_rules! embedded {
    ($name:literal, $file:literal, $desc:literal) => {
        (
            $name,
            include_str!(concat!("../../../data/catalog/", $file)),
            $desc,
        )
    };
}

const RAW: &[(&str, &str, &str)] = &[
    embedded!("nuclear", "nuclear.cmap", "one vertex, two loops, one face"),
    embedded!("ghat2", "ghat2.cmap", "pruned order-2 reduction: two degree-3 vertices"),
    embedded!(
        "ghat3.a1",
        "ghat3_a1.cmap",
        "pruned order-3 reduction, two degree-3 vertices"
    ),
    embedded!(
        "ghat3.a2",
        "ghat3_a2.cmap",
        "pruned order-3 reduction, one degree-4 vertex"
    ),
    embedded!(
        "gcheck3.a",
        "gcheck3_a.cmap",
        "single-face order-3 form with a pendant vertex, degrees {1,3,4}"
    ),
    embedded!(
        "gcheck3.b",
        "gcheck3_b.cmap",
        "single-face order-3 form, degrees {2,3,3}"
    ),
    embedded!(
        "gcheck3.c",
        "gcheck3_c.cmap",
        "single-face order-3 form, degrees {2,2,4}"
    ),
    embedded!("newton2", "newton2.cmap", "the unique order-2 Newton graph"),
    embedded!("newton3.i", "newton3_i.cmap", "order-3 Newton graph 1 of 14"),
    embedded!("newton3.ii", "newton3_ii.cmap", "order-3 Newton graph 2 of 14"),
    embedded!("newton3.iii", "newton3_iii.cmap", "order-3 Newton graph 3 of 14"),
    embedded!("newton3.iv", "newton3_iv.cmap", "order-3 Newton graph 4 of 14"),
    embedded!("newton3.v", "newton3_v.cmap", "order-3 Newton graph 5 of 14"),
    embedded!("newton3.vi", "newton3_vi.cmap", "order-3 Newton graph 6 of 14"),
    embedded!("newton3.vii", "newton3_vii.cmap", "order-3 Newton graph 7 of 14"),
    embedded!("newton3.viii", "newton3_viii.cmap", "order-3 Newton graph 8 of 14"),
    embedded!("newton3.ix", "newton3_ix.cmap", "order-3 Newton graph 9 of 14"),
    embedded!("newton3.x", "newton3_x.cmap", "order-3 Newton graph 10 of 14"),
    embedded!("newton3.xi", "newton3_xi.cmap", "order-3 Newton graph 11 of 14"),
    embedded!("newton3.xii", "newton3_xii.cmap", "order-3 Newton graph 12 of 14"),
    embedded!("newton3.xiii", "newton3_xiii.cmap", "order-3 Newton graph 13 of 14"),
    embedded!("newton3.xiv", "newton3_xiv.cmap", "order-3 Newton graph 14 of 14"),
];

fn build() -> Vec<CatalogEntry> {
    let mut entries = Vec::with_capacity(RAW.len());
    for &(name, text, description) in RAW {
        let (_, map) =
            CombinatorialMap::from_cmap_string(text).expect("embedded catalog entry parses");
        validate(name, &map).expect("embedded catalog entry passes its defining checks");
        entries.push(CatalogEntry {
            name,
            map,
            description,
        });
    }
    entries
}

fn validate(name: &str, m: &CombinatorialMap) -> Result<()> {
    let fail = |msg: &str| Err(Error::InvalidMap(format!("catalog {name}: {msg}")));
    if !m.is_cellular_torus() {
        return fail("not cellular on the torus");
    }
    match name {
        "nuclear" => {
            if m.vertex_count() != 1 || m.edge_count() != 2 || m.face_count() != 1 {
                return fail("nuclear graph must have one vertex, two edges, one face");
            }
        }
        "newton2" => {
            if !is_newton_graph(m, 2).newtonian {
                return fail("must be a Newton graph of order 2");
            }
        }
        n if n.starts_with("newton3") => {
            if !is_newton_graph(m, 3).newtonian {
                return fail("must be a Newton graph of order 3");
            }
        }
        "ghat2" => {
            classify_hat(m).map_err(|e| Error::InvalidMap(format!("catalog {name}: {e}")))?;
            if m.vertex_count() != 2 {
                return fail("expected two vertices");
            }
        }
        n if n.starts_with("ghat3") => {
            let c = classify_hat(m).map_err(|e| Error::InvalidMap(format!("catalog {name}: {e}")))?;
            let want = if n.ends_with("a1") {
                crate::pseudo::HatCase::A1
            } else {
                crate::pseudo::HatCase::A2
            };
            if c.case != want {
                return fail("hat case mismatch");
            }
        }
        n if n.starts_with("gcheck3") => {
            let degs = m.degree_multiset();
            let want: &[usize] = match n {
                "gcheck3.a" => &[1, 3, 4],
                "gcheck3.b" => &[2, 3, 3],
                _ => &[2, 2, 4],
            };
            if degs != want || m.face_count() != 1 || m.edge_count() != 4 || !m.is_loopless() {
                return fail("single-face order-3 form counts/degrees mismatch");
            }
        }
        _ => return fail("unknown catalog entry"),
    }
    Ok(())
}

fn entries() -> &'static [CatalogEntry] {
    static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(build)
}

/// All entries in a fixed order.
pub fn catalog() -> &'static [CatalogEntry] {
    entries()
}

/// Look up one entry by name.
pub fn catalog_get(name: &str) -> Result<&'static CatalogEntry> {
    entries()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCatalogName(name.to_string()))
}

/// Names of the order-3 Newton graph entries.
pub fn newton3_names() -> Vec<&'static str> {
    entries()
        .iter()
        .map(|e| e.name)
        .filter(|n| n.starts_with("newton3"))
        .collect()
}
