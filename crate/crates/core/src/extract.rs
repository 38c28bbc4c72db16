//! Building the embedded graph of a flow from its integrated phase portrait:
//! vertices at attractors, one edge through each saddle formed by its two
//! unstable separatrices, faces validated against the pole basins. Includes
//! homology wrap numbers from trajectory lifts and catalog identification.

use num_complex::Complex64;

use crate::batch::{self, ExecMode};
use crate::catalog;
use crate::cmap::CombinatorialMap;
use crate::error::{Error, Result};
use crate::flow::{EquilibriumKind, Flow};
use crate::integrate::{
    integrate, trace_separatrices, Direction, IntegrateOptions, Separatrix, Stability, Terminal,
};

/// Geometry attached to one dart of the extracted map.
#[derive(Debug, Clone)]
pub struct DartGeometry {
    /// Arrival direction at the vertex, radians.
    pub arrival_angle: f64,
    /// Planar lift of the separatrix branch, saddle end first.
    pub polyline: Vec<Complex64>,
    /// Conserved arg f on the branch, in turns.
    pub argf_turns: f64,
}

/// The embedded graph extracted from a flow.
#[derive(Debug, Clone)]
pub struct ExtractedGraph {
    pub map: CombinatorialMap,
    /// Equilibrium index of the attractor at map vertex `i`.
    pub vertex_equilibria: Vec<usize>,
    /// Equilibrium index of the repellor whose basin is face `j`.
    pub face_poles: Vec<usize>,
    /// Equilibrium index of the saddle on edge `k`.
    pub edge_saddles: Vec<usize>,
    /// Homology class of each edge in lattice coordinates (for a loop edge,
    /// of the closed vertex-saddle-vertex path; otherwise relative to the
    /// in-cell vertex representatives).
    pub edge_wraps: Vec<(i64, i64)>,
    /// Per dart, indexed like the map's darts.
    pub dart_geometry: Vec<DartGeometry>,
}

#[derive(Debug, Clone, Copy)]
pub struct ExtractOptions {
    pub integrate: IntegrateOptions,
    pub mode: ExecMode,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            integrate: IntegrateOptions::default(),
            mode: ExecMode::default(),
        }
    }
}

const LIFT_RESIDUAL_TOL: f64 = 0.01;
const ROTATION_TIE: f64 = 1e-6;

/// Extract the embedded graph of the flow.
///
/// Refused when a saddle is non-simple or a saddle connection exists; both
/// are exactly the degeneracies that make the graph ill-defined.
pub fn extract_graph(flow: &Flow) -> Result<ExtractedGraph> {
    extract_graph_with(flow, ExtractOptions::default())
}

pub fn extract_graph_with(flow: &Flow, opts: ExtractOptions) -> Result<ExtractedGraph> {
    let lat = *flow.field().lattice();
    for (_, s) in flow.saddles() {
        if !s.simple {
            return Err(Error::NonSimpleSaddle(s.location));
        }
    }
    let saddle_ids: Vec<usize> = flow.saddles().map(|(i, _)| i).collect();
    let traced: Vec<Result<Vec<Separatrix>>> = batch::map(opts.mode, saddle_ids.clone(), |i| {
        trace_separatrices(flow, i, opts.integrate)
    });

    // one edge per saddle from its unstable branch pair
    struct Branch {
        endpoint: usize,
        arrival: f64,
        lift: Vec<Complex64>,
        argf: f64,
    }
    let mut edges: Vec<[Branch; 2]> = Vec::new();
    for (k, res) in traced.into_iter().enumerate() {
        let seps = res?;
        let mut pair = Vec::new();
        for s in seps.into_iter().filter(|s| s.stability == Stability::Unstable) {
            let endpoint = match (s.path.terminal, s.endpoint) {
                (Terminal::Equilibrium(e), Some(_)) => e,
                _ => {
                    return Err(Error::ExtractionValidation(format!(
                        "unstable separatrix of saddle {} did not resolve",
                        saddle_ids[k]
                    )))
                }
            };
            match flow.equilibria()[endpoint].kind {
                EquilibriumKind::Attractor => {}
                EquilibriumKind::Saddle => {
                    return Err(Error::SaddleConnection(saddle_ids[k], endpoint))
                }
                EquilibriumKind::Repellor => {
                    return Err(Error::ExtractionValidation(
                        "unstable separatrix terminated at a repellor".into(),
                    ))
                }
            }
            pair.push(Branch {
                endpoint,
                arrival: arrival_angle(&s.path.lift)?,
                lift: s.path.lift,
                argf: s.argf_turns,
            });
        }
        let [a, b] = <[Branch; 2]>::try_from(pair)
            .map_err(|_| Error::ExtractionValidation("saddle without two unstable branches".into()))?;
        edges.push([a, b]);
    }

    // vertices: attractors that receive separatrices, in equilibrium order
    let mut vertex_equilibria: Vec<usize> = flow.attractors().map(|(i, _)| i).collect();
    vertex_equilibria.sort_unstable();
    let vertex_of_eq = |e: usize| -> Result<usize> {
        vertex_equilibria
            .iter()
            .position(|&v| v == e)
            .ok_or_else(|| Error::ExtractionValidation("endpoint is not an attractor".into()))
    };

    // darts: edge k has darts 2k (branch 0) and 2k+1 (branch 1)
    let dart_count = 2 * edges.len();
    let mut alpha = vec![0u32; dart_count];
    let mut incident: Vec<Vec<(f64, u32)>> = vec![Vec::new(); vertex_equilibria.len()];
    let mut dart_geometry = Vec::with_capacity(dart_count);
    for (k, pair) in edges.iter().enumerate() {
        alpha[2 * k] = (2 * k + 1) as u32;
        alpha[2 * k + 1] = (2 * k) as u32;
        for (side, br) in pair.iter().enumerate() {
            let dart = (2 * k + side) as u32;
            incident[vertex_of_eq(br.endpoint)?].push((br.arrival, dart));
            dart_geometry.push(DartGeometry {
                arrival_angle: br.arrival,
                polyline: br.lift.clone(),
                argf_turns: br.argf,
            });
        }
    }

    // anticlockwise rotation from arrival angles
    let mut sigma = vec![0u32; dart_count];
    for list in incident.iter_mut() {
        if list.is_empty() {
            return Err(Error::ExtractionValidation(
                "attractor receives no separatrix".into(),
            ));
        }
        list.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in list.windows(2) {
            if (w[1].0 - w[0].0).abs() < ROTATION_TIE {
                return Err(Error::AmbiguousRotation(ROTATION_TIE));
            }
        }
        for (i, &(_, d)) in list.iter().enumerate() {
            let next = list[(i + 1) % list.len()].1;
            sigma[d as usize] = next;
        }
    }
    let map = CombinatorialMap::new(sigma, alpha)
        .map_err(|e| Error::ExtractionValidation(format!("assembled map invalid: {e}")))?;
    if !map.is_cellular_torus() {
        return Err(Error::ExtractionValidation(
            "extracted map is not cellular on the torus".into(),
        ));
    }

    // wrap numbers from branch lifts
    let mut edge_wraps = Vec::with_capacity(edges.len());
    for pair in &edges {
        let end0 = *pair[0].lift.last().unwrap();
        let end1 = *pair[1].lift.last().unwrap();
        let rep0 = flow.equilibria()[pair[0].endpoint].location;
        let rep1 = flow.equilibria()[pair[1].endpoint].location;
        let disp = end1 - end0 - (rep1 - rep0);
        let (t1, t2) = lat.coords(disp);
        let class = (t1.round() as i64, t2.round() as i64);
        let residual = (t1 - class.0 as f64).abs().max((t2 - class.1 as f64).abs());
        if residual > LIFT_RESIDUAL_TOL {
            return Err(Error::LiftAccuracy { residual });
        }
        edge_wraps.push(class);
    }

    // faces: one backward sample per face must land on a distinct pole
    let mut face_poles = Vec::with_capacity(map.face_count());
    for walk in map.faces() {
        let x = walk[0];
        let y = map.alpha(x);
        let v = map.vertex_of(y);
        let a0 = dart_geometry[y as usize].arrival_angle;
        let a1 = dart_geometry[map.sigma(y) as usize].arrival_angle;
        let span = (a1 - a0).rem_euclid(std::f64::consts::TAU);
        let mid = a0 + 0.5 * if span == 0.0 { std::f64::consts::TAU } else { span };
        let center = flow.equilibria()[vertex_equilibria[v]].location;
        let probe = center + Complex64::from_polar(1e-2, mid);
        let back = IntegrateOptions {
            direction: Direction::Backward,
            ..opts.integrate
        };
        let tr = integrate(flow, probe, back)?;
        let Terminal::Equilibrium(e) = tr.terminal else {
            return Err(Error::ExtractionValidation(
                "basin sample did not reach a repellor".into(),
            ));
        };
        if flow.equilibria()[e].kind != EquilibriumKind::Repellor {
            return Err(Error::ExtractionValidation(
                "basin sample terminated off the pole set".into(),
            ));
        }
        face_poles.push(e);
    }
    let repellor_count = flow.repellors().count();
    if map.face_count() != repellor_count {
        return Err(Error::ExtractionValidation(format!(
            "{} faces for {} poles",
            map.face_count(),
            repellor_count
        )));
    }
    {
        let mut distinct = face_poles.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != face_poles.len() {
            return Err(Error::ExtractionValidation(
                "two faces validated onto the same pole".into(),
            ));
        }
    }

    Ok(ExtractedGraph {
        map,
        vertex_equilibria,
        face_poles,
        edge_saddles: saddle_ids,
        edge_wraps,
        dart_geometry,
    })
}

/// Extraction of the reciprocal flow (the negated field), whose graph is the
/// geometric dual with reversed orientation.
pub fn extract_dual(flow: &Flow) -> Result<ExtractedGraph> {
    extract_dual_with(flow, ExtractOptions::default())
}

pub fn extract_dual_with(flow: &Flow, opts: ExtractOptions) -> Result<ExtractedGraph> {
    let dual_flow = Flow::analyze(flow.field().reciprocal())?;
    extract_graph_with(&dual_flow, opts)
}

/// Wrap numbers of one extracted edge.
pub fn wrap_numbers(g: &ExtractedGraph, edge: usize) -> Result<(i64, i64)> {
    g.edge_wraps
        .get(edge)
        .copied()
        .ok_or_else(|| Error::InvalidMap(format!("no edge {edge}")))
}

/// Catalog identification outcome.
#[derive(Debug, Clone)]
pub enum IdentifyResult {
    Known(&'static str),
    Unknown { canonical: Vec<u32> },
}

/// Match a map against the catalog, prefiltering by degree multiset.
pub fn identify(map: &CombinatorialMap) -> IdentifyResult {
    let degrees = map.degree_multiset();
    for entry in catalog::catalog() {
        if entry.map.degree_multiset() != degrees {
            continue;
        }
        if entry.map.is_equivalent(map).is_some() {
            return IdentifyResult::Known(entry.name);
        }
    }
    IdentifyResult::Unknown {
        canonical: map.canonical_encoding(),
    }
}

fn arrival_angle(lift: &[Complex64]) -> Result<f64> {
    const ARRIVAL_ARC: f64 = 1e-3;
    let end = *lift.last().unwrap();
    let mut j = lift.len() - 1;
    let mut acc = 0.0;
    while j > 0 && acc < ARRIVAL_ARC {
        acc += (lift[j] - lift[j - 1]).norm();
        j -= 1;
    }
    let dir = lift[j] - end;
    if dir.norm() == 0.0 {
        return Err(Error::DegenerateVertex);
    }
    Ok(dir.arg())
}
