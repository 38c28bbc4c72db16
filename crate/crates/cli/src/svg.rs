//! Schematic SVG phase portraits: the fundamental cell, separatrices, a small
//! deterministic fan of sample trajectories, and equilibrium markers.

use num_complex::Complex64;

use enf_core::flow::{EquilibriumKind, Flow};
use enf_core::integrate::{integrate, trace_separatrices, IntegrateOptions};

const SIZE: f64 = 720.0;
const MARGIN: f64 = 40.0;

pub fn portrait(flow: &Flow, opts: IntegrateOptions) -> anyhow::Result<String> {
    let lat = *flow.field().lattice();
    let corners = [
        Complex64::new(0.0, 0.0),
        lat.omega1(),
        lat.omega1() + lat.omega2(),
        lat.omega2(),
    ];
    let (min_x, max_x) = bounds(corners.iter().map(|c| c.re));
    let (min_y, max_y) = bounds(corners.iter().map(|c| c.im));
    let span = (max_x - min_x).max(max_y - min_y);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let to_px = move |z: Complex64| -> (f64, f64) {
        (
            MARGIN + (z.re - min_x) * scale,
            SIZE - MARGIN - (z.im - min_y) * scale,
        )
    };

    let mut body = String::new();
    // cell outline
    let outline: Vec<(f64, f64)> = corners.iter().copied().map(to_px).collect();
    body.push_str(&polygon(&outline, "none", "#888", 1.0));

    // sample trajectories from a deterministic grid
    let mut paths = Vec::new();
    for i in 0..6 {
        for j in 0..6 {
            let z0 = lat.from_coords(
                (i as f64 + 0.5) / 6.0 + 0.013,
                (j as f64 + 0.5) / 6.0 + 0.007,
            );
            if flow.field().function().divisor_distance(z0) < 2e-2 {
                continue;
            }
            if flow.equilibrium_near(z0, 2e-2).is_some() {
                continue;
            }
            if let Ok(tr) = integrate(flow, z0, opts) {
                paths.push((wrapped_segments(&lat, &tr.lift), "#9db8d9", 0.8));
            }
        }
    }
    // separatrices over the samples
    for (i, e) in flow.saddles() {
        if !e.simple {
            continue;
        }
        if let Ok(seps) = trace_separatrices(flow, i, opts) {
            for s in seps {
                paths.push((wrapped_segments(&lat, &s.path.lift), "#b3412f", 1.6));
            }
        }
    }
    for (segments, color, width) in paths {
        for seg in segments {
            let pts: Vec<(f64, f64)> = seg.into_iter().map(to_px).collect();
            body.push_str(&polyline(&pts, color, width));
        }
    }

    // equilibrium markers
    for e in flow.equilibria() {
        let (x, y) = to_px(e.location);
        match e.kind {
            EquilibriumKind::Attractor => body.push_str(&format!(
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"6\" fill=\"#1a5b2e\"/>\n"
            )),
            EquilibriumKind::Repellor => body.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"12\" height=\"12\" fill=\"none\" stroke=\"#7a1f1f\" stroke-width=\"2\"/>\n",
                x - 6.0,
                y - 6.0
            )),
            EquilibriumKind::Saddle => {
                body.push_str(&format!(
                    "<path d=\"M {:.2} {:.2} L {:.2} {:.2} M {:.2} {:.2} L {:.2} {:.2}\" stroke=\"#333\" stroke-width=\"2\"/>\n",
                    x - 6.0, y - 6.0, x + 6.0, y + 6.0, x - 6.0, y + 6.0, x + 6.0, y - 6.0
                ));
            }
        }
    }

    Ok(format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    ))
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

/// Wrap a lifted path into the fundamental cell, splitting at the jumps.
fn wrapped_segments(lat: &enf_core::lattice::Lattice, lift: &[Complex64]) -> Vec<Vec<Complex64>> {
    let mut segments = Vec::new();
    let mut current: Vec<Complex64> = Vec::new();
    let mut prev: Option<Complex64> = None;
    let jump = 0.45 * lat.omega1().norm().min(lat.omega2().norm());
    for &p in lift {
        let (w, _) = lat.reduce_to_cell(p);
        if let Some(q) = prev {
            if (w - q).norm() > jump {
                segments.push(std::mem::take(&mut current));
            }
        }
        current.push(w);
        prev = Some(w);
    }
    if !current.is_empty() {
        segments.push(current);
    }
    segments.into_iter().filter(|s| s.len() > 1).collect()
}

fn polyline(points: &[(f64, f64)], color: &str, width: f64) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect();
    format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"/>\n",
        coords.join(" ")
    )
}

fn polygon(points: &[(f64, f64)], fill: &str, stroke: &str, width: f64) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect();
    format!(
        "<polygon points=\"{}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>\n",
        coords.join(" ")
    )
}
