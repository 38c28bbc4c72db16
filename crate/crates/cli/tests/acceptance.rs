//! Acceptance suite: every release gate runs here, one test per criterion,
//! each printing a PASS line with its measured numbers (run with
//! `--nocapture` to see them).

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;

use enf_core::batch::{self, ExecMode};
use enf_core::catalog::{catalog, catalog_get, newton3_names};
use enf_core::divisor::nuclear_configurations;
use enf_core::elliptic::EllipticFunction;
use enf_core::error::Error;
use enf_core::extract::extract_graph;
use enf_core::flow::{FieldKind, Flow, FlowField};
use enf_core::integrate::{
    integrate, measure_sector_angles, nuclear_angles, saddle_connection_check, trace_separatrices,
    IntegrateOptions,
};
use enf_core::lattice::{reduce_periods, Lattice};
use enf_core::props::{angle_feasibility, hall_a_check, is_newton_graph};
use enf_core::pseudo::{
    classify_hat, enumerate_maps, reduce, single_face_form, EnumerationSpec, HatCase,
    ReduceStrategy,
};

fn enf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_enf"))
}

fn parse_classes(stdout: &[u8]) -> usize {
    let text = String::from_utf8_lossy(stdout);
    text.lines()
        .find_map(|l| l.strip_prefix("classes = "))
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(usize::MAX)
}

fn nuclear_flow(r: u32) -> Flow {
    let cfg = nuclear_configurations(Lattice::square(), r)
        .unwrap()
        .into_iter()
        .find(|c| c.lambda == (1, 1))
        .unwrap();
    let f = EllipticFunction::from_divisor(cfg.divisor).unwrap();
    Flow::analyze(FlowField::new(f, FieldKind::Damped)).unwrap()
}

fn wp_flow() -> Flow {
    let f = enf_core::elliptic::wp_function(Lattice::square()).unwrap();
    Flow::analyze(FlowField::new(f, FieldKind::Damped)).unwrap()
}

#[test]
fn criterion_01_order2_newton_graph_unique() {
    let start = Instant::now();
    let out = enf()
        .args([
            "pseudo", "enumerate", "--v", "2", "--e", "4", "--f", "2", "--loopless",
            "--newtonian",
        ])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let classes = parse_classes(&out.stdout);
    let elapsed = start.elapsed();
    assert_eq!(classes, 1, "order-2 Newton graph must be unique");
    assert!(elapsed.as_secs() < 10, "took {elapsed:?}");
    println!("criterion 01 PASS: 1 class in {elapsed:.2?}");
}

#[test]
fn criterion_02_single_face_catalogs() {
    let start = Instant::now();
    let run = |args: &[&str]| {
        let out = enf().args(args).output().expect("binary runs");
        assert!(out.status.success());
        parse_classes(&out.stdout)
    };
    let ghat2 = run(&[
        "pseudo", "enumerate", "--v", "2", "--e", "3", "--f", "1", "--loopless", "--min-deg", "2",
    ]);
    let ghat3 = run(&[
        "pseudo", "enumerate", "--v", "3", "--e", "4", "--f", "1", "--loopless", "--min-deg", "2",
    ]);
    assert_eq!(ghat2, 1);
    assert_eq!(ghat3, 2);
    let forms = enumerate_maps(EnumerationSpec {
        vertices: 3,
        edges: 4,
        faces: Some(1),
        loopless: true,
        min_degree: 1,
        newtonian: false,
    })
    .unwrap();
    assert_eq!(forms.len(), 3);
    let mut degrees: Vec<Vec<usize>> = forms.iter().map(|m| m.degree_multiset()).collect();
    degrees.sort();
    assert_eq!(
        degrees,
        vec![vec![1, 3, 4], vec![2, 2, 4], vec![2, 3, 3]]
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    println!("criterion 02 PASS: 1 + 2 + 3 classes in {elapsed:.2?}");
}

#[test]
fn criterion_03_walk_structure_of_all_reductions() {
    let mut names = vec!["newton2"];
    names.extend(newton3_names());
    let mut traces_checked = 0;
    for name in names {
        let m = &catalog_get(name).unwrap().map;
        for t in reduce(m, ReduceStrategy::All).unwrap() {
            let hat = classify_hat(&t.ghat).unwrap();
            assert_eq!(hat.walk.len(), 2 * (t.rho + 1), "{name}");
            match hat.case {
                HatCase::A1 => {
                    assert_eq!(hat.subwalks.len(), 6, "{name}");
                    let degs = t.ghat.degree_multiset();
                    assert_eq!(degs.iter().filter(|&&d| d == 3).count(), 2);
                }
                HatCase::A2 => {
                    assert_eq!(hat.subwalks.len(), 4, "{name}");
                    assert!(t.ghat.degree_multiset().contains(&4));
                }
            }
            traces_checked += 1;
        }
    }
    println!("criterion 03 PASS: {traces_checked} reduction traces classified");
}

#[test]
fn criterion_04_duals_are_newtonian() {
    let mut checked = 0;
    for entry in catalog() {
        if !entry.name.starts_with("newton") {
            continue;
        }
        let r = entry.map.vertex_count();
        assert!(is_newton_graph(&entry.map, r).newtonian, "{}", entry.name);
        let dual = entry.map.dual().unwrap();
        assert!(
            is_newton_graph(&dual, r).newtonian,
            "dual of {}",
            entry.name
        );
        checked += 1;
    }
    println!("criterion 04 PASS: {checked} catalog Newton graphs and their duals");
}

#[test]
fn criterion_05_hall_equals_feasibility() {
    let mut checked = 0;
    for e in 1..=6u32 {
        for v in 1..=(2 * e) {
            let maps = enumerate_maps(EnumerationSpec {
                vertices: v,
                edges: e,
                faces: None,
                loopless: false,
                min_degree: 1,
                newtonian: false,
            })
            .unwrap();
            for m in &maps {
                assert_eq!(
                    hall_a_check(m).0,
                    angle_feasibility(m),
                    "disagreement at V={v} E={e} degrees {:?}",
                    m.degree_multiset()
                );
                checked += 1;
            }
        }
    }
    println!("criterion 05 PASS: exhaustive agreement on {checked} maps (<= 12 darts)");
}

#[test]
fn criterion_06_nuclear_r2_portrait() {
    let start = Instant::now();
    let flow = wp_flow();
    let lat = Lattice::square();
    let saddles: Vec<_> = flow.saddles().collect();
    assert_eq!(saddles.len(), 2);
    for (_, s) in &saddles {
        assert!(s.simple);
        let near = lat.torus_distance(s.location, Complex64::new(0.5, 0.0)) < 1e-6
            || lat.torus_distance(s.location, Complex64::new(0.0, 0.5)) < 1e-6;
        assert!(near, "saddle at {}", s.location);
    }
    let report = saddle_connection_check(&flow, IntegrateOptions::default()).unwrap();
    assert!(!report.connected);

    let attractor = flow.attractors().next().unwrap().0;
    let mut seps = Vec::new();
    for (i, _) in flow.saddles() {
        seps.extend(trace_separatrices(&flow, i, IntegrateOptions::default()).unwrap());
    }
    let arrivals = measure_sector_angles(&flow, attractor, &seps).unwrap();
    let gaps: Vec<f64> = arrivals.iter().map(|a| a.gap_turns).collect();
    let angles = nuclear_angles(&gaps).expect("nuclear gap pattern");
    assert!((angles.alpha - 0.125).abs() < 1e-3, "alpha {}", angles.alpha);
    assert!((angles.beta - 0.125).abs() < 1e-3, "beta {}", angles.beta);
    assert!((angles.gamma - 0.25).abs() < 1e-3, "gamma {}", angles.gamma);

    let g = extract_graph(&flow).unwrap();
    assert!(g
        .map
        .is_equivalent(&catalog_get("nuclear").unwrap().map)
        .is_some());
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    println!(
        "criterion 06 PASS: saddles at the half-periods, alpha=beta={:.5}, gamma={:.5}, nuclear graph, {elapsed:.2?}",
        angles.alpha, angles.gamma
    );
}

#[test]
fn criterion_07_nuclear_r3_angles() {
    let flow = nuclear_flow(3);
    let saddles: Vec<_> = flow.saddles().collect();
    assert_eq!(saddles.len(), 2);
    assert!(saddles.iter().all(|(_, s)| s.simple));
    let report = saddle_connection_check(&flow, IntegrateOptions::default()).unwrap();
    assert!(!report.connected);

    let attractor = flow.attractors().next().unwrap().0;
    let mut seps = Vec::new();
    for (i, _) in flow.saddles() {
        seps.extend(trace_separatrices(&flow, i, IntegrateOptions::default()).unwrap());
    }
    let arrivals = measure_sector_angles(&flow, attractor, &seps).unwrap();
    let gaps: Vec<f64> = arrivals.iter().map(|a| a.gap_turns).collect();
    let angles = nuclear_angles(&gaps).expect("nuclear gap pattern");
    let r = 3.0;
    assert!(angles.alpha > 0.0 && angles.alpha < 1.0 / 6.0, "alpha {}", angles.alpha);
    assert!(
        (angles.beta - (0.5 + angles.alpha - 1.0 / r)).abs() < 1e-3,
        "beta {} vs {}",
        angles.beta,
        0.5 + angles.alpha - 1.0 / r
    );
    assert!(
        (angles.gamma - (1.0 / r - 2.0 * angles.alpha)).abs() < 1e-3,
        "gamma {} vs {}",
        angles.gamma,
        1.0 / r - 2.0 * angles.alpha
    );
    println!(
        "criterion 07 PASS: alpha={:.5} in (0, 1/6), beta and gamma match within 1e-3",
        angles.alpha
    );
}

#[test]
fn criterion_08_side_configuration_refused() {
    let cfg = nuclear_configurations(Lattice::square(), 2)
        .unwrap()
        .into_iter()
        .find(|c| c.lambda == (1, 0))
        .unwrap();
    let f = EllipticFunction::from_divisor(cfg.divisor).unwrap();
    let reason = match Flow::analyze(FlowField::new(f, FieldKind::Damped)) {
        Err(Error::NonSimpleSaddle(_)) => "non-simple saddle at analysis".to_string(),
        Err(e) => panic!("unexpected analysis error {e}"),
        Ok(flow) => match extract_graph(&flow) {
            Err(Error::SaddleConnection(a, b)) => format!("saddle connection {a}-{b}"),
            Err(Error::NonSimpleSaddle(_)) => "non-simple saddle".to_string(),
            Err(e) => panic!("refusal for the wrong reason: {e}"),
            Ok(_) => panic!("extraction of the side configuration must be refused"),
        },
    };
    println!("criterion 08 PASS: extraction refused ({reason})");
}

#[test]
fn criterion_09_flow_invariants() {
    // trajectories across three flows
    let split = {
        let base = nuclear_flow(3);
        let f = base.field().function();
        let d = 0.04;
        let deltas: Vec<Complex64> = (0..3)
            .map(|k| Complex64::from_polar(d, 0.3 + k as f64 * std::f64::consts::TAU / 3.0))
            .collect();
        let g = f.split_zero(&deltas).unwrap();
        Flow::analyze(FlowField::new(g, FieldKind::Damped)).unwrap()
    };
    let flows = [nuclear_flow(2), nuclear_flow(3), split];
    let mut state = 0xd1b54a32d192ed03u64;
    let mut rand = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut jobs = Vec::new();
    'outer: for round in 0.. {
        for f in 0..flows.len() {
            if jobs.len() >= 120 {
                break 'outer;
            }
            let z0 = Complex64::new(rand(), rand());
            let flow = &flows[f];
            if flow.field().function().divisor_distance(z0) < 5e-2
                || flow.equilibrium_near(z0, 5e-2).is_some()
            {
                continue;
            }
            jobs.push((f, z0));
            let _ = round;
        }
    }
    let total = jobs.len();
    let results = batch::map(ExecMode::default(), jobs, |(f, z0)| {
        let tr = integrate(&flows[f], z0, IntegrateOptions::default())?;
        for w in tr.samples.windows(2) {
            if w[1].log_absf >= w[0].log_absf {
                return Err(Error::IntegrationAccuracy("|f| not decreasing".into()));
            }
        }
        if tr.drift_turns > 1e-6 * tr.arc_length.max(1.0) {
            return Err(Error::IntegrationAccuracy("arg f drifted".into()));
        }
        Ok(())
    });
    for r in results {
        r.unwrap();
    }

    // exact duality of the desingularized field
    let cfg = nuclear_configurations(Lattice::square(), 2)
        .unwrap()
        .into_iter()
        .find(|c| c.lambda == (1, 1))
        .unwrap();
    let f = EllipticFunction::from_divisor(cfg.divisor).unwrap();
    let field = FlowField::new(f, FieldKind::Desingularized);
    let recip = field.reciprocal();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 100 {
        let z = Complex64::new(rand(), rand());
        if field.function().divisor_distance(z) < 1e-3 {
            continue;
        }
        let defect = (field.velocity(z) + recip.velocity(z)).norm();
        worst = worst.max(defect);
        checked += 1;
    }
    assert!(worst < 1e-12, "duality defect {worst}");
    println!(
        "criterion 09 PASS: {total} trajectories conserved arg f and decreased |f|; duality defect {worst:.2e}"
    );
}

#[test]
fn criterion_10_split3_realizes_all_forms() {
    let start = Instant::now();
    let dir = std::env::temp_dir().join("enf-acceptance-split3");
    std::fs::create_dir_all(&dir).unwrap();
    let base = dir.join("nuclear_r3.div");
    let cfg_path = dir.join("split3.cfg");
    let cfg = nuclear_configurations(Lattice::square(), 3)
        .unwrap()
        .into_iter()
        .find(|c| c.lambda == (1, 1))
        .unwrap();
    std::fs::write(&base, cfg.divisor.to_text()).unwrap();
    std::fs::write(
        &cfg_path,
        format!(
            "base = {}\ndelta1 = 0.02,0.04\ndelta2 = 0.012\nphi1-steps = 24\nphi2-steps = 3\noutdir = {}\n",
            base.display(),
            dir.join("out").display()
        ),
    )
    .unwrap();
    let out = enf()
        .args(["experiment", "split3"])
        .arg(&cfg_path)
        .output()
        .expect("binary runs");
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        out.status.success(),
        "experiment failed:\n{text}\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(text.contains("all_forms_realized = true"), "{text}");
    // spot-check: a split flow's extracted graph has the single-face counts
    let f = EllipticFunction::from_divisor(cfg.divisor).unwrap();
    let deltas: Vec<Complex64> = (0..3)
        .map(|k| Complex64::from_polar(0.04, 0.3 + k as f64 * std::f64::consts::TAU / 3.0))
        .collect();
    let split = f.split_zero(&deltas).unwrap();
    let flow = Flow::analyze(FlowField::new(split, FieldKind::Damped)).unwrap();
    let g = extract_graph(&flow).unwrap();
    assert_eq!(g.map.vertex_count(), 3);
    assert_eq!(g.map.edge_count(), 4);
    assert_eq!(g.map.face_count(), 1);
    assert!(g.map.is_cellular_torus());
    assert!(single_face_form(&g.map).is_some());
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 900, "took {elapsed:?}");
    println!("criterion 10 PASS: all three single-face forms realized in {elapsed:.2?}");
}

#[test]
fn criterion_11_wrap_numbers_through_the_basis_change() {
    // the canonical nuclear graph wraps the two basis directions; rendered
    // through the unimodular matrix of the periods (3+i, 2+i) the edges wrap
    // (3,1) and (2,1)
    let flow = wp_flow();
    let g = extract_graph(&flow).unwrap();
    let lat = Lattice::new(Complex64::new(3.0, 1.0), Complex64::new(2.0, 1.0)).unwrap();
    let (_, m) = reduce_periods(&lat);
    assert_eq!(m.det().abs(), 1);
    let mut rendered: Vec<(i64, i64)> = g
        .edge_wraps
        .iter()
        .map(|&(a, b)| {
            let (p, q) = m.map_class((a, b));
            if p < 0 || (p == 0 && q < 0) {
                (-p, -q)
            } else {
                (p, q)
            }
        })
        .collect();
    rendered.sort_unstable();
    assert_eq!(rendered, vec![(2, 1), (3, 1)], "rendered wraps {rendered:?}");
    let det = rendered[0].0 * rendered[1].1 - rendered[0].1 * rendered[1].0;
    assert_eq!(det.abs(), 1);
    println!("criterion 11 PASS: wraps (3,1) and (2,1), unimodular pair");
}

#[test]
fn criterion_12_map_engine_conservation() {
    let mut maps: Vec<_> = catalog().iter().map(|e| e.map.clone()).collect();
    for e in 1..=6u32 {
        for v in 1..=(2 * e) {
            maps.extend(
                enumerate_maps(EnumerationSpec {
                    vertices: v,
                    edges: e,
                    faces: None,
                    loopless: false,
                    min_degree: 1,
                    newtonian: false,
                })
                .unwrap(),
            );
        }
    }
    let mut checked = 0;
    for m in &maps {
        let total: usize = m.faces().iter().map(|w| w.len()).sum();
        assert_eq!(total, 2 * m.edge_count());
        assert_eq!(
            m.vertex_count() as i64 - m.edge_count() as i64 + m.face_count() as i64,
            0
        );
        let dd = m.dual().unwrap().dual().unwrap();
        assert!(dd.is_equivalent(m).is_some());
        checked += 1;
    }
    println!("criterion 12 PASS: conservation laws on {checked} maps");
}
