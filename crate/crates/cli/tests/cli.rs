//! Command-line surface tests: formats, reports, and exit codes.

use std::path::PathBuf;
use std::process::Command;

fn enf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_enf"))
}

fn data(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(file)
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("enf-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn lattice_reduce_reports_basis_and_matrix() {
    let out = enf().args(["lattice", "reduce", "3,1", "2,1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("matrix = 3,1,2,1"), "{text}");
    assert!(text.contains("det = 1"));
}

#[test]
fn lattice_reduce_rejects_degenerate_pairs() {
    let out = enf().args(["lattice", "reduce", "1,0", "2,0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    let out = enf().args(["lattice", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_fails_on_pseudo_graphs() {
    let path = temp("ghat2.cmap");
    let show = enf().args(["catalog", "show", "ghat2"]).output().unwrap();
    std::fs::write(&path, &show.stdout).unwrap();
    let out = enf().args(["graph", "verify"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("newtonian=false"), "{text}");
}

#[test]
fn verify_passes_on_newton_graphs() {
    let path = temp("newton2.cmap");
    let show = enf().args(["catalog", "show", "newton2"]).output().unwrap();
    std::fs::write(&path, &show.stdout).unwrap();
    let out = enf().args(["graph", "verify"]).arg(&path).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("newtonian=true"));
}

#[test]
fn equiv_distinguishes_the_two_pruned_order3_graphs() {
    let a = temp("ghat3a1.cmap");
    let b = temp("ghat3a2.cmap");
    for (name, path) in [("ghat3.a1", &a), ("ghat3.a2", &b)] {
        let show = enf().args(["catalog", "show", name]).output().unwrap();
        std::fs::write(path, &show.stdout).unwrap();
    }
    let same = enf().args(["graph", "equiv"]).arg(&a).arg(&a).output().unwrap();
    assert!(same.status.success());
    let diff = enf().args(["graph", "equiv"]).arg(&a).arg(&b).output().unwrap();
    assert_eq!(diff.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&diff.stdout).contains("equivalent = false"));
}

#[test]
fn trajectory_dump_has_five_numeric_columns() {
    let dump = temp("traj.txt");
    let out = enf()
        .args(["flow", "integrate"])
        .arg(data("divisors/wp_square.div"))
        .args(["--from", "0.13,0.72", "-o"])
        .arg(&dump)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&dump).unwrap();
    let mut rows = 0;
    let mut last_absf = f64::INFINITY;
    for line in text.lines() {
        let cols: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().expect("numeric column"))
            .collect();
        assert_eq!(cols.len(), 5, "t re im argf absf");
        assert!(cols[4] < last_absf, "|f| strictly decreasing in the dump");
        last_absf = cols[4];
        rows += 1;
    }
    assert!(rows > 10);
}

#[test]
fn integration_from_an_equilibrium_exits_3() {
    let out = enf()
        .args(["flow", "integrate"])
        .arg(data("divisors/wp_square.div"))
        .args(["--from", "0.5,0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn portrait_is_wellformed_svg() {
    let svg = temp("portrait.svg");
    let out = enf()
        .args(["flow", "portrait"])
        .arg(data("divisors/wp_square.div"))
        .arg("-o")
        .arg(&svg)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml"));
    assert!(text.contains("<svg"));
    assert!(text.trim_end().ends_with("</svg>"));
    assert!(text.contains("<circle")); // attractor marker
    assert!(text.contains("<rect")); // repellor marker
    assert!(text.matches("<polyline").count() > 10);
}

#[test]
fn extract_identifies_the_nuclear_graph_and_writes_geometry() {
    let cmap = temp("wp.cmap");
    let geom = temp("wp.geom");
    let out = enf()
        .arg("extract")
        .arg(data("divisors/wp_square.div"))
        .arg("-o")
        .arg(&cmap)
        .arg("--geom")
        .arg(&geom)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("identified = nuclear"), "{text}");
    assert!(text.contains("edge0_wrap"));
    let map_text = std::fs::read_to_string(&cmap).unwrap();
    assert!(map_text.starts_with("cmap "));
    let geom_text = std::fs::read_to_string(&geom).unwrap();
    assert!(geom_text.starts_with("dart 1"));
    let polyline_rows = geom_text
        .lines()
        .filter(|l| !l.starts_with("dart"))
        .count();
    assert!(polyline_rows > 50);
}

#[test]
fn catalog_show_honors_data_dir_override() {
    let dir = temp("catalog-override");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("nuclear.cmap"), "custom content\n").unwrap();
    let out = enf()
        .args(["catalog", "show", "nuclear"])
        .env("ENF_DATA_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "custom content\n");
}

#[test]
fn stable_order2_divisor_extracts_to_newton2() {
    let out = enf()
        .arg("extract")
        .arg(data("divisors/stable2.div"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("identified = newton2"));
}
