//! `enf`: elliptic Newton flows on the torus and their embedded graphs.
//!
//! Exit codes: 0 success, 1 property or validation failure, 2 usage,
//! 3 numerical non-convergence.

mod experiment;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use enf_core::catalog;
use enf_core::cmap::CombinatorialMap;
use enf_core::divisor::Divisor;
use enf_core::elliptic::EllipticFunction;
use enf_core::error::Error as CoreError;
use enf_core::extract::{extract_dual_with, extract_graph_with, identify, ExtractOptions, IdentifyResult};
use enf_core::flow::{EquilibriumKind, FieldKind, Flow, FlowField};
use enf_core::integrate::{integrate, Direction, IntegrateOptions, Terminal};
use enf_core::lattice::{reduce_periods, Lattice};
use enf_core::props::is_newton_graph;
use enf_core::pseudo::{
    classify_hat, enumerate_maps, reduce, EnumerationSpec, HatCase, ReduceStrategy,
};

#[derive(Parser)]
#[command(name = "enf", version, about = "elliptic Newton flows on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice utilities.
    Lattice {
        #[command(subcommand)]
        cmd: LatticeCmd,
    },
    /// Combinatorial map operations.
    Graph {
        #[command(subcommand)]
        cmd: GraphCmd,
    },
    /// Reduction pipeline and exhaustive enumeration.
    Pseudo {
        #[command(subcommand)]
        cmd: PseudoCmd,
    },
    /// Flow analysis and integration.
    Flow {
        #[command(subcommand)]
        cmd: FlowCmd,
    },
    /// Extract the embedded graph of a flow.
    Extract(ExtractArgs),
    /// Experiment drivers.
    Experiment {
        #[command(subcommand)]
        cmd: ExperimentCmd,
    },
    /// Reference map catalog.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Reduce a period pair to a shortest positively oriented basis.
    Reduce {
        /// First period, as re,im.
        omega1: String,
        /// Second period, as re,im.
        omega2: String,
    },
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Print the facial walks of a map.
    Faces { file: PathBuf },
    /// Geometric dual.
    Dual {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Common refinement with the dual (canonical regions).
    Distinguished {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Newton-graph property report.
    Verify {
        file: PathBuf,
        /// Expected order; defaults to the vertex count.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Orientation-preserving equivalence of two maps.
    Equiv { first: PathBuf, second: PathBuf },
}

#[derive(Subcommand)]
enum PseudoCmd {
    /// Run the merge-and-prune reduction on a Newton graph.
    Reduce {
        file: PathBuf,
        /// Enumerate every deletion choice instead of the first.
        #[arg(long)]
        all: bool,
    },
    /// Classify a pruned single-face graph and decompose its facial walk.
    Classify { file: PathBuf },
    /// Enumerate toroidal maps up to equivalence.
    Enumerate {
        #[arg(long)]
        v: u32,
        #[arg(long)]
        e: u32,
        #[arg(long)]
        f: Option<u32>,
        #[arg(long)]
        loopless: bool,
        #[arg(long, default_value_t = 1)]
        min_deg: u32,
        #[arg(long)]
        newtonian: bool,
        /// Print each class as a map block.
        #[arg(long)]
        show: bool,
    },
}

#[derive(Args, Clone, Copy)]
struct TolArgs {
    /// Relative integration tolerance.
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
    /// Absolute integration tolerance.
    #[arg(long, default_value_t = 1e-12)]
    abs_tol: f64,
    /// Equilibrium capture radius.
    #[arg(long, default_value_t = 1e-6)]
    eq_radius: f64,
}

impl TolArgs {
    fn integrate_options(&self) -> IntegrateOptions {
        IntegrateOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            eq_radius: self.eq_radius,
            ..IntegrateOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum FlowCmd {
    /// Classify the equilibria of the flow of a divisor.
    Equilibria {
        file: PathBuf,
        /// Use the plain desingularized field instead of the damped one.
        #[arg(long)]
        plain: bool,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Integrate one trajectory and dump `t re im argf absf` rows.
    Integrate {
        file: PathBuf,
        /// Starting point, as re,im.
        #[arg(long)]
        from: String,
        #[arg(long)]
        backward: bool,
        #[arg(long, default_value_t = 1e6)]
        t_max: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        plain: bool,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Render the phase portrait as SVG.
    Portrait {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        plain: bool,
        #[command(flatten)]
        tol: TolArgs,
    },
}

#[derive(Args)]
struct ExtractArgs {
    /// Divisor file.
    file: PathBuf,
    /// Extract the reciprocal flow (the geometric dual).
    #[arg(long)]
    dual: bool,
    /// Write the extracted map here (stdout otherwise).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write dart polylines to this sidecar file.
    #[arg(long)]
    geom: Option<PathBuf>,
    #[arg(long)]
    plain: bool,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Split the order-3 nuclear zero over a configured grid and report which
    /// single-face forms arise.
    Split3 { config: PathBuf },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List catalog entries with counts and property flags.
    List,
    /// Print one entry in map format.
    Show { name: String },
}

fn main() -> ExitCode {
    // die quietly when a pipe closes early (e.g. `enf catalog list | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e.downcast_ref::<CoreError>() {
                Some(
                    CoreError::NonConvergence { .. }
                    | CoreError::IntegrationAccuracy(_)
                    | CoreError::LiftAccuracy { .. }
                    | CoreError::PsiDivergence,
                ) => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Lattice { cmd } => lattice_cmd(cmd),
        Command::Graph { cmd } => graph_cmd(cmd),
        Command::Pseudo { cmd } => pseudo_cmd(cmd),
        Command::Flow { cmd } => flow_cmd(cmd),
        Command::Extract(args) => extract_cmd(args),
        Command::Experiment { cmd } => match cmd {
            ExperimentCmd::Split3 { config } => experiment::split3(&config),
        },
        Command::Catalog { cmd } => catalog_cmd(cmd),
    }
}

fn parse_complex(s: &str) -> anyhow::Result<Complex64> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| anyhow::anyhow!("expected re,im got {s}"))?;
    Ok(Complex64::new(re.trim().parse()?, im.trim().parse()?))
}

fn load_map(path: &Path) -> anyhow::Result<(String, CombinatorialMap)> {
    let text = std::fs::read_to_string(path)?;
    Ok(CombinatorialMap::from_cmap_string(&text)?)
}

fn load_divisor(path: &Path) -> anyhow::Result<Divisor> {
    let text = std::fs::read_to_string(path)?;
    Ok(Divisor::from_text(&text)?)
}

fn build_flow(path: &Path, plain: bool) -> anyhow::Result<Flow> {
    let divisor = load_divisor(path)?;
    let f = EllipticFunction::from_divisor(divisor)?;
    let kind = if plain {
        FieldKind::Desingularized
    } else {
        FieldKind::Damped
    };
    Ok(Flow::analyze(FlowField::new(f, kind))?)
}

fn emit(path: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn lattice_cmd(cmd: LatticeCmd) -> anyhow::Result<ExitCode> {
    match cmd {
        LatticeCmd::Reduce { omega1, omega2 } => {
            let lat = Lattice::new(parse_complex(&omega1)?, parse_complex(&omega2)?)?;
            let (reduced, m) = reduce_periods(&lat);
            println!(
                "omega1 = {:.16e},{:.16e}",
                reduced.omega1().re + 0.0,
                reduced.omega1().im + 0.0
            );
            println!(
                "omega2 = {:.16e},{:.16e}",
                reduced.omega2().re + 0.0,
                reduced.omega2().im + 0.0
            );
            println!("matrix = {},{},{},{}", m.p1, m.q1, m.p2, m.q2);
            println!("det = {}", m.det());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn graph_cmd(cmd: GraphCmd) -> anyhow::Result<ExitCode> {
    match cmd {
        GraphCmd::Faces { file } => {
            let (name, m) = load_map(&file)?;
            println!("name = {name}");
            println!("vertices = {}", m.vertex_count());
            println!("edges = {}", m.edge_count());
            println!("faces = {}", m.face_count());
            println!("genus = {}", m.genus());
            for (i, walk) in m.faces().iter().enumerate() {
                let darts: Vec<String> = walk.iter().map(|d| (d + 1).to_string()).collect();
                println!("face{} = {}", i, darts.join(" "));
            }
            Ok(ExitCode::SUCCESS)
        }
        GraphCmd::Dual { file, output } => {
            let (name, m) = load_map(&file)?;
            let d = m.dual()?;
            emit(&output, &d.to_cmap_string(&format!("{name}.dual")))?;
            Ok(ExitCode::SUCCESS)
        }
        GraphCmd::Distinguished { file, output } => {
            let (name, m) = load_map(&file)?;
            let d = m.distinguished_graph()?;
            emit(&output, &d.to_cmap_string(&format!("{name}.distinguished")))?;
            eprintln!(
                "canonical regions: {} (V={} E={})",
                d.face_count(),
                d.vertex_count(),
                d.edge_count()
            );
            Ok(ExitCode::SUCCESS)
        }
        GraphCmd::Verify { file, order } => {
            let (_, m) = load_map(&file)?;
            let r = order.unwrap_or_else(|| m.vertex_count());
            let report = is_newton_graph(&m, r);
            print!("{}", report.to_key_value());
            Ok(if report.newtonian {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        GraphCmd::Equiv { first, second } => {
            let (_, a) = load_map(&first)?;
            let (_, b) = load_map(&second)?;
            match a.is_equivalent(&b) {
                Some(mat) => {
                    println!("equivalent = true");
                    let images: Vec<String> =
                        mat.dart_map.iter().map(|d| (d + 1).to_string()).collect();
                    println!("dart_map = {}", images.join(" "));
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("equivalent = false");
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn pseudo_cmd(cmd: PseudoCmd) -> anyhow::Result<ExitCode> {
    match cmd {
        PseudoCmd::Reduce { file, all } => {
            let (name, m) = load_map(&file)?;
            let strategy = if all {
                ReduceStrategy::All
            } else {
                ReduceStrategy::First
            };
            let traces = reduce(&m, strategy)?;
            println!("classes = {}", traces.len());
            for (i, t) in traces.iter().enumerate() {
                println!("trace{}_rho = {}", i, t.rho);
                println!("trace{}_pruned = {}", i, t.pruned);
                println!(
                    "trace{}_merged_edges = {}",
                    i,
                    t.merged_edges
                        .iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                );
                print!("{}", t.gcheck.to_cmap_string(&format!("{name}.gcheck{i}")));
                print!("{}", t.ghat.to_cmap_string(&format!("{name}.ghat{i}")));
            }
            Ok(ExitCode::SUCCESS)
        }
        PseudoCmd::Classify { file } => {
            let (_, m) = load_map(&file)?;
            let c = classify_hat(&m)?;
            println!(
                "case = {}",
                match c.case {
                    HatCase::A1 => "a1",
                    HatCase::A2 => "a2",
                }
            );
            println!("walk_length = {}", c.walk.len());
            for (i, w) in c.subwalks.iter().enumerate() {
                let darts: Vec<String> = w.iter().map(|d| (d + 1).to_string()).collect();
                println!("subwalk{} = {}", i, darts.join(" "));
            }
            Ok(ExitCode::SUCCESS)
        }
        PseudoCmd::Enumerate {
            v,
            e,
            f,
            loopless,
            min_deg,
            newtonian,
            show,
        } => {
            let classes = enumerate_maps(EnumerationSpec {
                vertices: v,
                edges: e,
                faces: f,
                loopless,
                min_degree: min_deg,
                newtonian,
            })?;
            println!("classes = {}", classes.len());
            if show {
                for (i, m) in classes.iter().enumerate() {
                    print!("{}", m.to_cmap_string(&format!("class{i}")));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn flow_cmd(cmd: FlowCmd) -> anyhow::Result<ExitCode> {
    match cmd {
        FlowCmd::Equilibria { file, plain, tol } => {
            let _ = tol;
            let flow = build_flow(&file, plain)?;
            let mut saddles = 0;
            for (i, e) in flow.equilibria().iter().enumerate() {
                let kind = match e.kind {
                    EquilibriumKind::Attractor => "attractor",
                    EquilibriumKind::Repellor => "repellor",
                    EquilibriumKind::Saddle => {
                        saddles += 1;
                        "saddle"
                    }
                };
                println!(
                    "eq{} = {} at {:.12},{:.12} x{} simple={}",
                    i, kind, e.location.re, e.location.im, e.multiplicity, e.simple
                );
            }
            println!("attractors = {}", flow.attractors().count());
            println!("repellors = {}", flow.repellors().count());
            println!("saddles = {saddles}");
            Ok(ExitCode::SUCCESS)
        }
        FlowCmd::Integrate {
            file,
            from,
            backward,
            t_max,
            output,
            plain,
            tol,
        } => {
            let flow = build_flow(&file, plain)?;
            let z0 = parse_complex(&from)?;
            let opts = IntegrateOptions {
                t_max,
                direction: if backward {
                    Direction::Backward
                } else {
                    Direction::Forward
                },
                ..tol.integrate_options()
            };
            let tr = integrate(&flow, z0, opts)?;
            let mut dump = String::new();
            for s in &tr.samples {
                dump.push_str(&format!(
                    "{:.12e} {:.12e} {:.12e} {:.12e} {:.12e}\n",
                    s.t,
                    s.z.re,
                    s.z.im,
                    s.argf_turns,
                    s.log_absf.exp()
                ));
            }
            emit(&output, &dump)?;
            match tr.terminal {
                Terminal::Equilibrium(i) => eprintln!("terminal = eq{i}"),
                Terminal::Timeout => eprintln!("terminal = timeout"),
                Terminal::StepUnderflow(z) => {
                    eprintln!("terminal = step-underflow at {:.6},{:.6}", z.re, z.im)
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        FlowCmd::Portrait {
            file,
            output,
            plain,
            tol,
        } => {
            let flow = build_flow(&file, plain)?;
            let svg = svg::portrait(&flow, tol.integrate_options())?;
            std::fs::write(&output, svg)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn extract_cmd(args: ExtractArgs) -> anyhow::Result<ExitCode> {
    let flow = build_flow(&args.file, args.plain)?;
    let opts = ExtractOptions {
        integrate: args.tol.integrate_options(),
        ..ExtractOptions::default()
    };
    let g = if args.dual {
        extract_dual_with(&flow, opts)?
    } else {
        extract_graph_with(&flow, opts)?
    };
    let name = args
        .file
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "extracted".into());
    emit(&args.output, &g.map.to_cmap_string(&name))?;
    match identify(&g.map) {
        IdentifyResult::Known(n) => println!("identified = {n}"),
        IdentifyResult::Unknown { canonical } => {
            let enc: Vec<String> = canonical.iter().map(|d| d.to_string()).collect();
            println!("identified = unknown");
            println!("canonical = {}", enc.join(" "));
        }
    }
    for (e, w) in g.edge_wraps.iter().enumerate() {
        println!("edge{}_wrap = {},{}", e, w.0, w.1);
    }
    if let Some(geom) = &args.geom {
        let mut text = String::new();
        for (d, dg) in g.dart_geometry.iter().enumerate() {
            text.push_str(&format!("dart {}\n", d + 1));
            for p in &dg.polyline {
                text.push_str(&format!("{:.12e} {:.12e}\n", p.re, p.im));
            }
        }
        std::fs::write(geom, text)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn catalog_dir_override() -> Option<PathBuf> {
    std::env::var_os("ENF_DATA_DIR").map(PathBuf::from)
}

fn catalog_cmd(cmd: CatalogCmd) -> anyhow::Result<ExitCode> {
    match cmd {
        CatalogCmd::List => {
            for entry in catalog::catalog() {
                let m = &entry.map;
                let report = is_newton_graph(m, m.vertex_count());
                println!(
                    "{} V={} E={} F={} loopless={} a={} e={} newtonian={} | {}",
                    entry.name,
                    m.vertex_count(),
                    m.edge_count(),
                    m.face_count(),
                    report.loopless,
                    report.a_property,
                    report.e_property,
                    report.newtonian,
                    entry.description
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        CatalogCmd::Show { name } => {
            if let Some(dir) = catalog_dir_override() {
                let file = dir.join(format!("{}.cmap", name.replace('.', "_")));
                if file.exists() {
                    print!("{}", std::fs::read_to_string(file)?);
                    return Ok(ExitCode::SUCCESS);
                }
            }
            let entry = catalog::catalog_get(&name)?;
            print!("{}", entry.map.to_cmap_string(entry.name));
            Ok(ExitCode::SUCCESS)
        }
    }
}
