//! `polyschwarz` command-line harness.
//!
//! Exit codes: 0 success, 1 invalid input or runtime error, 2 usage error,
//! 3 at least one Krylov solve did not converge.

mod config;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polyschwarz::coarse::{CoarseKind, OrphanPolicy};
use polyschwarz::decomposition::geometric_owners;
use polyschwarz::mesh::{export_mesh, validate_mesh, write_native, write_vtk, MeshFormat, VtkFields};
use polyschwarz::schwarz::{write_history_csv, KrylovConfig, KrylovMethod, SchwarzMode};
use polyschwarz::study::{
    self, ConvergenceConfig, ConvergenceTable, MeshFamily, MeshSpec, ScalingReport, SolveConfig, SolverSettings, StrongScalingConfig, VariantSet, WeakScalingConfig,
};
use polyschwarz::vem::{check_order, Stabilization};

use config::Config;
use svg::{line_plot, Axes, Series};

#[derive(Parser)]
#[command(name = "polyschwarz", version, about = "VEM Poisson solver with two-level overlapping Schwarz preconditioners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a mesh and write it as VTK or native text.
    Mesh(MeshArgs),
    /// Discretize, partition and solve one problem.
    Solve(SolveArgs),
    /// Structured meshes with a fixed number of cells per subdomain.
    WeakScaling(WeakArgs),
    /// One mesh, several subdomain grids.
    StrongScaling(StrongArgs),
    /// Discretization errors and observed rates on a refinement sequence.
    Convergence(ConvergenceArgs),
}

#[derive(Args, Default)]
struct MeshSource {
    /// Mesh generator: structured, voronoi or file [default: structured]
    #[arg(long = "mesh")]
    kind: Option<String>,
    /// Spatial dimension [default: 2]
    #[arg(long)]
    dim: Option<usize>,
    /// Cells per axis for structured meshes [default: 16]
    #[arg(long)]
    n: Option<usize>,
    /// Number of Voronoi cells [default: 1000]
    #[arg(long)]
    cells: Option<usize>,
    /// Voronoi seed [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    /// Mesh file (.vtk or native .mesh); implies --mesh file
    #[arg(long)]
    mesh_file: Option<PathBuf>,
}

#[derive(Args, Default)]
struct Common {
    /// TOML experiment file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in problem: cubic, quadratic, linear, constant [default: cubic]
    #[arg(long)]
    problem: Option<String>,
    /// Polynomial order(s), comma separated [default: 1]
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// d-recipe or dofi-dofi [default: d-recipe]
    #[arg(long)]
    stabilization: Option<String>,
    /// Overlap in cell layers [default: 1]
    #[arg(long)]
    overlap: Option<usize>,
    /// as or ras [default: ras]
    #[arg(long)]
    mode: Option<String>,
    /// gmres or cg [default: gmres]
    #[arg(long)]
    method: Option<String>,
    /// Relative residual tolerance [default: 1e-8]
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration limit [default: 1000]
    #[arg(long)]
    max_iters: Option<usize>,
    /// GMRES restart length [default: 200]
    #[arg(long)]
    restart: Option<usize>,
    /// Second Gram-Schmidt pass in GMRES
    #[arg(long)]
    reorthogonalize: bool,
    /// Orphan interface components: promote or reject [default: promote]
    #[arg(long)]
    orphans: Option<String>,
    /// Output directory [default: results]
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Base name of output files
    #[arg(long)]
    name: Option<String>,
    /// Also write SVG plots
    #[arg(long)]
    svg: bool,
    /// Single worker and fixed reduction order
    #[arg(long)]
    deterministic: bool,
    /// Worker threads [default: all cores]
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct MeshArgs {
    #[command(flatten)]
    source: MeshSource,
    /// TOML experiment file providing the [mesh] section
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path; .vtk writes VTK, anything else the native format
    #[arg(long, short)]
    out: PathBuf,
    /// Subdomain grid to store as cell data, e.g. 4x4
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: MeshSource,
    #[command(flatten)]
    common: Common,
    /// Subdomain grid, e.g. 2x2 or 2x2x2 [default: 2 per axis]
    #[arg(long)]
    grid: Option<String>,
    /// gdsw, gdsw*, rgdsw or none [default: gdsw]
    #[arg(long)]
    coarse: Option<String>,
    /// Write the solution as VTK
    #[arg(long)]
    vtk: Option<PathBuf>,
    /// Write the residual history as CSV
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Args)]
struct WeakArgs {
    #[command(flatten)]
    common: Common,
    /// Spatial dimension [default: 3]
    #[arg(long)]
    dim: Option<usize>,
    /// Subdomains per axis, comma separated [default: 2,3,4]
    #[arg(long, value_delimiter = ',')]
    ns: Option<Vec<usize>>,
    /// Cells per subdomain and axis [default: 5]
    #[arg(long)]
    cells_per_side: Option<usize>,
    /// Coarse spaces, comma separated [default: gdsw,gdsw*,rgdsw]
    #[arg(long, value_delimiter = ',')]
    coarse: Option<Vec<String>>,
    /// Also run the one-level method
    #[arg(long)]
    one_level: bool,
}

#[derive(Args)]
struct StrongArgs {
    #[command(flatten)]
    source: MeshSource,
    #[command(flatten)]
    common: Common,
    /// Subdomain grids, comma separated, e.g. 4x4,8x8 [default: 2x2,4x4]
    #[arg(long, value_delimiter = ',')]
    grids: Option<Vec<String>>,
    /// Coarse spaces, comma separated [default: gdsw,gdsw*,rgdsw]
    #[arg(long, value_delimiter = ',')]
    coarse: Option<Vec<String>>,
    /// Also run the one-level method
    #[arg(long)]
    one_level: bool,
}

#[derive(Args)]
struct ConvergenceArgs {
    #[command(flatten)]
    common: Common,
    /// Spatial dimension [default: 2]
    #[arg(long)]
    dim: Option<usize>,
    /// structured or voronoi [default: structured]
    #[arg(long)]
    family: Option<String>,
    /// Cells per axis (structured) or cell counts (voronoi) [default: 8,16,32]
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Voronoi seed [default: 1]
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Error(String),
    NotConverged(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Error(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mesh(a) => cmd_mesh(a),
        Command::Solve(a) => cmd_solve(a),
        Command::WeakScaling(a) => cmd_weak(a),
        Command::StrongScaling(a) => cmd_strong(a),
        Command::Convergence(a) => cmd_convergence(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::NotConverged(msg)) => {
            eprintln!("not converged: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, Failure> {
    match path {
        Some(p) => Config::load(p).map_err(Failure::Error),
        None => Ok(Config::default()),
    }
}

fn parse_grid(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(['x', 'X'])
        .map(|t| t.trim().parse::<usize>().map_err(|_| Failure::Error(format!("invalid grid '{s}' (expected e.g. 4x4 or 2x2x2)"))))
        .collect()
}

fn parse_kind(s: &str) -> Result<Option<CoarseKind>, Failure> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    s.parse::<CoarseKind>().map(Some).map_err(Failure::Error)
}

fn mesh_spec(src: &MeshSource, cfg: &Config, default_dim: usize) -> Result<MeshSpec, Failure> {
    let m = &cfg.mesh;
    let path = src.mesh_file.clone().or_else(|| m.path.clone());
    let kind = src.kind.clone().or_else(|| m.kind.clone()).unwrap_or_else(|| if path.is_some() { "file".into() } else { "structured".into() });
    let dim = src.dim.or(m.dim).unwrap_or(default_dim);
    match kind.to_ascii_lowercase().as_str() {
        "structured" => Ok(MeshSpec::Structured { dim, n: src.n.or(m.n).unwrap_or(16) }),
        "voronoi" => {
            if dim != 2 {
                return Err(Failure::Error("Voronoi generation is 2D only; import 3D polyhedral meshes with --mesh-file".into()));
            }
            Ok(MeshSpec::Voronoi { cells: src.cells.or(m.cells).unwrap_or(1000), seed: src.seed.or(m.seed).unwrap_or(1) })
        }
        "file" => {
            let path = path.ok_or_else(|| Failure::Error("--mesh file needs --mesh-file".into()))?;
            if !path.exists() {
                return Err(Failure::Error(format!("mesh file {} does not exist", path.display())));
            }
            Ok(MeshSpec::File { path })
        }
        other => Err(Failure::Error(format!("unknown mesh kind '{other}' (expected structured, voronoi or file)"))),
    }
}

fn setup_workers(c: &Common, cfg: &Config) -> Result<(), Failure> {
    let deterministic = c.deterministic || cfg.run.deterministic.unwrap_or(false);
    let workers = if deterministic { Some(1) } else { c.workers.or(cfg.run.workers) };
    if let Some(n) = workers {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global()?;
    }
    Ok(())
}

fn orders(c: &Common, cfg: &Config) -> Result<Vec<usize>, Failure> {
    let ks = c.k.clone().or_else(|| cfg.problem.k.as_ref().map(|k| k.to_vec())).unwrap_or_else(|| vec![1]);
    for &k in &ks {
        check_order(k)?;
    }
    Ok(ks)
}

fn settings(c: &Common, cfg: &Config) -> Result<SolverSettings, Failure> {
    let s = &cfg.solver;
    let stabilization = match c.stabilization.as_ref().or(cfg.problem.stabilization.as_ref()) {
        Some(v) => v.parse::<Stabilization>().map_err(Failure::Error)?,
        None => Stabilization::DRecipe,
    };
    let mode = match c.mode.as_ref().or(s.mode.as_ref()) {
        Some(v) => v.parse::<SchwarzMode>().map_err(Failure::Error)?,
        None => SchwarzMode::Restricted,
    };
    let method = match c.method.as_ref().or(s.method.as_ref()) {
        Some(v) => v.parse::<KrylovMethod>().map_err(Failure::Error)?,
        None => KrylovMethod::Gmres,
    };
    let orphans = match c.orphans.as_deref().or(s.orphans.as_deref()) {
        None | Some("promote") => OrphanPolicy::Promote,
        Some("reject") => OrphanPolicy::Reject,
        Some(other) => return Err(Failure::Error(format!("unknown orphan policy '{other}' (expected promote or reject)"))),
    };
    let defaults = KrylovConfig::default();
    let krylov = KrylovConfig {
        method,
        tol: c.tol.or(s.tol).unwrap_or(defaults.tol),
        max_iters: c.max_iters.or(s.max_iters).unwrap_or(defaults.max_iters),
        restart: c.restart.or(s.restart).unwrap_or(defaults.restart),
        reorthogonalize: c.reorthogonalize || s.reorthogonalize.unwrap_or(false),
    };
    krylov.validate()?;
    if method == KrylovMethod::Cg && mode == SchwarzMode::Restricted {
        return Err(Failure::Error("CG needs a symmetric preconditioner; use --mode as with --method cg".into()));
    }
    Ok(SolverSettings {
        problem: c.problem.clone().or_else(|| cfg.problem.name.clone()).unwrap_or_else(|| "cubic".into()),
        stabilization,
        overlap: c.overlap.or(cfg.partition.overlap).unwrap_or(1),
        mode,
        krylov,
        orphans,
    })
}

fn variants(coarse: Option<&Vec<String>>, one_level: bool, cfg: &Config) -> Result<VariantSet, Failure> {
    let names = coarse.cloned().or_else(|| cfg.solver.coarse.clone());
    let mut kinds = Vec::new();
    let mut one = one_level || cfg.solver.one_level.unwrap_or(false);
    match names {
        None => kinds = CoarseKind::ALL.to_vec(),
        Some(list) => {
            for n in list {
                match parse_kind(&n)? {
                    Some(k) if !kinds.contains(&k) => kinds.push(k),
                    Some(_) => {}
                    None => one = true,
                }
            }
        }
    }
    Ok(VariantSet { one_level: one, kinds })
}

struct Output {
    dir: PathBuf,
    name: String,
    svg: bool,
}

impl Output {
    fn new(c: &Common, cfg: &Config, default_name: &str) -> Result<Self, Failure> {
        let dir = c.out_dir.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("results"));
        let name = c.name.clone().or_else(|| cfg.output.name.clone()).unwrap_or_else(|| default_name.into());
        Ok(Output { dir, name, svg: c.svg || cfg.output.svg.unwrap_or(false) })
    }

    fn write(&self, suffix: &str, contents: &str) -> Result<PathBuf, Failure> {
        fs::create_dir_all(&self.dir).map_err(|e| Failure::Error(format!("cannot create {}: {e}", self.dir.display())))?;
        let path = self.dir.join(format!("{}{suffix}", self.name));
        fs::write(&path, contents).map_err(|e| Failure::Error(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

fn history_csv(history: &[f64]) -> String {
    let mut buf = Vec::new();
    write_history_csv(&mut buf, history).expect("in-memory write");
    String::from_utf8(buf).expect("ascii")
}

fn cmd_mesh(a: MeshArgs) -> CliResult {
    let cfg = load_config(a.config.as_deref())?;
    let spec = mesh_spec(&a.source, &cfg, 2)?;
    let mesh = spec.build()?;
    let report = validate_mesh(&mesh);
    if !report.is_valid() {
        return Err(Failure::Error(format!("generated mesh failed validation: {report:?}")));
    }
    let format = MeshFormat::from_path(&a.out);
    if let Some(grid) = a.grid.as_deref() {
        let owners = geometric_owners(&mesh, &parse_grid(grid)?)?;
        let fields = VtkFields { point_data: Vec::new(), cell_data: vec![("subdomain".into(), owners.iter().map(|&o| o as f64).collect())] };
        let text = match format {
            MeshFormat::Vtk => write_vtk(&mesh, &fields),
            MeshFormat::Native => write_native(&mesh),
        };
        fs::write(&a.out, text)?;
    } else {
        export_mesh(&mesh, &a.out, format)?;
    }
    println!("{}: {} cells, {} vertices, h = {:.4} -> {}", spec.describe(), mesh.n_cells(), mesh.n_vertices(), mesh.mesh_size(), a.out.display());
    Ok(())
}

fn cmd_solve(a: SolveArgs) -> CliResult {
    let cfg = load_config(a.common.config.as_deref())?;
    setup_workers(&a.common, &cfg)?;
    let spec = mesh_spec(&a.source, &cfg, 2)?;
    let ks = orders(&a.common, &cfg)?;
    let [k] = ks[..] else {
        return Err(Failure::Error("solve takes a single order k".into()));
    };
    let settings = settings(&a.common, &cfg)?;
    let coarse = match a.coarse.as_deref().or(cfg.solver.coarse.as_ref().and_then(|c| c.first()).map(String::as_str)) {
        Some(s) => parse_kind(s)?,
        None => Some(CoarseKind::Gdsw),
    };
    let dim = match &spec {
        MeshSpec::Structured { dim, .. } => *dim,
        MeshSpec::Voronoi { .. } => 2,
        MeshSpec::File { .. } => spec.build()?.dim(),
    };
    let grid = match a.grid.as_deref() {
        Some(g) => parse_grid(g)?,
        None => cfg.partition.grid.clone().unwrap_or_else(|| vec![2; dim]),
    };
    let out = Output::new(&a.common, &cfg, "solve")?;
    let summary = study::solve(&SolveConfig { mesh: spec.clone(), k, grid: grid.clone(), coarse, settings: settings.clone() })?;

    let kind = coarse.map_or("one-level".to_string(), |c| c.to_string());
    println!("mesh        {} ({} cells)", spec.describe(), summary.mesh.n_cells());
    println!("problem     {} k={k} {}", settings.problem, settings.stabilization);
    println!("dofs        {} ({} free)", summary.dofs, summary.free_dofs);
    println!("subdomains  {} ({})", summary.subdomains, grid.iter().map(|g| g.to_string()).collect::<Vec<_>>().join("x"));
    println!("coarse      {kind} dim {}", summary.coarse_dim);
    println!("iterations  {} ({} {}, tol {:e})", summary.outcome.iterations(), settings.krylov.method, settings.mode, settings.krylov.tol);
    if let Some(e) = summary.errors {
        println!("errors      L2 {:.6e}  H1 {:.6e}", e.l2, e.h1);
    }
    let history_path = a.history.clone().or_else(|| cfg.output.history.clone());
    if let Some(p) = &history_path {
        fs::write(p, history_csv(&summary.history))?;
    }
    if out.svg {
        let pts = summary.history.iter().enumerate().map(|(i, r)| (i as f64, *r)).collect();
        let plot = line_plot("Residual history", "iteration", "relative residual", &[Series { label: kind.clone(), points: pts }], Axes { log_x: false, log_y: true });
        out.write("_residual.svg", &plot)?;
    }
    if !summary.outcome.converged() {
        let dump = match history_path {
            Some(p) => p,
            None => out.write("_history.csv", &history_csv(&summary.history))?,
        };
        return Err(Failure::NotConverged(format!("{} iterations, history in {}", summary.outcome.iterations(), dump.display())));
    }
    if let Some(vtk) = a.vtk.clone().or_else(|| cfg.output.vtk.clone()) {
        let mesh = &summary.mesh;
        let p = study::problem(&settings.problem, mesh.dim())?;
        // vertex DOFs come first in the global numbering
        let uh = summary.solution[..mesh.n_vertices()].to_vec();
        let exact = mesh.vertices().iter().map(|x| (p.u)(x)).collect();
        let owners = geometric_owners(mesh, &grid)?;
        let fields = VtkFields {
            point_data: vec![("u_h".into(), uh), ("u_exact".into(), exact)],
            cell_data: vec![("subdomain".into(), owners.iter().map(|&o| o as f64).collect())],
        };
        fs::write(&vtk, write_vtk(mesh, &fields))?;
        println!("solution    {}", vtk.display());
    }
    Ok(())
}

fn finish_scaling(report: &ScalingReport, out: &Output) -> CliResult {
    report.check_identities()?;
    let csv = out.write(".csv", &report.to_csv())?;
    out.write(".md", &report.to_markdown())?;
    print!("{}", report.to_markdown());
    println!("\nwrote {}", csv.display());
    if out.svg {
        let series = report
            .variants
            .iter()
            .map(|v| Series {
                label: v.map_or("one-level".into(), |k| k.to_string()),
                points: report.rows.iter().filter_map(|r| r.iterations(*v).map(|it| (r.subdomains() as f64, it as f64))).collect(),
            })
            .collect::<Vec<_>>();
        out.write("_iterations.svg", &line_plot(&report.title, "subdomains", "iterations", &series, Axes { log_x: true, log_y: false }))?;
    }
    if !report.all_converged() {
        let mut dumps = Vec::new();
        for row in &report.rows {
            for r in row.results.iter().filter(|r| !r.outcome.converged()) {
                let tag = r.kind.map_or("one_level".into(), |k| k.to_string().to_lowercase().replace('*', "_star"));
                let grid: Vec<String> = row.grid.iter().map(|g| g.to_string()).collect();
                dumps.push(out.write(&format!("_history_k{}_{}_{tag}.csv", row.k, grid.join("x")), &history_csv(&r.history))?);
            }
        }
        return Err(Failure::NotConverged(format!("{} solve(s) failed; histories in {}", dumps.len(), out.dir.display())));
    }
    Ok(())
}

fn cmd_weak(a: WeakArgs) -> CliResult {
    let cfg = load_config(a.common.config.as_deref())?;
    setup_workers(&a.common, &cfg)?;
    let wc = WeakScalingConfig {
        dim: a.dim.or(cfg.mesh.dim).unwrap_or(3),
        cells_per_side: a.cells_per_side.or(cfg.weak.cells_per_side).unwrap_or(5),
        subdomains_per_axis: a.ns.clone().or_else(|| cfg.weak.ns.clone()).unwrap_or_else(|| vec![2, 3, 4]),
        orders: orders(&a.common, &cfg)?,
        variants: variants(a.coarse.as_ref(), a.one_level, &cfg)?,
        settings: settings(&a.common, &cfg)?,
    };
    let out = Output::new(&a.common, &cfg, "weak_scaling")?;
    finish_scaling(&study::weak_scaling(&wc)?, &out)
}

fn cmd_strong(a: StrongArgs) -> CliResult {
    let cfg = load_config(a.common.config.as_deref())?;
    setup_workers(&a.common, &cfg)?;
    let grids = match &a.grids {
        Some(list) => list.iter().map(|g| parse_grid(g)).collect::<Result<Vec<_>, _>>()?,
        None => cfg.partition.grids.clone().unwrap_or_else(|| vec![vec![2, 2], vec![4, 4]]),
    };
    let sc = StrongScalingConfig {
        mesh: mesh_spec(&a.source, &cfg, 2)?,
        grids,
        orders: orders(&a.common, &cfg)?,
        variants: variants(a.coarse.as_ref(), a.one_level, &cfg)?,
        settings: settings(&a.common, &cfg)?,
    };
    let out = Output::new(&a.common, &cfg, "strong_scaling")?;
    finish_scaling(&study::strong_scaling(&sc)?, &out)
}

fn cmd_convergence(a: ConvergenceArgs) -> CliResult {
    let cfg = load_config(a.common.config.as_deref())?;
    setup_workers(&a.common, &cfg)?;
    let s = settings(&a.common, &cfg)?;
    let family = match a.family.as_deref().or(cfg.convergence.family.as_deref()).unwrap_or("structured") {
        "structured" => MeshFamily::Structured,
        "voronoi" => MeshFamily::Voronoi { seed: a.seed.or(cfg.mesh.seed).unwrap_or(1) },
        other => return Err(Failure::Error(format!("unknown mesh family '{other}' (expected structured or voronoi)"))),
    };
    let dim = a.dim.or(cfg.mesh.dim).unwrap_or(2);
    let sizes = a.sizes.clone().or_else(|| cfg.convergence.sizes.clone()).unwrap_or_else(|| vec![8, 16, 32]);
    let out = Output::new(&a.common, &cfg, "convergence")?;
    let mut tables: Vec<ConvergenceTable> = Vec::new();
    for k in orders(&a.common, &cfg)? {
        let cc = ConvergenceConfig { dim, family, sizes: sizes.clone(), k, problem: s.problem.clone(), stabilization: s.stabilization };
        tables.push(study::convergence(&cc)?);
    }
    let mut csv = String::new();
    let mut md = String::new();
    for (i, (t, k)) in tables.iter().zip(orders(&a.common, &cfg)?).enumerate() {
        // one CSV with a leading order column
        for (j, line) in t.to_csv().lines().enumerate() {
            if j == 0 {
                if i == 0 {
                    csv.push_str(&format!("k,{line}\n"));
                }
            } else {
                csv.push_str(&format!("{k},{line}\n"));
            }
        }
        md.push_str(&t.to_markdown());
        md.push('\n');
    }
    let path = out.write(".csv", &csv)?;
    out.write(".md", &md)?;
    print!("{md}");
    println!("wrote {}", path.display());
    if out.svg {
        let series: Vec<Series> = tables
            .iter()
            .zip(orders(&a.common, &cfg)?)
            .flat_map(|(t, k)| {
                [
                    Series { label: format!("k={k} L2"), points: t.rows.iter().map(|r| (r.h, r.errors.l2)).collect() },
                    Series { label: format!("k={k} H1"), points: t.rows.iter().map(|r| (r.h, r.errors.h1)).collect() },
                ]
            })
            .collect();
        out.write(".svg", &line_plot("Discretization error", "h", "error", &series, Axes { log_x: true, log_y: true }))?;
    }
    Ok(())
}
