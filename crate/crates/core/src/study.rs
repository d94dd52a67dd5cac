//! Experiment drivers: single solves, weak/strong scaling tables and
//! discretization convergence studies.
//!
//! Reports hold no timings, so their CSV output is a pure function of the
//! configuration.

use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use crate::coarse::{build_coarse_basis, CoarseError, CoarseKind, OrphanPolicy};
use crate::decomposition::{classify_interface, partition_geometric, DecompositionError};
use crate::linalg::{Factorization, LinalgError};
use crate::mesh::{generate_structured_box, generate_voronoi_2d, import_mesh, MeshError, MeshFormat, PolyMesh};
use crate::schwarz::{build_preconditioner, krylov_solve, KrylovConfig, SchwarzError, SchwarzMode, SchwarzPreconditioner};
use crate::vem::problems::{self, Problem};
use crate::vem::{assemble, compute_errors, AssembledSystem, ErrorNorms, Stabilization, VemError};

#[derive(Debug, Error)]
pub enum StudyError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Vem(#[from] VemError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Coarse(#[from] CoarseError),
    #[error(transparent)]
    Schwarz(#[from] SchwarzError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("no built-in problem '{name}' in {dim}D (available: cubic, quadratic, linear, constant)")]
    UnknownProblem { name: String, dim: usize },
    #[error("partition grid {grid:?} does not match a {dim}D mesh")]
    GridDimension { grid: Vec<usize>, dim: usize },
    #[error("row {row}: coarse dimensions violate {identity}")]
    DimensionIdentity { row: String, identity: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSpec {
    /// `n` cells per axis on the unit square/cube.
    Structured { dim: usize, n: usize },
    Voronoi { cells: usize, seed: u64 },
    File { path: PathBuf },
}

impl MeshSpec {
    pub fn build(&self) -> Result<PolyMesh, StudyError> {
        Ok(match self {
            MeshSpec::Structured { dim, n } => generate_structured_box(*dim, *n)?,
            MeshSpec::Voronoi { cells, seed } => generate_voronoi_2d(*cells, *seed)?,
            MeshSpec::File { path } => import_mesh(path, MeshFormat::from_path(path))?,
        })
    }

    pub fn describe(&self) -> String {
        match self {
            MeshSpec::Structured { dim: 2, n } => format!("quad {n}x{n}"),
            MeshSpec::Structured { n, .. } => format!("hex {n}x{n}x{n}"),
            MeshSpec::Voronoi { cells, seed } => format!("voronoi {cells} cells (seed {seed})"),
            MeshSpec::File { path } => format!("file {}", path.display()),
        }
    }
}

/// Discretization and solver knobs shared by all drivers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    pub problem: String,
    pub stabilization: Stabilization,
    pub overlap: usize,
    pub mode: SchwarzMode,
    pub krylov: KrylovConfig,
    pub orphans: OrphanPolicy,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            problem: "cubic".into(),
            stabilization: Stabilization::DRecipe,
            overlap: 1,
            mode: SchwarzMode::Restricted,
            krylov: KrylovConfig::default(),
            orphans: OrphanPolicy::Promote,
        }
    }
}

pub fn problem(name: &str, dim: usize) -> Result<Problem, StudyError> {
    problems::builtin(name, dim).ok_or_else(|| StudyError::UnknownProblem { name: name.into(), dim })
}

pub fn discretize(mesh: &PolyMesh, k: usize, settings: &SolverSettings) -> Result<(Problem, AssembledSystem), StudyError> {
    let p = problem(&settings.problem, mesh.dim())?;
    let sys = assemble(mesh, k, &p.f, &p.u, settings.stabilization)?;
    Ok((p, sys))
}

fn grid_label(grid: &[usize]) -> String {
    grid.iter().map(|g| g.to_string()).collect::<Vec<_>>().join("x")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged(usize),
    NotConverged(usize),
}

impl Outcome {
    pub fn iterations(&self) -> usize {
        match *self {
            Outcome::Converged(n) | Outcome::NotConverged(n) => n,
        }
    }

    pub fn converged(&self) -> bool {
        matches!(self, Outcome::Converged(_))
    }

    fn cell(&self) -> String {
        match self {
            Outcome::Converged(n) => n.to_string(),
            Outcome::NotConverged(n) => format!("nc:{n}"),
        }
    }
}

/// One preconditioner variant; `kind == None` is the one-level method.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantResult {
    pub kind: Option<CoarseKind>,
    pub coarse_dim: usize,
    pub orphans: usize,
    pub outcome: Outcome,
    pub history: Vec<f64>,
}

fn run_variant(k: &crate::linalg::CsrMatrix, b: &[f64], m: &SchwarzPreconditioner, cfg: &KrylovConfig) -> Result<(Outcome, Vec<f64>, Vec<f64>), StudyError> {
    match krylov_solve(k, b, m, cfg) {
        Ok(r) => Ok((Outcome::Converged(r.iterations), r.history, r.x)),
        Err(SchwarzError::NotConverged { iterations, history }) => Ok((Outcome::NotConverged(iterations), history, Vec::new())),
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub k: usize,
    pub grid: Vec<usize>,
    pub dofs: usize,
    /// Interface component counts `(V, E, F)`.
    pub components: (usize, usize, usize),
    pub results: Vec<VariantResult>,
}

impl ScalingRow {
    pub fn subdomains(&self) -> usize {
        self.grid.iter().product()
    }

    pub fn result(&self, kind: Option<CoarseKind>) -> Option<&VariantResult> {
        self.results.iter().find(|r| r.kind == kind)
    }

    pub fn iterations(&self, kind: Option<CoarseKind>) -> Option<usize> {
        self.result(kind).map(|r| r.outcome.iterations())
    }

    pub fn coarse_dim(&self, kind: CoarseKind) -> Option<usize> {
        self.result(Some(kind)).map(|r| r.coarse_dim)
    }

    /// `N(GDSW) = V+E+F`, `N(GDSW*) = V+F+orphan edges`, `N(RGDSW) = V+orphans`;
    /// without orphans these reduce to the usual identities between the three.
    pub fn check_identities(&self, dim: usize) -> Result<(), StudyError> {
        let (v, e, f) = self.components;
        let fail = |identity: &str| StudyError::DimensionIdentity { row: format!("k={} grid={}", self.k, grid_label(&self.grid)), identity: identity.into() };
        for r in self.results.iter().filter(|r| r.kind.is_some()) {
            let expected = match r.kind.unwrap() {
                CoarseKind::Gdsw => v + e + f,
                CoarseKind::GdswStar => v + f + r.orphans,
                CoarseKind::Rgdsw => v + r.orphans,
            };
            if r.coarse_dim != expected {
                return Err(fail(&format!("{} = {expected}", r.kind.unwrap())));
            }
        }
        let no_orphans = self.results.iter().all(|r| r.orphans == 0);
        if let (true, Some(g), Some(s), Some(rg)) = (no_orphans, self.coarse_dim(CoarseKind::Gdsw), self.coarse_dim(CoarseKind::GdswStar), self.coarse_dim(CoarseKind::Rgdsw)) {
            let ok = if dim == 3 { g == s + e && g == rg + e + f } else { s == rg };
            if !ok {
                return Err(fail(if dim == 3 { "GDSW = GDSW* + |E| = RGDSW + |E| + |F|" } else { "GDSW* = RGDSW" }));
            }
        }
        Ok(())
    }
}

/// Iteration table over partitions or mesh families.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub title: String,
    pub dim: usize,
    pub metadata: Vec<(String, String)>,
    pub variants: Vec<Option<CoarseKind>>,
    pub rows: Vec<ScalingRow>,
}

impl ScalingReport {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.results.iter().all(|v| v.outcome.converged()))
    }

    pub fn check_identities(&self) -> Result<(), StudyError> {
        self.rows.iter().try_for_each(|r| r.check_identities(self.dim))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = ["k", "grid", "subdomains", "dofs", "vertices", "edges", "faces"].map(String::from).to_vec();
        for v in &self.variants {
            match v {
                None => header.push("one_level_it".into()),
                Some(kind) => {
                    let key = kind.to_string().to_lowercase().replace('*', "_star");
                    header.push(format!("{key}_coarse"));
                    header.push(format!("{key}_it"));
                }
            }
        }
        w.write_record(&header).expect("in-memory write");
        for row in &self.rows {
            let (v, e, f) = row.components;
            let mut rec = vec![row.k.to_string(), grid_label(&row.grid), row.subdomains().to_string(), row.dofs.to_string(), v.to_string(), e.to_string(), f.to_string()];
            for variant in &self.variants {
                let r = row.result(*variant);
                if variant.is_some() {
                    rec.push(r.map_or(String::new(), |r| r.coarse_dim.to_string()));
                }
                rec.push(r.map_or(String::new(), |r| r.outcome.cell()));
            }
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }

    /// Markdown table in the per-kind `Coarse | it` layout.
    pub fn to_markdown(&self) -> String {
        let mut out = format!("### {}\n\n", self.title);
        for (key, value) in &self.metadata {
            let _ = writeln!(out, "- {key}: {value}");
        }
        out.push('\n');
        let mut head = String::from("| k | nSub | grid | Dofs |");
        let mut rule = String::from("|---|---:|---|---:|");
        for v in &self.variants {
            match v {
                None => {
                    head.push_str(" one-level it |");
                    rule.push_str("---:|");
                }
                Some(kind) => {
                    let _ = write!(head, " {kind} Coarse | {kind} it |");
                    rule.push_str("---:|---:|");
                }
            }
        }
        let _ = writeln!(out, "{head}\n{rule}");
        for row in &self.rows {
            let _ = write!(out, "| {} | {} | {} | {} |", row.k, row.subdomains(), grid_label(&row.grid), row.dofs);
            for variant in &self.variants {
                let r = row.result(*variant);
                if variant.is_some() {
                    let _ = write!(out, " {} |", r.map_or("-".into(), |r| r.coarse_dim.to_string()));
                }
                let _ = write!(out, " {} |", r.map_or("-".into(), |r| r.outcome.cell()));
            }
            out.push('\n');
        }
        out
    }
}

/// Variants to run for each row.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantSet {
    pub one_level: bool,
    pub kinds: Vec<CoarseKind>,
}

impl Default for VariantSet {
    fn default() -> Self {
        VariantSet { one_level: false, kinds: CoarseKind::ALL.to_vec() }
    }
}

impl VariantSet {
    fn list(&self) -> Vec<Option<CoarseKind>> {
        let mut v: Vec<Option<CoarseKind>> = self.kinds.iter().copied().map(Some).collect();
        if self.one_level {
            v.insert(0, None);
        }
        v
    }
}

/// Partitions, classifies and solves one system with every requested variant,
/// reusing the local factorizations across coarse spaces.
pub fn run_row(mesh: &PolyMesh, sys: &AssembledSystem, grid: &[usize], variants: &VariantSet, settings: &SolverSettings) -> Result<ScalingRow, StudyError> {
    if grid.len() != mesh.dim() {
        return Err(StudyError::GridDimension { grid: grid.to_vec(), dim: mesh.dim() });
    }
    let dm = &sys.dof_map;
    let part = partition_geometric(mesh, dm, grid)?;
    let cls = classify_interface(mesh, dm, &part)?;
    let overlapping = part.grow_overlap(mesh, dm, settings.overlap);
    let base = build_preconditioner(&sys.stiffness, &overlapping, None, settings.mode)?;
    let mut results = Vec::new();
    for variant in variants.list() {
        let (m, coarse_dim, orphans) = match variant {
            None => (base.clone(), 0, 0),
            Some(kind) => {
                let basis = build_coarse_basis(kind, &sys.stiffness, mesh, dm, &part, &cls, settings.orphans)?;
                (base.with_coarse(&sys.stiffness, Some(&basis.phi))?, basis.dim(), basis.n_orphans())
            }
        };
        let (outcome, history, _) = run_variant(&sys.stiffness, &sys.rhs, &m, &settings.krylov)?;
        results.push(VariantResult { kind: variant, coarse_dim, orphans, outcome, history });
    }
    Ok(ScalingRow { k: sys.k, grid: grid.to_vec(), dofs: dm.n_dofs(), components: cls.counts(), results })
}

/// Structured meshes with `cells_per_side` cells per subdomain axis and
/// `n_s^dim` subdomains for each entry of `subdomains_per_axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakScalingConfig {
    pub dim: usize,
    pub cells_per_side: usize,
    pub subdomains_per_axis: Vec<usize>,
    pub orders: Vec<usize>,
    pub variants: VariantSet,
    pub settings: SolverSettings,
}

impl Default for WeakScalingConfig {
    fn default() -> Self {
        WeakScalingConfig {
            dim: 3,
            cells_per_side: 5,
            subdomains_per_axis: vec![2, 3, 4],
            orders: vec![1],
            variants: VariantSet::default(),
            settings: SolverSettings::default(),
        }
    }
}

fn metadata(settings: &SolverSettings, mesh: String) -> Vec<(String, String)> {
    vec![
        ("mesh".into(), mesh),
        ("problem".into(), settings.problem.clone()),
        ("stabilization".into(), settings.stabilization.to_string()),
        ("mode".into(), format!("{} overlap {}", settings.mode, settings.overlap)),
        ("krylov".into(), format!("{} tol {:e}", settings.krylov.method, settings.krylov.tol)),
    ]
}

pub fn weak_scaling(cfg: &WeakScalingConfig) -> Result<ScalingReport, StudyError> {
    let mut rows = Vec::new();
    for &k in &cfg.orders {
        for &ns in &cfg.subdomains_per_axis {
            let mesh = generate_structured_box(cfg.dim, cfg.cells_per_side * ns)?;
            let (_, sys) = discretize(&mesh, k, &cfg.settings)?;
            let row = run_row(&mesh, &sys, &vec![ns; cfg.dim], &cfg.variants, &cfg.settings)?;
            row.check_identities(cfg.dim)?;
            rows.push(row);
        }
    }
    let cells = cfg.cells_per_side.pow(cfg.dim as u32);
    Ok(ScalingReport {
        title: format!("Weak scaling, {}D structured, {cells} cells per subdomain", cfg.dim),
        dim: cfg.dim,
        metadata: metadata(&cfg.settings, format!("structured, {} cells per subdomain axis", cfg.cells_per_side)),
        variants: cfg.variants.list(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongScalingConfig {
    pub mesh: MeshSpec,
    pub grids: Vec<Vec<usize>>,
    pub orders: Vec<usize>,
    pub variants: VariantSet,
    pub settings: SolverSettings,
}

/// One fixed mesh, several subdomain grids.
pub fn strong_scaling(cfg: &StrongScalingConfig) -> Result<ScalingReport, StudyError> {
    let mesh = cfg.mesh.build()?;
    let mut rows = Vec::new();
    for &k in &cfg.orders {
        let (_, sys) = discretize(&mesh, k, &cfg.settings)?;
        for grid in &cfg.grids {
            let row = run_row(&mesh, &sys, grid, &cfg.variants, &cfg.settings)?;
            row.check_identities(mesh.dim())?;
            rows.push(row);
        }
    }
    Ok(ScalingReport {
        title: format!("Strong scaling, {}", cfg.mesh.describe()),
        dim: mesh.dim(),
        metadata: metadata(&cfg.settings, cfg.mesh.describe()),
        variants: cfg.variants.list(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub mesh: MeshSpec,
    pub k: usize,
    pub grid: Vec<usize>,
    /// `None` runs the one-level method.
    pub coarse: Option<CoarseKind>,
    pub settings: SolverSettings,
}

#[derive(Debug, Clone)]
pub struct SolveSummary {
    pub mesh: PolyMesh,
    pub dofs: usize,
    pub free_dofs: usize,
    pub subdomains: usize,
    pub coarse_dim: usize,
    pub outcome: Outcome,
    pub history: Vec<f64>,
    /// Full DOF vector; empty when the solve did not converge.
    pub solution: Vec<f64>,
    pub errors: Option<ErrorNorms>,
}

pub fn solve(cfg: &SolveConfig) -> Result<SolveSummary, StudyError> {
    let mesh = cfg.mesh.build()?;
    let (p, sys) = discretize(&mesh, cfg.k, &cfg.settings)?;
    let variants = VariantSet { one_level: cfg.coarse.is_none(), kinds: cfg.coarse.into_iter().collect() };
    if cfg.grid.len() != mesh.dim() {
        return Err(StudyError::GridDimension { grid: cfg.grid.clone(), dim: mesh.dim() });
    }
    let dm = &sys.dof_map;
    let part = partition_geometric(&mesh, dm, &cfg.grid)?;
    let overlapping = part.grow_overlap(&mesh, dm, cfg.settings.overlap);
    let mut m = build_preconditioner(&sys.stiffness, &overlapping, None, cfg.settings.mode)?;
    let mut coarse_dim = 0;
    if let Some(kind) = variants.kinds.first() {
        let cls = classify_interface(&mesh, dm, &part)?;
        let basis = build_coarse_basis(*kind, &sys.stiffness, &mesh, dm, &part, &cls, cfg.settings.orphans)?;
        coarse_dim = basis.dim();
        m = m.with_coarse(&sys.stiffness, Some(&basis.phi))?;
    }
    let (outcome, history, x) = run_variant(&sys.stiffness, &sys.rhs, &m, &cfg.settings.krylov)?;
    let (solution, errors) = if outcome.converged() {
        let full = sys.expand(&x);
        let errors = compute_errors(&mesh, dm, &full, &p.u, &p.grad)?;
        (full, Some(errors))
    } else {
        (Vec::new(), None)
    };
    Ok(SolveSummary {
        dofs: dm.n_dofs(),
        free_dofs: dm.n_free(),
        subdomains: part.n_subdomains(),
        coarse_dim,
        outcome,
        history,
        solution,
        errors,
        mesh,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshFamily {
    /// Size = cells per axis.
    Structured,
    /// Size = number of cells.
    Voronoi { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    pub dim: usize,
    pub family: MeshFamily,
    pub sizes: Vec<usize>,
    pub k: usize,
    pub problem: String,
    pub stabilization: Stabilization,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub size: usize,
    pub cells: usize,
    pub h: f64,
    pub dofs: usize,
    pub errors: ErrorNorms,
    pub rate_l2: Option<f64>,
    pub rate_h1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub title: String,
    pub rows: Vec<ConvergenceRow>,
}

fn rate(e0: f64, e1: f64, h0: f64, h1: f64) -> Option<f64> {
    (e0 > 0.0 && e1 > 0.0).then(|| (e0 / e1).ln() / (h0 / h1).ln())
}

/// Direct solves on a refinement sequence; rates are `log(e₀/e₁)/log(h₀/h₁)`
/// between consecutive meshes.
pub fn convergence(cfg: &ConvergenceConfig) -> Result<ConvergenceTable, StudyError> {
    let settings = SolverSettings { problem: cfg.problem.clone(), stabilization: cfg.stabilization, ..Default::default() };
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &size in &cfg.sizes {
        let mesh = match cfg.family {
            MeshFamily::Structured => generate_structured_box(cfg.dim, size)?,
            MeshFamily::Voronoi { seed } => {
                if cfg.dim != 2 {
                    return Err(MeshError::BadDimension(cfg.dim).into());
                }
                generate_voronoi_2d(size, seed)?
            }
        };
        let (p, sys) = discretize(&mesh, cfg.k, &settings)?;
        let x = if sys.n_free() == 0 { Vec::new() } else { Factorization::new(&sys.stiffness)?.solve(&sys.rhs) };
        let full = sys.expand(&x);
        let errors = compute_errors(&mesh, &sys.dof_map, &full, &p.u, &p.grad)?;
        let h = mesh.mesh_size();
        let (rate_l2, rate_h1) = match rows.last() {
            Some(prev) => (rate(prev.errors.l2, errors.l2, prev.h, h), rate(prev.errors.h1, errors.h1, prev.h, h)),
            None => (None, None),
        };
        rows.push(ConvergenceRow { size, cells: mesh.n_cells(), h, dofs: sys.dof_map.n_dofs(), errors, rate_l2, rate_h1 });
    }
    let family = match cfg.family {
        MeshFamily::Structured => "structured".to_string(),
        MeshFamily::Voronoi { seed } => format!("voronoi seed {seed}"),
    };
    Ok(ConvergenceTable { title: format!("Convergence, {}D {family}, k={}, problem {}", cfg.dim, cfg.k, cfg.problem), rows })
}

impl ConvergenceTable {
    pub fn last_rates(&self) -> (Option<f64>, Option<f64>) {
        self.rows.last().map_or((None, None), |r| (r.rate_l2, r.rate_h1))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["size", "cells", "h", "dofs", "l2_error", "h1_error", "l2_rate", "h1_rate"]).expect("in-memory write");
        let opt = |r: Option<f64>| r.map_or(String::new(), |v| format!("{v:.4}"));
        for r in &self.rows {
            w.write_record([
                r.size.to_string(),
                r.cells.to_string(),
                format!("{:e}", r.h),
                r.dofs.to_string(),
                format!("{:e}", r.errors.l2),
                format!("{:e}", r.errors.h1),
                opt(r.rate_l2),
                opt(r.rate_h1),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("### {}\n\n| cells | h | Dofs | L2 error | rate | H1 error | rate |\n|---:|---:|---:|---:|---:|---:|---:|\n", self.title);
        let opt = |r: Option<f64>| r.map_or("-".to_string(), |v| format!("{v:.2}"));
        for r in &self.rows {
            let _ = writeln!(
                out,
                "| {} | {:.4} | {} | {:.3e} | {} | {:.3e} | {} |",
                r.cells,
                r.h,
                r.dofs,
                r.errors.l2,
                opt(r.rate_l2),
                r.errors.h1,
                opt(r.rate_h1)
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast_settings() -> SolverSettings {
        SolverSettings { krylov: KrylovConfig { tol: 1e-8, ..Default::default() }, ..Default::default() }
    }

    #[test]
    fn weak_scaling_rows_satisfy_identities() {
        let cfg = WeakScalingConfig {
            cells_per_side: 3,
            subdomains_per_axis: vec![2],
            variants: VariantSet { one_level: true, kinds: CoarseKind::ALL.to_vec() },
            settings: fast_settings(),
            ..Default::default()
        };
        let report = weak_scaling(&cfg).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.components, (1, 6, 12));
        assert_eq!(CoarseKind::ALL.map(|k| row.coarse_dim(k).unwrap()), [19, 13, 1]);
        assert!(report.all_converged());
        let csv = report.to_csv();
        assert!(csv.starts_with("k,grid,subdomains,dofs,vertices,edges,faces,one_level_it,gdsw_coarse,gdsw_it,gdsw_star_coarse,gdsw_star_it,rgdsw_coarse,rgdsw_it\n"));
        assert!(csv.contains("1,2x2x2,8,343,1,6,12,"));
        assert!(report.to_markdown().contains("| GDSW* Coarse | GDSW* it |"));
    }

    #[test]
    fn broken_identity_is_reported() {
        let cfg = WeakScalingConfig { cells_per_side: 2, subdomains_per_axis: vec![2], settings: fast_settings(), ..Default::default() };
        let mut report = weak_scaling(&cfg).unwrap();
        report.rows[0].results[1].coarse_dim += 1;
        assert!(matches!(report.check_identities(), Err(StudyError::DimensionIdentity { .. })));
    }

    #[test]
    fn single_subdomain_rows_take_one_iteration() {
        let cfg = StrongScalingConfig {
            mesh: MeshSpec::Voronoi { cells: 200, seed: 4 },
            grids: vec![vec![1, 1], vec![2, 2]],
            orders: vec![1],
            variants: VariantSet::default(),
            settings: fast_settings(),
        };
        let report = strong_scaling(&cfg).unwrap();
        let single = &report.rows[0];
        assert!(single.results.iter().all(|r| r.outcome == Outcome::Converged(1) && r.coarse_dim == 0));
        let four = &report.rows[1];
        assert!(four.coarse_dim(CoarseKind::Rgdsw).unwrap() < four.coarse_dim(CoarseKind::Gdsw).unwrap());
        assert_eq!(four.coarse_dim(CoarseKind::Rgdsw), four.coarse_dim(CoarseKind::GdswStar));
    }

    #[test]
    fn solve_reports_errors_and_rejects_bad_grid() {
        let cfg = SolveConfig { mesh: MeshSpec::Structured { dim: 2, n: 8 }, k: 2, grid: vec![2, 2], coarse: Some(CoarseKind::Gdsw), settings: fast_settings() };
        let out = solve(&cfg).unwrap();
        assert!(out.outcome.converged());
        assert_eq!(out.coarse_dim, 5);
        assert!(out.errors.unwrap().h1 < 1e-2);
        let bad = SolveConfig { grid: vec![2, 2, 2], ..cfg };
        assert!(matches!(solve(&bad), Err(StudyError::GridDimension { .. })));
    }

    #[test]
    fn convergence_rates_are_logs_of_ratios() {
        assert_eq!(rate(4.0, 1.0, 0.5, 0.25), Some(2.0));
        assert_eq!(rate(0.0, 1.0, 0.5, 0.25), None);
        let cfg = ConvergenceConfig { dim: 2, family: MeshFamily::Structured, sizes: vec![4, 8], k: 1, problem: "cubic".into(), stabilization: Stabilization::DRecipe };
        let t = convergence(&cfg).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert!(t.rows[0].rate_h1.is_none() && t.rows[1].rate_h1.is_some());
        assert_eq!(t.to_csv().lines().count(), 3);
    }
}
