use polyschwarz::coarse::CoarseKind;
use polyschwarz::linalg::{norm2, Factorization, read_matrix_market, write_matrix_market};
use polyschwarz::mesh::{export_mesh, generate_voronoi_2d, import_mesh, MeshFormat};
use polyschwarz::schwarz::{KrylovConfig, KrylovMethod, SchwarzMode};
use polyschwarz::study::{discretize, solve, MeshSpec, SolveConfig, SolverSettings};

fn relative_gap(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm2(&d) / norm2(b)
}

#[test]
fn every_solver_configuration_matches_the_direct_solve() {
    for (mesh, k, grid) in [(MeshSpec::Voronoi { cells: 300, seed: 4 }, 2, vec![3, 2]), (MeshSpec::Structured { dim: 3, n: 6 }, 1, vec![2, 2, 2])] {
        let built = mesh.build().unwrap();
        let (_, sys) = discretize(&built, k, &SolverSettings::default()).unwrap();
        let direct = sys.expand(&Factorization::new(&sys.stiffness).unwrap().solve(&sys.rhs));
        let mut coarse: Vec<Option<CoarseKind>> = vec![None];
        coarse.extend(CoarseKind::ALL.map(Some));
        for kind in coarse {
            for (mode, method) in [(SchwarzMode::Additive, KrylovMethod::Cg), (SchwarzMode::Additive, KrylovMethod::Gmres), (SchwarzMode::Restricted, KrylovMethod::Gmres)] {
                let settings = SolverSettings { mode, krylov: KrylovConfig { method, ..Default::default() }, ..Default::default() };
                let out = solve(&SolveConfig { mesh: mesh.clone(), k, grid: grid.clone(), coarse: kind, settings }).unwrap();
                assert!(out.outcome.converged(), "{kind:?} {mode} {method:?}");
                let gap = relative_gap(&out.solution, &direct);
                assert!(gap < 1e-6, "{kind:?} {mode} {method:?}: {gap:e}");
            }
        }
    }
}

#[test]
fn exported_mesh_reproduces_the_same_system() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = generate_voronoi_2d(200, 8).unwrap();
    let settings = SolverSettings::default();
    let (_, reference) = discretize(&mesh, 2, &settings).unwrap();
    for (file, format) in [("m.pmesh", MeshFormat::Native), ("m.vtk", MeshFormat::Vtk)] {
        let path = dir.path().join(file);
        export_mesh(&mesh, &path, format).unwrap();
        let back = import_mesh(&path, format).unwrap();
        let (_, sys) = discretize(&back, 2, &settings).unwrap();
        assert_eq!(sys.stiffness.nrows(), reference.stiffness.nrows());
        let diff = sys.stiffness.add(&reference.stiffness, 1.0, -1.0).unwrap();
        let scale = reference.stiffness.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(diff.values().iter().all(|v| v.abs() <= 1e-10 * scale), "{file}");
    }
    let text = write_matrix_market(&reference.stiffness);
    let k = read_matrix_market(&text).unwrap();
    assert_eq!(k.spmv(&reference.rhs), reference.stiffness.spmv(&reference.rhs));
}
