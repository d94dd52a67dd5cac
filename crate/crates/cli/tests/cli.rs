use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyschwarz")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn configs() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn solve_2d_converges_with_expected_coarse_dim() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--n", "32", "--grid", "2x2", "--coarse", "gdsw", "--vtk", "u.vtk"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("coarse      GDSW dim 5"), "{out}");
    let vtk = std::fs::read_to_string(dir.path().join("u.vtk")).unwrap();
    assert!(vtk.contains("SCALARS u_h") && vtk.contains("SCALARS subdomain"));
}

#[test]
fn solve_3d_rgdsw_has_single_vertex_function() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--dim", "3", "--n", "10", "--grid", "2x2x2", "--coarse", "rgdsw"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("coarse      RGDSW dim 1"));
}

#[test]
fn third_order_is_rejected_with_explanation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--k", "3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("k=3 is not supported") && err.contains("adjusted coarse-space construction"), "{err}");
}

#[test]
fn non_convergence_exits_nonzero_and_dumps_history() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--n", "16", "--max-iters", "2", "--out-dir", "out"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let hist = std::fs::read_to_string(dir.path().join("out/solve_history.csv")).unwrap();
    assert_eq!(hist.lines().count(), 4);
    assert!(hist.starts_with("iteration,residual\n0,1e0\n"));
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[mesh]\nn = 8\n[partition]\ngrid = [2, 2]\n[solver]\ncoarse = [\"rgdsw\"]\n").unwrap();
    let o = run(&["solve", "--config", "c.toml", "--n", "12"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("quad 12x12") && out.contains("RGDSW dim 1"), "{out}");
    let bad = run(&["solve", "--config", "c.toml", "--method", "cg"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn weak_scaling_writes_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["weak-scaling", "--ns", "2", "--cells-per-side", "3", "--one-level", "--deterministic", "--svg", "--out-dir", "r"];
    let first = run(&args, dir.path());
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let a = std::fs::read(dir.path().join("r/weak_scaling.csv")).unwrap();
    run(&args, dir.path());
    let b = std::fs::read(dir.path().join("r/weak_scaling.csv")).unwrap();
    assert_eq!(a, b);
    let csv = String::from_utf8(a).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("1,2x2x2,8,343,1,6,12,"));
    assert!(dir.path().join("r/weak_scaling.md").exists());
    assert!(dir.path().join("r/weak_scaling_iterations.svg").exists());
}

#[test]
fn strong_scaling_single_subdomain_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["strong-scaling", "--mesh", "voronoi", "--cells", "300", "--grids", "1x1,2x2", "--out-dir", "."], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("strong_scaling.csv")).unwrap();
    let single = csv.lines().nth(1).unwrap();
    assert!(single.starts_with("1,1x1,1,"), "{single}");
    assert!(single.ends_with(",0,1,0,1,0,1"), "{single}");
}

#[test]
fn convergence_table_has_rates() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["convergence", "--sizes", "4,8,16", "--k", "1,2", "--svg", "--out-dir", "."], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.starts_with("k,size,cells,h,dofs,l2_error,h1_error,l2_rate,h1_rate\n"));
    assert!(dir.path().join("convergence.svg").exists());
}

#[test]
fn mesh_command_writes_partitioned_vtk() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["mesh", "--mesh", "voronoi", "--cells", "100", "--grid", "2x2", "-o", "m.vtk"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let vtk = std::fs::read_to_string(dir.path().join("m.vtk")).unwrap();
    assert!(vtk.contains("CELL_DATA 100"));
    let native = run(&["mesh", "--dim", "3", "--n", "2", "-o", "m.mesh"], dir.path());
    assert_eq!(native.status.code(), Some(0));
    assert!(std::fs::read_to_string(dir.path().join("m.mesh")).unwrap().starts_with("POLYMESH 1"));
}

#[test]
fn committed_configs_parse() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.parse::<toml::Table>().is_ok(), "{}", path.display());
    }
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--config", configs().join("solve_2d.toml").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("solution.vtk").exists());
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let o = run(&["frobnicate"], Path::new("."));
    assert_eq!(o.status.code(), Some(2));
}
