//! TOML experiment files. Every key is optional; command-line flags take
//! precedence over file values, which take precedence over built-in defaults.
//!
//! ```toml
//! [mesh]
//! kind = "structured"   # structured | voronoi | file
//! dim = 3
//! n = 20                # cells per axis (structured)
//! cells = 10000         # voronoi
//! seed = 1
//! path = "mesh.vtk"     # file
//!
//! [problem]
//! name = "cubic"
//! k = [1, 2]
//! stabilization = "d-recipe"
//!
//! [partition]
//! grid = [4, 4, 4]
//! grids = [[4, 4], [8, 8]]
//! overlap = 1
//!
//! [solver]
//! method = "gmres"
//! tol = 1e-8
//! max_iters = 1000
//! restart = 200
//! reorthogonalize = false
//! mode = "ras"
//! coarse = ["gdsw", "gdsw*", "rgdsw"]
//! one_level = false
//! orphans = "promote"
//!
//! [weak]
//! ns = [2, 3, 4]
//! cells_per_side = 5
//!
//! [convergence]
//! family = "structured" # structured | voronoi
//! sizes = [8, 16, 32]
//!
//! [output]
//! dir = "results"
//! name = "weak_k1"
//! svg = false
//! vtk = "solution.vtk"
//! history = "history.csv"
//!
//! [run]
//! deterministic = true
//! workers = 1
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub partition: PartitionSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub weak: WeakSection,
    #[serde(default)]
    pub convergence: ConvergenceSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    pub kind: Option<String>,
    pub dim: Option<usize>,
    pub n: Option<usize>,
    pub cells: Option<usize>,
    pub seed: Option<u64>,
    pub path: Option<PathBuf>,
}

/// `k = 1` and `k = [1, 2]` are both accepted.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

impl OneOrMany {
    pub fn to_vec(&self) -> Vec<usize> {
        match self {
            OneOrMany::One(k) => vec![*k],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub name: Option<String>,
    pub k: Option<OneOrMany>,
    pub stabilization: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSection {
    pub grid: Option<Vec<usize>>,
    pub grids: Option<Vec<Vec<usize>>>,
    pub overlap: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub method: Option<String>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub restart: Option<usize>,
    pub reorthogonalize: Option<bool>,
    pub mode: Option<String>,
    pub coarse: Option<Vec<String>>,
    pub one_level: Option<bool>,
    pub orphans: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakSection {
    pub ns: Option<Vec<usize>>,
    pub cells_per_side: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    pub family: Option<String>,
    pub sizes: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub name: Option<String>,
    pub svg: Option<bool>,
    pub vtk: Option<PathBuf>,
    pub history: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub deterministic: Option<bool>,
    pub workers: Option<usize>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Relative paths inside the file resolve against the file's directory.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let mut cfg = Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if let Some(mesh_path) = cfg.mesh.path.as_mut() {
            if mesh_path.is_relative() {
                *mesh_path = path.parent().unwrap_or(Path::new(".")).join(&*mesh_path);
            }
        }
        if let Some(p) = cfg.mesh.path.as_ref() {
            if !p.exists() {
                return Err(format!("mesh file {} does not exist", p.display()));
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_example_parses() {
        let doc: String = include_str!("config.rs")
            .lines()
            .skip_while(|l| !l.starts_with("//! ```toml"))
            .skip(1)
            .take_while(|l| !l.starts_with("//! ```"))
            .map(|l| l.trim_start_matches("//!").trim_start().to_string() + "\n")
            .collect();
        let cfg = Config::parse(&doc).unwrap();
        assert_eq!(cfg.problem.k, Some(OneOrMany::Many(vec![1, 2])));
        assert_eq!(cfg.partition.grids.as_ref().unwrap().len(), 2);
        assert_eq!(cfg.solver.coarse.as_ref().unwrap()[1], "gdsw*");
    }

    #[test]
    fn scalar_order_and_unknown_keys() {
        let cfg = Config::parse("[problem]\nk = 2\n").unwrap();
        assert_eq!(cfg.problem.k.unwrap().to_vec(), vec![2]);
        assert!(Config::parse("[solver]\ntolerance = 1e-8\n").is_err());
    }

    #[test]
    fn committed_configs_use_known_keys() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            Config::load(&path).unwrap_or_else(|e| panic!("{e}"));
        }
    }

    #[test]
    fn missing_mesh_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "[mesh]\nkind = \"file\"\npath = \"nope.vtk\"\n").unwrap();
        assert!(Config::load(&path).unwrap_err().contains("does not exist"));
    }
}
