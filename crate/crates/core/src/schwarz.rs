//! One- and two-level (restricted) additive Schwarz preconditioners and the
//! Krylov drivers that use them.
//!
//! Level coupling is always additive:
//! `M⁻¹ r = Φ K₀⁻¹ Φᵀ r + Σᵢ Pᵢ Kᵢ⁻¹ Rᵢ r`, with `Pᵢ = Rᵢᵀ` for AS and the
//! owner-restricted prolongation for RAS.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::coarse::{build_coarse_operator, CoarseError, CoarseOperator};
use crate::decomposition::Partition;
use crate::linalg::{axpy, dot, norm2, CsrMatrix, Factorization, LinalgError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchwarzMode {
    Additive,
    #[default]
    Restricted,
}

impl FromStr for SchwarzMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "as" | "additive" => Ok(SchwarzMode::Additive),
            "ras" | "restricted" => Ok(SchwarzMode::Restricted),
            other => Err(format!("unknown Schwarz mode '{other}' (expected as or ras)")),
        }
    }
}

impl fmt::Display for SchwarzMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchwarzMode::Additive => "AS",
            SchwarzMode::Restricted => "RAS",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchwarzError {
    #[error("local matrix of subdomain {subdomain} could not be factorized: {source}")]
    LocalFactorization { subdomain: usize, source: LinalgError },
    #[error(transparent)]
    Coarse(#[from] CoarseError),
    #[error("vector length {got} does not match operator size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("CG needs a symmetric preconditioner; RAS is nonsymmetric")]
    NonSymmetricPreconditioner,
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("no convergence after {iterations} iterations (relative residual {:e})", history.last().copied().unwrap_or(f64::NAN))]
    NotConverged { iterations: usize, history: Vec<f64> },
}

pub trait Preconditioner: Sync {
    fn apply(&self, r: &[f64]) -> Vec<f64>;
    fn is_symmetric(&self) -> bool;
}

/// `M = I`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64]) -> Vec<f64> {
        r.to_vec()
    }

    fn is_symmetric(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone)]
struct LocalSolver {
    dofs: Vec<usize>,
    /// RAS prolongation mask; all true in AS mode.
    owned: Vec<bool>,
    factor: Factorization,
}

#[derive(Debug, Clone)]
pub struct CoarseLevel {
    pub phi: CsrMatrix,
    pub operator: CoarseOperator,
}

#[derive(Debug, Clone)]
pub struct SchwarzPreconditioner {
    mode: SchwarzMode,
    n: usize,
    locals: Arc<Vec<LocalSolver>>,
    coarse: Option<CoarseLevel>,
}

impl SchwarzPreconditioner {
    pub fn mode(&self) -> SchwarzMode {
        self.mode
    }

    pub fn levels(&self) -> usize {
        if self.coarse.is_some() {
            2
        } else {
            1
        }
    }

    pub fn n_subdomains(&self) -> usize {
        self.locals.len()
    }

    pub fn coarse(&self) -> Option<&CoarseLevel> {
        self.coarse.as_ref()
    }

    pub fn coarse_dim(&self) -> usize {
        self.coarse.as_ref().map_or(0, |c| c.phi.ncols())
    }

    pub fn local_dofs(&self, s: usize) -> &[usize] {
        &self.locals[s].dofs
    }

    /// Same local solvers with a different (or no) coarse level; the local
    /// factorizations are shared, not recomputed. An empty `Φ` means no coarse
    /// level.
    pub fn with_coarse(&self, k: &CsrMatrix, phi: Option<&CsrMatrix>) -> Result<Self, SchwarzError> {
        let coarse = match phi {
            Some(phi) if phi.ncols() > 0 => Some(CoarseLevel { phi: phi.clone(), operator: build_coarse_operator(k, phi)? }),
            _ => None,
        };
        Ok(SchwarzPreconditioner { coarse, ..self.clone() })
    }

    pub fn checked_apply(&self, r: &[f64]) -> Result<Vec<f64>, SchwarzError> {
        if r.len() != self.n {
            return Err(SchwarzError::LengthMismatch { expected: self.n, got: r.len() });
        }
        Ok(self.apply(r))
    }
}

/// Factorizes `Kᵢ = Rᵢ K Rᵢᵀ` on the overlapping sets of `partition` and, when
/// `phi` is given, the Galerkin coarse operator. RAS ownership follows
/// [`Partition::owner`].
pub fn build_preconditioner(
    k: &CsrMatrix,
    partition: &Partition,
    phi: Option<&CsrMatrix>,
    mode: SchwarzMode,
) -> Result<SchwarzPreconditioner, SchwarzError> {
    let locals = (0..partition.n_subdomains())
        .into_par_iter()
        .map(|s| {
            let dofs = partition.overlapping_dofs(s).to_vec();
            let owned = dofs.iter().map(|&d| mode == SchwarzMode::Additive || partition.owner(d) == s).collect();
            let factor = Factorization::new(&k.submatrix(&dofs, &dofs))
                .map_err(|source| SchwarzError::LocalFactorization { subdomain: s, source })?;
            Ok(LocalSolver { dofs, owned, factor })
        })
        .collect::<Result<Vec<_>, SchwarzError>>()?;
    SchwarzPreconditioner { mode, n: k.nrows(), locals: Arc::new(locals), coarse: None }.with_coarse(k, phi)
}

impl Preconditioner for SchwarzPreconditioner {
    fn apply(&self, r: &[f64]) -> Vec<f64> {
        assert_eq!(r.len(), self.n, "residual length");
        let coarse = self.coarse.as_ref().map(|c| {
            let y = c.operator.factor.solve(&c.phi.spmv_transpose(r));
            c.phi.spmv(&y)
        });
        let local: Vec<Vec<f64>> = self
            .locals
            .par_iter()
            .map(|l| l.factor.solve(&l.dofs.iter().map(|&d| r[d]).collect::<Vec<_>>()))
            .collect();
        // fixed summation order keeps the result independent of scheduling
        let mut z = coarse.unwrap_or_else(|| vec![0.0; self.n]);
        for (l, x) in self.locals.iter().zip(&local) {
            for ((&d, &own), &v) in l.dofs.iter().zip(&l.owned).zip(x) {
                if own {
                    z[d] += v;
                }
            }
        }
        z
    }

    fn is_symmetric(&self) -> bool {
        self.mode == SchwarzMode::Additive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KrylovMethod {
    #[default]
    Gmres,
    Cg,
}

impl FromStr for KrylovMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gmres" => Ok(KrylovMethod::Gmres),
            "cg" | "pcg" => Ok(KrylovMethod::Cg),
            other => Err(format!("unknown Krylov method '{other}' (expected gmres or cg)")),
        }
    }
}

impl fmt::Display for KrylovMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KrylovMethod::Gmres => "gmres",
            KrylovMethod::Cg => "cg",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovConfig {
    pub method: KrylovMethod,
    /// Target for `‖b − Kx‖₂ / ‖b‖₂`.
    pub tol: f64,
    pub max_iters: usize,
    pub restart: usize,
    /// Second modified Gram-Schmidt pass in GMRES.
    pub reorthogonalize: bool,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        KrylovConfig { method: KrylovMethod::Gmres, tol: 1e-8, max_iters: 1000, restart: 200, reorthogonalize: false }
    }
}

impl KrylovConfig {
    pub fn validate(&self) -> Result<(), SchwarzError> {
        if !(self.tol > 0.0) {
            return Err(SchwarzError::InvalidConfig(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.restart == 0 || self.max_iters == 0 {
            return Err(SchwarzError::InvalidConfig("restart and max_iters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Relative unpreconditioned residuals; entry 0 is the initial guess.
    pub history: Vec<f64>,
}

/// Dispatches on `config.method`.
pub fn krylov_solve(k: &CsrMatrix, b: &[f64], m: &dyn Preconditioner, config: &KrylovConfig) -> Result<SolveResult, SchwarzError> {
    match config.method {
        KrylovMethod::Gmres => gmres_solve(k, b, m, config),
        KrylovMethod::Cg => cg_solve(k, b, m, config),
    }
}

fn check_lengths(k: &CsrMatrix, b: &[f64]) -> Result<(), SchwarzError> {
    if k.nrows() != b.len() || k.ncols() != b.len() {
        return Err(SchwarzError::LengthMismatch { expected: k.nrows(), got: b.len() });
    }
    Ok(())
}

fn relative_residual(k: &CsrMatrix, b: &[f64], x: &[f64], bnorm: f64) -> f64 {
    let kx = k.spmv(x);
    let r: Vec<f64> = b.iter().zip(&kx).map(|(bi, ki)| bi - ki).collect();
    norm2(&r) / bnorm
}

/// Left-preconditioned restarted GMRES from `x = 0`. The iterate is formed
/// after every Arnoldi step so that the stopping test uses the true residual.
pub fn gmres_solve(k: &CsrMatrix, b: &[f64], m: &dyn Preconditioner, config: &KrylovConfig) -> Result<SolveResult, SchwarzError> {
    config.validate()?;
    check_lengths(k, b)?;
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(SolveResult { x, iterations: 0, history: vec![0.0] });
    }
    let mut history = vec![1.0];
    let mut iterations = 0;
    let restart = config.restart.min(n.max(1));
    while iterations < config.max_iters {
        let kx = k.spmv(&x);
        let r0: Vec<f64> = b.iter().zip(&kx).map(|(bi, ki)| bi - ki).collect();
        let z0 = m.apply(&r0);
        let beta = norm2(&z0);
        if beta == 0.0 {
            break;
        }
        let mut v: Vec<Vec<f64>> = vec![z0.iter().map(|zi| zi / beta).collect()];
        // column j of the Hessenberg matrix, rotated in place
        let mut h: Vec<Vec<f64>> = Vec::new();
        let (mut cs, mut sn): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
        let mut g = vec![beta];
        let mut x_cycle = x.clone();
        for j in 0..restart {
            let mut w = m.apply(&k.spmv(&v[j]));
            let mut col = vec![0.0; j + 2];
            let passes = if config.reorthogonalize { 2 } else { 1 };
            for _ in 0..passes {
                for (i, vi) in v.iter().enumerate() {
                    let hij = dot(&w, vi);
                    col[i] += hij;
                    axpy(-hij, vi, &mut w);
                }
            }
            let wnorm = norm2(&w);
            col[j + 1] = wnorm;
            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let rho = col[j].hypot(col[j + 1]);
            let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (col[j] / rho, col[j + 1] / rho) };
            col[j] = rho;
            col[j + 1] = 0.0;
            cs.push(c);
            sn.push(s);
            g.push(-s * g[j]);
            g[j] *= c;
            h.push(col);
            iterations += 1;

            let mut y = vec![0.0; j + 1];
            for i in (0..=j).rev() {
                let mut acc = g[i];
                for (l, yl) in y.iter().enumerate().skip(i + 1) {
                    acc -= h[l][i] * yl;
                }
                y[i] = if h[i][i] == 0.0 { 0.0 } else { acc / h[i][i] };
            }
            x_cycle.clone_from(&x);
            for (vi, yi) in v.iter().zip(&y) {
                axpy(*yi, vi, &mut x_cycle);
            }
            let res = relative_residual(k, b, &x_cycle, bnorm);
            history.push(res);
            if res <= config.tol {
                return Ok(SolveResult { x: x_cycle, iterations, history });
            }
            if wnorm == 0.0 || iterations >= config.max_iters {
                break;
            }
            v.push(w.iter().map(|wi| wi / wnorm).collect());
        }
        x = x_cycle;
    }
    Err(SchwarzError::NotConverged { iterations, history })
}

/// Preconditioned CG from `x = 0`. Convergence of the recursive residual is
/// confirmed against the true residual before returning.
pub fn cg_solve(k: &CsrMatrix, b: &[f64], m: &dyn Preconditioner, config: &KrylovConfig) -> Result<SolveResult, SchwarzError> {
    config.validate()?;
    check_lengths(k, b)?;
    if !m.is_symmetric() {
        return Err(SchwarzError::NonSymmetricPreconditioner);
    }
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(SolveResult { x, iterations: 0, history: vec![0.0] });
    }
    let mut history = vec![1.0];
    let mut r = b.to_vec();
    let mut z = m.apply(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    while iterations < config.max_iters {
        let kp = k.spmv(&p);
        let pkp = dot(&p, &kp);
        if pkp <= 0.0 {
            break;
        }
        let alpha = rz / pkp;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &kp, &mut r);
        iterations += 1;
        let mut res = norm2(&r) / bnorm;
        if res <= config.tol {
            res = relative_residual(k, b, &x, bnorm);
            if res <= config.tol {
                history.push(res);
                return Ok(SolveResult { x, iterations, history });
            }
            let kx = k.spmv(&x);
            r = b.iter().zip(&kx).map(|(bi, ki)| bi - ki).collect();
        }
        history.push(res);
        z = m.apply(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    Err(SchwarzError::NotConverged { iterations, history })
}

/// `iteration,residual` rows, one per history entry.
pub fn write_history_csv<W: Write>(out: W, history: &[f64]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "residual"])?;
    for (i, r) in history.iter().enumerate() {
        w.write_record([i.to_string(), format!("{r:e}")])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::{build_coarse_basis, CoarseKind, OrphanPolicy};
    use crate::decomposition::{classify_interface, partition_geometric};
    use crate::linalg::SparseCholesky;
    use crate::mesh::generate_structured_box;
    use crate::vem::{assemble, Stabilization};
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn system(n: usize, grid: &[usize], overlap: usize) -> (CsrMatrix, Vec<f64>, Partition, crate::vem::DofMap, crate::mesh::PolyMesh) {
        let mesh = generate_structured_box(grid.len(), n).unwrap();
        let sys = assemble(&mesh, 1, &|x| -6.0 * x[0] - 2.0, &|x| x[0].powi(3) + x[1] * x[1], Stabilization::DRecipe).unwrap();
        let part = partition_geometric(&mesh, &sys.dof_map, grid).unwrap().grow_overlap(&mesh, &sys.dof_map, overlap);
        (sys.stiffness, sys.rhs, part, sys.dof_map, mesh)
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn single_subdomain_is_exact() {
        let (k, b, part, _, _) = system(8, &[1, 1], 0);
        let m = build_preconditioner(&k, &part, None, SchwarzMode::Restricted).unwrap();
        let z = m.apply(&b);
        let kz = k.spmv(&z);
        assert!(kz.iter().zip(&b).all(|(a, c)| (a - c).abs() < 1e-10));
        for method in [KrylovMethod::Gmres, KrylovMethod::Cg] {
            let m = build_preconditioner(&k, &part, None, SchwarzMode::Additive).unwrap();
            let cfg = KrylovConfig { method, ..Default::default() };
            assert_eq!(krylov_solve(&k, &b, &m, &cfg).unwrap().iterations, 1, "{method}");
        }
    }

    #[test]
    fn zero_residual_maps_to_zero() {
        let (k, _, part, _, _) = system(6, &[2, 2], 1);
        let m = build_preconditioner(&k, &part, None, SchwarzMode::Restricted).unwrap();
        assert!(m.apply(&vec![0.0; k.nrows()]).iter().all(|&v| v == 0.0));
        assert!(matches!(m.checked_apply(&[1.0]), Err(SchwarzError::LengthMismatch { .. })));
    }

    #[test]
    fn identity_needs_one_iteration() {
        let k = CsrMatrix::identity(7);
        let b: Vec<f64> = (0..7).map(|i| i as f64 - 2.5).collect();
        for method in [KrylovMethod::Gmres, KrylovMethod::Cg] {
            let cfg = KrylovConfig { method, ..Default::default() };
            let out = krylov_solve(&k, &b, &IdentityPreconditioner, &cfg).unwrap();
            assert_eq!(out.iterations, 1);
            assert!(out.x.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-14));
        }
    }

    #[test]
    fn diagonal_with_exact_local_solve() {
        let k = CsrMatrix::from_triplets(10, 10, &(0..10).map(|i| (i, i, (i + 1) as f64)).collect::<Vec<_>>());
        let b = vec![1.0; 10];
        let exact = Factorization::new(&k).unwrap();
        struct Exact(Factorization);
        impl Preconditioner for Exact {
            fn apply(&self, r: &[f64]) -> Vec<f64> {
                self.0.solve(r)
            }
            fn is_symmetric(&self) -> bool {
                true
            }
        }
        let cfg = KrylovConfig { method: KrylovMethod::Cg, ..Default::default() };
        assert!(cg_solve(&k, &b, &Exact(exact), &cfg).unwrap().iterations <= 2);
    }

    #[test]
    fn additive_two_subdomains_match_dense_oracle() {
        let (k, _, part, _, _) = system(6, &[2, 1], 1);
        let m = build_preconditioner(&k, &part, None, SchwarzMode::Additive).unwrap();
        let kd = k.to_dense();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = random_vec(&mut rng, k.nrows());
        let mut expected = DVector::zeros(k.nrows());
        for s in 0..2 {
            let dofs = part.overlapping_dofs(s);
            let ki = DMatrix::from_fn(dofs.len(), dofs.len(), |i, j| kd[(dofs[i], dofs[j])]);
            let ri = DVector::from_iterator(dofs.len(), dofs.iter().map(|&d| r[d]));
            let xi = ki.lu().solve(&ri).unwrap();
            for (i, &d) in dofs.iter().enumerate() {
                expected[d] += xi[i];
            }
        }
        let z = m.apply(&r);
        assert!(z.iter().zip(expected.iter()).all(|(a, b): (&f64, &f64)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn additive_mode_is_symmetric() {
        let (k, _, part, dm, mesh) = system(8, &[2, 2], 1);
        let cls = classify_interface(&mesh, &dm, &part).unwrap();
        let basis = build_coarse_basis(CoarseKind::Gdsw, &k, &mesh, &dm, &part, &cls, OrphanPolicy::Promote).unwrap();
        let m = build_preconditioner(&k, &part, Some(&basis.phi), SchwarzMode::Additive).unwrap();
        assert!(m.is_symmetric());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let (y, z) = (random_vec(&mut rng, k.nrows()), random_vec(&mut rng, k.nrows()));
            let (a, b) = (dot(&z, &m.apply(&y)), dot(&y, &m.apply(&z)));
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn ras_prolongations_partition_the_dofs() {
        let (k, _, part, _, _) = system(8, &[2, 2], 1);
        let m = build_preconditioner(&k, &part, None, SchwarzMode::Restricted).unwrap();
        let mut count = vec![0; k.nrows()];
        for l in m.locals.iter() {
            for (&d, &own) in l.dofs.iter().zip(&l.owned) {
                count[d] += own as usize;
            }
        }
        assert!(count.iter().all(|&c| c == 1));
    }

    #[test]
    fn cg_rejects_ras_and_agrees_with_gmres() {
        let (k, b, part, dm, mesh) = system(16, &[4, 4], 1);
        let cls = classify_interface(&mesh, &dm, &part).unwrap();
        let basis = build_coarse_basis(CoarseKind::Gdsw, &k, &mesh, &dm, &part, &cls, OrphanPolicy::Promote).unwrap();
        let ras = build_preconditioner(&k, &part, Some(&basis.phi), SchwarzMode::Restricted).unwrap();
        let cg = KrylovConfig { method: KrylovMethod::Cg, ..Default::default() };
        assert_eq!(cg_solve(&k, &b, &ras, &cg), Err(SchwarzError::NonSymmetricPreconditioner));

        let as_ = build_preconditioner(&k, &part, Some(&basis.phi), SchwarzMode::Additive).unwrap();
        assert_eq!((as_.n_subdomains(), as_.levels()), (16, 2));
        let a = cg_solve(&k, &b, &as_, &cg).unwrap();
        let g = gmres_solve(&k, &b, &as_, &KrylovConfig::default()).unwrap();
        assert!(a.iterations.abs_diff(g.iterations) <= 3, "{} vs {}", a.iterations, g.iterations);
        let direct = SparseCholesky::factorize(&k).unwrap().solve(&b);
        let xn = norm2(&direct);
        for x in [&a.x, &g.x] {
            let d: Vec<f64> = x.iter().zip(&direct).map(|(p, q)| p - q).collect();
            assert!(norm2(&d) <= 1e-6 * xn);
        }
    }

    #[test]
    fn exhausted_iterations_report_history() {
        let (k, b, part, _, _) = system(16, &[4, 4], 1);
        let m = build_preconditioner(&k, &part, None, SchwarzMode::Restricted).unwrap();
        let cfg = KrylovConfig { max_iters: 3, ..Default::default() };
        match gmres_solve(&k, &b, &m, &cfg) {
            Err(SchwarzError::NotConverged { iterations, history }) => {
                assert_eq!(iterations, 3);
                assert_eq!(history.len(), 4);
            }
            other => panic!("{other:?}"),
        }
        assert!(KrylovConfig { tol: 0.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn restarted_gmres_still_converges() {
        let (k, b, part, _, _) = system(12, &[3, 3], 1);
        let m = build_preconditioner(&k, &part, None, SchwarzMode::Restricted).unwrap();
        let cfg = KrylovConfig { restart: 3, reorthogonalize: true, ..Default::default() };
        let out = gmres_solve(&k, &b, &m, &cfg).unwrap();
        assert!(*out.history.last().unwrap() <= 1e-8);
    }

    #[test]
    fn history_csv_layout() {
        let mut buf = Vec::new();
        write_history_csv(&mut buf, &[1.0, 0.5]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "iteration,residual\n0,1e0\n1,5e-1\n");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn gmres_solves_random_spd(n in 2usize..20, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let spd = &a * a.transpose() + DMatrix::identity(n, n) * n as f64;
            let k = CsrMatrix::from_dense(&spd);
            let b = random_vec(&mut rng, n);
            let out = gmres_solve(&k, &b, &IdentityPreconditioner, &KrylovConfig::default()).unwrap();
            prop_assert!(out.iterations <= n);
            prop_assert!(*out.history.last().unwrap() <= 1e-8);
        }
    }
}
