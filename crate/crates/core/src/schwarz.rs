//! Overlapping Schwarz alternating method on a single background mesh.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{spd_solve_with_guess, CsrMatrix, DEFAULT_TOL};
use crate::mesh::{DomainDecomposition, TriMesh};
use crate::problem::{EllipticProblem, LinearSystem, ScalarFieldP1};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchwarzMode {
    Multiplicative,
    Additive,
}

/// What one iteration does: solve every overlapping subdomain, or only the next
/// one in the cyclic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    Sweep,
    Alternating,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    /// Zero at interior nodes, Dirichlet interpolant on the boundary.
    ZeroInterior,
    Given(ScalarFieldP1),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchwarzConfig {
    pub mode: SchwarzMode,
    pub sweeps: usize,
    /// Permutation of the overlapping subdomain indices.
    pub order: Vec<usize>,
    pub schedule: Schedule,
    pub initial_guess: InitialGuess,
    pub tol: f64,
}

impl SchwarzConfig {
    pub fn new(n_subdomains: usize, sweeps: usize) -> Self {
        SchwarzConfig {
            mode: SchwarzMode::Multiplicative,
            sweeps,
            order: (0..n_subdomains).collect(),
            schedule: Schedule::Sweep,
            initial_guess: InitialGuess::ZeroInterior,
            tol: DEFAULT_TOL,
        }
    }

    pub fn validate(&self, n_subdomains: usize) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::InvalidArgument("sweeps must be at least 1".into()));
        }
        let mut seen = vec![false; n_subdomains];
        if self.order.len() != n_subdomains {
            return Err(Error::InvalidArgument("subdomain order must be a permutation".into()));
        }
        for &k in &self.order {
            if k >= n_subdomains || seen[k] {
                return Err(Error::InvalidArgument("subdomain order must be a permutation".into()));
            }
            seen[k] = true;
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("solver tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchwarzState {
    pub iterate: ScalarFieldP1,
    /// Number of completed iterations.
    pub sweep: usize,
    /// Overlapping subdomains solved in the latest iteration.
    pub last_updated: Vec<usize>,
}

struct LocalProblem {
    free: Vec<usize>,
    matrix: CsrMatrix,
    coupling: Vec<Vec<(usize, f64)>>,
}

/// Pre-assembled subdomain problems, advanced one iteration at a time.
pub struct SchwarzSolver {
    system: LinearSystem,
    locals: Vec<LocalProblem>,
    config: SchwarzConfig,
}

impl SchwarzSolver {
    pub fn new(mesh: &TriMesh, decomp: &DomainDecomposition, problem: &EllipticProblem, config: SchwarzConfig) -> Result<Self> {
        decomp.check_overlap_condition()?;
        config.validate(decomp.n_overlapping())?;
        let system = LinearSystem::assemble(mesh, problem)?;
        let boundary = mesh.boundary_vertices();
        let locals = (0..decomp.n_overlapping())
            .map(|m| {
                let free = free_nodes(mesh, decomp, m, &boundary);
                let (matrix, coupling) = system.matrix.split(&free);
                LocalProblem { free, matrix, coupling }
            })
            .collect();
        Ok(SchwarzSolver { system, locals, config })
    }

    pub fn config(&self) -> &SchwarzConfig {
        &self.config
    }

    pub fn system(&self) -> &LinearSystem {
        &self.system
    }

    /// Vertices solved for in overlapping subdomain `m`.
    pub fn free_nodes(&self, m: usize) -> &[usize] {
        &self.locals[m].free
    }

    pub fn initial_state(&self) -> SchwarzState {
        let iterate = match &self.config.initial_guess {
            InitialGuess::Given(v) => {
                let mut v = v.clone();
                for &(i, g) in &self.system.constrained {
                    v.values[i] = g;
                }
                v
            }
            InitialGuess::ZeroInterior => {
                let mut values = vec![0.0; self.system.matrix.n];
                for &(i, g) in &self.system.constrained {
                    values[i] = g;
                }
                ScalarFieldP1 { values }
            }
        };
        SchwarzState { iterate, sweep: 0, last_updated: Vec::new() }
    }

    fn local_solve(&self, m: usize, v: &ScalarFieldP1) -> Result<Vec<f64>> {
        let lp = &self.locals[m];
        if lp.free.is_empty() {
            return Ok(Vec::new());
        }
        let rhs: Vec<f64> = lp
            .free
            .iter()
            .zip(&lp.coupling)
            .map(|(&i, c)| self.system.rhs[i] - c.iter().map(|&(j, a)| a * v.values[j]).sum::<f64>())
            .collect();
        let guess = lp.free.iter().map(|&i| v.values[i]).collect();
        let cap = 10 * lp.free.len().max(10);
        Ok(spd_solve_with_guess(&lp.matrix, &rhs, guess, self.config.tol, cap)?.x)
    }

    fn write(&self, m: usize, x: &[f64], v: &mut ScalarFieldP1) {
        for (&i, &xi) in self.locals[m].free.iter().zip(x) {
            v.values[i] = xi;
        }
    }

    /// Advances `state` by one iteration.
    pub fn step(&self, state: &mut SchwarzState) -> Result<()> {
        let subdomains: Vec<usize> = match self.config.schedule {
            Schedule::Sweep => self.config.order.clone(),
            Schedule::Alternating => {
                let n = self.config.order.len();
                vec![self.config.order[state.sweep % n]]
            }
        };
        match self.config.mode {
            SchwarzMode::Multiplicative => {
                for &m in &subdomains {
                    let x = self.local_solve(m, &state.iterate)?;
                    self.write(m, &x, &mut state.iterate);
                }
            }
            SchwarzMode::Additive => {
                let solved = subdomains
                    .iter()
                    .map(|&m| self.local_solve(m, &state.iterate))
                    .collect::<Result<Vec<_>>>()?;
                for (&m, x) in subdomains.iter().zip(&solved) {
                    self.write(m, x, &mut state.iterate);
                }
            }
        }
        state.sweep += 1;
        state.last_updated = subdomains;
        Ok(())
    }

    /// Converged discrete solution on the whole mesh.
    pub fn discrete_solution(&self) -> Result<ScalarFieldP1> {
        self.system.solve()
    }
}

/// Vertices strictly inside overlapping subdomain `m` and off the outer boundary.
fn free_nodes(mesh: &TriMesh, decomp: &DomainDecomposition, m: usize, boundary: &[bool]) -> Vec<usize> {
    let mut inside = vec![0usize; mesh.n_vertices()];
    let mut total = vec![0usize; mesh.n_vertices()];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let in_m = decomp.overlaps[m].contains(&decomp.tri_subdomain[t]);
        for &v in tri {
            total[v] += 1;
            if in_m {
                inside[v] += 1;
            }
        }
    }
    (0..mesh.n_vertices()).filter(|&v| !boundary[v] && inside[v] > 0 && inside[v] == total[v]).collect()
}

/// Boundary edges of overlapping subdomain `m`, including its artificial part.
pub fn overlap_boundary_edges(mesh: &TriMesh, decomp: &DomainDecomposition, m: usize) -> Vec<usize> {
    let in_m = |t: usize| decomp.overlaps[m].contains(&decomp.tri_subdomain[t]);
    mesh.edges
        .iter()
        .enumerate()
        .filter(|(_, e)| match e.triangles {
            (t, None) => in_m(t),
            (t, Some(s)) => in_m(t) != in_m(s),
        })
        .map(|(i, _)| i)
        .collect()
}

/// Nodal values of `v` at every vertex of the given edges, sorted by vertex.
pub fn extract_trace(mesh: &TriMesh, v: &ScalarFieldP1, edges: &[usize]) -> Result<Vec<(usize, f64)>> {
    let mut nodes = Vec::with_capacity(2 * edges.len());
    for &e in edges {
        let edge = mesh
            .edges
            .get(e)
            .ok_or_else(|| Error::InvalidArgument(alloc::format!("edge {e} is not in the mesh")))?;
        nodes.extend_from_slice(&edge.vertices);
    }
    nodes.sort_unstable();
    nodes.dedup();
    Ok(nodes.into_iter().map(|i| (i, v.values[i])).collect())
}

/// Iterates after 0, 1, ..., `config.sweeps` iterations.
pub fn run_schwarz(
    mesh: &TriMesh,
    decomp: &DomainDecomposition,
    problem: &EllipticProblem,
    config: SchwarzConfig,
) -> Result<Vec<SchwarzState>> {
    let solver = SchwarzSolver::new(mesh, decomp, problem, config)?;
    let mut state = solver.initial_state();
    let mut out = vec![state.clone()];
    for _ in 0..solver.config.sweeps {
        solver.step(&mut state)?;
        out.push(state.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionEstimate {
    pub rho: f64,
    pub ratios: Vec<f64>,
    /// The error sequence reached `floor` before the end.
    pub hit_floor: bool,
}

/// Geometric mean of successive error ratios, stopping once an error drops to `floor`.
pub fn contraction_estimate(errors: &[f64], floor: f64) -> Result<ContractionEstimate> {
    if errors.len() < 3 {
        return Err(Error::InvalidArgument("need at least three error values".into()));
    }
    let mut ratios = Vec::new();
    let mut hit_floor = false;
    for w in errors.windows(2) {
        if w[0] <= floor || w[1] <= floor {
            hit_floor = true;
            break;
        }
        ratios.push(w[1] / w[0]);
    }
    let rho = if ratios.is_empty() {
        0.0
    } else {
        let log_sum: f64 = ratios.iter().map(|r| libm::log(*r)).sum();
        libm::exp(log_sum / ratios.len() as f64)
    };
    Ok(ContractionEstimate { rho, ratios, hit_floor })
}
