//! Schwarz iterations followed by the flux reconstruction and majorant
//! evaluation of selected iterates.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flux::{
    average_gradient, average_gradient_on, constraint_residuals, corrected_flux, improve_corrector_locally,
    solve_corrector, BrokenFluxField, CorrectorSolution, CorrectorSpace, CorrectorWeights,
};
use crate::geometry::{round, PI};
use crate::majorant::{majorant_terms, optimize_eps, MajorantConstants, MajorantReport};
use crate::mesh::{CellType, DomainDecomposition, Layout, TriMesh};
use crate::problem::{energy_error, manufactured_lshape_problem, EllipticProblem, ScalarFieldP1};
use crate::schwarz::{Schedule, SchwarzConfig, SchwarzMode, SchwarzSolver};

/// Friedrichs constant of the square `(0,2)²`, valid for every preset domain.
pub const PRESET_FRIEDRICHS: f64 = core::f64::consts::SQRT_2 / PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsPolicy {
    Fixed([f64; 3]),
    /// Alternate corrector solves and closed-form updates of the Young parameters.
    Optimized { rounds: usize },
}

/// Patches over which `A∇v` is averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Averaging {
    FineMesh,
    CorrectorMesh,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorOptions {
    pub eps: EpsPolicy,
    pub averaging: Averaging,
    pub local_improvement: bool,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions { eps: EpsPolicy::Fixed([1.0; 3]), averaging: Averaging::FineMesh, local_improvement: false }
    }
}

#[derive(Debug, Clone)]
pub struct Estimate {
    pub report: MajorantReport,
    pub y_tilde: BrokenFluxField,
    /// Corrected flux `ỹ + q`.
    pub flux: BrokenFluxField,
    pub corrector: CorrectorSolution,
}

/// Reconstructs admissible fluxes and evaluates the majorant on a fixed mesh.
pub struct Estimator<'a> {
    pub mesh: &'a TriMesh,
    pub decomp: &'a DomainDecomposition,
    pub problem: &'a EllipticProblem,
    pub constants: MajorantConstants,
    pub space: CorrectorSpace,
    pub options: EstimatorOptions,
}

impl<'a> Estimator<'a> {
    pub fn new(
        mesh: &'a TriMesh,
        decomp: &'a DomainDecomposition,
        problem: &'a EllipticProblem,
        constants: MajorantConstants,
        space: CorrectorSpace,
        options: EstimatorOptions,
    ) -> Self {
        Estimator { mesh, decomp, problem, constants, space, options }
    }

    fn y_tilde(&self, v: &ScalarFieldP1) -> BrokenFluxField {
        match self.options.averaging {
            Averaging::FineMesh => average_gradient(self.mesh, self.decomp, &self.problem.a, v),
            Averaging::CorrectorMesh => average_gradient_on(self.mesh, &self.problem.a, v, &self.space),
        }
    }

    fn correct(&self, v: &ScalarFieldP1, y_tilde: &BrokenFluxField, eps: [f64; 3]) -> Result<(CorrectorSolution, BrokenFluxField)> {
        let weights = CorrectorWeights { alpha: self.constants.alphas(eps)?, beta: self.constants.beta.clone() };
        let sol = solve_corrector(self.mesh, self.decomp, self.problem, v, y_tilde, &self.space, &weights)?;
        let mut y = corrected_flux(y_tilde, &sol.field);
        if self.options.local_improvement {
            y = improve_corrector_locally(self.mesh, self.decomp, self.problem, v, &y, &self.space, &weights)?;
        }
        Ok((sol, y))
    }

    pub fn estimate(&self, v: &ScalarFieldP1) -> Result<Estimate> {
        let y_tilde = self.y_tilde(v);
        let mut eps = match self.options.eps {
            EpsPolicy::Fixed(e) => e,
            EpsPolicy::Optimized { .. } => [1.0; 3],
        };
        let (mut corrector, mut flux) = self.correct(v, &y_tilde, eps)?;
        let mut terms = majorant_terms(self.mesh, self.decomp, self.problem, v, &flux, &self.constants.beta)?;
        if let EpsPolicy::Optimized { rounds } = self.options.eps {
            for _ in 0..rounds.max(1) {
                let opt = optimize_eps(terms.sums(), &self.constants)?;
                if opt.zero {
                    break;
                }
                eps = opt.eps;
                (corrector, flux) = self.correct(v, &y_tilde, eps)?;
                terms = majorant_terms(self.mesh, self.decomp, self.problem, v, &flux, &self.constants.beta)?;
            }
            eps = optimize_eps(terms.sums(), &self.constants)?.eps;
        }
        let residuals = constraint_residuals(self.mesh, self.decomp, &flux, &*self.problem.source);
        let mut report = MajorantReport::from_terms(&terms, residuals, &self.constants, eps)?;
        if self.problem.exact.is_some() {
            let e = energy_error(self.mesh, v, self.problem)?;
            report = if e > 0.0 { report.with_energy_error(e)? } else { MajorantReport { energy_error: Some(e), ..report } };
        }
        Ok(Estimate { report, y_tilde, flux, corrector })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    LShape,
    /// `m × n` unit squares.
    Rect { m: usize, n: usize },
}

impl Preset {
    pub fn layout(&self) -> Layout {
        match *self {
            Preset::LShape => Layout::lshape(),
            Preset::Rect { m, n } => Layout::rect_grid(m, n),
        }
    }
}

/// Which iterates are estimated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Record {
    All,
    Final,
    Sweeps(Vec<usize>),
}

impl Record {
    fn wants(&self, n: usize, last: usize) -> bool {
        match self {
            Record::All => n >= 1,
            Record::Final => n == last,
            Record::Sweeps(s) => s.contains(&n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub h: f64,
    /// Corrector mesh spacing.
    pub coarse_h: f64,
    pub sweeps: usize,
    pub mode: SchwarzMode,
    pub schedule: Schedule,
    pub estimator: EstimatorOptions,
    pub record: Record,
    pub c_f: f64,
}

impl ExperimentConfig {
    pub fn new(preset: Preset, h: f64, sweeps: usize) -> Self {
        ExperimentConfig {
            preset,
            h,
            coarse_h: h,
            sweeps,
            mode: SchwarzMode::Multiplicative,
            schedule: Schedule::Alternating,
            estimator: EstimatorOptions::default(),
            record: Record::Final,
            c_f: PRESET_FRIEDRICHS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let divides = |s: f64| s > 0.0 && s <= 1.0 && {
            let n = 1.0 / s;
            (n - round(n)).abs() < 1e-9
        };
        if !divides(self.h) {
            return Err(Error::InvalidSpacing { h: self.h });
        }
        if !divides(self.coarse_h) {
            return Err(Error::InvalidSpacing { h: self.coarse_h });
        }
        let ratio = self.coarse_h / self.h;
        if ratio < 1.0 - 1e-9 || (ratio - round(ratio)).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "coarse spacing {} must be a multiple of the fine spacing {}",
                self.coarse_h, self.h
            )));
        }
        if self.sweeps == 0 {
            return Err(Error::InvalidArgument("sweeps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub sweep: usize,
    /// Overlapping subdomains solved in this iteration.
    pub updated: Vec<usize>,
    pub iterate: ScalarFieldP1,
    pub estimate: Estimate,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub mesh: TriMesh,
    pub decomp: DomainDecomposition,
    pub space: CorrectorSpace,
    pub constants: MajorantConstants,
    pub records: Vec<SweepRecord>,
}

pub fn corrector_space(mesh: &TriMesh, decomp: &DomainDecomposition, layout: &Layout, h: f64, coarse_h: f64) -> Result<CorrectorSpace> {
    if (coarse_h - h).abs() <= 1e-12 * h {
        Ok(CorrectorSpace::fine(mesh, decomp))
    } else {
        CorrectorSpace::build(mesh, decomp, &layout.coarse_mesh(coarse_h, CellType::Quad)?)
    }
}

/// Runs the Schwarz iteration on the manufactured problem of the preset and
/// estimates the requested iterates.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Experiment> {
    config.validate()?;
    let layout = config.preset.layout();
    let (mesh, decomp) = layout.decompose(config.h)?;
    let problem = manufactured_lshape_problem();
    let constants = MajorantConstants::from_decomposition(&decomp, &problem, config.c_f)?;
    let space = corrector_space(&mesh, &decomp, &layout, config.h, config.coarse_h)?;

    let mut schwarz = SchwarzConfig::new(decomp.n_overlapping(), config.sweeps);
    schwarz.mode = config.mode;
    schwarz.schedule = config.schedule;
    let solver = SchwarzSolver::new(&mesh, &decomp, &problem, schwarz)?;
    let estimator = Estimator::new(&mesh, &decomp, &problem, constants.clone(), space, config.estimator);

    let mut state = solver.initial_state();
    let mut records = Vec::new();
    for n in 1..=config.sweeps {
        solver.step(&mut state)?;
        if config.record.wants(n, config.sweeps) {
            records.push(SweepRecord {
                sweep: n,
                updated: state.last_updated.clone(),
                iterate: state.iterate.clone(),
                estimate: estimator.estimate(&state.iterate)?,
            });
        }
    }
    let space = estimator.space;
    Ok(Experiment { mesh, decomp, space, constants, records })
}

/// Relative slack of a bound over the error, negative when violated.
pub fn guarantee_slack(bound: f64, error: f64) -> f64 {
    if error == 0.0 {
        return if bound >= 0.0 { 0.0 } else { -1.0 };
    }
    (bound - error) / error
}
