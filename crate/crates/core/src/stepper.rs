//! Minimizing-movements time stepper for the relaxed system.
//!
//! One step maps `(η_{i−1}, θ_{i−1})` to `(η_i, θ_i)`:
//!
//! 1. η-step: the unique minimizer of `(1/2h)|η − η_{i−1}|² + F^ν_γ(η, θ_{i−1})`.
//!    For the concrete laws this is the linear tridiagonal system
//!    `((1/h + 1 + m_j) − Δ)η = η_{i−1}/h + 1` with `m_j` the nodal average of
//!    `|Dθ_{i−1}|_ν`, solved directly. Its matrix is an M-matrix, so `0 ≤ η ≤ 1`.
//! 2. θ-step: the unique minimizer of
//!    `(1/2h)|√α₀(η_i)(z − θ_{i−1})|² + Σ ℓ β(η_i)|Dz|_ν + (ν²/2)Σ ℓ|D(z − H)|²`
//!    over `z` pinned to `γ` at both ends, by damped Newton on the tridiagonal
//!    Hessian. Truncation at `±|γ|_∞` lowers every term, so `|θ_i| ≤ |γ|_∞`.
//!
//! Both sub-problems are exact minimizations of strongly convex functions, which
//! yields the per-step energy inequality checked in [`Stepper::step`].

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::energy::{check_boundary_constraint, relaxed_parts, tv_weights, EnergyReport};
use crate::error::{KwcError, Result};
use crate::grid::{discrete_harmonic_extension, gradient_of, Grid, ScalarField};
use crate::model::{Domain, MaterialLaws};
use crate::regnorm::{NormKind, RegularizedNorm};
use crate::tridiag;

/// Slack allowed in the maximum principles.
pub const BOUND_TOL: f64 = 1e-10;
/// Relative slack allowed in the per-step energy inequality.
pub const ENERGY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct StepConfig {
    pub h: f64,
    pub norm: RegularizedNorm,
    pub max_steps: usize,
    /// Threshold on `|Δη|/h + |Δθ|/h` (quadrature `L²` norms) for steady detection.
    pub steady_tolerance: f64,
    /// Threshold on the dual norm of the θ-objective gradient.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Keep every `snapshot_stride`-th state; 0 keeps only the first and last.
    pub snapshot_stride: usize,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            h: 0.1,
            norm: RegularizedNorm::new(NormKind::Hyperbola, 0.05),
            max_steps: 10_000,
            steady_tolerance: 1e-8,
            newton_tol: 1e-10,
            newton_max_iter: 500,
            snapshot_stride: 0,
        }
    }
}

impl StepConfig {
    pub fn validate(&self, laws: &MaterialLaws) -> Result<()> {
        let h_star = laws.max_time_step();
        if !(self.h > 0.0 && self.h <= h_star) {
            return Err(KwcError::Validation(format!(
                "time step h = {} must lie in (0, {h_star}]",
                self.h
            )));
        }
        if !(self.norm.nu > 0.0 && self.norm.nu < 1.0) {
            return Err(KwcError::Validation(format!("nu = {} must lie in (0, 1)", self.norm.nu)));
        }
        if !(self.steady_tolerance > 0.0 && self.newton_tol > 0.0) {
            return Err(KwcError::Validation("tolerances must be positive".into()));
        }
        if self.newton_max_iter == 0 {
            return Err(KwcError::Validation("newton_max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub eta: ScalarField,
    pub theta: ScalarField,
}

/// `(|η_i − η_{i−1}|, |√α₀(η_i)(θ_i − θ_{i−1})|)` in quadrature `L²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StepNorms {
    pub eta: f64,
    pub theta: f64,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: State,
    pub report: EnergyReport,
    pub norms: StepNorms,
    /// `F_{i−1} − (dissipation + F_i)`; nonnegative up to rounding.
    pub inequality_slack: f64,
    pub theta_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct ThetaSolve {
    pub theta: ScalarField,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub h: f64,
    pub initial_energy: EnergyReport,
    /// Time `i h` of each completed step.
    pub times: Vec<f64>,
    pub energy_reports: Vec<EnergyReport>,
    pub step_norms: Vec<StepNorms>,
    pub inequality_slack: Vec<f64>,
    pub snapshot_times: Vec<f64>,
    pub eta_snapshots: Vec<ScalarField>,
    pub theta_snapshots: Vec<ScalarField>,
    pub converged: bool,
}

impl TrajectoryRecord {
    pub fn steps(&self) -> usize {
        self.times.len()
    }

    /// Relaxed energies `F_0, F_1, …`.
    pub fn relaxed_energies(&self) -> Vec<f64> {
        std::iter::once(self.initial_energy.relaxed_total)
            .chain(self.energy_reports.iter().map(|r| r.relaxed_total))
            .collect()
    }

    pub fn energy_nonincreasing(&self, rel_tol: f64) -> bool {
        let e = self.relaxed_energies();
        let tol = rel_tol * (1.0 + e[0].abs());
        e.windows(2).all(|p| p[1] <= p[0] + tol)
    }

    /// For every prefix `m`: `h Σ_{i≤m} F_{i−1} − Σ_{i≤m} i(½|Δη_i|² + |√α₀Δθ_i|²) − m h F_m`.
    pub fn weighted_sum_slack(&self) -> Vec<f64> {
        let e = self.relaxed_energies();
        let mut rhs = 0.0;
        let mut diss = 0.0;
        let mut out = Vec::with_capacity(self.steps());
        for (k, n) in self.step_norms.iter().enumerate() {
            let i = (k + 1) as f64;
            rhs += self.h * e[k];
            diss += i * (0.5 * n.eta * n.eta + n.theta * n.theta);
            out.push(rhs - diss - i * self.h * e[k + 1]);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct OmegaLimit {
    pub record: TrajectoryRecord,
    pub eta_inf: ScalarField,
    pub theta_inf: ScalarField,
    /// Max nodal residual of the stationary η-equation.
    pub stationarity_residual: f64,
    /// Relative decrease of the sharp weighted TV found by the perturbation battery.
    pub minimality_gap: f64,
    /// Nodes changed when projecting the initial data.
    pub projected_nodes: usize,
}

/// The θ-step objective with the time-step data frozen.
#[derive(Debug, Clone)]
pub struct ThetaObjective {
    grid: Grid,
    norm: RegularizedNorm,
    mass: Vec<f64>,
    theta_prev: Vec<f64>,
    beta: Vec<f64>,
    harmonic_grad: Vec<f64>,
    ends: (f64, f64),
}

impl ThetaObjective {
    pub fn new(
        eta_new: &ScalarField,
        theta_prev: &ScalarField,
        cfg: &StepConfig,
        laws: &MaterialLaws,
        domain: &Domain,
    ) -> Result<Self> {
        eta_new.check_same_grid(theta_prev)?;
        let grid = eta_new.grid().clone();
        let harmonic = discrete_harmonic_extension(domain, &grid)?;
        Ok(Self::build(eta_new, theta_prev, cfg, laws, domain, harmonic.values()))
    }

    fn build(
        eta_new: &ScalarField,
        theta_prev: &ScalarField,
        cfg: &StepConfig,
        laws: &MaterialLaws,
        domain: &Domain,
        harmonic: &[f64],
    ) -> Self {
        let grid = eta_new.grid().clone();
        let mass = eta_new
            .values()
            .iter()
            .zip(grid.node_weights())
            .map(|(&e, w)| w * laws.alpha0(e) / cfg.h)
            .collect();
        Self {
            norm: cfg.norm,
            mass,
            theta_prev: theta_prev.values().to_vec(),
            beta: tv_weights(eta_new.values(), laws),
            harmonic_grad: gradient_of(harmonic, grid.h()),
            ends: domain.boundary_values(),
            grid,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Boundary values the minimization keeps fixed.
    pub fn pinned_values(&self) -> (f64, f64) {
        self.ends
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        let nu2 = self.norm.nu * self.norm.nu;
        let mass: f64 = z
            .iter()
            .zip(&self.theta_prev)
            .zip(&self.mass)
            .map(|((a, b), m)| 0.5 * m * (a - b) * (a - b))
            .sum();
        let p = gradient_of(z, self.grid.h());
        let cells: f64 = p
            .iter()
            .zip(&self.harmonic_grad)
            .zip(&self.beta)
            .zip(self.grid.cell_lengths())
            .map(|(((p, ph), b), l)| l * (b * self.norm.value_1d(*p) + 0.5 * nu2 * (p - ph) * (p - ph)))
            .sum();
        mass + cells
    }

    /// Gradient with respect to all nodes; the two pinned entries are zero.
    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let n = z.len();
        let q = self.fluxes(z);
        let mut g = vec![0.0; n];
        for j in 1..n - 1 {
            g[j] = self.mass[j] * (z[j] - self.theta_prev[j]) + q[j - 1] - q[j];
        }
        g
    }

    /// Dual norm `(Σ g_j²/w_j)^{1/2}` of the gradient over the free nodes.
    pub fn residual(&self, z: &[f64]) -> f64 {
        self.dual_norm(&self.gradient(z))
    }

    fn dual_norm(&self, g: &[f64]) -> f64 {
        g.iter()
            .zip(self.grid.node_weights())
            .map(|(g, w)| g * g / w)
            .sum::<f64>()
            .sqrt()
    }

    /// `q_c = r_{c+½}(β_c φ'(p_c) + ν²(p_c − (DH)_c))`.
    fn fluxes(&self, z: &[f64]) -> Vec<f64> {
        let nu2 = self.norm.nu * self.norm.nu;
        gradient_of(z, self.grid.h())
            .iter()
            .zip(&self.harmonic_grad)
            .zip(&self.beta)
            .zip(self.grid.midpoint_weights())
            .map(|(((p, ph), b), r)| r * (b * self.norm.derivative_1d(*p) + nu2 * (p - ph)))
            .collect()
    }

    /// Hessian over the free nodes as (sub, diag, super) diagonals.
    fn hessian(&self, z: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = z.len();
        let hx = self.grid.h();
        let nu2 = self.norm.nu * self.norm.nu;
        let k: Vec<f64> = gradient_of(z, hx)
            .iter()
            .zip(&self.beta)
            .zip(self.grid.midpoint_weights())
            .map(|((p, b), r)| r * (b * self.norm.second_derivative_1d(*p) + nu2) / hx)
            .collect();
        let diag: Vec<f64> = (1..n - 1).map(|j| self.mass[j] + k[j - 1] + k[j]).collect();
        let off: Vec<f64> = (1..n - 2).map(|c| -k[c]).collect();
        (off.clone(), diag, off)
    }

    fn pin(&self, z: &mut [f64]) {
        let n = z.len();
        z[0] = self.ends.0;
        z[n - 1] = self.ends.1;
    }

    /// Damped Newton from `start` (pinned first). Step lengths `1, ρ, ρ², …` with
    /// `ρ = backtrack ∈ (0, 1)` are tried until the Armijo condition holds; a
    /// diagonally preconditioned gradient step replaces Newton whenever the latter
    /// is not a descent direction. Stops when the residual drops below `tol`, or at
    /// the rounding floor: the Newton correction is negligible, or its predicted
    /// decrease is below the resolution of the objective and it no longer lowers
    /// the residual.
    pub fn minimize(&self, start: &[f64], tol: f64, max_iter: usize, backtrack: f64) -> Result<(Vec<f64>, usize, f64)> {
        let n = start.len();
        let mut z = start.to_vec();
        self.pin(&mut z);
        if n < 3 {
            return Ok((z, 0, 0.0));
        }
        let mut value = self.value(&z);
        let mut grad = self.gradient(&z);
        let mut res = self.dual_norm(&grad);
        for it in 0..max_iter {
            if res <= tol {
                return Ok((z, it, res));
            }
            let (lo, di, up) = self.hessian(&z);
            let rhs: Vec<f64> = grad[1..n - 1].iter().map(|g| -g).collect();
            let mut dir = tridiag::solve(&lo, &di, &up, &rhs)?;
            let w = self.grid.node_weights();
            let step: f64 = dir.iter().zip(&w[1..n - 1]).map(|(d, w)| w * d * d).sum::<f64>().sqrt();
            let size = z.iter().fold(1.0_f64, |m, v| m.max(v.abs())) * self.grid.measure().sqrt();
            if step <= 1e-14 * size {
                // the correction is at rounding level: `res` is the attainable floor
                debug!("theta-step stagnated at residual {res:e} after {it} iterations");
                return Ok((z, it, res));
            }
            let mut slope: f64 = dir.iter().zip(&grad[1..n - 1]).map(|(d, g)| d * g).sum();
            if !(slope < 0.0) {
                dir = (1..n - 1).map(|j| -grad[j] / di[j - 1]).collect();
                slope = dir.iter().zip(&grad[1..n - 1]).map(|(d, g)| d * g).sum();
            }
            let mut t = 1.0;
            let mut accepted = None;
            // below this predicted decrease the objective cannot resolve the step
            let resolvable = -slope > 1e-13 * (1.0 + value.abs());
            while resolvable && t > 1e-12 {
                let trial = self.shifted(&z, &dir, t);
                let v = self.value(&trial);
                if v <= value + 1e-4 * t * slope {
                    accepted = Some((trial, v));
                    break;
                }
                t *= backtrack;
            }
            let (trial, v) = match accepted {
                Some(a) => a,
                None => {
                    // objective differences are at rounding level; fall back on the residual
                    let trial = self.shifted(&z, &dir, 1.0);
                    let v = self.value(&trial);
                    if self.residual(&trial) < res {
                        (trial, v)
                    } else if !resolvable {
                        debug!("theta-step reached its rounding floor {res:e} after {it} iterations");
                        return Ok((z, it, res));
                    } else {
                        return Err(KwcError::Solver { solver: "theta-step Newton", iterations: it, residual: res });
                    }
                }
            };
            z = trial;
            value = v;
            grad = self.gradient(&z);
            res = self.dual_norm(&grad);
        }
        if res <= tol {
            return Ok((z, max_iter, res));
        }
        Err(KwcError::Solver { solver: "theta-step Newton", iterations: max_iter, residual: res })
    }

    fn shifted(&self, z: &[f64], dir: &[f64], t: f64) -> Vec<f64> {
        let mut out = z.to_vec();
        for (o, d) in out[1..z.len() - 1].iter_mut().zip(dir) {
            *o += t * d;
        }
        out
    }
}

/// Stepper bound to one grid, domain, set of laws and configuration.
#[derive(Debug, Clone)]
pub struct Stepper {
    cfg: StepConfig,
    laws: MaterialLaws,
    domain: Domain,
    grid: Grid,
    harmonic: Vec<f64>,
}

impl Stepper {
    pub fn new(cfg: StepConfig, laws: MaterialLaws, domain: Domain, grid: Grid) -> Result<Self> {
        cfg.validate(&laws)?;
        let harmonic = discrete_harmonic_extension(&domain, &grid)?.into_values();
        Ok(Self { cfg, laws, domain, grid, harmonic })
    }

    pub fn config(&self) -> &StepConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn laws(&self) -> &MaterialLaws {
        &self.laws
    }

    pub fn energy(&self, state: &State) -> EnergyReport {
        relaxed_parts(
            state.eta.values(),
            state.theta.values(),
            &self.grid,
            &self.laws,
            &self.cfg.norm,
            &self.harmonic,
        )
    }

    fn check_grid(&self, f: &ScalarField) -> Result<()> {
        if *f.grid() == self.grid {
            Ok(())
        } else {
            Err(KwcError::Dimension("field is not on the stepper grid".into()))
        }
    }

    /// Nodal masses `M_j = ½ Σ_{c ∋ j} ℓ_c |Dθ|_ν,c`.
    fn tv_masses(&self, theta: &[f64]) -> Vec<f64> {
        let n = theta.len();
        let mut m = vec![0.0; n];
        for (c, (p, l)) in gradient_of(theta, self.grid.h()).iter().zip(self.grid.cell_lengths()).enumerate() {
            let half = 0.5 * l * self.cfg.norm.value_1d(*p);
            m[c] += half;
            m[c + 1] += half;
        }
        m
    }

    /// Stiffness diagonals of `Σ_c ℓ_c (Du)_c (Dv)_c`.
    fn stiffness(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.grid.n();
        let hx2 = self.grid.h() * self.grid.h();
        let k: Vec<f64> = self.grid.cell_lengths().iter().map(|l| l / hx2).collect();
        let mut diag = vec![0.0; n];
        for (c, kc) in k.iter().enumerate() {
            diag[c] += kc;
            diag[c + 1] += kc;
        }
        (diag, k.iter().map(|v| -v).collect())
    }

    pub fn eta_step(&self, eta_prev: &ScalarField, theta_prev: &ScalarField) -> Result<ScalarField> {
        self.check_grid(eta_prev)?;
        self.check_grid(theta_prev)?;
        let h = self.cfg.h;
        let w = self.grid.node_weights();
        let masses = self.tv_masses(theta_prev.values());
        let (mut diag, off) = self.stiffness();
        let mut rhs = vec![0.0; diag.len()];
        for j in 0..diag.len() {
            diag[j] += w[j] * (1.0 / h + 1.0) + masses[j];
            rhs[j] = w[j] * (eta_prev.values()[j] / h + 1.0);
        }
        let eta = tridiag::solve(&off, &diag, &off, &rhs)?;
        let eta = ScalarField::new(&self.grid, eta)?;
        if eta.min() < -BOUND_TOL || eta.max() > 1.0 + BOUND_TOL {
            return Err(KwcError::Scheme(format!(
                "eta-step left [0, 1]: range [{}, {}]",
                eta.min(),
                eta.max()
            )));
        }
        Ok(eta)
    }

    pub fn theta_objective(&self, eta_new: &ScalarField, theta_prev: &ScalarField) -> Result<ThetaObjective> {
        self.check_grid(eta_new)?;
        self.check_grid(theta_prev)?;
        Ok(ThetaObjective::build(eta_new, theta_prev, &self.cfg, &self.laws, &self.domain, &self.harmonic))
    }

    pub fn theta_step(&self, eta_new: &ScalarField, theta_prev: &ScalarField) -> Result<ThetaSolve> {
        self.theta_step_damped(eta_new, theta_prev, 0.5)
    }

    /// θ-step with backtracking factor `backtrack ∈ (0, 1)` in the Newton line search.
    pub fn theta_step_damped(&self, eta_new: &ScalarField, theta_prev: &ScalarField, backtrack: f64) -> Result<ThetaSolve> {
        check_boundary_constraint(theta_prev, &self.domain)?;
        let obj = self.theta_objective(eta_new, theta_prev)?;
        let (z, iterations, residual) =
            obj.minimize(theta_prev.values(), self.cfg.newton_tol, self.cfg.newton_max_iter, backtrack)?;
        let start = obj.value(theta_prev.values());
        let end = obj.value(&z);
        if end > start + 1e-12 * (1.0 + start.abs()) {
            return Err(KwcError::Scheme(format!("theta-step increased its objective: {start} -> {end}")));
        }
        let bound = self.domain.gamma_sup() + BOUND_TOL;
        if let Some(j) = z.iter().position(|v| v.abs() > bound) {
            return Err(KwcError::Scheme(format!(
                "theta-step violated |theta| <= |gamma|_inf at node {j}: {}",
                z[j]
            )));
        }
        Ok(ThetaSolve { theta: ScalarField::new(&self.grid, z)?, iterations, residual })
    }

    pub fn step(&self, state: &State) -> Result<StepOutcome> {
        let prev = self.energy(state);
        self.advance(state, &prev, prev.relaxed_total)
    }

    fn advance(&self, state: &State, prev: &EnergyReport, f0: f64) -> Result<StepOutcome> {
        let eta = self.eta_step(&state.eta, &state.theta)?;
        let solve = self.theta_step(&eta, &state.theta)?;
        let theta = solve.theta;
        let w = self.grid.node_weights();
        let mut d_eta = 0.0;
        let mut d_theta = 0.0;
        for j in 0..w.len() {
            let de = eta.values()[j] - state.eta.values()[j];
            let dt = theta.values()[j] - state.theta.values()[j];
            d_eta += w[j] * de * de;
            d_theta += w[j] * self.laws.alpha0(eta.values()[j]) * dt * dt;
        }
        let norms = StepNorms { eta: d_eta.sqrt(), theta: d_theta.sqrt() };
        let next = State { eta, theta };
        let report = self.energy(&next);
        let h = self.cfg.h;
        let lhs = d_eta / (2.0 * h) + d_theta / h + report.relaxed_total;
        let slack = prev.relaxed_total - lhs;
        if slack < -ENERGY_TOL * (1.0 + f0.abs()) {
            return Err(KwcError::Scheme(format!(
                "energy inequality violated by {:e} (F_prev = {}, F_new = {})",
                -slack, prev.relaxed_total, report.relaxed_total
            )));
        }
        Ok(StepOutcome { state: next, report, norms, inequality_slack: slack, theta_iterations: solve.iterations })
    }

    /// Clamps `η` into `[0, 1]`, `θ` into `[−|γ|_∞, |γ|_∞]` and pins the θ end
    /// values to `γ`; returns the projected state and the number of changed nodes.
    pub fn project(&self, eta: &ScalarField, theta: &ScalarField) -> Result<(State, usize)> {
        self.check_grid(eta)?;
        self.check_grid(theta)?;
        let m = self.domain.gamma_sup();
        let mut changed = 0;
        let mut e = eta.clone();
        for v in e.values_mut() {
            let c = v.clamp(0.0, 1.0);
            changed += usize::from(c != *v);
            *v = c;
        }
        let mut t = theta.clone();
        for v in t.values_mut() {
            let c = v.clamp(-m, m);
            changed += usize::from(c != *v);
            *v = c;
        }
        let (g0, g1) = self.domain.boundary_values();
        let n = t.len();
        for (j, g) in [(0, g0), (n - 1, g1)] {
            if t.values()[j] != g {
                changed += 1;
                t.values_mut()[j] = g;
            }
        }
        if changed > 0 {
            warn!("initial data projected onto the admissible set ({changed} node values changed)");
        }
        Ok((State { eta: e, theta: t }, changed))
    }

    pub fn run_to_omega_limit(&self, eta0: &ScalarField, theta0: &ScalarField) -> Result<OmegaLimit> {
        let (mut state, projected_nodes) = self.project(eta0, theta0)?;
        let h = self.cfg.h;
        let initial_energy = self.energy(&state);
        let f0 = initial_energy.relaxed_total;
        let mut record = TrajectoryRecord {
            h,
            initial_energy,
            times: Vec::new(),
            energy_reports: Vec::new(),
            step_norms: Vec::new(),
            inequality_slack: Vec::new(),
            snapshot_times: vec![0.0],
            eta_snapshots: vec![state.eta.clone()],
            theta_snapshots: vec![state.theta.clone()],
            converged: false,
        };
        let mut prev = initial_energy;
        for i in 1..=self.cfg.max_steps {
            let out = self.advance(&state, &prev, f0)?;
            let d_theta_plain = out.state.theta.sub(&state.theta)?.l2_norm();
            let rate = out.norms.eta / h + d_theta_plain / h;
            let t = i as f64 * h;
            record.times.push(t);
            record.energy_reports.push(out.report);
            record.step_norms.push(out.norms);
            record.inequality_slack.push(out.inequality_slack);
            prev = out.report;
            state = out.state;
            let done = rate <= self.cfg.steady_tolerance;
            if (self.cfg.snapshot_stride > 0 && i % self.cfg.snapshot_stride == 0) || done || i == self.cfg.max_steps {
                record.snapshot_times.push(t);
                record.eta_snapshots.push(state.eta.clone());
                record.theta_snapshots.push(state.theta.clone());
            }
            if done {
                record.converged = true;
                debug!("steady after {i} steps (rate {rate:e})");
                break;
            }
        }
        if !record.converged {
            warn!("no steady state within {} steps", self.cfg.max_steps);
        }
        let stationarity_residual = self.stationarity_residual(&state);
        let minimality_gap = self.minimality_gap(&state);
        Ok(OmegaLimit {
            record,
            eta_inf: state.eta,
            theta_inf: state.theta,
            stationarity_residual,
            minimality_gap,
            projected_nodes,
        })
    }

    /// Max over nodes of `|(−Δη + g(η) + α'(η)|Dθ|_ν)_j|`, tested against hat functions
    /// and divided by the node weight.
    pub fn stationarity_residual(&self, state: &State) -> f64 {
        let eta = state.eta.values();
        let masses = self.tv_masses(state.theta.values());
        let (diag, off) = self.stiffness();
        let w = self.grid.node_weights();
        let n = eta.len();
        (0..n)
            .map(|j| {
                let mut k = diag[j] * eta[j];
                if j > 0 {
                    k += off[j - 1] * eta[j - 1];
                }
                if j + 1 < n {
                    k += off[j] * eta[j + 1];
                }
                let r = k + w[j] * self.laws.g(eta[j]) + self.laws.alpha_prime(eta[j]) * masses[j];
                (r / w[j]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Sharp `Φ_γ(α(η); θ)`: weighted TV plus the boundary penalty.
    pub fn sharp_tv(&self, eta: &[f64], theta: &[f64]) -> f64 {
        let (g0, g1) = self.domain.boundary_values();
        let (b0, b1) = self.grid.boundary_weights();
        let n = theta.len();
        let interior: f64 = tv_weights(eta, &self.laws)
            .iter()
            .zip(gradient_of(theta, self.grid.h()))
            .zip(self.grid.cell_lengths())
            .map(|((b, p), l)| l * b * p.abs())
            .sum();
        interior
            + b0 * self.laws.alpha(eta[0]) * (theta[0] - g0).abs()
            + b1 * self.laws.alpha(eta[n - 1]) * (theta[n - 1] - g1).abs()
    }

    /// Largest relative decrease of `Φ_γ(α(η); ·)` over `θ + εφ` for a fixed battery
    /// of directions (hats, sine modes, the constant) and step sizes; 0 when none
    /// of them lowers it.
    pub fn minimality_gap(&self, state: &State) -> f64 {
        let eta = state.eta.values();
        let theta = state.theta.values();
        let n = theta.len();
        let base = self.sharp_tv(eta, theta);
        let mut directions: Vec<Vec<f64>> = Vec::new();
        for k in 1..8 {
            let c = k * (n - 1) / 8;
            let mut hat = vec![0.0; n];
            hat[c] = 1.0;
            directions.push(hat);
        }
        for k in 1..=3 {
            directions.push(
                (0..n)
                    .map(|j| (std::f64::consts::PI * k as f64 * j as f64 / (n - 1) as f64).sin())
                    .collect(),
            );
        }
        directions.push(vec![1.0; n]);
        let scale = 1.0 + self.domain.gamma_sup();
        let mut best: f64 = 0.0;
        for phi in &directions {
            for eps in [1e-2, 1e-3, 1e-4, -1e-2, -1e-3, -1e-4] {
                let z: Vec<f64> = theta.iter().zip(phi).map(|(t, p)| t + eps * scale * p).collect();
                best = best.max(base - self.sharp_tv(eta, &z));
            }
        }
        best / (1.0 + base)
    }
}

/// One η-step; see [`Stepper::eta_step`].
pub fn eta_step(
    eta_prev: &ScalarField,
    theta_prev: &ScalarField,
    cfg: &StepConfig,
    laws: &MaterialLaws,
    domain: &Domain,
) -> Result<ScalarField> {
    Stepper::new(*cfg, *laws, *domain, eta_prev.grid().clone())?.eta_step(eta_prev, theta_prev)
}

/// One θ-step; see [`Stepper::theta_step`].
pub fn theta_step(
    eta_new: &ScalarField,
    theta_prev: &ScalarField,
    cfg: &StepConfig,
    laws: &MaterialLaws,
    domain: &Domain,
) -> Result<ScalarField> {
    Ok(Stepper::new(*cfg, *laws, *domain, eta_new.grid().clone())?
        .theta_step(eta_new, theta_prev)?
        .theta)
}

/// Share of `Σ ℓ_c |Dθ|_c` carried by the largest `⌈fraction · cells⌉` cells.
pub fn gradient_concentration(theta: &ScalarField, cell_fraction: f64) -> f64 {
    let grid = theta.grid();
    let mut mass: Vec<f64> = gradient_at(theta)
        .iter()
        .zip(grid.cell_lengths())
        .map(|(p, l)| l * p.abs())
        .collect();
    let total: f64 = mass.iter().sum();
    if total == 0.0 {
        return 1.0;
    }
    mass.sort_by(|a, b| b.total_cmp(a));
    let k = ((cell_fraction * mass.len() as f64).ceil() as usize).min(mass.len());
    mass[..k].iter().sum::<f64>() / total
}

fn gradient_at(f: &ScalarField) -> Vec<f64> {
    gradient_of(f.values(), f.grid().h())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::harmonic_extension;
    use crate::model::{Domain1D, DomainRadial};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn interval(g0: f64, g1: f64) -> Domain {
        Domain::Interval(Domain1D::new(g0, g1).unwrap())
    }

    fn cfg(nu: f64, h: f64) -> StepConfig {
        StepConfig { h, norm: RegularizedNorm::new(NormKind::Hyperbola, nu), ..StepConfig::default() }
    }

    #[test]
    fn rejects_time_step_above_bound() {
        let laws = MaterialLaws::default();
        assert!(cfg(0.1, 0.6).validate(&laws).is_err());
        assert!(cfg(0.1, 0.5).validate(&laws).is_ok());
        assert!(cfg(0.1, 0.0).validate(&laws).is_err());
    }

    #[test]
    fn eta_step_fixed_point_and_constant_reduction() {
        let laws = MaterialLaws::default();
        let dom = interval(0.3, 0.3);
        let g = Grid::interval(33).unwrap();
        let c = cfg(0.1, 0.1);
        let theta = ScalarField::constant(&g, 0.3);
        let one = eta_step(&ScalarField::constant(&g, 1.0), &theta, &c, &laws, &dom).unwrap();
        assert!(one.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        let from_zero = eta_step(&ScalarField::constant(&g, 0.0), &theta, &c, &laws, &dom).unwrap();
        assert!(from_zero.values().iter().all(|v| (v - 1.0 / 11.0).abs() < 1e-14));
    }

    #[test]
    fn theta_step_keeps_constant_data() {
        let laws = MaterialLaws::default();
        let dom = interval(0.7, 0.7);
        let g = Grid::interval(17).unwrap();
        let theta = ScalarField::constant(&g, 0.7);
        let out = theta_step(&ScalarField::constant(&g, 0.5), &theta, &cfg(0.1, 0.1), &laws, &dom).unwrap();
        assert!(out.values().iter().all(|v| (v - 0.7).abs() < 1e-14));
    }

    #[test]
    fn theta_step_descends_from_harmonic_profile() {
        let laws = MaterialLaws::default();
        let dom = interval(0.0, 2.0);
        let g = Grid::interval(65).unwrap();
        let st = Stepper::new(cfg(0.1, 0.1), laws, dom, g.clone()).unwrap();
        let eta = ScalarField::constant(&g, 1.0);
        let theta = harmonic_extension(&dom, &g).unwrap();
        let out = st.theta_step(&eta, &theta).unwrap();
        let obj = st.theta_objective(&eta, &theta).unwrap();
        assert!(obj.value(out.theta.values()) <= obj.value(theta.values()));
        // symmetric data give an antisymmetric profile about the midpoint
        let v = out.theta.values();
        for j in 0..65 {
            assert!((v[j] + v[64 - j] - 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn theta_gradient_matches_finite_differences() {
        let laws = MaterialLaws::default();
        let dom = Domain::Radial(DomainRadial::new(0.5, 2.0, -1.0, 1.0).unwrap());
        let g = Grid::for_domain(&dom, 21).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in [NormKind::Hyperbola, NormKind::Tanh, NormKind::Arctan] {
            let c = StepConfig { norm: RegularizedNorm::new(kind, 0.2), ..cfg(0.2, 0.1) };
            let st = Stepper::new(c, laws, dom, g.clone()).unwrap();
            let eta = ScalarField::new(&g, (0..21).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
            let mut tp: Vec<f64> = (0..21).map(|_| rng.gen_range(-1.0..1.0)).collect();
            tp[0] = -1.0;
            tp[20] = 1.0;
            let theta = ScalarField::new(&g, tp).unwrap();
            let obj = st.theta_objective(&eta, &theta).unwrap();
            let mut z: Vec<f64> = (0..21).map(|_| rng.gen_range(-1.0..1.0)).collect();
            z[0] = -1.0;
            z[20] = 1.0;
            let grad = obj.gradient(&z);
            for j in 1..20 {
                let hs = 1e-6;
                let mut zp = z.clone();
                zp[j] += hs;
                let mut zm = z.clone();
                zm[j] -= hs;
                let fd = (obj.value(&zp) - obj.value(&zm)) / (2.0 * hs);
                assert!((fd - grad[j]).abs() <= 1e-6 * (grad[j].abs() + 1e-3), "{kind:?} node {j}: {fd} vs {}", grad[j]);
            }
        }
    }

    #[test]
    fn damping_schedule_does_not_change_minimizer() {
        let laws = MaterialLaws::default();
        let dom = interval(0.0, 1.5);
        let g = Grid::interval(41).unwrap();
        let st = Stepper::new(cfg(0.05, 0.1), laws, dom, g.clone()).unwrap();
        let eta = ScalarField::from_fn(&g, |x| 0.5 + 0.4 * (5.0 * x).cos());
        let theta = ScalarField::from_fn(&g, |x| 1.5 * x.powi(3));
        let a = st.theta_step_damped(&eta, &theta, 0.5).unwrap().theta;
        let b = st.theta_step_damped(&eta, &theta, 0.2).unwrap().theta;
        assert!(a.sub(&b).unwrap().sup_norm() < 10.0 * st.config().newton_tol.max(1e-9));
    }

    #[test]
    fn random_starts_dissipate_energy() {
        let laws = MaterialLaws::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let g0 = rng.gen_range(-2.0..2.0);
            let g1 = rng.gen_range(-2.0..2.0);
            let dom = interval(g0, g1);
            let g = Grid::interval(33).unwrap();
            let st = Stepper::new(cfg(0.1, 0.1), laws, dom, g.clone()).unwrap();
            let m = dom.gamma_sup();
            let eta = ScalarField::new(&g, (0..33).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
            let theta = ScalarField::new(&g, (0..33).map(|_| rng.gen_range(-m..=m)).collect()).unwrap();
            let (s, _) = st.project(&eta, &theta).unwrap();
            let out = st.step(&s).unwrap();
            assert!(out.report.relaxed_total < st.energy(&s).relaxed_total);
            assert!(out.inequality_slack >= -1e-9);
        }
    }

    #[test]
    fn ground_state_is_reached_immediately() {
        let laws = MaterialLaws::default();
        let dom = interval(1.2, 1.2);
        let g = Grid::interval(33).unwrap();
        let st = Stepper::new(cfg(0.1, 0.1), laws, dom, g.clone()).unwrap();
        let res = st
            .run_to_omega_limit(&ScalarField::constant(&g, 1.0), &ScalarField::constant(&g, 1.2))
            .unwrap();
        assert!(res.record.converged);
        assert_eq!(res.record.steps(), 1);
        assert!(res.stationarity_residual < 1e-12 && res.minimality_gap == 0.0);
    }

    #[test]
    fn jump_free_steady_state_is_stationary() {
        // η ≡ d = 1/(1+γ), θ = γx solves the steady system without jumps
        let gamma = 1.0;
        let d = 1.0 / (1.0 + gamma);
        let laws = MaterialLaws::new(1e-3).unwrap();
        let dom = interval(0.0, gamma);
        let g = Grid::interval(129).unwrap();
        let c = StepConfig { norm: RegularizedNorm::new(NormKind::Hyperbola, 1e-7), ..cfg(1e-7, 0.1) };
        let st = Stepper::new(c, laws, dom, g.clone()).unwrap();
        let state = State {
            eta: ScalarField::constant(&g, d),
            theta: ScalarField::from_fn(&g, |x| gamma * x),
        };
        assert!(st.stationarity_residual(&state) < 1e-6);
        assert!(st.minimality_gap(&state) < 1e-12);
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let laws = MaterialLaws::default();
        let dom = interval(0.0, 1.0);
        let st = Stepper::new(cfg(0.1, 0.1), laws, dom, Grid::interval(9).unwrap()).unwrap();
        let other = Grid::interval(11).unwrap();
        let f = ScalarField::constant(&other, 0.5);
        assert!(matches!(st.eta_step(&f, &f), Err(KwcError::Dimension(_))));
    }

    #[test]
    fn concentration_of_a_step() {
        let g = Grid::interval(101).unwrap();
        let step = ScalarField::from_fn(&g, |x| if x > 0.5 { 1.0 } else { 0.0 });
        assert!((gradient_concentration(&step, 0.05) - 1.0).abs() < 1e-15);
        let lin = ScalarField::from_fn(&g, |x| x);
        assert!((gradient_concentration(&lin, 0.05) - 0.05).abs() < 1e-12);
    }
}
