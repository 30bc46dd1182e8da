//! Uniform grids on the unit interval and on a radial annulus, nodal fields,
//! and the discrete calculus used by the energies and the stepper.
//!
//! Conventions (with `r ≡ 1` on the interval):
//!
//! * node quadrature weights `w_j = h_x r_j`, halved at both ends (trapezoid);
//! * cell `c` spans nodes `c, c+1` and carries length `ℓ_c = h_x r_{c+½}`;
//! * the radial measure is `r dr`, i.e. the `2π` factor is dropped everywhere.
//!
//! With these weights [`weighted_divergence`] is the exact negative adjoint of
//! [`gradient_at_midpoints`]: `Σ_j w_j (div q)_j v_j = −Σ_c ℓ_c q_c (Dv)_c` for
//! every `v`, the boundary rows carrying the one-sided (natural) fluxes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{KwcError, Result};
use crate::model::Domain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GridKind {
    Interval,
    Radial,
}

#[derive(Debug, PartialEq)]
struct GridData {
    kind: GridKind,
    nodes: Vec<f64>,
    h: f64,
    /// `r` at nodes (all 1 on the interval).
    r_nodes: Vec<f64>,
    /// `r` at cell midpoints.
    r_mid: Vec<f64>,
    node_weights: Vec<f64>,
    cell_lengths: Vec<f64>,
}

/// Immutable uniform grid; cloning shares the underlying arrays.
#[derive(Debug, Clone)]
pub struct Grid {
    data: Arc<GridData>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data) || self.data == other.data
    }
}

impl Grid {
    /// `n` nodes on `[0, 1]`.
    pub fn interval(n: usize) -> Result<Self> {
        Self::build(GridKind::Interval, 0.0, 1.0, n)
    }

    /// `n` nodes on `[r0, r_outer]` with radial weight `r`.
    pub fn radial(r0: f64, r_outer: f64, n: usize) -> Result<Self> {
        if !(r0 > 0.0 && r_outer > r0 && r_outer.is_finite()) {
            return Err(KwcError::Validation(format!(
                "radial grid needs 0 < r0 < R, got r0={r0}, R={r_outer}"
            )));
        }
        Self::build(GridKind::Radial, r0, r_outer, n)
    }

    pub fn for_domain(domain: &Domain, n: usize) -> Result<Self> {
        match domain {
            Domain::Interval(_) => Self::interval(n),
            Domain::Radial(d) => Self::radial(d.r0, d.r_outer, n),
        }
    }

    fn build(kind: GridKind, a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(KwcError::Validation(format!("grid needs at least 3 nodes, got {n}")));
        }
        let h = (b - a) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|j| a + h * j as f64).collect();
        nodes[n - 1] = b;
        let radial = kind == GridKind::Radial;
        let r_nodes: Vec<f64> = nodes.iter().map(|&x| if radial { x } else { 1.0 }).collect();
        let r_mid: Vec<f64> = nodes
            .windows(2)
            .map(|p| if radial { 0.5 * (p[0] + p[1]) } else { 1.0 })
            .collect();
        let mut node_weights: Vec<f64> = r_nodes.iter().map(|r| h * r).collect();
        node_weights[0] *= 0.5;
        node_weights[n - 1] *= 0.5;
        let cell_lengths = r_mid.iter().map(|r| h * r).collect();
        Ok(Self {
            data: Arc::new(GridData { kind, nodes, h, r_nodes, r_mid, node_weights, cell_lengths }),
        })
    }

    pub fn kind(&self) -> GridKind {
        self.data.kind
    }

    pub fn n(&self) -> usize {
        self.data.nodes.len()
    }

    pub fn cells(&self) -> usize {
        self.n() - 1
    }

    /// Spacing `h_x`.
    pub fn h(&self) -> f64 {
        self.data.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.data.nodes
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.data.nodes.windows(2).map(|p| 0.5 * (p[0] + p[1])).collect()
    }

    /// `r` at nodes; all ones on the interval.
    pub fn radial_weights(&self) -> &[f64] {
        &self.data.r_nodes
    }

    /// `r` at cell midpoints; all ones on the interval.
    pub fn midpoint_weights(&self) -> &[f64] {
        &self.data.r_mid
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.data.node_weights
    }

    pub fn cell_lengths(&self) -> &[f64] {
        &self.data.cell_lengths
    }

    pub fn extent(&self) -> (f64, f64) {
        (self.data.nodes[0], self.data.nodes[self.n() - 1])
    }

    /// Weights of the two boundary points in boundary sums: `1` or `(r₀, R)`.
    pub fn boundary_weights(&self) -> (f64, f64) {
        (self.data.r_nodes[0], self.data.r_nodes[self.n() - 1])
    }

    /// Total measure `∫ r dr` (or the length on the interval).
    pub fn measure(&self) -> f64 {
        self.node_weights().iter().sum()
    }

    /// Index of the node closest to `x`.
    pub fn nearest_node(&self, x: f64) -> usize {
        let (a, _) = self.extent();
        (((x - a) / self.h()).round().max(0.0) as usize).min(self.n() - 1)
    }

    fn matches_domain(&self, domain: &Domain) -> bool {
        let (a, b) = domain.extent();
        let (ga, gb) = self.extent();
        let kind_ok = match domain {
            Domain::Interval(_) => self.kind() == GridKind::Interval,
            Domain::Radial(_) => self.kind() == GridKind::Radial,
        };
        kind_ok && (a - ga).abs() <= 1e-12 * (1.0 + a.abs()) && (b - gb).abs() <= 1e-12 * (1.0 + b.abs())
    }

    pub fn check_domain(&self, domain: &Domain) -> Result<()> {
        if self.matches_domain(domain) {
            Ok(())
        } else {
            Err(KwcError::Dimension(format!(
                "{:?} grid on {:?} does not match domain {:?}",
                self.kind(),
                self.extent(),
                domain
            )))
        }
    }
}

/// Nodal values on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(KwcError::Dimension(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.n()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(KwcError::Domain(format!("non-finite field value at node {j}")));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        Self { grid: grid.clone(), values: vec![value; grid.n()] }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: grid.clone(), values: grid.nodes().iter().map(|&x| f(x)).collect() }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values at the two end nodes.
    pub fn traces(&self) -> (f64, f64) {
        (self.values[0], self.values[self.values.len() - 1])
    }

    pub fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(KwcError::Dimension(format!(
                "fields live on different grids ({} vs {} nodes)",
                self.grid.n(),
                other.grid.n()
            )))
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Quadrature `L²` norm.
    pub fn l2_norm(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.node_weights())
            .map(|(v, w)| w * v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(ScalarField { grid: self.grid.clone(), values })
    }
}

/// `(f[c+1] − f[c]) / h_x` for each cell.
pub fn gradient_at_midpoints(f: &ScalarField) -> Vec<f64> {
    gradient_of(f.values(), f.grid().h())
}

pub(crate) fn gradient_of(values: &[f64], h: f64) -> Vec<f64> {
    values.windows(2).map(|p| (p[1] - p[0]) / h).collect()
}

/// Nodal divergence `(1/r)(r q)'` of a cell flux, negative adjoint of the gradient.
pub fn weighted_divergence(flux: &[f64], grid: &Grid) -> Result<ScalarField> {
    if flux.len() != grid.cells() {
        return Err(KwcError::Dimension(format!(
            "flux has {} entries, grid has {} cells",
            flux.len(),
            grid.cells()
        )));
    }
    let n = grid.n();
    let rm = grid.midpoint_weights();
    let w = grid.node_weights();
    let mut out = vec![0.0; n];
    for j in 0..n {
        let right = if j < n - 1 { rm[j] * flux[j] } else { 0.0 };
        let left = if j > 0 { rm[j - 1] * flux[j - 1] } else { 0.0 };
        out[j] = (right - left) / w[j];
    }
    ScalarField::new(grid, out)
}

/// Trapezoidal rule with weight `r` (no `2π`).
pub fn integrate(f: &ScalarField) -> f64 {
    f.values().iter().zip(f.grid().node_weights()).map(|(v, w)| v * w).sum()
}

/// Midpoint-rule sum `Σ_c ℓ_c q_c` of a cell quantity.
pub fn integrate_cells(q: &[f64], grid: &Grid) -> f64 {
    q.iter().zip(grid.cell_lengths()).map(|(v, l)| v * l).sum()
}

/// Exact harmonic extension: affine on the interval, `a + b ln r` on the annulus.
pub fn harmonic_extension(domain: &Domain, grid: &Grid) -> Result<ScalarField> {
    grid.check_domain(domain)?;
    let (g0, g1) = domain.boundary_values();
    let field = match domain {
        Domain::Interval(_) => ScalarField::from_fn(grid, |x| g0 + (g1 - g0) * x),
        Domain::Radial(d) => {
            let span = (d.r_outer / d.r0).ln();
            ScalarField::from_fn(grid, |r| g0 + (g1 - g0) * (r / d.r0).ln() / span)
        }
    };
    Ok(pin_ends(field, g0, g1))
}

/// Discrete harmonic extension: `r_{c+½}(u_{c+1} − u_c)` is constant across cells.
///
/// Coincides with [`harmonic_extension`] on the interval and differs by `O(h_x²)`
/// on the annulus. The energies use this one, so `Σ_c ℓ_c (DH)_c (Dφ)_c = 0` for
/// every `φ` vanishing at both ends.
pub fn discrete_harmonic_extension(domain: &Domain, grid: &Grid) -> Result<ScalarField> {
    grid.check_domain(domain)?;
    let (g0, g1) = domain.boundary_values();
    let rm = grid.midpoint_weights();
    let mut cum = Vec::with_capacity(grid.n());
    let mut acc = 0.0;
    cum.push(0.0);
    for r in rm {
        acc += 1.0 / r;
        cum.push(acc);
    }
    let values = cum.iter().map(|s| g0 + (g1 - g0) * s / acc).collect();
    Ok(pin_ends(ScalarField::new(grid, values)?, g0, g1))
}

fn pin_ends(mut f: ScalarField, g0: f64, g1: f64) -> ScalarField {
    let n = f.len();
    f.values_mut()[0] = g0;
    f.values_mut()[n - 1] = g1;
    f
}
