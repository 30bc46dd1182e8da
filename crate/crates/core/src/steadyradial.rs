//! Radially symmetric steady states on the annulus `r₀ < r < R` with piecewise
//! constant orientation.
//!
//! The jump radii split `[r₀, R]` into bands. On each band
//! `η = 1 + A I₀(r) + B K₀(r)` solves `−η'' − η'/r + η − 1 = 0`, and the
//! coefficients follow from a linear system:
//!
//! * `−η'(r₀) + η(r₀)|θ(r₀) − γ(r₀)| = 0` and `η'(R) + η(R)|θ(R) − γ(R)| = 0`;
//! * continuity of `η` and `η'⁺ − η'⁻ = η·|[θ]|` at every interior jump.
//!
//! The dual field is `w = c/(r α(η))`, since `r α(η) w` is constant. A jump of
//! `θ` forces `w = ±1` there, so two jumps impose `r₁α(d₁) = r₂α(d₂)`. That one
//! scalar condition fixes the free middle level, found by safeguarded Newton with
//! the band solve nested inside.
//!
//! Existence conditions (`f`, `F`, `G`, `C₁…C₄`) are evaluated with `δ₀ = 0`, where
//! `w(r₀) ≤ 1` reduces to `r_j d² ≤ r₀ η(r₀)²`. Writing `b(x, y) = I₀(y)K₁(x) + I₁(x)K₀(y)`
//! gives `P(r₀)/P(r₁) = 1/(r₀ b(r₀, r₁))` for `P = I₀ + K₀ T₁(r₀)`. This keeps the
//! conditions free of `T_j` overflow.
//!
//! Closed-form details that are easy to get wrong, each checked against the band
//! solve:
//! * the inner-boundary-jump profile's denominator is `K₁(r₀)(T₁(R) − T₁(r₀)) + γ Q(r₀)`
//!   with `Q = I₀ + K₀T₁(R)`. With `Q(r)` the boundary condition holds only at `r = r₀`.
//! * the derivative of `g(x) = f(r₀, x)` carries `√r₀/x`, not `√(r₀/x)`.
//! * in the two-jump case `d₁` is `η(r₁)`, and the second jump height is `γ(R) − θ₀`.

use std::collections::BTreeMap;

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::bessel::{self, BesselEval};
use crate::error::{KwcError, Result};
use crate::grid::{Grid, ScalarField};
use crate::model::{Domain, DomainRadial, MaterialLaws};
use crate::stepper::{StepConfig, Stepper};

/// Band residual bound for a returned state.
pub const BAND_TOL: f64 = 1e-10;
/// Continuity bound for `η` at jump radii.
pub const CONTINUITY_TOL: f64 = 1e-12;

const SAMPLES_PER_BAND: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RadialConfig {
    pub domain: DomainRadial,
    /// Ordered jump locations in `[r₀, R]`; `r₀` or `R` mark a boundary mismatch.
    pub jump_radii: Vec<f64>,
    /// One entry per band; `None` is the level fixed by `w = ±1` at both jumps.
    pub theta_levels: Vec<Option<f64>>,
    pub laws: MaterialLaws,
}

impl RadialConfig {
    pub fn new(
        domain: DomainRadial,
        jump_radii: Vec<f64>,
        theta_levels: Vec<Option<f64>>,
        laws: MaterialLaws,
    ) -> Result<Self> {
        let cfg = Self { domain, jump_radii, theta_levels, laws };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `θ ≡ γ(r₀) = γ(R)`, `η ≡ 1`.
    pub fn no_jump(domain: DomainRadial, laws: MaterialLaws) -> Result<Self> {
        Self::new(domain, Vec::new(), vec![Some(domain.gamma_inner)], laws)
    }

    /// `θ ≡ γ(R)` with the mismatch at `r₀`.
    pub fn inner_boundary_jump(domain: DomainRadial, laws: MaterialLaws) -> Result<Self> {
        Self::new(domain, vec![domain.r0], vec![Some(domain.gamma_outer)], laws)
    }

    /// `θ ≡ γ(r₀)` with the mismatch at `R`.
    pub fn outer_boundary_jump(domain: DomainRadial, laws: MaterialLaws) -> Result<Self> {
        Self::new(domain, vec![domain.r_outer], vec![Some(domain.gamma_inner)], laws)
    }

    pub fn interior_jump(domain: DomainRadial, r1: f64, laws: MaterialLaws) -> Result<Self> {
        Self::new(domain, vec![r1], vec![Some(domain.gamma_inner), Some(domain.gamma_outer)], laws)
    }

    /// Jumps at `r₁ ≤ r₂` with the middle level free; `r₁ = r₀` is a boundary mismatch.
    pub fn two_jumps(domain: DomainRadial, r1: f64, r2: f64, laws: MaterialLaws) -> Result<Self> {
        let levels = if r1 == domain.r0 {
            vec![None, Some(domain.gamma_outer)]
        } else {
            vec![Some(domain.gamma_inner), None, Some(domain.gamma_outer)]
        };
        Self::new(domain, vec![r1, r2], levels, laws)
    }

    fn has_inner_jump(&self) -> bool {
        self.jump_radii.first() == Some(&self.domain.r0)
    }

    fn has_outer_jump(&self) -> bool {
        self.jump_radii.last() == Some(&self.domain.r_outer)
    }

    /// `[r₀, interior jumps…, R]`.
    pub fn edges(&self) -> Vec<f64> {
        let (r0, rr) = (self.domain.r0, self.domain.r_outer);
        let mut e = vec![r0];
        e.extend(self.jump_radii.iter().copied().filter(|&r| r > r0 && r < rr));
        e.push(rr);
        e
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.domain;
        let (r0, rr) = (d.r0, d.r_outer);
        if !(r0 >= bessel::X_MIN && rr <= bessel::X_MAX && r0 < rr) {
            return Err(KwcError::Validation(format!(
                "radii ({r0}, {rr}) outside the supported range [{}, {}]",
                bessel::X_MIN,
                bessel::X_MAX
            )));
        }
        if self.jump_radii.len() > 2 {
            return Err(KwcError::Validation(format!("at most 2 jumps, got {}", self.jump_radii.len())));
        }
        let mut prev = f64::NEG_INFINITY;
        for &r in &self.jump_radii {
            if !(r.is_finite() && r >= r0 && r <= rr && r > prev) {
                return Err(KwcError::Validation(format!("jump radius {r} not strictly ordered inside [{r0}, {rr}]")));
            }
            prev = r;
        }
        let bands = self.edges().len() - 1;
        if self.theta_levels.len() != bands {
            return Err(KwcError::Validation(format!(
                "{} theta levels for {bands} bands",
                self.theta_levels.len()
            )));
        }
        let matches = |level: Option<f64>, gamma: f64| {
            level.is_some_and(|v| (v - gamma).abs() <= 1e-12 * (1.0 + gamma.abs()))
        };
        if !self.has_inner_jump() && !matches(self.theta_levels[0], d.gamma_inner) {
            return Err(KwcError::Validation("theta must equal gamma at r0 when no jump sits there".into()));
        }
        if !self.has_outer_jump() && !matches(self.theta_levels[bands - 1], d.gamma_outer) {
            return Err(KwcError::Validation("theta must equal gamma at R when no jump sits there".into()));
        }
        let free: Vec<usize> = (0..bands).filter(|&k| self.theta_levels[k].is_none()).collect();
        match free.as_slice() {
            [] => {}
            [k] => {
                let left = *k > 0 || self.has_inner_jump();
                let right = *k + 1 < bands || self.has_outer_jump();
                if self.jump_radii.len() != 2 || !left || !right {
                    return Err(KwcError::Validation(
                        "a free level needs exactly two jumps, one on each side of its band".into(),
                    ));
                }
            }
            _ => return Err(KwcError::Validation("at most one free theta level".into())),
        }
        if self.theta_levels.iter().flatten().any(|v| !v.is_finite()) {
            return Err(KwcError::Validation("theta levels must be finite".into()));
        }
        Ok(())
    }
}

/// Bessel values at a radius already checked against the supported range.
fn bes(r: f64) -> BesselEval {
    bessel::eval_all(r).expect("radius validated against the Bessel range")
}

/// `η = 1 + a I₀(r)/I₀(hi) + b K₀(r)/K₀(lo)` per band, so both basis functions are
/// at most 1 on their band.
#[derive(Debug, Clone, PartialEq)]
struct BandProfile {
    edges: Vec<f64>,
    scaled: Vec<(f64, f64)>,
    i0_hi: Vec<f64>,
    k0_lo: Vec<f64>,
}

impl BandProfile {
    fn band_of(&self, r: f64) -> usize {
        let last = self.edges.len() - 2;
        (0..=last).find(|&k| r < self.edges[k + 1]).unwrap_or(last)
    }

    /// `(η, η', η'')` of band `k` at `r`.
    fn eval(&self, k: usize, r: f64) -> (f64, f64, f64) {
        let e = bes(r);
        let (a, b) = self.scaled[k];
        let (si, sk) = (1.0 / self.i0_hi[k], 1.0 / self.k0_lo[k]);
        let eta = 1.0 + a * e.i0 * si + b * e.k0 * sk;
        let d1 = a * e.i1 * si - b * e.k1 * sk;
        let d2 = a * (e.i0 - e.i1 / r) * si + b * (e.k0 + e.k1 / r) * sk;
        (eta, d1, d2)
    }

    fn coefficients(&self) -> Vec<(f64, f64)> {
        (0..self.scaled.len())
            .map(|k| (self.scaled[k].0 / self.i0_hi[k], self.scaled[k].1 / self.k0_lo[k]))
            .collect()
    }
}

/// Gaussian elimination with partial pivoting for the (≤ 6)-unknown band system.
fn solve_dense(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("nonempty pivot range");
        if m[p][col].abs() < 1e-300 {
            return Err(KwcError::Scheme(format!("singular band system at column {col}")));
        }
        m.swap(col, p);
        rhs.swap(col, p);
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            if f != 0.0 {
                for j in col..n {
                    m[i][j] -= f * m[col][j];
                }
                rhs[i] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (rhs[i] - s) / m[i][i];
    }
    Ok(x)
}

fn solve_profile(cfg: &RadialConfig, levels: &[f64]) -> Result<BandProfile> {
    let edges = cfg.edges();
    let nb = edges.len() - 1;
    let i0_hi: Vec<f64> = (0..nb).map(|k| bes(edges[k + 1]).i0).collect();
    let k0_lo: Vec<f64> = (0..nb).map(|k| bes(edges[k]).k0).collect();
    // basis (Î, Î', K̂, K̂') of band k at r
    let basis = |k: usize, r: f64| {
        let e = bes(r);
        (e.i0 / i0_hi[k], e.i1 / i0_hi[k], e.k0 / k0_lo[k], -e.k1 / k0_lo[k])
    };
    let n = 2 * nb;
    let mut m = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    let m0 = (levels[0] - cfg.domain.gamma_inner).abs();
    let mr = (cfg.domain.gamma_outer - levels[nb - 1]).abs();

    let (i, di, kk, dk) = basis(0, edges[0]);
    m[0][0] = -di + m0 * i;
    m[0][1] = -dk + m0 * kk;
    rhs[0] = -m0;
    let mut row = 1;
    for j in 1..nb {
        let r = edges[j];
        let jump = (levels[j] - levels[j - 1]).abs();
        let (il, dil, kl, dkl) = basis(j - 1, r);
        let (ir, dir, kr, dkr) = basis(j, r);
        m[row][2 * j - 2] = il;
        m[row][2 * j - 1] = kl;
        m[row][2 * j] = -ir;
        m[row][2 * j + 1] = -kr;
        row += 1;
        m[row][2 * j - 2] = -dil;
        m[row][2 * j - 1] = -dkl;
        m[row][2 * j] = dir - jump * ir;
        m[row][2 * j + 1] = dkr - jump * kr;
        rhs[row] = jump;
        row += 1;
    }
    let (i, di, kk, dk) = basis(nb - 1, edges[nb]);
    m[row][n - 2] = di + mr * i;
    m[row][n - 1] = dk + mr * kk;
    rhs[row] = -mr;

    let x = solve_dense(m, rhs)?;
    let scaled = (0..nb).map(|k| (x[2 * k], x[2 * k + 1])).collect();
    Ok(BandProfile { edges, scaled, i0_hi, k0_lo })
}

/// A jump of `θ` at `radius`, `height = θ⁺ − θ⁻` (boundary data counted as the outer side).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jump {
    pub radius: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RadialSteadyState {
    pub config: RadialConfig,
    /// Resolved level per band.
    pub levels: Vec<f64>,
    /// `(A, B)` per band with `η = 1 + A I₀ + B K₀`.
    pub band_coefficients: Vec<(f64, f64)>,
    pub jumps: Vec<Jump>,
    /// `η` at each jump radius.
    pub jump_values: Vec<f64>,
    /// `c` in `w = c/(r α(η))`.
    pub flux: f64,
    pub admissible: bool,
    pub condition_report: BTreeMap<String, f64>,
    #[serde(skip)]
    profile: BandProfile,
}

impl RadialSteadyState {
    pub fn eta(&self, r: f64) -> f64 {
        self.profile.eval(self.profile.band_of(r), r).0
    }

    /// `η'`, taken from the outer band at a jump radius.
    pub fn eta_prime(&self, r: f64) -> f64 {
        self.profile.eval(self.profile.band_of(r), r).1
    }

    /// `θ`, taken from the outer band at a jump radius.
    pub fn theta(&self, r: f64) -> f64 {
        self.levels[self.profile.band_of(r)]
    }

    pub fn w(&self, r: f64) -> f64 {
        let a = self.config.laws.alpha(self.eta(r));
        if self.flux == 0.0 {
            0.0
        } else {
            self.flux / (r * a)
        }
    }

    pub fn edges(&self) -> &[f64] {
        &self.profile.edges
    }

    /// `(r, η, θ, w)` on `n` equispaced radii.
    pub fn sample(&self, n: usize) -> Vec<[f64; 4]> {
        let (r0, rr) = (self.config.domain.r0, self.config.domain.r_outer);
        (0..n)
            .map(|i| {
                let r = if n == 1 { r0 } else { r0 + (rr - r0) * i as f64 / (n - 1) as f64 };
                [r, self.eta(r), self.theta(r), self.w(r)]
            })
            .collect()
    }
}

/// Result of [`solve_bands`]; failure to satisfy the compatibility condition is an
/// outcome, not an error.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "camelCase")]
pub enum RadialSolve {
    Found(Box<RadialSteadyState>),
    NotFound { reason: String, residuals: BTreeMap<String, f64> },
}

impl RadialSolve {
    pub fn found(self) -> Option<RadialSteadyState> {
        match self {
            RadialSolve::Found(s) => Some(*s),
            RadialSolve::NotFound { .. } => None,
        }
    }
}

fn jumps_for(cfg: &RadialConfig, levels: &[f64]) -> Vec<Jump> {
    let d = &cfg.domain;
    let edges = cfg.edges();
    let mut out = Vec::new();
    if cfg.has_inner_jump() {
        out.push(Jump { radius: d.r0, height: levels[0] - d.gamma_inner });
    }
    for j in 1..edges.len() - 1 {
        out.push(Jump { radius: edges[j], height: levels[j] - levels[j - 1] });
    }
    if cfg.has_outer_jump() {
        out.push(Jump { radius: d.r_outer, height: d.gamma_outer - levels[levels.len() - 1] });
    }
    out
}

/// `r_j α(η(r_j))` at the first jump minus the same at the second.
fn compatibility(cfg: &RadialConfig, profile: &BandProfile, jumps: &[Jump]) -> f64 {
    let at = |r: f64| {
        let eta = profile.eval(profile.band_of(r), r).0;
        r * cfg.laws.alpha(eta)
    };
    at(jumps[0].radius) - at(jumps[1].radius)
}

/// Builds the band profile, resolving a free level when present.
pub fn solve_bands(cfg: &RadialConfig) -> Result<RadialSolve> {
    cfg.validate()?;
    let free = cfg.theta_levels.iter().position(Option::is_none);
    let mut levels: Vec<f64> = cfg.theta_levels.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
    if let Some(k) = free {
        let lower = if k == 0 { cfg.domain.gamma_inner } else { levels[k - 1] };
        let upper = if k + 1 == levels.len() { cfg.domain.gamma_outer } else { levels[k + 1] };
        match solve_free_level(cfg, &mut levels, k, lower, upper)? {
            Ok(()) => {}
            Err(residuals) => {
                return Ok(RadialSolve::NotFound {
                    reason: "compatibility of the two jumps has no root between the neighbouring levels".into(),
                    residuals,
                })
            }
        }
    }
    let profile = solve_profile(cfg, &levels)?;
    assemble(cfg, levels, profile).map(|s| RadialSolve::Found(Box::new(s)))
}

type FreeLevelResult = std::result::Result<(), BTreeMap<String, f64>>;

fn solve_free_level(cfg: &RadialConfig, levels: &mut [f64], k: usize, lower: f64, upper: f64) -> Result<FreeLevelResult> {
    let phi = |t: f64, levels: &mut [f64]| -> Result<f64> {
        levels[k] = t;
        let profile = solve_profile(cfg, levels)?;
        let jumps = jumps_for(cfg, levels);
        Ok(compatibility(cfg, &profile, &jumps))
    };
    let (mut lo, mut hi) = (lower.min(upper), lower.max(upper));
    let mut f_lo = phi(lo, levels)?;
    let f_hi = phi(hi, levels)?;
    if hi <= lo || f_lo * f_hi > 0.0 {
        let mut residuals = BTreeMap::new();
        residuals.insert("compatibilityAtLower".into(), f_lo);
        residuals.insert("compatibilityAtUpper".into(), f_hi);
        return Ok(Err(residuals));
    }
    let scale = 1.0 + lo.abs().max(hi.abs());
    let mut t = 0.5 * (lo + hi);
    for it in 0..200 {
        let f = phi(t, levels)?;
        if f == 0.0 || hi - lo <= 4.0 * f64::EPSILON * scale {
            debug!("free level {t} after {it} iterations");
            break;
        }
        if (f < 0.0) == (f_lo < 0.0) {
            lo = t;
            f_lo = f;
        } else {
            hi = t;
        }
        let dt = 1e-7 * (hi - lo).max(1e-12 * scale);
        let slope = (phi(t + dt, levels)? - f) / dt;
        let newton = t - f / slope;
        t = if newton.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (newton - t).abs() == 0.0 && (f / slope).abs() <= 1e-15 * scale {
            break;
        }
    }
    levels[k] = t;
    Ok(Ok(()))
}

fn assemble(cfg: &RadialConfig, levels: Vec<f64>, profile: BandProfile) -> Result<RadialSteadyState> {
    let d = &cfg.domain;
    let edges = profile.edges.clone();
    let nb = edges.len() - 1;
    let jumps = jumps_for(cfg, &levels);
    let value = |r: f64| profile.eval(profile.band_of(r), r);

    let mut band_res: f64 = 0.0;
    let mut eta_min = f64::INFINITY;
    let mut eta_max = f64::NEG_INFINITY;
    for k in 0..nb {
        let (lo, hi) = (edges[k], edges[k + 1]);
        for s in 0..=SAMPLES_PER_BAND {
            let r = lo + (hi - lo) * s as f64 / SAMPLES_PER_BAND as f64;
            let (eta, d1, d2) = profile.eval(k, r);
            let e = bes(r);
            let scale = 1.0 + (profile.scaled[k].0 * e.i0 / profile.i0_hi[k]).abs()
                + (profile.scaled[k].1 * e.k0 / profile.k0_lo[k]).abs();
            band_res = band_res.max((-d2 - d1 / r + eta - 1.0).abs() / scale);
            eta_min = eta_min.min(eta);
            eta_max = eta_max.max(eta);
        }
    }
    let mut continuity: f64 = 0.0;
    let mut jump_res: f64 = 0.0;
    for j in 1..nb {
        let r = edges[j];
        let (el, dl, _) = profile.eval(j - 1, r);
        let (er, dr, _) = profile.eval(j, r);
        let height = (levels[j] - levels[j - 1]).abs();
        continuity = continuity.max((el - er).abs());
        jump_res = jump_res.max((dr - dl - height * er).abs());
    }
    let (e0, d0, _) = profile.eval(0, d.r0);
    let (er, dr, _) = profile.eval(nb - 1, d.r_outer);
    let boundary_res = (-d0 + e0 * (levels[0] - d.gamma_inner).abs())
        .abs()
        .max((dr + er * (d.gamma_outer - levels[nb - 1]).abs()).abs());

    if band_res > BAND_TOL || continuity > CONTINUITY_TOL {
        return Err(KwcError::Scheme(format!(
            "band solve residual {band_res:e}, continuity defect {continuity:e}"
        )));
    }

    let active: Vec<Jump> = jumps.iter().copied().filter(|j| j.height != 0.0).collect();
    let flux = active.first().map_or(0.0, |j| j.height.signum() * j.radius * cfg.laws.alpha(value(j.radius).0));
    let w = |r: f64| if flux == 0.0 { 0.0 } else { flux / (r * cfg.laws.alpha(value(r).0)) };
    let mut w_max: f64 = 0.0;
    for k in 0..nb {
        for s in 0..=SAMPLES_PER_BAND {
            let r = edges[k] + (edges[k + 1] - edges[k]) * s as f64 / SAMPLES_PER_BAND as f64;
            w_max = w_max.max(w(r).abs());
        }
    }
    let w_jump_defect = active.iter().map(|j| (w(j.radius) - j.height.signum()).abs()).fold(0.0, f64::max);

    let mut report = BTreeMap::new();
    report.insert("bandResidual".to_string(), band_res);
    report.insert("boundaryResidual".to_string(), boundary_res);
    report.insert("continuity".to_string(), continuity);
    report.insert("jumpResidual".to_string(), jump_res);
    report.insert("etaMin".to_string(), eta_min);
    report.insert("etaMax".to_string(), eta_max);
    report.insert("wMax".to_string(), w_max);
    report.insert("wAtR0".to_string(), w(d.r0));
    report.insert("wJumpDefect".to_string(), w_jump_defect);
    add_case_conditions(cfg, &levels, &jumps, &profile, &mut report)?;

    let admissible = eta_min > 0.0 && eta_max <= 1.0 + 1e-12 && w_max <= 1.0 + 1e-10 && w_jump_defect <= 1e-10;
    let jump_values = jumps.iter().map(|j| value(j.radius).0).collect();
    Ok(RadialSteadyState {
        config: cfg.clone(),
        band_coefficients: profile.coefficients(),
        levels,
        jumps,
        jump_values,
        flux,
        admissible,
        condition_report: report,
        profile,
    })
}

/// Closed-form conditions matching the configuration's shape, in the `δ₀ = 0` reduction.
fn add_case_conditions(
    cfg: &RadialConfig,
    levels: &[f64],
    jumps: &[Jump],
    profile: &BandProfile,
    report: &mut BTreeMap<String, f64>,
) -> Result<()> {
    let d = &cfg.domain;
    let (r0, rr) = (d.r0, d.r_outer);
    let eta_at = |r: f64| profile.eval(profile.band_of(r), r).0;
    match jumps {
        [j] if j.radius == rr => {
            report.insert("f".into(), outer_jump_f(r0, rr, j.height.abs())?);
        }
        [j] if j.radius > r0 && j.radius < rr => {
            let c = condition_interior_jump(r0, j.radius, rr, j.height.abs())?;
            report.insert("G".into(), c.g);
            if let Some(f) = c.f_ratio {
                report.insert("F".into(), f);
            }
            report.insert("dRelationResidual".into(), (c.d - eta_at(j.radius)).abs());
        }
        [a, b] if a.radius < b.radius && b.radius < rr && cfg.laws.delta0 == 0.0 => {
            let gamma = d.gamma_outer - d.gamma_inner;
            let t = two_jump_system(r0, a.radius, b.radius, rr, gamma)?;
            for (k, c) in t.c.iter().enumerate() {
                report.insert(format!("C{}", k + 1), *c);
            }
            let d1 = eta_at(a.radius);
            report.insert("d1RelationResidual".into(), (t.d1_raw - d1).abs());
            report.insert("theta0".into(), levels[if a.radius == r0 { 0 } else { 1 }]);
        }
        _ => {}
    }
    if jumps.len() == 2 {
        let (a, b) = (jumps[0].radius, jumps[1].radius);
        report.insert(
            "wCompatibility".into(),
            (a * cfg.laws.alpha(eta_at(a)) - b * cfg.laws.alpha(eta_at(b))).abs(),
        );
    }
    Ok(())
}

/// `f(r₀, R) = γ(r₀b(r₀, R) − 1) − √r₀(√R − √r₀) ∂b/∂R(r₀, R)`; `f ≥ 0` iff the
/// outer-boundary-jump state has `w(r₀) ≤ 1`.
pub fn outer_jump_f(r0: f64, r: f64, gamma: f64) -> Result<f64> {
    let b = bessel::b_combo(r0, r)?;
    let db = bessel::db_dy(r0, r)?;
    Ok(gamma * (r0 * b - 1.0) - r0.sqrt() * (r.sqrt() - r0.sqrt()) * db)
}

/// `g'(x)` for `g(x) = f(r₀, x)`, using `a'' = a − a'/x` for `a = b(r₀, ·)`.
pub fn outer_jump_f_derivative(r0: f64, x: f64, gamma: f64) -> Result<f64> {
    let a = bessel::b_combo(r0, x)?;
    let da = bessel::db_dy(r0, x)?;
    let s0 = r0.sqrt();
    Ok(s0 * (da * (gamma * s0 + 0.5 / x.sqrt() - s0 / x) + (s0 - x.sqrt()) * a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OuterJumpCondition {
    pub f: f64,
    pub exists: bool,
}

pub fn condition_outer_jump(r0: f64, r: f64, gamma: f64) -> Result<OuterJumpCondition> {
    if !(r0 > 0.0 && r > r0) {
        return Err(KwcError::Validation(format!("need 0 < r0 < R, got {r0}, {r}")));
    }
    let f = outer_jump_f(r0, r, gamma)?;
    Ok(OuterJumpCondition { f, exists: f >= 0.0 })
}

/// Where `f(r₀, ·) ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum RStar {
    /// `f ≥ 0` on `(r₀, R*]`.
    Unique { r_star: f64 },
    /// `f < 0` near `r₀`, `f ≥ 0` on `[lower, upper]`.
    Window { lower: f64, upper: f64 },
    NoSolution,
}

impl RStar {
    pub fn r_star(&self) -> Option<f64> {
        match self {
            RStar::Unique { r_star } => Some(*r_star),
            RStar::Window { upper, .. } => Some(*upper),
            RStar::NoSolution => None,
        }
    }
}

const RSTAR_SCAN: usize = 2000;

/// Scan abscissae `r₀ + Δ` with `Δ` geometric from `1e-3 r₀` and the far end where
/// `f` is negative for every `γ` the Bessel range allows.
fn rstar_scan_points(r0: f64, gamma: f64) -> Vec<f64> {
    // f ~ K₁(r₀)I₁(R)(γ r₀ − √r₀(√R − √r₀)) for large R
    let far = r0 * (1.0 + gamma.abs()).powi(2) * 4.0 + 10.0 * r0 + 10.0;
    let upper = far.min(0.8 * bessel::X_MAX);
    let (d0, d1) = (1e-3 * r0, upper - r0);
    (0..=RSTAR_SCAN)
        .map(|i| r0 + d0 * (d1 / d0).powf(i as f64 / RSTAR_SCAN as f64))
        .collect()
}

fn bisect_root(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut f_lo = f(lo)?;
    while hi - lo > 1e-10 * hi.abs() * 0.5 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bracketing scan plus bisection to `1e-10` relative.
pub fn find_r_star(r0: f64, gamma: f64) -> Result<RStar> {
    let xs = rstar_scan_points(r0, gamma);
    let f = |x: f64| outer_jump_f(r0, x, gamma);
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for i in 1..xs.len() {
        if (vals[i] >= 0.0) != (vals[i - 1] >= 0.0) {
            roots.push(bisect_root(f, xs[i - 1], xs[i])?);
        }
    }
    let starts_positive = vals[0] >= 0.0;
    Ok(match (starts_positive, roots.as_slice()) {
        (true, [r, ..]) => {
            if roots.len() > 1 {
                warn!("f(r0, .) changes sign {} times; reporting the first", roots.len());
            }
            RStar::Unique { r_star: *r }
        }
        (false, [lo, hi, ..]) => RStar::Window { lower: *lo, upper: *hi },
        (true, []) => {
            warn!("f(r0, .) stays nonnegative up to {}", xs[xs.len() - 1]);
            RStar::NoSolution
        }
        _ => RStar::NoSolution,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OuterJumpClassification {
    pub r0_gamma: f64,
    /// Sign changes of `g'` on the scan.
    pub critical_points: usize,
    pub regime: RStar,
}

/// Critical-point count of `g = f(r₀, ·)` and the resulting existence regime.
pub fn classify_outer_jump(r0: f64, gamma: f64) -> Result<OuterJumpClassification> {
    let xs = rstar_scan_points(r0, gamma);
    let mut count = 0;
    let mut prev: Option<f64> = None;
    for &x in &xs {
        let g = outer_jump_f_derivative(r0, x, gamma)?;
        if let Some(p) = prev {
            if (p >= 0.0) != (g >= 0.0) {
                count += 1;
            }
        }
        prev = Some(g);
    }
    Ok(OuterJumpClassification { r0_gamma: r0 * gamma, critical_points: count, regime: find_r_star(r0, gamma)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InteriorJumpReport {
    /// `F(r₀, r₁, R)`; undefined at `r₁ = r₀`.
    pub f_ratio: Option<f64>,
    pub g: f64,
    /// `f(r₀, r₁) ≥ 0`.
    pub necessary: bool,
    /// `γ r₁K₀(r₁)(r₀b(r₀, r₁) − 1) − √r₀(√r₁ − √r₀)K₁(r₀)`.
    pub sufficient_margin: f64,
    pub sufficient: bool,
    /// `η(r₁)` from the jump relation.
    pub d: f64,
    /// `(r₀b − 1)/(√(r₁r₀) b − 1)`; undefined at `r₁ = r₀`.
    pub d_bound: Option<f64>,
    /// `r₁d²/(r₀η(r₀)²)`.
    pub w_at_r0: f64,
}

/// Conditions for `θ = γ χ_{[r₁, R]}` with `γ(r₀) = 0`, `δ₀ = 0`.
pub fn condition_interior_jump(r0: f64, r1: f64, r: f64, gamma: f64) -> Result<InteriorJumpReport> {
    if !(r0 > 0.0 && r1 >= r0 && r >= r1) {
        return Err(KwcError::Validation(format!("need 0 < r0 <= r1 <= R, got {r0}, {r1}, {r}")));
    }
    let e0 = bessel::eval_all(r0)?;
    let e1 = bessel::eval_all(r1)?;
    let er = bessel::eval_all(r)?;
    let b01 = e1.i0 * e0.k1 + e0.i1 * e1.k0;
    let br1 = e1.i0 * er.k1 + er.i1 * e1.k0;
    let db0r = er.i1 * e0.k1 - e0.i1 * er.k1;
    let root = r0.sqrt() * (r1.sqrt() - r0.sqrt());
    let excess = r0 * b01 - 1.0;

    let g = gamma * r1 * br1 * excess - root * db0r;
    let f_ratio = (r1 > r0).then(|| root * db0r / (r1 * br1 * excess));
    let necessary = r1 == r0 || outer_jump_f(r0, r1, gamma)? >= 0.0;
    let sufficient_margin = gamma * r1 * e1.k0 * excess - root * e0.k1;
    let d_bound = (r1 > r0).then(|| excess / ((r1 * r0).sqrt() * b01 - 1.0));

    // (d − 1)κ = dγ with κ = [Q'/Q − P'/P](r₁) < 0
    let t1 = |e: &BesselEval| e.i1 / e.k1;
    let t0_1 = e1.i0 / e1.k0;
    let kappa = e1.k1 / e1.k0 * (t1(&e0) - t1(&er)) * (t1(&e1) + t0_1) / ((t0_1 + t1(&er)) * (t0_1 + t1(&e0)));
    let d = kappa / (kappa - gamma);
    let eta_r0 = 1.0 + (d - 1.0) / (r0 * b01);
    let w_at_r0 = r1 * d * d / (r0 * eta_r0 * eta_r0);
    Ok(InteriorJumpReport {
        f_ratio,
        g,
        necessary,
        sufficient_margin,
        sufficient: sufficient_margin >= 0.0,
        d,
        d_bound,
        w_at_r0,
    })
}

/// `∂F/∂R = T₁'(R)(T₀(r₁) + T₁(r₀)) F / ((T₁(R) − T₁(r₀))(T₀(r₁) + T₁(R)))`.
pub fn monotonicity_f_in_r(r0: f64, r1: f64, r: f64) -> Result<f64> {
    if !(r0 > 0.0 && r1 > r0 && r > r1) {
        return Err(KwcError::Validation(format!("need 0 < r0 < r1 < R, got {r0}, {r1}, {r}")));
    }
    let f = condition_interior_jump(r0, r1, r, 0.0)?.f_ratio.expect("r1 > r0");
    let t1r0 = bessel::ratio_t(1, r0)?;
    let t0r1 = bessel::ratio_t(0, r1)?;
    let t1r = bessel::ratio_t(1, r)?;
    let t1p = bessel::ratio_t_derivative(1, r)?;
    Ok(t1p * (t0r1 + t1r0) * f / ((t1r - t1r0) * (t0r1 + t1r)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TwoJumpReport {
    pub c: [f64; 4],
    /// `−(C₁ + C₂ + √(r₂/r₁)(C₃ + C₄))/(γ − (C₁ + √(r₁/r₂)C₂ + √(r₂/r₁)C₃ + C₄))`.
    pub d1_raw: f64,
    pub d1_bar: f64,
    /// `d1_raw` when it lies in `(0, d̄₁]`.
    pub d1: Option<f64>,
    pub theta0: Option<f64>,
    /// `w(r₀)` from the band solve, when `r₁ > r₀` and `d₁` exists.
    pub w_at_r0: Option<f64>,
    pub condition2: bool,
    /// `1 − w(r₀) ≥ 0`; `None` when `r₁ = r₀` or `d₁` does not exist.
    pub condition3: Option<bool>,
    /// Normalized margins of the identities that always hold; each should be `≥ 0`.
    pub inequalities: BTreeMap<String, f64>,
}

impl TwoJumpReport {
    pub fn inequalities_hold(&self, tol: f64) -> bool {
        self.inequalities.values().all(|&m| m >= -tol)
    }
}

/// `C₁…C₄` of the linear jump system `C₁(d₁ − 1) + C₂(d₂ − 1) = θ₀d₁`,
/// `C₃(d₁ − 1) + C₄(d₂ − 1) = (γ − θ₀)d₂`.
pub fn two_jump_coefficients(r0: f64, r1: f64, r2: f64, r: f64) -> Result<[f64; 4]> {
    let t1r0 = bessel::ratio_t(1, r0)?;
    let t1r = bessel::ratio_t(1, r)?;
    let e1 = bessel::eval_all(r1)?;
    let e2 = bessel::eval_all(r2)?;
    let (t01, t02) = (e1.i0 / e1.k0, e2.i0 / e2.k0);
    let gap = t02 - t01;
    let c1 = -(t1r0 + t02) / (r1 * e1.k0 * e1.k0 * (t1r0 + t01) * gap);
    let c2 = 1.0 / (r1 * e1.k0 * e2.k0 * gap);
    let c3 = 1.0 / (r2 * e1.k0 * e2.k0 * gap);
    let c4 = -(t1r + t01) / (r2 * e2.k0 * e2.k0 * (t1r + t02) * gap);
    Ok([c1, c2, c3, c4])
}

/// Two-jump compatibility in the `δ₀ = 0` reduction (`d₂ = d₁√(r₁/r₂)`), with
/// `γ(r₀) = 0` and `γ(R) = gamma`.
pub fn two_jump_system(r0: f64, r1: f64, r2: f64, r: f64, gamma: f64) -> Result<TwoJumpReport> {
    if !(r0 > 0.0 && r1 >= r0 && r2 > r1 && r >= r2) {
        return Err(KwcError::Validation(format!(
            "need 0 < r0 <= r1 < r2 <= R, got {r0}, {r1}, {r2}, {r}"
        )));
    }
    let c = two_jump_coefficients(r0, r1, r2, r)?;
    let [c1, c2, c3, c4] = c;
    let s = (r1 / r2).sqrt();
    let mixed = c1 + s * c2 + c3 / s + c4;
    let numer = c1 + c2 + (c3 + c4) / s;
    let d1_raw = -numer / (gamma - mixed);
    let d1_bar = (c1 + c2) / (c1 + s * c2);
    let condition2 = d1_raw > 0.0 && d1_raw <= d1_bar;
    let d1 = condition2.then_some(d1_raw);
    let theta0 = d1.map(|d| c1 + s * c2 - (c1 + c2) / d);

    let (w_at_r0, condition3) = match (theta0, r1 > r0) {
        (Some(t0), true) => {
            let domain = DomainRadial::new(r0, r, 0.0, gamma)?;
            let cfg = RadialConfig::new(
                domain,
                vec![r1, r2],
                vec![Some(0.0), Some(t0), Some(gamma)],
                MaterialLaws::new(0.0)?,
            )?;
            let profile = solve_profile(&cfg, &[0.0, t0, gamma])?;
            let (eta0, eta1) = (profile.eval(0, r0).0, profile.eval(0, r1).0);
            let w0 = r1 * eta1 * eta1 / (r0 * eta0 * eta0);
            (Some(w0), Some(1.0 - w0 >= 0.0))
        }
        _ => (None, None),
    };

    let scale = 1.0 + c.iter().map(|v| v.abs()).sum::<f64>();
    let lhs = numer / mixed;
    let mut ineq = BTreeMap::new();
    ineq.insert("ratioOrdering".to_string(), (lhs - d1_bar) / (1.0 + lhs.abs() + d1_bar.abs()));
    ineq.insert("productOrdering".to_string(), (c1 * c4 - c2 * c3) / (scale * scale));
    ineq.insert("dBarAtMostOne".to_string(), 1.0 - d1_bar);
    ineq.insert("chainLeft".to_string(), ((c1 + c2 + c3 + c4) - mixed) / scale);
    ineq.insert("chainRight".to_string(), -(c1 + c2 + c3 + c4) / scale);

    Ok(TwoJumpReport { c, d1_raw, d1_bar, d1, theta0, w_at_r0, condition2, condition3, inequalities: ineq })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TwoJumpThresholds {
    /// Smallest `γ ≥ 0` with `d₁ ∈ (0, d̄₁]`.
    pub condition2: Option<f64>,
    /// Smallest `γ` where `w(r₀) ≤ 1` also holds.
    pub condition3: Option<f64>,
}

/// `d₁ ≤ d̄₁` is `γ ≥ S − N/d̄₁`, with `N` and `S` the numerator and mixed sum of
/// `d1_raw`; `w(r₀)` is located by a scan on `(ρ, gamma_max]` and bisection.
pub fn two_jump_thresholds(r0: f64, r1: f64, r2: f64, r: f64, gamma_max: f64) -> Result<TwoJumpThresholds> {
    let [c1, c2, c3, c4] = two_jump_coefficients(r0, r1, r2, r)?;
    let s = (r1 / r2).sqrt();
    let mixed = c1 + s * c2 + c3 / s + c4;
    let numer = c1 + c2 + (c3 + c4) / s;
    let d1_bar = (c1 + c2) / (c1 + s * c2);
    let condition2 = (numer < 0.0).then(|| (mixed - numer / d1_bar).max(0.0)).filter(|&g| g <= gamma_max);
    let Some(rho) = condition2 else {
        return Ok(TwoJumpThresholds { condition2: None, condition3: None });
    };
    if r1 == r0 {
        return Ok(TwoJumpThresholds { condition2, condition3: condition2 });
    }
    let holds = |g: f64| -> Result<bool> { Ok(two_jump_system(r0, r1, r2, r, g)?.condition3 == Some(true)) };
    let start = rho * (1.0 + 1e-12) + 1e-12;
    if holds(start)? {
        return Ok(TwoJumpThresholds { condition2, condition3: Some(start) });
    }
    let steps = 2000;
    let mut prev = start;
    let mut found = None;
    for i in 1..=steps {
        let g = start + (gamma_max - start) * i as f64 / steps as f64;
        if holds(g)? {
            found = Some((prev, g));
            break;
        }
        prev = g;
    }
    let condition3 = match found {
        None => None,
        Some((mut lo, mut hi)) => {
            while hi - lo > 1e-10 * hi {
                let mid = 0.5 * (lo + hi);
                if holds(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Some(hi)
        }
    };
    Ok(TwoJumpThresholds { condition2, condition3 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Zone {
    Admissible,
    Excluded,
    /// `r₁ ≥ R` or `r₁ ≤ r₀`.
    Masked,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ContourPoint {
    pub r1: f64,
    pub r_outer: f64,
    pub g: f64,
    pub one_minus_w0: f64,
    pub sufficient_margin: f64,
    pub zone: Zone,
}

/// One grid point of the `(r₁, R)` map of `G` at fixed `r₀`, `γ`.
pub fn interior_jump_point(r0: f64, gamma: f64, r1: f64, r: f64) -> Result<ContourPoint> {
    if r1 >= r || r1 <= r0 {
        return Ok(ContourPoint {
            r1,
            r_outer: r,
            g: f64::NAN,
            one_minus_w0: f64::NAN,
            sufficient_margin: f64::NAN,
            zone: Zone::Masked,
        });
    }
    let c = condition_interior_jump(r0, r1, r, gamma)?;
    Ok(ContourPoint {
        r1,
        r_outer: r,
        g: c.g,
        one_minus_w0: 1.0 - c.w_at_r0,
        sufficient_margin: c.sufficient_margin,
        zone: if c.g >= 0.0 { Zone::Admissible } else { Zone::Excluded },
    })
}

/// Row-major over `r1s × rs`.
pub fn scan_contour(r0: f64, gamma: f64, r1s: &[f64], rs: &[f64]) -> Result<Vec<ContourPoint>> {
    let mut out = Vec::with_capacity(r1s.len() * rs.len());
    for &r1 in r1s {
        for &r in rs {
            out.push(interior_jump_point(r0, gamma, r1, r)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TwoJumpPoint {
    pub gamma: f64,
    pub d1_raw: f64,
    pub d1_bar: f64,
    /// `d̄₁ − d₁`, nonnegative when `d₁ ≤ d̄₁`.
    pub margin: f64,
    pub condition2: bool,
    pub one_minus_w0: f64,
    pub condition3: bool,
}

pub fn two_jump_point(r0: f64, r1: f64, r2: f64, r: f64, gamma: f64) -> Result<TwoJumpPoint> {
    let t = two_jump_system(r0, r1, r2, r, gamma)?;
    Ok(TwoJumpPoint {
        gamma,
        d1_raw: t.d1_raw,
        d1_bar: t.d1_bar,
        margin: t.d1_bar - t.d1_raw,
        condition2: t.condition2,
        one_minus_w0: t.w_at_r0.map_or(f64::NAN, |w| 1.0 - w),
        condition3: t.condition3.unwrap_or(t.condition2 && r1 == r0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DynamicsComparison {
    /// RMS of `η∞ − η` with the radial measure.
    pub eta_distance: f64,
    /// RMS of `θ∞ − θ`.
    pub theta_distance: f64,
    /// Max over jumps of the distance to the nearest cell carrying a comparable share of `|Dθ∞|`.
    pub jump_drift: f64,
    pub steps: usize,
    pub converged: bool,
    /// `eta_distance > tol`.
    pub diverged: bool,
}

/// Runs the radial dynamics from `state` perturbed by `amplitude · sin` bumps and
/// compares the ω-limit with the analytic profile.
pub fn cross_validate_dynamics(
    state: &RadialSteadyState,
    cfg: StepConfig,
    n: usize,
    amplitude: f64,
    tol: f64,
) -> Result<DynamicsComparison> {
    let d = state.config.domain;
    let grid = Grid::radial(d.r0, d.r_outer, n)?;
    let domain = Domain::Radial(d);
    let stepper = Stepper::new(cfg, state.config.laws, domain, grid.clone())?;
    let sup = domain.gamma_sup();
    let bump = |r: f64| (std::f64::consts::PI * (r - d.r0) / (d.r_outer - d.r0)).sin();
    let eta0 = ScalarField::from_fn(&grid, |r| (state.eta(r) - amplitude * bump(r)).clamp(0.0, 1.0));
    let theta0 = ScalarField::from_fn(&grid, |r| (state.theta(r) + amplitude * sup * bump(r)).clamp(-sup, sup));
    let limit = stepper.run_to_omega_limit(&eta0, &theta0)?;

    let weights = grid.node_weights();
    let measure = grid.measure();
    let rms = |f: &dyn Fn(usize) -> f64| (weights.iter().enumerate().map(|(j, w)| w * f(j).powi(2)).sum::<f64>() / measure).sqrt();
    let nodes = grid.nodes();
    let eta_inf = limit.eta_inf.values();
    let theta_inf = limit.theta_inf.values();
    let eta_distance = rms(&|j| eta_inf[j] - state.eta(nodes[j]));
    let theta_distance = rms(&|j| theta_inf[j] - state.theta(nodes[j]));

    let jumps: Vec<f64> = theta_inf.windows(2).map(|p| (p[1] - p[0]).abs()).collect();
    let largest = jumps.iter().copied().fold(0.0, f64::max);
    let mids = grid.midpoints();
    let jump_drift = state
        .jumps
        .iter()
        .filter(|j| j.height != 0.0)
        .map(|j| {
            mids.iter()
                .zip(&jumps)
                .filter(|(_, &dj)| dj >= 0.5 * largest)
                .map(|(m, _)| (m - j.radius).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let jump_drift = if jump_drift.is_finite() { jump_drift } else { d.r_outer - d.r0 };
    Ok(DynamicsComparison {
        eta_distance,
        theta_distance,
        jump_drift,
        steps: limit.record.steps(),
        converged: limit.record.converged,
        diverged: eta_distance > tol,
    })
}
