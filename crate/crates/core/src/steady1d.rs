//! Closed-form steady states on the unit interval.
//!
//! With `γ(0) = 0 < γ(1)`, a steady state is described by a finite family of
//! intervals `(a_k, b_k)` and a level `d ∈ (0, 1)`:
//!
//! * outside the intervals `η ≡ d` and `θ' = (1 − d)/d`;
//! * on `(a_k, b_k)` the orientation is constant and
//!   `η = 1 + (d − 1) cosh(x − m_k)/cosh(L_k/2)`, `m_k` the midpoint, `L_k` the length;
//! * `θ'` carries an atom of height `((1 − d)/d) tanh(L_k/2)` at each endpoint, so
//!   that `[η'] = η [θ]` there.
//!
//! The `cosh(L_k/2)` denominator is the one that makes `η(a_k) = η(b_k) = d`.
//!
//! An interval touching `x = 0` or `x = 1` either keeps this shape, the atom at the
//! boundary then being a mismatch `θ(0+) ≠ γ(0)` balanced by `η'(0)`
//! ([`EndCondition::Atom`]), or is reflected about the boundary,
//! `η = 1 + (d − 1) cosh(x)/cosh(L)` with `η'(0) = 0` and no boundary atom
//! ([`EndCondition::Reflecting`]).
//!
//! The total variation budget `((1 − d)/d) S = γ(1)` with
//! `S = L_free + Σ (2 tanh(L_k/2) or tanh(L_k))` gives `d = S/(S + γ(1))`.
//! The dual field is `w = α(d)/α(η)`: `α(η)w` is constant, `w = 1` where `η = d`.

use serde::{Deserialize, Serialize};

use crate::error::{KwcError, Result};
use crate::grid::Grid;
use crate::model::MaterialLaws;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndCondition {
    Atom,
    Reflecting,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpSet1D {
    intervals: Vec<(f64, f64)>,
    left: EndCondition,
    right: EndCondition,
}

impl JumpSet1D {
    /// Ordered intervals with `0 ≤ a_k < b_k ≤ a_{k+1} ≤ 1`; boundary intervals get
    /// [`EndCondition::Atom`].
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        let mut prev_end = 0.0;
        for (k, &(a, b)) in intervals.iter().enumerate() {
            if !(a.is_finite() && b.is_finite() && a >= prev_end && a < b && b <= 1.0) {
                return Err(KwcError::Validation(format!(
                    "interval {k} = ({a}, {b}) is not ordered inside [0, 1] after {prev_end}"
                )));
            }
            prev_end = b;
        }
        Ok(Self { intervals, left: EndCondition::Atom, right: EndCondition::Atom })
    }

    pub fn empty() -> Self {
        Self { intervals: Vec::new(), left: EndCondition::Atom, right: EndCondition::Atom }
    }

    pub fn with_ends(mut self, left: EndCondition, right: EndCondition) -> Self {
        self.left = left;
        self.right = right;
        self
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    fn touches_left(&self, k: usize) -> bool {
        k == 0 && self.intervals[0].0 == 0.0
    }

    fn touches_right(&self, k: usize) -> bool {
        k + 1 == self.intervals.len() && self.intervals[k].1 == 1.0
    }

    fn shape(&self, k: usize) -> Shape {
        let (a, b) = self.intervals[k];
        if self.touches_left(k) && self.left == EndCondition::Reflecting {
            if self.touches_right(k) && self.right == EndCondition::Reflecting {
                return Shape::Flat;
            }
            Shape::Reflected { center: a, half: b - a }
        } else if self.touches_right(k) && self.right == EndCondition::Reflecting {
            Shape::Reflected { center: b, half: b - a }
        } else {
            Shape::Centered { center: 0.5 * (a + b), half: 0.5 * (b - a) }
        }
    }

    /// Length outside all intervals.
    pub fn free_length(&self) -> f64 {
        1.0 - self.intervals.iter().map(|(a, b)| b - a).sum::<f64>()
    }

    /// `S` in the budget `((1 − d)/d) S = γ(1)`.
    pub fn budget_weight(&self) -> f64 {
        let atoms: f64 = (0..self.intervals.len())
            .map(|k| match self.shape(k) {
                Shape::Centered { half, .. } => 2.0 * half.tanh(),
                Shape::Reflected { half, .. } => half.tanh(),
                Shape::Flat => 0.0,
            })
            .sum();
        self.free_length() + atoms
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    /// `1 + (d − 1) cosh(x − center)/cosh(half)`.
    Centered { center: f64, half: f64 },
    /// Same profile centered on a boundary point, `half` = full length.
    Reflected { center: f64, half: f64 },
    /// Whole domain reflected at both ends: no atoms at all.
    Flat,
}

/// `d = S/(S + γ(1))`, the unique root of the decreasing budget equation.
pub fn solve_d(jumps: &JumpSet1D, gamma_right: f64) -> Result<f64> {
    if !(gamma_right > 0.0 && gamma_right.is_finite()) {
        return Err(KwcError::Validation(format!("gamma_right must be positive, got {gamma_right}")));
    }
    let s = jumps.budget_weight();
    if s <= 0.0 {
        return Err(KwcError::Validation(
            "jump set carries no orientation change (both ends reflecting over the whole interval)".into(),
        ));
    }
    Ok(s / (s + gamma_right))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState1D {
    pub d: f64,
    pub jumps: JumpSet1D,
    pub gamma_right: f64,
    pub laws: MaterialLaws,
}

impl SteadyState1D {
    fn piece(&self, x: f64) -> Option<usize> {
        self.jumps.intervals.iter().position(|&(a, b)| x >= a && x <= b)
    }

    fn profile(&self, k: usize, x: f64) -> (f64, f64) {
        let d = self.d;
        match self.jumps.shape(k) {
            Shape::Centered { center, half } | Shape::Reflected { center, half } => {
                let c = half.cosh();
                (1.0 + (d - 1.0) * (x - center).cosh() / c, (d - 1.0) * (x - center).sinh() / c)
            }
            Shape::Flat => (1.0, 0.0),
        }
    }

    pub fn eta(&self, x: f64) -> f64 {
        self.piece(x).map_or(self.d, |k| self.profile(k, x).0)
    }

    /// `η'`, one-sided from the left at interval ends when `from_left`.
    pub fn eta_prime(&self, x: f64, from_left: bool) -> f64 {
        let inside = self.jumps.intervals.iter().position(|&(a, b)| {
            if from_left {
                x > a && x <= b
            } else {
                x >= a && x < b
            }
        });
        inside.map_or(0.0, |k| self.profile(k, x).1)
    }

    /// Absolutely continuous density of `θ'`: `(1 − d)/d` outside the intervals.
    pub fn theta_density(&self, x: f64) -> f64 {
        if self.jumps.intervals.iter().any(|&(a, b)| x > a && x < b) {
            0.0
        } else {
            (1.0 - self.d) / self.d
        }
    }

    /// Atoms of `θ'` as `(location, height)`, boundary mismatches included.
    pub fn atoms(&self) -> Vec<(f64, f64)> {
        let ratio = (1.0 - self.d) / self.d;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for k in 0..self.jumps.intervals.len() {
            let (a, b) = self.jumps.intervals[k];
            let (left_atom, right_atom, height) = match self.jumps.shape(k) {
                Shape::Centered { half, .. } => (true, true, ratio * half.tanh()),
                Shape::Reflected { center, half } => (center != a, center != b, ratio * half.tanh()),
                Shape::Flat => (false, false, 0.0),
            };
            for (on, x) in [(left_atom, a), (right_atom, b)] {
                if !on {
                    continue;
                }
                match out.last_mut() {
                    Some(last) if last.0 == x => last.1 += height,
                    _ => out.push((x, height)),
                }
            }
        }
        out
    }

    /// `θ(x)` with `θ(0−) = γ(0) = 0`; right-continuous at atoms.
    pub fn theta(&self, x: f64) -> f64 {
        let ratio = (1.0 - self.d) / self.d;
        let mut free = x;
        for &(a, b) in &self.jumps.intervals {
            free -= (b.min(x) - a).max(0.0);
        }
        let atoms: f64 = self.atoms().iter().filter(|(p, _)| *p <= x && *p < 1.0).map(|(_, h)| h).sum();
        ratio * free + atoms
    }

    /// `θ(1−)`, the trace from inside.
    pub fn theta_right_trace(&self) -> f64 {
        let total: f64 = self.atoms().iter().filter(|(p, _)| *p < 1.0).map(|(_, h)| h).sum();
        (1.0 - self.d) / self.d * self.jumps.free_length() + total
    }

    pub fn w(&self, x: f64) -> f64 {
        let a = self.laws.alpha(self.d);
        let b = self.laws.alpha(self.eta(x));
        if b == 0.0 {
            1.0
        } else {
            a / b
        }
    }

    /// `θ(1) − γ(1)` accounting: free part + atoms − `γ(1)`.
    pub fn budget_residual(&self) -> f64 {
        let ratio = (1.0 - self.d) / self.d;
        let atoms: f64 = self.atoms().iter().map(|(_, h)| h).sum();
        ratio * self.jumps.free_length() + atoms - self.gamma_right
    }

    /// `max_k |η(a_k) − d|, |η(b_k) − d|` over endpoints carrying an atom, using each
    /// interval's own formula.
    pub fn continuity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.jumps.intervals.len() {
            let (a, b) = self.jumps.intervals[k];
            let (fa, fb) = (self.profile(k, a).0, self.profile(k, b).0);
            match self.jumps.shape(k) {
                Shape::Centered { .. } => worst = worst.max((fa - self.d).abs()).max((fb - self.d).abs()),
                Shape::Reflected { center, .. } => {
                    let at = if center == a { fb } else { fa };
                    worst = worst.max((at - self.d).abs());
                }
                Shape::Flat => {}
            }
        }
        worst
    }
}

/// Solves for `d` and assembles the state; checks the structural invariants.
pub fn build_steady_state(jumps: JumpSet1D, gamma_right: f64, laws: MaterialLaws) -> Result<SteadyState1D> {
    let d = solve_d(&jumps, gamma_right)?;
    let state = SteadyState1D { d, jumps, gamma_right, laws };
    if state.continuity_defect() > 1e-12 {
        return Err(KwcError::Scheme(format!("eta discontinuous at an interval end by {}", state.continuity_defect())));
    }
    if state.budget_residual().abs() > 1e-12 * (1.0 + gamma_right) {
        return Err(KwcError::Scheme(format!("budget residual {}", state.budget_residual())));
    }
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EulerLagrangeReport {
    /// Max of `|η'' − (η − 1 + η|θ'|_ac)|` over stencils inside one smooth piece.
    pub interior_residual: f64,
    /// `interior_residual / h_x²`.
    pub constant: f64,
    /// Max of `|[η'] − η·atom|` over interior atoms.
    pub jump_residual: f64,
    /// Max of `|∓η' + η|θ − γ||` at the two ends.
    pub boundary_residual: f64,
    pub continuity_defect: f64,
    pub budget_residual: f64,
    /// Max of `|w|` on the grid.
    pub w_max: f64,
    /// Max of `|w − 1|` at atom locations.
    pub w_atom_defect: f64,
}

impl EulerLagrangeReport {
    pub fn passes(&self, interior_tol: f64) -> bool {
        self.interior_residual <= interior_tol
            && self.jump_residual <= 1e-6
            && self.boundary_residual <= 1e-6
            && self.continuity_defect <= 1e-12
            && self.budget_residual.abs() <= 1e-12
            && self.w_max <= 1.0 + 1e-12
            && self.w_atom_defect <= 1e-12
    }
}

/// Residuals of the steady system for the closed-form state sampled on `grid`.
pub fn verify_euler_lagrange(state: &SteadyState1D, grid: &Grid) -> EulerLagrangeReport {
    let eta: Vec<f64> = grid.nodes().iter().map(|&x| state.eta(x)).collect();
    verify_profile(state, grid, &eta)
}

/// Same as [`verify_euler_lagrange`] with the interior residual evaluated on the
/// supplied nodal `eta` (detector sensitivity checks).
pub fn verify_profile(state: &SteadyState1D, grid: &Grid, eta: &[f64]) -> EulerLagrangeReport {
    let x = grid.nodes();
    let hx = grid.h();
    let ends: Vec<f64> = state.jumps.intervals.iter().flat_map(|&(a, b)| [a, b]).collect();
    let mut interior: f64 = 0.0;
    for j in 1..x.len() - 1 {
        let (lo, hi) = (x[j - 1], x[j + 1]);
        // a stencil touching an interval end straddles two pieces
        if ends.iter().any(|&e| e >= lo - 1e-14 && e <= hi + 1e-14) {
            continue;
        }
        let lap = (eta[j + 1] - 2.0 * eta[j] + eta[j - 1]) / (hx * hx);
        let rhs = eta[j] - 1.0 + eta[j] * state.theta_density(x[j]);
        interior = interior.max((lap - rhs).abs());
    }

    let atoms = state.atoms();
    let mut jump: f64 = 0.0;
    let mut w_atom: f64 = 0.0;
    for &(p, height) in &atoms {
        w_atom = w_atom.max((state.w(p) - 1.0).abs());
        if p <= 0.0 || p >= 1.0 {
            continue;
        }
        let left = one_sided_derivative(|s| state.eta(s), p, -hx, &ends);
        let right = one_sided_derivative(|s| state.eta(s), p, hx, &ends);
        jump = jump.max(((right - left) - state.eta(p) * height).abs());
    }

    // −η'(0) + η(0)|θ(0+) − γ(0)| and η'(1) + η(1)|θ(1−) − γ(1)|
    let atom_at = |loc: f64| atoms.iter().filter(|(p, _)| *p == loc).map(|(_, h)| h).sum::<f64>();
    let d0 = one_sided_derivative(|s| state.eta(s), 0.0, hx, &ends);
    let d1 = one_sided_derivative(|s| state.eta(s), 1.0, -hx, &ends);
    let b0 = (-d0 + state.eta(0.0) * atom_at(0.0)).abs();
    let b1 = (d1 + state.eta(1.0) * (state.theta_right_trace() - state.gamma_right).abs()).abs();

    let w_max = x.iter().map(|&s| state.w(s).abs()).fold(0.0, f64::max);
    EulerLagrangeReport {
        interior_residual: interior,
        constant: interior / (hx * hx),
        jump_residual: jump,
        boundary_residual: b0.max(b1),
        continuity_defect: state.continuity_defect(),
        budget_residual: state.budget_residual(),
        w_max,
        w_atom_defect: w_atom,
    }
}

/// Second-order one-sided difference `(−3f(p) + 4f(p+s) − f(p+2s))/(2s)`, using the
/// limit value at `p` from the side of `s` when `p` is an interval end.
fn one_sided_derivative(f: impl Fn(f64) -> f64, p: f64, s: f64, ends: &[f64]) -> f64 {
    let s = shrink_to_piece(p, s, ends);
    let f0 = f(p);
    (-3.0 * f0 + 4.0 * f(p + s) - f(p + 2.0 * s)) / (2.0 * s)
}

/// Shortens `s` so that `(p, p + 2s]` contains no other interval end.
fn shrink_to_piece(p: f64, s: f64, ends: &[f64]) -> f64 {
    let mut s = s;
    for &e in ends {
        let dist = (e - p) * s.signum();
        if dist > 1e-15 && dist <= 2.0 * s.abs() {
            s = s.signum() * dist / 4.0;
        }
    }
    s.abs().max(1e-6) * s.signum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laws() -> MaterialLaws {
        MaterialLaws::new(0.0).unwrap()
    }

    #[test]
    fn no_intervals_gives_linear_orientation() {
        let s = build_steady_state(JumpSet1D::empty(), 1.0, laws()).unwrap();
        assert!((s.d - 0.5).abs() < 1e-15);
        assert_eq!(s.eta(0.3), 0.5);
        assert!((s.theta(0.4) - 0.4).abs() < 1e-15);
        assert!(s.atoms().is_empty());
    }

    #[test]
    fn small_data_push_d_to_one() {
        let j = JumpSet1D::new(vec![(0.2, 0.5)]).unwrap();
        let mut last = 0.0;
        for k in 0..8 {
            let d = solve_d(&j, 10f64.powi(-k)).unwrap();
            assert!(d > last && d < 1.0);
            last = d;
        }
        assert!(last > 1.0 - 1e-6);
    }

    #[test]
    fn single_interval_budget_and_continuity() {
        let j = JumpSet1D::new(vec![(0.25, 0.75)]).unwrap();
        let s = build_steady_state(j, 2.0, laws()).unwrap();
        assert!(s.budget_residual().abs() < 1e-12);
        assert!((s.eta(0.25) - s.d).abs() < 1e-12 && (s.eta(0.75) - s.d).abs() < 1e-12);
        assert!((s.theta_right_trace() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn interior_maximum_of_cosh_segment() {
        let j = JumpSet1D::new(vec![(0.4, 0.6)]).unwrap();
        let s = build_steady_state(j, 1.0, laws()).unwrap();
        let expected = 1.0 + (s.d - 1.0) / 0.1f64.cosh();
        assert!((s.eta(0.5) - expected).abs() < 1e-15);
        for k in 0..=100 {
            assert!(s.eta(0.4 + 0.002 * k as f64) <= s.eta(0.5) + 1e-15);
        }
    }

    #[test]
    fn eta_prime_jump_matches_atom() {
        let j = JumpSet1D::new(vec![(0.3, 0.7)]).unwrap();
        let s = build_steady_state(j, 1.5, laws()).unwrap();
        let h = 1e-6;
        let left = (s.eta(0.3) - s.eta(0.3 - h)) / h;
        let right = (s.eta(0.3 + h) - s.eta(0.3)) / h;
        let expected = (1.0 - s.d) * 0.2f64.tanh();
        assert!((right - left - expected).abs() < 1e-5);
        assert!(left.abs() < 1e-9);
    }

    #[test]
    fn verifier_accepts_exact_states() {
        let grid = Grid::interval(2049).unwrap();
        for (set, g) in [
            (JumpSet1D::new(vec![(0.25, 0.75)]).unwrap(), 2.0),
            (JumpSet1D::new(vec![(0.0, 0.3), (0.5, 0.6)]).unwrap(), 1.0),
            (JumpSet1D::new(vec![(0.0, 1.0)]).unwrap().with_ends(EndCondition::Reflecting, EndCondition::Atom), 2.0),
            (JumpSet1D::new(vec![(0.0, 0.4), (0.4, 1.0)]).unwrap().with_ends(EndCondition::Reflecting, EndCondition::Reflecting), 0.8),
        ] {
            let s = build_steady_state(set, g, laws()).unwrap();
            let r = verify_euler_lagrange(&s, &grid);
            assert!(r.passes(1e-5), "{r:?}");
        }
    }

    #[test]
    fn trivial_state_has_zero_residual() {
        // η ≡ 1, θ ≡ 0: the whole interval reflected at both ends with no data
        let set = JumpSet1D::new(vec![(0.0, 1.0)]).unwrap().with_ends(EndCondition::Reflecting, EndCondition::Reflecting);
        let s = SteadyState1D { d: 1.0, jumps: set, gamma_right: 0.0, laws: laws() };
        let r = verify_euler_lagrange(&s, &Grid::interval(65).unwrap());
        assert_eq!(r.interior_residual, 0.0);
        assert_eq!(r.boundary_residual, 0.0);
    }

    #[test]
    fn verifier_detects_perturbation() {
        let grid = Grid::interval(2049).unwrap();
        let s = build_steady_state(JumpSet1D::new(vec![(0.25, 0.75)]).unwrap(), 2.0, laws()).unwrap();
        let eta: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| s.eta(x) + 0.01 * (std::f64::consts::PI * x).sin())
            .collect();
        assert!(verify_profile(&s, &grid, &eta).interior_residual >= 1e-3);
    }

    #[test]
    fn dual_field_is_bounded_and_saturated_at_atoms() {
        let s = build_steady_state(JumpSet1D::new(vec![(0.1, 0.35), (0.6, 0.9)]).unwrap(), 3.0, MaterialLaws::new(1e-3).unwrap()).unwrap();
        for k in 0..=1000 {
            let x = k as f64 / 1000.0;
            assert!(s.w(x) <= 1.0 + 1e-12 && s.w(x) > 0.0);
        }
        for (p, _) in s.atoms() {
            assert!((s.w(p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_overlapping_intervals() {
        assert!(JumpSet1D::new(vec![(0.2, 0.5), (0.4, 0.6)]).is_err());
        assert!(JumpSet1D::new(vec![(0.5, 0.2)]).is_err());
        assert!(JumpSet1D::new(vec![(0.5, 1.2)]).is_err());
        assert!(solve_d(&JumpSet1D::empty(), 0.0).is_err());
    }
}
