//! Material laws, domains and boundary data.
//!
//! The laws are the quadratic mobility `α(η) = α₀(η) = η²/2 + δ₀` and the
//! double-well-free potential `G(η) = (η − 1)²/2` with `g = G' = η − 1`.

use serde::{Deserialize, Serialize};

use crate::error::{KwcError, Result};
use crate::grid::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialLaws {
    pub delta0: f64,
}

/// Default `δ₀` for dynamic runs: keeps the θ-step metric uniformly positive.
pub const DEFAULT_DELTA0: f64 = 1e-3;

impl Default for MaterialLaws {
    fn default() -> Self {
        Self { delta0: DEFAULT_DELTA0 }
    }
}

impl MaterialLaws {
    pub fn new(delta0: f64) -> Result<Self> {
        if !(delta0 >= 0.0 && delta0.is_finite()) {
            return Err(KwcError::Validation(format!("delta0 must be finite and >= 0, got {delta0}")));
        }
        Ok(Self { delta0 })
    }

    #[inline]
    pub fn alpha(&self, eta: f64) -> f64 {
        0.5 * eta * eta + self.delta0
    }

    /// Metric weight of the θ time derivative; equal to `alpha` for these laws.
    #[inline]
    pub fn alpha0(&self, eta: f64) -> f64 {
        self.alpha(eta)
    }

    #[inline]
    pub fn alpha_prime(&self, eta: f64) -> f64 {
        eta
    }

    /// Inverse of `alpha` on `[0, ∞)`; `None` below `δ₀`.
    pub fn alpha_inverse(&self, value: f64) -> Option<f64> {
        let t = 2.0 * (value - self.delta0);
        (t >= 0.0).then(|| t.sqrt())
    }

    #[inline]
    pub fn g(&self, eta: f64) -> f64 {
        eta - 1.0
    }

    #[inline]
    pub fn big_g(&self, eta: f64) -> f64 {
        0.5 * (eta - 1.0) * (eta - 1.0)
    }

    /// Lipschitz constant of `g` on `[0, 1]`.
    pub fn g_lipschitz(&self) -> f64 {
        1.0
    }

    /// `δ_α = inf over [0,1] of min(α, α₀)`.
    pub fn delta_alpha(&self) -> f64 {
        self.delta0
    }

    /// Time-step bound `h* = min(h₀, 1/(1 + Lip g))`; `h₀` is not binding here.
    pub fn max_time_step(&self) -> f64 {
        1.0 / (1.0 + self.g_lipschitz())
    }

    /// Sign and convexity checks on the laws (`g(1) ≥ 0` is the relaxed form used).
    pub fn check_assumptions(&self) -> AssumptionReport {
        let convex = (0..=100).all(|k| {
            let s = k as f64 / 100.0;
            let h = 1e-3;
            self.alpha(s + h) - 2.0 * self.alpha(s) + self.alpha(s - h) >= -1e-14
        });
        AssumptionReport {
            g_at_zero_nonpositive: self.g(0.0) <= 0.0,
            g_at_one_nonnegative: self.g(1.0) >= 0.0,
            alpha_convex: convex,
            alpha_prime_zero_at_origin: self.alpha_prime(0.0) == 0.0,
            delta_alpha: self.delta_alpha(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionReport {
    pub g_at_zero_nonpositive: bool,
    pub g_at_one_nonnegative: bool,
    pub alpha_convex: bool,
    pub alpha_prime_zero_at_origin: bool,
    pub delta_alpha: f64,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.g_at_zero_nonpositive
            && self.g_at_one_nonnegative
            && self.alpha_convex
            && self.alpha_prime_zero_at_origin
            && self.delta_alpha > 0.0
    }
}

/// The unit interval `(0, 1)` with Dirichlet orientation data at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain1D {
    pub gamma_left: f64,
    pub gamma_right: f64,
}

/// The annulus `r0 < |x| < r_outer` with radial orientation data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainRadial {
    pub r0: f64,
    pub r_outer: f64,
    pub gamma_inner: f64,
    pub gamma_outer: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Interval(Domain1D),
    Radial(DomainRadial),
}

impl Domain1D {
    pub fn new(gamma_left: f64, gamma_right: f64) -> Result<Self> {
        if !(gamma_left.is_finite() && gamma_right.is_finite()) {
            return Err(KwcError::Validation("boundary values must be finite".into()));
        }
        Ok(Self { gamma_left, gamma_right })
    }
}

impl DomainRadial {
    pub fn new(r0: f64, r_outer: f64, gamma_inner: f64, gamma_outer: f64) -> Result<Self> {
        if !(r0 > 0.0 && r_outer > r0 && r_outer.is_finite()) {
            return Err(KwcError::Validation(format!("need 0 < r0 < R, got r0={r0}, R={r_outer}")));
        }
        if !(gamma_inner.is_finite() && gamma_outer.is_finite()) {
            return Err(KwcError::Validation("boundary values must be finite".into()));
        }
        Ok(Self { r0, r_outer, gamma_inner, gamma_outer })
    }
}

impl Domain {
    /// `(γ at the left/inner end, γ at the right/outer end)`.
    pub fn boundary_values(&self) -> (f64, f64) {
        match self {
            Domain::Interval(d) => (d.gamma_left, d.gamma_right),
            Domain::Radial(d) => (d.gamma_inner, d.gamma_outer),
        }
    }

    /// `|γ|_∞` over the boundary.
    pub fn gamma_sup(&self) -> f64 {
        let (a, b) = self.boundary_values();
        a.abs().max(b.abs())
    }

    pub fn extent(&self) -> (f64, f64) {
        match self {
            Domain::Interval(_) => (0.0, 1.0),
            Domain::Radial(d) => (d.r0, d.r_outer),
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(self, Domain::Radial(_))
    }
}

/// `0 ≤ η₀ ≤ 1` and `|θ₀| ≤ gamma_sup` at every node.
pub fn admissible_initial_data(eta0: &ScalarField, theta0: &ScalarField, gamma_sup: f64) -> Result<bool> {
    eta0.check_same_grid(theta0)?;
    let eta_ok = eta0.values().iter().all(|&e| (0.0..=1.0).contains(&e));
    let theta_ok = theta0.values().iter().all(|&t| t.abs() <= gamma_sup);
    Ok(eta_ok && theta_ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn concrete_laws_satisfy_relaxed_assumptions() {
        let laws = MaterialLaws::new(1e-3).unwrap();
        let report = laws.check_assumptions();
        assert!(report.all_hold());
        assert_eq!(laws.g(0.0), -1.0);
        // δ₀ = 0 loses the uniform positivity only
        let r0 = MaterialLaws::new(0.0).unwrap().check_assumptions();
        assert!(!r0.all_hold() && r0.alpha_convex && r0.g_at_one_nonnegative);
    }

    #[test]
    fn alpha_bounded_below_by_delta0() {
        let laws = MaterialLaws::new(0.05).unwrap();
        for k in 0..=1000 {
            let s = k as f64 / 1000.0;
            assert!(laws.alpha(s) >= 0.05 && laws.alpha0(s) >= 0.05);
        }
    }

    #[test]
    fn potential_is_primitive_of_g() {
        let laws = MaterialLaws::default();
        for k in 0..=20 {
            let s = -0.5 + k as f64 * 0.1;
            let h = 1e-6;
            let fd = (laws.big_g(s + h) - laws.big_g(s - h)) / (2.0 * h);
            assert!((fd - laws.g(s)).abs() < 1e-8);
            assert!(laws.big_g(s) >= 0.0);
        }
    }

    #[test]
    fn alpha_inverse_round_trips() {
        let laws = MaterialLaws::new(0.01).unwrap();
        for &e in &[0.0, 0.3, 1.0] {
            assert!((laws.alpha_inverse(laws.alpha(e)).unwrap() - e).abs() < 1e-12);
        }
        assert!(laws.alpha_inverse(0.0).is_none());
    }

    #[test]
    fn time_step_bound_is_one_half() {
        assert_eq!(MaterialLaws::default().max_time_step(), 0.5);
    }

    #[test]
    fn admissibility_of_initial_data() {
        let grid = Grid::interval(9).unwrap();
        let half = ScalarField::constant(&grid, 0.5);
        let zero = ScalarField::constant(&grid, 0.0);
        assert!(admissible_initial_data(&half, &zero, 1.0).unwrap());

        let mut bad = half.clone();
        bad.values_mut()[3] = 1.2;
        assert!(!admissible_initial_data(&bad, &zero, 1.0).unwrap());

        let one = ScalarField::constant(&grid, 1.0);
        let top = ScalarField::constant(&grid, 1.0);
        assert!(admissible_initial_data(&one, &top, 1.0).unwrap());

        let other = ScalarField::constant(&Grid::interval(5).unwrap(), 0.0);
        assert!(matches!(
            admissible_initial_data(&half, &other, 1.0),
            Err(KwcError::Dimension(_))
        ));
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(DomainRadial::new(2.0, 1.0, 0.0, 1.0).is_err());
        assert!(DomainRadial::new(0.0, 1.0, 0.0, 1.0).is_err());
        assert!(Domain1D::new(0.0, f64::NAN).is_err());
        assert!(MaterialLaws::new(-1.0).is_err());
    }
}
