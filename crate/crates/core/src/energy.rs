//! Discrete sharp and relaxed free energies.
//!
//! On a grid with node weights `w_j` and cell lengths `ℓ_c` (see [`crate::grid`]):
//!
//! ```text
//! dirichlet   = ½ Σ_c ℓ_c (Dη)_c²
//! potential   = Σ_j w_j G(η_j)
//! weightedTV  = Σ_c ℓ_c β_c |Dθ|_c            β_c = (α(η_c) + α(η_{c+1}))/2
//! boundary    = r₀ α(η_0)|θ_0 − γ₀| + R α(η_N)|θ_N − γ₁|
//! nuTerm      = (ν²/2) Σ_c ℓ_c (D(θ − H))_c²   H = discrete harmonic extension
//! ```
//!
//! The cell weight `β_c` averages `α` over the two nodes rather than evaluating
//! `α` at the mean of `η`. Both are second-order consistent; the nodal average
//! makes the TV term a sum of `α(η_j)` times nodal masses, so the η-step of the
//! stepper is the exact minimizer of a quadratic and the energy inequality holds
//! to rounding.

use serde::{Deserialize, Serialize};

use crate::error::{KwcError, Result};
use crate::grid::{discrete_harmonic_extension, gradient_of, Grid, ScalarField};
use crate::model::{Domain, MaterialLaws};
use crate::regnorm::RegularizedNorm;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EnergyReport {
    pub dirichlet: f64,
    pub potential: f64,
    /// Sharp weighted total variation `Σ ℓ β |Dθ|`.
    pub weighted_tv: f64,
    /// Regularized weighted total variation `Σ ℓ β |Dθ|_ν`; equals `weighted_tv` in a sharp report.
    pub weighted_tv_nu: f64,
    pub boundary_penalty: f64,
    pub nu_term: f64,
    pub sharp_total: f64,
    pub relaxed_total: f64,
}

impl EnergyReport {
    pub fn parts_nonnegative(&self) -> bool {
        [
            self.dirichlet,
            self.potential,
            self.weighted_tv,
            self.weighted_tv_nu,
            self.boundary_penalty,
            self.nu_term,
        ]
        .iter()
        .all(|&v| v >= 0.0)
    }
}

/// Cell weights `β_c = (α(η_c) + α(η_{c+1}))/2`.
pub fn tv_weights(eta: &[f64], laws: &MaterialLaws) -> Vec<f64> {
    eta.windows(2).map(|p| 0.5 * (laws.alpha(p[0]) + laws.alpha(p[1]))).collect()
}

/// `F_γ(η, θ)`: Dirichlet, potential, weighted TV and the boundary penalty.
///
/// The relaxed fields mirror the sharp ones (`nu_term = 0`).
pub fn sharp_energy(
    eta: &ScalarField,
    theta: &ScalarField,
    laws: &MaterialLaws,
    domain: &Domain,
) -> Result<EnergyReport> {
    eta.check_same_grid(theta)?;
    let grid = eta.grid();
    grid.check_domain(domain)?;
    let (dirichlet, potential) = eta_parts(eta.values(), grid, laws);
    let tv = weighted_tv(eta.values(), theta.values(), grid, laws, None);
    let (g0, g1) = domain.boundary_values();
    let (b0, b1) = grid.boundary_weights();
    let (e0, e1) = eta.traces();
    let (t0, t1) = theta.traces();
    let boundary_penalty = b0 * laws.alpha(e0) * (t0 - g0).abs() + b1 * laws.alpha(e1) * (t1 - g1).abs();
    let sharp_total = dirichlet + potential + tv + boundary_penalty;
    Ok(EnergyReport {
        dirichlet,
        potential,
        weighted_tv: tv,
        weighted_tv_nu: tv,
        boundary_penalty,
        nu_term: 0.0,
        sharp_total,
        relaxed_total: sharp_total,
    })
}

/// `F^ν_γ(η, θ)` on the constraint set `θ = γ` at both ends.
pub fn relaxed_energy(
    eta: &ScalarField,
    theta: &ScalarField,
    laws: &MaterialLaws,
    domain: &Domain,
    norm: &RegularizedNorm,
) -> Result<EnergyReport> {
    eta.check_same_grid(theta)?;
    let grid = eta.grid();
    let harmonic = discrete_harmonic_extension(domain, grid)?;
    check_boundary_constraint(theta, domain)?;
    Ok(relaxed_parts(eta.values(), theta.values(), grid, laws, norm, harmonic.values()))
}

/// Domain error unless both end values of `theta` equal the boundary data.
pub fn check_boundary_constraint(theta: &ScalarField, domain: &Domain) -> Result<()> {
    let (g0, g1) = domain.boundary_values();
    let (t0, t1) = theta.traces();
    let (left, right) = if domain.is_radial() { ("inner", "outer") } else { ("left", "right") };
    for (name, t, g) in [(left, t0, g0), (right, t1, g1)] {
        if (t - g).abs() > 1e-12 * (1.0 + g.abs()) {
            return Err(KwcError::Domain(format!(
                "theta at the {name} boundary is {t}, boundary datum is {g}"
            )));
        }
    }
    Ok(())
}

/// Relaxed report from raw arrays; `harmonic` is the discrete harmonic extension.
pub(crate) fn relaxed_parts(
    eta: &[f64],
    theta: &[f64],
    grid: &Grid,
    laws: &MaterialLaws,
    norm: &RegularizedNorm,
    harmonic: &[f64],
) -> EnergyReport {
    let (dirichlet, potential) = eta_parts(eta, grid, laws);
    let tv = weighted_tv(eta, theta, grid, laws, None);
    let tv_nu = weighted_tv(eta, theta, grid, laws, Some(norm));
    let h = grid.h();
    let nu_term = 0.5
        * norm.nu
        * norm.nu
        * theta
            .windows(2)
            .zip(harmonic.windows(2))
            .zip(grid.cell_lengths())
            .map(|((t, hm), l)| {
                let d = ((t[1] - hm[1]) - (t[0] - hm[0])) / h;
                l * d * d
            })
            .sum::<f64>();
    EnergyReport {
        dirichlet,
        potential,
        weighted_tv: tv,
        weighted_tv_nu: tv_nu,
        boundary_penalty: 0.0,
        nu_term,
        sharp_total: dirichlet + potential + tv,
        relaxed_total: dirichlet + potential + tv_nu + nu_term,
    }
}

fn eta_parts(eta: &[f64], grid: &Grid, laws: &MaterialLaws) -> (f64, f64) {
    let grad = gradient_of(eta, grid.h());
    let dirichlet = 0.5 * grad.iter().zip(grid.cell_lengths()).map(|(p, l)| l * p * p).sum::<f64>();
    let potential = eta.iter().zip(grid.node_weights()).map(|(&e, w)| w * laws.big_g(e)).sum();
    (dirichlet, potential)
}

fn weighted_tv(eta: &[f64], theta: &[f64], grid: &Grid, laws: &MaterialLaws, norm: Option<&RegularizedNorm>) -> f64 {
    let grad = gradient_of(theta, grid.h());
    tv_weights(eta, laws)
        .iter()
        .zip(&grad)
        .zip(grid.cell_lengths())
        .map(|((b, p), l)| l * b * norm.map_or(p.abs(), |n| n.value_1d(*p)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::harmonic_extension;
    use crate::model::{Domain1D, DomainRadial};
    use crate::regnorm::NormKind;
    use proptest::prelude::*;

    fn interval(g0: f64, g1: f64) -> Domain {
        Domain::Interval(Domain1D::new(g0, g1).unwrap())
    }

    #[test]
    fn ground_state_has_zero_energy() {
        let laws = MaterialLaws::new(0.0).unwrap();
        let dom = interval(0.4, 0.4);
        let g = Grid::interval(17).unwrap();
        let r = sharp_energy(&ScalarField::constant(&g, 1.0), &ScalarField::constant(&g, 0.4), &laws, &dom).unwrap();
        assert_eq!(r.sharp_total, 0.0);
        assert!(r.parts_nonnegative());
    }

    #[test]
    fn pure_boundary_penalty() {
        let laws = MaterialLaws::new(0.0).unwrap();
        let dom = interval(0.0, 2.0);
        let g = Grid::interval(17).unwrap();
        let r = sharp_energy(&ScalarField::constant(&g, 1.0), &ScalarField::constant(&g, 0.0), &laws, &dom).unwrap();
        assert!((r.sharp_total - 1.0).abs() < 1e-15);
        assert!((r.boundary_penalty - 1.0).abs() < 1e-15);
    }

    #[test]
    fn step_profile_matches_closed_form() {
        // η = 1 − x(1 − x), θ = 1_{x ≥ ½}, γ = (0, 1), δ₀ = 0:
        // ½∫η'² = ½∫(2x−1)² = 1/6, ∫G = ½∫x²(1−x)² = 1/60, TV = α(¾) = 9/32.
        let laws = MaterialLaws::new(0.0).unwrap();
        let dom = interval(0.0, 1.0);
        let g = Grid::interval(2049).unwrap();
        let eta = ScalarField::from_fn(&g, |x| 1.0 - x * (1.0 - x));
        let theta = ScalarField::from_fn(&g, |x| if x >= 0.5 { 1.0 } else { 0.0 });
        let r = sharp_energy(&eta, &theta, &laws, &dom).unwrap();
        assert!((r.dirichlet - 1.0 / 6.0).abs() < 1e-6);
        assert!((r.potential - 1.0 / 60.0).abs() < 1e-6);
        assert!((r.weighted_tv - 9.0 / 32.0).abs() < 1e-6);
        assert_eq!(r.boundary_penalty, 0.0);
    }

    #[test]
    fn relaxed_energy_of_harmonic_profile() {
        let laws = MaterialLaws::new(0.0).unwrap();
        let dom = interval(0.0, 2.0);
        let g = Grid::interval(65).unwrap();
        let norm = RegularizedNorm::new(NormKind::Hyperbola, 0.1);
        let theta = harmonic_extension(&dom, &g).unwrap();
        let r = relaxed_energy(&ScalarField::constant(&g, 1.0), &theta, &laws, &dom, &norm).unwrap();
        assert!(r.nu_term.abs() < 1e-20);
        assert!((r.weighted_tv_nu - 0.5 * ((4.0f64 + 0.01).sqrt() - 0.1)).abs() < 1e-13);
        assert_eq!(r.boundary_penalty, 0.0);
    }

    #[test]
    fn relaxed_energy_requires_boundary_data() {
        let laws = MaterialLaws::default();
        let dom = Domain::Radial(DomainRadial::new(1.0, 2.0, 0.0, 1.0).unwrap());
        let g = Grid::for_domain(&dom, 9).unwrap();
        let norm = RegularizedNorm::new(NormKind::Tanh, 0.1);
        let mut theta = harmonic_extension(&dom, &g).unwrap();
        theta.values_mut()[8] = 0.9;
        let err = relaxed_energy(&ScalarField::constant(&g, 1.0), &theta, &laws, &dom, &norm).unwrap_err();
        assert!(matches!(&err, KwcError::Domain(m) if m.contains("outer")), "{err}");
    }

    #[test]
    fn relaxed_tends_to_sharp_as_nu_shrinks() {
        let laws = MaterialLaws::default();
        let dom = interval(0.0, 1.5);
        let g = Grid::interval(257).unwrap();
        let eta = ScalarField::from_fn(&g, |x| 0.6 + 0.3 * (3.0 * x).sin());
        let theta = ScalarField::from_fn(&g, |x| 1.5 * x * x);
        let sharp = sharp_energy(&eta, &theta, &laws, &dom).unwrap().sharp_total;
        let mut last = f64::INFINITY;
        for k in 1..=4 {
            let norm = RegularizedNorm::new(NormKind::Hyperbola, 10f64.powi(-k));
            let r = relaxed_energy(&eta, &theta, &laws, &dom, &norm).unwrap();
            let gap = (r.relaxed_total - sharp).abs();
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 1e-3);
    }

    proptest! {
        #[test]
        fn shift_invariance_and_envelope_bound(
            eta in prop::collection::vec(0.0..1.0f64, 24),
            theta in prop::collection::vec(-2.0..2.0f64, 24),
            shift in -3.0..3.0f64,
            nu in 0.01..0.5f64,
        ) {
            let laws = MaterialLaws::default();
            let g = Grid::radial(0.5, 3.0, 24).unwrap();
            let dom = Domain::Radial(DomainRadial::new(0.5, 3.0, -1.0, 1.5).unwrap());
            let e = ScalarField::new(&g, eta).unwrap();
            let t = ScalarField::new(&g, theta.clone()).unwrap();
            let base = sharp_energy(&e, &t, &laws, &dom).unwrap();
            prop_assert!(base.parts_nonnegative());

            let dom_s = Domain::Radial(DomainRadial::new(0.5, 3.0, -1.0 + shift, 1.5 + shift).unwrap());
            let ts = ScalarField::new(&g, theta.iter().map(|v| v + shift).collect()).unwrap();
            let shifted = sharp_energy(&e, &ts, &laws, &dom_s).unwrap();
            prop_assert!((base.sharp_total - shifted.sharp_total).abs() <= 1e-10 * (1.0 + base.sharp_total));

            let mut tp = t.clone();
            tp.values_mut()[0] = -1.0;
            tp.values_mut()[23] = 1.5;
            for kind in [NormKind::Hyperbola, NormKind::Tanh, NormKind::Arctan] {
                let norm = RegularizedNorm::new(kind, nu);
                let env = norm.envelope();
                let r = relaxed_energy(&e, &tp, &laws, &dom, &norm).unwrap();
                let sup_alpha = laws.alpha(1.0);
                prop_assert!(r.parts_nonnegative());
                prop_assert!(r.relaxed_total >= env.a * r.weighted_tv - env.b * g.measure() * sup_alpha - 1e-12);
            }
        }
    }
}
