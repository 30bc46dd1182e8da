//! Smooth convex approximations `|·|_ν` of the Euclidean norm.
//!
//! Every kind is radial: `|ξ|_ν = φ(|ξ|)` for a convex, nondecreasing profile `φ`
//! with `φ(0) = 0`. The gradient is `φ'(|ξ|) ξ/|ξ|` and vanishes at the origin.
//!
//! | kind       | `φ(s)`                                    | envelope `(a, b, c)`        |
//! |------------|-------------------------------------------|-----------------------------|
//! | Hyperbola  | `√(s² + ν²) − ν`                          | `(1, ν, 1)`                 |
//! | Yosida     | `ν s²/2` for `s ≤ 1/ν`, else `s − 1/(2ν)` | `(1, 1/(2ν), 1)`            |
//! | Tanh       | `ν ln cosh(s/ν)`                          | `(1, ν ln 2, 1)`            |
//! | Arctan     | `(2/π)(s atan(s/ν) − (ν/2) ln(1 + s²/ν²))` | `(1 − √ν, φ*(1 − √ν), 1)` |
//!
//! The Yosida row is the Moreau envelope `inf_ς |ς| + (ν/2)|ς − ξ|²`; its offset
//! `b = 1/(2ν)` grows as `ν → 0`, so it does not shrink to zero like the other
//! three. For the arctangent kind no bounded offset works with slope 1 (the gap
//! `s − φ(s)` grows like `ν ln s`), so the slope is lowered to `a = 1 − √ν` and
//! `b` is the exact conjugate value `sup_s (a s − φ(s))`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_2_PI, LN_2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Hyperbola,
    Yosida,
    Tanh,
    Arctan,
}

impl NormKind {
    pub const ALL: [NormKind; 4] = [
        NormKind::Hyperbola,
        NormKind::Yosida,
        NormKind::Tanh,
        NormKind::Arctan,
    ];
}

impl std::str::FromStr for NormKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hyperbola" => Ok(NormKind::Hyperbola),
            "yosida" => Ok(NormKind::Yosida),
            "tanh" => Ok(NormKind::Tanh),
            "arctan" => Ok(NormKind::Arctan),
            other => Err(format!("unknown norm kind '{other}'")),
        }
    }
}

/// Constants of the lower/upper bounds `|ξ|_ν ≥ a|ξ| − b` and `|∇|·|_ν| ≤ c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedNorm {
    pub kind: NormKind,
    pub nu: f64,
}

impl RegularizedNorm {
    /// Panics unless `nu ∈ (0, 1)`.
    pub fn new(kind: NormKind, nu: f64) -> Self {
        assert!(nu > 0.0 && nu < 1.0, "regularization parameter must lie in (0, 1), got {nu}");
        Self { kind, nu }
    }

    /// Radial profile `φ(s)` for `s ≥ 0`.
    pub fn profile(&self, s: f64) -> f64 {
        let nu = self.nu;
        let s = s.abs();
        match self.kind {
            NormKind::Hyperbola => {
                // √(s²+ν²) − ν written without cancellation
                s * s / ((s * s + nu * nu).sqrt() + nu)
            }
            NormKind::Yosida => {
                if s <= 1.0 / nu {
                    0.5 * nu * s * s
                } else {
                    s - 0.5 / nu
                }
            }
            NormKind::Tanh => {
                let t = s / nu;
                if t < 20.0 {
                    // cosh t − 1 = 2 sinh²(t/2) keeps small arguments accurate
                    let sh = (0.5 * t).sinh();
                    nu * (2.0 * sh * sh).ln_1p()
                } else {
                    // ν ln cosh(s/ν) = s + ν ln(1 + e^{−2s/ν}) − ν ln 2
                    s + nu * ((-2.0 * t).exp().ln_1p() - LN_2)
                }
            }
            NormKind::Arctan => {
                let t = s / nu;
                if t < 1e-4 {
                    FRAC_2_PI * nu * (0.5 * t * t - t.powi(4) / 12.0)
                } else {
                    FRAC_2_PI * (s * t.atan() - 0.5 * nu * (t * t).ln_1p())
                }
            }
        }
    }

    /// `φ'(s)` for `s ≥ 0`.
    pub fn profile_slope(&self, s: f64) -> f64 {
        let nu = self.nu;
        let s = s.abs();
        match self.kind {
            NormKind::Hyperbola => s / (s * s + nu * nu).sqrt(),
            NormKind::Yosida => (nu * s).min(1.0),
            NormKind::Tanh => (s / nu).tanh(),
            NormKind::Arctan => FRAC_2_PI * (s / nu).atan(),
        }
    }

    /// `φ''(s)` for `s ≥ 0` (one-sided at the Yosida kink).
    pub fn profile_curvature(&self, s: f64) -> f64 {
        let nu = self.nu;
        let s = s.abs();
        match self.kind {
            NormKind::Hyperbola => {
                let q = s * s + nu * nu;
                nu * nu / (q * q.sqrt())
            }
            NormKind::Yosida => {
                if s < 1.0 / nu {
                    nu
                } else {
                    0.0
                }
            }
            NormKind::Tanh => {
                let ch = (s / nu).cosh();
                if ch.is_finite() {
                    1.0 / (nu * ch * ch)
                } else {
                    0.0
                }
            }
            NormKind::Arctan => FRAC_2_PI * nu / (nu * nu + s * s),
        }
    }

    /// `|ξ|_ν` for `ξ` of dimension 1 or 2.
    pub fn value(&self, xi: &[f64]) -> f64 {
        self.profile(euclid(xi))
    }

    /// `∇|·|_ν (ξ)`; the zero vector at the origin.
    pub fn gradient(&self, xi: &[f64]) -> Vec<f64> {
        let s = euclid(xi);
        if s == 0.0 {
            return vec![0.0; xi.len()];
        }
        let k = self.profile_slope(s) / s;
        xi.iter().map(|x| k * x).collect()
    }

    /// Scalar specialization used by the 1D and radial discretizations: `|p|_ν`.
    #[inline]
    pub fn value_1d(&self, p: f64) -> f64 {
        self.profile(p)
    }

    /// `d/dp |p|_ν`.
    #[inline]
    pub fn derivative_1d(&self, p: f64) -> f64 {
        if p == 0.0 {
            0.0
        } else {
            self.profile_slope(p).copysign(p)
        }
    }

    /// `d²/dp² |p|_ν`.
    #[inline]
    pub fn second_derivative_1d(&self, p: f64) -> f64 {
        self.profile_curvature(p)
    }

    pub fn envelope(&self) -> Envelope {
        let nu = self.nu;
        match self.kind {
            NormKind::Hyperbola => Envelope { a: 1.0, b: nu, c: 1.0 },
            NormKind::Yosida => Envelope {
                a: 1.0,
                b: 0.5 / nu,
                c: 1.0,
            },
            NormKind::Tanh => Envelope {
                a: 1.0,
                b: nu * LN_2,
                c: 1.0,
            },
            NormKind::Arctan => {
                let a = 1.0 - nu.sqrt();
                // φ'(s*) = a  ⇔  s* = ν tan(πa/2)
                let s_star = nu * (0.5 * std::f64::consts::PI * a).tan();
                let b = a * s_star - self.profile(s_star);
                Envelope { a, b: b.max(0.0), c: 1.0 }
            }
        }
    }
}

fn euclid(xi: &[f64]) -> f64 {
    match xi {
        [] => 0.0,
        [x] => x.abs(),
        [x, y] => x.hypot(*y),
        _ => xi.iter().map(|v| v * v).sum::<f64>().sqrt(),
    }
}
