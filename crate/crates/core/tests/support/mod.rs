//! Oracles shared by the integration tests and the acceptance gate. Nothing here
//! calls into the stepper's assembly: the discrete functionals are rewritten from
//! their definitions.
#![allow(dead_code)]

use kwc_core::grid::Grid;
use kwc_core::model::{Domain, Domain1D, DomainRadial, MaterialLaws};
use kwc_core::regnorm::{NormKind, RegularizedNorm};
use kwc_core::stepper::StepConfig;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `[x, I₀, I₁, K₀, K₁]` at 50 significant digits, from `oracles/bessel_reference.py`.
pub const BESSEL_TABLE: [[f64; 5]; 18] = [
    [0.001, 1.0000002500000156, 0.0005000000625000026, 7.023688800562382, 999.9962381560856],
    [0.01, 1.0000250001562505, 0.005000062500260417, 4.721244730161095, 99.97389411829624],
    [0.1, 1.0025015629340956, 0.050062526047092694, 2.427069024702017, 9.853844780870606],
    [0.5, 1.0634833707413236, 0.2578943053908963, 0.9244190712276659, 1.656441120003301],
    [1.0, 1.2660658777520084, 0.565159103992485, 0.42102443824070834, 0.6019072301972346],
    [1.5, 1.646723189772891, 0.9816664285779075, 0.21380556264752573, 0.2773878004568438],
    [2.0, 2.2795853023360673, 1.590636854637329, 0.11389387274953344, 0.13986588181652243],
    [2.5, 3.289839144050123, 2.5167162452886984, 0.06234755320036619, 0.07389081634774707],
    [3.0, 4.8807925858650245, 3.9533702174026093, 0.03473950438627925, 0.040156431128194184],
    [5.0, 27.239871823604446, 24.335642142450528, 0.0036910983340425942, 0.004044613445452165],
    [7.5, 268.16131151518937, 249.58436542268814, 0.00024917761635611437, 0.0002652973901252895],
    [10.0, 2815.7166284662544, 2670.9883037012546, 1.778006231616765e-05, 1.8648773453825585e-05],
    [15.0, 339649.3732979139, 328124.9219702064, 9.819536482396435e-08, 1.0141729369762092e-07],
    [20.0, 43558282.559553534, 42454973.38512777, 5.741237815336525e-10, 5.883057969557038e-10],
    [25.0, 5774560606.4663105, 5657865129.878701, 3.4641615622131143e-12, 3.5327780731999337e-12],
    [30.0, 781672297823.9775, 768532038938.957, 2.1324774964630563e-14, 2.1677320018915495e-14],
    [40.0, 1.48947747934199e+16, 1.4707396163259352e+16, 8.392861100099567e-19, 8.497131954861039e-19],
    [50.0, 2.9325537838493362e+20, 2.903078590103557e+20, 3.4101677497894956e-23, 3.4441022267175555e-23],
];

/// `b(1, 2) = I₀(2)K₁(1) + I₁(1)K₀(2)`
pub const B_1_2: f64 = 1.4364670344007882;

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn grad(v: &[f64], hx: f64) -> Vec<f64> {
    v.windows(2).map(|p| (p[1] - p[0]) / hx).collect()
}

/// Harmonic extension with `r_{c+½}(H_{c+1} − H_c)` constant.
pub fn harmonic(grid: &Grid, g0: f64, g1: f64) -> Vec<f64> {
    let inv: Vec<f64> = grid.midpoint_weights().iter().map(|r| 1.0 / r).collect();
    let total: f64 = inv.iter().sum();
    let mut out = vec![g0];
    let mut acc = 0.0;
    for i in &inv {
        acc += i;
        out.push(g0 + (g1 - g0) * acc / total);
    }
    out
}

/// One time step's frozen data.
pub struct Instance {
    pub grid: Grid,
    pub domain: Domain,
    pub laws: MaterialLaws,
    pub cfg: StepConfig,
    pub eta: Vec<f64>,
    pub theta: Vec<f64>,
}

pub fn instance(rng: &mut ChaCha8Rng, n: usize, radial: bool, nu: f64) -> Instance {
    let (g0, g1) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let (grid, domain) = if radial {
        let r0 = rng.gen_range(0.3..2.0);
        let r1 = r0 + rng.gen_range(0.5..3.0);
        (Grid::radial(r0, r1, n).unwrap(), Domain::Radial(DomainRadial::new(r0, r1, g0, g1).unwrap()))
    } else {
        (Grid::interval(n).unwrap(), Domain::Interval(Domain1D::new(g0, g1).unwrap()))
    };
    let sup = domain.gamma_sup();
    let eta: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let mut theta: Vec<f64> = (0..n).map(|_| rng.gen_range(-sup..=sup)).collect();
    theta[0] = g0;
    theta[n - 1] = g1;
    let cfg = StepConfig { h: rng.gen_range(0.02..0.5), norm: RegularizedNorm::new(NormKind::Hyperbola, nu), ..Default::default() };
    Instance { grid, domain, laws: MaterialLaws::new(rng.gen_range(0.0..0.1)).unwrap(), cfg, eta, theta }
}

/// `(1/2h)Σ w(η − η_prev)² + ½Σ ℓ(Dη)² + Σ w G(η) + Σ ℓ β |Dθ|_ν`.
pub fn eta_functional(inst: &Instance, eta: &[f64]) -> f64 {
    let g = &inst.grid;
    let (w, l, hx, h) = (g.node_weights(), g.cell_lengths(), g.h(), inst.cfg.h);
    let laws = &inst.laws;
    let prox: f64 = (0..eta.len()).map(|j| w[j] * (eta[j] - inst.eta[j]).powi(2)).sum::<f64>() / (2.0 * h);
    let dir: f64 = grad(eta, hx).iter().zip(l).map(|(p, l)| 0.5 * l * p * p).sum();
    let pot: f64 = eta.iter().zip(w).map(|(e, w)| w * 0.5 * (e - 1.0).powi(2)).sum();
    let tv: f64 = grad(&inst.theta, hx)
        .iter()
        .enumerate()
        .map(|(c, p)| l[c] * 0.5 * (laws.alpha(eta[c]) + laws.alpha(eta[c + 1])) * inst.cfg.norm.value_1d(*p))
        .sum();
    prox + dir + pot + tv
}

pub fn dense_lu_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (b[i] - (i + 1..n).map(|j| a[i][j] * x[j]).sum::<f64>()) / a[i][i];
    }
    x
}

/// Minimizer of [`eta_functional`]: the functional is quadratic,
/// `E(x) = E(0) + bᵀx + ½xᵀAx`, so `A` and `b` follow from evaluations by
/// polarization and the normal equations go through a dense pivoted LU.
pub fn eta_step_oracle(inst: &Instance) -> Vec<f64> {
    let n = inst.eta.len();
    let e = |v: &[f64]| eta_functional(inst, v);
    let zero = vec![0.0; n];
    let e0 = e(&zero);
    let unit = |i: usize| {
        let mut v = zero.clone();
        v[i] = 1.0;
        v
    };
    let ei: Vec<f64> = (0..n).map(|i| e(&unit(i))).collect();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let mut v = unit(i);
            v[j] += 1.0;
            let aij = if i == j { e(&v) - 2.0 * ei[i] + e0 } else { e(&v) - ei[i] - ei[j] + e0 };
            a[i][j] = aij;
            a[j][i] = aij;
        }
    }
    let rhs: Vec<f64> = (0..n).map(|i| -(ei[i] - e0 - 0.5 * a[i][i])).collect();
    dense_lu_solve(a, rhs)
}

/// Contribution of node `j` to the θ-objective, everything else frozen.
fn theta_local(inst: &Instance, eta_new: &[f64], hm: &[f64], z: &[f64], j: usize, zj: f64) -> f64 {
    let g = &inst.grid;
    let (w, l, hx) = (g.node_weights(), g.cell_lengths(), g.h());
    let nu2 = inst.cfg.norm.nu * inst.cfg.norm.nu;
    let mass = w[j] * inst.laws.alpha0(eta_new[j]) / inst.cfg.h;
    let mut out = 0.5 * mass * (zj - inst.theta[j]).powi(2);
    for c in [j - 1, j] {
        let (zl, zr) = if c == j - 1 { (z[c], zj) } else { (zj, z[c + 1]) };
        let p = (zr - zl) / hx;
        let ph = (hm[c + 1] - hm[c]) / hx;
        let beta = 0.5 * (inst.laws.alpha(eta_new[c]) + inst.laws.alpha(eta_new[c + 1]));
        out += l[c] * (beta * inst.cfg.norm.value_1d(p) + 0.5 * nu2 * (p - ph).powi(2));
    }
    out
}

/// `½Σ w α₀(η)/h (z − θ_prev)² + Σ ℓ [β|Dz|_ν + ½ν²(Dz − DH)²]`.
pub fn theta_objective(inst: &Instance, eta_new: &[f64], hm: &[f64], z: &[f64]) -> f64 {
    let g = &inst.grid;
    let (w, l, hx) = (g.node_weights(), g.cell_lengths(), g.h());
    let nu2 = inst.cfg.norm.nu * inst.cfg.norm.nu;
    let mass: f64 = (0..z.len())
        .map(|j| 0.5 * w[j] * inst.laws.alpha0(eta_new[j]) / inst.cfg.h * (z[j] - inst.theta[j]).powi(2))
        .sum();
    let cells: f64 = (0..z.len() - 1)
        .map(|c| {
            let p = (z[c + 1] - z[c]) / hx;
            let ph = (hm[c + 1] - hm[c]) / hx;
            let beta = 0.5 * (inst.laws.alpha(eta_new[c]) + inst.laws.alpha(eta_new[c + 1]));
            l[c] * (beta * inst.cfg.norm.value_1d(p) + 0.5 * nu2 * (p - ph).powi(2))
        })
        .sum();
    mass + cells
}

/// Cyclic coordinate descent with golden-section line minimization; stops once a
/// sweep no longer lowers the objective.
pub fn coordinate_descent(inst: &Instance, eta_new: &[f64], hm: &[f64]) -> Vec<f64> {
    let mut z = inst.theta.clone();
    let sup = inst.domain.gamma_sup();
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut last = theta_objective(inst, eta_new, hm, &z);
    for _ in 0..200_000 {
        for j in 1..z.len() - 1 {
            let (mut a, mut b) = (-sup - 0.5, sup + 0.5);
            let f = |x: f64| theta_local(inst, eta_new, hm, &z, j, x);
            let mut c = b - phi * (b - a);
            let mut d = a + phi * (b - a);
            let (mut fc, mut fd) = (f(c), f(d));
            while b - a > 1e-10 * (1.0 + sup) {
                if fc < fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - phi * (b - a);
                    fc = f(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + phi * (b - a);
                    fd = f(d);
                }
            }
            z[j] = 0.5 * (a + b);
        }
        let now = theta_objective(inst, eta_new, hm, &z);
        if last - now < 1e-15 * (1.0 + now.abs()) {
            break;
        }
        last = now;
    }
    z
}
