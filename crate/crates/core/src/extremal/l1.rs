//! L1 distance from a quadratic differential to the span of the rational
//! functions `ρ_s(z) = (e_s − 1)/((z − 1)(z − e_s))`.
//!
//! With the coefficient of the target fixed to one, the problem is convex in
//! the span coefficients. It is solved by Nelder–Mead from seeded restarts,
//! polished by quasi-Newton steps, and certified through the optimality
//! conditions `⟨|ψ_e|/ψ_e, ρ_s⟩ = 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quaddiff::QuadDifferential;
use crate::quadrature::DiskQuadrature;
use crate::series::C64;

/// Default duality residual accepted as a certificate.
pub const DEFAULT_TOLERANCE: f64 = 1e-3;

/// Relative size of `d` below which the target is treated as a span member.
const MEMBER_THRESHOLD: f64 = 1e-7;

/// Fixed points `e_s` and the basis `ρ_s` built from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanBasis {
    pub fixed_points: Vec<C64>,
}

impl SpanBasis {
    pub fn new(fixed_points: Vec<C64>) -> Result<Self> {
        for (i, e) in fixed_points.iter().enumerate() {
            if e.norm() >= 1.0 {
                return Err(Error::Domain(format!("fixed point {e} is not in the unit disk")));
            }
            if fixed_points[..i].iter().any(|f| (f - e).norm() < 1e-12) {
                return Err(Error::Domain(format!("fixed point {e} is repeated")));
            }
        }
        Ok(Self { fixed_points })
    }

    pub fn len(&self) -> usize {
        self.fixed_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixed_points.is_empty()
    }

    /// `ρ(z) = (e − 1)/((z − 1)(z − e))`.
    pub fn rho(e: C64) -> QuadDifferential {
        let one = C64::new(1.0, 0.0);
        QuadDifferential::with_poles(vec![e - one], vec![e, -(one + e), one], vec![one, e])
    }

    pub fn functions(&self) -> Vec<QuadDifferential> {
        self.fixed_points.iter().map(|&e| Self::rho(e)).collect()
    }

    /// All poles of the basis functions.
    pub fn poles(&self) -> Vec<C64> {
        let mut p = vec![C64::new(1.0, 0.0)];
        p.extend(self.fixed_points.iter().copied());
        p
    }
}

/// Solver settings.
#[derive(Clone, Debug, PartialEq)]
pub struct L1Options {
    pub restarts: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for L1Options {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: 0x5eed,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct L1Result {
    /// `inf ‖ψ0 + Σ ξ_s ρ_s‖₁`.
    pub d: f64,
    /// Minimizing `ξ_s`.
    pub coeffs: Vec<C64>,
    /// `ψ_e = ψ0 + Σ ξ_s ρ_s`.
    pub psi_e: QuadDifferential,
    /// `|⟨|ψ_e|/ψ_e, ρ_s⟩|` for each `s`.
    pub span_residuals: Vec<f64>,
    /// `|⟨|ψ_e|/ψ_e, ψ0⟩ − d|`.
    pub value_residual: f64,
    pub certified: bool,
    /// Quadrature error estimate of `d`.
    pub error: f64,
}

impl L1Result {
    pub fn max_residual(&self) -> f64 {
        self.span_residuals.iter().copied().fold(self.value_residual, f64::max)
    }
}

/// Node values of the target and basis, with a constant offset so that the
/// objective is `base + Σ w (|P + Σ ξ R| − |P|)`.
pub(crate) struct Problem {
    weights: Vec<f64>,
    target: Vec<C64>,
    target_abs: Vec<f64>,
    basis: Vec<Vec<C64>>,
    base: f64,
    // base is Σ w|ψ0|, so the objective can be summed directly
    direct: bool,
}

impl Problem {
    pub(crate) fn new(quad: &DiskQuadrature, target: impl Fn(C64) -> C64 + Sync, basis: &[QuadDifferential], base: Option<f64>) -> Self {
        let nodes = quad.nodes();
        let target: Vec<C64> = nodes.par_iter().map(|&z| target(z)).collect();
        let basis = basis
            .iter()
            .map(|b| nodes.par_iter().map(|&z| b.eval(z)).collect())
            .collect();
        let weights = quad.weights().to_vec();
        let target_abs: Vec<f64> = target.iter().map(|p| p.norm()).collect();
        let direct = base.is_none();
        let base = base.unwrap_or_else(|| weights.iter().zip(&target_abs).map(|(w, p)| w * p).sum());
        Self {
            weights,
            target,
            target_abs,
            basis,
            base,
            direct,
        }
    }

    fn dim(&self) -> usize {
        2 * self.basis.len()
    }

    fn coeffs(x: &[f64]) -> Vec<C64> {
        x.chunks(2).map(|c| C64::new(c[0], c[1])).collect()
    }

    fn shift(&self, xi: &[C64], i: usize) -> C64 {
        xi.iter().zip(&self.basis).map(|(c, b)| c * b[i]).sum()
    }

    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        let xi = Self::coeffs(x);
        if self.direct {
            return (0..self.weights.len())
                .map(|i| self.weights[i] * (self.target[i] + self.shift(&xi, i)).norm_sqr().sqrt())
                .sum();
        }
        let mut acc = 0.0;
        for i in 0..self.weights.len() {
            let p = self.target[i];
            let b = self.shift(&xi, i);
            let s = (p + b).norm_sqr().sqrt() + self.target_abs[i];
            if s > 0.0 {
                acc += self.weights[i] * (2.0 * (p * b.conj()).re + b.norm_sqr()) / s;
            }
        }
        self.base + acc
    }

    /// `G_s = Σ w ρ_s conj(ψ_e)/|ψ_e|`; the real gradient is `(Re G, −Im G)`.
    pub(crate) fn dual(&self, x: &[f64]) -> Vec<C64> {
        let xi = Self::coeffs(x);
        let mut g = vec![C64::default(); self.basis.len()];
        for i in 0..self.weights.len() {
            let e = self.target[i] + self.shift(&xi, i);
            let m = e.norm_sqr().sqrt();
            if m == 0.0 {
                continue;
            }
            let u = e.conj() / m * self.weights[i];
            for (gs, b) in g.iter_mut().zip(&self.basis) {
                *gs += b[i] * u;
            }
        }
        g
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.dual(x).iter().flat_map(|g| [g.re, -g.im]).collect()
    }

    fn basis_l1(&self, s: usize) -> f64 {
        self.weights.iter().zip(&self.basis[s]).map(|(w, b)| w * b.norm()).sum()
    }

    fn target_scale(&self) -> f64 {
        let l1: f64 = self.weights.iter().zip(&self.target).map(|(w, p)| w * p.norm()).sum();
        l1.max(self.base.abs()).max(1e-300)
    }
}

/// Stops on relative spread `ftol`, or once the spread or the best value falls
/// below the absolute `floor`.
fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], step: f64, ftol: f64, floor: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        let spread = values[n] - values[0];
        let size = simplex[1..]
            .iter()
            .map(|x| x.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= ftol * values[0].abs() + floor || values[0].abs() <= floor || size <= 1e-14 * (1.0 + step) {
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|x| x[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (simplex[n][j] - centroid[j])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let xc = along(-0.5);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                for i in 1..=n {
                    simplex[i] = (0..n).map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j])).collect();
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    (simplex[best].clone(), values[best])
}

/// BFGS with Armijo backtracking.
fn polish(p: &Problem, x0: Vec<f64>, f0: f64, floor: f64) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut x = x0;
    let mut fx = f0;
    let mut g = p.gradient(&x);
    let mut h = vec![vec![0.0; n]; n];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..200 {
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn < 1e-13 || fx.abs() <= floor {
            break;
        }
        let mut d: Vec<f64> = (0..n).map(|i| -(0..n).map(|j| h[i][j] * g[j]).sum::<f64>()).collect();
        let mut slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope >= 0.0 {
            d = g.iter().map(|v| -v).collect();
            slope = -gn * gn;
            for (i, row) in h.iter_mut().enumerate() {
                row.iter_mut().for_each(|v| *v = 0.0);
                row[i] = 1.0;
            }
        }
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-14 {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            let fn_ = p.value(&xn);
            if fn_ <= fx + 1e-4 * t * slope {
                accepted = Some((xn, fn_));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fn_)) = accepted else { break };
        let gn_vec = p.gradient(&xn);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn_vec.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-300 {
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i][j] * y[j]).sum()).collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..n {
                for j in 0..n {
                    h[i][j] += ((sy + yhy) * s[i] * s[j]) / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        let gain = fx - fn_;
        x = xn;
        fx = fn_;
        g = gn_vec;
        if gain <= 1e-16 * (fx.abs() + p.target_scale()) {
            break;
        }
    }
    (x, fx)
}

/// Convex minimization of the problem from seeded restarts.
pub(crate) fn minimize(p: &Problem, opts: &L1Options) -> (Vec<f64>, f64) {
    let dim = p.dim();
    let scale = p.target_scale();
    // a span member only needs to be resolved to the member threshold
    let floor = if p.direct { 0.5 * MEMBER_THRESHOLD * scale } else { 0.0 };
    let box_radius = (0..p.basis.len())
        .map(|s| 2.0 * scale / p.basis_l1(s).max(1e-300))
        .fold(0.0, f64::max)
        .max(1e-3);
    let runs: Vec<(Vec<f64>, f64)> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
            let x0: Vec<f64> = if r == 0 {
                vec![0.0; dim]
            } else {
                (0..dim).map(|_| box_radius * (2.0 * rng.gen::<f64>() - 1.0)).collect()
            };
            let (x, fx) = nelder_mead(&|x| p.value(x), &x0, 0.1 * box_radius, 1e-6, floor, 200 * (dim + 1));
            polish(p, x, fx, floor)
        })
        .collect();
    runs.into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| {
            a.0.iter()
                .zip(&b.0)
                .map(|(u, v)| u.total_cmp(v))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        }))
        .expect("at least one restart")
}

pub(crate) fn flatten(coeffs: &[C64]) -> Vec<f64> {
    coeffs.iter().flat_map(|c| [c.re, c.im]).collect()
}

/// Solves the problem and assembles residuals and the combined density.
pub(crate) fn solve(
    p: &Problem,
    psi0: &QuadDifferential,
    basis: &SpanBasis,
    opts: &L1Options,
    error: f64,
) -> L1Result {
    let functions = basis.functions();
    let combine = |coeffs: &[C64]| {
        coeffs
            .iter()
            .zip(&functions)
            .fold(psi0.clone(), |acc, (c, f)| acc.add(&f.scale(*c)))
    };
    if basis.is_empty() {
        let d = p.base;
        return L1Result {
            d,
            coeffs: vec![],
            psi_e: psi0.clone(),
            span_residuals: vec![],
            value_residual: 0.0,
            certified: true,
            error,
        };
    }
    let (x, d) = minimize(p, opts);
    let coeffs = Problem::coeffs(&x);
    let scale = p.target_scale();
    let member = p.base > 0.0 && d.abs() <= MEMBER_THRESHOLD * scale;
    let (span_residuals, value_residual) = if member {
        // ψ0 lies in the span: the zero dual certificate attains d = 0.
        (vec![0.0; coeffs.len()], d.abs())
    } else {
        let g = p.dual(&x);
        let pairing_psi0 = coeffs.iter().zip(&g).map(|(c, gs)| c * gs).sum::<C64>();
        (g.iter().map(|v| v.norm()).collect(), pairing_psi0.norm())
    };
    let worst = span_residuals.iter().copied().fold(value_residual, f64::max);
    L1Result {
        d: if member { 0.0 } else { d },
        psi_e: combine(&coeffs),
        coeffs,
        span_residuals,
        value_residual,
        certified: worst <= opts.tolerance,
        error,
    }
}

/// `d = inf_ξ ‖ψ0 + Σ ξ_s ρ_s‖₁` over the disk.
pub fn l1_distance_to_span(
    psi0: &QuadDifferential,
    basis: &SpanBasis,
    quad: &DiskQuadrature,
    opts: &L1Options,
) -> Result<L1Result> {
    psi0.check_integrable()?;
    let mut poles = psi0.poles.clone();
    poles.extend(basis.poles());
    let q = quad.refined_at(&poles);
    let functions = basis.functions();
    let p = Problem::new(&q, |z| psi0.eval(z), &functions, None);
    let mut result = solve(&p, psi0, basis, opts, 0.0);
    let coarse = Problem::new(&q.companion(), |z| psi0.eval(z), &functions, None);
    result.error = (coarse.value(&flatten(&result.coeffs)) - p.value(&flatten(&result.coeffs))).abs();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn member_of_span_has_zero_distance() {
        let e = C64::new(0.3, 0.2);
        let basis = SpanBasis::new(vec![e]).unwrap();
        let psi0 = SpanBasis::rho(e).scale(C64::new(0.0, 2.0));
        let quad = DiskQuadrature::new(24, 64);
        let r = l1_distance_to_span(&psi0, &basis, &quad, &L1Options::default()).unwrap();
        assert_eq!(r.d, 0.0);
        assert!(r.certified);
        assert!((r.coeffs[0] - C64::new(0.0, -2.0)).norm() < 1e-6);
    }

    #[test]
    fn empty_span_is_the_norm() {
        let psi0 = QuadDifferential::constant(C64::new(1.0, 0.0));
        let basis = SpanBasis::new(vec![]).unwrap();
        let r = l1_distance_to_span(&psi0, &basis, &DiskQuadrature::new(16, 32), &L1Options::default()).unwrap();
        assert!((r.d - std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_fixed_points() {
        assert!(SpanBasis::new(vec![C64::new(1.0, 0.0)]).is_err());
        assert!(SpanBasis::new(vec![C64::new(0.1, 0.0), C64::new(0.1, 0.0)]).is_err());
    }

    #[test]
    fn nelder_mead_on_quadratic() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2);
        let (x, fx) = nelder_mead(&f, &[0.0, 0.0], 0.5, 0.0, 0.0, 2000);
        assert!(fx < 1e-20);
        assert!((x[0] - 1.0).abs() < 1e-10 && (x[1] + 2.0).abs() < 1e-10);
    }
}
