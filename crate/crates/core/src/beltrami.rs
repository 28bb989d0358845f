//! Beltrami coefficients on the unit disk and the quantities built from them.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::quaddiff::QuadDifferential;
use crate::quadrature::{DiskQuadrature, Integral};
use crate::series::C64;

/// Grid resolution used when a composition has no closed form.
const CHAIN_GRID: (usize, usize) = (64, 128);

/// A Beltrami coefficient supported on the closed unit disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum BeltramiCoeff {
    Constant { c: C64 },
    /// `k|ψ|/ψ`.
    Teichmueller { psi: QuadDifferential, k: f64 },
    /// `t|z|^(n+1)/z^(n+1)`.
    Monomial { n: i32, t: C64 },
    /// Piecewise constant on the polar cells `[i/n_r, (i+1)/n_r) × [2πj/n_θ, 2π(j+1)/n_θ)`,
    /// stored row-major in `i`.
    Grid { n_r: usize, n_theta: usize, values: Vec<C64> },
}

impl BeltramiCoeff {
    pub fn zero() -> Self {
        BeltramiCoeff::Constant { c: C64::default() }
    }

    pub fn constant(c: C64) -> Result<Self> {
        Self::Constant { c }.validated()
    }

    pub fn monomial(n: i32, t: C64) -> Result<Self> {
        Self::Monomial { n, t }.validated()
    }

    /// Samples `f` at the cell centers of a polar grid.
    pub fn sample<F: FnMut(C64) -> C64>(n_r: usize, n_theta: usize, mut f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(n_r * n_theta);
        for i in 0..n_r {
            let r = (i as f64 + 0.5) / n_r as f64;
            for j in 0..n_theta {
                let t = TAU * (j as f64 + 0.5) / n_theta as f64;
                values.push(f(C64::from_polar(r, t)));
            }
        }
        Self::Grid { n_r, n_theta, values }.validated()
    }

    fn validated(self) -> Result<Self> {
        if let Self::Grid { n_r, n_theta, values } = &self {
            if values.len() != n_r * n_theta || *n_r == 0 || *n_theta == 0 {
                return Err(Error::Domain("grid size does not match its samples".into()));
            }
        }
        let k = self.norm_inf();
        if !(k < 1.0) {
            return Err(Error::Domain(format!("dilatation {k} is not below 1")));
        }
        Ok(self)
    }

    pub fn norm_inf(&self) -> f64 {
        match self {
            Self::Constant { c } => c.norm(),
            Self::Teichmueller { psi, k } => {
                if psi.is_zero() {
                    0.0
                } else {
                    *k
                }
            }
            Self::Monomial { t, .. } => t.norm(),
            Self::Grid { values, .. } => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.norm_inf() == 0.0
    }

    pub fn eval(&self, z: C64) -> C64 {
        let r = z.norm();
        if r > 1.0 {
            return C64::default();
        }
        match self {
            Self::Constant { c } => *c,
            Self::Teichmueller { psi, k } => {
                let v = psi.eval(z);
                let m = v.norm();
                if m > 0.0 && m.is_finite() {
                    *k * m / v
                } else {
                    C64::default()
                }
            }
            Self::Monomial { n, t } => {
                if r == 0.0 {
                    C64::default()
                } else {
                    t * (z.conj() / r).powi(n + 1)
                }
            }
            Self::Grid { n_r, n_theta, values } => {
                let i = ((r * *n_r as f64) as usize).min(n_r - 1);
                let j = ((z.arg().rem_euclid(TAU) / TAU * *n_theta as f64) as usize).min(n_theta - 1);
                values[i * n_theta + j]
            }
        }
    }

    /// Poles of the defining quadratic differential, if any.
    fn marked_points(&self) -> Vec<C64> {
        match self {
            Self::Teichmueller { psi, .. } => psi.poles.clone(),
            _ => vec![],
        }
    }

    /// `μ(z²)·z̄/z`.
    pub fn pullback_r2(&self) -> Self {
        match self {
            Self::Constant { c } => {
                if *c == C64::default() {
                    self.clone()
                } else {
                    Self::Monomial { n: 1, t: *c }
                }
            }
            Self::Monomial { n, t } => Self::Monomial { n: 2 * n + 3, t: *t },
            Self::Teichmueller { psi, k } => Self::Teichmueller {
                psi: psi.pullback_r2(),
                k: *k,
            },
            Self::Grid { n_r, n_theta, .. } => {
                let (n_r, n_theta) = (*n_r, *n_theta);
                let mut values = Vec::with_capacity(n_r * n_theta);
                for i in 0..n_r {
                    let r = (i as f64 + 0.5) / n_r as f64;
                    for j in 0..n_theta {
                        let z = C64::from_polar(r, TAU * (j as f64 + 0.5) / n_theta as f64);
                        values.push(self.eval(z * z) * (z.conj() / z));
                    }
                }
                Self::Grid { n_r, n_theta, values }
            }
        }
    }
}

/// `⟨μ, ψ⟩ = ∬_D μψ dx dy`.
pub fn pairing(mu: &BeltramiCoeff, psi: &QuadDifferential, quad: &DiskQuadrature) -> Result<Integral> {
    psi.check_integrable()?;
    if mu.is_zero() || psi.is_zero() {
        return Ok(Integral {
            value: C64::default(),
            error: 0.0,
            shifted: 0,
        });
    }
    let mut points = psi.poles.clone();
    points.extend(mu.marked_points());
    let q = quad.refined_at(&points);
    Ok(q.integrate(|z| mu.eval(z) * psi.eval(z)))
}

/// The quasiconformal map `w^ν` entering the chain rule.
#[derive(Clone, Debug, PartialEq)]
pub enum MapData {
    /// `w(z) = z + ν z̄`.
    Affine { nu: C64 },
    /// Values of `w`, `∂w` and `∂̄w` at the cell centers of a polar grid.
    Samples {
        n_r: usize,
        n_theta: usize,
        w: Vec<C64>,
        dw: Option<Vec<C64>>,
        dbar_w: Option<Vec<C64>>,
    },
}

/// Coefficient of `w^μ ∘ w^ν`: `(ν + μ*)/(1 + ν̄ μ*)` with
/// `μ* = (μ∘w^ν)·conj(∂w^ν)/∂w^ν`.
pub fn chain_rule(nu: &BeltramiCoeff, mu: &BeltramiCoeff, w_nu: &MapData) -> Result<BeltramiCoeff> {
    if mu.is_zero() {
        return Ok(nu.clone());
    }
    if nu.is_zero() {
        return Ok(mu.clone());
    }
    let combine = |n: C64, m: C64| (n + m) / (C64::new(1.0, 0.0) + n.conj() * m);
    match w_nu {
        MapData::Affine { nu: a } => {
            if let (BeltramiCoeff::Constant { c: n }, BeltramiCoeff::Constant { c: m }) = (nu, mu) {
                return BeltramiCoeff::constant(combine(*n, *m));
            }
            let a = *a;
            let (n_r, n_theta) = CHAIN_GRID;
            BeltramiCoeff::sample(n_r, n_theta, |z| {
                let w = z + a * z.conj();
                combine(nu.eval(z), mu.eval(w))
            })
        }
        MapData::Samples {
            n_r,
            n_theta,
            w,
            dw,
            dbar_w,
        } => {
            let (Some(dw), Some(_)) = (dw, dbar_w) else {
                return Err(Error::MissingData("derivative samples of the inner map".into()));
            };
            let n = n_r * n_theta;
            if w.len() != n || dw.len() != n {
                return Err(Error::Domain("map samples do not match the grid".into()));
            }
            let mut idx = 0;
            BeltramiCoeff::sample(*n_r, *n_theta, |z| {
                let k = idx;
                idx += 1;
                let d = dw[k];
                let star = mu.eval(w[k]) * d.conj() / d;
                combine(nu.eval(z), star)
            })
        }
    }
}

/// `k|ψ|/ψ`, reduced to a closed form when `ψ` is a monomial.
pub fn teichmueller_form(psi: &QuadDifferential, k: f64) -> Result<BeltramiCoeff> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("dilatation {k} outside [0, 1)")));
    }
    if psi.is_zero() {
        return Err(Error::Domain("quadratic differential vanishes identically".into()));
    }
    if k == 0.0 {
        return Ok(BeltramiCoeff::zero());
    }
    let nz: Vec<(usize, C64)> = psi
        .num
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, c)| *c != C64::default())
        .collect();
    if psi.den.len() == 1 && nz.len() == 1 {
        let (p, c) = nz[0];
        let c = c / psi.den[0];
        let unit = c.norm() / c;
        return Ok(if p == 0 {
            BeltramiCoeff::Constant { c: unit * k }
        } else {
            BeltramiCoeff::Monomial {
                n: p as i32 - 1,
                t: unit * k,
            }
        });
    }
    Ok(BeltramiCoeff::Teichmueller { psi: psi.clone(), k })
}

/// Lower bound for `α_D` with its maximizing polynomial `ω`.
#[derive(Clone, Debug)]
pub struct AlphaD {
    pub value: f64,
    /// Ascending coefficients of `ω`, scaled so that `‖ω²‖₁ = 1`.
    pub omega: Vec<C64>,
    /// Quadrature error estimate carried by the moments.
    pub error: f64,
}

/// Matrix `M̃ = G^{-1/2} M G^{-1/2}` with `M_jk = ∬ μ̂ z^(j+k)` and the Gram
/// weights `G_jj = π/(j+1)` of the monomials in `L²(D)`.
pub fn alpha_d_matrix(mu: &BeltramiCoeff, degree: usize, quad: &DiskQuadrature) -> Result<(DMatrix<C64>, f64)> {
    let k = mu.norm_inf();
    if k == 0.0 {
        return Err(Error::Domain("α_D needs a nonzero coefficient".into()));
    }
    let q = quad.refined_at(&mu.marked_points());
    let mut moments = Vec::with_capacity(2 * degree + 1);
    let mut err: f64 = 0.0;
    for p in 0..=2 * degree {
        let i = q.integrate(|z| mu.eval(z) * z.powu(p as u32) / k);
        err = err.max(i.error);
        moments.push(i.value);
    }
    let n = degree + 1;
    let g = |j: usize| (PI / (j as f64 + 1.0)).sqrt();
    let m = DMatrix::from_fn(n, n, |j, l| moments[j + l] / (g(j) * g(l)));
    Ok((m, err))
}

/// Maximizes `|⟨μ/‖μ‖∞, ω²⟩|/‖ω²‖₁` over polynomials of degree at most
/// `degree` by normalized-gradient ascent on the unit sphere with seeded
/// random restarts.
pub fn alpha_d(mu: &BeltramiCoeff, degree: usize, restarts: usize, quad: &DiskQuadrature, seed: u64) -> Result<AlphaD> {
    let (m, error) = alpha_d_matrix(mu, degree, quad)?;
    let n = degree + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (f64::NEG_INFINITY, vec![C64::default(); n]);
    for _ in 0..restarts.max(1) {
        let mut x: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        normalize(&mut x);
        let mut value = linalg::quadratic_form(&m, &x).norm();
        let mut eta = 1.0;
        for _ in 0..5000 {
            let q = linalg::quadratic_form(&m, &x);
            // Wirtinger gradient of |xᵀM̃x|² with respect to x̄.
            let mx = &m * nalgebra::DVector::from_column_slice(&x);
            let mut g: Vec<C64> = mx.iter().map(|v| q * v.conj()).collect();
            let gn = norm(&g);
            if gn == 0.0 {
                break;
            }
            g.iter_mut().for_each(|v| *v /= gn);
            let mut y: Vec<C64> = x.iter().zip(&g).map(|(a, b)| a + b * eta).collect();
            normalize(&mut y);
            let next = linalg::quadratic_form(&m, &y).norm();
            if next > value {
                let gain = next - value;
                x = y;
                value = next;
                if gain <= 1e-16 * value {
                    break;
                }
            } else {
                eta *= 0.5;
                if eta < 1e-10 {
                    break;
                }
            }
        }
        if value > best.0 {
            best = (value, x);
        }
    }
    let omega = best
        .1
        .iter()
        .enumerate()
        .map(|(j, c)| c / (PI / (j as f64 + 1.0)).sqrt())
        .collect();
    Ok(AlphaD {
        value: best.0,
        omega,
        error,
    })
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(x: &mut [C64]) {
    let n = norm(x);
    x.iter_mut().for_each(|c| *c /= n);
}
