//! Grunsky and Milin coefficients, the Grunsky operator and its norm.

use std::f64::consts::PI;
use std::fmt::Write as _;

use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::beltrami::BeltramiCoeff;
use crate::error::{Error, Result};
use crate::linalg;
use crate::quadrature::DiskQuadrature;
use crate::series::{LaurentSeries, Point, C64};

/// Sign relating first-order variations to the generating expansion:
/// `α_mn ≈ s/π ∬ μ z^(m+n−2)`. Fixed by comparing the two against the
/// affine maps `z + ε/z`.
pub const VARIATION_SIGN: f64 = 1.0;

/// Quadrature error above which a variation table is reported as unreliable.
pub const VARIATION_WARN: f64 = 1e-8;

/// `α_mn` for `1 ≤ m, n ≤ N`, stored zero-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrunskyTable {
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: Vec<Vec<C64>>,
    #[serde(default)]
    pub source: String,
}

/// `β_mn = √(mn) α_mn`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrunskyOperator {
    pub n: usize,
    pub beta: DMatrix<C64>,
}

/// Norm of a truncated Grunsky operator.
#[derive(Clone, Debug, PartialEq)]
pub struct GrunskyNorm {
    pub value: f64,
    pub n: usize,
    /// Change against the `N − 1` truncation.
    pub last_increment: f64,
    /// Unit vector attaining the supremum of the quadratic form.
    pub maximizer: Vec<C64>,
}

impl GrunskyTable {
    pub fn zeros(n: usize, source: impl Into<String>) -> Self {
        Self {
            n,
            alpha: vec![vec![C64::default(); n]; n],
            source: source.into(),
        }
    }

    /// `α_mn` with one-based indices.
    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.alpha[m - 1][n - 1]
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for m in 0..self.n {
            for n in 0..m {
                worst = worst.max((self.alpha[m][n] - self.alpha[n][m]).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.alpha.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Entrywise difference; the tables must have the same size.
    pub fn diff(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Domain(format!("table sizes differ: {} vs {}", self.n, other.n)));
        }
        let alpha = self
            .alpha
            .iter()
            .zip(&other.alpha)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(Self {
            n: self.n,
            alpha,
            source: self.source.clone(),
        })
    }

    pub fn operator(&self) -> GrunskyOperator {
        let beta = DMatrix::from_fn(self.n, self.n, |i, j| {
            let sym = 0.5 * (self.alpha[i][j] + self.alpha[j][i]);
            sym * (((i + 1) * (j + 1)) as f64).sqrt()
        });
        GrunskyOperator { n: self.n, beta }
    }

    /// CSV of `|α_mn|` with columns `m,n,abs_alpha`.
    pub fn to_csv_abs(&self) -> String {
        let mut out = String::from("m,n,abs_alpha\n");
        for m in 0..self.n {
            for n in 0..self.n {
                let _ = writeln!(out, "{},{},{:e}", m + 1, n + 1, self.alpha[m][n].norm());
            }
        }
        out
    }
}

impl GrunskyOperator {
    /// Leading `k × k` block.
    pub fn truncate(&self, k: usize) -> Self {
        let k = k.min(self.n);
        Self {
            n: k,
            beta: self.beta.view((0, 0), (k, k)).into_owned(),
        }
    }
}

/// Coefficients `b_1..b_(2N−1)` of `f = c z + b_0 + b_1/z + …` and `c`.
fn hydrodynamic_coeffs(f: &LaurentSeries, n: usize) -> Result<(C64, Vec<C64>)> {
    if f.point() != Point::Infinity {
        return Err(Error::Domain("expected an expansion about infinity".into()));
    }
    let c = match f.leading() {
        Some((1, c)) => c,
        _ => return Err(Error::Domain("leading term must be a nonzero multiple of z".into())),
    };
    if let Some(t) = f.truncation() {
        let known = -(t as i64);
        if known < 2 * n as i64 - 1 {
            return Err(Error::Truncation {
                needed: n as i64,
                available: ((known + 1) / 2).max(0),
            });
        }
    }
    let mut b = vec![C64::default(); 2 * n];
    for (k, slot) in b.iter_mut().enumerate().skip(1) {
        *slot = f.coeff(-(k as i32))?;
    }
    Ok((c, b))
}

fn poly_mul_trunc(a: &[C64], b: &[C64], deg: usize) -> Vec<C64> {
    let mut out = vec![C64::default(); deg + 1];
    for (i, x) in a.iter().enumerate() {
        if *x == C64::default() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(deg + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Grunsky coefficients of `f` from `−log((f(z) − f(ζ))/(z − ζ)) = Σ α_mn z^−m ζ^−n`
/// (up to the constant term), for `1 ≤ m, n ≤ N`.
pub fn grunsky_coefficients(f: &LaurentSeries, n: usize) -> Result<GrunskyTable> {
    if n == 0 {
        return Ok(GrunskyTable::zeros(0, "grunsky"));
    }
    let (c, b) = hydrodynamic_coeffs(f, n)?;
    // Difference quotient over c: 1 + Σ_q Q_q(x) y^q with x = 1/z, y = 1/ζ and
    // Q_q(x) = −(1/c) Σ_p b_(p+q−1) x^p.
    let q: Vec<Vec<C64>> = (0..=n)
        .map(|qi| {
            let mut poly = vec![C64::default(); n + 1];
            if qi > 0 {
                for (p, slot) in poly.iter_mut().enumerate().skip(1) {
                    *slot = -b[p + qi - 1] / c;
                }
            }
            poly
        })
        .collect();
    // Logarithm in y with polynomial coefficients in x:
    // k L_k = k Q_k − Σ_(j<k) (k − j) L_(k−j) Q_j.
    let mut l: Vec<Vec<C64>> = vec![vec![C64::default(); n + 1]; n + 1];
    for k in 1..=n {
        let mut acc: Vec<C64> = q[k].iter().map(|v| v * k as f64).collect();
        for j in 1..k {
            let prod = poly_mul_trunc(&l[k - j], &q[j], n);
            for (a, p) in acc.iter_mut().zip(prod) {
                *a -= p * (k - j) as f64;
            }
        }
        l[k] = acc.into_iter().map(|v| v / k as f64).collect();
    }
    let alpha = (1..=n).map(|m| (1..=n).map(|k| -l[k][m]).collect()).collect();
    Ok(GrunskyTable {
        n,
        alpha,
        source: "grunsky".into(),
    })
}

/// Milin coefficients of `f` relative to the exterior map `χ`, from the
/// expansion of the same logarithm in powers of `1/χ(z)` and `1/χ(ζ)`.
pub fn milin_coefficients(f: &LaurentSeries, chi: &LaurentSeries, n: usize) -> Result<GrunskyTable> {
    if chi.point() != Point::Infinity {
        return Err(Error::Domain("χ must be expanded about infinity".into()));
    }
    match chi.leading() {
        Some((1, c)) if c.re > 0.0 && c.im.abs() <= 1e-14 * c.re => {}
        _ => return Err(Error::Domain("χ must be z·c + … with c > 0".into())),
    }
    let order = chi.order().max(f.order()).max(2 * n as i32 + 2);
    let g = chi.clone().with_order(order).revert()?;
    let fg = f.clone().with_order(order).compose(&g)?;
    let mut table = grunsky_coefficients(&fg, n)?.diff(&grunsky_coefficients(&g, n)?)?;
    table.source = "milin".into();
    Ok(table)
}

/// `sup_{‖x‖=1} |Σ β_mn x_m x_n|`, the largest Takagi value of `β`.
pub fn grunsky_norm(op: &GrunskyOperator) -> GrunskyNorm {
    let top = linalg::takagi_max(&op.beta);
    let prev = if op.n > 1 {
        linalg::takagi_max(&op.truncate(op.n - 1).beta).sigma
    } else {
        0.0
    };
    GrunskyNorm {
        value: top.sigma,
        n: op.n,
        last_increment: top.sigma - prev,
        maximizer: top.vector,
    }
}

/// Grunsky norm of a hydrodynamically normalized series at truncation `n`.
pub fn grunsky_norm_of(f: &LaurentSeries, n: usize) -> Result<GrunskyNorm> {
    Ok(grunsky_norm(&grunsky_coefficients(f, n)?.operator()))
}

/// `h_x = Σ √(mn) α_mn x_m x_n` for a unit vector `x`.
pub fn quadratic_form_h(op: &GrunskyOperator, x: &[C64]) -> Result<C64> {
    if x.len() != op.n {
        return Err(Error::Domain(format!("vector has length {}, operator has size {}", x.len(), op.n)));
    }
    let norm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Normalization(norm));
    }
    Ok(linalg::quadratic_form(&op.beta, x))
}

/// First-order table with its quadrature error estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationTable {
    pub table: GrunskyTable,
    pub error: f64,
}

/// Moments `∬_D μ z^p` for `0 ≤ p ≤ p_max`, with the worst error estimate.
pub(crate) fn moments(mu: &BeltramiCoeff, p_max: usize, quad: &DiskQuadrature) -> (Vec<C64>, f64) {
    // Closed forms: only p = 0 (constant) or p = n + 1 (monomial) survive.
    let single = match mu {
        BeltramiCoeff::Constant { c } => Some((0, *c * PI)),
        BeltramiCoeff::Monomial { n, .. } if *n < -1 => Some((usize::MAX, C64::default())),
        BeltramiCoeff::Monomial { n, t } => Some(((n + 1) as usize, *t * (2.0 * PI / f64::from(n + 3)))),
        _ => None,
    };
    if let Some((p, v)) = single {
        let mut values = vec![C64::default(); p_max + 1];
        if p <= p_max {
            values[p] = v;
        }
        return (values, 0.0);
    }
    let q = match mu {
        BeltramiCoeff::Teichmueller { psi, .. } => quad.refined_at(&psi.poles),
        _ => quad.clone(),
    };
    let mut err: f64 = 0.0;
    let values = (0..=p_max)
        .map(|p| {
            let i = q.integrate(|z| mu.eval(z) * z.powu(p as u32));
            err = err.max(i.error);
            i.value
        })
        .collect();
    (values, err)
}

/// First-order Grunsky coefficients `α_mn = (s/π) ∬_D μ z^(m+n−2)`.
pub fn grunsky_variation(mu: &BeltramiCoeff, n: usize, quad: &DiskQuadrature) -> Result<VariationTable> {
    if !(mu.norm_inf() < 1.0) {
        return Err(Error::Domain("dilatation must be below 1".into()));
    }
    if n == 0 {
        return Ok(VariationTable {
            table: GrunskyTable::zeros(0, "variation"),
            error: 0.0,
        });
    }
    let (m, err) = moments(mu, 2 * n - 2, quad);
    let scale = VARIATION_SIGN / PI;
    let alpha = (0..n)
        .map(|i| (0..n).map(|j| m[i + j] * scale).collect())
        .collect();
    let error = err / PI;
    if error > VARIATION_WARN {
        warn!("variation table at N = {n}: estimated quadrature error {error:e}");
    }
    Ok(VariationTable {
        table: GrunskyTable {
            n,
            alpha,
            source: "variation".into(),
        },
        error,
    })
}
